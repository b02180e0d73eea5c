//! Lossless scattering matrices.
//!
//! A junction maps incoming wave variables `p⁺` to outgoing ones `p⁻ = A p⁺`.
//! It is lossless with respect to a positive-definite weighting `Y` when
//! `Aᴴ Y A = Y`, i.e. the `Y`-norm of the wave vector is preserved. Every real
//! lossless matrix is diagonalizable with unit-modulus eigenvalues, so it can be
//! written as `T⁻¹ Λ T` with `Λ` block diagonal (see [`construct_lossless`]).

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default tolerance of [`is_lossless`], in spectral norm.
pub const LOSSLESS_TOL: f64 = 1e-9;
/// Eigenbases worse conditioned than this are treated as not diagonalizable.
pub const EIGENBASIS_COND_LIMIT: f64 = 1e8;

/// Real square scattering matrix together with the weighting it is lossless for.
#[derive(Debug, Clone, PartialEq)]
pub struct LosslessMatrix {
    entries: DMatrix<f64>,
    weighting: DMatrix<f64>,
    admittance: Option<DVector<f64>>,
}

impl LosslessMatrix {
    /// Wrap an orthogonal matrix (weighting `I`).
    pub fn orthogonal(entries: DMatrix<f64>) -> Self {
        let n = entries.nrows();
        LosslessMatrix {
            entries,
            weighting: DMatrix::identity(n, n),
            admittance: None,
        }
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }

    /// The positive-definite `Y` with `Aᵀ Y A = Y`.
    pub fn weighting(&self) -> &DMatrix<f64> {
        &self.weighting
    }

    /// Tube admittances for matrices built from a physical junction.
    pub fn admittance(&self) -> Option<&DVector<f64>> {
        self.admittance.as_ref()
    }

    /// Verify the declared weighting.
    pub fn verify(&self, tol: f64) -> LosslessVerdict {
        is_lossless(&self.entries, Weighting::Given(&self.weighting), tol)
    }
}

/// `(2/K) 𝟙𝟙ᵀ - I`: each incoming wave is spread evenly over all other ports.
pub fn isotropic_matrix(k: usize) -> Result<LosslessMatrix> {
    if k < 2 {
        return Err(Error::arg("isotropic matrix needs K >= 2"));
    }
    let off = 2.0 / k as f64;
    let m = DMatrix::from_fn(k, k, |i, j| if i == j { off - 1.0 } else { off });
    Ok(LosslessMatrix::orthogonal(m))
}

fn check_admittance(y: &[f64]) -> Result<()> {
    if y.is_empty() {
        return Err(Error::arg("admittance vector is empty"));
    }
    if y.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::arg("admittances must be positive"));
    }
    Ok(())
}

/// Junction of tubes with admittances `y`: `A = (2/⟨𝟙,y⟩) 𝟙 yᵀ - I`,
/// lossless for `Y = diag(y)`.
pub fn admittance_scattering(y: &[f64]) -> Result<LosslessMatrix> {
    check_admittance(y)?;
    let k = y.len();
    let total: f64 = y.iter().sum();
    let m = DMatrix::from_fn(k, k, |i, j| {
        2.0 * y[j] / total - if i == j { 1.0 } else { 0.0 }
    });
    let yv = DVector::from_column_slice(y);
    Ok(LosslessMatrix {
        entries: m,
        weighting: DMatrix::from_diagonal(&yv),
        admittance: Some(yv),
    })
}

/// The same junction in normalised waves: a Householder reflection about `√y`.
pub fn normalized_householder(y: &[f64]) -> Result<LosslessMatrix> {
    check_admittance(y)?;
    let v = DVector::from_iterator(y.len(), y.iter().map(|x| x.sqrt()));
    let mut out = householder(&v)?;
    out.admittance = Some(DVector::from_column_slice(y));
    Ok(out)
}

/// `(2/‖v‖²) v vᵀ - I`.
pub fn householder(v: &DVector<f64>) -> Result<LosslessMatrix> {
    let n2 = v.norm_squared();
    if n2 == 0.0 || !n2.is_finite() {
        return Err(Error::arg("householder vector must be non-zero"));
    }
    let k = v.len();
    let m = v * v.transpose() * (2.0 / n2) - DMatrix::identity(k, k);
    Ok(LosslessMatrix::orthogonal(m))
}

/// Block-diagonal real normal form: real eigenvalues as 1×1 blocks and complex
/// pairs `r e^{±jθ}` as `[[0, -r], [r, 2r cos θ]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct BlockDiagonalSpectrum {
    pub real: Vec<f64>,
    /// `(r, θ)` per conjugate pair.
    pub pairs: Vec<(f64, f64)>,
}

impl BlockDiagonalSpectrum {
    pub fn size(&self) -> usize {
        self.real.len() + 2 * self.pairs.len()
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.size();
        let mut m = DMatrix::zeros(n, n);
        for (i, &l) in self.real.iter().enumerate() {
            m[(i, i)] = l;
        }
        let off = self.real.len();
        for (p, &(r, th)) in self.pairs.iter().enumerate() {
            let i = off + 2 * p;
            m[(i, i + 1)] = -r;
            m[(i + 1, i)] = r;
            m[(i + 1, i + 1)] = 2.0 * r * th.cos();
        }
        m
    }

    /// A positive-definite `Y_Λ` with `Λᵀ Y_Λ Λ = Y_Λ` (lossless spectra only).
    fn invariant_weighting(&self) -> DMatrix<f64> {
        let n = self.size();
        let mut y = DMatrix::identity(n, n);
        let off = self.real.len();
        for (p, &(_, th)) in self.pairs.iter().enumerate() {
            let i = off + 2 * p;
            y[(i, i + 1)] = th.cos();
            y[(i + 1, i)] = th.cos();
        }
        y
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        let mut ev: Vec<Complex64> = self.real.iter().map(|&l| Complex64::new(l, 0.0)).collect();
        for &(r, th) in &self.pairs {
            ev.push(Complex64::from_polar(r, th));
            ev.push(Complex64::from_polar(r, -th));
        }
        ev
    }

    fn check_lossless(&self) -> Result<()> {
        const EPS: f64 = 1e-12;
        if self.real.iter().any(|l| (l.abs() - 1.0).abs() > EPS) {
            return Err(Error::arg("real eigenvalues of a lossless matrix must be ±1"));
        }
        for &(r, th) in &self.pairs {
            if (r - 1.0).abs() > EPS {
                return Err(Error::arg("complex eigenvalue pairs must have unit modulus"));
            }
            if th.sin().abs() < 1e-9 {
                return Err(Error::arg(
                    "a pair with θ = 0 or π is not diagonalizable in block form; use real ±1 entries",
                ));
            }
        }
        Ok(())
    }
}

fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// `A = T⁻¹ Λ T` for a unit-modulus block spectrum. The result is lossless for
/// `Y = Tᵀ Y_Λ T`, where `Y_Λ` is identity on real blocks and `[[1, cos θ], [cos θ, 1]]`
/// on each rotation-type block.
pub fn construct_lossless(t: &DMatrix<f64>, spectrum: &BlockDiagonalSpectrum) -> Result<LosslessMatrix> {
    if !t.is_square() || t.nrows() != spectrum.size() {
        return Err(Error::arg("T must be square and match the spectrum size"));
    }
    spectrum.check_lossless()?;
    if condition_number(t) > EIGENBASIS_COND_LIMIT {
        return Err(Error::Singular("T is singular or ill-conditioned".into()));
    }
    let t_inv = t
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("T is not invertible".into()))?;
    let entries = &t_inv * spectrum.to_matrix() * t;
    let weighting = t.transpose() * spectrum.invariant_weighting() * t;
    Ok(LosslessMatrix {
        entries,
        weighting,
        admittance: None,
    })
}

/// Weighting to test losslessness against.
#[derive(Debug, Clone, Copy)]
pub enum Weighting<'a> {
    Identity,
    Given(&'a DMatrix<f64>),
    /// Derive a weighting from the eigenbasis, if one exists.
    Auto,
}

#[derive(Debug, Clone)]
pub struct LosslessVerdict {
    pub lossless: bool,
    /// `‖Aᴴ Y A - Y‖₂ / ‖Y‖₂` for the weighting used (infinite when none exists).
    pub residual: f64,
    pub eigenvalues: Vec<Complex64>,
    /// `Y = V⁻ᴴ V⁻¹` built from the eigenvectors in automatic mode.
    pub certificate: Option<DMatrix<Complex64>>,
    pub reason: Option<String>,
}

fn spectral_norm_c(m: &DMatrix<Complex64>) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Eigenvalues from a real Schur decomposition, or `None` if the QR iteration
/// does not converge. Shifted QR can stall on cyclic structures such as
/// permutation matrices; a random orthogonal similarity breaks the symmetry.
pub(crate) fn eigenvalues(a: &DMatrix<f64>) -> Option<Vec<Complex64>> {
    let n = a.nrows();
    let max_iter = 200 * n + 1000;
    let collect = |s: Schur<f64, nalgebra::Dyn>| s.complex_eigenvalues().iter().copied().collect();
    if let Some(s) = Schur::try_new(a.clone(), f64::EPSILON, max_iter) {
        return Some(collect(s));
    }
    for seed in 0..4 {
        let q = random_lossless(RandomKind::OrthogonalGivens, n.max(2), seed).ok()?.into_entries();
        let b = q.transpose() * a * &q;
        if let Some(s) = Schur::try_new(b, f64::EPSILON, max_iter) {
            return Some(collect(s));
        }
    }
    None
}

/// Test `Aᴴ Y A = Y`. In [`Weighting::Auto`] mode the matrix must be diagonalizable
/// with unit-modulus eigenvalues; the weighting is then built from its eigenvectors.
pub fn is_lossless(a: &DMatrix<f64>, weighting: Weighting<'_>, tol: f64) -> LosslessVerdict {
    let n = a.nrows();
    let evs = if a.is_square() { eigenvalues(a) } else { Some(Vec::new()) };
    let converged = evs.is_some();
    let evs = evs.unwrap_or_default();
    let fail = |residual: f64, reason: String, evs: Vec<Complex64>| LosslessVerdict {
        lossless: false,
        residual,
        eigenvalues: evs,
        certificate: None,
        reason: Some(reason),
    };
    if !a.is_square() {
        return fail(f64::INFINITY, "matrix is not square".into(), evs);
    }
    let y = match weighting {
        Weighting::Identity => to_complex(&DMatrix::identity(n, n)),
        Weighting::Given(y) => {
            if y.shape() != a.shape() {
                return fail(f64::INFINITY, "weighting has the wrong shape".into(), evs);
            }
            to_complex(y)
        }
        Weighting::Auto => {
            if !converged {
                return fail(f64::INFINITY, "eigenvalue iteration did not converge".into(), evs);
            }
            if let Some(bad) = evs.iter().find(|l| (l.norm() - 1.0).abs() > tol.max(1e-12)) {
                let reason = format!("eigenvalue {bad} is off the unit circle");
                return fail(f64::INFINITY, reason, evs);
            }
            match eigenbasis(a, &evs) {
                Ok(v) => {
                    let vinv = v.try_inverse().expect("conditioned eigenbasis is invertible");
                    vinv.adjoint() * &vinv
                }
                Err(reason) => return fail(f64::INFINITY, reason, evs),
            }
        }
    };
    let ac = to_complex(a);
    let diff = ac.adjoint() * &y * &ac - &y;
    let residual = spectral_norm_c(&diff) / spectral_norm_c(&y);
    let lossless = residual <= tol;
    LosslessVerdict {
        lossless,
        residual,
        eigenvalues: evs,
        certificate: matches!(weighting, Weighting::Auto).then_some(y),
        reason: (!lossless).then(|| format!("‖AᴴYA - Y‖ = {residual:.3e} exceeds {tol:.1e}")),
    }
}

/// Columns are eigenvectors; errors when the matrix is defective or the basis is
/// too ill-conditioned to trust.
fn eigenbasis(a: &DMatrix<f64>, evs: &[Complex64]) -> std::result::Result<DMatrix<Complex64>, String> {
    const CLUSTER: f64 = 1e-6;
    let n = a.nrows();
    let scale = a.norm().max(1.0);
    let ac = to_complex(a);
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for &l in evs {
        match clusters.iter_mut().find(|(c, _)| (c - l).norm() < CLUSTER) {
            Some(c) => c.1 += 1,
            None => clusters.push((l, 1)),
        }
    }
    let mut cols: Vec<DVector<Complex64>> = Vec::with_capacity(n);
    for (lambda, mult) in clusters {
        let shifted = &ac - DMatrix::<Complex64>::identity(n, n) * lambda;
        let svd = shifted
            .try_svd(false, true, f64::EPSILON, 200 * n + 1000)
            .ok_or_else(|| "singular value iteration did not converge".to_string())?;
        let vt = svd.v_t.expect("requested right singular vectors");
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
        let null_dim = order
            .iter()
            .take_while(|&&i| svd.singular_values[i] <= 1e-7 * scale)
            .count();
        if null_dim < mult {
            return Err(format!(
                "eigenvalue {lambda} has multiplicity {mult} but only {null_dim} eigenvectors (not diagonalizable)"
            ));
        }
        for &i in order.iter().take(mult) {
            cols.push(vt.row(i).adjoint());
        }
    }
    let v = DMatrix::from_columns(&cols);
    let sv = v.clone().svd(false, false).singular_values;
    let cond = sv.max() / sv.min();
    if !(cond <= EIGENBASIS_COND_LIMIT) {
        return Err(format!(
            "eigenbasis condition number {cond:.2e} exceeds {EIGENBASIS_COND_LIMIT:.0e} (numerically not diagonalizable)"
        ));
    }
    Ok(v)
}

/// Families of randomly drawn lossless matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RandomKind {
    /// Product of `K(K-1)/2` Givens rotations with uniform random angles.
    OrthogonalGivens,
    Permutation,
    /// Real circulant matrix with a random conjugate-symmetric unit spectrum.
    CirculantAllpass,
}

/// Seeded random lossless matrix; the same `(kind, k, seed)` always gives the same matrix.
pub fn random_lossless(kind: RandomKind, k: usize, seed: u64) -> Result<LosslessMatrix> {
    if k < 2 {
        return Err(Error::arg("random lossless matrix needs K >= 2"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        RandomKind::OrthogonalGivens => {
            let mut m = DMatrix::<f64>::identity(k, k);
            for i in 0..k {
                for j in (i + 1)..k {
                    let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                    let (s, c) = th.sin_cos();
                    // m <- m * G(i, j, θ)
                    for r in 0..k {
                        let (a, b) = (m[(r, i)], m[(r, j)]);
                        m[(r, i)] = c * a + s * b;
                        m[(r, j)] = -s * a + c * b;
                    }
                }
            }
            Ok(LosslessMatrix::orthogonal(m))
        }
        RandomKind::Permutation => {
            let mut perm: Vec<usize> = (0..k).collect();
            perm.shuffle(&mut rng);
            let m = DMatrix::from_fn(k, k, |i, j| if perm[j] == i { 1.0 } else { 0.0 });
            Ok(LosslessMatrix::orthogonal(m))
        }
        RandomKind::CirculantAllpass => {
            let mut spec = vec![Complex64::new(0.0, 0.0); k];
            let sign = |rng: &mut ChaCha8Rng| if rng.random::<bool>() { 1.0 } else { -1.0 };
            spec[0] = Complex64::new(sign(&mut rng), 0.0);
            for i in 1..=(k - 1) / 2 {
                let ph: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                spec[i] = Complex64::from_polar(1.0, ph);
                spec[k - i] = spec[i].conj();
            }
            if k % 2 == 0 {
                spec[k / 2] = Complex64::new(sign(&mut rng), 0.0);
            }
            circulant_allpass(&spec)
        }
    }
}

/// Real circulant matrix whose eigenvalues (in DFT bin order) are `spectrum`.
/// The first column is the inverse DFT of the spectrum, so the spectrum must be
/// conjugate-symmetric and unit-modulus.
pub fn circulant_allpass(spectrum: &[Complex64]) -> Result<LosslessMatrix> {
    const EPS: f64 = 1e-12;
    let k = spectrum.len();
    if k < 2 {
        return Err(Error::arg("circulant matrix needs K >= 2"));
    }
    if spectrum.iter().any(|l| (l.norm() - 1.0).abs() > EPS) {
        return Err(Error::arg("circulant spectrum must have unit modulus"));
    }
    if (0..k).any(|i| (spectrum[i] - spectrum[(k - i) % k].conj()).norm() > EPS) {
        return Err(Error::arg("circulant spectrum must be conjugate-symmetric"));
    }
    let mut buf = spectrum.to_vec();
    FftPlanner::new().plan_fft_inverse(k).process(&mut buf);
    let col: Vec<f64> = buf.iter().map(|c| c.re / k as f64).collect();
    let m = DMatrix::from_fn(k, k, |i, j| col[(i + k - j) % k]);
    Ok(LosslessMatrix::orthogonal(m))
}

/// Orthogonal matrix nearest to `d` in Frobenius norm: `U Vᵀ` from the SVD of `d`.
pub fn nearest_orthogonal(d: &DMatrix<f64>) -> Result<LosslessMatrix> {
    if !d.is_square() {
        return Err(Error::arg("matrix must be square"));
    }
    let svd = d.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested Vᵀ");
    Ok(LosslessMatrix::orthogonal(u * vt))
}

#[derive(Debug, Clone)]
pub struct HouseholderFit {
    /// Unit vector `v`; the matrix is `2 v vᵀ - I`.
    pub vector: DVector<f64>,
    pub matrix: LosslessMatrix,
    /// The top eigenvalue of `D + Dᵀ` is repeated, so the minimiser is not unique.
    pub degenerate: bool,
}

/// Householder reflection `2 v vᵀ - I` nearest to `d`: `v` is a top eigenvector of `D + Dᵀ`.
pub fn nearest_householder(d: &DMatrix<f64>) -> Result<HouseholderFit> {
    if !d.is_square() {
        return Err(Error::arg("matrix must be square"));
    }
    let k = d.nrows();
    let sym = d + d.transpose();
    let eig = SymmetricEigen::new(sym.clone());
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let top = order[0];
    let scale = sym.norm().max(1.0);
    let degenerate = k > 1 && (eig.eigenvalues[top] - eig.eigenvalues[order[1]]).abs() <= 1e-9 * scale;
    let mut v: DVector<f64> = eig.eigenvectors.column(top).into_owned();
    v /= v.norm();
    // first significant component positive
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            v = -v;
        }
    }
    let matrix = LosslessMatrix::orthogonal(&v * v.transpose() * 2.0 - DMatrix::identity(k, k));
    Ok(HouseholderFit {
        vector: v,
        matrix,
        degenerate,
    })
}

/// `‖(2 v vᵀ - I) - D‖²_F`.
pub fn householder_cost(v: &DVector<f64>, d: &DMatrix<f64>) -> f64 {
    let k = v.len();
    let h = v * v.transpose() * 2.0 - DMatrix::identity(k, k);
    (h - d).norm_squared()
}

/// True iff `a` is orthogonal, all off-diagonal entries are equal and
/// `a = ±((2/K)𝟙𝟙ᵀ - I)` within `tol`.
pub fn check_isotropic_uniqueness(a: &DMatrix<f64>, tol: f64) -> bool {
    if !a.is_square() || a.nrows() < 2 {
        return false;
    }
    let k = a.nrows();
    let ortho = (a.transpose() * a - DMatrix::identity(k, k)).amax();
    if ortho > tol {
        return false;
    }
    let off = a[(0, 1)];
    let uniform = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .all(|(i, j)| (a[(i, j)] - off).abs() <= tol);
    if !uniform {
        return false;
    }
    let iso = isotropic_matrix(k).expect("k >= 2").into_entries();
    (a - &iso).amax() <= tol || (a + &iso).amax() <= tol
}

/// `pᵀ Y p`.
pub fn weighted_energy(p: &DVector<f64>, y: &DMatrix<f64>) -> f64 {
    (p.transpose() * y * p)[(0, 0)]
}

/// Constant extraction weights `w = (2 / 𝟙ᵀA𝟙) 𝟙`, the unique constant vector with `wᵀA𝟙 = 2`.
pub fn constant_extraction_weights(a: &DMatrix<f64>) -> Result<DVector<f64>> {
    let total = a.sum();
    if total.abs() < 1e-9 {
        return Err(Error::arg(
            "𝟙ᵀA𝟙 vanishes, so no constant extraction weights exist; supply per-node weights",
        ));
    }
    Ok(DVector::from_element(a.nrows(), 2.0 / total))
}
