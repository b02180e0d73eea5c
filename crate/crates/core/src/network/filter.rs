//! Per-port wall reflection filters.

use nalgebra::DMatrix;

use crate::geometry::FilterSpec;

/// Transposed direct-form II IIR filter.
#[derive(Debug, Clone)]
pub struct WallFilter {
    b: Vec<f64>,
    a: Vec<f64>,
    state: Vec<f64>,
    gain_only: Option<f64>,
}

impl WallFilter {
    pub fn new(spec: &FilterSpec) -> Self {
        let a0 = spec.a[0];
        let order = spec.b.len().max(spec.a.len());
        let mut b: Vec<f64> = spec.b.iter().map(|x| x / a0).collect();
        let mut a: Vec<f64> = spec.a.iter().map(|x| x / a0).collect();
        b.resize(order, 0.0);
        a.resize(order, 0.0);
        let gain_only = (order == 1).then_some(b[0]);
        WallFilter {
            b,
            a,
            state: vec![0.0; order.saturating_sub(1)],
            gain_only,
        }
    }

    /// The scalar gain when the filter has order zero.
    pub fn gain(&self) -> Option<f64> {
        self.gain_only
    }

    #[inline]
    pub fn process(&mut self, x: f64) -> f64 {
        if let Some(g) = self.gain_only {
            return g * x;
        }
        let y = self.b[0] * x + self.state[0];
        let last = self.state.len() - 1;
        for i in 0..last {
            self.state[i] = self.b[i + 1] * x - self.a[i + 1] * y + self.state[i + 1];
        }
        self.state[last] = self.b[last + 1] * x - self.a[last + 1] * y;
        y
    }

    pub fn reset(&mut self) {
        self.state.iter_mut().for_each(|s| *s = 0.0);
    }
}

/// True when every root of `a[0] z^n + a[1] z^(n-1) + … + a[n]` lies strictly inside the unit circle.
pub fn is_stable(a: &[f64]) -> bool {
    let Some(&a0) = a.first() else { return false };
    if a0 == 0.0 || a.iter().any(|x| !x.is_finite()) {
        return false;
    }
    let mut coeffs: Vec<f64> = a.iter().map(|x| x / a0).collect();
    while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
        coeffs.pop();
    }
    let n = coeffs.len() - 1;
    if n == 0 {
        return true;
    }
    let companion = DMatrix::from_fn(n, n, |i, j| {
        if i == 0 {
            -coeffs[j + 1]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    crate::scattering::eigenvalues(&companion).is_some_and(|roots| roots.iter().all(|r| r.norm() < 1.0))
}

/// One-pole low-pass `(1-a) / (1 - a z⁻¹)` with unit DC gain.
#[derive(Debug, Clone, Copy, Default)]
pub struct OnePole {
    pole: f64,
    state: f64,
}

impl OnePole {
    pub fn new(pole: f64) -> Self {
        OnePole { pole, state: 0.0 }
    }

    #[inline]
    pub fn process(&mut self, x: f64) -> f64 {
        self.state = (1.0 - self.pole) * x + self.pole * self.state;
        self.state
    }

    pub fn reset(&mut self) {
        self.state = 0.0;
    }

    pub fn response(pole: f64, omega: f64) -> num_complex::Complex64 {
        let zinv = num_complex::Complex64::from_polar(1.0, -omega);
        num_complex::Complex64::new(1.0 - pole, 0.0) / (1.0 - zinv * pole)
    }
}
