//! The runnable scattering delay network.
//!
//! One node sits at the first-order reflection point of each wall. Every node
//! exchanges waves with every other node through bidirectional delay lines,
//! receives the source signal through its own line and sends its extracted
//! pressure to the microphone through another.

mod delay;
mod filter;
mod response;

use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use delay::{DelayLine, Ramp};
pub use filter::{is_stable, OnePole, WallFilter};
pub use response::{
    frequency_response, impulse_response_from_spectrum, loop_poles, loop_state_matrix, pole_residual,
};

use crate::geometry::{first_order_reflection_points, validate_scene, FilterSpec, SceneConfig, Vec3};
use crate::rir::ImpulseResponse;
use crate::scattering::{
    admittance_scattering, constant_extraction_weights, isotropic_matrix, normalized_householder,
    random_lossless, LosslessMatrix, RandomKind,
};
use crate::{Error, Result};

/// Tolerance on `wᵀA𝟙 = 2`.
pub const WEIGHT_TOL: f64 = 1e-12;

/// Default length of parameter glides after an interactive update, in samples.
pub const DEFAULT_TRANSITION: usize = 256;

/// Which scattering matrix the nodes share.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    #[default]
    Isotropic,
    /// Normalised Householder reflection built from an admittance vector.
    Householder,
    /// Physical scattering of a junction with the given port admittances.
    Admittance,
    /// Random orthogonal matrix (product of Givens rotations).
    Orthogonal,
    Permutation,
    /// Random real circulant all-pass matrix.
    Circulant,
}

impl MatrixKind {
    pub const ALL: [MatrixKind; 6] = [
        MatrixKind::Isotropic,
        MatrixKind::Householder,
        MatrixKind::Admittance,
        MatrixKind::Orthogonal,
        MatrixKind::Permutation,
        MatrixKind::Circulant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MatrixKind::Isotropic => "isotropic",
            MatrixKind::Householder => "householder",
            MatrixKind::Admittance => "admittance",
            MatrixKind::Orthogonal => "orthogonal",
            MatrixKind::Permutation => "permutation",
            MatrixKind::Circulant => "circulant",
        }
    }
}

impl std::fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MatrixKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MatrixKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = MatrixKind::ALL.iter().map(|k| k.name()).collect();
                Error::arg(format!("unknown matrix kind '{s}' (expected one of {})", names.join(", ")))
            })
    }
}

/// Scattering matrix choice plus optional admittances and extraction weights.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    #[serde(default)]
    pub kind: MatrixKind,
    /// Port admittances for `householder` and `admittance`; drawn from the seed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub admittance: Option<Vec<f64>>,
    /// Custom extraction weights; must satisfy `wᵀA𝟙 = 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

impl MatrixSpec {
    pub fn new(kind: MatrixKind) -> Self {
        MatrixSpec {
            kind,
            ..Default::default()
        }
    }
}

impl From<MatrixKind> for MatrixSpec {
    fn from(kind: MatrixKind) -> Self {
        MatrixSpec::new(kind)
    }
}

/// Scattering matrix and extraction weights shared by every node.
#[derive(Debug, Clone)]
pub struct Junction {
    pub matrix: LosslessMatrix,
    pub weights: DVector<f64>,
}

impl Junction {
    pub fn new(matrix: LosslessMatrix, weights: DVector<f64>) -> Result<Self> {
        let k = matrix.size();
        if weights.len() != k {
            return Err(Error::arg(format!("expected {k} extraction weights, got {}", weights.len())));
        }
        let gain = weights.dot(&(matrix.entries() * DVector::from_element(k, 1.0)));
        if (gain - 2.0).abs() > WEIGHT_TOL * weights.amax().max(1.0) {
            return Err(Error::arg(format!("extraction weights give wᵀA𝟙 = {gain}, expected 2")));
        }
        Ok(Junction { matrix, weights })
    }

    /// Build the junction for `K` ports; random choices are drawn from `seed`.
    pub fn from_spec(spec: &MatrixSpec, k: usize, seed: u64) -> Result<Self> {
        let admittance = || -> Result<Vec<f64>> {
            match &spec.admittance {
                Some(y) if y.len() != k => {
                    Err(Error::arg(format!("expected {k} admittances, got {}", y.len())))
                }
                Some(y) => Ok(y.clone()),
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    Ok((0..k).map(|_| rng.random_range(0.5..2.0)).collect())
                }
            }
        };
        let (matrix, y) = match spec.kind {
            MatrixKind::Isotropic => (isotropic_matrix(k)?, None),
            MatrixKind::Householder => (normalized_householder(&admittance()?)?, None),
            MatrixKind::Admittance => {
                let y = admittance()?;
                (admittance_scattering(&y)?, Some(y))
            }
            MatrixKind::Orthogonal => (random_lossless(RandomKind::OrthogonalGivens, k, seed)?, None),
            MatrixKind::Permutation => (random_lossless(RandomKind::Permutation, k, seed)?, None),
            MatrixKind::Circulant => (random_lossless(RandomKind::CirculantAllpass, k, seed)?, None),
        };
        let weights = match (&spec.weights, y) {
            (Some(w), _) => DVector::from_column_slice(w),
            (None, Some(y)) => {
                let total: f64 = y.iter().sum();
                DVector::from_iterator(k, y.iter().map(|v| 2.0 * v / total))
            }
            (None, None) => constant_extraction_weights(matrix.entries()).map_err(|_| {
                Error::arg(format!(
                    "the {} matrix has 𝟙ᵀA𝟙 = 0, so constant extraction weights do not exist; \
                     supply custom weights",
                    spec.kind
                ))
            })?,
        };
        Junction::new(matrix, weights)
    }
}

#[inline]
fn neighbor(node: usize, port: usize) -> usize {
    if port < node {
        port
    } else {
        port + 1
    }
}

#[inline]
fn port_of(node: usize, other: usize) -> usize {
    if other < node {
        other
    } else {
        other - 1
    }
}

/// For each `(node, port)` the `(node, port)` at the other end of its line.
/// Ports of a node list the other nodes in ascending index.
pub fn port_pairing(nodes: usize) -> Vec<(usize, usize)> {
    let k = nodes.saturating_sub(1);
    (0..nodes * k)
        .map(|idx| {
            let (i, p) = (idx / k, idx % k);
            let j = neighbor(i, p);
            (j, port_of(j, i))
        })
        .collect()
}

/// Delays, gains and filters of a network, independent of the scattering matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkLayout {
    pub sample_rate: f64,
    pub node_positions: Vec<Vec3>,
    /// Row-major `N×N`; entry `(i, j)` is the line from node `i` to node `j`.
    pub internode_delays: Vec<usize>,
    pub source_delays: Vec<usize>,
    /// Spreading gain times source directivity.
    pub source_gains: Vec<f64>,
    pub mic_delays: Vec<usize>,
    /// Spreading gain times microphone directivity.
    pub mic_gains: Vec<f64>,
    /// Delay and gain of the line-of-sight path.
    pub direct: Option<(usize, f64)>,
    pub filters: Vec<FilterSpec>,
}

impl NetworkLayout {
    pub fn from_scene(scene: &SceneConfig) -> Result<Self> {
        let points = first_order_reflection_points(scene)?;
        let s = scene.source.position;
        let m = scene.mic.position;
        let n = points.len();
        let mut layout = NetworkLayout {
            sample_rate: scene.sample_rate,
            node_positions: points.iter().map(|p| p.position).collect(),
            internode_delays: vec![0; n * n],
            source_delays: Vec::with_capacity(n),
            source_gains: Vec::with_capacity(n),
            mic_delays: Vec::with_capacity(n),
            mic_gains: Vec::with_capacity(n),
            direct: None,
            filters: scene.wall_filters().to_vec(),
        };
        for p in &points {
            let x = p.position;
            let d_s = (x - s).norm();
            let d_m = (m - x).norm();
            let src_delay = scene.delay_samples(d_s);
            // the mic line absorbs the rounding so that the whole first-order path
            // is floored once, like its image source
            let total = scene.delay_samples(d_s + d_m);
            layout.source_delays.push(src_delay);
            layout.mic_delays.push(total - src_delay);
            layout.source_gains.push(scene.source.gain_toward(&x)? / d_s);
            layout.mic_gains.push(scene.mic.gain_toward(&x)? / (1.0 + d_m / d_s));
        }
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let d = (layout.node_positions[i] - layout.node_positions[j]).norm();
                    layout.internode_delays[i * n + j] = scene.delay_samples(d).max(1);
                }
            }
        }
        if scene.direct_path {
            let d = (m - s).norm();
            let g = scene.source.gain_toward(&m)? * scene.mic.gain_toward(&s)? / d;
            layout.direct = Some((scene.delay_samples(d), g));
        }
        Ok(layout)
    }

    pub fn nodes(&self) -> usize {
        self.node_positions.len()
    }

    pub fn internode_delay(&self, from: usize, to: usize) -> usize {
        self.internode_delays[from * self.nodes() + to]
    }

    fn check(&self) -> Result<()> {
        let n = self.nodes();
        if n < 3 {
            return Err(Error::arg("a network needs at least 3 nodes"));
        }
        let sizes = [
            self.source_delays.len(),
            self.source_gains.len(),
            self.mic_delays.len(),
            self.mic_gains.len(),
            self.filters.len(),
        ];
        if sizes.iter().any(|&s| s != n) || self.internode_delays.len() != n * n {
            return Err(Error::arg("layout vectors disagree on the number of nodes"));
        }
        for i in 0..n {
            for j in 0..n {
                let d = self.internode_delay(i, j);
                if i != j && d == 0 {
                    return Err(Error::arg(format!("internode line {i}->{j} has zero delay")));
                }
                if d != self.internode_delay(j, i) {
                    return Err(Error::arg(format!("internode lines {i}<->{j} differ in length")));
                }
            }
        }
        if let Some(f) = self.filters.iter().find(|f| !is_stable(&f.a)) {
            return Err(Error::arg(format!("unstable wall filter with denominator {:?}", f.a)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Line {
    buf: DelayLine,
    delay: Ramp,
    gain: Ramp,
}

impl Line {
    fn new(delay: usize, gain: f64) -> Self {
        Line {
            buf: DelayLine::new(delay + 2),
            delay: Ramp::fixed(delay as f64),
            gain: Ramp::fixed(gain),
        }
    }
}

#[inline]
fn read(buf: &DelayLine, delay: &Ramp, extra: f64) -> f64 {
    let d = delay.value() + extra;
    if delay.is_settled() {
        buf.read(d as usize)
    } else {
        buf.read_frac(d)
    }
}

#[inline]
fn retarget(buf: &mut DelayLine, delay: &mut Ramp, target: usize, len: u32) {
    delay.retarget(target as f64, len);
    buf.ensure_capacity(delay.max_value().ceil() as usize + 2);
}

/// A scattering delay network ready to process audio one sample at a time.
#[derive(Debug, Clone)]
pub struct SdnNetwork {
    n: usize,
    k: usize,
    junction: Junction,
    a: Vec<f64>,
    w: Vec<f64>,
    layout: NetworkLayout,
    scene: Option<SceneConfig>,
    input: DelayLine,
    source: Vec<(Ramp, Ramp)>,
    direct: Option<(Ramp, Ramp)>,
    internode: Vec<Line>,
    mic: Vec<Line>,
    filters: Vec<WallFilter>,
    air: Option<(f64, Vec<OnePole>)>,
    recirculate: bool,
    transition: usize,
    gliding: bool,
    ticks: u64,
    incoming: Vec<f64>,
    outgoing: Vec<f64>,
    extracted: Vec<f64>,
}

/// Build the network for `scene` with the given scattering matrix.
pub fn build_network(scene: &SceneConfig, matrix: &MatrixSpec, seed: u64) -> Result<SdnNetwork> {
    let report = validate_scene(scene);
    if !report.is_ok() {
        return Err(Error::InvalidScene(report.violations));
    }
    let layout = NetworkLayout::from_scene(scene)?;
    let junction = Junction::from_spec(matrix, layout.nodes() - 1, seed)?;
    let mut net = SdnNetwork::from_layout(layout, junction)?;
    net.scene = Some(scene.clone());
    Ok(net)
}

/// Impulse response of the network for `scene`, `⌈duration·F_s⌉` samples long.
pub fn render_rir(scene: &SceneConfig, duration: f64, matrix: &MatrixSpec, seed: u64) -> Result<ImpulseResponse> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::arg("duration must be positive"));
    }
    let mut net = build_network(scene, matrix, seed)?;
    net.render(ImpulseResponse::samples_for(duration, scene.sample_rate))
}

/// Run `input` through the network for `scene`.
pub fn process_signal(scene: &SceneConfig, input: &[f64], matrix: &MatrixSpec, seed: u64) -> Result<Vec<f64>> {
    if input.iter().any(|x| !x.is_finite()) {
        return Err(Error::arg("input contains non-finite samples"));
    }
    build_network(scene, matrix, seed)?.process(input)
}

impl SdnNetwork {
    pub fn from_layout(layout: NetworkLayout, junction: Junction) -> Result<Self> {
        layout.check()?;
        let n = layout.nodes();
        let k = n - 1;
        if junction.matrix.size() != k {
            return Err(Error::arg(format!(
                "{n} nodes need a {k}×{k} scattering matrix, got {}×{}",
                junction.matrix.size(),
                junction.matrix.size()
            )));
        }
        let entries = junction.matrix.entries();
        let a = (0..k * k).map(|i| entries[(i / k, i % k)]).collect();
        let w = junction.weights.iter().copied().collect();
        let mut internode = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                internode.push(Line::new(layout.internode_delay(i, j).max(1), 1.0));
            }
        }
        let max_in = layout
            .source_delays
            .iter()
            .chain(layout.direct.iter().map(|(d, _)| d))
            .copied()
            .max()
            .unwrap_or(0);
        let filters = (0..n * k).map(|idx| WallFilter::new(&layout.filters[idx / k])).collect();
        Ok(SdnNetwork {
            n,
            k,
            a,
            w,
            input: DelayLine::new(max_in + 2),
            source: (0..n)
                .map(|i| (Ramp::fixed(layout.source_delays[i] as f64), Ramp::fixed(layout.source_gains[i])))
                .collect(),
            direct: layout.direct.map(|(d, g)| (Ramp::fixed(d as f64), Ramp::fixed(g))),
            internode,
            mic: (0..n).map(|i| Line::new(layout.mic_delays[i], layout.mic_gains[i])).collect(),
            filters,
            junction,
            layout,
            scene: None,
            air: None,
            recirculate: true,
            transition: DEFAULT_TRANSITION,
            gliding: false,
            ticks: 0,
            incoming: vec![0.0; n * k],
            outgoing: vec![0.0; n * k],
            extracted: vec![0.0; n],
        })
    }

    pub fn nodes(&self) -> usize {
        self.n
    }

    pub fn ports(&self) -> usize {
        self.k
    }

    pub fn sample_rate(&self) -> f64 {
        self.layout.sample_rate
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        self.junction.matrix.entries()
    }

    pub fn junction(&self) -> &Junction {
        &self.junction
    }

    pub fn weights(&self) -> &DVector<f64> {
        &self.junction.weights
    }

    /// Target layout; during a glide the running values are still moving toward it.
    pub fn layout(&self) -> &NetworkLayout {
        &self.layout
    }

    pub fn scene(&self) -> Option<&SceneConfig> {
        self.scene.as_ref()
    }

    pub fn air_absorption(&self) -> Option<f64> {
        self.air.as_ref().map(|(p, _)| *p)
    }

    /// Sum of all internode delays in seconds (the mode density of the network).
    pub fn total_loop_delay(&self) -> f64 {
        self.layout.internode_delays.iter().sum::<usize>() as f64 / self.layout.sample_rate
    }

    /// One-pole low-pass `(1-a)/(1-a z⁻¹)` on every internode line; `None` disables it.
    pub fn set_air_absorption(&mut self, pole: Option<f64>) -> Result<()> {
        match pole {
            Some(p) if !(0.0..1.0).contains(&p) => Err(Error::arg("air absorption pole must lie in [0, 1)")),
            Some(p) => {
                self.air = Some((p, vec![OnePole::new(p); self.n * self.n]));
                Ok(())
            }
            None => {
                self.air = None;
                Ok(())
            }
        }
    }

    /// With recirculation off the internode lines are never read, leaving only
    /// the direct path and first-order reflections.
    pub fn set_recirculation(&mut self, on: bool) {
        self.recirculate = on;
    }

    /// Length of parameter glides started by [`SdnNetwork::update_scene`].
    pub fn set_transition_samples(&mut self, samples: usize) {
        self.transition = samples;
    }

    pub fn is_gliding(&self) -> bool {
        self.gliding
    }

    /// Clear all signal state; parameters jump to their targets.
    pub fn reset(&mut self) {
        self.input.clear();
        for (d, g) in self.source.iter_mut().chain(self.direct.iter_mut()) {
            *d = Ramp::fixed(d.target());
            *g = Ramp::fixed(g.target());
        }
        for l in self.internode.iter_mut().chain(self.mic.iter_mut()) {
            l.buf.clear();
            l.delay = Ramp::fixed(l.delay.target());
            l.gain = Ramp::fixed(l.gain.target());
        }
        self.filters.iter_mut().for_each(WallFilter::reset);
        if let Some((_, st)) = &mut self.air {
            st.iter_mut().for_each(OnePole::reset);
        }
        self.gliding = false;
        self.ticks = 0;
    }

    /// Advance one sample.
    pub fn tick(&mut self, x: f64) -> Result<f64> {
        let (n, k) = (self.n, self.k);
        self.input.push(x);
        if self.recirculate {
            for i in 0..n {
                for p in 0..k {
                    let idx = neighbor(i, p) * n + i;
                    let line = &self.internode[idx];
                    let mut v = read(&line.buf, &line.delay, 0.0);
                    if let Some((_, st)) = &mut self.air {
                        v = st[idx].process(v);
                    }
                    self.incoming[i * k + p] = v;
                }
            }
        } else {
            self.incoming.iter_mut().for_each(|v| *v = 0.0);
        }
        for i in 0..n {
            let (d, g) = &self.source[i];
            let half = 0.5 * g.value() * read(&self.input, d, 1.0);
            let pin = &mut self.incoming[i * k..(i + 1) * k];
            pin.iter_mut().for_each(|v| *v += half);
            let mut pe = 0.0;
            for p in 0..k {
                let row = &self.a[p * k..(p + 1) * k];
                let acc: f64 = row.iter().zip(pin.iter()).map(|(a, v)| a * v).sum();
                let y = self.filters[i * k + p].process(acc);
                self.outgoing[i * k + p] = y;
                pe += self.w[p] * y;
            }
            self.extracted[i] = pe;
        }
        let mut out = 0.0;
        for i in 0..n {
            for p in 0..k {
                self.internode[i * n + neighbor(i, p)].buf.push(self.outgoing[i * k + p]);
            }
            let line = &mut self.mic[i];
            line.buf.push(self.extracted[i]);
            out += line.gain.value() * read(&line.buf, &line.delay, 1.0);
        }
        if let Some((d, g)) = &self.direct {
            out += g.value() * read(&self.input, d, 1.0);
        }
        if self.gliding {
            self.advance_ramps();
        }
        self.ticks += 1;
        if !out.is_finite() {
            return Err(Error::NonFinite { tick: self.ticks - 1 });
        }
        Ok(out)
    }

    fn advance_ramps(&mut self) {
        let mut settled = true;
        for r in self
            .source
            .iter_mut()
            .chain(self.direct.iter_mut())
            .flat_map(|(d, g)| [d, g])
            .chain(self.internode.iter_mut().chain(self.mic.iter_mut()).flat_map(|l| [&mut l.delay, &mut l.gain]))
        {
            r.advance();
            settled &= r.is_settled();
        }
        self.gliding = !settled;
    }

    /// Process a block of samples, continuing from the current state.
    pub fn process(&mut self, input: &[f64]) -> Result<Vec<f64>> {
        input.iter().map(|&x| self.tick(x)).collect()
    }

    /// Reset and render `len` samples of the impulse response.
    pub fn render(&mut self, len: usize) -> Result<ImpulseResponse> {
        self.reset();
        let mut samples = Vec::with_capacity(len);
        for t in 0..len {
            samples.push(self.tick(if t == 0 { 1.0 } else { 0.0 })?);
        }
        ImpulseResponse::new(samples, self.layout.sample_rate)
    }

    /// Squared norm of every wave still travelling between nodes.
    pub fn internal_energy(&self) -> f64 {
        let n = self.n;
        let mut e = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let line = &self.internode[i * n + j];
                    let d = line.delay.value().ceil() as usize;
                    e += (1..=d).map(|m| line.buf.read(m).powi(2)).sum::<f64>();
                }
            }
        }
        e
    }

    /// Move source and microphone; delays and gains glide to the new values
    /// over the transition length while the signal state is kept.
    pub fn update_scene(&mut self, source: Vec3, mic: Vec3) -> Result<()> {
        let Some(scene) = &self.scene else {
            return Err(Error::arg("the network was not built from a scene"));
        };
        let mut next = scene.clone();
        next.source.position = source;
        next.mic.position = mic;
        let report = validate_scene(&next);
        if !report.is_ok() {
            return Err(Error::InvalidScene(report.violations));
        }
        let layout = NetworkLayout::from_scene(&next)?;
        let len = self.transition.min(u32::MAX as usize) as u32;
        let n = self.n;
        for i in 0..n {
            let (d, g) = &mut self.source[i];
            retarget(&mut self.input, d, layout.source_delays[i], len);
            g.retarget(layout.source_gains[i], len);
            let line = &mut self.mic[i];
            retarget(&mut line.buf, &mut line.delay, layout.mic_delays[i], len);
            line.gain.retarget(layout.mic_gains[i], len);
            for j in 0..n {
                if i != j {
                    let line = &mut self.internode[i * n + j];
                    retarget(&mut line.buf, &mut line.delay, layout.internode_delay(i, j), len);
                }
            }
        }
        if let (Some((d, g)), Some((td, tg))) = (&mut self.direct, layout.direct) {
            retarget(&mut self.input, d, td, len);
            g.retarget(tg, len);
        }
        self.gliding = self
            .source
            .iter()
            .chain(self.direct.iter())
            .any(|(d, g)| !d.is_settled() || !g.is_settled())
            || self
                .internode
                .iter()
                .chain(self.mic.iter())
                .any(|l| !l.delay.is_settled() || !l.gain.is_settled());
        self.layout = layout;
        self.scene = Some(next);
        Ok(())
    }

    /// Human-readable dump of nodes, delays and gains.
    pub fn describe(&self) -> String {
        let l = &self.layout;
        let mut s = String::new();
        let _ = writeln!(s, "sample_rate = {}", l.sample_rate);
        let _ = writeln!(s, "nodes = {}", self.n);
        if let Some((d, g)) = l.direct {
            let _ = writeln!(s, "direct = {{ delay = {d}, gain = {g:.9} }}");
        }
        for i in 0..self.n {
            let p = l.node_positions[i];
            let _ = writeln!(s, "\n[[node]]\nindex = {i}\nposition = [{:.6}, {:.6}, {:.6}]", p.x, p.y, p.z);
            let _ = writeln!(s, "source = {{ delay = {}, gain = {:.9} }}", l.source_delays[i], l.source_gains[i]);
            let _ = writeln!(s, "mic = {{ delay = {}, gain = {:.9} }}", l.mic_delays[i], l.mic_gains[i]);
            let row: Vec<String> = (0..self.n).map(|j| l.internode_delay(i, j).to_string()).collect();
            let _ = writeln!(s, "internode_delays = [{}]", row.join(", "));
            let f = &l.filters[i];
            let _ = writeln!(s, "filter = {{ b = {:?}, a = {:?} }}", f.b, f.a);
        }
        let _ = writeln!(s, "\n[junction]");
        for r in 0..self.k {
            let row: Vec<String> = (0..self.k).map(|c| format!("{:.9}", self.a[r * self.k + c])).collect();
            let _ = writeln!(s, "row{r} = [{}]", row.join(", "));
        }
        let w: Vec<String> = self.w.iter().map(|x| format!("{x:.9}")).collect();
        let _ = writeln!(s, "weights = [{}]", w.join(", "));
        s
    }
}
