//! Box-room scenes, first-order reflection points and propagation delays.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::analysis::{iso_min_distance, sabine_t60};
use crate::{Error, Result};

pub type Vec3 = Vector3<f64>;

pub const DEFAULT_SOUND_SPEED: f64 = 343.0;
pub const DEFAULT_SAMPLE_RATE: f64 = 44_100.0;

/// The six walls of a box room, in the fixed order used for every node and port
/// table: `x=0, x=Lx, y=0, y=Ly, z=0, z=Lz`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Wall(usize);

impl Wall {
    pub const COUNT: usize = 6;

    pub fn new(index: usize) -> Option<Self> {
        (index < Self::COUNT).then_some(Wall(index))
    }

    pub fn all() -> impl Iterator<Item = Wall> {
        (0..Self::COUNT).map(Wall)
    }

    pub fn index(self) -> usize {
        self.0
    }

    /// Coordinate axis normal to the wall.
    pub fn axis(self) -> usize {
        self.0 / 2
    }

    /// True for the wall at `L`, false for the wall at `0`.
    pub fn is_far(self) -> bool {
        self.0 % 2 == 1
    }

    pub fn plane_offset(self, dims: &Vec3) -> f64 {
        if self.is_far() {
            dims[self.axis()]
        } else {
            0.0
        }
    }

    /// Distance from `p` to the wall plane.
    pub fn distance(self, dims: &Vec3, p: &Vec3) -> f64 {
        (p[self.axis()] - self.plane_offset(dims)).abs()
    }

    /// Mirror image of `p` across the wall plane.
    pub fn mirror(self, dims: &Vec3, p: &Vec3) -> Vec3 {
        let mut q = *p;
        let a = self.axis();
        q[a] = 2.0 * self.plane_offset(dims) - p[a];
        q
    }

    pub fn area(self, dims: &Vec3) -> f64 {
        let a = self.axis();
        dims[(a + 1) % 3] * dims[(a + 2) % 3]
    }

    pub fn name(self) -> &'static str {
        ["x=0", "x=Lx", "y=0", "y=Ly", "z=0", "z=Lz"][self.0]
    }
}

/// Directional gain pattern of a source or microphone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Directivity {
    #[default]
    Omni,
    /// `a + (1 - a) cos θ`, clipped at zero. `a = 0.5` is the cardioid.
    Cardioid { a: f64 },
    /// Gains sampled at increasing angles in degrees, linearly interpolated.
    Tabulated { angles_deg: Vec<f64>, gains: Vec<f64> },
}

impl Directivity {
    /// Gain at angle `theta` (radians) from the reference axis.
    pub fn gain(&self, theta: f64) -> f64 {
        match self {
            Directivity::Omni => 1.0,
            Directivity::Cardioid { a } => (a + (1.0 - a) * theta.cos()).max(0.0),
            Directivity::Tabulated { angles_deg, gains } => {
                let deg = theta.to_degrees();
                let n = angles_deg.len().min(gains.len());
                if n == 0 {
                    return 1.0;
                }
                if deg <= angles_deg[0] {
                    return gains[0].max(0.0);
                }
                for i in 1..n {
                    if deg <= angles_deg[i] {
                        let t = (deg - angles_deg[i - 1]) / (angles_deg[i] - angles_deg[i - 1]);
                        return (gains[i - 1] + t * (gains[i] - gains[i - 1])).max(0.0);
                    }
                }
                gains[n - 1].max(0.0)
            }
        }
    }

    fn check(&self) -> Option<String> {
        match self {
            Directivity::Omni => None,
            Directivity::Cardioid { a } if !a.is_finite() => {
                Some("cardioid parameter must be finite".into())
            }
            Directivity::Cardioid { .. } => None,
            Directivity::Tabulated { angles_deg, gains } => {
                if angles_deg.is_empty() || angles_deg.len() != gains.len() {
                    Some("tabulated directivity needs equal, non-empty angle and gain lists".into())
                } else if angles_deg.windows(2).any(|w| w[1] <= w[0]) {
                    Some("tabulated directivity angles must be strictly increasing".into())
                } else if gains.iter().any(|g| !g.is_finite() || *g < 0.0) {
                    Some("tabulated directivity gains must be finite and non-negative".into())
                } else {
                    None
                }
            }
        }
    }
}

/// A point source or receiver with its directivity and reference axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transducer {
    pub position: Vec3,
    #[serde(default)]
    pub directivity: Directivity,
    #[serde(default = "default_axis")]
    pub axis: Vec3,
}

fn default_axis() -> Vec3 {
    Vec3::x()
}

impl Transducer {
    pub fn omni(position: Vec3) -> Self {
        Transducer {
            position,
            directivity: Directivity::Omni,
            axis: default_axis(),
        }
    }

    /// Gain toward `target`, measured from the reference axis.
    pub fn gain_toward(&self, target: &Vec3) -> Result<f64> {
        directivity_gain(&self.directivity, &self.axis, &self.position, target)
    }
}

/// IIR wall filter `B(z)/A(z)` with `a[0]` normalising the recursion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSpec {
    pub b: Vec<f64>,
    pub a: Vec<f64>,
}

impl FilterSpec {
    pub fn gain(g: f64) -> Self {
        FilterSpec {
            b: vec![g],
            a: vec![1.0],
        }
    }

    /// The cotton-carpet fit used in the frequency-dependent absorption experiment.
    pub fn carpet() -> Self {
        FilterSpec {
            b: vec![0.6876, -1.9207, 1.7899, -0.5567],
            a: vec![1.0, -2.7618, 2.5368, -0.7749],
        }
    }

    /// Frequency response at normalised angular frequency `omega` (rad/sample).
    pub fn response(&self, omega: f64) -> num_complex::Complex64 {
        let zinv = num_complex::Complex64::from_polar(1.0, -omega);
        let eval = |c: &[f64]| {
            c.iter()
                .rev()
                .fold(num_complex::Complex64::new(0.0, 0.0), |acc, &x| acc * zinv + x)
        };
        eval(&self.b) / eval(&self.a)
    }
}

/// Absorption of the six walls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum WallAbsorption {
    /// Same absorption coefficient on every wall.
    Uniform(f64),
    /// One absorption coefficient per wall, in wall order.
    PerWall([f64; 6]),
    /// Same reflection filter on every wall.
    Filter(FilterSpec),
}

impl Default for WallAbsorption {
    fn default() -> Self {
        WallAbsorption::Uniform(0.5)
    }
}

impl WallAbsorption {
    /// Per-wall absorption coefficients, when the absorption is scalar.
    pub fn coefficients(&self) -> Option<[f64; 6]> {
        match self {
            WallAbsorption::Uniform(a) => Some([*a; 6]),
            WallAbsorption::PerWall(a) => Some(*a),
            WallAbsorption::Filter(_) => None,
        }
    }
}

/// A box room with one source and one microphone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub room_dims: Vec3,
    pub source: Transducer,
    pub mic: Transducer,
    #[serde(default)]
    pub walls: WallAbsorption,
    #[serde(default = "default_sample_rate")]
    pub sample_rate: f64,
    #[serde(default = "default_sound_speed")]
    pub sound_speed: f64,
    #[serde(default = "default_true")]
    pub direct_path: bool,
    /// Flip the sign of every wall reflection gain.
    #[serde(default)]
    pub negative_reflection: bool,
}

fn default_sample_rate() -> f64 {
    DEFAULT_SAMPLE_RATE
}

fn default_sound_speed() -> f64 {
    DEFAULT_SOUND_SPEED
}

fn default_true() -> bool {
    true
}

impl SceneConfig {
    /// Box room with omni transducers, uniform absorption and default rates.
    pub fn new(room_dims: Vec3, source: Vec3, mic: Vec3, absorption: f64) -> Self {
        SceneConfig {
            room_dims,
            source: Transducer::omni(source),
            mic: Transducer::omni(mic),
            walls: WallAbsorption::Uniform(absorption),
            sample_rate: DEFAULT_SAMPLE_RATE,
            sound_speed: DEFAULT_SOUND_SPEED,
            direct_path: true,
            negative_reflection: false,
        }
    }

    pub fn volume(&self) -> f64 {
        self.room_dims.x * self.room_dims.y * self.room_dims.z
    }

    pub fn surface_area(&self) -> f64 {
        Wall::all().map(|w| w.area(&self.room_dims)).sum()
    }

    pub fn wall_areas(&self) -> [f64; 6] {
        std::array::from_fn(|i| Wall(i).area(&self.room_dims))
    }

    /// Longest distance between two points of the room.
    pub fn diameter(&self) -> f64 {
        self.room_dims.norm()
    }

    /// Signed scalar reflection gains `±√(1-α)` per wall, if absorption is scalar.
    pub fn reflection_gains(&self) -> Option<[f64; 6]> {
        let sign = if self.negative_reflection { -1.0 } else { 1.0 };
        self.walls
            .coefficients()
            .map(|a| a.map(|alpha| sign * (1.0 - alpha).max(0.0).sqrt()))
    }

    /// Reflection filter of each wall, with the sign convention applied.
    pub fn wall_filters(&self) -> [FilterSpec; 6] {
        match (&self.walls, self.reflection_gains()) {
            (_, Some(g)) => g.map(FilterSpec::gain),
            (WallAbsorption::Filter(f), None) => {
                let mut f = f.clone();
                if self.negative_reflection {
                    f.b.iter_mut().for_each(|b| *b = -*b);
                }
                std::array::from_fn(|_| f.clone())
            }
            _ => unreachable!("scalar absorption always yields gains"),
        }
    }

    pub fn delay_samples(&self, distance: f64) -> usize {
        delay_samples(distance, self.sample_rate, self.sound_speed)
    }

    pub fn is_inside(&self, p: &Vec3) -> bool {
        (0..3).all(|a| p[a] > 0.0 && p[a] < self.room_dims[a])
    }
}

/// Where a first-order reflection meets a wall.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionPoint {
    pub wall: Wall,
    pub position: Vec3,
}

/// First-order specular reflection points on the six walls, in wall order.
pub fn first_order_reflection_points(scene: &SceneConfig) -> Result<[ReflectionPoint; 6]> {
    let dims = &scene.room_dims;
    let s = &scene.source.position;
    let m = &scene.mic.position;
    let report = validate_scene(scene);
    if !report.violations.is_empty() {
        return Err(Error::InvalidScene(report.violations));
    }
    Ok(std::array::from_fn(|i| {
        let wall = Wall(i);
        let ds = wall.distance(dims, s);
        let dm = wall.distance(dims, m);
        let t = ds / (ds + dm);
        let mut position = s + (m - s) * t;
        position[wall.axis()] = wall.plane_offset(dims);
        ReflectionPoint { wall, position }
    }))
}

/// Integer propagation delay `⌊F_s d / c⌋`.
pub fn delay_samples(distance: f64, sample_rate: f64, sound_speed: f64) -> usize {
    let exact = sample_rate * distance / sound_speed;
    let nearest = exact.round();
    // products such as 3.43 * 44100 / 343 land a few ulps below the integer
    if (exact - nearest).abs() <= 8.0 * f64::EPSILON * nearest.max(1.0) {
        nearest as usize
    } else {
        exact.floor().max(0.0) as usize
    }
}

/// Gain of `pattern` (oriented along `axis`) in the direction from `from` to `to`.
pub fn directivity_gain(pattern: &Directivity, axis: &Vec3, from: &Vec3, to: &Vec3) -> Result<f64> {
    let dir = to - from;
    let (dn, an) = (dir.norm(), axis.norm());
    if dn == 0.0 {
        return Err(Error::arg("directivity direction has zero length"));
    }
    if an == 0.0 {
        return Err(Error::arg("directivity axis has zero length"));
    }
    let cos = (axis.dot(&dir) / (an * dn)).clamp(-1.0, 1.0);
    Ok(pattern.gain(cos.acos()))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SceneReport {
    /// Broken invariants; the scene cannot be rendered.
    pub violations: Vec<String>,
    /// Measurement-practice warnings (microphone close to a wall, source too near).
    pub warnings: Vec<String>,
}

impl SceneReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<Self> {
        if self.violations.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidScene(self.violations))
        }
    }
}

/// Check the scene invariants. The ISO distance warning uses the Sabine estimate
/// of the reverberation time when the absorption is scalar.
pub fn validate_scene(scene: &SceneConfig) -> SceneReport {
    let t_est = scene
        .walls
        .coefficients()
        .and_then(|alpha| sabine_t60(&scene.room_dims, &alpha).ok());
    validate_scene_with(scene, t_est)
}

/// Like [`validate_scene`] with an explicit reverberation time estimate.
pub fn validate_scene_with(scene: &SceneConfig, t_est: Option<f64>) -> SceneReport {
    let mut r = SceneReport::default();
    let d = &scene.room_dims;
    if !(0..3).all(|a| d[a].is_finite() && d[a] > 0.0) {
        r.violations.push("room dimensions must be positive".into());
        return r;
    }
    if !(scene.sample_rate.is_finite() && scene.sample_rate > 0.0) {
        r.violations.push("sample rate must be positive".into());
    }
    if !(scene.sound_speed.is_finite() && scene.sound_speed > 0.0) {
        r.violations.push("sound speed must be positive".into());
    }
    let s = &scene.source.position;
    let m = &scene.mic.position;
    if !scene.is_inside(s) {
        r.violations.push("source outside room".into());
    }
    if !scene.is_inside(m) {
        r.violations.push("microphone outside room".into());
    }
    for (what, t) in [("source", &scene.source), ("microphone", &scene.mic)] {
        if let Some(msg) = t.directivity.check() {
            r.violations.push(format!("{what}: {msg}"));
        }
        if t.axis.norm() == 0.0 || !t.axis.iter().all(|x| x.is_finite()) {
            r.violations.push(format!("{what} axis must be a non-zero vector"));
        }
    }
    match &scene.walls {
        WallAbsorption::Filter(f) => {
            if f.b.is_empty() || f.a.is_empty() || f.a[0] == 0.0 {
                r.violations
                    .push("wall filter needs non-empty coefficients and a[0] != 0".into());
            } else if !crate::network::is_stable(&f.a) {
                r.violations.push("wall filter is unstable".into());
            }
        }
        walls => {
            let alpha = walls.coefficients().unwrap_or_default();
            if alpha.iter().any(|a| !(0.0..=1.0).contains(a)) {
                r.violations
                    .push("absorption coefficients must lie in [0, 1]".into());
            }
        }
    }
    if scene.direct_path && s == m {
        r.violations
            .push("source and microphone coincide while the direct path is enabled".into());
    }
    if !r.violations.is_empty() {
        return r;
    }

    let wall_gap = Wall::all()
        .map(|w| w.distance(d, m))
        .fold(f64::INFINITY, f64::min);
    if wall_gap < 1.0 {
        r.warnings.push(format!(
            "microphone is {wall_gap:.2} m from the nearest wall (less than 1 m)"
        ));
    }
    if let Some(t) = t_est.filter(|t| t.is_finite() && *t > 0.0) {
        let dmin = iso_min_distance(scene.volume(), t, scene.sound_speed);
        let dist = (s - m).norm();
        if dist < dmin {
            r.warnings.push(format!(
                "source-microphone distance {dist:.2} m is below the minimum {dmin:.2} m"
            ));
        }
    }
    r
}

/// Angle in radians between two vectors.
pub fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    (a.dot(b) / (a.norm() * b.norm())).clamp(-1.0, 1.0).acos()
}
