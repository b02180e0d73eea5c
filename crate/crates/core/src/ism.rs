//! Image source renderer for box rooms.
//!
//! Walls are replaced by the lattice of mirrored sources. An image is indexed
//! by `(l, m, n)` and a parity triple `(u, v, w)`; along x its coordinate is
//! `(1-2u)·x_s + 2l·L_x` and it has met the `x = 0` wall `|l-u|` times and the
//! `x = L_x` wall `|l|` times.

use serde::{Deserialize, Serialize};

use crate::geometry::{directivity_gain, validate_scene, SceneConfig, Vec3, WallAbsorption};
use crate::network::WallFilter;
use crate::rir::ImpulseResponse;
use crate::{Error, Result};

/// One image of the source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImageSource {
    pub index: [i64; 3],
    pub parity: [u8; 3],
    pub position: Vec3,
    /// Reflections off each wall, in wall order.
    pub reflections: [u32; 6],
    pub distance: f64,
    pub delay: usize,
    /// Directivity over distance.
    pub spreading: f64,
    /// Product of scalar wall gains; 1 when the walls are filters.
    pub reflection_gain: f64,
}

impl ImageSource {
    pub fn order(&self) -> u32 {
        self.reflections.iter().sum()
    }

    pub fn amplitude(&self) -> f64 {
        self.spreading * self.reflection_gain
    }

    fn shell(&self) -> i64 {
        self.index.iter().map(|i| i.abs()).sum()
    }
}

/// Rendering limits.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IsmOptions {
    /// Skip images with more reflections than this.
    pub max_order: Option<u32>,
}

fn lattice_range(src: f64, mic: f64, len: f64, parity: u8, radius: f64) -> (i64, i64) {
    let base = if parity == 0 { src } else { -src };
    let lo = ((mic - radius - base) / (2.0 * len)).ceil() as i64;
    let hi = ((mic + radius - base) / (2.0 * len)).floor() as i64;
    (lo, hi)
}

/// Visit every image within `radius` metres of the microphone.
fn for_each_image(scene: &SceneConfig, radius: f64, opts: &IsmOptions, mut visit: impl FnMut(ImageSource)) -> Result<()> {
    let report = validate_scene(scene);
    if !report.is_ok() {
        return Err(Error::InvalidScene(report.violations));
    }
    let dims = scene.room_dims;
    let s = scene.source.position;
    let m = scene.mic.position;
    let gains = scene.reflection_gains().unwrap_or([1.0; 6]);
    let r2 = radius * radius;
    for u in 0..2u8 {
        for v in 0..2u8 {
            for w in 0..2u8 {
                let par = [u, v, w];
                let rx = lattice_range(s.x, m.x, dims.x, u, radius);
                for l in rx.0..=rx.1 {
                    let px = (1.0 - 2.0 * u as f64) * s.x + 2.0 * l as f64 * dims.x;
                    let dx2 = (px - m.x).powi(2);
                    if dx2 > r2 {
                        continue;
                    }
                    let ry = lattice_range(s.y, m.y, dims.y, v, (r2 - dx2).sqrt());
                    for mm in ry.0..=ry.1 {
                        let py = (1.0 - 2.0 * v as f64) * s.y + 2.0 * mm as f64 * dims.y;
                        let dxy2 = dx2 + (py - m.y).powi(2);
                        if dxy2 > r2 {
                            continue;
                        }
                        let rz = lattice_range(s.z, m.z, dims.z, w, (r2 - dxy2).sqrt());
                        for n in rz.0..=rz.1 {
                            let pz = (1.0 - 2.0 * w as f64) * s.z + 2.0 * n as f64 * dims.z;
                            let d2 = dxy2 + (pz - m.z).powi(2);
                            if d2 > r2 {
                                continue;
                            }
                            let idx = [l, mm, n];
                            let reflections: [u32; 6] = std::array::from_fn(|i| {
                                let (a, far) = (i / 2, i % 2 == 1);
                                let k = idx[a];
                                if far {
                                    k.unsigned_abs() as u32
                                } else {
                                    (k - par[a] as i64).unsigned_abs() as u32
                                }
                            });
                            let order: u32 = reflections.iter().sum();
                            if order == 0 && !scene.direct_path {
                                continue;
                            }
                            if opts.max_order.is_some_and(|mo| order > mo) {
                                continue;
                            }
                            let position = Vec3::new(px, py, pz);
                            let distance = d2.sqrt();
                            if distance == 0.0 {
                                continue;
                            }
                            // leaving direction at the real source: mirror back the image->mic ray
                            let mut depart = m - position;
                            for a in 0..3 {
                                if par[a] == 1 {
                                    depart[a] = -depart[a];
                                }
                            }
                            let gs = directivity_gain(&scene.source.directivity, &scene.source.axis, &s, &(s + depart))?;
                            let gm = scene.mic.gain_toward(&position)?;
                            let reflection_gain = reflections
                                .iter()
                                .zip(&gains)
                                .map(|(&c, g)| g.powi(c as i32))
                                .product();
                            visit(ImageSource {
                                index: idx,
                                parity: par,
                                position,
                                reflections,
                                distance,
                                delay: scene.delay_samples(distance),
                                spreading: gs * gm / distance,
                                reflection_gain,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// All images whose path length is at most `c·t_max`, ordered by shell
/// `|l|+|m|+|n|` and then lexicographically by index and parity.
pub fn enumerate_images(scene: &SceneConfig, t_max: f64) -> Result<Vec<ImageSource>> {
    enumerate_images_with(scene, t_max, &IsmOptions::default())
}

pub fn enumerate_images_with(scene: &SceneConfig, t_max: f64, opts: &IsmOptions) -> Result<Vec<ImageSource>> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::arg("t_max must be positive"));
    }
    let mut out = Vec::new();
    for_each_image(scene, scene.sound_speed * t_max, opts, |img| out.push(img))?;
    out.sort_by(|a, b| {
        (a.shell(), a.index, a.parity).cmp(&(b.shell(), b.index, b.parity))
    });
    Ok(out)
}

/// Image-source impulse response, `⌈duration·F_s⌉` samples long.
pub fn render_rir_ism(scene: &SceneConfig, duration: f64) -> Result<ImpulseResponse> {
    render_rir_ism_with(scene, duration, &IsmOptions::default())
}

pub fn render_rir_ism_with(scene: &SceneConfig, duration: f64, opts: &IsmOptions) -> Result<ImpulseResponse> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::arg("duration must be positive"));
    }
    let len = ImpulseResponse::samples_for(duration, scene.sample_rate);
    let radius = scene.sound_speed * (len as f64 + 1.0) / scene.sample_rate;
    match &scene.walls {
        WallAbsorption::Filter(_) => render_filtered(scene, len, radius, opts),
        _ => {
            let mut out = vec![0.0; len];
            for_each_image(scene, radius, opts, |img| {
                if img.delay < len {
                    out[img.delay] += img.amplitude();
                }
            })?;
            ImpulseResponse::new(out, scene.sample_rate)
        }
    }
}

/// Every wall shares one filter, so images are grouped by reflection count and
/// the filter is applied by nesting: `y = t₀ + H(t₁ + H(t₂ + …))`.
fn render_filtered(scene: &SceneConfig, len: usize, radius: f64, opts: &IsmOptions) -> Result<ImpulseResponse> {
    let mut trains: Vec<Vec<f64>> = Vec::new();
    for_each_image(scene, radius, opts, |img| {
        if img.delay < len {
            let r = img.order() as usize;
            if trains.len() <= r {
                trains.resize_with(r + 1, || vec![0.0; len]);
            }
            trains[r][img.delay] += img.spreading;
        }
    })?;
    let spec = scene.wall_filters()[0].clone();
    let mut acc = vec![0.0; len];
    for train in trains.iter().rev() {
        let mut filt = WallFilter::new(&spec);
        for (a, t) in acc.iter_mut().zip(train) {
            *a = filt.process(*a) + t;
        }
    }
    ImpulseResponse::new(acc, scene.sample_rate)
}
