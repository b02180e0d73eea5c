use serde::{Deserialize, Serialize};

pub const FEET_TO_METERS: f64 = 0.3048;
/// Frame refresh rate for block convolution (half a 25 fps video frame of latency).
pub const DEFAULT_FRAME_RATE: f64 = 50.0;

/// Algorithms whose per-second operation count can be estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum CostModel {
    /// Network with `k` ports per node and `p` operations per wall filter.
    Sdn { k: u64, p: u64 },
    /// Feedback delay network with `q` lines.
    Fdn { q: u64, p: u64 },
    /// Image sources filling a sphere of radius `c·T60`.
    Ism { volume: f64, t60: f64, sound_speed: f64 },
    /// Block convolution refreshed `frame_rate` times a second; `dynamic`
    /// also transforms a new response every frame.
    OverlapAdd { frame_rate: f64, t60: f64, dynamic: bool },
}

/// Smallest power of two at least `⌈F_s/F_r⌉ + ⌈T60·F_s⌉ − 1`.
pub fn overlap_add_fft_size(fs: f64, frame_rate: f64, t60: f64) -> u64 {
    let need = (fs / frame_rate).ceil() as u64 + (t60 * fs).ceil() as u64 - 1;
    need.max(1).next_power_of_two()
}

/// Floating point operations per second.
pub fn flops_estimate(model: CostModel, fs: f64) -> f64 {
    match model {
        CostModel::Sdn { k, p } => fs * (2 * k.pow(3) + (p + 2) * k * k + k + 1) as f64,
        CostModel::Fdn { q, p } => fs * (2 * q * q + (p + 3) * q + 1) as f64,
        CostModel::Ism { volume, t60, sound_speed } => {
            let images = 4.0 / 3.0 * std::f64::consts::PI * (t60 * sound_speed).powi(3) / volume;
            25.0 * images.ceil()
        }
        CostModel::OverlapAdd { frame_rate, t60, dynamic } => {
            let n = overlap_add_fft_size(fs, frame_rate, t60);
            let log = n.trailing_zeros() as u64;
            let ffts = if dynamic { 18 } else { 12 };
            let per_frame = ffts * n * log + 6 * n + (t60 * fs).ceil() as u64 - 1;
            frame_rate * per_frame as f64
        }
    }
}

/// Upper bound on delay-line memory in bits for `walls` nodes, `q_bits` per
/// sample and a room of diameter `diameter` metres.
pub fn memory_bound(walls: u64, q_bits: f64, fs: f64, sound_speed: f64, diameter: f64) -> f64 {
    let lines = walls * (walls.saturating_sub(1)) + 2 * walls + 1;
    lines as f64 * q_bits * fs / sound_speed * diameter
}
