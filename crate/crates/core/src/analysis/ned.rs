use serde::{Deserialize, Serialize};

use crate::rir::ImpulseResponse;
use crate::{Error, Result};

pub const NED_WINDOW_S: f64 = 0.020;
pub const NED_HOP_S: f64 = 0.005;

/// Fraction of Gaussian samples lying more than one standard deviation from the mean.
pub fn gaussian_expectation() -> f64 {
    libm::erfc(std::f64::consts::FRAC_1_SQRT_2)
}

/// Normalised echo density sampled once per hop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NedCurve {
    /// Window centres in seconds.
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub window_s: f64,
    pub hop_s: f64,
}

impl NedCurve {
    /// First time the curve reaches `level`, interpolated between hops.
    pub fn crossing(&self, level: f64) -> Option<f64> {
        let i = self.values.iter().position(|&v| v >= level)?;
        if i == 0 {
            return Some(self.times[0]);
        }
        let (v0, v1) = (self.values[i - 1], self.values[i]);
        let frac = (level - v0) / (v1 - v0);
        Some(self.times[i - 1] + frac * (self.times[i] - self.times[i - 1]))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len().max(1) as f64
    }
}

pub fn ned_profile(rir: &ImpulseResponse, window_s: f64) -> Result<NedCurve> {
    ned_profile_with(rir, window_s, NED_HOP_S)
}

/// Echo density over rectangular windows of `window_s` advanced by `hop_s`.
pub fn ned_profile_with(rir: &ImpulseResponse, window_s: f64, hop_s: f64) -> Result<NedCurve> {
    let fs = rir.sample_rate;
    let w = (window_s * fs).round() as usize;
    let hop = ((hop_s * fs).round() as usize).max(1);
    if w < 10 {
        return Err(Error::arg("echo density window must span at least 10 samples"));
    }
    let h = &rir.samples;
    let norm = gaussian_expectation();
    let (mut times, mut values) = (Vec::new(), Vec::new());
    let mut start = 0;
    while start + w <= h.len() {
        let win = &h[start..start + w];
        let mean = win.iter().sum::<f64>() / w as f64;
        let var = win.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / w as f64;
        let sd = var.sqrt();
        let v = if sd > 0.0 {
            win.iter().filter(|x| (*x - mean).abs() > sd).count() as f64 / w as f64 / norm
        } else {
            0.0
        };
        times.push((start as f64 + 0.5 * w as f64) / fs);
        values.push(v);
        start += hop;
    }
    Ok(NedCurve {
        times,
        values,
        window_s: w as f64 / fs,
        hop_s: hop as f64 / fs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn gaussian_noise_is_near_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h: Vec<f64> = (0..44100).map(|_| StandardNormal.sample(&mut rng)).collect();
        let c = ned_profile(&ImpulseResponse::new(h, 44100.0).unwrap(), NED_WINDOW_S).unwrap();
        assert!(c.values.len() >= 100);
        assert!((c.mean() - 1.0).abs() < 0.1);
        assert!(c.values.iter().all(|v| (v - 1.0).abs() < 0.1 + 0.1));
    }

    #[test]
    fn sparse_impulses() {
        let w = 200;
        let mut h = vec![0.0; 2000];
        for i in (0..2000).step_by(w) {
            h[i + 17] = 1.0;
        }
        let c = ned_profile_with(&ImpulseResponse::new(h, 10000.0).unwrap(), 0.02, 0.02).unwrap();
        let want = 1.0 / (w as f64 * gaussian_expectation());
        assert!(c.values.iter().all(|v| (v - want).abs() < 1e-12));
    }

    #[test]
    fn silence_and_tiny_windows() {
        let r = ImpulseResponse::new(vec![0.0; 1000], 1000.0).unwrap();
        assert!(ned_profile(&r, 0.02).unwrap().values.iter().all(|&v| v == 0.0));
        assert!(ned_profile(&r, 0.005).is_err());
    }

    #[test]
    fn crossing_finds_first_level() {
        let c = NedCurve {
            times: vec![0.0, 1.0, 2.0],
            values: vec![0.1, 0.5, 0.9],
            window_s: 0.02,
            hop_s: 0.005,
        };
        assert!((c.crossing(0.3).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(c.crossing(0.05), Some(0.0));
        assert_eq!(c.crossing(0.95), None);
    }
}
