use serde::{Deserialize, Serialize};

use crate::geometry::{Vec3, Wall};
use crate::rir::ImpulseResponse;
use crate::{Error, Result};

/// EDC values below this are clamped.
pub const EDC_FLOOR_DB: f64 = -300.0;
pub const FIT_HI_DB: f64 = -5.0;
pub const FIT_LO_DB: f64 = -35.0;

/// Backward-integrated energy in dB relative to the total.
pub fn schroeder_edc(rir: &[f64]) -> Result<Vec<f64>> {
    if rir.is_empty() {
        return Err(Error::arg("empty impulse response"));
    }
    let mut tail = vec![0.0; rir.len()];
    let mut acc = 0.0;
    for i in (0..rir.len()).rev() {
        acc += rir[i] * rir[i];
        tail[i] = acc;
    }
    let total = tail[0];
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::arg("impulse response has no energy"));
    }
    Ok(tail
        .into_iter()
        .map(|e| if e > 0.0 { (10.0 * (e / total).log10()).max(EDC_FLOOR_DB) } else { EDC_FLOOR_DB })
        .collect())
}

/// Energy decay curve with its fitted reverberation time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayAnalysis {
    pub edc_db: Vec<f64>,
    pub sample_rate: f64,
    pub t60: f64,
    pub fit_range_db: (f64, f64),
    pub slope_db_per_s: f64,
    pub intercept_db: f64,
    /// RMS deviation of the EDC from the fitted line inside the fit range.
    pub fit_rms_db: f64,
}

impl DecayAnalysis {
    pub fn times(&self) -> Vec<f64> {
        (0..self.edc_db.len()).map(|i| i as f64 / self.sample_rate).collect()
    }
}

/// Least-squares line through the EDC between its first crossings of `hi` and `lo` dB.
pub fn t60_from_edc(edc_db: &[f64], sample_rate: f64, hi: f64, lo: f64) -> Result<DecayAnalysis> {
    if !(hi > lo && hi <= 0.0) {
        return Err(Error::arg("fit range must satisfy 0 >= hi > lo"));
    }
    let reached = edc_db.iter().copied().fold(0.0, f64::min);
    let start = edc_db.iter().position(|&e| e <= hi);
    let end = edc_db.iter().position(|&e| e <= lo);
    let (Some(start), Some(end)) = (start, end) else {
        return Err(Error::InsufficientDecay { reached_db: reached, needed_db: lo });
    };
    if end <= start {
        return Err(Error::InsufficientDecay { reached_db: reached, needed_db: lo });
    }
    let n = (end - start + 1) as f64;
    let (mut st, mut se, mut stt, mut ste) = (0.0, 0.0, 0.0, 0.0);
    for i in start..=end {
        let t = i as f64 / sample_rate;
        let e = edc_db[i];
        st += t;
        se += e;
        stt += t * t;
        ste += t * e;
    }
    let denom = n * stt - st * st;
    let slope = (n * ste - st * se) / denom;
    let intercept = (se - slope * st) / n;
    if !(slope < 0.0) {
        return Err(Error::InsufficientDecay { reached_db: reached, needed_db: lo });
    }
    let rms = ((start..=end)
        .map(|i| (edc_db[i] - (intercept + slope * i as f64 / sample_rate)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(DecayAnalysis {
        edc_db: edc_db.to_vec(),
        sample_rate,
        t60: -60.0 / slope,
        fit_range_db: (hi, lo),
        slope_db_per_s: slope,
        intercept_db: intercept,
        fit_rms_db: rms,
    })
}

/// Schroeder EDC and a −5 to −35 dB fit.
pub fn decay_analysis(rir: &ImpulseResponse) -> Result<DecayAnalysis> {
    t60_from_edc(&schroeder_edc(&rir.samples)?, rir.sample_rate, FIT_HI_DB, FIT_LO_DB)
}

fn box_areas(dims: &Vec3) -> [f64; 6] {
    std::array::from_fn(|i| Wall::new(i).unwrap().area(dims))
}

/// `0.161 V / Σ Aᵢαᵢ` for arbitrary surfaces.
pub fn sabine_t60_from(volume: f64, areas: &[f64], alpha: &[f64]) -> Result<f64> {
    let absorption: f64 = areas.iter().zip(alpha).map(|(a, al)| a * al).sum();
    if !(absorption > 0.0) {
        return Err(Error::arg("total absorption is zero; Sabine time is unbounded"));
    }
    Ok(0.161 * volume / absorption)
}

/// Sabine reverberation time of a box room with per-wall absorption.
pub fn sabine_t60(dims: &Vec3, alpha: &[f64; 6]) -> Result<f64> {
    sabine_t60_from(dims.x * dims.y * dims.z, &box_areas(dims), alpha)
}

/// Eyring reverberation time (natural logarithm) of a box room.
pub fn eyring_t60(dims: &Vec3, alpha: &[f64; 6]) -> Result<f64> {
    let areas = box_areas(dims);
    let s: f64 = areas.iter().sum();
    let mean = areas.iter().zip(alpha).map(|(a, al)| a * al).sum::<f64>() / s;
    if !(mean > 0.0 && mean < 1.0) {
        return Err(Error::arg("mean absorption must lie in (0, 1) for the Eyring formula"));
    }
    Ok(-0.161 * dims.x * dims.y * dims.z / (s * (1.0 - mean).ln()))
}

/// Minimum source-microphone distance `2√(V/(cT))`.
pub fn iso_min_distance(volume: f64, t_est: f64, sound_speed: f64) -> f64 {
    2.0 * (volume / (sound_speed * t_est)).sqrt()
}
