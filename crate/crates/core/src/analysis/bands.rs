use serde::{Deserialize, Serialize};

use super::decay::decay_analysis;
use crate::geometry::{FilterSpec, Vec3};
use crate::rir::ImpulseResponse;
use crate::{Error, Result};

pub const OCTAVE_CENTERS: [f64; 7] = [125.0, 250.0, 500.0, 1000.0, 2000.0, 4000.0, 8000.0];

// Q of the two sections of a 4th-order Butterworth
const BUTTERWORTH_Q: [f64; 2] = [0.541_196_100_146_197, 1.306_562_964_876_376_5];

/// Second-order section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 3],
    s: [f64; 2],
}

impl Biquad {
    fn new(b: [f64; 3], a: [f64; 3]) -> Self {
        let a0 = a[0];
        Biquad {
            b: b.map(|x| x / a0),
            a: a.map(|x| x / a0),
            s: [0.0; 2],
        }
    }

    pub fn lowpass(freq: f64, q: f64, fs: f64) -> Self {
        let w0 = std::f64::consts::TAU * freq / fs;
        let (sn, cs) = w0.sin_cos();
        let al = sn / (2.0 * q);
        let c = 1.0 - cs;
        Biquad::new([c / 2.0, c, c / 2.0], [1.0 + al, -2.0 * cs, 1.0 - al])
    }

    pub fn highpass(freq: f64, q: f64, fs: f64) -> Self {
        let w0 = std::f64::consts::TAU * freq / fs;
        let (sn, cs) = w0.sin_cos();
        let al = sn / (2.0 * q);
        let c = 1.0 + cs;
        Biquad::new([c / 2.0, -c, c / 2.0], [1.0 + al, -2.0 * cs, 1.0 - al])
    }

    #[inline]
    pub fn process(&mut self, x: f64) -> f64 {
        let y = self.b[0] * x + self.s[0];
        self.s[0] = self.b[1] * x - self.a[1] * y + self.s[1];
        self.s[1] = self.b[2] * x - self.a[2] * y;
        y
    }
}

fn octave_sections(center: f64, fs: f64) -> Result<Vec<Biquad>> {
    let nyquist = fs / 2.0;
    let lo = center / std::f64::consts::SQRT_2;
    let hi = center * std::f64::consts::SQRT_2;
    if !(center > 0.0) || lo >= nyquist {
        return Err(Error::arg(format!("octave band at {center} Hz lies above Nyquist ({nyquist} Hz)")));
    }
    let mut out: Vec<Biquad> = BUTTERWORTH_Q.iter().map(|&q| Biquad::highpass(lo, q, fs)).collect();
    if hi < nyquist {
        out.extend(BUTTERWORTH_Q.iter().map(|&q| Biquad::lowpass(hi, q, fs)));
    }
    Ok(out)
}

/// Octave-wide band-pass: 4th-order Butterworth high-pass at `fc/√2` and
/// low-pass at `fc·√2` (dropped when above Nyquist).
pub fn band_filter(signal: &[f64], center: f64, fs: f64) -> Result<Vec<f64>> {
    let mut sections = octave_sections(center, fs)?;
    Ok(signal
        .iter()
        .map(|&x| sections.iter_mut().fold(x, |acc, s| s.process(acc)))
        .collect())
}

/// Reverberation time of one octave band, or why it could not be measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandT60 {
    pub center_hz: f64,
    pub t60: Option<f64>,
    pub error: Option<String>,
}

/// Band-pass each octave and fit its decay. A band that does not decay far
/// enough carries an error message instead of a value.
pub fn octave_band_t60(rir: &ImpulseResponse, bands: &[f64]) -> Result<Vec<BandT60>> {
    bands
        .iter()
        .map(|&fc| {
            let filtered = band_filter(&rir.samples, fc, rir.sample_rate)?;
            let r = ImpulseResponse::new(filtered, rir.sample_rate)?;
            Ok(match decay_analysis(&r) {
                Ok(d) => BandT60 { center_hz: fc, t60: Some(d.t60), error: None },
                Err(e) => BandT60 { center_hz: fc, t60: None, error: Some(e.to_string()) },
            })
        })
        .collect()
}

/// Sabine time at `freq` with absorption `1 − |H(e^{jω})|²` on every wall.
pub fn sabine_band_t60(dims: &Vec3, filter: &FilterSpec, freq: f64, fs: f64) -> Result<f64> {
    let h = filter.response(std::f64::consts::TAU * freq / fs).norm();
    let alpha = 1.0 - h * h;
    super::decay::sabine_t60(dims, &[alpha; 6])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gain_at(sections: &[Biquad], f: f64, fs: f64) -> f64 {
        sections
            .iter()
            .map(|s| FilterSpec { b: s.b.to_vec(), a: s.a.to_vec() }.response(std::f64::consts::TAU * f / fs).norm())
            .product()
    }

    #[test]
    fn band_edges_are_half_power() {
        let fs = 44100.0;
        let s = octave_sections(1000.0, fs).unwrap();
        assert!(gain_at(&s, 1000.0, fs) > 0.93);
        let edge = gain_at(&s, 1000.0 / std::f64::consts::SQRT_2, fs);
        assert!((edge - 0.5f64.sqrt()).abs() < 0.05, "{edge}");
        assert!(gain_at(&s, 125.0, fs) < 1e-3);
        assert!(gain_at(&s, 8000.0, fs) < 1e-3);
    }

    #[test]
    fn flat_decay_is_flat_across_bands() {
        let fs = 44100.0;
        let t60 = 0.5;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h: Vec<f64> = (0..(fs as usize))
            .map(|i| {
                let n: f64 = StandardNormal.sample(&mut rng);
                n * 10f64.powf(-3.0 * i as f64 / fs / t60)
            })
            .collect();
        let r = ImpulseResponse::new(h, fs).unwrap();
        for b in octave_band_t60(&r, &OCTAVE_CENTERS).unwrap() {
            let t = b.t60.unwrap();
            assert!((t / t60 - 1.0).abs() < 0.1, "{} Hz: {t}", b.center_hz);
        }
    }

    #[test]
    fn band_above_nyquist_is_rejected() {
        let r = ImpulseResponse::new(vec![1.0; 100], 8000.0).unwrap();
        assert!(octave_band_t60(&r, &[8000.0]).is_err());
        assert!(band_filter(&r.samples, 2000.0, 8000.0).is_ok());
    }
}
