//! Closed-form transfer function of the network and its loop poles.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{neighbor, port_of, OnePole, SdnNetwork};
use crate::{Error, Result};

fn zpow(z_inv: Complex64, d: usize) -> Complex64 {
    z_inv.powu(d as u32)
}

/// Transfer function at each frequency in Hz, from a direct linear solve of the
/// wave variables leaving every node port.
///
/// The solve uses the target layout, so call it on a settled network.
pub fn frequency_response(net: &SdnNetwork, freqs_hz: &[f64]) -> Vec<Result<Complex64>> {
    freqs_hz.iter().map(|&f| response_at(net, f)).collect()
}

fn response_at(net: &SdnNetwork, freq: f64) -> Result<Complex64> {
    let l = &net.layout;
    let (n, k) = (net.n, net.k);
    let omega = std::f64::consts::TAU * freq / l.sample_rate;
    let z_inv = Complex64::from_polar(1.0, -omega);
    let air = net
        .air
        .as_ref()
        .map_or(Complex64::new(1.0, 0.0), |(p, _)| OnePole::response(*p, omega));
    let h: Vec<Complex64> = l.filters.iter().map(|f| f.response(omega)).collect();
    let mut m = DMatrix::<Complex64>::identity(n * k, n * k);
    let mut rhs = DVector::<Complex64>::zeros(n * k);
    for i in 0..n {
        let s = Complex64::new(0.5 * l.source_gains[i], 0.0) * zpow(z_inv, l.source_delays[i]);
        for p in 0..k {
            let row = i * k + p;
            let mut row_sum = 0.0;
            for q in 0..k {
                let a = net.a[p * k + q];
                row_sum += a;
                let j = neighbor(i, q);
                let col = j * k + port_of(j, i);
                m[(row, col)] -= h[i] * a * zpow(z_inv, l.internode_delay(j, i)) * air;
            }
            rhs[row] = h[i] * row_sum * s;
        }
    }
    let q = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular(format!("network matrix singular at {freq} Hz")))?;
    let mut y = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let pe: Complex64 = (0..k).map(|p| q[i * k + p] * net.w[p]).sum();
        y += pe * l.mic_gains[i] * zpow(z_inv, l.mic_delays[i]);
    }
    if let Some((d, g)) = l.direct {
        y += g * zpow(z_inv, d);
    }
    Ok(y)
}

/// Impulse response of length `n_fft` from the transfer function sampled on the
/// DFT grid. Tails longer than `n_fft` alias back into the result.
pub fn impulse_response_from_spectrum(net: &SdnNetwork, n_fft: usize) -> Result<Vec<f64>> {
    if n_fft < 2 {
        return Err(Error::arg("n_fft must be at least 2"));
    }
    let fs = net.sample_rate();
    let freqs: Vec<f64> = (0..=n_fft / 2).map(|b| b as f64 * fs / n_fft as f64).collect();
    let half = frequency_response(net, &freqs).into_iter().collect::<Result<Vec<_>>>()?;
    let mut spec = vec![Complex64::new(0.0, 0.0); n_fft];
    for b in 0..n_fft {
        spec[b] = if b <= n_fft / 2 { half[b] } else { half[n_fft - b].conj() };
    }
    FftPlanner::new().plan_fft_inverse(n_fft).process(&mut spec);
    Ok(spec.iter().map(|c| c.re / n_fft as f64).collect())
}

fn scalar_gains(net: &SdnNetwork) -> Result<Vec<f64>> {
    if net.air.is_some() {
        return Err(Error::arg("loop poles need the air absorption filter disabled"));
    }
    net.filters
        .iter()
        .step_by(net.k)
        .map(|f| f.gain().ok_or_else(|| Error::arg("loop poles need scalar wall gains")))
        .collect()
}

/// State-transition matrix of the recirculating part of the network, one state
/// per internode delay cell. Its eigenvalues are the system poles.
pub fn loop_state_matrix(net: &SdnNetwork) -> Result<DMatrix<f64>> {
    let beta = scalar_gains(net)?;
    let (n, k) = (net.n, net.k);
    let l = &net.layout;
    // offset[i*n+j] = first cell of line i->j; cell 0 is the newest sample
    let mut offset = vec![0; n * n];
    let mut size = 0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                offset[i * n + j] = size;
                size += l.internode_delay(i, j);
            }
        }
    }
    let mut t = DMatrix::<f64>::zeros(size, size);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (o, d) = (offset[i * n + j], l.internode_delay(i, j));
            for c in 1..d {
                t[(o + c, o + c - 1)] = 1.0;
            }
        }
    }
    for j in 0..n {
        for p in 0..k {
            let dest = offset[j * n + neighbor(j, p)];
            for q in 0..k {
                let i = neighbor(j, q);
                let head = offset[i * n + j] + l.internode_delay(i, j) - 1;
                t[(dest, head)] += beta[j] * net.a[p * k + q];
            }
        }
    }
    Ok(t)
}

/// Eigenvalues of [`loop_state_matrix`]; there are as many as internode delay cells.
pub fn loop_poles(net: &SdnNetwork) -> Result<Vec<Complex64>> {
    crate::scattering::eigenvalues(&loop_state_matrix(net)?)
        .ok_or_else(|| Error::Singular("eigenvalue iteration did not converge".into()))
}

/// `σ_min/σ_max` of `D_f(z⁻¹) − H̄ĀP`, which vanishes at a pole `z`.
pub fn pole_residual(net: &SdnNetwork, z: Complex64) -> Result<f64> {
    let beta = scalar_gains(net)?;
    let (n, k) = (net.n, net.k);
    let l = &net.layout;
    let mut g = DMatrix::<Complex64>::zeros(n * k, n * k);
    for i in 0..n {
        for p in 0..k {
            let row = i * k + p;
            g[(row, row)] = z.powu(l.internode_delay(i, neighbor(i, p)) as u32);
            for q in 0..k {
                let j = neighbor(i, q);
                g[(row, j * k + port_of(j, i))] -= Complex64::new(beta[i] * net.a[p * k + q], 0.0);
            }
        }
    }
    let sv = g.singular_values();
    let max = sv.max();
    Ok(if max > 0.0 { sv.min() / max } else { 0.0 })
}
