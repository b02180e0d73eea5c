use std::path::{Path, PathBuf};

use clap::Args;
use sdn::analysis::{
    decay_analysis, ned_profile, octave_band_t60, schroeder_edc, DecayAnalysis, NedCurve, OCTAVE_CENTERS,
};
use sdn::io::{export_curve, load_audio, read_curve, AnalysisSwitches, ToolkitConfig};
use sdn::ImpulseResponse;

use crate::{CliResult, Failure};

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Response to analyse, WAV or CSV (`time_s,value`).
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    /// Directory for the CSV curves.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Take the analysis switches from this experiment file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Comma separated octave band centres in Hz; `none` disables band T60.
    #[arg(long, value_name = "HZ,..")]
    bands: Option<String>,
    #[arg(long, value_name = "S")]
    ned_window: Option<f64>,
}

pub fn load_rir(path: &Path) -> CliResult<ImpulseResponse> {
    if path.extension().and_then(|e| e.to_str()) == Some("csv") {
        let cols = read_curve(path)?;
        let time = cols.iter().find(|c| c.0 == "time_s").map(|c| &c.1);
        let value = cols
            .iter()
            .find(|c| c.0 == "value")
            .or_else(|| cols.iter().find(|c| c.0 != "time_s"))
            .map(|c| c.1.clone())
            .ok_or_else(|| Failure::Validation(format!("{}: no value column", path.display())))?;
        let fs = match time {
            Some(t) if t.len() >= 2 && t[1] > t[0] => (1.0 / (t[1] - t[0]) * 1e6).round() / 1e6,
            _ => return Err(Failure::Validation(format!("{}: need a time_s column to infer the rate", path.display()))),
        };
        Ok(ImpulseResponse::new(value, fs)?)
    } else {
        let audio = load_audio(path)?;
        Ok(ImpulseResponse::new(audio.to_mono(), audio.sample_rate as f64)?)
    }
}

fn parse_bands(s: &str) -> CliResult<Vec<f64>> {
    if s == "none" {
        return Ok(Vec::new());
    }
    if s == "all" {
        return Ok(OCTAVE_CENTERS.to_vec());
    }
    s.split(',')
        .map(|b| {
            b.trim()
                .parse::<f64>()
                .ok()
                .filter(|f| *f > 0.0)
                .ok_or_else(|| Failure::Validation(format!("bad band centre '{b}'")))
        })
        .collect()
}

/// T60 fit, or a note on why it failed.
pub fn t60_summary(rir: &ImpulseResponse) -> Result<DecayAnalysis, String> {
    decay_analysis(rir).map_err(|e| e.to_string())
}

pub fn fmt_opt(v: Option<f64>, scale: f64, prec: usize) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{:.*}", prec, x * scale))
}

pub fn analyze(args: &AnalyzeArgs) -> CliResult {
    let mut sw = match &args.config {
        Some(p) => ToolkitConfig::load(p)?.analysis,
        None => AnalysisSwitches::default(),
    };
    if let Some(b) = &args.bands {
        sw.bands = parse_bands(b)?;
    }
    if let Some(w) = args.ned_window {
        if !(w > 0.0) {
            return Err(Failure::Validation("--ned-window must be positive".into()));
        }
        sw.ned_window_s = w;
    }
    let rir = load_rir(&args.input)?;
    std::fs::create_dir_all(&args.out)?;
    println!("{}: {} samples at {} Hz", args.input.display(), rir.len(), rir.sample_rate);

    match t60_summary(&rir) {
        Ok(d) => println!(
            "T60 {:.3} s (fit {:.0} to {:.0} dB, rms {:.2} dB)",
            d.t60, d.fit_range_db.0, d.fit_range_db.1, d.fit_rms_db
        ),
        Err(e) => println!("T60 unavailable: {e}"),
    }
    if sw.edc {
        let edc = schroeder_edc(&rir.samples)?;
        let t: Vec<f64> = (0..edc.len()).map(|n| n as f64 / rir.sample_rate).collect();
        let p = args.out.join("edc.csv");
        export_curve(&p, &[("time_s", &t), ("value", &edc)], Some("energy decay curve in dB"))?;
        println!("wrote {}", p.display());
    }
    if sw.ned {
        let ned: NedCurve = ned_profile(&rir, sw.ned_window_s)?;
        let p = args.out.join("ned.csv");
        export_curve(
            &p,
            &[("time_s", &ned.times), ("value", &ned.values)],
            Some(&format!("window_s={} hop_s={}", ned.window_s, ned.hop_s)),
        )?;
        println!(
            "NED reaches 0.3 at {} ms, 0.75 at {} ms, 1.0 at {} ms",
            fmt_opt(ned.crossing(0.3), 1e3, 1),
            fmt_opt(ned.crossing(0.75), 1e3, 1),
            fmt_opt(ned.crossing(1.0), 1e3, 1)
        );
        println!("wrote {}", p.display());
    }
    if !sw.bands.is_empty() {
        let nyquist = rir.sample_rate / 2.0;
        let bands: Vec<f64> = sw.bands.iter().copied().filter(|b| b * 2f64.sqrt() < nyquist).collect();
        let res = octave_band_t60(&rir, &bands)?;
        let mut hz = Vec::new();
        let mut t60 = Vec::new();
        for b in &res {
            match (b.t60, &b.error) {
                (Some(t), _) => {
                    println!("  {:>6} Hz  T60 {:.3} s", b.center_hz, t);
                    hz.push(b.center_hz);
                    t60.push(t);
                }
                (None, e) => println!("  {:>6} Hz  T60 unavailable: {}", b.center_hz, e.as_deref().unwrap_or("no fit")),
            }
        }
        let p = args.out.join("bands.csv");
        export_curve(&p, &[("band_hz", &hz), ("t60_s", &t60)], None)?;
        println!("wrote {}", p.display());
    }
    Ok(())
}
