use std::path::PathBuf;

use clap::Args;
use sdn::analysis::{flops_estimate, memory_bound, CostModel, DEFAULT_FRAME_RATE, FEET_TO_METERS};
use sdn::io::export_curve;

use crate::{CliResult, Failure};

#[derive(Args, Debug)]
pub struct EstimateArgs {
    #[arg(long, default_value_t = 44100.0, value_name = "HZ")]
    fs: f64,
    /// Ports per network node.
    #[arg(long, default_value_t = 5)]
    ports: u64,
    /// Operations per wall filter.
    #[arg(long, default_value_t = 1)]
    filter_ops: u64,
    /// Delay lines of the comparison FDN.
    #[arg(long, default_value_t = 12)]
    fdn_lines: u64,
    /// Room volume in cubic metres for the image source count; defaults to a 10 x 15 x 12.5 ft room.
    #[arg(long, value_name = "M3")]
    volume: Option<f64>,
    /// Comma separated reverberation times in seconds.
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0")]
    t60: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_FRAME_RATE, value_name = "HZ")]
    frame_rate: f64,
    #[arg(long, default_value_t = 343.0)]
    sound_speed: f64,
    /// Bits per stored sample for the memory bound.
    #[arg(long, default_value_t = 32.0)]
    q_bits: f64,
    /// Room diameter in metres for the memory bound; defaults to the diagonal of a 5 m cube.
    #[arg(long, value_name = "M")]
    diameter: Option<f64>,
    /// Also write the table as CSV.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

pub fn estimate(args: &EstimateArgs) -> CliResult {
    let positive = [args.fs, args.frame_rate, args.sound_speed];
    if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) || args.t60.iter().any(|t| !(*t > 0.0)) {
        return Err(Failure::Validation("rates, speeds and reverberation times must be positive".into()));
    }
    if args.ports < 2 {
        return Err(Failure::Validation("--ports must be at least 2".into()));
    }
    let fs = args.fs;
    let volume = args.volume.unwrap_or(10.0 * 15.0 * 12.5 * FEET_TO_METERS.powi(3));
    if !(volume > 0.0) {
        return Err(Failure::Validation("--volume must be positive".into()));
    }
    let sdn = flops_estimate(CostModel::Sdn { k: args.ports, p: args.filter_ops }, fs);
    let fdn = flops_estimate(CostModel::Fdn { q: args.fdn_lines, p: args.filter_ops }, fs);
    println!("sample rate {fs} Hz");
    println!("SDN  K={:<3} {:>10.2} MFLOPS", args.ports, sdn / 1e6);
    println!("FDN  N={:<3} {:>10.2} MFLOPS", args.fdn_lines, fdn / 1e6);
    println!("\nimage sources in {volume:.1} m3, block convolution at {} frames/s", args.frame_rate);
    println!("{:>6} {:>12} {:>12} {:>12} {:>12} {:>10}", "T60 s", "ISM", "conv", "conv dyn", "ISM+dyn", "/ SDN");

    let mut cols: [Vec<f64>; 6] = Default::default();
    for &t60 in &args.t60 {
        let ism = flops_estimate(CostModel::Ism { volume, t60, sound_speed: args.sound_speed }, fs);
        let conv = |dynamic| flops_estimate(CostModel::OverlapAdd { frame_rate: args.frame_rate, t60, dynamic }, fs);
        let (stat, dynm) = (conv(false), conv(true));
        let ratio = (ism + dynm) / sdn;
        println!(
            "{:>6.2} {:>12.2} {:>12.2} {:>12.2} {:>12.2} {:>10.1}",
            t60,
            ism / 1e6,
            stat / 1e6,
            dynm / 1e6,
            (ism + dynm) / 1e6,
            ratio
        );
        for (c, v) in cols.iter_mut().zip([t60, ism, stat, dynm, ism + dynm, ratio]) {
            c.push(v);
        }
    }
    println!("(MFLOPS)");

    let diameter = args.diameter.unwrap_or(5.0 * 3f64.sqrt());
    let walls = 6;
    let bits = memory_bound(walls, args.q_bits, fs, args.sound_speed, diameter);
    println!(
        "\ndelay-line memory for {walls} walls, {} bit samples, diameter {diameter:.2} m: at most {:.1} kB",
        args.q_bits,
        bits / 8.0 / 1e3
    );

    if let Some(p) = &args.out {
        let names = ["t60_s", "ism_flops", "conv_flops", "conv_dynamic_flops", "dynamic_total_flops", "ratio_to_sdn"];
        let refs: Vec<(&str, &[f64])> = names.iter().zip(&cols).map(|(n, c)| (*n, c.as_slice())).collect();
        export_curve(p, &refs, Some(&format!("fs={fs} sdn_flops={sdn} fdn_flops={fdn} volume_m3={volume}")))?;
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}
