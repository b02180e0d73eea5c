use std::path::PathBuf;

use clap::Args;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sdn::analysis::{eyring_t60, ned_profile, sabine_t60};
use sdn::io::{export_curve, ToolkitConfig};
use sdn::ism::{render_rir_ism, render_rir_ism_with, IsmOptions};
use sdn::network::build_network;
use sdn::{ImpulseResponse, SceneConfig, Vec3};

use crate::analyze::{fmt_opt, t60_summary};
use crate::{thread_pool, CliResult, Failure, SceneArgs};

const NED_LEVELS: [f64; 2] = [0.3, 0.75];

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    scene: SceneArgs,
    /// Number of trials; each gets its own seed derived from the master seed.
    #[arg(long, default_value_t = 1, value_name = "N")]
    trials: usize,
    /// Move source and microphone by up to this many metres per axis in each trial.
    #[arg(long, default_value_t = 0.0, value_name = "M")]
    jitter: f64,
    /// Per-trial results as CSV.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
struct Trial {
    seed: u64,
    source: Vec3,
    mic: Vec3,
    first_order_err: f64,
    first_order_peak: f64,
    t60_sdn: Option<f64>,
    t60_ism: Option<f64>,
    sabine: Option<f64>,
    eyring: Option<f64>,
    ned_sdn: [Option<f64>; 2],
    ned_ism: [Option<f64>; 2],
}

pub fn trial_seeds(master: u64, n: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    (0..n).map(|_| rng.next_u64()).collect()
}

fn jittered(p: Vec3, dims: &Vec3, jitter: f64, rng: &mut ChaCha8Rng) -> Vec3 {
    if jitter == 0.0 {
        return p;
    }
    Vec3::from_fn(|i, _| {
        let margin = (dims[i] / 4.0).min(0.1);
        (p[i] + rng.random_range(-jitter..=jitter)).clamp(margin, dims[i] - margin)
    })
}

fn crossings(rir: &ImpulseResponse) -> sdn::Result<[Option<f64>; 2]> {
    let ned = ned_profile(rir, sdn::analysis::NED_WINDOW_S)?;
    Ok(NED_LEVELS.map(|l| ned.crossing(l)))
}

fn run_trial(cfg: &ToolkitConfig, seed: u64, jitter: f64) -> sdn::Result<Trial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scene: SceneConfig = cfg.scene.clone();
    scene.source.position = jittered(scene.source.position, &scene.room_dims, jitter, &mut rng);
    scene.mic.position = jittered(scene.mic.position, &scene.room_dims, jitter, &mut rng);
    let fs = scene.sample_rate;

    let mut net = build_network(&scene, &cfg.matrix, seed)?;
    net.set_recirculation(false);
    let first = ImpulseResponse::samples_for(cfg.duration, fs);
    let sdn_first = net.render(first)?;
    let ism_first = render_rir_ism_with(&scene, cfg.duration, &IsmOptions { max_order: Some(1) })?;
    let first_order_err = sdn_first
        .samples
        .iter()
        .zip(&ism_first.samples)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let first_order_peak = ism_first.samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));

    net.set_recirculation(true);
    let sdn = net.render(first)?;
    let ism = render_rir_ism(&scene, cfg.duration)?;
    let alpha = scene.walls.coefficients();
    Ok(Trial {
        seed,
        source: scene.source.position,
        mic: scene.mic.position,
        first_order_err,
        first_order_peak,
        t60_sdn: t60_summary(&sdn).ok().map(|d| d.t60),
        t60_ism: t60_summary(&ism).ok().map(|d| d.t60),
        sabine: alpha.and_then(|a| sabine_t60(&scene.room_dims, &a).ok()),
        eyring: alpha.and_then(|a| eyring_t60(&scene.room_dims, &a).ok()),
        ned_sdn: crossings(&sdn)?,
        ned_ism: crossings(&ism)?,
    })
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

pub fn compare(args: &CompareArgs) -> CliResult {
    let cfg = args.scene.resolve()?;
    if args.trials == 0 {
        return Err(Failure::Validation("--trials must be at least 1".into()));
    }
    if !(args.jitter.is_finite() && args.jitter >= 0.0) {
        return Err(Failure::Validation("--jitter must be non-negative".into()));
    }
    let seeds = if args.trials == 1 { vec![cfg.seed] } else { trial_seeds(cfg.seed, args.trials) };
    let pool = thread_pool()?;
    let results: Vec<sdn::Result<Trial>> =
        pool.install(|| seeds.par_iter().map(|&s| run_trial(&cfg, s, args.jitter)).collect());
    let trials = results.into_iter().collect::<sdn::Result<Vec<_>>>()?;

    println!("matrix {}, {} trial(s), {:.2} s at {} Hz", cfg.matrix.kind, trials.len(), cfg.duration, cfg.scene.sample_rate);
    println!(
        "{:>5} {:>20} {:>10} {:>9} {:>9} {:>9} {:>9} {:>15} {:>15}",
        "trial", "seed", "1st err", "T60 sdn", "T60 ism", "sabine", "eyring", "ned sdn ms", "ned ism ms"
    );
    for (i, t) in trials.iter().enumerate() {
        println!(
            "{:>5} {:>20} {:>10.2e} {:>9} {:>9} {:>9} {:>9} {:>15} {:>15}",
            i,
            t.seed,
            t.first_order_err,
            fmt_opt(t.t60_sdn, 1.0, 3),
            fmt_opt(t.t60_ism, 1.0, 3),
            fmt_opt(t.sabine, 1.0, 3),
            fmt_opt(t.eyring, 1.0, 3),
            format!("{}/{}", fmt_opt(t.ned_sdn[0], 1e3, 1), fmt_opt(t.ned_sdn[1], 1e3, 1)),
            format!("{}/{}", fmt_opt(t.ned_ism[0], 1e3, 1), fmt_opt(t.ned_ism[1], 1e3, 1)),
        );
    }
    if trials.len() > 1 {
        println!(
            "mean  T60 sdn {} s, ism {} s; NED 0.3/0.75 sdn {}/{} ms, ism {}/{} ms",
            fmt_opt(mean(trials.iter().map(|t| t.t60_sdn)), 1.0, 3),
            fmt_opt(mean(trials.iter().map(|t| t.t60_ism)), 1.0, 3),
            fmt_opt(mean(trials.iter().map(|t| t.ned_sdn[0])), 1e3, 1),
            fmt_opt(mean(trials.iter().map(|t| t.ned_sdn[1])), 1e3, 1),
            fmt_opt(mean(trials.iter().map(|t| t.ned_ism[0])), 1e3, 1),
            fmt_opt(mean(trials.iter().map(|t| t.ned_ism[1])), 1e3, 1),
        );
    }
    let worst = trials.iter().map(|t| t.first_order_err / t.first_order_peak.max(f64::MIN_POSITIVE)).fold(0.0, f64::max);
    println!("first-order max relative difference {worst:.2e}");

    if let Some(path) = &args.out {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let col = |f: &dyn Fn(&Trial) -> Option<f64>| -> Vec<f64> { trials.iter().map(|t| f(t).unwrap_or(f64::NAN)).collect() };
        let idx: Vec<f64> = (0..trials.len()).map(|i| i as f64).collect();
        let cols = [
            ("trial", idx),
            ("source_x", col(&|t| Some(t.source.x))),
            ("source_y", col(&|t| Some(t.source.y))),
            ("source_z", col(&|t| Some(t.source.z))),
            ("mic_x", col(&|t| Some(t.mic.x))),
            ("mic_y", col(&|t| Some(t.mic.y))),
            ("mic_z", col(&|t| Some(t.mic.z))),
            ("first_order_err", col(&|t| Some(t.first_order_err))),
            ("t60_sdn_s", col(&|t| t.t60_sdn)),
            ("t60_ism_s", col(&|t| t.t60_ism)),
            ("sabine_s", col(&|t| t.sabine)),
            ("eyring_s", col(&|t| t.eyring)),
            ("ned_0.3_sdn_s", col(&|t| t.ned_sdn[0])),
            ("ned_0.75_sdn_s", col(&|t| t.ned_sdn[1])),
            ("ned_0.3_ism_s", col(&|t| t.ned_ism[0])),
            ("ned_0.75_ism_s", col(&|t| t.ned_ism[1])),
        ];
        let refs: Vec<(&str, &[f64])> = cols.iter().map(|(n, v)| (*n, v.as_slice())).collect();
        let seeds: Vec<String> = trials.iter().map(|t| t.seed.to_string()).collect();
        export_curve(path, &refs, Some(&format!("matrix={} seeds={}", cfg.matrix.kind, seeds.join(","))))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_depend_only_on_master() {
        let a = trial_seeds(5, 4);
        assert_eq!(a, trial_seeds(5, 4));
        assert_eq!(a[..2], trial_seeds(5, 2)[..]);
        assert_ne!(a, trial_seeds(6, 4));
        assert!(a.windows(2).all(|w| w[0] != w[1]));
    }

    #[test]
    fn jitter_stays_inside() {
        let dims = Vec3::new(2.0, 3.0, 0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let p = jittered(Vec3::new(0.1, 2.9, 0.15), &dims, 1.0, &mut rng);
            assert!((0..3).all(|i| p[i] > 0.0 && p[i] < dims[i]));
        }
        assert_eq!(jittered(Vec3::new(1.0, 1.0, 0.1), &dims, 0.0, &mut rng), Vec3::new(1.0, 1.0, 0.1));
    }
}
