use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Args;
use sdn::io::{export_curve, load_audio, write_audio, AudioBuffer, Encoding, OutputFormat, ToolkitConfig};
use sdn::ism::render_rir_ism;
use sdn::network::build_network;
use sdn::ImpulseResponse;

use crate::{CliResult, Failure, OutArgs, SceneArgs};

#[derive(Args, Debug)]
pub struct RenderArgs {
    #[command(flatten)]
    scene: SceneArgs,
    #[command(flatten)]
    out: OutArgs,
    /// Sample encoding for WAV output.
    #[arg(long, default_value = "float32", value_name = "ENC")]
    encoding: Encoding,
    /// Render with the image source method instead.
    #[arg(long)]
    ism: bool,
    /// Print node positions, delays and gains.
    #[arg(long)]
    describe: bool,
}

#[derive(Args, Debug)]
pub struct ConvolveArgs {
    #[command(flatten)]
    scene: SceneArgs,
    /// Dry input WAV file.
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    #[arg(long, value_name = "PATH", default_value = "wet.wav")]
    out: PathBuf,
    /// Seconds of reverb tail appended after the input; defaults to the render duration.
    #[arg(long, value_name = "S")]
    tail: Option<f64>,
}

/// Where a render goes when `--out` is absent.
fn default_out(cfg: &ToolkitConfig, format: OutputFormat) -> PathBuf {
    let name = match format {
        OutputFormat::Wav => "rir.wav",
        OutputFormat::Csv => "rir.csv",
    };
    match (&cfg.output.rir, &cfg.output.dir) {
        (Some(p), Some(d)) if p.is_relative() => d.join(p),
        (Some(p), _) => p.clone(),
        (None, Some(d)) => d.join(name),
        (None, None) => PathBuf::from(name),
    }
}

const PROGRESS_MIN_SAMPLES: usize = 1 << 20;

fn render_sdn(cfg: &ToolkitConfig) -> CliResult<ImpulseResponse> {
    let mut net = build_network(&cfg.scene, &cfg.matrix, cfg.seed)?;
    let fs = cfg.scene.sample_rate;
    let len = ImpulseResponse::samples_for(cfg.duration, fs);
    if len < PROGRESS_MIN_SAMPLES {
        return Ok(net.render(len)?);
    }
    net.reset();
    let mut samples = Vec::with_capacity(len);
    let step = len / 10;
    for n in 0..len {
        samples.push(net.tick(if n == 0 { 1.0 } else { 0.0 })?);
        if n > 0 && n % step == 0 {
            eprint!("\rrendering {:3}%", 100 * n / len);
            let _ = std::io::stderr().flush();
        }
    }
    eprintln!("\rrendering 100%");
    Ok(ImpulseResponse::new(samples, fs)?)
}

pub fn write_signal(path: &Path, format: OutputFormat, samples: &[f64], fs: f64, encoding: Encoding) -> CliResult {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    match format {
        OutputFormat::Csv => {
            let t: Vec<f64> = (0..samples.len()).map(|n| n as f64 / fs).collect();
            export_curve(path, &[("time_s", &t), ("value", samples)], Some(&format!("sample_rate={fs}")))?;
        }
        OutputFormat::Wav => {
            let rate = integer_rate(fs)?;
            let buf = AudioBuffer {
                channels: vec![samples.to_vec()],
                sample_rate: rate,
                encoding,
            };
            let report = write_audio(path, &buf)?;
            if report.clipped > 0 {
                eprintln!("warning: {} samples clipped", report.clipped);
            }
        }
    }
    Ok(())
}

fn integer_rate(fs: f64) -> CliResult<u32> {
    if fs.fract() != 0.0 || fs < 1.0 || fs > u32::MAX as f64 {
        return Err(Failure::Validation(format!("sample rate {fs} cannot be stored in a WAV header")));
    }
    Ok(fs as u32)
}

pub fn render(args: &RenderArgs) -> CliResult {
    let cfg = args.scene.resolve()?;
    let fallback = cfg.output.format;
    let path = match &args.out.out {
        Some(p) => p.clone(),
        None => default_out(&cfg, args.out.format.unwrap_or(fallback)),
    };
    let format = args.out.format_for(&path, fallback);
    if args.describe && !args.ism {
        print!("{}", build_network(&cfg.scene, &cfg.matrix, cfg.seed)?.describe());
    }
    let rir = if args.ism {
        render_rir_ism(&cfg.scene, cfg.duration)?
    } else {
        render_sdn(&cfg)?
    };
    write_signal(&path, format, &rir.samples, rir.sample_rate, args.encoding)?;
    eprintln!(
        "wrote {} samples ({:.3} s at {} Hz) to {}",
        rir.len(),
        rir.duration(),
        rir.sample_rate,
        path.display()
    );
    Ok(())
}

pub fn convolve(args: &ConvolveArgs) -> CliResult {
    let mut cfg = args.scene.resolve()?;
    let input = load_audio(&args.input)?;
    cfg.scene.sample_rate = input.sample_rate as f64;
    let tail = args.tail.unwrap_or(cfg.duration);
    if !(tail.is_finite() && tail >= 0.0) {
        return Err(Failure::Validation("--tail must be a non-negative number of seconds".into()));
    }
    let extra = (tail * cfg.scene.sample_rate).round() as usize;
    let mut channels = Vec::with_capacity(input.channels.len());
    for ch in &input.channels {
        let mut net = build_network(&cfg.scene, &cfg.matrix, cfg.seed)?;
        let mut x = ch.clone();
        x.resize(ch.len() + extra, 0.0);
        channels.push(net.process(&x)?);
    }
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let out = AudioBuffer {
        channels,
        sample_rate: input.sample_rate,
        encoding: input.encoding,
    };
    let report = write_audio(&args.out, &out)?;
    if report.clipped > 0 {
        eprintln!("warning: {} samples clipped", report.clipped);
    }
    eprintln!(
        "wrote {} frames x {} channels to {}",
        out.frames(),
        out.channels.len(),
        args.out.display()
    );
    Ok(())
}
