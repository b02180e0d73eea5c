use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sdn::io::{OutputFormat, ToolkitConfig};
use sdn::network::{MatrixKind, MatrixSpec};
use sdn::{SceneConfig, Vec3};

mod analyze;
mod compare;
mod estimate;
mod matrix;
mod render;

/// Scattering delay network room reverberator.
#[derive(Parser)]
#[command(name = "sdn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render the room impulse response of a scene.
    Render(render::RenderArgs),
    /// Run an audio file through the network of a scene.
    Convolve(render::ConvolveArgs),
    /// Decay curve, T60, echo density and band T60 of a rendered response.
    Analyze(analyze::AnalyzeArgs),
    /// Compare the network against the image source method.
    Compare(compare::CompareArgs),
    /// Build, check or project scattering matrices.
    #[command(subcommand)]
    Matrix(matrix::MatrixCommand),
    /// Operation counts and delay-line memory.
    Estimate(estimate::EstimateArgs),
}

/// Scene selection shared by the commands that render.
#[derive(Args, Clone, Debug)]
pub struct SceneArgs {
    /// Experiment file (TOML); a 5 x 4 x 3 m room is used without one.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Length of the rendered response in seconds.
    #[arg(long, value_name = "S")]
    pub duration: Option<f64>,
    #[arg(long, value_name = "KIND")]
    pub matrix: Option<MatrixKind>,
    #[arg(long)]
    pub no_direct_path: bool,
}

pub fn default_scene() -> SceneConfig {
    SceneConfig::new(Vec3::new(5.0, 4.0, 3.0), Vec3::new(1.2, 1.5, 1.4), Vec3::new(3.7, 2.6, 1.7), 0.3)
}

impl SceneArgs {
    /// The config file (or default) with command-line overrides applied.
    pub fn resolve(&self) -> sdn::Result<ToolkitConfig> {
        let mut cfg = match &self.config {
            Some(p) => ToolkitConfig::load(p)?,
            None => ToolkitConfig::new(default_scene()),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(d) = self.duration {
            cfg.duration = d;
        }
        if let Some(k) = self.matrix {
            if k != cfg.matrix.kind {
                cfg.matrix = MatrixSpec::new(k);
            }
        }
        if self.no_direct_path {
            cfg.scene.direct_path = false;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Output path and format flags.
#[derive(Args, Clone, Debug)]
pub struct OutArgs {
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// wav or csv; taken from the file extension when omitted.
    #[arg(long, value_name = "FORMAT")]
    pub format: Option<OutputFormat>,
}

impl OutArgs {
    pub fn format_for(&self, path: &std::path::Path, fallback: OutputFormat) -> OutputFormat {
        self.format.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => OutputFormat::Csv,
            Some("wav") => OutputFormat::Wav,
            _ => fallback,
        })
    }
}

#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Runtime(String),
}

impl From<sdn::Error> for Failure {
    fn from(e: sdn::Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

pub type CliResult<T = ()> = Result<T, Failure>;

/// Rayon pool capped by `SDN_THREADS`.
pub fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("SDN_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Failure::Validation(format!("SDN_THREADS must be a positive integer, got '{v}'")))?;
        if n == 0 {
            return Err(Failure::Validation("SDN_THREADS must be at least 1".into()));
        }
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Failure::Runtime(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Render(a) => render::render(&a),
        Command::Convolve(a) => render::convolve(&a),
        Command::Analyze(a) => analyze::analyze(&a),
        Command::Compare(a) => compare::compare(&a),
        Command::Matrix(c) => matrix::run(&c),
        Command::Estimate(a) => estimate::estimate(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scene_args(matrix: Option<MatrixKind>) -> SceneArgs {
        SceneArgs {
            config: None,
            seed: Some(4),
            duration: Some(0.2),
            matrix,
            no_direct_path: true,
        }
    }

    #[test]
    fn overrides_apply() {
        let cfg = scene_args(Some(MatrixKind::Circulant)).resolve().unwrap();
        assert_eq!(cfg.seed, 4);
        assert_eq!(cfg.duration, 0.2);
        assert_eq!(cfg.matrix.kind, MatrixKind::Circulant);
        assert!(!cfg.scene.direct_path);
        let mut bad = scene_args(None);
        bad.duration = Some(0.0);
        assert!(matches!(bad.resolve().map_err(Failure::from), Err(Failure::Validation(_))));
    }

    #[test]
    fn format_follows_extension() {
        let out = OutArgs { out: None, format: None };
        assert_eq!(out.format_for(std::path::Path::new("a.csv"), OutputFormat::Wav), OutputFormat::Csv);
        assert_eq!(out.format_for(std::path::Path::new("a"), OutputFormat::Csv), OutputFormat::Csv);
        let forced = OutArgs { out: None, format: Some(OutputFormat::Wav) };
        assert_eq!(forced.format_for(std::path::Path::new("a.csv"), OutputFormat::Csv), OutputFormat::Wav);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
