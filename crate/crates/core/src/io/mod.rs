//! WAV audio, CSV curves and matrices, and the TOML experiment config.

mod audio;
mod config;
mod curves;

pub use audio::{load_audio, write_audio, AudioBuffer, Encoding, WriteReport};
pub use config::{AnalysisSwitches, OutputFormat, OutputPaths, ToolkitConfig};
pub use curves::{export_curve, read_curve, read_matrix_csv, write_curve, write_matrix_csv};
