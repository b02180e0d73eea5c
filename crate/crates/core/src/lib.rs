//! Room impulse response synthesis with scattering delay networks.
//!
//! The crate is organised around the pieces a room-acoustics experiment needs:
//!
//! - [`geometry`]: box rooms, first-order reflection points, propagation delays
//!   and directivity patterns.
//! - [`scattering`]: lossless scattering matrices, their verification and the
//!   nearest-orthogonal / nearest-Householder projections.
//! - [`network`]: the runnable scattering delay network, its streaming engine,
//!   interactive updates and the closed-form frequency response.
//! - [`ism`]: a time-domain image source renderer used as reference.
//! - [`analysis`]: energy decay, reverberation time, echo density, mode density
//!   and cost estimators.
//! - [`io`]: WAV files, CSV curves and matrices, and the TOML experiment config.

pub mod analysis;
pub mod error;
pub mod geometry;
pub mod io;
pub mod ism;
pub mod network;
pub mod rir;
pub mod scattering;

pub use error::{Error, Result};
pub use geometry::{Directivity, SceneConfig, Transducer, Vec3, WallAbsorption};
pub use network::{build_network, render_rir, MatrixKind, MatrixSpec, SdnNetwork};
pub use rir::ImpulseResponse;
