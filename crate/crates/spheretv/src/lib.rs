//! Files, experiments and rendering around [`spheretv_core`].

pub mod container;
pub mod dense;
pub mod error;
pub mod experiment;
pub mod fft;
pub mod render;

pub use container::{Container, Kind};
pub use error::{Error, Result};
pub use experiment::{build_transform, run_experiment, ExperimentConfig, ExperimentResults};
pub use fft::RustFftPlanner;
