//! Experiment runner for directional Chebyshev constants: configuration,
//! experiments and report emission behind the `chebdir` binary.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

pub use config::{ConfigFile, ExperimentConfig, ExperimentKind};
pub use error::{CliError, Result};
pub use experiments::{emit, run, Check, Outcome};
pub use report::{ConvergenceReport, Verdict, VerifyRow};
