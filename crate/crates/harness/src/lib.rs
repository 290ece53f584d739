//! Experiment harness for the mmrelay library: scenario files, the baseline
//! and optimized schemes side by side, sweeps, the velocity-error study and
//! plot-ready output.

pub mod config;
pub mod error;
pub mod experiments;
pub mod plot;
pub mod records;
pub mod schemes;

pub use config::HarnessConfig;
pub use error::{ConfigError, HarnessError};
pub use records::RunRecord;
