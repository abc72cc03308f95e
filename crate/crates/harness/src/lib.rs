//! Model files, weighting filters and comparison runs for the weighted H2
//! reduction library, plus the `morh2w` command-line tool built on them.

pub mod config;
pub mod error;
pub mod experiment;
pub mod io;
pub mod weights;

pub use config::{ExperimentConfig, InitSpec, WeightSpec};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, ComparisonTable, Setup};
pub use io::{load_statespace, save_statespace};
