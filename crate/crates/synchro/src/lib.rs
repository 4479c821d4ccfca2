//! Experiment files, reports, plots and the `synchro` command line on top
//! of [`synchro_core`].
//!
//! Every command reads an [`ExperimentSpec`] (TOML), runs on a thread pool
//! and writes CSV/JSON/SVG files into an output directory. CSV files start
//! with a `#` line carrying the parameters of the run.

pub mod error;
pub mod exec;
pub mod plot;
pub mod recipes;
pub mod report;
pub mod run;
pub mod spec;

pub use error::{Error, Result};
pub use exec::Threads;
pub use run::{cover, lambda_map, reproduce, simulate, verify, Outcome, Overrides};
pub use spec::ExperimentSpec;
