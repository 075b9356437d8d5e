//! Experiment configuration, orchestration and report output.

pub mod config;
pub mod io;
pub mod plots;
pub mod run;

pub use config::{CheckKind, ExperimentConfig};
pub use io::{read_bundle, write_bundle};
pub use plots::emit_plots;
pub use run::{run_experiment, CheckRecord, Curve, FieldDump, ReportBundle, Status, Summary};
