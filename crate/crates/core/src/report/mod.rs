//! Experiment configuration, run records and the command runners behind the
//! `kato-lab` binary.
//!
//! Every command takes an [`ExperimentConfig`], writes its artifacts under
//! `<output root>/<command>-<hash prefix>/`, and appends a [`RunRecord`] to
//! `<output root>/runs.jsonl`. Artifact files depend only on the config, so
//! rerunning a config reproduces them byte for byte.

mod commands;
mod config;
mod record;

pub use commands::{execute, CommandOutput, NamedVerdict};
pub use config::{
    CheckName, Command, ExperimentConfig, ExponentsConfig, OdiConfig, RandomOdi, SimulateConfig, SweepConfig,
    SyntheticLaw, Tolerances, OUTPUT_ENV,
};
pub use record::{append_record, read_jsonl, truncate_partial_line, RunRecord};
