//! Front end for the `ostrovsky-lab` binary: configuration parsing, dispatch
//! to the experiments in `ostrovsky-core`, and CSV / JSON emission.

pub mod config;
pub mod run;

pub use config::{parse_config, parse_config_str, Command, ConfigError, ProfileSource, RunConfig};
pub use run::{dispatch, execute, meta_path, ExperimentReport};
