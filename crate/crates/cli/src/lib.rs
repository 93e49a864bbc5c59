//! Configuration ingestion, pipeline orchestration and report emission for
//! the `logfan` command.

pub mod config;
pub mod report;
pub mod run;

pub use config::{parse_config, parse_config_str, validate, ConfigError, JobConfig, SchemaError, ValidatedJob, SCHEMA_VERSION};
pub use report::{to_dot, Report};
pub use run::{emit_report, execute, exit_code, read_report, report_json, run, Command, RunError, RunOptions};
