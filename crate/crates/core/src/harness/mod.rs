//! Configuration, the ε-sweep, rate estimation and CSV reporting.

pub mod config;
pub mod rates;
pub mod report;
pub mod sweep;

pub use config::{parse_config, parse_config_str, ARule, ConfigError, InitSpec, SweepConfig, WaveSpec};
pub use rates::{estimate_rates, fit_line, RateEstimate};
pub use report::{read_report, write_report, ReportError, ReportTables};
pub use sweep::{monotonicity_violations, run_single, sweep, RunRecord, RunResult, RunStatus, SweepOutcome};
