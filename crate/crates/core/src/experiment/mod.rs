//! Benchmark drivers shared by the command line and the acceptance tests.

pub mod ad;
pub mod cbf;
pub mod config;
pub mod oracle_check;
pub mod output;
pub mod stats;
pub mod timing;

pub use ad::{ad_lattice, run_ad_benchmark, AdPoint};
pub use cbf::{run_cbf_benchmark, sample_cbf_error, CbfPoint, CbfTrial};
pub use config::{ConfigFile, ExperimentConfig, ExperimentKind, OutputFormat, MAX_AD_WIDTH};
pub use output::{emit_results, parse_json_rows, render, ResultRow, CSV_HEADER};
pub use stats::{linear_fit, mean_interval, par_map, power_law_exponent, trial_seed, wilson_bounds, wilson_interval, LinearFit, Z95};
pub use timing::{run_timing, TimingPoint, TimingReport};
pub use oracle_check::{render_checks, run_oracle_checks, CheckOutcome};
