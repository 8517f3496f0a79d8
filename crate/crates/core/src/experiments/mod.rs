//! Sweeps over n with rate fits, and the verification suites.

mod config;
mod sweep;
mod verify;

pub use config::{BudgetSection, SmoothingSection, SweepConfig, SweepSection, SystemSection};
pub use sweep::{fit_rate, run_sweep, RateFit, RateRow, SweepOutcome};
pub use verify::{run_verify, Suite, VerifyOptions};
