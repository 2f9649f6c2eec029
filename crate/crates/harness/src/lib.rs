//! Experiment driver: replicated sweeps over the entry interval, the
//! comparison of analytic and simulated occupancy, and CSV output.

pub mod compare;
pub mod config;
mod error;
pub mod export;
pub mod seed;
pub mod sweep;

pub use compare::{compare_models, ComparisonRow, Regime};
pub use error::HarnessError;
pub use export::export_csv;
pub use seed::derive_seed;
pub use sweep::{run_sweep, SweepResult, SweepSpec};
