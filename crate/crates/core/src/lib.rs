//! Macroscopic models of store throughput when customers must keep their
//! distance.
//!
//! Three layers share one parameter set ([`ModelParams`]):
//!
//! * [`equilibrium`]: closed-form Little's-law equilibrium, the critical
//!   entry interval and the spending-maximizing intake rate.
//! * [`continuous`]: exact exit-index recurrences when the interaction count
//!   grows continuously between entries.
//! * [`discrete`]: the step-function variant with integer exit indices, its
//!   equilibrium detection and prediction, and a digamma cross-check.
//!
//! Time inside the models is counted in entry intervals: customer `r` enters
//! at the start of interval `r` and leaves when customer `J_r` enters, so its
//! shopping time is `Δ·(J_r − r)` seconds.

pub mod continuous;
pub mod digamma;
pub mod discrete;
pub mod equilibrium;
mod error;
mod params;
pub mod series;

pub use error::ModelError;
pub use params::{ModelParams, SECONDS_PER_HOUR};
