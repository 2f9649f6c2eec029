//! Agent-based store simulation under a hard social-distance constraint.
//!
//! Customers enter at fixed intervals, walk to random shopping points along
//! the walls and a central display, and step aside, back off or wait
//! whenever a step would bring them too close to someone. Pairwise distance
//! checks are deferred with per-customer risk lists.

pub mod config;
pub mod customer;
mod error;
pub mod geometry;
pub mod layout;
pub mod record;
pub mod risk;
mod world;

pub use config::{ActionKind, AvoidanceTable, Quadrant, SimConfig};
pub use error::SimError;
pub use layout::StoreLayout;
pub use record::{Freeze, FreezeKind, RunRecord};
pub use world::{classify, draw_depth, run_sim, run_sim_with, CollisionMode, RunOptions, RunStats};
