//! Side-by-side view of the three layers at each swept interval.

use crate::sweep::{DeltaResult, SweepResult};

/// Occupancy is averaged over this closing stretch of each run.
pub const STEADY_WINDOW_SECONDS: f64 = 600.0;
/// Share of frozen attempts from which the simulation counts as freezing.
pub const FREEZING_RATE: f64 = 0.5;
/// Relative rise between the last two windows that still counts as flat.
pub const GROWTH_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Equilibrium,
    NonEquilibrium,
    Freezing,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Equilibrium => "equilibrium",
            Regime::NonEquilibrium => "non-equilibrium",
            Regime::Freezing => "freezing",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub delta_seconds: f64,
    pub analytic_occupancy: Option<f64>,
    pub analytic_shop_time_s: Option<f64>,
    pub analytic_regime: Regime,
    pub discrete_occupancy: Option<f64>,
    pub discrete_regime: Option<Regime>,
    /// Continuous model occupancy at the horizon.
    pub continuous_occupancy: Option<f64>,
    /// Mean over the closing window, averaged over successful runs.
    pub sim_occupancy: Option<f64>,
    pub sim_shop_time_s: Option<f64>,
    pub sim_regime: Option<Regime>,
    /// `|n − f·Ā|` with `f = 1/Δ`.
    pub little_residual: Option<f64>,
    pub little_relative: Option<f64>,
    /// No usable simulation data at this interval.
    pub analytic_only: bool,
}

pub fn compare_models(sweep: &SweepResult) -> Vec<ComparisonRow> {
    sweep.deltas.iter().map(row).collect()
}

fn row(d: &DeltaResult) -> ComparisonRow {
    let eq = d.equilibrium.equilibrium();
    let discrete = d.discrete.as_ref();
    let sim = d.sim.as_ref().filter(|s| s.successes > 0);
    let sim_occupancy = sim.and_then(|s| s.window_occupancy(STEADY_WINDOW_SECONDS, 0.0));
    let sim_shop_time_s = sim.and_then(|s| s.mean_shop_time_s);
    let little_residual = match (sim_occupancy, sim_shop_time_s) {
        (Some(n), Some(a)) => Some((n - a / d.delta_seconds).abs()),
        _ => None,
    };
    let sim_regime = d.sim.as_ref().map(|s| {
        let previous = s.window_occupancy(STEADY_WINDOW_SECONDS, STEADY_WINDOW_SECONDS);
        if s.saturated || s.successes == 0 || s.freeze_rate() >= FREEZING_RATE {
            Regime::Freezing
        } else {
            match (sim_occupancy, previous) {
                (Some(last), Some(prev)) if last > prev * (1.0 + GROWTH_TOLERANCE) => Regime::NonEquilibrium,
                _ => Regime::Equilibrium,
            }
        }
    });
    ComparisonRow {
        delta_seconds: d.delta_seconds,
        analytic_occupancy: eq.map(|e| e.occupancy),
        analytic_shop_time_s: eq.map(|e| e.shopping_time_seconds()),
        analytic_regime: if eq.is_some() { Regime::Equilibrium } else { Regime::NonEquilibrium },
        discrete_occupancy: discrete.and_then(|s| s.steady_occupancy).map(|n| n as f64),
        discrete_regime: discrete.map(|s| {
            if s.steady_occupancy.is_some() {
                Regime::Equilibrium
            } else {
                Regime::NonEquilibrium
            }
        }),
        continuous_occupancy: d.continuous.as_ref().and_then(|s| s.occupancy.last()).map(|&n| n as f64),
        sim_occupancy,
        sim_shop_time_s,
        sim_regime,
        little_residual,
        little_relative: little_residual.zip(sim_occupancy).map(|(r, n)| r / n),
        analytic_only: sim.is_none(),
    }
}
