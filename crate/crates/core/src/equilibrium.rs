//! Little's-law equilibrium of the slowdown model `A = A1 + (n − 1)A/c`.
//!
//! With `n = fA` the shopping time solves `fA² − (c+1)A + cA1 = 0`, which has
//! a real root only while `f ≤ (c+1)²/(4cA1)`.

use crate::{ModelError, ModelParams, SECONDS_PER_HOUR};

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// `A1·f > 1`: more than one customer enters during an empty-store visit.
    pub a1f_ok: bool,
    /// `M > (cA1/f)·ln(f/c + 1)`: the first customer outlasts `A1`.
    pub m_lower_bound_ok: bool,
    pub equilibrium_feasible: bool,
    pub messages: Vec<String>,
}

impl ValidationReport {
    pub fn all_ok(&self) -> bool {
        self.a1f_ok && self.m_lower_bound_ok && self.equilibrium_feasible
    }
}

/// Flags unrealistic parameter choices. Only non-positive inputs are errors.
pub fn validate_params(params: &ModelParams) -> Result<ValidationReport, ModelError> {
    params.check()?;
    let f = params.flow_per_hour();
    let a1f = params.a1_hours * f;
    let a1f_ok = a1f > 1.0;
    let m_bound = params.c_a1() / f * (f / params.c + 1.0).ln();
    let m_lower_bound_ok = params.m > m_bound;
    let threshold = equilibrium_threshold(params)?;
    let equilibrium_feasible = f <= max_equilibrium_flow(params);

    let mut messages = Vec::new();
    if !a1f_ok {
        messages.push(format!(
            "A1·f = {a1f:.4} is not above 1: the store empties between entries"
        ));
    }
    if !m_lower_bound_ok {
        messages.push(format!(
            "M = {} does not exceed (cA1/f)·ln(f/c + 1) = {m_bound:.6}",
            params.m
        ));
    }
    if !equilibrium_feasible {
        messages.push(format!(
            "entry interval {} s is below the equilibrium threshold {threshold:.3} s",
            params.delta_seconds
        ));
    }
    Ok(ValidationReport {
        a1f_ok,
        m_lower_bound_ok,
        equilibrium_feasible,
        messages,
    })
}

/// Largest flow (per hour) compatible with equilibrium, `(c+1)²/(4cA1)`.
pub fn max_equilibrium_flow(params: &ModelParams) -> f64 {
    let c1 = params.c + 1.0;
    c1 * c1 / (4.0 * params.c * params.a1_hours)
}

/// Smallest entry interval, in seconds, for which equilibrium exists:
/// `Δ* = 4cA1/(c+1)²`.
pub fn equilibrium_threshold(params: &ModelParams) -> Result<f64, ModelError> {
    params.check()?;
    Ok(SECONDS_PER_HOUR / max_equilibrium_flow(params))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub shopping_time_hours: f64,
    /// Occupancy `n = fA`, real-valued.
    pub occupancy: f64,
    /// Per-customer spending rate `e = M/A`, currency per hour.
    pub customer_rate: f64,
    /// Total spending rate `E = fM`, currency per hour.
    pub total_rate: f64,
    pub at_boundary: bool,
}

impl Equilibrium {
    pub fn shopping_time_seconds(&self) -> f64 {
        self.shopping_time_hours * SECONDS_PER_HOUR
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EquilibriumSolution {
    Feasible(Equilibrium),
    Infeasible { discriminant: f64 },
}

impl EquilibriumSolution {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible(_))
    }

    pub fn equilibrium(&self) -> Option<&Equilibrium> {
        match self {
            Self::Feasible(eq) => Some(eq),
            Self::Infeasible { .. } => None,
        }
    }
}

// Relative slack on the discriminant so the exact boundary survives rounding.
const BOUNDARY_REL_TOL: f64 = 1e-12;

/// Solves for the equilibrium shopping time on the smaller-root branch.
pub fn solve_equilibrium(params: &ModelParams) -> Result<EquilibriumSolution, ModelError> {
    params.check()?;
    let f = params.flow_per_hour();
    let c1 = params.c + 1.0;
    let scale = c1 * c1;
    let mut disc = scale - 4.0 * f * params.c_a1();
    if disc < -BOUNDARY_REL_TOL * scale {
        return Ok(EquilibriumSolution::Infeasible { discriminant: disc });
    }
    let at_boundary = disc.abs() <= BOUNDARY_REL_TOL * scale;
    if disc < 0.0 {
        disc = 0.0;
    }
    // ((c+1) − √D)/(2f), rationalized so it stays accurate as f → 0.
    let a = 2.0 * params.c_a1() / (c1 + disc.sqrt());
    Ok(EquilibriumSolution::Feasible(Equilibrium {
        shopping_time_hours: a,
        occupancy: f * a,
        customer_rate: params.m / a,
        total_rate: f * params.m,
        at_boundary,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalIntake {
    pub flow_per_hour: f64,
    pub delta_seconds: f64,
    pub shopping_time_hours: f64,
    pub occupancy: f64,
    pub total_rate: f64,
}

/// The spending-maximizing equilibrium. Since `E = fM` grows with `f`, it is
/// the boundary flow itself.
pub fn optimal_intake(params: &ModelParams) -> Result<OptimalIntake, ModelError> {
    params.check()?;
    let flow = max_equilibrium_flow(params);
    let c1 = params.c + 1.0;
    Ok(OptimalIntake {
        flow_per_hour: flow,
        delta_seconds: SECONDS_PER_HOUR / flow,
        shopping_time_hours: 2.0 * params.c * params.a1_hours / c1,
        occupancy: c1 / 2.0,
        total_rate: flow * params.m,
    })
}
