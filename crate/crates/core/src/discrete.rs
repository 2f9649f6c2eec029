//! Exit indices when interactions change only at entry instants.
//!
//! A customer who meets `i` others over an interval spends `1/(1 + i/cA1)`
//! of its best-rate interval spend there. Spending is discretized term by
//! term, so every exit lands on an entry instant and the departed count
//! `K_r` is an integer step function.

use crate::digamma::digamma;
use crate::series::{self, SeriesBundle};
use crate::{ModelError, ModelParams};

/// The last term is kept when it overshoots the target by at most this
/// fraction of itself.
pub const KEEP_THRESHOLD: f64 = 0.465;

/// Upper bound on the number of terms summed for one customer.
pub const MAX_TERMS: u64 = 1_000_000;

/// Relative spend of an interval shared with `i` others.
pub fn term(c_a1: f64, i: u64) -> f64 {
    1.0 / (1.0 + i as f64 / c_a1)
}

/// Result of rounding a partial sum of terms to a target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundedSum {
    pub terms: u64,
    /// Kept sum minus target.
    pub residual: f64,
}

/// Sums `term(start), term(start+1), …` until the sum reaches `target`,
/// then applies the keep rule to the last term.
pub fn round_terms(c_a1: f64, start: u64, target: f64) -> Result<RoundedSum, ModelError> {
    let mut sum = 0.0;
    for n in 0..MAX_TERMS {
        let t = term(c_a1, start + n);
        let with = sum + t;
        if with >= target {
            return Ok(if (with - target) / t <= KEEP_THRESHOLD {
                RoundedSum { terms: n + 1, residual: with - target }
            } else {
                RoundedSum { terms: n, residual: sum - target }
            });
        }
        sum = with;
    }
    Err(ModelError::Breakdown {
        customer: 0,
        reason: format!("target {target} not reached within {MAX_TERMS} terms"),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstExit {
    pub exit: u64,
    pub residual: f64,
    pub diagnostic: Option<String>,
}

/// `J1 = 1 + m`, `m` the rounded number of terms `1/(1 + i/cA1)`, `i ≥ 0`,
/// that add up to `Mf`.
pub fn first_exit_discrete(params: &ModelParams) -> Result<FirstExit, ModelError> {
    params.check()?;
    let mf = params.mf();
    if mf < 1.0 {
        return Ok(FirstExit {
            exit: 2,
            residual: 1.0 - mf,
            diagnostic: Some(format!("Mf = {mf} is below one interval; first exit set to 2")),
        });
    }
    let rounded = round_terms(params.c_a1(), 0, mf).map_err(|e| with_customer(e, 1))?;
    let m = rounded.terms.max(1);
    Ok(FirstExit {
        exit: 1 + m,
        residual: if m == rounded.terms { rounded.residual } else { 1.0 - mf },
        diagnostic: None,
    })
}

fn with_customer(err: ModelError, customer: usize) -> ModelError {
    match err {
        ModelError::Breakdown { reason, .. } => ModelError::Breakdown { customer, reason },
        other => other,
    }
}

/// First exit from the continuous-time digamma form next to its log
/// approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DigammaCheck {
    pub j1_psi: f64,
    pub j1_log: f64,
}

impl DigammaCheck {
    pub fn relative_gap(&self) -> f64 {
        (self.j1_psi - self.j1_log).abs() / self.j1_psi
    }
}

/// Solves `ψ(cA1 + J − 1) − ψ(cA1) = Mf/cA1` for `J`.
pub fn digamma_check(params: &ModelParams) -> Result<DigammaCheck, ModelError> {
    params.check()?;
    let x = params.c_a1();
    let target = params.mf() / x;
    let base = digamma(x);
    let h = |j: f64| digamma(x + j - 1.0) - base - target;
    let (mut lo, mut hi) = (1.0, 2.0);
    while h(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Err(ModelError::Domain { name: "digamma root", value: hi });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 * hi {
            break;
        }
    }
    let j1_log = crate::continuous::first_exit_continuous(params)?;
    Ok(DigammaCheck { j1_psi: 0.5 * (lo + hi), j1_log })
}

#[derive(Debug, Clone)]
pub struct DiscreteTrajectory {
    params: ModelParams,
    exits: Vec<u64>,
    departed: Vec<usize>,
    residuals: Vec<f64>,
    clamped: Vec<usize>,
    diagnostics: Vec<String>,
}

impl DiscreteTrajectory {
    pub fn new(params: ModelParams) -> Result<Self, ModelError> {
        params.check()?;
        Ok(Self {
            params,
            exits: Vec::new(),
            departed: Vec::new(),
            residuals: Vec::new(),
            clamped: Vec::new(),
            diagnostics: Vec::new(),
        })
    }

    /// Wraps given exit indices. They must be strictly increasing with
    /// `J_r > r`. Residuals are left empty.
    pub fn from_exits(params: ModelParams, exits: Vec<u64>) -> Result<Self, ModelError> {
        params.check()?;
        for (i, &j) in exits.iter().enumerate() {
            let r = i + 1;
            if j <= r as u64 || (i > 0 && j <= exits[i - 1]) {
                return Err(ModelError::Breakdown {
                    customer: r,
                    reason: format!("exit index {j} out of order"),
                });
            }
        }
        let departed = (1..=exits.len())
            .map(|r| exits.partition_point(|&j| j <= r as u64))
            .collect();
        Ok(Self {
            params,
            exits,
            departed,
            residuals: Vec::new(),
            clamped: Vec::new(),
            diagnostics: Vec::new(),
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn exits(&self) -> &[u64] {
        &self.exits
    }

    pub fn departed(&self) -> &[usize] {
        &self.departed
    }

    /// Kept spending minus target, per customer.
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    /// Customers whose rounded term count was raised to one.
    pub fn clamped(&self) -> &[usize] {
        &self.clamped
    }

    pub fn diagnostics(&self) -> &[String] {
        &self.diagnostics
    }

    pub fn len(&self) -> usize {
        self.exits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exits.is_empty()
    }

    /// `K_{r}` with `K_0 = 0`.
    pub fn departed_before(&self, r: usize) -> usize {
        if r == 0 {
            0
        } else {
            self.departed[r - 1]
        }
    }

    /// Occupancy `L_r = r − K_r` right after customer `r` enters.
    pub fn occupancy_at_entry(&self) -> Vec<usize> {
        self.departed
            .iter()
            .enumerate()
            .map(|(i, &k)| i + 1 - k)
            .collect()
    }

    /// Deviation of `J_r` from its value when exits track entries one for
    /// one: `g(r) = J_r − (2r − (K_{r−1} + 1))`.
    pub fn g(&self) -> Vec<i64> {
        (1..=self.len())
            .map(|r| {
                self.exits[r - 1] as i64 - (2 * r as i64 - (self.departed_before(r - 1) as i64 + 1))
            })
            .collect()
    }

    /// Occupancy `n_j` during intervals `j = 1..=upto`.
    pub fn interval_occupancy(&self, upto: usize) -> Vec<usize> {
        (1..=upto)
            .map(|j| {
                let entered = j.min(self.len());
                entered - self.exits.partition_point(|&e| e <= j as u64)
            })
            .collect()
    }

    pub fn step(&mut self) -> Result<u64, ModelError> {
        let r = self.exits.len() + 1;
        let x = self.params.c_a1();
        let (exit, residual) = if r == 1 {
            let first = first_exit_discrete(&self.params)?;
            if let Some(d) = first.diagnostic {
                self.diagnostics.push(d);
            }
            (first.exit, first.residual)
        } else {
            let prev = self.exits[r - 2];
            let k_prev = self.departed[r - 2];
            // Exits land on entry instants, so J_{r−1} > r − 1 means ≥ r.
            let start = prev - r as u64;
            let target = term(x, (r - k_prev - 2) as u64);
            let rounded = round_terms(x, start, target).map_err(|e| with_customer(e, r))?;
            if rounded.terms == 0 {
                self.clamped.push(r);
                (prev + 1, term(x, start) - target)
            } else {
                (prev + rounded.terms, rounded.residual)
            }
        };
        self.exits.push(exit);
        self.residuals.push(residual);
        let k = self.exits.partition_point(|&j| j <= r as u64);
        self.departed.push(k);
        Ok(exit)
    }
}

/// Runs until the next entry would come after `horizon_seconds`.
pub fn run_discrete(params: &ModelParams, horizon_seconds: f64) -> Result<DiscreteTrajectory, ModelError> {
    let mut traj = DiscreteTrajectory::new(*params)?;
    if horizon_seconds <= 0.0 {
        return Ok(traj);
    }
    loop {
        traj.step()?;
        if traj.len() as f64 * params.delta_seconds > horizon_seconds {
            return Ok(traj);
        }
    }
}

pub fn run_discrete_customers(params: &ModelParams, customers: usize) -> Result<DiscreteTrajectory, ModelError> {
    let mut traj = DiscreteTrajectory::new(*params)?;
    for _ in 0..customers {
        traj.step()?;
    }
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumDetection {
    /// First customer leaving exactly one interval after its predecessor.
    pub customer: usize,
    /// Entry index `J_{r0−1}` from which the store is in equilibrium.
    pub reached_at: u64,
    pub steady_occupancy: u64,
    /// Whether every later exit is one interval after the previous.
    pub locked: bool,
    /// Whether `J_r = 2r − (K_{r−1} + 1)` for every computed `r` from
    /// `reached_at` on.
    pub identity_holds: bool,
}

/// Finds the first `r` with `J_r − J_{r−1} = 1`.
pub fn detect_equilibrium(traj: &DiscreteTrajectory) -> Option<EquilibriumDetection> {
    let j = traj.exits();
    let idx = (1..j.len()).find(|&i| j[i] - j[i - 1] == 1)?;
    let reached_at = j[idx - 1];
    let locked = (idx + 1..j.len()).all(|i| j[i] - j[i - 1] == 1);
    let identity_holds = (reached_at as usize..=j.len()).all(|r| {
        j[r - 1] == 2 * r as u64 - (traj.departed_before(r - 1) as u64 + 1)
    });
    Some(EquilibriumDetection {
        customer: idx + 1,
        reached_at,
        steady_occupancy: j[idx] - (idx + 1) as u64,
        locked,
        identity_holds,
    })
}

/// Verdict read off the first change in `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumPrediction {
    /// `g` decreases first at `customer`.
    Equilibrium { customer: usize, before_first_exit: bool },
    /// `g` increases first at `customer`.
    NoEquilibrium { customer: usize, before_first_exit: bool },
    /// `g` never changes over the computed customers.
    Undetermined,
}

impl EquilibriumPrediction {
    pub fn will_equilibrate(&self) -> Option<bool> {
        match self {
            Self::Equilibrium { .. } => Some(true),
            Self::NoEquilibrium { .. } => Some(false),
            Self::Undetermined => None,
        }
    }
}

/// Predicts the long-run regime from the first strict change in `g`.
///
/// The sign is read at the first change after the flat prefix; if that
/// change comes before the first exit it is flagged, since the later course
/// can still differ.
pub fn predict_equilibrium(traj: &DiscreteTrajectory) -> EquilibriumPrediction {
    let g = traj.g();
    let first_exit = traj.exits().first().copied().unwrap_or(0);
    for r in 2..=g.len() {
        let (prev, cur) = (g[r - 2], g[r - 1]);
        if cur != prev {
            let before_first_exit = (r as u64) < first_exit;
            return if cur < prev {
                EquilibriumPrediction::Equilibrium { customer: r, before_first_exit }
            } else {
                EquilibriumPrediction::NoEquilibrium { customer: r, before_first_exit }
            };
        }
    }
    EquilibriumPrediction::Undetermined
}

/// Series plus the two sides of Little's law over the window.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSeries {
    pub series: SeriesBundle,
    /// Occupancy at the end of the window.
    pub occupancy_direct: f64,
    /// Entry rate times mean completed shopping time.
    pub occupancy_littles: f64,
}

pub fn extract_series_discrete(
    traj: &DiscreteTrajectory,
    tick_seconds: f64,
    window_seconds: f64,
) -> DiscreteSeries {
    let exits: Vec<f64> = traj.exits.iter().map(|&j| j as f64).collect();
    let series = series::from_exit_indices(&traj.params, &exits, tick_seconds, window_seconds);
    let occupancy_direct = series.occupancy.last().copied().unwrap_or(0) as f64;
    let occupancy_littles = series.final_avg_shop_time_s() / traj.params.delta_seconds;
    DiscreteSeries { series, occupancy_direct, occupancy_littles }
}

/// Checks that total spend rate never falls and per-customer rate never
/// rises as occupancy evolves interval by interval, up to equilibrium or the
/// last entry. A one-interval dip at an exit instant is tolerated when the
/// following interval recovers.
pub fn total_spend_monotonicity(traj: &DiscreteTrajectory) -> bool {
    let upto = match detect_equilibrium(traj) {
        Some(eq) => eq.reached_at as usize,
        None => traj.len(),
    }
    .min(traj.len());
    let n = traj.interval_occupancy(upto);
    let p = traj.params();
    let total: Vec<f64> = n.iter().map(|&k| p.total_rate(k as f64)).collect();
    let each: Vec<f64> = n
        .iter()
        .map(|&k| p.customer_rate(k.saturating_sub(1) as f64))
        .collect();
    let exit_at = |j: usize| traj.exits().binary_search(&(j as u64)).is_ok();
    let ok = |v: &[f64], sign: f64| {
        (1..v.len()).all(|i| {
            let d = sign * (v[i] - v[i - 1]);
            d >= -1e-12 || (exit_at(i + 1) && i + 1 < v.len() && sign * (v[i + 1] - v[i - 1]) >= -1e-12)
        })
    };
    ok(&total, 1.0) && ok(&each, -1.0)
}
