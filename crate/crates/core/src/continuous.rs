//! Exit indices when interactions grow continuously between entries.
//!
//! Customer `r` spends `Mf` best-rate intervals in total. Its instantaneous
//! rate is `1/(1 + o/cA1)` where the count of others `o(t) = t − 1 − E(t)`
//! rises continuously with time and drops by one at every exit `E`. Matching
//! the spending of consecutive customers over the non-shared parts of their
//! visits gives an exact recurrence for `J_r`.

use crate::series::{self, SeriesBundle};
use crate::{ModelError, ModelParams};

/// Largest exponent accepted in `e^{Mf/cA1}`.
const MAX_EXPONENT: f64 = 700.0;

/// `J1 = cA1·(e^{Mf/cA1} − 1) + 1`.
pub fn first_exit_continuous(params: &ModelParams) -> Result<f64, ModelError> {
    params.check()?;
    let x = params.c_a1();
    let exponent = params.mf() / x;
    if exponent > MAX_EXPONENT {
        return Err(ModelError::Overflow { exponent });
    }
    Ok(x * exponent.exp_m1() + 1.0)
}

/// `J_r − J_{r−1}` for customer `r ≥ 2`.
///
/// `departed` is `K_{r−1}` and `crossings` the exits strictly inside
/// `(r−1, r)`, in increasing order. No crossing is the plain recurrence, one
/// crossing uses the exit time in place of `r`, and several crossings chain
/// the per-segment log ratios.
pub fn recurrence_increment(
    c_a1: f64,
    prev_exit: f64,
    r: usize,
    departed: usize,
    crossings: &[f64],
) -> Result<f64, ModelError> {
    let rf = r as f64;
    let kf = departed as f64;
    let numerator = c_a1 + prev_exit - rf;
    if numerator <= 0.0 {
        return Err(ModelError::Breakdown {
            customer: r,
            reason: format!("non-positive numerator {numerator}"),
        });
    }
    let breakdown = |denominator: f64| ModelError::Breakdown {
        customer: r,
        reason: format!("non-positive denominator {denominator}"),
    };
    match crossings {
        [] => {
            let denominator = c_a1 + rf - 2.0 - kf;
            if denominator <= 0.0 {
                return Err(breakdown(denominator));
            }
            Ok(numerator / denominator)
        }
        [j_star] => {
            let denominator = c_a1 + j_star - 2.0 - kf;
            if denominator <= 0.0 {
                return Err(breakdown(denominator));
            }
            Ok(numerator / denominator)
        }
        many => {
            let mut others = rf - 2.0 - kf;
            let mut t = rf - 1.0;
            let mut ratio = 1.0;
            for &e in many {
                let start = c_a1 + others;
                if start <= 0.0 {
                    return Err(breakdown(start));
                }
                ratio *= (start + (e - t)) / start;
                others += (e - t) - 1.0;
                t = e;
            }
            let start = c_a1 + others;
            if start <= 0.0 {
                return Err(breakdown(start));
            }
            ratio *= (start + (rf - t)) / start;
            Ok(numerator * (ratio - 1.0))
        }
    }
}

#[derive(Debug, Clone)]
pub struct ContinuousTrajectory {
    params: ModelParams,
    exits: Vec<f64>,
    departed: Vec<usize>,
    multi_exit_intervals: Vec<usize>,
}

impl ContinuousTrajectory {
    pub fn new(params: ModelParams) -> Result<Self, ModelError> {
        params.check()?;
        Ok(Self {
            params,
            exits: Vec::new(),
            departed: Vec::new(),
            multi_exit_intervals: Vec::new(),
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// `J_r` for `r = 1..=len`, stored at index `r − 1`.
    pub fn exits(&self) -> &[f64] {
        &self.exits
    }

    /// `K_r`, customers gone by the moment `r` enters.
    pub fn departed(&self) -> &[usize] {
        &self.departed
    }

    pub fn len(&self) -> usize {
        self.exits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exits.is_empty()
    }

    /// Customers whose entry interval saw more than one exit.
    pub fn multi_exit_intervals(&self) -> &[usize] {
        &self.multi_exit_intervals
    }

    fn departed_by(&self, time: f64) -> usize {
        self.exits.partition_point(|&j| j <= time)
    }

    /// Computes the exit index of the next customer.
    pub fn step(&mut self) -> Result<f64, ModelError> {
        let r = self.exits.len() + 1;
        let exit = if r == 1 {
            first_exit_continuous(&self.params)?
        } else {
            let prev = self.exits[r - 2];
            if prev <= r as f64 {
                return Err(ModelError::Breakdown {
                    customer: r,
                    reason: format!("customer {} left at {prev} before customer {r} entered", r - 1),
                });
            }
            let k_prev = self.departed_by((r - 1) as f64);
            let crossings: Vec<f64> = self.exits[k_prev..]
                .iter()
                .copied()
                .take_while(|&j| j < r as f64)
                .collect();
            if crossings.len() > 1 {
                self.multi_exit_intervals.push(r);
            }
            prev + recurrence_increment(self.params.c_a1(), prev, r, k_prev, &crossings)?
        };
        self.exits.push(exit);
        let k = self.departed_by(r as f64);
        self.departed.push(k);
        Ok(exit)
    }

    /// Occupancy `r − K_r` seen by each entrant.
    pub fn occupancy_at_entry(&self) -> Vec<usize> {
        self.departed
            .iter()
            .enumerate()
            .map(|(i, &k)| i + 1 - k)
            .collect()
    }

    /// Shopping time of customer `r` in seconds.
    pub fn shopping_time_seconds(&self, r: usize) -> f64 {
        self.params.delta_seconds * (self.exits[r - 1] - r as f64)
    }
}

/// Runs until the next entry would come after `horizon_seconds`.
pub fn run_continuous(
    params: &ModelParams,
    horizon_seconds: f64,
) -> Result<ContinuousTrajectory, ModelError> {
    let mut traj = ContinuousTrajectory::new(*params)?;
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

/// Runs for a fixed number of customers.
pub fn run_continuous_customers(
    params: &ModelParams,
    customers: usize,
) -> Result<ContinuousTrajectory, ModelError> {
    let mut traj = ContinuousTrajectory::new(*params)?;
    for _ in 0..customers {
        traj.step()?;
    }
    Ok(traj)
}

pub fn extract_series_continuous(
    traj: &ContinuousTrajectory,
    tick_seconds: f64,
    window_seconds: f64,
) -> SeriesBundle {
    series::from_exit_indices(&traj.params, &traj.exits, tick_seconds, window_seconds)
}
