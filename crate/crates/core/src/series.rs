//! Clock-time series derived from an exit-index trajectory.

use crate::ModelParams;

/// Aligned per-tick series over `[0, window]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SeriesBundle {
    pub t_seconds: Vec<f64>,
    pub occupancy: Vec<u32>,
    /// Customers who have left by `t`.
    pub completions: Vec<u32>,
    /// Mean shopping time of those completers, 0 before the first exit.
    pub avg_shop_time_s: Vec<f64>,
    /// Currency per hour summed over everyone present.
    pub total_spend_rate: Vec<f64>,
}

impl SeriesBundle {
    pub fn len(&self) -> usize {
        self.t_seconds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_seconds.is_empty()
    }

    pub fn final_completions(&self) -> u32 {
        self.completions.last().copied().unwrap_or(0)
    }

    pub fn final_avg_shop_time_s(&self) -> f64 {
        self.avg_shop_time_s.last().copied().unwrap_or(0.0)
    }
}

/// Builds the series for customers `1..=exits.len()`, customer `r` entering
/// at `(r−1)·Δ` and leaving at `(J_r − 1)·Δ`. Exit indices must be
/// nondecreasing.
pub(crate) fn from_exit_indices(
    params: &ModelParams,
    exits: &[f64],
    tick_seconds: f64,
    window_seconds: f64,
) -> SeriesBundle {
    let mut out = SeriesBundle::default();
    if exits.is_empty() || tick_seconds <= 0.0 || window_seconds < 0.0 {
        return out;
    }
    let delta = params.delta_seconds;
    let steps = (window_seconds / tick_seconds).floor() as usize;
    let mut entered = 0usize;
    let mut exited = 0usize;
    let mut shop_sum = 0.0;
    for k in 0..=steps {
        let t = k as f64 * tick_seconds;
        while entered < exits.len() && entered as f64 * delta <= t {
            entered += 1;
        }
        while exited < exits.len() && (exits[exited] - 1.0) * delta <= t {
            let r = (exited + 1) as f64;
            shop_sum += delta * (exits[exited] - r);
            exited += 1;
        }
        // A customer cannot leave before entering; exits trail entries.
        let occupancy = entered.saturating_sub(exited);
        out.t_seconds.push(t);
        out.occupancy.push(occupancy as u32);
        out.completions.push(exited as u32);
        out.avg_shop_time_s
            .push(if exited == 0 { 0.0 } else { shop_sum / exited as f64 });
        out.total_spend_rate.push(params.total_rate(occupancy as f64));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_trajectory_gives_empty_series() {
        let p = ModelParams::reference(60.0);
        assert!(from_exit_indices(&p, &[], 1.0, 100.0).is_empty());
    }

    #[test]
    fn hand_built_trajectory() {
        // Δ = 10 s; customer 1 leaves when 3 enters (t = 20), customer 2 when 5 enters (t = 40).
        let p = ModelParams::reference(10.0);
        let s = from_exit_indices(&p, &[3.0, 5.0, 6.0], 5.0, 50.0);
        assert_eq!(s.occupancy, vec![1, 1, 2, 2, 2, 2, 2, 2, 1, 1, 0]);
        assert_eq!(s.completions, vec![0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 3]);
        assert_eq!(s.avg_shop_time_s[4], 20.0);
        assert_eq!(s.avg_shop_time_s[10], (20.0 + 30.0 + 30.0) / 3.0);
        assert_eq!(s.total_spend_rate[10], 0.0);
        assert!((s.total_spend_rate[2] - p.total_rate(2.0)).abs() < 1e-15);
    }
}
