//! CSV output. Every number is written with six significant digits.

use crate::compare::{compare_models, ComparisonRow};
use crate::sweep::SweepResult;
use crate::HarnessError;
use std::fs::File;
use std::path::{Path, PathBuf};
use storeflow_core::discrete::DiscreteTrajectory;
use storeflow_core::series::SeriesBundle;
use storeflow_sim::record::RunRecord;

/// Six significant digits, plain notation between 1e-5 and 1e6.
pub fn fmt6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let rounded: f64 = sci.parse().expect("round trip");
        trim(&format!("{:.*}", (5 - exp) as usize, rounded)).to_string()
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt6).unwrap_or_default()
}

pub(crate) struct Table {
    path: PathBuf,
    writer: csv::Writer<File>,
}

impl Table {
    pub(crate) fn create(path: &Path, header: &[&str]) -> Result<Self, HarnessError> {
        let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
        let mut t = Self { path: path.to_path_buf(), writer: csv::Writer::from_writer(file) };
        t.row(header)?;
        Ok(t)
    }

    pub(crate) fn row<S: AsRef<[u8]>>(&mut self, fields: &[S]) -> Result<(), HarnessError> {
        self.writer.write_record(fields).map_err(|e| HarnessError::csv(&self.path, e))
    }

    pub(crate) fn finish(mut self) -> Result<(), HarnessError> {
        self.writer.flush().map_err(|e| HarnessError::io(&self.path, e))
    }
}

pub const SWEEP_FILES: [&str; 7] = [
    "freeze_rate.csv",
    "occupancy.csv",
    "completions.csv",
    "shoptime.csv",
    "spendrate.csv",
    "comparison.csv",
    "model_occupancy.csv",
];

/// Writes one file per quantity into `dir`, creating it if needed, and
/// returns the paths written.
pub fn export_csv(result: &SweepResult, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let path = |name: &str| dir.join(name);
    let sims = || result.deltas.iter().filter_map(|d| d.sim.as_ref().map(|s| (d.delta_seconds, s)));

    let mut t = Table::create(&path(SWEEP_FILES[0]), &["delta_s", "attempts", "successes", "freeze_rate"])?;
    for (delta, s) in sims() {
        t.row(&[fmt6(delta), s.attempts().to_string(), s.successes.to_string(), fmt6(s.freeze_rate())])?;
    }
    t.finish()?;

    let mut t = Table::create(&path(SWEEP_FILES[1]), &["delta_s", "t_s", "mean_occupancy"])?;
    for (delta, s) in sims() {
        for (k, &n) in s.mean_occupancy.iter().enumerate() {
            t.row(&[fmt6(delta), fmt6(s.time_of(k)), fmt6(n)])?;
        }
    }
    t.finish()?;

    let mut t = Table::create(&path(SWEEP_FILES[2]), &["delta_s", "mean_completed"])?;
    for (delta, s) in sims().filter(|(_, s)| s.successes > 0) {
        t.row(&[fmt6(delta), fmt6(s.mean_completed)])?;
    }
    t.finish()?;

    let mut t = Table::create(&path(SWEEP_FILES[3]), &["delta_s", "mean_shop_time_s"])?;
    for (delta, s) in sims() {
        if let Some(a) = s.mean_shop_time_s {
            t.row(&[fmt6(delta), fmt6(a)])?;
        }
    }
    t.finish()?;

    let mut t = Table::create(&path(SWEEP_FILES[4]), &["delta_s", "t_s", "mean_spend_rate"])?;
    for (delta, s) in sims() {
        for (k, &e) in s.mean_spend_rate.iter().enumerate() {
            t.row(&[fmt6(delta), fmt6(s.time_of(k)), fmt6(e)])?;
        }
    }
    t.finish()?;

    write_comparison(&path(SWEEP_FILES[5]), &compare_models(result))?;

    let mut t = Table::create(&path(SWEEP_FILES[6]), &["delta_s", "t_s", "continuous_occupancy", "discrete_occupancy"])?;
    for d in &result.deltas {
        let cont = d.continuous.as_ref();
        let disc = d.discrete.as_ref().map(|s| &s.series);
        let len = cont.map_or(0, |s| s.len()).max(disc.map_or(0, |s| s.len()));
        for k in 0..len {
            let t_s = cont.or(disc).and_then(|s| s.t_seconds.get(k)).copied();
            let at = |s: Option<&SeriesBundle>| s.and_then(|s| s.occupancy.get(k)).map(|&n| n as f64);
            t.row(&[fmt6(d.delta_seconds), opt(t_s), opt(at(cont)), opt(at(disc))])?;
        }
    }
    t.finish()?;

    Ok(SWEEP_FILES.iter().map(|n| path(n)).collect())
}

pub const COMPARISON_HEADER: [&str; 13] = [
    "delta_s",
    "analytic_n",
    "analytic_a_s",
    "analytic_regime",
    "discrete_n",
    "discrete_regime",
    "continuous_n",
    "sim_n",
    "sim_a_s",
    "sim_regime",
    "little_residual",
    "little_relative",
    "flag",
];

pub fn write_comparison(path: &Path, rows: &[ComparisonRow]) -> Result<(), HarnessError> {
    let mut t = Table::create(path, &COMPARISON_HEADER)?;
    for r in rows {
        t.row(&[
            fmt6(r.delta_seconds),
            opt(r.analytic_occupancy),
            opt(r.analytic_shop_time_s),
            r.analytic_regime.label().to_string(),
            opt(r.discrete_occupancy),
            r.discrete_regime.map(|g| g.label()).unwrap_or_default().to_string(),
            opt(r.continuous_occupancy),
            opt(r.sim_occupancy),
            opt(r.sim_shop_time_s),
            r.sim_regime.map(|g| g.label()).unwrap_or_default().to_string(),
            opt(r.little_residual),
            opt(r.little_relative),
            if r.analytic_only { "analytic-only" } else { "" }.to_string(),
        ])?;
    }
    t.finish()
}

pub fn write_series(path: &Path, s: &SeriesBundle) -> Result<(), HarnessError> {
    let mut t = Table::create(
        path,
        &["t_seconds", "occupancy", "completions", "avg_shop_time_s", "total_spend_rate"],
    )?;
    for k in 0..s.len() {
        t.row(&[
            fmt6(s.t_seconds[k]),
            s.occupancy[k].to_string(),
            s.completions[k].to_string(),
            fmt6(s.avg_shop_time_s[k]),
            fmt6(s.total_spend_rate[k]),
        ])?;
    }
    t.finish()
}

/// One row per customer: exit index, departures and occupancy at entry, and
/// the distance to the equilibrium exit index.
pub fn write_discrete_indices(path: &Path, traj: &DiscreteTrajectory) -> Result<(), HarnessError> {
    let mut t = Table::create(path, &["r", "J_r", "K_r", "L_r", "g_r"])?;
    let occupancy = traj.occupancy_at_entry();
    let g = traj.g();
    for r in 1..=traj.len() {
        t.row(&[
            r.to_string(),
            traj.exits()[r - 1].to_string(),
            traj.departed()[r - 1].to_string(),
            occupancy[r - 1].to_string(),
            g[r - 1].to_string(),
        ])?;
    }
    t.finish()
}

pub fn write_run_series(path: &Path, run: &RunRecord) -> Result<(), HarnessError> {
    let mut t = Table::create(path, &["t_s", "occupancy", "completions", "spend_rate"])?;
    for k in 0..run.ticks() {
        t.row(&[
            fmt6((k + 1) as f64 * run.config.tick),
            run.occupancy[k].to_string(),
            run.completions[k].to_string(),
            fmt6(run.spend_rate[k]),
        ])?;
    }
    t.finish()
}

pub fn write_run_summary(path: &Path, run: &RunRecord) -> Result<(), HarnessError> {
    let mut t = Table::create(
        path,
        &[
            "seed",
            "delta_s",
            "ticks",
            "entered",
            "completed",
            "mean_shop_time_s",
            "freeze",
            "freeze_tick",
            "frozen_customers",
            "order_inversion",
        ],
    )?;
    let (kind, tick, count) = match run.freeze {
        Some(f) => (format!("{:?}", f.kind).to_lowercase(), f.tick.to_string(), f.customers.to_string()),
        None => ("none".to_string(), String::new(), String::new()),
    };
    t.row(&[
        run.seed.to_string(),
        fmt6(run.config.entry_interval),
        run.ticks().to_string(),
        run.entered.to_string(),
        run.final_completions().to_string(),
        opt(run.mean_shopping_time()),
        kind,
        tick,
        count,
        run.has_order_inversion().to_string(),
    ])?;
    t.finish()
}

pub fn write_trace(path: &Path, run: &RunRecord) -> Result<(), HarnessError> {
    let mut t = Table::create(path, &["tick", "customer_id", "x", "y", "state"])?;
    for row in run.trace.iter().flatten() {
        let state = format!("{:?}", row.state);
        let state = state.split([' ', '{']).next().unwrap_or_default().to_lowercase();
        t.row(&[
            row.tick.to_string(),
            row.customer.to_string(),
            fmt6(row.position.x),
            fmt6(row.position.y),
            state,
        ])?;
    }
    t.finish()
}

#[cfg(test)]
mod tests {
    use super::fmt6;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt6(41.814_907), "41.8149");
        assert_eq!(fmt6(1496.5634), "1496.56");
        assert_eq!(fmt6(3.0), "3");
        assert_eq!(fmt6(-0.5), "-0.5");
        assert_eq!(fmt6(0.000_123_456_78), "0.000123457");
        assert_eq!(fmt6(999_999.7), "1e6");
        assert_eq!(fmt6(1.234_567e-7), "1.23457e-7");
        assert_eq!(fmt6(9.999_996), "10");
    }
}
