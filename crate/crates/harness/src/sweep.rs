//! Replicated simulation sweeps over the entry interval, with the analytic
//! layers evaluated at the same intervals.

use crate::seed::derive_seed;
use crate::HarnessError;
use rayon::prelude::*;
use storeflow_core::continuous::{extract_series_continuous, run_continuous};
use storeflow_core::discrete::{detect_equilibrium, extract_series_discrete, predict_equilibrium, run_discrete};
use storeflow_core::equilibrium::{solve_equilibrium, EquilibriumSolution};
use storeflow_core::series::SeriesBundle;
use storeflow_core::ModelParams;
use storeflow_sim::{run_sim_with, AvoidanceTable, CollisionMode, RunOptions, SimConfig, StoreLayout};

/// 30..65 s in steps of 5 plus the extra points near the transition.
pub const DEFAULT_GRID: [f64; 16] = [
    28.0, 30.0, 31.0, 32.0, 33.0, 34.0, 35.0, 37.0, 40.0, 42.0, 45.0, 47.0, 50.0, 55.0, 60.0, 65.0,
];

/// The discrete model is run at least this long to decide whether it locks.
pub const DETECTION_HORIZON_SECONDS: f64 = 20_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelFlags {
    pub continuous: bool,
    pub discrete: bool,
    pub sim: bool,
}

impl Default for ModelFlags {
    fn default() -> Self {
        Self { continuous: true, discrete: true, sim: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub delta_values: Vec<f64>,
    /// Successful runs wanted per entry interval.
    pub replicates_required: usize,
    pub master_seed: u64,
    pub horizon_seconds: f64,
    pub models: ModelFlags,
    /// Budget and slowdown parameters; the entry interval is set per point.
    pub params: ModelParams,
    pub avoidance_table: AvoidanceTable,
    pub layout: StoreLayout,
    /// Attempts per interval are capped at this multiple of the replicates.
    pub attempt_cap_factor: usize,
    pub collisions: CollisionMode,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            delta_values: DEFAULT_GRID.to_vec(),
            replicates_required: 100,
            master_seed: 0,
            horizon_seconds: 3600.0,
            models: ModelFlags::default(),
            params: ModelParams::reference(60.0),
            avoidance_table: AvoidanceTable::calibrated(),
            layout: StoreLayout::default(),
            attempt_cap_factor: 20,
            collisions: CollisionMode::Scheduler,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.delta_values.is_empty() {
            return Err(HarnessError::Spec("no entry intervals given".into()));
        }
        if let Some(d) = self.delta_values.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
            return Err(HarnessError::Spec(format!("entry interval must be positive, got {d}")));
        }
        if self.replicates_required == 0 {
            return Err(HarnessError::Spec("replicates must be at least 1".into()));
        }
        if self.attempt_cap_factor == 0 {
            return Err(HarnessError::Spec("attempt cap factor must be at least 1".into()));
        }
        if !(self.horizon_seconds.is_finite() && self.horizon_seconds >= 0.0) {
            return Err(HarnessError::Spec(format!("horizon must be non-negative, got {}", self.horizon_seconds)));
        }
        self.params.with_delta(self.delta_values[0]).check()?;
        Ok(())
    }

    pub fn sim_config(&self, delta_seconds: f64) -> SimConfig {
        let mut config = SimConfig::new(delta_seconds).with_budget(self.params.m);
        config.horizon = self.horizon_seconds;
        config.avoidance_table = self.avoidance_table.clone();
        config
    }

    pub fn attempt_cap(&self) -> usize {
        self.attempt_cap_factor * self.replicates_required
    }
}

/// Simulation statistics at one entry interval.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimSummary {
    pub successes: usize,
    pub failures: usize,
    /// The attempt cap was hit before enough runs succeeded.
    pub saturated: bool,
    /// Seeds of the runs averaged, in attempt order.
    pub seeds: Vec<u64>,
    pub tick_seconds: f64,
    /// Per-tick means over successes; entry `k` is the state after tick `k`.
    pub mean_occupancy: Vec<f64>,
    pub mean_completions: Vec<f64>,
    pub mean_spend_rate: Vec<f64>,
    /// Completions at the horizon, averaged over successes.
    pub mean_completed: f64,
    /// Average over successes of each run's mean completed shopping time.
    pub mean_shop_time_s: Option<f64>,
}

impl SimSummary {
    pub fn attempts(&self) -> usize {
        self.successes + self.failures
    }

    pub fn freeze_rate(&self) -> f64 {
        if self.attempts() == 0 {
            0.0
        } else {
            self.failures as f64 / self.attempts() as f64
        }
    }

    /// Time of series entry `k`.
    pub fn time_of(&self, k: usize) -> f64 {
        (k + 1) as f64 * self.tick_seconds
    }

    /// Mean occupancy over a window of `seconds` ending `end_offset` seconds
    /// before the horizon.
    pub fn window_occupancy(&self, seconds: f64, end_offset: f64) -> Option<f64> {
        let per = |s: f64| (s / self.tick_seconds).round() as usize;
        let len = self.mean_occupancy.len().checked_sub(per(end_offset))?;
        let start = len.checked_sub(per(seconds))?;
        let w = &self.mean_occupancy[start..len];
        (!w.is_empty()).then(|| w.iter().sum::<f64>() / w.len() as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSummary {
    pub series: SeriesBundle,
    pub steady_occupancy: Option<u64>,
    /// Verdict read off the early course of `g`, when it changes at all.
    pub predicted_equilibrium: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaResult {
    pub delta_seconds: f64,
    pub equilibrium: EquilibriumSolution,
    pub continuous: Option<SeriesBundle>,
    pub discrete: Option<DiscreteSummary>,
    pub sim: Option<SimSummary>,
    /// Analytic layers that could not be evaluated, and why.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub deltas: Vec<DeltaResult>,
}

impl SweepResult {
    pub fn empty(spec: SweepSpec) -> Self {
        Self { spec, deltas: Vec::new() }
    }
}

/// Runs every layer requested at every interval of `spec`.
///
/// Attempt `k` at interval `Δ` always uses `derive_seed(master, Δ, k)`, and
/// the first `replicates_required` successes in attempt order are kept, so
/// results do not depend on how runs are spread over threads.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, HarnessError> {
    spec.validate()?;
    let deltas = spec
        .delta_values
        .par_iter()
        .map(|&delta| run_point(spec, delta))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepResult { spec: spec.clone(), deltas })
}

fn run_point(spec: &SweepSpec, delta: f64) -> Result<DeltaResult, HarnessError> {
    let params = spec.params.with_delta(delta);
    let mut notes = Vec::new();
    let equilibrium = solve_equilibrium(&params)?;
    let continuous = if spec.models.continuous {
        match run_continuous(&params, spec.horizon_seconds) {
            Ok(traj) => Some(extract_series_continuous(&traj, 1.0, spec.horizon_seconds)),
            Err(e) => {
                notes.push(format!("continuous: {e}"));
                None
            }
        }
    } else {
        None
    };
    let discrete = if spec.models.discrete {
        match run_discrete(&params, spec.horizon_seconds.max(DETECTION_HORIZON_SECONDS)) {
            Ok(traj) => Some(DiscreteSummary {
                series: extract_series_discrete(&traj, 1.0, spec.horizon_seconds).series,
                steady_occupancy: detect_equilibrium(&traj).map(|e| e.steady_occupancy),
                predicted_equilibrium: predict_equilibrium(&traj).will_equilibrate(),
            }),
            Err(e) => {
                notes.push(format!("discrete: {e}"));
                None
            }
        }
    } else {
        None
    };
    let sim = if spec.models.sim { Some(replicate(spec, delta)?) } else { None };
    Ok(DeltaResult { delta_seconds: delta, equilibrium, continuous, discrete, sim, notes })
}

struct Attempt {
    seed: u64,
    froze: bool,
    occupancy: Vec<u32>,
    completions: Vec<u32>,
    spend_rate: Vec<f64>,
    mean_shop_time: Option<f64>,
}

fn attempt(spec: &SweepSpec, config: &SimConfig, delta: f64, k: usize) -> Result<Attempt, HarnessError> {
    let seed = derive_seed(spec.master_seed, delta, k as u64);
    let options = RunOptions { mode: spec.collisions, ..Default::default() };
    let (run, _) = run_sim_with(&spec.layout, config, seed, options)?;
    let froze = run.froze();
    let mean_shop_time = run.mean_shopping_time();
    if froze {
        return Ok(Attempt {
            seed,
            froze,
            occupancy: Vec::new(),
            completions: Vec::new(),
            spend_rate: Vec::new(),
            mean_shop_time,
        });
    }
    Ok(Attempt {
        seed,
        froze,
        occupancy: run.occupancy,
        completions: run.completions,
        spend_rate: run.spend_rate,
        mean_shop_time,
    })
}

fn add<T: Copy + Into<f64>>(acc: &mut Vec<f64>, xs: &[T]) {
    if acc.len() < xs.len() {
        acc.resize(xs.len(), 0.0);
    }
    for (a, &x) in acc.iter_mut().zip(xs) {
        *a += x.into();
    }
}

/// Discard-and-replace: frozen runs are counted and dropped until enough
/// runs succeed or the attempt cap is reached.
fn replicate(spec: &SweepSpec, delta: f64) -> Result<SimSummary, HarnessError> {
    let config = spec.sim_config(delta);
    let wanted = spec.replicates_required;
    let cap = spec.attempt_cap();
    let mut out = SimSummary { tick_seconds: config.tick, ..Default::default() };
    let mut shop_sum = 0.0;
    let mut shop_runs = 0usize;
    let mut completed_sum = 0.0;
    let mut next = 0usize;
    while out.successes < wanted && next < cap {
        let need = wanted - out.successes;
        // Guess how many attempts the remaining successes will take.
        let guess = match (need * next).checked_div(out.successes) {
            Some(g) => g + 1,
            None if next == 0 => need,
            None => 4 * need,
        };
        let batch = guess.max(rayon::current_num_threads()).min(cap - next);
        let runs = (next..next + batch)
            .into_par_iter()
            .map(|k| attempt(spec, &config, delta, k))
            .collect::<Result<Vec<_>, _>>()?;
        for run in runs {
            if out.successes == wanted {
                break;
            }
            if run.froze {
                out.failures += 1;
                continue;
            }
            out.successes += 1;
            out.seeds.push(run.seed);
            add(&mut out.mean_occupancy, &run.occupancy);
            add(&mut out.mean_completions, &run.completions);
            add(&mut out.mean_spend_rate, &run.spend_rate);
            completed_sum += run.completions.last().copied().unwrap_or(0) as f64;
            if let Some(a) = run.mean_shop_time {
                shop_sum += a;
                shop_runs += 1;
            }
        }
        next += batch;
    }
    out.saturated = out.successes < wanted;
    if out.successes > 0 {
        let n = out.successes as f64;
        for v in [&mut out.mean_occupancy, &mut out.mean_completions, &mut out.mean_spend_rate] {
            v.iter_mut().for_each(|x| *x /= n);
        }
        out.mean_completed = completed_sum / n;
    }
    out.mean_shop_time_s = (shop_runs > 0).then(|| shop_sum / shop_runs as f64);
    Ok(out)
}
