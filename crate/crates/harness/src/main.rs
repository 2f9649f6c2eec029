use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use storeflow::config::FileSettings;
use storeflow::export::{self, fmt6};
use storeflow::sweep::{ModelFlags, DEFAULT_GRID};
use storeflow::{compare_models, export_csv, run_sweep, HarnessError, SweepSpec};
use storeflow_core::continuous::{extract_series_continuous, run_continuous};
use storeflow_core::discrete::{detect_equilibrium, extract_series_discrete, predict_equilibrium, run_discrete};
use storeflow_core::equilibrium::{equilibrium_threshold, optimal_intake, solve_equilibrium, validate_params, EquilibriumSolution};
use storeflow_core::{ModelParams, SECONDS_PER_HOUR};
use storeflow_sim::{run_sim_with, AvoidanceTable, CollisionMode, RunOptions, StoreLayout};

#[derive(Parser)]
#[command(name = "storeflow", version, about = "Store throughput under social distancing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Little's-law equilibrium, critical interval and best intake rate.
    Equilibrium,
    /// Continuous exit-index model.
    Continuous,
    /// Discrete exit-index model with equilibrium detection.
    Discrete,
    /// One agent-based run.
    Simulate,
    /// Replicated simulation and analytic models over a grid of intervals.
    Sweep,
    /// Sweep, then tabulate the three layers side by side.
    Compare,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableChoice {
    Calibrated,
    Default,
}

#[derive(Args)]
struct Common {
    /// File of `key = value` settings; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    delta_seconds: Option<f64>,
    /// Comma-separated entry intervals for `sweep` and `compare`.
    #[arg(long, global = true, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
    #[arg(long, global = true)]
    m: Option<f64>,
    #[arg(long, global = true)]
    c: Option<f64>,
    #[arg(long, global = true)]
    a1_hours: Option<f64>,
    #[arg(long, global = true)]
    horizon_seconds: Option<f64>,
    #[arg(long, global = true)]
    replicates: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Record every customer's position each tick (`simulate`).
    #[arg(long, global = true)]
    trace: bool,
    /// Check every pair on every move instead of using risk lists.
    #[arg(long, global = true)]
    naive_collisions: bool,
    /// Avoidance probabilities used by the simulation.
    #[arg(long, global = true, value_enum)]
    table: Option<TableChoice>,
}

struct Settings {
    params: ModelParams,
    deltas: Vec<f64>,
    horizon: f64,
    replicates: usize,
    seed: u64,
    out_dir: PathBuf,
    trace: bool,
    collisions: CollisionMode,
    table: AvoidanceTable,
}

fn resolve(common: Common, command: Command) -> Result<Settings, HarnessError> {
    let file = match &common.config {
        Some(path) => FileSettings::load(path)?,
        None => FileSettings::default(),
    };
    let table = match common.table {
        Some(t) => t,
        None => match file.table.as_deref() {
            None | Some("calibrated") => TableChoice::Calibrated,
            Some("default") => TableChoice::Default,
            Some(other) => {
                return Err(HarnessError::Config {
                    path: common.config.clone().unwrap_or_default(),
                    message: format!("unknown table `{other}`, expected `calibrated` or `default`"),
                })
            }
        },
    };
    let analytic = matches!(command, Command::Continuous | Command::Discrete);
    let reference = ModelParams::reference(60.0);
    let params = ModelParams::new(
        common.m.or(file.m).unwrap_or(reference.m),
        common.c.or(file.c).unwrap_or(reference.c),
        common.a1_hours.or(file.a1_hours).unwrap_or(reference.a1_hours),
        common.delta_seconds.or(file.delta_seconds).unwrap_or(60.0),
    )?;
    Ok(Settings {
        params,
        deltas: common.deltas.or(file.deltas).unwrap_or_else(|| DEFAULT_GRID.to_vec()),
        horizon: common
            .horizon_seconds
            .or(file.horizon_seconds)
            .unwrap_or(if analytic { 20_000.0 } else { 3600.0 }),
        replicates: common.replicates.or(file.replicates).unwrap_or(100),
        seed: common.seed.or(file.seed).unwrap_or(0),
        out_dir: common.out_dir.or(file.out_dir).unwrap_or_else(|| PathBuf::from("results")),
        trace: common.trace || file.trace.unwrap_or(false),
        collisions: if common.naive_collisions || file.naive_collisions.unwrap_or(false) {
            CollisionMode::Naive
        } else {
            CollisionMode::Scheduler
        },
        table: match table {
            TableChoice::Calibrated => AvoidanceTable::calibrated(),
            TableChoice::Default => AvoidanceTable::default(),
        },
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = cli.command;
    match resolve(cli.common, command).and_then(|s| run(command, &s)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn out_dir(s: &Settings) -> Result<&Path, HarnessError> {
    std::fs::create_dir_all(&s.out_dir).map_err(|e| HarnessError::Io { path: s.out_dir.clone(), source: e })?;
    Ok(&s.out_dir)
}

fn run(command: Command, s: &Settings) -> Result<(), HarnessError> {
    let p = &s.params;
    match command {
        Command::Equilibrium => {
            let report = validate_params(p)?;
            for m in &report.messages {
                println!("note: {m}");
            }
            println!("delta_s: {}", fmt6(p.delta_seconds));
            println!("threshold_delta_s: {}", fmt6(equilibrium_threshold(p)?));
            match solve_equilibrium(p)? {
                EquilibriumSolution::Feasible(eq) => {
                    println!("regime: equilibrium{}", if eq.at_boundary { " (boundary)" } else { "" });
                    println!("shopping_time_s: {}", fmt6(eq.shopping_time_seconds()));
                    println!("occupancy: {}", fmt6(eq.occupancy));
                    println!("total_spend_rate_per_hour: {}", fmt6(eq.total_rate));
                }
                EquilibriumSolution::Infeasible { discriminant } => {
                    println!("regime: no equilibrium (discriminant {})", fmt6(discriminant));
                }
            }
            let best = optimal_intake(p)?;
            println!("optimal_delta_s: {}", fmt6(best.delta_seconds));
            println!("optimal_shopping_time_s: {}", fmt6(best.shopping_time_hours * SECONDS_PER_HOUR));
            println!("optimal_occupancy: {}", fmt6(best.occupancy));
            println!("optimal_total_spend_rate_per_hour: {}", fmt6(best.total_rate));
        }
        Command::Continuous => {
            let traj = run_continuous(p, s.horizon)?;
            let series = extract_series_continuous(&traj, 1.0, s.horizon);
            let path = out_dir(s)?.join("continuous.csv");
            export::write_series(&path, &series)?;
            println!("customers: {}", traj.len());
            println!("final_occupancy: {}", series.occupancy.last().copied().unwrap_or(0));
            println!("completions: {}", series.final_completions());
            println!("mean_shop_time_s: {}", fmt6(series.final_avg_shop_time_s()));
            if !traj.multi_exit_intervals().is_empty() {
                println!("intervals_with_several_exits: {}", traj.multi_exit_intervals().len());
            }
            println!("wrote {}", path.display());
        }
        Command::Discrete => {
            let traj = run_discrete(p, s.horizon)?;
            let series = extract_series_discrete(&traj, 1.0, s.horizon);
            let dir = out_dir(s)?;
            let indices = dir.join("discrete_indices.csv");
            let path = dir.join("discrete.csv");
            export::write_discrete_indices(&indices, &traj)?;
            export::write_series(&path, &series.series)?;
            println!("customers: {}", traj.len());
            match detect_equilibrium(&traj) {
                Some(eq) => println!(
                    "equilibrium: from entry {} (customer {}), occupancy {}",
                    eq.reached_at, eq.customer, eq.steady_occupancy
                ),
                None => println!("equilibrium: not reached"),
            }
            let verdict = match predict_equilibrium(&traj).will_equilibrate() {
                Some(true) => "equilibrium",
                Some(false) => "no equilibrium",
                None => "undetermined",
            };
            println!("prediction: {verdict}");
            println!("littles_law: n = {}, f*A = {}", fmt6(series.occupancy_direct), fmt6(series.occupancy_littles));
            for d in traj.diagnostics() {
                println!("note: {d}");
            }
            println!("wrote {}", indices.display());
            println!("wrote {}", path.display());
        }
        Command::Simulate => {
            let mut spec = spec_for(s);
            spec.delta_values = vec![p.delta_seconds];
            let config = spec.sim_config(p.delta_seconds);
            let options = RunOptions { mode: s.collisions, trace: s.trace, ..Default::default() };
            let (record, _) = run_sim_with(&StoreLayout::default(), &config, s.seed, options)?;
            let dir = out_dir(s)?;
            let summary = dir.join("sim_summary.csv");
            let series = dir.join("sim_series.csv");
            export::write_run_summary(&summary, &record)?;
            export::write_run_series(&series, &record)?;
            println!("entered: {}", record.entered);
            println!("completed: {}", record.final_completions());
            if let Some(a) = record.mean_shopping_time() {
                println!("mean_shop_time_s: {}", fmt6(a));
            }
            match record.freeze {
                Some(f) => println!("freeze: {:?} at tick {} ({} customers)", f.kind, f.tick, f.customers),
                None => println!("freeze: none"),
            }
            println!("wrote {}", summary.display());
            println!("wrote {}", series.display());
            if s.trace {
                let trace = dir.join("trace.csv");
                export::write_trace(&trace, &record)?;
                println!("wrote {}", trace.display());
            }
        }
        Command::Sweep => {
            let result = run_sweep(&spec_for(s))?;
            for d in &result.deltas {
                if let Some(sim) = &d.sim {
                    println!(
                        "delta {:>6} s: {} successes, {} frozen, freeze rate {}, completed {}{}",
                        fmt6(d.delta_seconds),
                        sim.successes,
                        sim.failures,
                        fmt6(sim.freeze_rate()),
                        fmt6(sim.mean_completed),
                        if sim.saturated { " (saturated)" } else { "" }
                    );
                }
            }
            for path in export_csv(&result, out_dir(s)?)? {
                println!("wrote {}", path.display());
            }
        }
        Command::Compare => {
            let result = run_sweep(&spec_for(s))?;
            let rows = compare_models(&result);
            let o = |x: Option<f64>| x.map(fmt6).unwrap_or_else(|| "-".into());
            println!("delta_s  analytic_n  discrete_n  sim_n  regimes (analytic/discrete/sim)  little_rel");
            for r in &rows {
                println!(
                    "{:>7}  {:>10}  {:>10}  {:>6}  {}/{}/{}  {}{}",
                    fmt6(r.delta_seconds),
                    o(r.analytic_occupancy),
                    o(r.discrete_occupancy),
                    o(r.sim_occupancy),
                    r.analytic_regime.label(),
                    r.discrete_regime.map(|g| g.label()).unwrap_or("-"),
                    r.sim_regime.map(|g| g.label()).unwrap_or("-"),
                    o(r.little_relative),
                    if r.analytic_only { "  analytic-only" } else { "" }
                );
            }
            let path = out_dir(s)?.join("comparison.csv");
            export::write_comparison(&path, &rows)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn spec_for(s: &Settings) -> SweepSpec {
    SweepSpec {
        delta_values: s.deltas.clone(),
        replicates_required: s.replicates,
        master_seed: s.seed,
        horizon_seconds: s.horizon,
        models: ModelFlags::default(),
        params: s.params,
        avoidance_table: s.table.clone(),
        collisions: s.collisions,
        ..SweepSpec::default()
    }
}
