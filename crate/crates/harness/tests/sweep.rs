use storeflow::compare::Regime;
use storeflow::sweep::ModelFlags;
use storeflow::{compare_models, derive_seed, run_sweep, SweepSpec};
use storeflow_sim::{run_sim, AvoidanceTable};

fn small(deltas: &[f64], replicates: usize) -> SweepSpec {
    SweepSpec {
        delta_values: deltas.to_vec(),
        replicates_required: replicates,
        master_seed: 11,
        horizon_seconds: 1200.0,
        ..SweepSpec::default()
    }
}

#[test]
fn invalid_specs_are_rejected() {
    assert!(run_sweep(&small(&[], 1)).is_err());
    assert!(run_sweep(&small(&[-5.0], 1)).is_err());
    assert!(run_sweep(&small(&[60.0], 0)).is_err());
}

#[test]
fn one_replicate_at_a_wide_interval() {
    let r = run_sweep(&small(&[300.0], 1)).unwrap();
    let sim = r.deltas[0].sim.as_ref().unwrap();
    assert_eq!((sim.successes, sim.failures), (1, 0));
    assert_eq!(sim.freeze_rate(), 0.0);
    assert_eq!(sim.seeds, vec![derive_seed(11, 300.0, 0)]);
    assert_eq!(sim.mean_occupancy.len(), 1200);
}

#[test]
fn keeps_the_lowest_indexed_successes() {
    let spec = small(&[30.0], 4);
    let r = run_sweep(&spec).unwrap();
    let sim = r.deltas[0].sim.as_ref().unwrap();
    assert_eq!(sim.attempts(), sim.successes + sim.failures);
    let config = spec.sim_config(30.0);
    let mut expected = Vec::new();
    let mut failures = 0;
    let mut k = 0;
    while expected.len() < 4 {
        let seed = derive_seed(11, 30.0, k);
        if run_sim(&spec.layout, &config, seed).unwrap().froze() {
            failures += 1;
        } else {
            expected.push(seed);
        }
        k += 1;
    }
    assert_eq!(sim.seeds, expected);
    assert_eq!(sim.failures, failures);
}

#[test]
fn thread_count_does_not_change_results() {
    let spec = small(&[32.0, 60.0], 3);
    let on = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_sweep(&spec).unwrap())
    };
    assert_eq!(on(1), on(4));
}

#[test]
fn attempt_cap_marks_saturation() {
    let mut spec = small(&[20.0], 3);
    spec.avoidance_table = AvoidanceTable { rows: [[0.0, 0.0, 0.0, 1.0]; 4] };
    spec.attempt_cap_factor = 2;
    spec.horizon_seconds = 3600.0;
    let r = run_sweep(&spec).unwrap();
    let sim = r.deltas[0].sim.as_ref().unwrap();
    assert!(sim.saturated);
    assert_eq!(sim.attempts(), 6);
    assert!(sim.successes < 3);
    assert!(sim.freeze_rate() > 0.5);
}

#[test]
fn analytic_only_rows_are_flagged() {
    let mut spec = small(&[60.0], 1);
    spec.models = ModelFlags { sim: false, ..ModelFlags::default() };
    let r = run_sweep(&spec).unwrap();
    assert!(r.deltas[0].sim.is_none());
    let rows = compare_models(&r);
    assert!(rows[0].analytic_only);
    assert_eq!(rows[0].sim_regime, None);
    assert_eq!(rows[0].discrete_occupancy, Some(19.0));
}

#[test]
fn layers_agree_on_both_sides_of_the_transition() {
    let mut spec = small(&[30.0, 60.0], 4);
    spec.horizon_seconds = 3600.0;
    let rows = compare_models(&run_sweep(&spec).unwrap());
    let slow = &rows[1];
    assert_eq!(slow.analytic_regime, Regime::Equilibrium);
    assert_eq!(slow.discrete_regime, Some(Regime::Equilibrium));
    assert_eq!(slow.sim_regime, Some(Regime::Equilibrium));
    let n = slow.sim_occupancy.unwrap();
    assert!((n - 20.0).abs() < 7.0, "{n}");
    assert!((slow.analytic_occupancy.unwrap() - n).abs() < 5.0);
    let fast = &rows[0];
    assert_eq!(fast.analytic_regime, Regime::NonEquilibrium);
    assert_eq!(fast.discrete_regime, Some(Regime::NonEquilibrium));
    assert_ne!(fast.sim_regime, Some(Regime::Equilibrium));
}
