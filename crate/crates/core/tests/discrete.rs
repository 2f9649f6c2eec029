use proptest::prelude::*;
use storeflow_core::discrete::*;
use storeflow_core::equilibrium::equilibrium_threshold;
use storeflow_core::ModelParams;

/// Straight transcription of the recurrence, recounting departures from
/// scratch at every step.
fn brute_force(p: &ModelParams, customers: usize) -> Vec<u64> {
    let x = p.c_a1();
    let t = |i: i64| 1.0 / (1.0 + i as f64 / x);
    let pick = |start: i64, target: f64| -> u64 {
        let mut sum = 0.0;
        let mut n = 0i64;
        loop {
            let with = sum + t(start + n);
            if with >= target {
                let keep = (with - target) / t(start + n) <= 0.465;
                return if keep { (n + 1) as u64 } else { n as u64 };
            }
            sum = with;
            n += 1;
        }
    };
    let mut j: Vec<u64> = vec![1 + pick(0, p.mf()).max(1)];
    for r in 2..=customers as i64 {
        let k = j.iter().filter(|&&e| (e as i64) < r).count() as i64;
        let prev = j[(r - 2) as usize] as i64;
        let m = pick(prev - r, t(r - k - 2)).max(1);
        j.push(prev as u64 + m);
    }
    j
}

const GRID: [f64; 16] = [
    28.0, 30.0, 31.0, 32.0, 33.0, 34.0, 35.0, 37.0, 40.0, 42.0, 45.0, 47.0, 50.0, 55.0, 60.0, 65.0,
];

#[test]
fn matches_brute_force_on_grid() {
    for delta in GRID {
        let p = ModelParams::reference(delta);
        let traj = run_discrete_customers(&p, 30).unwrap();
        assert_eq!(traj.exits(), brute_force(&p, 30).as_slice(), "delta {delta}");
    }
}

#[test]
fn spending_equals_budget_plus_chained_residuals() {
    for delta in [42.0, 45.0, 60.0] {
        let p = ModelParams::reference(delta);
        let x = p.c_a1();
        let n_max = 400;
        let traj = run_discrete_customers(&p, n_max).unwrap();
        let n = traj.interval_occupancy(n_max);
        let mut cumulative = 0.0;
        for r in 1..=n_max {
            cumulative += traj.residuals()[r - 1];
            let jr = traj.exits()[r - 1] as usize;
            if jr > n_max {
                break;
            }
            let spend: f64 = (r..jr).map(|j| term(x, (n[j - 1] - 1) as u64)).sum();
            assert!((spend - p.mf() - cumulative).abs() < 1e-9, "delta {delta} r {r}");
        }
    }
}

fn mean_slope(traj: &DiscreteTrajectory, last: usize) -> f64 {
    let j = traj.exits();
    let n = j.len();
    (j[n - 1] - j[n - 1 - last]) as f64 / last as f64
}

#[test]
fn slope_is_two_when_running_away_and_one_when_locked() {
    for delta in [30.0, 35.0, 41.0] {
        let traj = run_discrete_customers(&ModelParams::reference(delta), 3000).unwrap();
        assert!(mean_slope(&traj, 500) > 1.9, "delta {delta}");
    }
    for delta in [45.0, 60.0] {
        let traj = run_discrete_customers(&ModelParams::reference(delta), 3000).unwrap();
        assert_eq!(mean_slope(&traj, 500), 1.0, "delta {delta}");
    }
}

#[test]
fn steady_occupancy_at_sixty_seconds() {
    let traj = run_discrete(&ModelParams::reference(60.0), 20_000.0).unwrap();
    let eq = detect_equilibrium(&traj).unwrap();
    assert!(eq.locked && eq.identity_holds);
    assert_eq!(eq.steady_occupancy, 19);
}

#[test]
fn prediction_agrees_with_detection() {
    for delta in [30.0, 35.0, 41.0, 42.0, 45.0, 60.0] {
        let traj = run_discrete(&ModelParams::reference(delta), 20_000.0).unwrap();
        let detected = detect_equilibrium(&traj).is_some();
        assert_eq!(predict_equilibrium(&traj).will_equilibrate(), Some(detected), "delta {delta}");
    }
}

#[test]
fn spend_rates_are_monotone_on_grid() {
    for delta in GRID {
        let traj = run_discrete(&ModelParams::reference(delta), 20_000.0).unwrap();
        assert!(total_spend_monotonicity(&traj), "delta {delta}");
    }
}

#[test]
fn littles_law_in_equilibrium() {
    for delta in [45.0, 50.0, 60.0] {
        let traj = run_discrete(&ModelParams::reference(delta), 20_000.0).unwrap();
        let s = extract_series_discrete(&traj, 1.0, 15_000.0);
        let rel = (s.occupancy_direct - s.occupancy_littles).abs() / s.occupancy_direct;
        assert!(rel < 0.05, "delta {delta}: {rel}");
    }
}

#[test]
fn first_exit_against_digamma_root() {
    let check = digamma_check(&ModelParams::reference(42.0)).unwrap();
    let first = first_exit_discrete(&ModelParams::reference(42.0)).unwrap();
    assert!((first.exit as f64 - check.j1_psi).abs() < 1.0);
    assert!(check.j1_psi < check.j1_log);
    // Large cA1 flattens the terms and the two forms meet.
    let wide = ModelParams::new(0.148, 7058.0, 0.2108, 42.0).unwrap();
    assert!(digamma_check(&wide).unwrap().relative_gap() < 1e-3);
}

/// Entry intervals comfortably above both the equilibrium threshold and
/// the interval at which `Mf` reaches `cA1`, past which no stay balances.
fn locking_params() -> impl Strategy<Value = ModelParams> {
    (0.08f64..0.25, 30.0f64..120.0, 0.1f64..0.35, 1.3f64..3.0).prop_map(|(m, c, a1, scale)| {
        let p = ModelParams::new(m, c, a1, 60.0).unwrap();
        let balance = 3600.0 * m / (c * a1);
        p.with_delta(scale * equilibrium_threshold(&p).unwrap().max(balance))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn identity_holds_after_equilibrium(p in locking_params()) {
        prop_assume!(p.mf() >= 1.0);
        let traj = run_discrete_customers(&p, 2000).unwrap();
        let eq = detect_equilibrium(&traj);
        prop_assert!(eq.is_some(), "no equilibrium for {p:?}");
        let eq = eq.unwrap();
        prop_assert!(eq.locked && eq.identity_holds);
    }

    #[test]
    fn exits_are_fifo(p in locking_params()) {
        let traj = run_discrete_customers(&p, 300).unwrap();
        let j = traj.exits();
        prop_assert!(j.windows(2).all(|w| w[1] > w[0]));
        prop_assert!(traj.departed().iter().enumerate().all(|(i, &k)| k < i + 1));
    }
}
