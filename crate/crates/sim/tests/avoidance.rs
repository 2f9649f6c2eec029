use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use storeflow_sim::geometry::Point;
use storeflow_sim::{classify, ActionKind, AvoidanceTable, Quadrant, SimConfig, SimError};

fn frequencies(table: &AvoidanceTable, q: Quadrant, seed: u64) -> [f64; 4] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 100_000;
    let mut counts = [0u32; 4];
    for _ in 0..n {
        let drawn = table.draw(q, &mut rng);
        let k = ActionKind::ALL.iter().position(|&a| a == drawn).unwrap();
        counts[k] += 1;
    }
    counts.map(|c| c as f64 / n as f64)
}

#[test]
fn draws_match_every_row() {
    for table in [AvoidanceTable::default(), AvoidanceTable::calibrated()] {
        for (i, q) in Quadrant::ALL.into_iter().enumerate() {
            let freq = frequencies(&table, q, 100 + i as u64);
            for (f, p) in freq.iter().zip(table.row(q)) {
                assert!((f - p).abs() < 0.01, "{q:?}: {freq:?} vs {:?}", table.row(q));
            }
        }
    }
}

#[test]
fn shipped_tables_are_row_stochastic() {
    AvoidanceTable::default().validate().unwrap();
    AvoidanceTable::calibrated().validate().unwrap();
}

#[test]
fn bad_rows_are_rejected() {
    let mut config = SimConfig::new(60.0);
    config.avoidance_table.rows[2] = [0.5, 0.5, 0.5, 0.0];
    assert!(matches!(config.validate(), Err(SimError::Config(_))));
    config.avoidance_table.rows[2] = [1.2, -0.2, 0.0, 0.0];
    assert!(matches!(config.validate(), Err(SimError::Config(_))));
}

#[test]
fn quadrant_follows_the_other_heading() {
    let me = Point::new(5.0, 5.0);
    let other = Point::new(5.0, 8.0);
    assert_eq!(classify(me, other, Some(Point::new(0.0, 1.0))), Quadrant::Away);
    assert_eq!(classify(me, other, Some(Point::new(0.0, -1.0))), Quadrant::HeadOn);
    // Axis points north, so a westward walker crosses to my left.
    assert_eq!(classify(me, other, Some(Point::new(-1.0, 0.0))), Quadrant::CrossingLeft);
    assert_eq!(classify(me, other, Some(Point::new(1.0, 0.0))), Quadrant::CrossingRight);
    assert_eq!(classify(me, other, None), Quadrant::HeadOn);
}
