use crate::SimError;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Where the other customer is heading, relative to the axis from me to
/// them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quadrant {
    Away,
    CrossingLeft,
    CrossingRight,
    /// Coming toward me, or standing still.
    HeadOn,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [
        Quadrant::Away,
        Quadrant::CrossingLeft,
        Quadrant::CrossingRight,
        Quadrant::HeadOn,
    ];

    fn index(self) -> usize {
        self as usize
    }
}

/// Avoidance move kinds, in table column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActionKind {
    Right,
    Left,
    Back,
    Wait,
}

impl ActionKind {
    pub const ALL: [ActionKind; 4] = [ActionKind::Right, ActionKind::Left, ActionKind::Back, ActionKind::Wait];
}

/// Row-stochastic table of action probabilities per quadrant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvoidanceTable {
    /// Rows in [`Quadrant::ALL`] order, columns R, L, B, W.
    pub rows: [[f64; 4]; 4],
}

impl Default for AvoidanceTable {
    /// Invented defaults: step aside from crossers, back off from
    /// oncoming customers, mostly wait behind those walking away.
    fn default() -> Self {
        Self {
            rows: [
                [0.2, 0.2, 0.1, 0.5],
                [0.5, 0.1, 0.2, 0.2],
                [0.1, 0.5, 0.2, 0.2],
                [0.25, 0.25, 0.3, 0.2],
            ],
        }
    }
}

impl AvoidanceTable {
    /// Rows tuned by sweeping: most runs freeze at 28 s, none from 45 s up.
    pub fn calibrated() -> Self {
        Self {
            rows: [
                [0.38, 0.2, 0.39, 0.03],
                [0.24, 0.06, 0.66, 0.04],
                [0.03, 0.14, 0.76, 0.07],
                [0.28, 0.17, 0.36, 0.19],
            ],
        }
    }

    pub fn row(&self, q: Quadrant) -> [f64; 4] {
        self.rows[q.index()]
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for (q, row) in Quadrant::ALL.iter().zip(&self.rows) {
            if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(SimError::Config(format!("avoidance row {q:?} has a value outside [0, 1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(SimError::Config(format!("avoidance row {q:?} sums to {sum}")));
            }
        }
        Ok(())
    }

    pub fn draw<R: Rng + ?Sized>(&self, q: Quadrant, rng: &mut R) -> ActionKind {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (kind, p) in ActionKind::ALL.iter().zip(self.row(q)) {
            acc += p;
            if u < acc {
                return *kind;
            }
        }
        ActionKind::Wait
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// m/s.
    pub walking_speed: f64,
    /// Seconds at each shopping point.
    pub dwell_time: f64,
    /// Metres.
    pub social_distance: f64,
    pub list_length_mean: f64,
    pub list_length_variance: f64,
    /// Seconds between admissions.
    pub entry_interval: f64,
    pub avoidance_table: AvoidanceTable,
    /// A back-off of `s` steps has weight `backstep_decay^s`.
    pub backstep_decay: f64,
    pub backstep_max_depth: u32,
    /// Place entrants at their forced first item instead of the entrance.
    pub start_at_first_item: bool,
    /// Seconds a walking customer may stay put before the store counts as
    /// frozen.
    pub freeze_stationary_threshold: f64,
    pub horizon: f64,
    pub tick: f64,
    /// Credited when an item's dwell completes.
    pub item_price: f64,
    /// Width of the sliding window for the spending-rate series, seconds.
    pub spend_window: f64,
}

/// Budget per customer used for the default item price.
pub const DEFAULT_BUDGET: f64 = 0.148;

impl SimConfig {
    pub fn new(entry_interval: f64) -> Self {
        Self {
            walking_speed: 0.3,
            dwell_time: 15.0,
            social_distance: 2.0,
            list_length_mean: 15.0,
            list_length_variance: 2.0,
            entry_interval,
            avoidance_table: AvoidanceTable::default(),
            backstep_decay: 0.5,
            backstep_max_depth: 10,
            start_at_first_item: true,
            freeze_stationary_threshold: 200.0,
            horizon: 3600.0,
            tick: 1.0,
            item_price: DEFAULT_BUDGET / 15.0,
            spend_window: 60.0,
        }
    }

    /// Sets the per-item price from a total budget.
    pub fn with_budget(mut self, budget: f64) -> Self {
        self.item_price = budget / self.list_length_mean;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let positive = [
            ("walking_speed", self.walking_speed),
            ("dwell_time", self.dwell_time),
            ("social_distance", self.social_distance),
            ("list_length_mean", self.list_length_mean),
            ("entry_interval", self.entry_interval),
            ("freeze_stationary_threshold", self.freeze_stationary_threshold),
            ("tick", self.tick),
            ("spend_window", self.spend_window),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SimError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("list_length_variance", self.list_length_variance),
            ("horizon", self.horizon),
            ("item_price", self.item_price),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(SimError::Config(format!("{name} must be non-negative, got {v}")));
            }
        }
        if !(self.backstep_decay > 0.0 && self.backstep_decay < 1.0) {
            return Err(SimError::Config(format!("backstep_decay must lie in (0, 1), got {}", self.backstep_decay)));
        }
        if self.backstep_max_depth == 0 {
            return Err(SimError::Config("backstep_max_depth must be at least 1".into()));
        }
        self.avoidance_table.validate()
    }

    /// Distance covered in one tick.
    pub fn step_length(&self) -> f64 {
        self.walking_speed * self.tick
    }

    pub fn horizon_ticks(&self) -> u64 {
        (self.horizon / self.tick).round() as u64
    }

    pub fn dwell_ticks(&self) -> u64 {
        ((self.dwell_time / self.tick).round() as u64).max(1)
    }

    pub fn freeze_ticks(&self) -> u64 {
        (self.freeze_stationary_threshold / self.tick).round() as u64
    }

    pub fn window_ticks(&self) -> u64 {
        ((self.spend_window / self.tick).round() as u64).max(1)
    }

    /// Tick at which customer `k` (from 0) is due to enter.
    pub fn entry_tick(&self, k: u64) -> u64 {
        (k as f64 * self.entry_interval / self.tick - 1e-9).ceil().max(0.0) as u64
    }
}
