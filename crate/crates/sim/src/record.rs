use crate::config::{ActionKind, Quadrant, SimConfig};
use crate::customer::{CustomerState, PathStats};
use crate::geometry::Point;
use crate::layout::StoreLayout;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FreezeKind {
    /// A walking customer stood still past the threshold.
    Stationary,
    /// The latest entrant had not left the entrance when the next was due.
    Entrance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Freeze {
    pub kind: FreezeKind,
    pub tick: u64,
    /// Walking customers that had not moved for the threshold (entrance
    /// freezes also count the blocked entrant).
    pub customers: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AvoidanceEvent {
    pub tick: u64,
    pub customer: usize,
    pub other: usize,
    pub quadrant: Quadrant,
    pub drawn: ActionKind,
    /// What was done after the geometry and distance checks.
    pub taken: ActionKind,
    /// Back-off depth, 0 unless backing off.
    pub depth: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Visit {
    pub id: usize,
    pub entry_tick: u64,
    pub exit_tick: u64,
    pub shopping_time: f64,
    pub items: u32,
    pub spend: f64,
    pub stats: PathStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub tick: u64,
    pub customer: usize,
    pub position: Point,
    pub state: CustomerState,
}

/// Everything a run produces. Series hold the state after each tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub config: SimConfig,
    pub layout: StoreLayout,
    pub occupancy: Vec<u32>,
    pub completions: Vec<u32>,
    /// Item credits over the trailing window, per hour.
    pub spend_rate: Vec<f64>,
    pub entered: u32,
    /// Completed visits in exit order.
    pub visits: Vec<Visit>,
    pub freeze: Option<Freeze>,
    pub avoidance: Vec<AvoidanceEvent>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace: Option<Vec<TraceRow>>,
}

impl RunRecord {
    pub fn empty(seed: u64, config: SimConfig, layout: StoreLayout) -> Self {
        Self {
            seed,
            config,
            layout,
            occupancy: Vec::new(),
            completions: Vec::new(),
            spend_rate: Vec::new(),
            entered: 0,
            visits: Vec::new(),
            freeze: None,
            avoidance: Vec::new(),
            trace: None,
        }
    }

    pub fn ticks(&self) -> usize {
        self.occupancy.len()
    }

    pub fn froze(&self) -> bool {
        self.freeze.is_some()
    }

    pub fn final_completions(&self) -> u32 {
        self.completions.last().copied().unwrap_or(0)
    }

    /// Mean shopping time of completed visits, seconds.
    pub fn mean_shopping_time(&self) -> Option<f64> {
        (!self.visits.is_empty())
            .then(|| self.visits.iter().map(|v| v.shopping_time).sum::<f64>() / self.visits.len() as f64)
    }

    /// Whether some customer left before an earlier entrant.
    pub fn has_order_inversion(&self) -> bool {
        self.visits.windows(2).any(|w| w[1].id < w[0].id)
    }

    /// Canonical bytes for identity comparisons.
    pub fn to_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("run records serialize")
    }

    pub fn totals(&self) -> PathStats {
        self.visits.iter().fold(PathStats::default(), |mut acc, v| {
            acc.right += v.stats.right;
            acc.left += v.stats.left;
            acc.back += v.stats.back;
            acc.wait += v.stats.wait;
            acc
        })
    }
}
