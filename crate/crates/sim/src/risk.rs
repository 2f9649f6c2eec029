//! Per-customer risk lists: for every pair, the earliest tick at which the
//! two could come within the social distance, kept in sorted singly linked
//! lists so each customer only looks at the pairs that are due.

use crate::SimError;

/// Risk time of a departed peer.
pub const TOMBSTONE: u64 = 1_000_000;

const NIL: usize = usize::MAX;

#[derive(Debug, Clone, Default)]
pub struct RiskSchedule {
    /// `risk[x][y]`, [`TOMBSTONE`] when `y` is not in `x`'s list.
    risk: Vec<Vec<u64>>,
    /// `next[x][y]`: the peer after `y` in `x`'s list.
    next: Vec<Vec<usize>>,
    /// `s(X)`.
    head: Vec<usize>,
}

impl RiskSchedule {
    pub fn new() -> Self {
        Self::default()
    }

    /// Makes room for customer ids up to `id`.
    pub fn reserve(&mut self, id: usize) {
        while self.head.len() <= id {
            self.head.push(NIL);
            self.risk.push(Vec::new());
            self.next.push(Vec::new());
        }
        let n = self.head.len();
        for x in 0..n {
            self.risk[x].resize(n, TOMBSTONE);
            self.next[x].resize(n, NIL);
        }
    }

    pub fn risk_time(&self, x: usize, y: usize) -> u64 {
        self.risk[x][y]
    }

    /// `r(X)`: earliest risk time in `x`'s list.
    pub fn earliest(&self, x: usize) -> u64 {
        match self.head[x] {
            NIL => TOMBSTONE,
            s => self.risk[x][s],
        }
    }

    /// `s(X)`: the peer holding the earliest risk time.
    pub fn earliest_peer(&self, x: usize) -> Option<usize> {
        (self.head[x] != NIL).then_some(self.head[x])
    }

    fn key(&self, x: usize, y: usize) -> (u64, usize) {
        (self.risk[x][y], y)
    }

    fn unlink(&mut self, x: usize, y: usize) -> Result<(), SimError> {
        if self.risk[x][y] == TOMBSTONE {
            return Ok(());
        }
        let limit = self.head.len();
        let mut prev = NIL;
        let mut cur = self.head[x];
        for _ in 0..=limit {
            if cur == NIL {
                return Err(SimError::ScheduleCorrupted { customer: x });
            }
            if cur == y {
                let after = self.next[x][y];
                if prev == NIL {
                    self.head[x] = after;
                } else {
                    self.next[x][prev] = after;
                }
                self.next[x][y] = NIL;
                self.risk[x][y] = TOMBSTONE;
                return Ok(());
            }
            prev = cur;
            cur = self.next[x][cur];
        }
        Err(SimError::ScheduleCorrupted { customer: x })
    }

    fn link(&mut self, x: usize, y: usize, due: u64) -> Result<(), SimError> {
        self.risk[x][y] = due.min(TOMBSTONE - 1);
        let key = self.key(x, y);
        let limit = self.head.len();
        let mut prev = NIL;
        let mut cur = self.head[x];
        for _ in 0..=limit {
            if cur == NIL || self.key(x, cur) > key {
                self.next[x][y] = cur;
                if prev == NIL {
                    self.head[x] = y;
                } else {
                    self.next[x][prev] = y;
                }
                return Ok(());
            }
            prev = cur;
            cur = self.next[x][cur];
        }
        Err(SimError::ScheduleCorrupted { customer: x })
    }

    /// Sets the shared risk time of `x` and `y` in both lists.
    pub fn set_pair(&mut self, x: usize, y: usize, due: u64) -> Result<(), SimError> {
        for (a, b) in [(x, y), (y, x)] {
            self.unlink(a, b)?;
            self.link(a, b, due)?;
        }
        Ok(())
    }

    /// Drops `x` from every list, leaving tombstones behind.
    pub fn remove(&mut self, x: usize) -> Result<(), SimError> {
        for y in self.peers(x)? {
            self.unlink(y, x)?;
            self.unlink(x, y)?;
        }
        Ok(())
    }

    /// `x`'s list from `s(X)` on.
    pub fn peers(&self, x: usize) -> Result<Vec<usize>, SimError> {
        self.walk(x, u64::MAX)
    }

    /// Peers whose risk time is at most `tick`, earliest first.
    pub fn due(&self, x: usize, tick: u64) -> Result<Vec<usize>, SimError> {
        self.walk(x, tick)
    }

    fn walk(&self, x: usize, upto: u64) -> Result<Vec<usize>, SimError> {
        let mut out = Vec::new();
        let mut cur = self.head[x];
        while cur != NIL && self.risk[x][cur] <= upto {
            if out.len() >= self.head.len() {
                return Err(SimError::ScheduleCorrupted { customer: x });
            }
            out.push(cur);
            cur = self.next[x][cur];
        }
        Ok(out)
    }
}

/// Safe single steps before a pair at distance `d` can breach `sd`, with
/// each party covering at most `step` per tick.
fn safe_steps(d: f64, sd: f64, step: f64) -> u64 {
    ((d - sd) / step).floor().max(0.0) as u64
}

/// Due tick for a pair measured at the start of `tick`, before anyone has
/// moved in it.
pub fn due_before_moves(tick: u64, d: f64, sd: f64, step: f64) -> u64 {
    due_tick(tick, d, sd, step, 2, 0)
}

/// Due tick for a pair measured right after one of them moved in `tick`;
/// the other may still move in it.
pub fn due_after_move(tick: u64, d: f64, sd: f64, step: f64) -> u64 {
    due_tick(tick, d, sd, step, 1, 0)
}

/// Latest tick at which the pair must be looked at again, given the steps
/// the two may still take in `tick` and the number of ticks right after it
/// in which only one of them can move.
pub fn due_tick(tick: u64, d: f64, sd: f64, step: f64, now: u64, single: u64) -> u64 {
    let Some(units) = safe_steps(d, sd, step).checked_sub(now) else {
        return tick;
    };
    if units <= single {
        tick + 1 + units
    } else {
        tick + 1 + single + (units - single) / 2
    }
}

/// Risk time in seconds as `max(0, (d − sd)/(2v))`.
pub fn risk_time(d: f64, sd: f64, speed: f64) -> f64 {
    ((d - sd) / (2.0 * speed)).max(0.0)
}

/// The printed variant `d/(2v) − sd`, which mixes seconds and metres.
pub fn risk_time_literal(d: f64, sd: f64, speed: f64) -> f64 {
    d / (2.0 * speed) - sd
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_metres_apart() {
        assert!((risk_time(10.0, 2.0, 0.3) - 13.333_333).abs() < 1e-5);
        assert!((risk_time_literal(10.0, 2.0, 0.3) - 14.666_667).abs() < 1e-5);
        assert_eq!(risk_time(2.0, 2.0, 0.3), 0.0);
    }

    #[test]
    fn due_ticks_are_conservative() {
        // 26 safe steps: both may step from the start of tick 0, so 13 ticks
        // use all of them and the check falls on tick 13.
        assert_eq!(due_before_moves(0, 2.0 + 26.0 * 0.3 + 0.01, 2.0, 0.3), 13);
        // One party already moved: 13 ticks cost 26 steps plus one.
        assert_eq!(due_after_move(0, 2.0 + 26.0 * 0.3 + 0.01, 2.0, 0.3), 13);
        assert_eq!(due_after_move(0, 2.0 + 27.0 * 0.3 + 0.01, 2.0, 0.3), 14);
        assert_eq!(due_before_moves(5, 2.0, 2.0, 0.3), 5);
        assert_eq!(due_after_move(5, 2.0, 2.0, 0.3), 5);
    }

    #[test]
    fn a_still_party_halves_the_closing_speed() {
        let d = 2.0 + 10.0 * 0.3 + 0.01;
        // One mover for the next 14 ticks: one step per tick.
        assert_eq!(due_tick(0, d, 2.0, 0.3, 0, 14), 11);
        assert_eq!(due_tick(0, d, 2.0, 0.3, 1, 14), 10);
        // Nobody else moves this tick, both walk afterwards.
        assert_eq!(due_tick(0, d, 2.0, 0.3, 0, 0), 6);
        assert_eq!(due_after_move(0, d, 2.0, 0.3), 5);
        // One mover for three ticks, then both.
        assert_eq!(due_tick(0, d, 2.0, 0.3, 0, 3), 7);
    }

    #[test]
    fn empty_store_has_tombstone() {
        let mut s = RiskSchedule::new();
        s.reserve(0);
        assert_eq!(s.earliest(0), TOMBSTONE);
        assert_eq!(s.earliest_peer(0), None);
    }

    #[test]
    fn lists_stay_sorted_and_complete() {
        let mut s = RiskSchedule::new();
        s.reserve(4);
        s.set_pair(0, 1, 30).unwrap();
        s.set_pair(0, 2, 10).unwrap();
        s.set_pair(0, 3, 20).unwrap();
        s.set_pair(1, 2, 5).unwrap();
        assert_eq!(s.peers(0).unwrap(), vec![2, 3, 1]);
        assert_eq!(s.peers(1).unwrap(), vec![2, 0]);
        assert_eq!(s.earliest(0), 10);
        assert_eq!(s.earliest_peer(0), Some(2));
        s.set_pair(2, 0, 40).unwrap();
        assert_eq!(s.peers(0).unwrap(), vec![3, 1, 2]);
        assert_eq!(s.risk_time(2, 0), 40);
        assert_eq!(s.due(0, 30).unwrap(), vec![3, 1]);
        s.remove(3).unwrap();
        assert_eq!(s.peers(0).unwrap(), vec![1, 2]);
        assert_eq!(s.risk_time(0, 3), TOMBSTONE);
        assert!(s.peers(3).unwrap().is_empty());
    }

    #[test]
    fn equal_times_break_by_id() {
        let mut s = RiskSchedule::new();
        s.reserve(3);
        s.set_pair(0, 3, 7).unwrap();
        s.set_pair(0, 1, 7).unwrap();
        s.set_pair(0, 2, 7).unwrap();
        assert_eq!(s.peers(0).unwrap(), vec![1, 2, 3]);
    }
}
