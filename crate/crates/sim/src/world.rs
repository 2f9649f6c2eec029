//! The tick loop: admissions, sequential moves in entry order, avoidance,
//! freeze detection and bookkeeping.

use crate::config::{ActionKind, Quadrant, SimConfig};
use crate::customer::{spawn_customer, Customer, CustomerState, Goal};
use crate::geometry::{Point, EPS};
use crate::layout::StoreLayout;
use crate::record::{AvoidanceEvent, Freeze, FreezeKind, RunRecord, TraceRow, Visit};
use crate::risk::{self, RiskSchedule};
use crate::SimError;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// How a mover finds the peers it has to check.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum CollisionMode {
    /// Only peers whose risk time has come due.
    #[default]
    Scheduler,
    /// Every live peer, every move.
    Naive,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub mode: CollisionMode,
    /// Record positions every tick.
    pub trace: bool,
    /// Count scheduler misses and distance violations against all pairs.
    pub verify: bool,
    /// Use `d/(2v) − sd` seconds for risk times. Not a safe bound.
    pub literal_risk: bool,
}

/// Instrumentation kept outside the run record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunStats {
    pub distance_computations: u64,
    /// Live pairs summed over ticks.
    pub pair_ticks: u64,
    /// Conflicts a mover would have missed by checking only due peers.
    pub scheduler_misses: u64,
    /// Pairs closer than the social distance at the end of a tick.
    pub distance_violations: u64,
    pub min_pair_distance: f64,
}

impl Default for RunStats {
    fn default() -> Self {
        Self {
            distance_computations: 0,
            pair_ticks: 0,
            scheduler_misses: 0,
            distance_violations: 0,
            min_pair_distance: f64::INFINITY,
        }
    }
}

impl RunStats {
    /// Distance computations per live pair per tick.
    pub fn computation_ratio(&self) -> f64 {
        if self.pair_ticks == 0 {
            0.0
        } else {
            self.distance_computations as f64 / self.pair_ticks as f64
        }
    }
}

pub fn run_sim(layout: &StoreLayout, config: &SimConfig, seed: u64) -> Result<RunRecord, SimError> {
    run_sim_with(layout, config, seed, RunOptions::default()).map(|(record, _)| record)
}

pub fn run_sim_with(
    layout: &StoreLayout,
    config: &SimConfig,
    seed: u64,
    options: RunOptions,
) -> Result<(RunRecord, RunStats), SimError> {
    layout.validate()?;
    config.validate()?;
    let mut world = World::new(layout, config, seed, options);
    for t in 0..config.horizon_ticks() {
        world.tick(t)?;
        if world.record.freeze.is_some() {
            break;
        }
    }
    Ok(world.finish())
}

/// Which of four directions the other is moving in, seen along the axis
/// from `me` to them.
pub fn classify(me: Point, other: Point, other_heading: Option<Point>) -> Quadrant {
    let (Some(h), Some(axis)) = (other_heading, (other - me).unit()) else {
        return Quadrant::HeadOn;
    };
    let along = h.dot(axis);
    let across = h.dot(axis.left());
    if along >= across.abs() {
        Quadrant::Away
    } else if -along >= across.abs() {
        Quadrant::HeadOn
    } else if across > 0.0 {
        Quadrant::CrossingLeft
    } else {
        Quadrant::CrossingRight
    }
}

/// Draws a back-off depth in `1..=max` with weight `decay^s`.
pub fn draw_depth<R: Rng + ?Sized>(rng: &mut R, decay: f64, max: u32) -> u32 {
    let weights: Vec<f64> = (1..=max).map(|s| decay.powi(s as i32)).collect();
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (s, w) in (1..=max).zip(&weights) {
        if u < *w {
            return s;
        }
        u -= w;
    }
    max
}

struct World<'a> {
    layout: &'a StoreLayout,
    config: &'a SimConfig,
    options: RunOptions,
    rng: ChaCha8Rng,
    customers: Vec<Customer>,
    /// Placed customers in entry order.
    live: Vec<usize>,
    outside: Option<usize>,
    admitted: u64,
    schedule: RiskSchedule,
    stats: RunStats,
    record: RunRecord,
    credits: Vec<f64>,
    window_sum: f64,
    completed: u32,
}

impl<'a> World<'a> {
    fn new(layout: &'a StoreLayout, config: &'a SimConfig, seed: u64, options: RunOptions) -> Self {
        let mut record = RunRecord::empty(seed, config.clone(), layout.clone());
        if options.trace {
            record.trace = Some(Vec::new());
        }
        Self {
            layout,
            config,
            options,
            rng: ChaCha8Rng::seed_from_u64(seed),
            customers: Vec::new(),
            live: Vec::new(),
            outside: None,
            admitted: 0,
            schedule: RiskSchedule::new(),
            stats: RunStats::default(),
            record,
            credits: Vec::new(),
            window_sum: 0.0,
            completed: 0,
        }
    }

    fn finish(self) -> (RunRecord, RunStats) {
        (self.record, self.stats)
    }

    fn dist(&mut self, a: Point, b: Point) -> f64 {
        self.stats.distance_computations += 1;
        a.dist(b)
    }

    fn tick(&mut self, t: u64) -> Result<(), SimError> {
        self.credits.push(0.0);
        while self.config.entry_tick(self.admitted) <= t {
            if self.admitted > 0 && self.entrance_blocked(self.admitted as usize - 1) {
                self.freeze_at_entrance(t);
                self.record_tick(t);
                return Ok(());
            }
            let id = self.customers.len();
            let c = spawn_customer(&mut self.rng, self.layout, self.config, id, t);
            self.customers.push(c);
            self.outside = Some(id);
            self.admitted += 1;
        }
        if let Some(id) = self.outside {
            self.try_place(id, t)?;
        }
        for k in 0..self.live.len() {
            let id = self.live[k];
            if self.customers[id].is_live() {
                self.act(id, t)?;
            }
        }
        let customers = &self.customers;
        self.live.retain(|&id| customers[id].is_live());
        self.detect_stationary(t);
        self.record_tick(t);
        Ok(())
    }

    /// Where a customer is placed on admission.
    fn start_point(&self, id: usize) -> Point {
        let c = &self.customers[id];
        if self.config.start_at_first_item {
            c.items[c.first_item].position
        } else {
            self.layout.entrance
        }
    }

    /// The previous entrant is still outside or has not left its start.
    fn entrance_blocked(&self, prev: usize) -> bool {
        let c = &self.customers[prev];
        match c.state {
            CustomerState::Outside => true,
            CustomerState::Moving => c.position.dist(self.start_point(prev)) < EPS,
            _ => false,
        }
    }

    fn freeze_at_entrance(&mut self, t: u64) {
        let prev = self.admitted as usize - 1;
        let interval = (self.config.entry_interval / self.config.tick).round() as u64;
        let stuck = self
            .live
            .iter()
            .filter(|&&id| {
                let c = &self.customers[id];
                id != prev && c.state == CustomerState::Moving && t - c.stationary_since >= interval
            })
            .count();
        self.customers[prev].state = CustomerState::Frozen;
        self.record.freeze = Some(Freeze {
            kind: FreezeKind::Entrance,
            tick: t,
            customers: stuck as u32 + 1,
        });
    }

    /// Places the waiting entrant once a start spot is clear. Starting at
    /// an item, the spot is drawn uniformly among the entrant's clear items.
    fn try_place(&mut self, id: usize, t: u64) -> Result<(), SimError> {
        let sd = self.config.social_distance;
        // The first clear spot of a random order is uniform over clear spots.
        let spots: Vec<Option<usize>> = if self.config.start_at_first_item {
            let mut order: Vec<usize> = (0..self.customers[id].items.len()).collect();
            order.shuffle(&mut self.rng);
            order.into_iter().map(Some).collect()
        } else {
            vec![None]
        };
        let mut placed = None;
        for spot in spots {
            let p = match spot {
                Some(i) => self.customers[id].items[i].position,
                None => self.layout.entrance,
            };
            let mut distances = Vec::with_capacity(self.live.len());
            for k in 0..self.live.len() {
                let y = self.live[k];
                let d = self.dist(p, self.customers[y].position);
                if d < sd {
                    break;
                }
                distances.push((y, d));
            }
            if distances.len() == self.live.len() {
                placed = Some((spot, p, distances));
                break;
            }
        }
        let Some((spot, start, distances)) = placed else {
            return Ok(());
        };
        self.outside = None;
        {
            let c = &mut self.customers[id];
            if let Some(i) = spot {
                c.first_item = i;
                c.goal = Goal::Item(i);
            }
            c.state = CustomerState::Moving;
            c.entry_tick = Some(t);
            c.stationary_since = t;
            c.position = start;
        }
        self.live.push(id);
        self.record.entered += 1;
        if self.options.mode == CollisionMode::Scheduler {
            self.schedule.reserve(id);
            for (y, d) in distances {
                let due = self.due_tick(t, d, true, id, y);
                self.schedule.set_pair(id, y, due)?;
            }
        }
        Ok(())
    }

    /// Due tick for `me` and `peer` at distance `d`, measured in tick `t`
    /// either before anyone moved or right after `me` did.
    fn due_tick(&self, t: u64, d: f64, before_moves: bool, me: usize, peer: usize) -> u64 {
        let (sd, step) = (self.config.social_distance, self.config.step_length());
        if self.options.literal_risk {
            let secs = risk::risk_time_literal(d, sd, self.config.walking_speed).max(0.0);
            return t + (secs / self.config.tick).floor() as u64;
        }
        // A dwelling customer stays put through at least its next
        // `remaining - 1` ticks; one who has not acted yet also in this one.
        let still = |id: usize| match self.customers[id].state {
            CustomerState::Dwelling { remaining } => Some(remaining.saturating_sub(1)),
            _ => None,
        };
        let (mine, theirs) = (still(me), still(peer));
        let now = match (before_moves, mine.is_some(), theirs.is_some()) {
            (true, false, false) => 2,
            (true, _, _) => 1,
            (false, _, false) => 1,
            (false, _, true) => 0,
        };
        let single = mine.unwrap_or(0).max(theirs.unwrap_or(0));
        risk::due_tick(t, d, sd, step, now, single)
    }

    fn check_set(&self, id: usize, t: u64) -> Result<Vec<usize>, SimError> {
        match self.options.mode {
            CollisionMode::Scheduler => self.schedule.due(id, t),
            CollisionMode::Naive => Ok(self
                .live
                .iter()
                .copied()
                .filter(|&y| y != id && self.customers[y].is_live())
                .collect()),
        }
    }

    fn act(&mut self, id: usize, t: u64) -> Result<(), SimError> {
        if let CustomerState::Dwelling { remaining } = self.customers[id].state {
            if remaining > 1 {
                self.customers[id].state = CustomerState::Dwelling { remaining: remaining - 1 };
            } else {
                self.finish_item(id, t);
            }
            return Ok(());
        }
        let layout = self.layout;
        let step = self.config.step_length();
        let sd = self.config.social_distance;

        let c = &mut self.customers[id];
        if c.retreat.is_none() {
            c.refresh_via(layout);
        }
        let pos = c.position;
        let target = c.target(layout);
        if c.retreat.is_none() && pos.dist(target) < EPS {
            return self.arrive(id, t);
        }
        let (proposal, heading) = match c.retreat {
            Some((dir, _)) => (pos + dir * step, Some(dir)),
            None => {
                let to = target - pos;
                let unit = to.unit();
                if to.norm() <= step + EPS {
                    (target, unit)
                } else {
                    (pos + unit.expect("non-zero") * step, unit)
                }
            }
        };
        c.heading = heading;
        let retreating = c.retreat.is_some();

        let peers = self.check_set(id, t)?;
        let mut at_proposal = Vec::with_capacity(peers.len());
        let mut nearest: Option<(f64, usize)> = None;
        for &y in &peers {
            let d = self.dist(proposal, self.customers[y].position);
            at_proposal.push(d);
            if d < sd && nearest.is_none_or(|(nd, ny)| (d, y) < (nd, ny)) {
                nearest = Some((d, y));
            }
        }
        if self.options.verify {
            self.count_misses(id, proposal, &peers);
        }

        let new_pos = match nearest {
            None => {
                if let Some((dir, left)) = self.customers[id].retreat {
                    self.customers[id].retreat = (left > 1).then_some((dir, left - 1));
                }
                proposal
            }
            Some(_) if retreating => {
                let c = &mut self.customers[id];
                c.retreat = None;
                c.stats.wait += 1;
                pos
            }
            Some((_, other)) => self.avoid(id, t, pos, heading, other, &peers, proposal, &at_proposal),
        };

        let moved = new_pos.dist(pos) > 0.0;
        {
            let c = &mut self.customers[id];
            c.position = new_pos;
            if moved {
                c.stationary_since = t;
            }
        }
        if !retreating && new_pos == proposal && new_pos.dist(target) < EPS {
            self.customers[id].position = target;
            self.arrive(id, t)?;
        }
        if self.options.mode == CollisionMode::Scheduler && self.customers[id].is_live() {
            // Off the proposal, distances are bounded below from the proposal's.
            let shift = new_pos.dist(proposal);
            for (k, &y) in peers.iter().enumerate() {
                let d = (at_proposal[k] - shift).max(0.0);
                let due = self.due_tick(t, d, false, id, y);
                self.schedule.set_pair(id, y, due)?;
            }
        }
        Ok(())
    }

    fn count_misses(&mut self, id: usize, proposal: Point, peers: &[usize]) {
        let sd = self.config.social_distance;
        for &y in &self.live {
            if y != id
                && self.customers[y].is_live()
                && !peers.contains(&y)
                && proposal.dist(self.customers[y].position) < sd
            {
                self.stats.scheduler_misses += 1;
            }
        }
    }

    /// Picks and applies an avoidance move; returns the new position.
    #[allow(clippy::too_many_arguments)]
    fn avoid(
        &mut self,
        id: usize,
        t: u64,
        pos: Point,
        heading: Option<Point>,
        other: usize,
        peers: &[usize],
        proposal: Point,
        at_proposal: &[f64],
    ) -> Point {
        let other_c = &self.customers[other];
        let quadrant = classify(pos, other_c.position, other_c.heading);
        // Sides and back are taken relative to the axis toward the other.
        let forward = (other_c.position - pos).unit().or(heading).unwrap_or(Point::new(0.0, 1.0));
        let drawn = self.config.avoidance_table.draw(quadrant, &mut self.rng);
        let step = self.config.step_length();
        let (taken, new_pos, depth) = match drawn {
            ActionKind::Right | ActionKind::Left => {
                let side = if drawn == ActionKind::Right { forward.right() } else { forward.left() };
                let cand = pos + side * step;
                if self.layout.can_step(pos, cand) && self.clear_of(cand, peers, proposal, at_proposal) {
                    (drawn, cand, 0)
                } else {
                    (ActionKind::Wait, pos, 0)
                }
            }
            ActionKind::Back => {
                let back = forward * -1.0;
                let first = pos + back * step;
                let mut feasible = 0;
                if self.layout.can_step(pos, first) && self.clear_of(first, peers, proposal, at_proposal) {
                    feasible = 1;
                    let mut at = first;
                    while feasible < self.config.backstep_max_depth {
                        let next = at + back * step;
                        if !self.layout.can_step(at, next) {
                            break;
                        }
                        feasible += 1;
                        at = next;
                    }
                }
                if feasible == 0 {
                    (ActionKind::Wait, pos, 0)
                } else {
                    let s = draw_depth(&mut self.rng, self.config.backstep_decay, feasible);
                    if s > 1 {
                        self.customers[id].retreat = Some((back, s - 1));
                    }
                    (ActionKind::Back, first, s)
                }
            }
            ActionKind::Wait => (ActionKind::Wait, pos, 0),
        };
        let stats = &mut self.customers[id].stats;
        match taken {
            ActionKind::Right => stats.right += 1,
            ActionKind::Left => stats.left += 1,
            ActionKind::Back => stats.back += 1,
            ActionKind::Wait => stats.wait += 1,
        }
        self.record.avoidance.push(AvoidanceEvent {
            tick: t,
            customer: id,
            other,
            quadrant,
            drawn,
            taken,
            depth,
        });
        new_pos
    }

    /// Whether `p` keeps the social distance from every peer. `near` holds
    /// each peer's distance from `from`, which bounds its distance from `p`.
    fn clear_of(&mut self, p: Point, peers: &[usize], from: Point, near: &[f64]) -> bool {
        let sd = self.config.social_distance;
        let shift = p.dist(from);
        for (&y, &d) in peers.iter().zip(near) {
            if d - shift < sd && self.dist(p, self.customers[y].position) < sd {
                return false;
            }
        }
        true
    }

    fn arrive(&mut self, id: usize, t: u64) -> Result<(), SimError> {
        let layout = self.layout;
        let dwell = self.config.dwell_ticks();
        let c = &mut self.customers[id];
        if c.via.take().is_some() {
            return Ok(());
        }
        match c.goal {
            Goal::Item(_) => {
                c.state = CustomerState::Dwelling { remaining: dwell };
                c.heading = None;
            }
            Goal::Corner(_) => c.replan(layout),
            Goal::Exit => {
                c.state = CustomerState::Exited;
                c.exit_tick = Some(t);
                c.heading = None;
                let entry = c.entry_tick.expect("placed before leaving");
                let visit = Visit {
                    id,
                    entry_tick: entry,
                    exit_tick: t,
                    shopping_time: (t - entry) as f64 * self.config.tick,
                    items: c.items.len() as u32,
                    spend: c.spend_accrued,
                    stats: c.stats,
                };
                self.record.visits.push(visit);
                self.completed += 1;
                if self.options.mode == CollisionMode::Scheduler {
                    self.schedule.remove(id)?;
                }
            }
        }
        Ok(())
    }

    fn finish_item(&mut self, id: usize, t: u64) {
        let price = self.config.item_price;
        let c = &mut self.customers[id];
        if let Goal::Item(i) = c.goal {
            c.items[i].visited = true;
        }
        c.spend_accrued += price;
        c.state = CustomerState::Moving;
        c.stationary_since = t;
        c.replan(self.layout);
        self.credits[t as usize] += price;
    }

    fn detect_stationary(&mut self, t: u64) {
        let limit = self.config.freeze_ticks();
        let stuck: Vec<usize> = self
            .live
            .iter()
            .copied()
            .filter(|&id| {
                let c = &self.customers[id];
                c.state == CustomerState::Moving && t - c.stationary_since > limit
            })
            .collect();
        if stuck.is_empty() {
            return;
        }
        for &id in &stuck {
            self.customers[id].state = CustomerState::Frozen;
        }
        self.record.freeze = Some(Freeze {
            kind: FreezeKind::Stationary,
            tick: t,
            customers: stuck.len() as u32,
        });
    }

    fn record_tick(&mut self, t: u64) {
        let n = self.live.len() as u64;
        self.stats.pair_ticks += n * n.saturating_sub(1) / 2;
        if self.options.verify {
            let sd = self.config.social_distance;
            for (k, &a) in self.live.iter().enumerate() {
                for &b in &self.live[k + 1..] {
                    let d = self.customers[a].position.dist(self.customers[b].position);
                    self.stats.min_pair_distance = self.stats.min_pair_distance.min(d);
                    if d < sd {
                        self.stats.distance_violations += 1;
                    }
                }
            }
        }
        let window = self.config.window_ticks();
        self.window_sum += self.credits[t as usize];
        if t >= window {
            self.window_sum -= self.credits[(t - window) as usize];
        }
        let rate = self.window_sum.max(0.0) * 3600.0 / (window as f64 * self.config.tick);
        self.record.occupancy.push(self.live.len() as u32);
        self.record.completions.push(self.completed);
        self.record.spend_rate.push(rate);
        if let Some(trace) = self.record.trace.as_mut() {
            for &id in &self.live {
                let c = &self.customers[id];
                trace.push(TraceRow {
                    tick: t,
                    customer: id,
                    position: c.position,
                    state: c.state,
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::customer::ShoppingItem;

    #[test]
    fn nine_metres_take_thirty_ticks() {
        let layout = StoreLayout::default();
        let mut config = SimConfig::new(1e6);
        config.horizon = 100.0;
        let mut w = World::new(&layout, &config, 3, RunOptions::default());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut c = spawn_customer(&mut rng, &layout, &config, 0, 0);
        let (a, b) = (Point::new(0.0, 5.0), Point::new(0.0, 14.0));
        c.items = [a, b].map(|position| ShoppingItem { position, visited: false }).to_vec();
        w.customers.push(c);
        w.outside = Some(0);
        w.admitted = 1;
        let mut path = Vec::new();
        // Placed and arrived at tick 0, dwell done at 15, the walk, the dwell.
        for t in 0..61 {
            w.tick(t).unwrap();
            path.push(w.customers[0].position);
        }
        assert_eq!(path.windows(2).filter(|p| p[0] != p[1]).count(), 30);
        let end = *path.last().unwrap();
        assert!(end == a || end == b);
        assert_ne!(end, path[0]);
        assert_eq!(w.customers[0].remaining(), 0);
    }

    #[test]
    fn quadrants() {
        let me = Point::new(0.0, 0.0);
        let other = Point::new(5.0, 0.0);
        assert_eq!(classify(me, other, Some(Point::new(1.0, 0.0))), Quadrant::Away);
        assert_eq!(classify(me, other, Some(Point::new(-1.0, 0.0))), Quadrant::HeadOn);
        assert_eq!(classify(me, other, Some(Point::new(0.0, 1.0))), Quadrant::CrossingLeft);
        assert_eq!(classify(me, other, Some(Point::new(0.0, -1.0))), Quadrant::CrossingRight);
        assert_eq!(classify(me, other, None), Quadrant::HeadOn);
    }

    #[test]
    fn depth_draws_halve() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 200_000;
        let mut counts = [0u32; 4];
        for _ in 0..n {
            counts[draw_depth(&mut rng, 0.5, 3) as usize] += 1;
        }
        // Weights 1/2, 1/4, 1/8 renormalised.
        for (s, expect) in [(1, 4.0 / 7.0), (2, 2.0 / 7.0), (3, 1.0 / 7.0)] {
            assert!((counts[s] as f64 / n as f64 - expect).abs() < 0.01);
        }
    }
}
