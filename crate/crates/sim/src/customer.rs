//! Shoppers, their lists and route choice.

use crate::config::SimConfig;
use crate::geometry::{Point, EPS};
use crate::layout::StoreLayout;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShoppingItem {
    pub position: Point,
    pub visited: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CustomerState {
    /// Admitted but held outside while the entrance is crowded.
    Outside,
    Moving,
    Dwelling { remaining: u64 },
    Exited,
    Frozen,
}

/// Where the customer is ultimately heading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Goal {
    Item(usize),
    /// Display corner used when no item is in sight.
    Corner(Point),
    Exit,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathStats {
    pub right: u32,
    pub left: u32,
    pub back: u32,
    pub wait: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Customer {
    pub id: usize,
    pub scheduled_tick: u64,
    /// Tick at which the customer was placed in the store.
    pub entry_tick: Option<u64>,
    pub exit_tick: Option<u64>,
    pub items: Vec<ShoppingItem>,
    pub first_item: usize,
    pub position: Point,
    pub state: CustomerState,
    pub goal: Goal,
    /// Display corner on the way to an obscured goal.
    pub via: Option<Point>,
    /// Unit direction of the latest intended step.
    pub heading: Option<Point>,
    pub stationary_since: u64,
    pub spend_accrued: f64,
    pub stats: PathStats,
    /// Unit direction and steps still to take of a back-off.
    pub retreat: Option<(Point, u32)>,
}

impl Customer {
    pub fn is_live(&self) -> bool {
        matches!(self.state, CustomerState::Moving | CustomerState::Dwelling { .. })
    }

    pub fn is_dwelling(&self) -> bool {
        matches!(self.state, CustomerState::Dwelling { .. })
    }

    pub fn remaining(&self) -> usize {
        self.items.iter().filter(|i| !i.visited).count()
    }

    pub fn goal_point(&self, layout: &StoreLayout) -> Point {
        match self.goal {
            Goal::Item(i) => self.items[i].position,
            Goal::Corner(c) => c,
            Goal::Exit => layout.exit,
        }
    }

    /// The point walked toward this tick.
    pub fn target(&self, layout: &StoreLayout) -> Point {
        self.via.unwrap_or_else(|| self.goal_point(layout))
    }

    /// Keeps the detour consistent with the current position: drop it once
    /// the goal is in sight, pick a new one if the goal or detour is hidden.
    pub fn refresh_via(&mut self, layout: &StoreLayout) {
        let goal = self.goal_point(layout);
        if layout.visible(self.position, goal) {
            self.via = None;
        } else if self.via.is_none_or(|v| !layout.visible(self.position, v) || v.dist(self.position) < EPS) {
            self.via = best_corner(self.position, &[goal], layout);
        }
    }

    /// Picks the next goal once an item is done or a corner is reached.
    pub fn replan(&mut self, layout: &StoreLayout) {
        self.via = None;
        let remaining: Vec<(usize, Point)> = self
            .items
            .iter()
            .enumerate()
            .filter(|(_, it)| !it.visited)
            .map(|(i, it)| (i, it.position))
            .collect();
        self.goal = match plan_next_target(self.position, &remaining, layout) {
            Some(Target::Item(i)) => Goal::Item(i),
            Some(Target::Waypoint(c)) => Goal::Corner(c),
            None => Goal::Exit,
        };
        if self.goal == Goal::Exit {
            self.refresh_via(layout);
        }
    }
}

/// Next destination chosen from the unvisited items.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Target {
    Item(usize),
    Waypoint(Point),
}

/// Nearest unvisited item in line of sight. With none in sight, the display
/// corner in sight that minimises the walk to it plus the straight distance
/// on to the closest remaining item. `None` when nothing is left.
pub fn plan_next_target(from: Point, remaining: &[(usize, Point)], layout: &StoreLayout) -> Option<Target> {
    if remaining.is_empty() {
        return None;
    }
    let visible = remaining
        .iter()
        .filter(|(_, p)| layout.visible(from, *p))
        .min_by(|a, b| from.dist(a.1).total_cmp(&from.dist(b.1)).then(a.0.cmp(&b.0)));
    if let Some(&(i, _)) = visible {
        return Some(Target::Item(i));
    }
    let points: Vec<Point> = remaining.iter().map(|r| r.1).collect();
    best_corner(from, &points, layout).map(Target::Waypoint)
}

/// Visible display corner, other than the current spot, minimising the
/// distance to it plus the distance on to the nearest of `toward`.
pub fn best_corner(from: Point, toward: &[Point], layout: &StoreLayout) -> Option<Point> {
    let onward = |c: Point| toward.iter().map(|p| c.dist(*p)).fold(f64::INFINITY, f64::min);
    layout
        .display
        .corners()
        .into_iter()
        .filter(|&c| c.dist(from) > EPS && layout.visible(from, c))
        .map(|c| (from.dist(c) + onward(c), c))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, c)| c)
}

/// Draws a list length from the configured normal, rounded, at least one.
pub fn draw_list_length<R: Rng + ?Sized>(rng: &mut R, config: &SimConfig) -> usize {
    let raw = if config.list_length_variance > 0.0 {
        Normal::new(config.list_length_mean, config.list_length_variance.sqrt())
            .expect("validated normal parameters")
            .sample(rng)
    } else {
        config.list_length_mean
    };
    (raw.round() as i64).max(1) as usize
}

/// New customer at the entrance with a random list and a random forced
/// first item.
pub fn spawn_customer<R: Rng + ?Sized>(
    rng: &mut R,
    layout: &StoreLayout,
    config: &SimConfig,
    id: usize,
    scheduled_tick: u64,
) -> Customer {
    let n = draw_list_length(rng, config);
    let total = layout.shoppable_length();
    let items: Vec<ShoppingItem> = (0..n)
        .map(|_| ShoppingItem {
            position: layout.point_at(rng.random::<f64>() * total),
            visited: false,
        })
        .collect();
    let first_item = rng.random_range(0..n);
    Customer {
        id,
        scheduled_tick,
        entry_tick: None,
        exit_tick: None,
        items,
        first_item,
        position: layout.entrance,
        state: CustomerState::Outside,
        goal: Goal::Item(first_item),
        via: None,
        heading: None,
        stationary_since: scheduled_tick,
        spend_accrued: 0.0,
        stats: PathStats::default(),
        retreat: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn layout() -> StoreLayout {
        StoreLayout::default()
    }

    #[test]
    fn occluded_items_route_via_nearest_corner() {
        let l = layout();
        let from = Point::new(15.0, 0.0);
        let remaining = [(0, Point::new(12.0, 30.0)), (1, Point::new(14.0, 30.0))];
        assert_eq!(
            plan_next_target(from, &remaining, &l),
            Some(Target::Waypoint(Point::new(10.0, 10.0)))
        );
    }

    #[test]
    fn visible_beats_closer_occluded() {
        let l = layout();
        let from = Point::new(15.0, 9.0);
        // (15, 21) is 12 m away behind the display; (0, 0) is 17.5 m and clear.
        let remaining = [(0, Point::new(15.0, 21.0)), (1, Point::new(0.0, 0.0))];
        assert_eq!(plan_next_target(from, &remaining, &l), Some(Target::Item(1)));
    }

    #[test]
    fn item_on_a_corner_is_seen_past_the_corner() {
        let l = layout();
        let corner = Point::new(10.0, 20.0);
        // The sight line only touches the display at the item itself.
        assert_eq!(plan_next_target(Point::new(0.0, 30.0), &[(4, corner)], &l), Some(Target::Item(4)));
        assert_eq!(plan_next_target(Point::new(10.0, 0.0), &[(4, corner)], &l), Some(Target::Item(4)));
        // From across the diagonal it is hidden and reached via a neighbour.
        let via = plan_next_target(Point::new(25.0, 5.0), &[(4, corner)], &l);
        assert_eq!(via, Some(Target::Waypoint(Point::new(20.0, 10.0))));
    }

    #[test]
    fn zero_variance_lists_have_mean_length() {
        let mut c = SimConfig::new(60.0);
        c.list_length_variance = 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for id in 0..50 {
            assert_eq!(spawn_customer(&mut rng, &layout(), &c, id, 0).items.len(), 15);
        }
    }

    #[test]
    fn spawned_items_lie_on_shoppable_segments() {
        let l = layout();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c = spawn_customer(&mut rng, &l, &SimConfig::new(60.0), 0, 0);
        for it in &c.items {
            let p = it.position;
            let on_wall = p.x == 0.0 || p.y == 0.0 || p.x == 30.0 || p.y == 30.0;
            let on_display = (10.0..=20.0).contains(&p.x) && (10.0..=20.0).contains(&p.y);
            assert!(on_wall || on_display);
            assert!(l.walkable(p));
        }
        assert!(c.first_item < c.items.len());
        assert_eq!(c.position, l.entrance);
    }
}
