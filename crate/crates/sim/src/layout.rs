//! Store floor: outer walls, a central display and two doors.

use crate::geometry::{Point, Rect, Segment, EPS};
use crate::SimError;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoreLayout {
    pub width: f64,
    pub depth: f64,
    pub display: Rect,
    pub entrance: Point,
    pub exit: Point,
}

impl Default for StoreLayout {
    /// 30 m square with a centred 10 m display; entrance mid south wall and
    /// exit 5 m east of it.
    fn default() -> Self {
        Self::centered(30.0, 30.0, 10.0, 10.0)
    }
}

impl StoreLayout {
    pub fn centered(width: f64, depth: f64, display_width: f64, display_depth: f64) -> Self {
        let cx = width / 2.0;
        let cy = depth / 2.0;
        Self {
            width,
            depth,
            display: Rect::new(
                Point::new(cx - display_width / 2.0, cy - display_depth / 2.0),
                Point::new(cx + display_width / 2.0, cy + display_depth / 2.0),
            ),
            entrance: Point::new(cx, 0.0),
            exit: Point::new(cx + 5.0, 0.0),
        }
    }

    pub fn store(&self) -> Rect {
        Rect::new(Point::new(0.0, 0.0), Point::new(self.width, self.depth))
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let store = self.store();
        if !(self.width > 0.0 && self.depth > 0.0) {
            return Err(SimError::Layout("store has no area".into()));
        }
        let d = &self.display;
        if !(d.width() > 0.0 && d.height() > 0.0) {
            return Err(SimError::Layout("display has no area".into()));
        }
        if !(store.contains_strictly(d.min) && store.contains_strictly(d.max)) {
            return Err(SimError::Layout("display must lie strictly inside the store".into()));
        }
        for (name, p) in [("entrance", self.entrance), ("exit", self.exit)] {
            if !self.on_boundary(p) {
                return Err(SimError::Layout(format!("{name} is not on the store boundary")));
            }
        }
        Ok(())
    }

    fn on_boundary(&self, p: Point) -> bool {
        self.store().contains(p)
            && (p.x.abs() < EPS
                || p.y.abs() < EPS
                || (p.x - self.width).abs() < EPS
                || (p.y - self.depth).abs() < EPS)
    }

    /// The four walls followed by the four display edges.
    pub fn shoppable_segments(&self) -> [Segment; 8] {
        let w = self.store().edges();
        let d = self.display.edges();
        [w[0], w[1], w[2], w[3], d[0], d[1], d[2], d[3]]
    }

    pub fn shoppable_length(&self) -> f64 {
        self.shoppable_segments().iter().map(Segment::len).sum()
    }

    /// Point at arc length `s` along the shoppable segments taken in order.
    pub fn point_at(&self, mut s: f64) -> Point {
        let segs = self.shoppable_segments();
        for seg in &segs {
            let len = seg.len();
            if s <= len {
                return seg.at(s / len);
            }
            s -= len;
        }
        segs[7].b
    }

    /// Inside the store and not inside the display.
    pub fn walkable(&self, p: Point) -> bool {
        self.store().contains(p) && !self.display.contains_strictly(p)
    }

    pub fn visible(&self, a: Point, b: Point) -> bool {
        !self.display.blocks(a, b)
    }

    /// A straight move that stays on the floor.
    pub fn can_step(&self, a: Point, b: Point) -> bool {
        self.walkable(b) && self.visible(a, b)
    }
}
