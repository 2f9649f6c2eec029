//! Plane geometry for the store floor.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

/// Positions closer than this are treated as equal.
pub const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    /// Unit vector, or `None` for a (near) zero vector.
    pub fn unit(self) -> Option<Point> {
        let n = self.norm();
        (n > EPS).then(|| self * (1.0 / n))
    }

    /// Rotated a quarter turn counter-clockwise.
    pub fn left(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn right(self) -> Point {
        Point::new(self.y, -self.x)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn len(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn at(&self, s: f64) -> Point {
        self.a + (self.b - self.a) * s
    }
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn new(min: Point, max: Point) -> Self {
        Self { min, max }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    /// Inside or on the boundary, with tolerance.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x - EPS && p.x <= self.max.x + EPS && p.y >= self.min.y - EPS && p.y <= self.max.y + EPS
    }

    /// Strictly inside, by more than the tolerance.
    pub fn contains_strictly(&self, p: Point) -> bool {
        p.x > self.min.x + EPS && p.x < self.max.x - EPS && p.y > self.min.y + EPS && p.y < self.max.y - EPS
    }

    /// Corners counter-clockwise from the lower left.
    pub fn corners(&self) -> [Point; 4] {
        [
            self.min,
            Point::new(self.max.x, self.min.y),
            self.max,
            Point::new(self.min.x, self.max.y),
        ]
    }

    /// Edges counter-clockwise from the bottom.
    pub fn edges(&self) -> [Segment; 4] {
        let c = self.corners();
        [
            Segment { a: c[0], b: c[1] },
            Segment { a: c[1], b: c[2] },
            Segment { a: c[2], b: c[3] },
            Segment { a: c[3], b: c[0] },
        ]
    }

    /// Parameter range of `a→b` inside the closed rectangle (Liang–Barsky).
    pub fn clip(&self, a: Point, b: Point) -> Option<(f64, f64)> {
        let d = b - a;
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        for (p, q) in [
            (-d.x, a.x - self.min.x),
            (d.x, self.max.x - a.x),
            (-d.y, a.y - self.min.y),
            (d.y, self.max.y - a.y),
        ] {
            if p == 0.0 {
                if q < 0.0 {
                    return None;
                }
            } else {
                let r = q / p;
                if p < 0.0 {
                    t0 = t0.max(r);
                } else {
                    t1 = t1.min(r);
                }
            }
        }
        (t0 <= t1).then_some((t0, t1))
    }

    /// Whether `a→b` passes through the open interior. Grazing an edge or
    /// touching a corner does not count.
    pub fn blocks(&self, a: Point, b: Point) -> bool {
        match self.clip(a, b) {
            Some((t0, t1)) if (t1 - t0) * a.dist(b) > EPS => {
                let mid = a + (b - a) * (0.5 * (t0 + t1));
                self.contains_strictly(mid)
            }
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn display() -> Rect {
        Rect::new(Point::new(10.0, 10.0), Point::new(20.0, 20.0))
    }

    #[test]
    fn through_the_middle_is_blocked() {
        assert!(display().blocks(Point::new(15.0, 0.0), Point::new(15.0, 30.0)));
        assert!(display().blocks(Point::new(0.0, 0.0), Point::new(30.0, 30.0)));
    }

    #[test]
    fn along_an_edge_is_clear() {
        assert!(!display().blocks(Point::new(5.0, 10.0), Point::new(25.0, 10.0)));
        assert!(!display().blocks(Point::new(10.0, 12.0), Point::new(10.0, 18.0)));
    }

    #[test]
    fn touching_a_corner_is_clear() {
        assert!(!display().blocks(Point::new(5.0, 15.0), Point::new(15.0, 5.0)));
        assert!(!display().blocks(Point::new(0.0, 0.0), Point::new(10.0, 10.0)));
    }

    #[test]
    fn outside_is_clear() {
        assert!(!display().blocks(Point::new(0.0, 0.0), Point::new(30.0, 0.0)));
    }

    #[test]
    fn from_a_face_into_the_interior_is_blocked() {
        assert!(display().blocks(Point::new(15.0, 10.0), Point::new(15.0, 12.0)));
        assert!(!display().blocks(Point::new(15.0, 10.0), Point::new(15.0, 8.0)));
    }

    #[test]
    fn rotations() {
        let e = Point::new(1.0, 0.0);
        assert_eq!(e.left(), Point::new(0.0, 1.0));
        assert_eq!(e.right(), Point::new(0.0, -1.0));
    }
}
