//! Planar primitives and the segment crossing predicate.

use serde::{Deserialize, Serialize};

/// Default degeneracy tolerance on orientation determinants, in m².
pub const DEFAULT_AREA_TOL: f64 = 1e-9;

/// A point in a local planar frame, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn sub(self, other: Point) -> (f64, f64) {
        (self.x - other.x, self.y - other.y)
    }
}

/// Twice the signed area of the triangle `(a, b, c)`; positive when
/// counter-clockwise.
#[inline]
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    let (abx, aby) = b.sub(a);
    let (acx, acy) = c.sub(a);
    abx * acy - aby * acx
}

#[inline]
fn sign(v: f64, tol: f64) -> i8 {
    if v > tol {
        1
    } else if v < -tol {
        -1
    } else {
        0
    }
}

/// Crossing predicate with an explicit area tolerance.
#[derive(Debug, Clone, Copy)]
pub struct CrossingTest {
    pub area_tol: f64,
}

impl Default for CrossingTest {
    fn default() -> Self {
        Self { area_tol: DEFAULT_AREA_TOL }
    }
}

impl CrossingTest {
    pub fn new(area_tol: f64) -> Self {
        Self { area_tol }
    }

    /// Whether segments `p1p2` and `q1q2` cross.
    ///
    /// Proper crossings, collinear overlaps of positive length, and T-contacts
    /// (an endpoint of one segment lying strictly inside the other) all count.
    /// Contact only at a shared endpoint, or intersection of the supporting
    /// lines outside the segments, does not.
    pub fn segments_cross(&self, p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
        let tol = self.area_tol;
        let d1 = sign(orient(q1, q2, p1), tol);
        let d2 = sign(orient(q1, q2, p2), tol);
        let d3 = sign(orient(p1, p2, q1), tol);
        let d4 = sign(orient(p1, p2, q2), tol);

        if d1 == 0 && d2 == 0 && d3 == 0 && d4 == 0 {
            return self.collinear_overlap(p1, p2, q1, q2);
        }
        if d1 * d2 < 0 && d3 * d4 < 0 {
            return true;
        }
        (d1 == 0 && self.strictly_inside(p1, q1, q2))
            || (d2 == 0 && self.strictly_inside(p2, q1, q2))
            || (d3 == 0 && self.strictly_inside(q1, p1, p2))
            || (d4 == 0 && self.strictly_inside(q2, p1, p2))
    }

    /// `c` (assumed on the line through `a`, `b`) lies in the open segment.
    fn strictly_inside(&self, c: Point, a: Point, b: Point) -> bool {
        let (abx, aby) = b.sub(a);
        let len = abx.hypot(aby);
        if len == 0.0 {
            return false;
        }
        // Height tolerance induced by the area tolerance on this base.
        let eps = self.area_tol / len;
        let (acx, acy) = c.sub(a);
        let along = (acx * abx + acy * aby) / len;
        along > eps && along < len - eps
    }

    fn collinear_overlap(&self, p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
        let (dx, dy) = p2.sub(p1);
        let len = dx.hypot(dy);
        if len == 0.0 {
            return false;
        }
        let (ux, uy) = (dx / len, dy / len);
        let proj = |p: Point| {
            let (x, y) = p.sub(p1);
            x * ux + y * uy
        };
        let (a0, a1): (f64, f64) = (0.0, len);
        let (b0, b1) = {
            let (s, t) = (proj(q1), proj(q2));
            if s <= t {
                (s, t)
            } else {
                (t, s)
            }
        };
        let overlap = a1.min(b1) - a0.max(b0);
        overlap > self.area_tol / len
    }
}

/// [`CrossingTest::segments_cross`] with the default tolerance.
pub fn segments_cross(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    CrossingTest::default().segments_cross(p1, p2, q1, q2)
}
