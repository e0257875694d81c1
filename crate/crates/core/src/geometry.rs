//! Axis-aligned primitives for the unit container.
//!
//! The container is `[0, 1] x [0, 1]` with the origin at the bottom-left
//! corner and `y` growing upwards.

use serde::{Deserialize, Serialize};

/// Tolerance used for every geometric boundary comparison.
pub const EPS: f64 = 1e-12;

/// Tolerance used for area/density comparisons.
pub const EPS_AREA: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub const UNIT: Rect = Rect {
        x: 0.0,
        y: 0.0,
        w: 1.0,
        h: 1.0,
    };

    pub const fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Rect { x, y, w, h }
    }

    pub const fn square(x: f64, y: f64, side: f64) -> Self {
        Rect::new(x, y, side, side)
    }

    #[inline]
    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    #[inline]
    pub fn top(&self) -> f64 {
        self.y + self.h
    }

    #[inline]
    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Rect {
        Rect::new(self.x + dx, self.y + dy, self.w, self.h)
    }

    /// Interior intersection test. Shared edges and corners do not count.
    pub fn overlaps(&self, other: &Rect) -> bool {
        rects_overlap(self, other)
    }

    pub fn contains(&self, inner: &Rect, tol: f64) -> bool {
        rect_contains(self, inner, tol)
    }

    /// Area of the intersection of the two rects (zero when disjoint).
    pub fn intersection_area(&self, other: &Rect) -> f64 {
        let w = self.right().min(other.right()) - self.x.max(other.x);
        let h = self.top().min(other.top()) - self.y.max(other.y);
        if w <= 0.0 || h <= 0.0 {
            0.0
        } else {
            w * h
        }
    }

    /// True when the open vertical extents of the two rects intersect.
    pub fn spans_overlap_y(&self, other: &Rect) -> bool {
        open_intervals_overlap(self.y, self.top(), other.y, other.top())
    }
}

#[inline]
fn open_intervals_overlap(a0: f64, a1: f64, b0: f64, b1: f64) -> bool {
    a0 < b1 - EPS && b0 < a1 - EPS
}

/// Returns true iff the interiors of `a` and `b` intersect.
///
/// Touching placements are legal, so the test is strict with a slack of
/// [`EPS`] on each side.
pub fn rects_overlap(a: &Rect, b: &Rect) -> bool {
    open_intervals_overlap(a.x, a.right(), b.x, b.right())
        && open_intervals_overlap(a.y, a.top(), b.y, b.top())
}

/// Returns true iff `inner` lies inside `outer` grown by `tol` on every side.
pub fn rect_contains(outer: &Rect, inner: &Rect, tol: f64) -> bool {
    debug_assert!(tol >= 0.0);
    inner.x >= outer.x - tol
        && inner.y >= outer.y - tol
        && inner.right() <= outer.right() + tol
        && inner.top() <= outer.top() + tol
}
