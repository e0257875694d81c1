//! Shelves: rectangles filled side by side with items of a single size class.
//!
//! A horizontal shelf packs left to right with every item flush against its
//! bottom edge. A vertical shelf (a column) packs bottom to top with items
//! flush against its left edge. Columns are themselves items of the
//! horizontal shelf that hosts them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classes::{class_params, ratio, COLUMN_LENGTH};
use crate::error::ShelfError;
use crate::geometry::{Rect, EPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ShelfId(pub u32);

impl fmt::Display for ShelfId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShelfState {
    Open,
    Closed,
    /// Only used by the composite medium shelves.
    ClosedToMedium,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShelfItem {
    Square { id: usize, height: f64 },
    Column { shelf: ShelfId, width: f64 },
}

impl ShelfItem {
    /// Length consumed along the packing direction.
    pub fn extent(&self) -> f64 {
        match *self {
            ShelfItem::Square { height, .. } => height,
            ShelfItem::Column { width, .. } => width,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacedItem {
    pub item: ShelfItem,
    pub rect: Rect,
}

/// The item that failed to fit when a shelf was closed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Closure {
    pub extent: f64,
    /// Sequence id of the closing square, `None` when a column closed it.
    pub square: Option<usize>,
    /// Usable length at the time of closing (may be shorter than the shelf).
    pub effective_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shelf {
    pub id: ShelfId,
    pub label: String,
    pub rect: Rect,
    pub orientation: Orientation,
    /// Subclass whose squares this shelf admits.
    pub class_k: u32,
    /// Cross dimension `h`.
    pub height: f64,
    /// Packing-direction extent `l`.
    pub length: f64,
    pub ratio: f64,
    pub used: f64,
    pub state: ShelfState,
    pub items: Vec<PlacedItem>,
    pub closure: Option<Closure>,
}

impl Shelf {
    /// Horizontal shelf for subclass `k` covering `rect`.
    pub fn horizontal(id: ShelfId, label: impl Into<String>, rect: Rect, k: u32) -> Self {
        Shelf {
            id,
            label: label.into(),
            rect,
            orientation: Orientation::Horizontal,
            class_k: k,
            height: rect.h,
            length: rect.w,
            ratio: ratio(k),
            used: 0.0,
            state: ShelfState::Open,
            items: Vec::new(),
            closure: None,
        }
    }

    /// Column of width `h_k` and length [`COLUMN_LENGTH`] anchored at `(x, y)`.
    pub fn column(id: ShelfId, label: impl Into<String>, x: f64, y: f64, k: u32) -> Self {
        let h = class_params(k).max_height;
        Shelf {
            id,
            label: label.into(),
            rect: Rect::new(x, y, h, COLUMN_LENGTH),
            orientation: Orientation::Vertical,
            class_k: k,
            height: h,
            length: COLUMN_LENGTH,
            ratio: ratio(k),
            used: 0.0,
            state: ShelfState::Open,
            items: Vec::new(),
            closure: None,
        }
    }

    pub fn is_open(&self) -> bool {
        self.state == ShelfState::Open
    }

    /// Exclusive lower and inclusive upper bound of admissible square heights.
    pub fn admissible(&self) -> (f64, f64) {
        let p = class_params(self.class_k);
        (p.min_height, p.max_height)
    }

    pub fn admits(&self, height: f64) -> bool {
        let (min, max) = self.admissible();
        height > min && height <= max
    }

    /// Whether an item of `extent` fits within the first `free_limit` of the shelf.
    pub fn fits(&self, extent: f64, free_limit: f64) -> bool {
        self.is_open() && self.used + extent <= free_limit + EPS
    }

    /// Absolute coordinate of the packing frontier.
    pub fn frontier(&self) -> f64 {
        match self.orientation {
            Orientation::Horizontal => self.rect.x + self.used,
            Orientation::Vertical => self.rect.y + self.used,
        }
    }

    /// Rect the item would occupy if inserted now.
    pub fn next_rect(&self, item: &ShelfItem) -> Rect {
        let e = item.extent();
        match (self.orientation, item) {
            (Orientation::Horizontal, ShelfItem::Square { .. }) => {
                Rect::square(self.rect.x + self.used, self.rect.y, e)
            }
            (Orientation::Horizontal, ShelfItem::Column { .. }) => {
                Rect::new(self.rect.x + self.used, self.rect.y, e, COLUMN_LENGTH)
            }
            (Orientation::Vertical, _) => Rect::square(self.rect.x, self.rect.y + self.used, e),
        }
    }

    pub fn insert(&mut self, item: ShelfItem) -> Result<Rect, ShelfError> {
        if !self.is_open() {
            return Err(ShelfError::Closed(self.id));
        }
        if let ShelfItem::Square { height, .. } = item {
            if !self.admits(height) {
                let (min, max) = self.admissible();
                return Err(ShelfError::ClassMismatch {
                    shelf: self.id,
                    height,
                    min,
                    max,
                });
            }
        }
        let extent = item.extent();
        if !self.fits(extent, self.length) {
            return Err(ShelfError::NoFit {
                shelf: self.id,
                extent,
                used: self.used,
                length: self.length,
            });
        }
        let rect = self.next_rect(&item);
        self.used += extent;
        self.items.push(PlacedItem { item, rect });
        Ok(rect)
    }

    pub fn close(&mut self, closure: Option<Closure>) -> Result<(), ShelfError> {
        if !self.is_open() {
            return Err(ShelfError::Closed(self.id));
        }
        self.state = ShelfState::Closed;
        self.closure = closure;
        Ok(())
    }

    /// Moves the origin of an empty horizontal shelf to `x`, keeping its right edge.
    pub(crate) fn move_origin(&mut self, x: f64) {
        debug_assert!(self.items.is_empty() && self.orientation == Orientation::Horizontal);
        let right = self.rect.right();
        self.rect.x = x;
        self.rect.w = right - x;
        self.length = self.rect.w;
    }

    /// Total area of the squares packed directly into this shelf.
    pub fn square_area(&self) -> f64 {
        self.items
            .iter()
            .filter_map(|p| match p.item {
                ShelfItem::Square { height, .. } => Some(height * height),
                ShelfItem::Column { .. } => None,
            })
            .sum()
    }

    pub fn holds_only_squares(&self) -> bool {
        self.items
            .iter()
            .all(|p| matches!(p.item, ShelfItem::Square { .. }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rects_overlap;
    use proptest::prelude::*;

    fn p1() -> Shelf {
        Shelf::horizontal(ShelfId(0), "p1", Rect::new(0.0, 0.0, 1.0, 0.25), 0)
    }

    fn sq(id: usize, height: f64) -> ShelfItem {
        ShelfItem::Square { id, height }
    }

    #[test]
    fn fit_arithmetic() {
        let mut s = p1();
        s.used = 0.8;
        assert!(s.fits(0.2, 1.0));
        assert!(!s.fits(0.21, 1.0));
        s.used = 0.5;
        assert!(!s.fits(0.2, 0.69));
    }

    #[test]
    fn horizontal_insert_is_left_to_right_bottom_flush() {
        let mut s = p1();
        s.used = 0.13;
        let r = s.insert(sq(0, 0.2)).unwrap();
        assert_eq!(r, Rect::new(0.13, 0.0, 0.2, 0.2));
        assert!((s.used - 0.33).abs() < 1e-15);
    }

    #[test]
    fn vertical_insert_is_bottom_up_left_flush() {
        let mut s = Shelf::column(ShelfId(1), "b1", 0.0, 0.75, 1);
        assert_eq!(s.rect, Rect::new(0.0, 0.75, 0.125, 0.25));
        s.used = 0.1;
        let r = s.insert(sq(0, 0.09)).unwrap();
        assert_eq!(r.x, 0.0);
        assert!((r.y - 0.85).abs() < 1e-15);
        assert_eq!((r.w, r.h), (0.09, 0.09));
    }

    #[test]
    fn column_item_takes_full_row() {
        let mut p2 = Shelf::horizontal(ShelfId(2), "p2", Rect::new(0.0, 0.25, 1.0, 0.25), 0);
        let r = p2
            .insert(ShelfItem::Column {
                shelf: ShelfId(9),
                width: 0.125,
            })
            .unwrap();
        assert_eq!(r, Rect::new(0.0, 0.25, 0.125, 0.25));
    }

    #[test]
    fn class_mismatch_and_overflow() {
        let mut s = p1();
        assert!(matches!(
            s.insert(sq(0, 0.1)),
            Err(ShelfError::ClassMismatch { .. })
        ));
        s.used = 0.9;
        assert!(matches!(s.insert(sq(1, 0.2)), Err(ShelfError::NoFit { .. })));
    }

    #[test]
    fn closing() {
        let mut s = p1();
        s.used = 0.9;
        s.close(None).unwrap();
        assert_eq!(s.state, ShelfState::Closed);
        assert_eq!(s.used, 0.9);
        assert!(matches!(s.close(None), Err(ShelfError::Closed(_))));
        assert!(matches!(s.insert(sq(0, 0.2)), Err(ShelfError::Closed(_))));
    }

    proptest! {
        #[test]
        fn fill_keeps_bookkeeping(heights in prop::collection::vec(0.12501..=0.25f64, 1..12)) {
            let mut s = p1();
            for (i, h) in heights.iter().enumerate() {
                if !s.fits(*h, s.length) {
                    break;
                }
                let r = s.insert(sq(i, *h)).unwrap();
                prop_assert!(s.rect.contains(&r, EPS));
            }
            let sum: f64 = s.items.iter().map(|p| p.item.extent()).sum();
            prop_assert!((sum - s.used).abs() < 1e-12);
            for (i, a) in s.items.iter().enumerate() {
                for b in &s.items[i + 1..] {
                    prop_assert!(!rects_overlap(&a.rect, &b.rect));
                }
            }
        }
    }
}
