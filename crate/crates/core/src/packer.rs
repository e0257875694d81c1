//! The online packer.
//!
//! The container is split into four primary rows of height 1/4. Rows 1 and 2
//! (`p1`, `p2`) span the full width. Row 3 starts with the buffers `b3` and
//! `b0` followed by `p3`; row 4 starts with the column buffers `b1`, `b2`,
//! `b4`, `b5`, ... followed by `p4`.
//!
//! ```text
//!  1.0 +------+----+-----------+------------------------------+
//!      |  b1  | b2 |b4 b5 ...  |              p4              |
//! 0.75 +----+-+----+------+----+------------------------------+
//!      | b3 |     b0      |                 p3                |
//! 0.50 +----+-------------+-----------------------------------+
//!      |                           p2                         |
//! 0.25 +------------------------------------------------------+
//!      |                           p1                         |
//!  0.0 +------------------------------------------------------+
//!      0                                                      1
//! ```
//!
//! * Large squares go to the upper-right corner.
//! * Medium squares go right to left along the bottom until one does not
//!   fit, then right to left along the top.
//! * Small squares fill `b0`, then alternate between `p1`/`p2` (shortest
//!   used length first) until neither fits, then between `p3`/`p4`.
//! * Very small squares of subclass `c_k` stack in the single open column of
//!   that subclass. A full column is closed and its successor is packed into
//!   the primary rows exactly like a small square.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::classes::{buffer_span, classify, max_height, BufferGroup, SizeClass};
use crate::error::Error;
use crate::geometry::{Rect, EPS};
use crate::shelf::{Closure, Shelf, ShelfId, ShelfItem, ShelfState};

/// Area guarantee of the algorithm.
pub const GUARANTEED_AREA: f64 = 3.0 / 8.0;

/// Left edge of `p4`; just right of the `b1, b2, b4, ...` strip.
pub const P4_ORIGIN: f64 = 0.294;

pub const P1: ShelfId = ShelfId(0);
pub const P2: ShelfId = ShelfId(1);
pub const P3: ShelfId = ShelfId(2);
pub const P4: ShelfId = ShelfId(3);
pub const B0: ShelfId = ShelfId(4);
pub const B1: ShelfId = ShelfId(5);
pub const B2: ShelfId = ShelfId(6);
pub const B3: ShelfId = ShelfId(7);

/// Fixed regions of the container.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub p1: Rect,
    pub p2: Rect,
    pub b3: Rect,
    pub b0: Rect,
    pub p3: Rect,
    pub b1: Rect,
    pub b2: Rect,
    pub p4: Rect,
}

impl Layout {
    pub fn standard() -> Layout {
        let h1 = max_height(1);
        let h2 = max_height(2);
        let h3 = max_height(3);
        let row3_end = buffer_span(BufferGroup::B0B3Row);
        Layout {
            p1: Rect::new(0.0, 0.0, 1.0, 0.25),
            p2: Rect::new(0.0, 0.25, 1.0, 0.25),
            b3: Rect::new(0.0, 0.5, h3, 0.25),
            b0: Rect::new(h3, 0.5, 0.25, 0.25),
            p3: Rect::new(row3_end, 0.5, 1.0 - row3_end, 0.25),
            b1: Rect::new(0.0, 0.75, h1, 0.25),
            b2: Rect::new(h1, 0.75, h2, 0.25),
            p4: Rect::new(P4_ORIGIN, 0.75, 1.0 - P4_ORIGIN, 0.25),
        }
    }

    /// Left edge of buffer column `b_k`, `k >= 4`: `h_1 + h_2 + h_4 + ... + h_{k-1}`.
    pub fn buffer_column_x(k: u32) -> f64 {
        debug_assert!(k >= 4);
        (4..k).fold(max_height(1) + max_height(2), |x, j| x + max_height(j))
    }

    /// Leftmost admissible x for a medium square in the top half.
    pub fn top_medium_floor() -> f64 {
        buffer_span(BufferGroup::B0B3Row)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PackerConfig {
    pub enforce_budget: bool,
    pub budget: f64,
}

impl Default for PackerConfig {
    fn default() -> Self {
        PackerConfig {
            enforce_budget: false,
            budget: GUARANTEED_AREA,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacedSquare {
    pub id: usize,
    pub height: f64,
    pub x: f64,
    pub y: f64,
    pub class: SizeClass,
    pub shelf_id: Option<ShelfId>,
}

impl PlacedSquare {
    pub fn rect(&self) -> Rect {
        Rect::square(self.x, self.y, self.height)
    }

    pub fn area(&self) -> f64 {
        self.height * self.height
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    NoFit,
    BudgetExceeded,
    InvariantViolation,
    InvalidHeight,
}

impl RejectReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::NoFit => "no_fit",
            RejectReason::BudgetExceeded => "budget_exceeded",
            RejectReason::InvariantViolation => "invariant_violation",
            RejectReason::InvalidHeight => "invalid_height",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PlacementOutcome {
    Placed(PlacedSquare),
    Rejected { reason: RejectReason, detail: String },
}

impl PlacementOutcome {
    pub fn is_placed(&self) -> bool {
        matches!(self, PlacementOutcome::Placed(_))
    }

    pub fn placed(&self) -> Option<&PlacedSquare> {
        match self {
            PlacementOutcome::Placed(p) => Some(p),
            PlacementOutcome::Rejected { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MediumPhase {
    Bottom,
    Top,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmallPhase {
    BufferB0,
    Pair12,
    Pair34,
}

/// One half of the container seen as a single shelf for medium squares,
/// filled right to left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediumShelf {
    pub rect: Rect,
    /// Leftmost x reached by medium squares (starts at the right edge).
    pub left: f64,
    pub state: ShelfState,
    pub squares: Vec<usize>,
}

impl MediumShelf {
    fn new(rect: Rect) -> Self {
        MediumShelf {
            rect,
            left: rect.right(),
            state: ShelfState::Open,
            squares: Vec::new(),
        }
    }

    pub fn used(&self) -> f64 {
        self.rect.right() - self.left
    }
}

/// Per-prefix statistics recorded after every accepted placement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrefixStat {
    pub id: usize,
    pub cumulative_area: f64,
    pub used_p1: f64,
    pub used_p2: f64,
}

/// Recorded when `p1` and `p2` are closed together.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairClose {
    /// Id of the square whose arrival closed the pair.
    pub closer_id: usize,
    /// Packed area inside `p1 ∪ p2 ∪ b0 ∪` buffer columns at that moment.
    pub region_area: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Placed,
    Closed,
    PhaseChange,
    Rejected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareRef {
    pub id: usize,
    pub height: f64,
    pub class: Option<SizeClass>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub seq: usize,
    pub kind: EventKind,
    pub square: SquareRef,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rect: Option<Rect>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shelf_id: Option<ShelfId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// Read-only dump of the packer state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub config: PackerConfig,
    pub placements: Vec<PlacedSquare>,
    pub shelves: Vec<Shelf>,
    pub medium_bottom: MediumShelf,
    pub medium_top: MediumShelf,
    pub medium_phase: MediumPhase,
    pub small_phase: SmallPhase,
    pub open_columns: BTreeMap<u32, ShelfId>,
    pub buffer_columns: BTreeMap<u32, ShelfId>,
    pub large: Option<usize>,
    pub cumulative_area: f64,
    pub arrivals: usize,
    pub prefix: Vec<PrefixStat>,
    pub pair_close: Option<PairClose>,
}

impl Snapshot {
    pub fn shelf(&self, id: ShelfId) -> &Shelf {
        &self.shelves[id.0 as usize]
    }

    pub fn large_square(&self) -> Option<&PlacedSquare> {
        self.large.map(|i| &self.placements[i])
    }
}

/// Uniform grid over the unit square for collision queries.
#[derive(Debug, Clone)]
pub(crate) struct GridIndex {
    cells: Vec<Vec<u32>>,
}

const GRID: usize = 32;

impl GridIndex {
    pub(crate) fn new() -> Self {
        GridIndex {
            cells: vec![Vec::new(); GRID * GRID],
        }
    }

    fn span(lo: f64, hi: f64) -> std::ops::RangeInclusive<usize> {
        let cell = |v: f64| ((v * GRID as f64).floor().max(0.0) as usize).min(GRID - 1);
        cell(lo)..=cell(hi)
    }

    pub(crate) fn insert(&mut self, idx: u32, r: &Rect) {
        for cy in Self::span(r.y, r.top()) {
            for cx in Self::span(r.x, r.right()) {
                self.cells[cy * GRID + cx].push(idx);
            }
        }
    }

    /// First stored index whose rect overlaps `r`.
    pub(crate) fn find_overlap(
        &self,
        r: &Rect,
        rect_of: impl Fn(u32) -> Rect,
    ) -> Option<u32> {
        for cy in Self::span(r.y, r.top()) {
            for cx in Self::span(r.x, r.right()) {
                for &i in &self.cells[cy * GRID + cx] {
                    if rect_of(i).overlaps(r) {
                        return Some(i);
                    }
                }
            }
        }
        None
    }
}

#[derive(Debug, Clone)]
enum Host {
    /// Lazily created buffer column `b_k` (k >= 4).
    Buffer,
    Shelf(ShelfId),
}

#[derive(Debug, Clone)]
enum Plan {
    Large {
        rect: Rect,
    },
    Medium {
        rect: Rect,
        top: bool,
    },
    Shelf {
        shelf: ShelfId,
        rect: Rect,
    },
    NewColumn {
        k: u32,
        retire: Option<ShelfId>,
        host: Host,
        column: Rect,
        rect: Rect,
    },
}

impl Plan {
    fn rect(&self) -> Rect {
        match self {
            Plan::Large { rect }
            | Plan::Medium { rect, .. }
            | Plan::Shelf { rect, .. }
            | Plan::NewColumn { rect, .. } => *rect,
        }
    }
}

struct Rejection {
    reason: RejectReason,
    detail: String,
}

impl Rejection {
    fn no_fit(detail: impl Into<String>) -> Self {
        Rejection {
            reason: RejectReason::NoFit,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Packer {
    config: PackerConfig,
    layout: Layout,
    shelves: Vec<Shelf>,
    placements: Vec<PlacedSquare>,
    cumulative_area: f64,
    medium_bottom: MediumShelf,
    medium_top: MediumShelf,
    medium_phase: MediumPhase,
    small_phase: SmallPhase,
    open_columns: BTreeMap<u32, ShelfId>,
    buffer_columns: BTreeMap<u32, ShelfId>,
    columns_opened: BTreeMap<u32, u32>,
    large: Option<usize>,
    arrivals: usize,
    events: Vec<Event>,
    prefix: Vec<PrefixStat>,
    pair_close: Option<PairClose>,
    index: GridIndex,
}

impl Default for Packer {
    fn default() -> Self {
        Packer::new(PackerConfig::default())
    }
}

impl Packer {
    pub fn new(config: PackerConfig) -> Self {
        let layout = Layout::standard();
        let shelves = vec![
            Shelf::horizontal(P1, "p1", layout.p1, 0),
            Shelf::horizontal(P2, "p2", layout.p2, 0),
            Shelf::horizontal(P3, "p3", layout.p3, 0),
            Shelf::horizontal(P4, "p4", layout.p4, 0),
            Shelf::horizontal(B0, "b0", layout.b0, 0),
            Shelf::column(B1, "b1", layout.b1.x, layout.b1.y, 1),
            Shelf::column(B2, "b2", layout.b2.x, layout.b2.y, 2),
            Shelf::column(B3, "b3", layout.b3.x, layout.b3.y, 3),
        ];
        let columns: BTreeMap<u32, ShelfId> = [(1, B1), (2, B2), (3, B3)].into_iter().collect();
        Packer {
            config,
            layout,
            shelves,
            placements: Vec::new(),
            cumulative_area: 0.0,
            medium_bottom: MediumShelf::new(Rect::new(0.0, 0.0, 1.0, 0.5)),
            medium_top: MediumShelf::new(Rect::new(
                Layout::top_medium_floor(),
                0.5,
                1.0 - Layout::top_medium_floor(),
                0.5,
            )),
            medium_phase: MediumPhase::Bottom,
            small_phase: SmallPhase::BufferB0,
            open_columns: columns.clone(),
            buffer_columns: columns,
            columns_opened: BTreeMap::new(),
            large: None,
            arrivals: 0,
            events: Vec::new(),
            prefix: Vec::new(),
            pair_close: None,
            index: GridIndex::new(),
        }
    }

    pub fn config(&self) -> &PackerConfig {
        &self.config
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn placements(&self) -> &[PlacedSquare] {
        &self.placements
    }

    pub fn shelves(&self) -> &[Shelf] {
        &self.shelves
    }

    pub fn shelf(&self, id: ShelfId) -> &Shelf {
        &self.shelves[id.0 as usize]
    }

    pub fn cumulative_area(&self) -> f64 {
        self.cumulative_area
    }

    pub fn budget_remaining(&self) -> f64 {
        self.config.budget - self.cumulative_area
    }

    pub fn medium_phase(&self) -> MediumPhase {
        self.medium_phase
    }

    pub fn small_phase(&self) -> SmallPhase {
        self.small_phase
    }

    pub fn medium_bottom(&self) -> &MediumShelf {
        &self.medium_bottom
    }

    pub fn medium_top(&self) -> &MediumShelf {
        &self.medium_top
    }

    pub fn open_column(&self, k: u32) -> Option<ShelfId> {
        self.open_columns.get(&k).copied()
    }

    pub fn large(&self) -> Option<&PlacedSquare> {
        self.large.map(|i| &self.placements[i])
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn arrivals(&self) -> usize {
        self.arrivals
    }

    pub fn pair_close(&self) -> Option<PairClose> {
        self.pair_close
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            config: self.config,
            placements: self.placements.clone(),
            shelves: self.shelves.clone(),
            medium_bottom: self.medium_bottom.clone(),
            medium_top: self.medium_top.clone(),
            medium_phase: self.medium_phase,
            small_phase: self.small_phase,
            open_columns: self.open_columns.clone(),
            buffer_columns: self.buffer_columns.clone(),
            large: self.large,
            cumulative_area: self.cumulative_area,
            arrivals: self.arrivals,
            prefix: self.prefix.clone(),
            pair_close: self.pair_close,
        }
    }

    /// Places one square. The outcome is final: placed squares never move.
    pub fn place(&mut self, height: f64) -> PlacementOutcome {
        let id = self.arrivals;
        self.arrivals += 1;
        let class = match classify(height) {
            Ok(c) => c,
            Err(e) => {
                let reason = match e {
                    Error::HeightBelowResolution(_) => RejectReason::NoFit,
                    _ => RejectReason::InvalidHeight,
                };
                return self.reject(id, height, None, reason, e.to_string());
            }
        };
        if self.config.enforce_budget
            && self.cumulative_area + height * height > self.config.budget + EPS
        {
            let detail = format!(
                "area {} would exceed budget {}",
                self.cumulative_area + height * height,
                self.config.budget
            );
            return self.reject(id, height, Some(class), RejectReason::BudgetExceeded, detail);
        }

        let plan = match class {
            SizeClass::Large => self.plan_large(height),
            SizeClass::Medium => self.plan_medium(id, height),
            SizeClass::Sub(0) => self
                .locate_small(height, Some(id))
                .map(|shelf| Plan::Shelf {
                    rect: self.shelf(shelf).next_rect(&ShelfItem::Square { id, height }),
                    shelf,
                }),
            SizeClass::Sub(k) => self.plan_very_small(id, height, k),
        };
        let plan = match plan {
            Ok(p) => p,
            Err(r) => return self.reject(id, height, Some(class), r.reason, r.detail),
        };

        if let Err(detail) = self.check_plan(&plan) {
            return self.reject(
                id,
                height,
                Some(class),
                RejectReason::InvariantViolation,
                detail,
            );
        }
        let placed = self.commit(id, height, class, plan);
        PlacementOutcome::Placed(placed)
    }

    /// Places every height in order, stopping at the first rejection.
    pub fn place_all(&mut self, heights: &[f64]) -> Result<(), (usize, PlacementOutcome)> {
        for (i, &h) in heights.iter().enumerate() {
            let out = self.place(h);
            if !out.is_placed() {
                return Err((i, out));
            }
        }
        Ok(())
    }

    fn reject(
        &mut self,
        id: usize,
        height: f64,
        class: Option<SizeClass>,
        reason: RejectReason,
        detail: String,
    ) -> PlacementOutcome {
        self.events.push(Event {
            seq: self.events.len(),
            kind: EventKind::Rejected,
            square: SquareRef { id, height, class },
            rect: None,
            shelf_id: None,
            reason: Some(format!("{}: {}", reason.as_str(), detail)),
        });
        PlacementOutcome::Rejected { reason, detail }
    }

    fn log(&mut self, kind: EventKind, square: SquareRef, shelf_id: Option<ShelfId>, reason: String) {
        self.events.push(Event {
            seq: self.events.len(),
            kind,
            square,
            rect: None,
            shelf_id,
            reason: Some(reason),
        });
    }

    fn rect_overlaps_placement(&self, r: &Rect) -> Option<usize> {
        self.index
            .find_overlap(r, |i| self.placements[i as usize].rect())
            .map(|i| i as usize)
    }

    /// Rightmost x available to a horizontal row, given the medium shelves
    /// and the large square obstructing it.
    fn right_limit(&self, row: &Rect) -> f64 {
        let mut limit = 1.0f64;
        if row.spans_overlap_y(&self.medium_bottom.rect) {
            limit = limit.min(self.medium_bottom.left);
        }
        if row.spans_overlap_y(&self.medium_top.rect) {
            limit = limit.min(self.medium_top.left);
        }
        if let Some(large) = self.large() {
            if row.spans_overlap_y(&large.rect()) {
                limit = limit.min(large.x);
            }
        }
        limit
    }

    fn free_limit(&self, id: ShelfId) -> f64 {
        let s = self.shelf(id);
        (self.right_limit(&s.rect) - s.rect.x).min(s.length)
    }

    /// Length still available on an open shelf, or zero once it is closed.
    pub fn free_length(&self, id: ShelfId) -> f64 {
        let s = self.shelf(id);
        if !s.is_open() {
            return 0.0;
        }
        match s.orientation {
            crate::shelf::Orientation::Horizontal => (self.free_limit(id) - s.used).max(0.0),
            crate::shelf::Orientation::Vertical => s.length - s.used,
        }
    }

    fn plan_large(&self, height: f64) -> Result<Plan, Rejection> {
        if let Some(existing) = self.large() {
            return Err(Rejection::no_fit(format!(
                "large square {} already occupies the corner",
                existing.id
            )));
        }
        let corner = 1.0 - height;
        let rect = Rect::square(corner, corner, height);
        if let Some(i) = self.rect_overlaps_placement(&rect) {
            return Err(Rejection::no_fit(format!(
                "corner overlaps square {}",
                self.placements[i].id
            )));
        }
        for s in &self.shelves {
            let reserved = match s.orientation {
                crate::shelf::Orientation::Horizontal => {
                    Rect::new(s.rect.x, s.rect.y, s.used, s.rect.h)
                }
                crate::shelf::Orientation::Vertical => s.rect,
            };
            if reserved.w > 0.0 && reserved.overlaps(&rect) {
                return Err(Rejection::no_fit(format!(
                    "corner overlaps used part of shelf {}",
                    s.label
                )));
            }
        }
        Ok(Plan::Large { rect })
    }

    fn plan_medium(&mut self, id: usize, height: f64) -> Result<Plan, Rejection> {
        if self.medium_phase == MediumPhase::Bottom {
            let mut right = self.medium_bottom.left;
            let probe = Rect::new(0.0, 0.0, 1.0, height);
            if let Some(large) = self.large() {
                if probe.spans_overlap_y(&large.rect()) {
                    right = right.min(large.x);
                }
            }
            let x = right - height;
            let floor = self.shelf(P1).frontier().max(self.shelf(P2).frontier());
            if x >= floor - EPS {
                return Ok(Plan::Medium {
                    rect: Rect::square(x, 0.0, height),
                    top: false,
                });
            }
            self.medium_bottom.state = ShelfState::ClosedToMedium;
            self.medium_phase = MediumPhase::Top;
            self.log(
                EventKind::PhaseChange,
                SquareRef {
                    id,
                    height,
                    class: Some(SizeClass::Medium),
                },
                None,
                "medium: bottom -> top".to_string(),
            );
        }
        let mut right = self.medium_top.left;
        if let Some(large) = self.large() {
            right = right.min(large.x);
        }
        let x = right - height;
        let floor = Layout::top_medium_floor()
            .max(self.shelf(P3).frontier())
            .max(self.shelf(P4).frontier());
        if x >= floor - EPS {
            Ok(Plan::Medium {
                rect: Rect::square(x, 1.0 - height, height),
                top: true,
            })
        } else {
            Err(Rejection::no_fit(format!(
                "top medium shelf has {} free, needs {}",
                (right - floor).max(0.0),
                height
            )))
        }
    }

    /// Finds the shelf that receives the next small-routine item of `extent`,
    /// advancing the small phase as shelves close. `square` is the id of the
    /// arriving square when the item is that square rather than a column.
    fn locate_small(&mut self, extent: f64, square: Option<usize>) -> Result<ShelfId, Rejection> {
        let who = SquareRef {
            id: square.unwrap_or(self.arrivals - 1),
            height: extent,
            class: square.map(|_| SizeClass::Sub(0)),
        };
        loop {
            match self.small_phase {
                SmallPhase::BufferB0 => {
                    let limit = self.free_limit(B0);
                    if self.shelf(B0).fits(extent, limit) {
                        return Ok(B0);
                    }
                    self.close_shelf(B0, extent, square, limit, who);
                    self.small_phase = SmallPhase::Pair12;
                    self.log(EventKind::PhaseChange, who, None, "small: b0 -> p1/p2".into());
                }
                SmallPhase::Pair12 => {
                    if let Some(s) = self.pick_pair(P1, P2, extent) {
                        return Ok(s);
                    }
                    let region_area = self.pair_region_area();
                    let (l1, l2) = (self.free_limit(P1), self.free_limit(P2));
                    self.close_shelf(P1, extent, square, l1, who);
                    self.close_shelf(P2, extent, square, l2, who);
                    self.pair_close = Some(PairClose {
                        closer_id: self.arrivals - 1,
                        region_area,
                    });
                    // p3 starts in the unused tail of b0
                    let b0 = self.shelf(B0);
                    let origin = b0.rect.x + b0.used;
                    self.shelves[P3.0 as usize].move_origin(origin);
                    self.small_phase = SmallPhase::Pair34;
                    self.log(EventKind::PhaseChange, who, None, "small: p1/p2 -> p3/p4".into());
                }
                SmallPhase::Pair34 => {
                    return self.pick_pair(P3, P4, extent).ok_or_else(|| {
                        Rejection::no_fit(format!(
                            "item of extent {extent} fits neither p3 (free {}) nor p4 (free {})",
                            self.free_limit(P3) - self.shelf(P3).used,
                            self.free_limit(P4) - self.shelf(P4).used
                        ))
                    });
                }
            }
        }
    }

    /// Shorter used length first, ties to the lower shelf.
    fn pick_pair(&self, a: ShelfId, b: ShelfId, extent: f64) -> Option<ShelfId> {
        let order = if self.shelf(b).used < self.shelf(a).used {
            [b, a]
        } else {
            [a, b]
        };
        order
            .into_iter()
            .find(|&s| self.shelf(s).fits(extent, self.free_limit(s)))
    }

    fn close_shelf(
        &mut self,
        id: ShelfId,
        extent: f64,
        square: Option<usize>,
        effective_length: f64,
        who: SquareRef,
    ) {
        let closure = Closure {
            extent,
            square,
            effective_length,
        };
        let shelf = &mut self.shelves[id.0 as usize];
        if shelf.close(Some(closure)).is_ok() {
            let label = shelf.label.clone();
            self.log(EventKind::Closed, who, Some(id), format!("closed {label}"));
        }
    }

    /// Physical packed area inside `p1 ∪ p2 ∪ b0 ∪` all buffer columns.
    fn pair_region_area(&self) -> f64 {
        let regions = pair_region(&self.layout, &self.shelves, &self.buffer_columns);
        self.placements
            .iter()
            .map(|p| {
                let r = p.rect();
                regions.iter().map(|g| g.intersection_area(&r)).sum::<f64>()
            })
            .sum()
    }

    fn plan_very_small(&mut self, id: usize, height: f64, k: u32) -> Result<Plan, Rejection> {
        let square = ShelfItem::Square { id, height };
        let Some(open) = self.open_column(k) else {
            // first arrival of a deep subclass: its buffer column
            let x = Layout::buffer_column_x(k);
            let y = self.layout.b1.y;
            return Ok(Plan::NewColumn {
                k,
                retire: None,
                host: Host::Buffer,
                column: Rect::new(x, y, max_height(k), crate::classes::COLUMN_LENGTH),
                rect: Rect::square(x, y, height),
            });
        };
        let col = self.shelf(open);
        if col.fits(height, col.length) {
            return Ok(Plan::Shelf {
                shelf: open,
                rect: col.next_rect(&square),
            });
        }
        let width = max_height(k);
        let host = self.locate_small(width, None)?;
        let column = self
            .shelf(host)
            .next_rect(&ShelfItem::Column { shelf: open, width });
        Ok(Plan::NewColumn {
            k,
            retire: Some(open),
            host: Host::Shelf(host),
            column,
            rect: Rect::square(column.x, column.y, height),
        })
    }

    fn check_plan(&self, plan: &Plan) -> Result<(), String> {
        let rect = plan.rect();
        if !Rect::UNIT.contains(&rect, EPS) {
            return Err(format!("candidate {rect:?} leaves the container"));
        }
        if let Some(i) = self.rect_overlaps_placement(&rect) {
            return Err(format!(
                "candidate {rect:?} overlaps square {}",
                self.placements[i].id
            ));
        }
        if let Plan::NewColumn { column, .. } = plan {
            if !Rect::UNIT.contains(column, EPS) {
                return Err(format!("column {column:?} leaves the container"));
            }
            if let Some(i) = self.rect_overlaps_placement(column) {
                return Err(format!(
                    "column {column:?} overlaps square {}",
                    self.placements[i].id
                ));
            }
        }
        Ok(())
    }

    fn commit(&mut self, id: usize, height: f64, class: SizeClass, plan: Plan) -> PlacedSquare {
        let who = SquareRef {
            id,
            height,
            class: Some(class),
        };
        let (rect, shelf_id) = match plan {
            Plan::Large { rect } => {
                self.large = Some(self.placements.len());
                (rect, None)
            }
            Plan::Medium { rect, top } => {
                let m = if top {
                    &mut self.medium_top
                } else {
                    &mut self.medium_bottom
                };
                m.left = rect.x;
                m.squares.push(id);
                (rect, None)
            }
            Plan::Shelf { shelf, rect } => {
                let r = self.shelves[shelf.0 as usize]
                    .insert(ShelfItem::Square { id, height })
                    .expect("planned insert");
                debug_assert_eq!(r, rect);
                (rect, Some(shelf))
            }
            Plan::NewColumn {
                k,
                retire,
                host,
                column,
                rect,
            } => {
                if let Some(old) = retire {
                    let closure = Closure {
                        extent: height,
                        square: Some(id),
                        effective_length: self.shelf(old).length,
                    };
                    self.shelves[old.0 as usize]
                        .close(Some(closure))
                        .expect("open column");
                    let label = self.shelf(old).label.clone();
                    self.log(EventKind::Closed, who, Some(old), format!("closed {label}"));
                }
                let new_id = ShelfId(self.shelves.len() as u32);
                let n = self.columns_opened.entry(k).or_insert(0);
                *n += 1;
                let label = match host {
                    Host::Buffer => format!("b{k}"),
                    Host::Shelf(_) => format!("c{k}.{n}"),
                };
                let mut col = Shelf::column(new_id, label, column.x, column.y, k);
                match host {
                    Host::Buffer => {
                        self.buffer_columns.insert(k, new_id);
                    }
                    Host::Shelf(h) => {
                        let r = self.shelves[h.0 as usize]
                            .insert(ShelfItem::Column {
                                shelf: new_id,
                                width: col.height,
                            })
                            .expect("planned column insert");
                        debug_assert_eq!(r, column);
                    }
                }
                col.insert(ShelfItem::Square { id, height })
                    .expect("fresh column");
                self.shelves.push(col);
                self.open_columns.insert(k, new_id);
                (rect, Some(new_id))
            }
        };
        let placed = PlacedSquare {
            id,
            height,
            x: rect.x,
            y: rect.y,
            class,
            shelf_id,
        };
        let idx = self.placements.len() as u32;
        self.placements.push(placed);
        self.index.insert(idx, &rect);
        self.cumulative_area += height * height;
        self.prefix.push(PrefixStat {
            id,
            cumulative_area: self.cumulative_area,
            used_p1: self.shelf(P1).used,
            used_p2: self.shelf(P2).used,
        });
        self.events.push(Event {
            seq: self.events.len(),
            kind: EventKind::Placed,
            square: who,
            rect: Some(rect),
            shelf_id,
            reason: None,
        });
        placed
    }
}

/// Rects making up `p1 ∪ p2 ∪ b0 ∪` the buffer columns.
pub fn pair_region(
    layout: &Layout,
    shelves: &[Shelf],
    buffer_columns: &BTreeMap<u32, ShelfId>,
) -> Vec<Rect> {
    let mut regions = vec![
        Rect::new(0.0, 0.0, 1.0, 0.5),
        layout.b0,
    ];
    regions.extend(buffer_columns.values().map(|id| shelves[id.0 as usize].rect));
    regions
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rects_overlap;

    fn placed(out: PlacementOutcome) -> PlacedSquare {
        match out {
            PlacementOutcome::Placed(p) => p,
            other => panic!("expected placement, got {other:?}"),
        }
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn fresh_packer() {
        let p = Packer::default();
        let s = p.snapshot();
        assert_eq!(s.cumulative_area, 0.0);
        assert!(s.placements.is_empty());
        assert_eq!(s.shelves.len(), 8);
        assert_eq!(s.medium_phase, MediumPhase::Bottom);
        assert_eq!(s.small_phase, SmallPhase::BufferB0);
        assert!(s.shelves.iter().all(|s| s.is_open()));
    }

    #[test]
    fn layout_constants() {
        let l = Layout::standard();
        assert_eq!(l.b0.x, 0.0576875);
        assert_eq!(l.p3.x, 0.3076875);
        assert!(l.p3.w >= 0.692);
        assert!(l.p4.w >= 0.706);
        assert_eq!(Layout::buffer_column_x(4), 0.21375);
        let sup = Layout::buffer_column_x(crate::classes::subclass_count());
        assert!(sup < P4_ORIGIN);
    }

    #[test]
    fn large_goes_to_corner() {
        let mut p = Packer::default();
        let sq = placed(p.place(0.6));
        assert!(close(sq.x, 0.4) && close(sq.y, 0.4));
        let mut p = Packer::default();
        let sq = placed(p.place(0.75));
        assert_eq!((sq.x, sq.y), (0.25, 0.25));
    }

    #[test]
    fn second_large_is_rejected() {
        let mut p = Packer::default();
        placed(p.place(0.51));
        let before = p.snapshot();
        let out = p.place(0.51);
        assert!(matches!(
            out,
            PlacementOutcome::Rejected {
                reason: RejectReason::NoFit,
                ..
            }
        ));
        assert_eq!(p.snapshot().placements, before.placements);
        assert_eq!(p.snapshot().shelves, before.shelves);
    }

    #[test]
    fn mediums_right_to_left_then_top() {
        let mut p = Packer::default();
        let xs: Vec<_> = (0..4).map(|_| placed(p.place(0.3))).collect();
        assert!(close(xs[0].x, 0.7) && xs[0].y == 0.0);
        assert!(close(xs[1].x, 0.4));
        assert!(close(xs[2].x, 0.1));
        assert!(close(xs[3].x, 0.7) && close(xs[3].y, 0.7));
        assert_eq!(p.medium_phase(), MediumPhase::Top);
        assert_eq!(p.medium_bottom().state, ShelfState::ClosedToMedium);
    }

    #[test]
    fn five_mediums_of_027() {
        let mut p = Packer::default();
        let v: Vec<_> = (0..5).map(|_| placed(p.place(0.27))).collect();
        assert!(v[..3].iter().all(|s| s.y == 0.0));
        assert!(v[3..].iter().all(|s| close(s.y, 0.73)));
    }

    #[test]
    fn medium_blocked_by_smalls_goes_top() {
        let mut p = Packer::default();
        // b0 takes the first 0.25; the rest alternate between p1 and p2
        for _ in 0..9 {
            placed(p.place(0.2));
        }
        assert!(close(p.shelf(P1).used, 0.8));
        let m = placed(p.place(0.26));
        assert!(close(m.y, 0.74));
    }

    #[test]
    fn smalls_fill_b0_then_pairs() {
        let mut p = Packer::default();
        let a = placed(p.place(0.2));
        assert_eq!((a.x, a.y), (0.0576875, 0.5));
        let b = placed(p.place(0.15));
        assert_eq!((b.x, b.y), (0.0, 0.0));
        assert_eq!(p.small_phase(), SmallPhase::Pair12);
        assert_eq!(p.shelf(B0).state, ShelfState::Closed);
        let c = placed(p.place(0.22));
        assert_eq!((c.x, c.y), (0.0, 0.25));
    }

    #[test]
    fn shortest_used_rule() {
        let mut p = Packer::default();
        placed(p.place(0.25)); // b0
        placed(p.place(0.15)); // closes b0, p1 = 0.15
        placed(p.place(0.2)); // p2 = 0.2
        placed(p.place(0.15)); // p1 = 0.3
        let d = placed(p.place(0.22));
        assert_eq!(d.shelf_id, Some(P2));
        assert_eq!((d.x, d.y), (0.2, 0.25));
        // tie goes to p1
        let mut p = Packer::default();
        placed(p.place(0.25));
        let e = placed(p.place(0.2));
        assert_eq!(e.shelf_id, Some(P1));
    }

    #[test]
    fn snapshot_after_two_smalls() {
        let mut p = Packer::default();
        placed(p.place(0.2));
        placed(p.place(0.2));
        let s = p.snapshot();
        assert!(close(s.shelf(B0).used, 0.2));
        assert!(close(s.shelf(P1).used, 0.2));
    }

    #[test]
    fn very_small_buffers() {
        let mut p = Packer::default();
        let a = placed(p.place(0.12));
        assert_eq!((a.x, a.y), (0.0, 0.75));
        assert_eq!(a.shelf_id, Some(B1));
        let d = placed(p.place(0.03));
        assert_eq!(d.class, SizeClass::Sub(4));
        assert_eq!((d.x, d.y), (0.21375, 0.75));
    }

    #[test]
    fn full_column_moves_to_b0() {
        let mut p = Packer::default();
        placed(p.place(0.1));
        placed(p.place(0.1));
        assert!(close(p.shelf(B1).used, 0.2));
        let c = placed(p.place(0.1));
        assert_eq!(p.shelf(B1).state, ShelfState::Closed);
        let new_col = p.open_column(1).unwrap();
        assert_ne!(new_col, B1);
        assert_eq!((c.x, c.y), (0.0576875, 0.5));
        assert!(close(p.shelf(B0).used, 0.125));
        assert_eq!(p.shelf(new_col).rect, Rect::new(0.0576875, 0.5, 0.125, 0.25));
    }

    #[test]
    fn budget_enforcement() {
        let mut p = Packer::new(PackerConfig {
            enforce_budget: true,
            budget: 0.375,
        });
        placed(p.place(0.5));
        placed(p.place(0.3));
        let out = p.place(0.3);
        assert!(matches!(
            out,
            PlacementOutcome::Rejected {
                reason: RejectReason::BudgetExceeded,
                ..
            }
        ));
        assert!(close(p.cumulative_area(), 0.34));
    }

    #[test]
    fn invalid_height_rejected() {
        let mut p = Packer::default();
        for h in [0.0, 2.0, f64::NAN] {
            assert!(matches!(
                p.place(h),
                PlacementOutcome::Rejected {
                    reason: RejectReason::InvalidHeight,
                    ..
                }
            ));
        }
        assert!(p.placements().is_empty());
    }

    #[test]
    fn grid_index_matches_brute_force() {
        use rand_core::{RngCore, SeedableRng};
        let mut rng = rand_xoshiro::Xoshiro256StarStar::seed_from_u64(11);
        let mut unit = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        for _ in 0..200 {
            let rects: Vec<Rect> = (0..40)
                .map(|_| {
                    let s = 0.01 + unit() * 0.3;
                    Rect::square(unit() * (1.0 - s), unit() * (1.0 - s), s)
                })
                .collect();
            let mut grid = GridIndex::new();
            for (i, r) in rects.iter().enumerate() {
                grid.insert(i as u32, r);
            }
            for _ in 0..20 {
                let s = 0.01 + unit() * 0.3;
                let q = Rect::square(unit() * (1.0 - s), unit() * (1.0 - s), s);
                let brute = rects.iter().any(|r| rects_overlap(r, &q));
                let fast = grid.find_overlap(&q, |i| rects[i as usize]).is_some();
                assert_eq!(brute, fast);
            }
        }
    }
}
