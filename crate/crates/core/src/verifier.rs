//! Independent audits of packer snapshots.
//!
//! Every audit is a pure function of a [`Snapshot`]. Geometric checks use
//! [`EPS`]; density checks use [`EPS_AREA`]. The density audits check the
//! physically measurable side of the shelf guarantees (areas actually packed
//! inside regions), not the area bookkeeping used to argue them.

use std::fmt;
use std::ops::RangeBounds;

use serde::{Deserialize, Serialize};

use crate::classes::{class_params, COLUMN_LENGTH};
use crate::geometry::{rects_overlap, Rect, EPS, EPS_AREA};
use crate::packer::{pair_region, Layout, Snapshot, GUARANTEED_AREA};
use crate::shelf::{Orientation, Shelf, ShelfItem, ShelfState};

/// Lower bound on the packed area of `p1 ∪ p2 ∪ b0 ∪` buffers once the
/// first pair closes: `2 (1/4 * 1/2 - (1/4 * 1/2)^2)`.
pub const PAIR_CLOSE_BOUND: f64 = 7.0 / 32.0;

/// Cumulative area up to which a large square may still arrive.
pub const LARGE_WINDOW: f64 = 1.0 / 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Overlap,
    Containment,
    ShelfClass,
    ShelfBounds,
    ShelfFlush,
    UsedBookkeeping,
    OpenColumns,
    ColumnDensity,
    ShelfDensity,
    PairClose,
    LargeReservation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub detail: String,
    pub ids: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShelfStat {
    pub label: String,
    pub used: f64,
    pub covered: f64,
    pub state: ShelfState,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditStats {
    pub total_area: f64,
    pub placements: usize,
    pub shelves: Vec<ShelfStat>,
    /// Packed area of the pair region right after `p1`/`p2` closed.
    pub pair_close_area: Option<f64>,
    /// Same, excluding the square that closed them.
    pub pair_close_area_before: Option<f64>,
    /// Smallest `credited - bound` over closed columns.
    pub min_column_margin: Option<f64>,
    /// Smallest fill-inequality margin over closed square-only shelves.
    pub min_shelf_margin: Option<f64>,
    /// Largest `l_u + sqrt(3/8 - area)` over prefixes inside the large window.
    pub max_large_reservation: Option<f64>,
    pub closed_shelves_skipped: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub violations: Vec<Violation>,
    pub stats: AuditStats,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn violation(&mut self, rule: Rule, detail: String, ids: Vec<usize>) {
        self.violations.push(Violation { rule, detail, ids });
    }

    /// Folds `other` into `self`. Stats that are `None` in `other` are kept.
    pub fn merge(&mut self, other: AuditReport) {
        self.violations.extend(other.violations);
        let o = other.stats;
        let s = &mut self.stats;
        if o.placements > 0 || s.placements == 0 {
            s.total_area = o.total_area;
            s.placements = o.placements;
        }
        if !o.shelves.is_empty() {
            s.shelves = o.shelves;
        }
        s.pair_close_area = o.pair_close_area.or(s.pair_close_area);
        s.pair_close_area_before = o.pair_close_area_before.or(s.pair_close_area_before);
        s.min_column_margin = o.min_column_margin.or(s.min_column_margin);
        s.min_shelf_margin = o.min_shelf_margin.or(s.min_shelf_margin);
        s.max_large_reservation = o.max_large_reservation.or(s.max_large_reservation);
        s.closed_shelves_skipped += o.closed_shelves_skipped;
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.stats;
        writeln!(
            f,
            "audit: {} ({} violations), {} squares, area {:.9}",
            if self.passed() { "pass" } else { "FAIL" },
            self.violations.len(),
            s.placements,
            s.total_area
        )?;
        if let Some(a) = s.pair_close_area {
            writeln!(f, "  pair-close region area {a:.9} (bound {PAIR_CLOSE_BOUND})")?;
        }
        if let Some(m) = s.min_column_margin {
            writeln!(f, "  min closed-column margin {m:.3e}")?;
        }
        if let Some(m) = s.min_shelf_margin {
            writeln!(f, "  min closed-shelf margin {m:.3e}")?;
        }
        if let Some(l) = s.max_large_reservation {
            writeln!(f, "  max large reservation {l:.9} (bound 1)")?;
        }
        for v in &self.violations {
            writeln!(f, "  [{:?}] {} ids={:?}", v.rule, v.detail, v.ids)?;
        }
        Ok(())
    }
}

/// All overlapping index pairs, checked pair by pair.
pub fn brute_force_overlaps(rects: &[Rect]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..rects.len() {
        for j in i + 1..rects.len() {
            if rects_overlap(&rects[i], &rects[j]) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Same result as [`brute_force_overlaps`] (pairs with `i < j`, sorted),
/// using a sweep over x.
pub fn sweep_overlaps(rects: &[Rect]) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..rects.len()).collect();
    order.sort_by(|&a, &b| rects[a].x.total_cmp(&rects[b].x));
    let mut out = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        let a = &rects[i];
        for &j in &order[pos + 1..] {
            let b = &rects[j];
            if b.x >= a.right() - EPS {
                break;
            }
            if rects_overlap(a, b) {
                out.push((i.min(j), i.max(j)));
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn audit_geometry(snap: &Snapshot) -> AuditReport {
    let mut report = AuditReport::default();
    let rects: Vec<Rect> = snap.placements.iter().map(|p| p.rect()).collect();
    for (p, r) in snap.placements.iter().zip(&rects) {
        if !Rect::UNIT.contains(r, EPS) {
            report.violation(
                Rule::Containment,
                format!("square {} at {r:?} leaves the container", p.id),
                vec![p.id],
            );
        }
    }
    for (i, j) in sweep_overlaps(&rects) {
        let (a, b) = (&snap.placements[i], &snap.placements[j]);
        report.violation(
            Rule::Overlap,
            format!("squares {} and {} overlap", a.id, b.id),
            vec![a.id, b.id],
        );
    }
    report.stats.placements = snap.placements.len();
    report.stats.total_area = snap.placements.iter().map(|p| p.area()).sum();
    report
}

pub fn audit_shelf_discipline(snap: &Snapshot) -> AuditReport {
    let mut report = AuditReport::default();
    let by_id: std::collections::HashMap<usize, usize> = snap
        .placements
        .iter()
        .enumerate()
        .map(|(i, p)| (p.id, i))
        .collect();

    for shelf in &snap.shelves {
        check_shelf(snap, shelf, &by_id, &mut report);
        report.stats.shelves.push(ShelfStat {
            label: shelf.label.clone(),
            used: shelf.used,
            covered: shelf.square_area(),
            state: shelf.state,
        });
    }

    // every shelf-resident placement appears in its shelf
    for p in &snap.placements {
        let Some(sid) = p.shelf_id else { continue };
        let Some(shelf) = snap.shelves.get(sid.0 as usize) else {
            report.violation(
                Rule::ShelfBounds,
                format!("square {} refers to unknown shelf {sid}", p.id),
                vec![p.id],
            );
            continue;
        };
        let found = shelf.items.iter().find(|it| {
            matches!(it.item, ShelfItem::Square { id, .. } if id == p.id)
        });
        match found {
            Some(it) if it.rect == p.rect() => {}
            _ => report.violation(
                Rule::ShelfBounds,
                format!("square {} not recorded at its position in {}", p.id, shelf.label),
                vec![p.id],
            ),
        }
    }

    let mut open_per_class = std::collections::BTreeMap::<u32, usize>::new();
    for s in &snap.shelves {
        if s.orientation == Orientation::Vertical && s.is_open() {
            *open_per_class.entry(s.class_k).or_default() += 1;
        }
    }
    for (k, n) in open_per_class {
        if n > 1 {
            report.violation(
                Rule::OpenColumns,
                format!("{n} open columns for subclass c{k}"),
                vec![],
            );
        }
    }
    report
}

fn check_shelf(
    snap: &Snapshot,
    shelf: &Shelf,
    by_id: &std::collections::HashMap<usize, usize>,
    report: &mut AuditReport,
) {
    let mut used = 0.0;
    for it in &shelf.items {
        let expected_origin = match shelf.orientation {
            Orientation::Horizontal => (shelf.rect.x + used, shelf.rect.y),
            Orientation::Vertical => (shelf.rect.x, shelf.rect.y + used),
        };
        let ids = match it.item {
            ShelfItem::Square { id, .. } => vec![id],
            ShelfItem::Column { .. } => vec![],
        };
        if (it.rect.x - expected_origin.0).abs() > EPS || (it.rect.y - expected_origin.1).abs() > EPS {
            report.violation(
                Rule::ShelfFlush,
                format!("item at {:?} in {} is not flush", it.rect, shelf.label),
                ids.clone(),
            );
        }
        if !shelf.rect.contains(&it.rect, EPS) {
            report.violation(
                Rule::ShelfBounds,
                format!("item at {:?} leaves {}", it.rect, shelf.label),
                ids.clone(),
            );
        }
        match it.item {
            ShelfItem::Square { id, height } => {
                if !shelf.admits(height) {
                    let (lo, hi) = shelf.admissible();
                    report.violation(
                        Rule::ShelfClass,
                        format!(
                            "square {id} of height {height} in {} outside ({lo}, {hi}]",
                            shelf.label
                        ),
                        vec![id],
                    );
                }
                if !by_id.contains_key(&id) {
                    report.violation(
                        Rule::ShelfBounds,
                        format!("{} lists unknown square {id}", shelf.label),
                        vec![id],
                    );
                }
            }
            ShelfItem::Column { shelf: col, width } => match snap.shelves.get(col.0 as usize) {
                Some(c) if c.orientation == Orientation::Vertical => {
                    if width != c.height || c.rect != it.rect {
                        report.violation(
                            Rule::ShelfBounds,
                            format!("column {} misplaced in {}", c.label, shelf.label),
                            vec![],
                        );
                    }
                }
                _ => report.violation(
                    Rule::ShelfBounds,
                    format!("{} hosts unknown column {col}", shelf.label),
                    vec![],
                ),
            },
        }
        used += it.item.extent();
    }
    if used != shelf.used {
        report.violation(
            Rule::UsedBookkeeping,
            format!("{} used {} but items sum to {used}", shelf.label, shelf.used),
            vec![],
        );
    }
    if shelf.used > shelf.length + EPS {
        report.violation(
            Rule::UsedBookkeeping,
            format!("{} used {} beyond length {}", shelf.label, shelf.used, shelf.length),
            vec![],
        );
    }
}

/// Closed columns must be credited at least half their area, counting the
/// part of the closing square above the `h r` line. Closed horizontal
/// shelves holding only squares must satisfy the shelf-filling bound
/// `P + e^2 > l h r - (h r)^2 + e h r`.
pub fn audit_closed_shelf_density(snap: &Snapshot) -> AuditReport {
    let mut report = AuditReport::default();
    let mut min_col: Option<f64> = None;
    let mut min_shelf: Option<f64> = None;
    for s in snap.shelves.iter().filter(|s| s.state == ShelfState::Closed) {
        let ids: Vec<usize> = s
            .items
            .iter()
            .filter_map(|it| match it.item {
                ShelfItem::Square { id, .. } => Some(id),
                ShelfItem::Column { .. } => None,
            })
            .collect();
        let packed = s.square_area();
        let hr = class_params(s.class_k).min_height;
        match s.orientation {
            Orientation::Vertical => {
                let closer = s.closure.map(|c| c.extent).unwrap_or(0.0);
                let credited = packed + closer * (closer - hr).max(0.0);
                let bound = 0.5 * s.height * COLUMN_LENGTH;
                let margin = credited - bound;
                min_col = Some(min_col.map_or(margin, |m: f64| m.min(margin)));
                if margin < -EPS_AREA {
                    report.violation(
                        Rule::ColumnDensity,
                        format!(
                            "closed column {} credited {credited:.9} < {bound:.9}",
                            s.label
                        ),
                        ids,
                    );
                }
            }
            Orientation::Horizontal => {
                let Some(c) = s.closure else { continue };
                if c.square.is_none() || !s.holds_only_squares() || !s.admits(c.extent) {
                    report.stats.closed_shelves_skipped += 1;
                    continue;
                }
                let lhs = packed + c.extent * c.extent;
                let rhs = shelf_fill_bound(c.effective_length, s.height, s.ratio, c.extent);
                let margin = lhs - rhs;
                min_shelf = Some(min_shelf.map_or(margin, |m: f64| m.min(margin)));
                if margin <= -EPS_AREA {
                    report.violation(
                        Rule::ShelfDensity,
                        format!("closed shelf {} holds {lhs:.9} <= bound {rhs:.9}", s.label),
                        ids,
                    );
                }
            }
        }
    }
    report.stats.min_column_margin = min_col;
    report.stats.min_shelf_margin = min_shelf;
    report
}

/// `l h r - (h r)^2 + e h r`.
pub fn shelf_fill_bound(length: f64, height: f64, ratio: f64, closer: f64) -> f64 {
    let hr = height * ratio;
    length * hr - hr * hr + closer * hr
}

/// Packed area inside the pair region among squares with id in `ids`.
pub fn pair_region_area(snap: &Snapshot, ids: impl RangeBounds<usize>) -> f64 {
    let regions = pair_region(&Layout::standard(), &snap.shelves, &snap.buffer_columns);
    snap.placements
        .iter()
        .filter(|p| ids.contains(&p.id))
        .map(|p| {
            let r = p.rect();
            regions.iter().map(|g| g.intersection_area(&r)).sum::<f64>()
        })
        .sum()
}

/// Checks the pair region once the square that closed `p1`/`p2` has been
/// placed. The area held just before that square is kept as a statistic.
pub fn audit_pair_close(snap: &Snapshot) -> AuditReport {
    let mut report = AuditReport::default();
    let Some(pc) = snap.pair_close else {
        return report;
    };
    let before = pair_region_area(snap, ..pc.closer_id);
    let area = pair_region_area(snap, ..=pc.closer_id);
    report.stats.pair_close_area = Some(area);
    report.stats.pair_close_area_before = Some(before);
    if area < PAIR_CLOSE_BOUND - EPS_AREA {
        report.violation(
            Rule::PairClose,
            format!("pair region holds {area:.9} < 7/32 when p1/p2 closed"),
            vec![pc.closer_id],
        );
    }
    if (before - pc.region_area).abs() > EPS_AREA {
        report.violation(
            Rule::PairClose,
            format!(
                "recorded pair-close area {} disagrees with recomputed {before}",
                pc.region_area
            ),
            vec![pc.closer_id],
        );
    }
    report
}

/// `l_u + sqrt(3/8 - area)`: the longest used length of `p1`/`p2` plus the
/// side of the largest square the remaining budget allows.
pub fn large_reservation_lhs(longest_used: f64, cumulative_area: f64) -> f64 {
    longest_used + (GUARANTEED_AREA - cumulative_area).max(0.0).sqrt()
}

pub fn audit_large_reservation(snap: &Snapshot) -> AuditReport {
    let mut report = AuditReport::default();
    let mut worst = large_reservation_lhs(0.0, 0.0);
    for stat in snap
        .prefix
        .iter()
        .filter(|s| s.cumulative_area <= LARGE_WINDOW)
    {
        let lhs = large_reservation_lhs(stat.used_p1.max(stat.used_p2), stat.cumulative_area);
        worst = worst.max(lhs);
        if lhs > 1.0 + EPS_AREA {
            report.violation(
                Rule::LargeReservation,
                format!(
                    "after square {}: l_u {} + sqrt(3/8 - {}) = {lhs} > 1",
                    stat.id,
                    stat.used_p1.max(stat.used_p2),
                    stat.cumulative_area
                ),
                vec![stat.id],
            );
        }
    }
    report.stats.max_large_reservation = Some(worst);
    report
}

/// Runs every audit.
pub fn audit_all(snap: &Snapshot) -> AuditReport {
    let mut report = audit_geometry(snap);
    report.merge(audit_shelf_discipline(snap));
    report.merge(audit_closed_shelf_density(snap));
    report.merge(audit_pair_close(snap));
    report.merge(audit_large_reservation(snap));
    report
}

/// Result of filling one synthetic shelf until the first square fails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShelfFillTrial {
    pub height: f64,
    pub ratio: f64,
    pub length: f64,
    pub packed_area: f64,
    pub closer: f64,
    pub bound: f64,
}

impl ShelfFillTrial {
    /// `packed + closer^2 - bound`; positive when the inequality holds.
    pub fn margin(&self) -> f64 {
        self.packed_area + self.closer * self.closer - self.bound
    }
}

/// Fills a fresh horizontal shelf of the given dimensions with heights from
/// `draw` (each in `(h r, h]`) until one does not fit.
///
/// Returns `None` if `draw` produces an inadmissible height or the shelf
/// never closes within `max_items`.
pub fn shelf_fill_trial(
    height: f64,
    ratio: f64,
    length: f64,
    max_items: usize,
    mut draw: impl FnMut() -> f64,
) -> Option<ShelfFillTrial> {
    let hr = height * ratio;
    let mut used = 0.0;
    let mut packed = 0.0;
    for _ in 0..max_items {
        let q = draw();
        if !(q > hr && q <= height) {
            return None;
        }
        if used + q > length + EPS {
            return Some(ShelfFillTrial {
                height,
                ratio,
                length,
                packed_area: packed,
                closer: q,
                bound: shelf_fill_bound(length, height, ratio, q),
            });
        }
        used += q;
        packed += q * q;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::SizeClass;
    use crate::packer::{Packer, PlacedSquare, P1};
    use crate::shelf::{Closure, ShelfId};

    fn sq(id: usize, x: f64, y: f64, h: f64) -> PlacedSquare {
        PlacedSquare {
            id,
            height: h,
            x,
            y,
            class: crate::classes::classify(h).unwrap(),
            shelf_id: None,
        }
    }

    fn empty() -> Snapshot {
        Packer::default().snapshot()
    }

    #[test]
    fn empty_snapshot_passes() {
        assert!(audit_all(&empty()).passed());
    }

    #[test]
    fn identical_squares_overlap() {
        let mut s = empty();
        s.placements = vec![sq(0, 0.1, 0.1, 0.2), sq(1, 0.1, 0.1, 0.2)];
        let r = audit_geometry(&s);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].rule, Rule::Overlap);
    }

    #[test]
    fn outside_square_is_flagged() {
        let mut s = empty();
        s.placements = vec![sq(0, 0.9, 0.9, 0.2)];
        let r = audit_geometry(&s);
        assert_eq!(r.violations[0].rule, Rule::Containment);
    }

    #[test]
    fn small_class_violation() {
        let mut s = empty();
        let p1 = &mut s.shelves[P1.0 as usize];
        p1.items.push(crate::shelf::PlacedItem {
            item: ShelfItem::Square { id: 0, height: 0.1 },
            rect: Rect::square(0.0, 0.0, 0.1),
        });
        p1.used = 0.1;
        s.placements = vec![PlacedSquare {
            shelf_id: Some(P1),
            ..sq(0, 0.0, 0.0, 0.1)
        }];
        let r = audit_shelf_discipline(&s);
        assert!(r.violations.iter().any(|v| v.rule == Rule::ShelfClass));
    }

    #[test]
    fn square_in_p1_passes() {
        let mut p = Packer::default();
        p.place(0.25);
        p.place(0.2);
        let r = audit_shelf_discipline(&p.snapshot());
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn two_open_c2_columns() {
        let mut s = empty();
        let extra = Shelf::column(ShelfId(8), "c2.1", 0.5, 0.0, 2);
        s.shelves.push(extra);
        let r = audit_shelf_discipline(&s);
        assert!(r.violations.iter().any(|v| v.rule == Rule::OpenColumns));
    }

    fn closed_c1_column(heights: &[f64], closer: f64) -> Snapshot {
        let mut s = empty();
        let col = &mut s.shelves[crate::packer::B1.0 as usize];
        for (i, h) in heights.iter().enumerate() {
            let r = col.insert(ShelfItem::Square { id: i, height: *h }).unwrap();
            s.placements.push(PlacedSquare {
                shelf_id: Some(crate::packer::B1),
                ..sq(i, r.x, r.y, *h)
            });
        }
        col.close(Some(Closure {
            extent: closer,
            square: Some(heights.len()),
            effective_length: 0.25,
        }))
        .unwrap();
        s
    }

    #[test]
    fn c1_column_with_two_squares_passes() {
        // 2 * 0.089^2 = 0.015842 >= 0.5 * 0.125 * 0.25 = 0.015625
        let s = closed_c1_column(&[0.089, 0.089], 0.089);
        let r = audit_closed_shelf_density(&s);
        assert!(r.passed(), "{r}");
        assert!(r.stats.min_column_margin.unwrap() >= 0.015842 - 0.015625 - 1e-12);
    }

    #[test]
    fn c1_column_with_one_square_fails() {
        let s = closed_c1_column(&[0.1], 0.1);
        let r = audit_closed_shelf_density(&s);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].rule, Rule::ColumnDensity);
    }

    #[test]
    fn synthetic_shelf_of_013_squares() {
        // 0.13 * 7 = 0.91, the eighth does not fit in length 1
        let t = shelf_fill_trial(0.25, 0.5, 1.0, 100, || 0.13).unwrap();
        assert!((t.packed_area - 7.0 * 0.0169).abs() < 1e-12);
        assert!((t.bound - (0.125 - 0.015625 + 0.13 * 0.125)).abs() < 1e-12);
        assert!(t.margin() > 0.0);
    }

    #[test]
    fn reservation_examples() {
        assert_eq!(large_reservation_lhs(0.5, 0.125), 1.0);
        assert!((large_reservation_lhs(0.0, 0.0) - 0.375f64.sqrt()).abs() < 1e-15);
        assert!(large_reservation_lhs(0.0, 0.0) < 1.0);
    }

    #[test]
    fn pair_close_vacuous_without_closure() {
        let r = audit_pair_close(&empty());
        assert!(r.passed());
        assert!(r.stats.pair_close_area.is_none());
    }

    #[test]
    fn pair_close_with_quarter_squares() {
        // b0 takes one 0.25, then p1/p2 alternate: four each; the tenth closes the pair
        let mut p = Packer::default();
        for _ in 0..10 {
            assert!(p.place(0.25).is_placed());
        }
        let s = p.snapshot();
        assert_eq!(s.small_phase, crate::packer::SmallPhase::Pair34);
        let r = audit_pair_close(&s);
        assert!(r.passed(), "{r}");
        assert!((r.stats.pair_close_area.unwrap() - 9.0 * 0.0625).abs() < 1e-12);
        assert_eq!(s.placements[9].class, SizeClass::Sub(0));
        assert_eq!(r.stats.pair_close_area, r.stats.pair_close_area_before);
    }

    #[test]
    fn sweep_matches_brute_force() {
        use rand_core::{RngCore, SeedableRng};
        let mut rng = rand_xoshiro::Xoshiro256StarStar::seed_from_u64(3);
        let mut unit = move || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        for n in 0..1000 {
            let rects: Vec<Rect> = (0..(n % 50))
                .map(|_| {
                    let s = 0.005 + unit() * 0.2;
                    // snap to a coarse grid so touching edges occur often
                    let g = |v: f64| (v * 40.0).round() / 40.0;
                    Rect::square(g(unit() * (1.0 - s)), g(unit() * (1.0 - s)), g(s).max(0.025))
                })
                .collect();
            assert_eq!(brute_force_overlaps(&rects), sweep_overlaps(&rects));
        }
    }

    #[test]
    fn pair_closer_counts_once_placed() {
        // mediums leave 0.249 of bottom length; the closer lands in b0's tail
        let mut p = Packer::default();
        for h in [0.250304034946, 0.250105634189, 0.250617755352, 0.125123278616, 0.249985073799] {
            assert!(p.place(h).is_placed());
        }
        let r = audit_pair_close(&p.snapshot());
        let before = r.stats.pair_close_area_before.unwrap();
        let after = r.stats.pair_close_area.unwrap();
        assert!(before < PAIR_CLOSE_BOUND);
        assert!(after >= PAIR_CLOSE_BOUND, "{r}");
        assert!(r.passed());
    }
}
