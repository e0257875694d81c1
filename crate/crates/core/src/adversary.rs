//! Adaptive input strategies that watch the packer state and pick the next
//! height to hurt it as much as possible while staying inside the budget.

use crate::classes::class_params;
use crate::generate::round_height;
use crate::packer::{Packer, PlacementOutcome, SmallPhase, GUARANTEED_AREA, P1, P2, P3, P4};
use crate::verifier::LARGE_WINDOW;

/// Amount added to a class's lower edge to land just inside it.
const NUDGE: f64 = 1e-4;

pub trait Adversary {
    fn name(&self) -> &'static str;

    /// Next height, or `None` to stop. Must keep the total area within
    /// `budget`.
    fn next_height(&mut self, packer: &Packer, budget: f64) -> Option<f64>;
}

fn remaining(packer: &Packer, budget: f64) -> f64 {
    budget - packer.cumulative_area()
}

/// Largest height in `(lo, hi]` whose area still fits, if any.
fn affordable(packer: &Packer, budget: f64, lo: f64, hi: f64) -> Option<f64> {
    let room = remaining(packer, budget);
    if room <= 0.0 {
        return None;
    }
    let h = round_height(hi.min(room.sqrt()));
    let h = if h * h > room { h - 1e-12 } else { h };
    (h > lo).then_some(h)
}

/// Cheapest height in `(lo, hi]` if affordable.
fn cheapest(packer: &Packer, budget: f64, lo: f64) -> Option<f64> {
    let h = round_height(lo * (1.0 + NUDGE));
    (h * h <= remaining(packer, budget)).then_some(h)
}

/// Fills whatever area is left with the largest very small squares that fit
/// the budget, walking down the subclasses.
fn fill_down(packer: &Packer, budget: f64) -> Option<f64> {
    (1..12).find_map(|k| {
        let p = class_params(k);
        affordable(packer, budget, p.min_height, p.max_height)
    })
}

/// Forces the bottom half to close to mediums as early as possible, then
/// keeps playing cheap mediums on top.
#[derive(Debug, Default)]
pub struct MediumCloser;

impl Adversary for MediumCloser {
    fn name(&self) -> &'static str {
        "medium_closer"
    }

    fn next_height(&mut self, packer: &Packer, budget: f64) -> Option<f64> {
        let bottom = packer.medium_bottom();
        if bottom.state == crate::shelf::ShelfState::Open {
            let floor = packer.shelf(P1).frontier().max(packer.shelf(P2).frontier());
            let gap = bottom.left - floor;
            if gap > 0.25 && gap < 0.5 - NUDGE {
                let h = round_height(gap + NUDGE);
                if h * h <= remaining(packer, budget) {
                    return Some(h);
                }
            }
        }
        cheapest(packer, budget, 0.25)
            .or_else(|| cheapest(packer, budget, 0.125))
            .or_else(|| fill_down(packer, budget))
    }
}

/// Fills the paired shelves with the sparsest smalls, then closes each pair
/// with a square just too long for either shelf.
#[derive(Debug, Default)]
pub struct PairCloser;

impl Adversary for PairCloser {
    fn name(&self) -> &'static str {
        "pair_closer"
    }

    fn next_height(&mut self, packer: &Packer, budget: f64) -> Option<f64> {
        let pair = match packer.small_phase() {
            SmallPhase::BufferB0 => None,
            SmallPhase::Pair12 => Some((P1, P2)),
            SmallPhase::Pair34 => Some((P3, P4)),
        };
        if let Some((a, b)) = pair {
            let free = packer.free_length(a).max(packer.free_length(b));
            if free < 0.25 - NUDGE && free + NUDGE > 0.125 {
                let h = round_height(free + NUDGE);
                if h * h <= remaining(packer, budget) {
                    return Some(h);
                }
            }
        }
        cheapest(packer, budget, 0.125).or_else(|| fill_down(packer, budget))
    }
}

/// Cycles through the very small subclasses with the cheapest squares of
/// each, so that many sparse columns are open at once.
#[derive(Debug)]
pub struct ColumnChurner {
    k: u32,
    deepest: u32,
}

impl Default for ColumnChurner {
    fn default() -> Self {
        ColumnChurner { k: 1, deepest: 6 }
    }
}

impl Adversary for ColumnChurner {
    fn name(&self) -> &'static str {
        "column_churner"
    }

    fn next_height(&mut self, packer: &Packer, budget: f64) -> Option<f64> {
        for _ in 0..self.deepest {
            let k = self.k;
            self.k = if k >= self.deepest { 1 } else { k + 1 };
            if let Some(h) = cheapest(packer, budget, class_params(k).min_height) {
                return Some(h);
            }
        }
        fill_down(packer, budget)
    }
}

/// Spends just under 1/8 of area on sparse smalls that stretch the paired
/// shelves, then plays the largest possible large square.
#[derive(Debug, Default)]
pub struct LargeLate {
    large_played: bool,
}

impl Adversary for LargeLate {
    fn name(&self) -> &'static str {
        "large_late"
    }

    fn next_height(&mut self, packer: &Packer, budget: f64) -> Option<f64> {
        if !self.large_played {
            let small = round_height(0.125 * (1.0 + NUDGE));
            if packer.cumulative_area() + small * small <= LARGE_WINDOW {
                return Some(small);
            }
            self.large_played = true;
            if let Some(h) = affordable(packer, budget, 0.5, 1.0) {
                return Some(h);
            }
        }
        cheapest(packer, budget, 0.125).or_else(|| fill_down(packer, budget))
    }
}

pub fn all_adversaries() -> Vec<Box<dyn Adversary>> {
    vec![
        Box::new(MediumCloser),
        Box::new(PairCloser),
        Box::new(ColumnChurner::default()),
        Box::new(LargeLate::default()),
    ]
}

#[derive(Debug, Clone)]
pub struct AdversaryRun {
    pub name: &'static str,
    pub heights: Vec<f64>,
    /// First rejection, if any.
    pub failure: Option<(usize, PlacementOutcome)>,
}

/// Plays `adv` against `packer` until it stops, a square is rejected, or
/// `max_squares` have been played.
pub fn run_adversary(
    adv: &mut dyn Adversary,
    packer: &mut Packer,
    budget: f64,
    max_squares: usize,
) -> AdversaryRun {
    let mut heights = Vec::new();
    let mut failure = None;
    while heights.len() < max_squares {
        let Some(h) = adv.next_height(packer, budget) else {
            break;
        };
        heights.push(h);
        let out = packer.place(h);
        if !out.is_placed() {
            failure = Some((heights.len() - 1, out));
            break;
        }
    }
    AdversaryRun {
        name: adv.name(),
        heights,
        failure,
    }
}

/// Runs every adversary at the guaranteed budget on a fresh packer each.
pub fn run_all(max_squares: usize) -> Vec<(AdversaryRun, Packer)> {
    all_adversaries()
        .into_iter()
        .map(|mut adv| {
            let mut packer = Packer::default();
            let run = run_adversary(adv.as_mut(), &mut packer, GUARANTEED_AREA, max_squares);
            (run, packer)
        })
        .collect()
}
