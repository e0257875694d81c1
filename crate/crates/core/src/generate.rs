//! Seeded input-sequence generators.
//!
//! The random source is xoshiro256** seeded through SplitMix64
//! (`0x9E3779B97F4A7C15`, `0xBF58476D1CE4E5B9`, `0x94D049BB133111EB`).
//! Uniform doubles take the top 53 bits of each output: `(x >> 11) * 2^-53`.
//! Both are fixed by their published definitions, so a seed alone replays a
//! sequence in any implementation.
//!
//! Every generated height is rounded to 12 decimal places so sequences
//! survive a round trip through the plain-text sequence format unchanged.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use serde::{Deserialize, Serialize};

use crate::classes::class_params;
use crate::packer::GUARANTEED_AREA;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    /// Heights uniform on `(0, min(1, sqrt(budget))]`.
    Uniform,
    /// Heights within 1% of a class edge.
    ClassBoundary,
    MediumHeavy,
    VerySmallHeavy,
    Mixed,
    Scripted(Vec<f64>),
}

impl Distribution {
    pub const RANDOM: [Distribution; 5] = [
        Distribution::Uniform,
        Distribution::ClassBoundary,
        Distribution::MediumHeavy,
        Distribution::VerySmallHeavy,
        Distribution::Mixed,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Distribution::Uniform => "uniform",
            Distribution::ClassBoundary => "class_boundary",
            Distribution::MediumHeavy => "medium_heavy",
            Distribution::VerySmallHeavy => "very_small_heavy",
            Distribution::Mixed => "mixed",
            Distribution::Scripted(_) => "scripted",
        }
    }

    pub fn from_name(name: &str) -> Option<Distribution> {
        Distribution::RANDOM
            .into_iter()
            .find(|d| d.name() == name.replace('-', "_"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub seed: u64,
    pub budget: f64,
    pub distribution: Distribution,
    pub max_squares: usize,
}

impl SequenceSpec {
    pub fn new(seed: u64, distribution: Distribution) -> Self {
        SequenceSpec {
            seed,
            budget: GUARANTEED_AREA,
            distribution,
            max_squares: 10_000,
        }
    }

    pub fn with_budget(mut self, budget: f64) -> Self {
        self.budget = budget;
        self
    }
}

/// Deterministic random source shared by generators and adversaries.
#[derive(Debug, Clone)]
pub struct SeqRng(Xoshiro256StarStar);

impl SeqRng {
    pub fn new(seed: u64) -> Self {
        SeqRng(Xoshiro256StarStar::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(lo, hi]`.
    pub fn open_closed(&mut self, lo: f64, hi: f64) -> f64 {
        hi - (hi - lo) * self.unit()
    }

    /// Log-uniform in `[lo, hi)`.
    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        (lo.ln() + (hi.ln() - lo.ln()) * self.unit()).exp()
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}

/// Rounds to 12 decimal places, the resolution of the sequence format.
pub fn round_height(h: f64) -> f64 {
    format!("{h:.12}").parse().expect("formatted float")
}

fn very_small(rng: &mut SeqRng, floor: f64) -> f64 {
    rng.log_uniform(floor, 0.125)
}

fn draw(dist: &Distribution, budget: f64, rng: &mut SeqRng) -> f64 {
    match dist {
        Distribution::Uniform => rng.open_closed(0.0, budget.sqrt().min(1.0)),
        Distribution::ClassBoundary => class_edge(rng),
        Distribution::MediumHeavy => match rng.unit() {
            u if u < 0.6 => rng.open_closed(0.25, 0.5),
            u if u < 0.85 => rng.open_closed(0.125, 0.25),
            _ => very_small(rng, 1e-3),
        },
        Distribution::VerySmallHeavy => {
            if rng.unit() < 0.85 {
                very_small(rng, 2e-3)
            } else {
                rng.open_closed(0.125, 0.25)
            }
        }
        Distribution::Mixed => match rng.unit() {
            u if u < 0.04 => rng.open_closed(0.5, GUARANTEED_AREA.sqrt()),
            u if u < 0.20 => rng.open_closed(0.25, 0.5),
            u if u < 0.55 => rng.open_closed(0.125, 0.25),
            _ => very_small(rng, 1e-3),
        },
        Distribution::Scripted(_) => unreachable!("scripted sequences are not drawn"),
    }
}

/// A height `edge * (1 + d)` or `edge * (1 - d)` next to a class boundary,
/// with `d` log-uniform in `[1e-6, 1e-2]`.
fn class_edge(rng: &mut SeqRng) -> f64 {
    let delta = rng.log_uniform(1e-6, 1e-2);
    let upper = rng.unit() < 0.5;
    let (lo, hi) = match rng.unit() {
        u if u < 0.03 => return 0.5 * (1.0 + delta),
        u if u < 0.20 => (0.25, 0.5),
        u if u < 0.50 => (0.125, 0.25),
        _ => {
            let p = class_params(1 + rng.below(10) as u32);
            (p.min_height, p.max_height)
        }
    };
    if upper {
        hi * (1.0 - delta)
    } else {
        lo * (1.0 + delta)
    }
}

/// Generates the sequence described by `spec`. Stops before the first height
/// whose area would push the total above the budget.
pub fn generate(spec: &SequenceSpec) -> Vec<f64> {
    let mut rng = SeqRng::new(spec.seed);
    let mut total = 0.0;
    let mut out = Vec::new();
    let mut scripted = match &spec.distribution {
        Distribution::Scripted(v) => Some(v.iter().copied()),
        _ => None,
    };
    while out.len() < spec.max_squares {
        let h = match scripted.as_mut() {
            Some(it) => match it.next() {
                Some(h) => h,
                None => break,
            },
            None => round_height(draw(&spec.distribution, spec.budget, &mut rng)),
        };
        if total + h * h > spec.budget {
            break;
        }
        total += h * h;
        out.push(h);
    }
    out
}

pub fn total_area(heights: &[f64]) -> f64 {
    heights.iter().map(|h| h * h).sum()
}
