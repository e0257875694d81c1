//! Fuzz campaigns: generated sequences through independent packers, audited.

use std::fmt;
use std::thread;

use serde::Serialize;

use squarepack::verifier::{audit_all, audit_geometry};
use squarepack::{generate, Distribution, Packer, PlacementOutcome, SequenceSpec};

#[derive(Debug, Clone)]
pub struct FuzzOptions {
    pub runs: u64,
    /// First seed; run `i` uses `seed + i`.
    pub seed: u64,
    pub dists: Vec<Distribution>,
    pub budget: f64,
    pub audit_all: bool,
    pub max_squares: usize,
    pub jobs: usize,
}

impl Default for FuzzOptions {
    fn default() -> Self {
        FuzzOptions {
            runs: 1000,
            seed: 0,
            dists: Distribution::RANDOM.to_vec(),
            budget: squarepack::GUARANTEED_AREA,
            audit_all: true,
            max_squares: 10_000,
            jobs: thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FailureKind {
    Rejected {
        index: usize,
        height: f64,
        reason: String,
    },
    Audit {
        report: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub dist: &'static str,
    pub seed: u64,
    #[serde(flatten)]
    pub kind: FailureKind,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "seed {} dist {}: ", self.seed, self.dist)?;
        match &self.kind {
            FailureKind::Rejected {
                index,
                height,
                reason,
            } => write!(f, "square {index} (height {height}) rejected: {reason}"),
            FailureKind::Audit { report } => write!(f, "{}", report.trim_end()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub dist: &'static str,
    pub seed: u64,
    pub squares: usize,
    pub area: f64,
    pub failure: Option<Failure>,
    pub pair_close_area: Option<f64>,
    pub pair_close_area_before: Option<f64>,
    pub max_large_reservation: Option<f64>,
}

pub fn run_one(
    dist: &Distribution,
    seed: u64,
    budget: f64,
    full_audit: bool,
    max_squares: usize,
) -> RunResult {
    let spec = SequenceSpec {
        seed,
        budget,
        distribution: dist.clone(),
        max_squares,
    };
    let seq = generate(&spec);
    let mut packer = Packer::default();
    let mut result = RunResult {
        dist: dist.name(),
        seed,
        squares: seq.len(),
        area: squarepack::generate::total_area(&seq),
        failure: None,
        pair_close_area: None,
        pair_close_area_before: None,
        max_large_reservation: None,
    };
    if let Err((index, out)) = packer.place_all(&seq) {
        let reason = match out {
            PlacementOutcome::Rejected { reason, detail } => format!("{}: {detail}", reason.as_str()),
            PlacementOutcome::Placed(_) => unreachable!(),
        };
        result.failure = Some(Failure {
            dist: dist.name(),
            seed,
            kind: FailureKind::Rejected {
                index,
                height: seq[index],
                reason,
            },
        });
        return result;
    }
    let snap = packer.snapshot();
    let report = if full_audit {
        audit_all(&snap)
    } else {
        audit_geometry(&snap)
    };
    result.pair_close_area = report.stats.pair_close_area;
    result.pair_close_area_before = report.stats.pair_close_area_before;
    result.max_large_reservation = report.stats.max_large_reservation;
    if !report.passed() {
        result.failure = Some(Failure {
            dist: dist.name(),
            seed,
            kind: FailureKind::Audit {
                report: report.to_string(),
            },
        });
    }
    result
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DistSummary {
    pub dist: &'static str,
    pub runs: u64,
    pub packed: u64,
    pub audit_failures: u64,
    pub squares: usize,
    pub pair_closes: u64,
    pub min_pair_close_area: Option<f64>,
    pub min_pair_close_area_before: Option<f64>,
    pub max_large_reservation: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FuzzSummary {
    pub dists: Vec<DistSummary>,
    pub failures: Vec<Failure>,
}

impl FuzzSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn fold_min(acc: Option<f64>, v: Option<f64>) -> Option<f64> {
    match (acc, v) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

fn fold_max(acc: Option<f64>, v: Option<f64>) -> Option<f64> {
    match (acc, v) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    }
}

fn summarize(dist: &'static str, results: &[RunResult]) -> DistSummary {
    let mut s = DistSummary {
        dist,
        runs: results.len() as u64,
        ..DistSummary::default()
    };
    for r in results {
        s.squares += r.squares;
        match &r.failure {
            None => s.packed += 1,
            Some(Failure {
                kind: FailureKind::Audit { .. },
                ..
            }) => {
                s.packed += 1;
                s.audit_failures += 1;
            }
            Some(_) => {}
        }
        if r.pair_close_area.is_some() {
            s.pair_closes += 1;
        }
        s.min_pair_close_area = fold_min(s.min_pair_close_area, r.pair_close_area);
        s.min_pair_close_area_before =
            fold_min(s.min_pair_close_area_before, r.pair_close_area_before);
        s.max_large_reservation = fold_max(s.max_large_reservation, r.max_large_reservation);
    }
    s
}

/// Runs the campaign, sharding seeds across `opts.jobs` threads. Results do
/// not depend on the number of threads.
pub fn run(opts: &FuzzOptions) -> FuzzSummary {
    let mut summary = FuzzSummary::default();
    let jobs = opts.jobs.max(1) as u64;
    for dist in &opts.dists {
        let chunk = opts.runs.div_ceil(jobs).max(1);
        let mut results: Vec<RunResult> = thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs)
                .map(|j| {
                    let lo = (j * chunk).min(opts.runs);
                    let hi = ((j + 1) * chunk).min(opts.runs);
                    scope.spawn(move || {
                        (lo..hi)
                            .map(|i| {
                                run_one(
                                    dist,
                                    opts.seed.wrapping_add(i),
                                    opts.budget,
                                    opts.audit_all,
                                    opts.max_squares,
                                )
                            })
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("fuzz worker panicked"))
                .collect()
        });
        results.sort_by_key(|r| r.seed);
        summary.dists.push(summarize(dist.name(), &results));
        summary
            .failures
            .extend(results.into_iter().filter_map(|r| r.failure));
    }
    summary
}

impl fmt::Display for FuzzSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.dists {
            write!(
                f,
                "{:<17} {}/{} packed, {} audit failures, {} squares",
                d.dist, d.packed, d.runs, d.audit_failures, d.squares
            )?;
            if let Some(a) = d.min_pair_close_area {
                write!(f, ", min pair-close area {a:.6} ({} closes)", d.pair_closes)?;
            }
            if let Some(l) = d.max_large_reservation {
                write!(f, ", max reservation {l:.6}")?;
            }
            writeln!(f)?;
        }
        for fail in &self.failures {
            writeln!(f, "FAIL {fail}")?;
        }
        Ok(())
    }
}
