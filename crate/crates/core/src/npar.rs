//! Distribution-free prediction: order-statistic intervals and conformal
//! regions.
//!
//! The order-statistic interval spans two order statistics of the observed
//! sample and covers an independent future observation from the same
//! continuous distribution with probability exactly (s - r) / (n + 1),
//! with no assumption beyond i.i.d. sampling. The conformal region inverts
//! a rank test on a nonconformity score: a candidate point joins the region
//! while the left limit of the leave-one-out empirical cdf of scores,
//! evaluated at the candidate's own score, stays below 1 - alpha. Without
//! randomization the region is conservative; blending the left limit with
//! the cdf value through one shared uniform draw per call makes it exact
//! under exchangeability.
//!
//! Regions are reported as disjoint closed intervals clipped to a search
//! window spanning the sample range plus three ranges on each side. The
//! built-in measures take an analytic path: their score profiles are
//! piecewise affine in the candidate, so interval endpoints are roots of
//! linear equations rather than grid points. Custom measures are scanned on
//! an even grid over the same window, which bounds endpoint resolution by
//! the grid step.

use alloc::string::String;
use alloc::vec::Vec;

// Needed for float math in no_std builds; in test builds a dev-dependency
// links std, which makes it redundant.
#[allow(unused_imports)]
use num_traits::Float;

use rand::Rng;
use rand_distr::Open01;

use crate::error::{Error, Result};
use crate::rng::{Lane, RngPolicy};

/// Evaluation points for the grid scan behind custom measures.
const GRID_POINTS: usize = 10_000;

/// Search-window margin in units of the sample range.
const WINDOW_MARGIN: f64 = 3.0;

/// Distance statistic scoring how poorly a candidate point conforms to a
/// data set. Scores must be nonnegative and must not depend on the ordering
/// of the data set.
#[derive(Clone, Copy)]
pub enum NonconformityMeasure<'a> {
    /// Absolute deviation from the data-set mean.
    MeanDeviation,
    /// Absolute deviation from the data-set median.
    MedianDeviation,
    /// A caller-supplied measure evaluated as `score(data, point)`.
    Custom {
        /// Identifier echoed into the region report.
        name: &'a str,
        /// The score function.
        score: &'a dyn Fn(&[f64], f64) -> f64,
    },
}

impl NonconformityMeasure<'_> {
    /// Identifier of the measure.
    pub fn name(&self) -> &str {
        match self {
            NonconformityMeasure::MeanDeviation => "mean_deviation",
            NonconformityMeasure::MedianDeviation => "median_deviation",
            NonconformityMeasure::Custom { name, .. } => name,
        }
    }

    /// Evaluates the measure on a nonempty data set.
    pub fn score(&self, data: &[f64], point: f64) -> f64 {
        match self {
            NonconformityMeasure::MeanDeviation => (mean(data) - point).abs(),
            NonconformityMeasure::MedianDeviation => {
                let mut copy = data.to_vec();
                copy.sort_unstable_by(f64::total_cmp);
                (sorted_median(&copy) - point).abs()
            }
            NonconformityMeasure::Custom { score, .. } => score(data, point),
        }
    }
}

/// Interval between two order statistics of the sample.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OrderStatInterval {
    /// The r-th order statistic.
    pub lower: f64,
    /// The s-th order statistic.
    pub upper: f64,
    /// Exact coverage (s - r) / (n + 1) under continuous i.i.d. sampling.
    pub coverage: f64,
    /// True when the sample contains exactly equal values; ties violate the
    /// continuity assumption behind the exact coverage, so treat the stated
    /// coverage as approximate.
    pub tied: bool,
}

impl OrderStatInterval {
    /// Containment check; the endpoint distinction carries no probability
    /// under continuous sampling.
    pub fn contains(&self, y: f64) -> bool {
        self.lower <= y && y <= self.upper
    }
}

/// The interval between the order statistics of ranks `r` and `s`, together
/// with its exact distribution-free coverage. Ranks are one-based and must
/// satisfy 1 <= r < s <= n.
pub fn order_stat_interval(sample: &[f64], r: usize, s: usize) -> Result<OrderStatInterval> {
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(String::from("sample values must be finite")));
    }
    let n = sample.len();
    if !(1 <= r && r < s && s <= n) {
        return Err(Error::InvalidArgument(String::from(
            "order-statistic ranks must satisfy 1 <= r < s <= n",
        )));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let tied = sorted.windows(2).any(|w| w[0] == w[1]);
    Ok(OrderStatInterval {
        lower: sorted[r - 1],
        upper: sorted[s - 1],
        coverage: (s - r) as f64 / (n + 1) as f64,
        tied,
    })
}

/// Closed interval on the real line.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RealInterval {
    /// Left endpoint.
    pub lower: f64,
    /// Right endpoint; equal to `lower` for a single-point interval.
    pub upper: f64,
}

impl RealInterval {
    /// Containment check, endpoints included.
    pub fn contains(&self, y: f64) -> bool {
        self.lower <= y && y <= self.upper
    }
}

/// Conformal prediction region restricted to the search window.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConformalRegion {
    /// Disjoint closed intervals in increasing order; empty when no point
    /// of the window satisfies the rank criterion.
    pub intervals: Vec<RealInterval>,
    /// The search window the region was evaluated over.
    pub window: RealInterval,
    /// Identifier of the nonconformity measure.
    pub measure: String,
    /// Error probability the region targets.
    pub alpha: f64,
    /// Whether the jump-randomized criterion was used.
    pub randomized: bool,
    /// The shared uniform draw behind a randomized region.
    pub u: Option<f64>,
}

impl ConformalRegion {
    /// True when the region contains `y`.
    pub fn contains(&self, y: f64) -> bool {
        self.intervals.iter().any(|piece| piece.contains(y))
    }

    /// True when the region has no points.
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// The 1 - alpha conformal prediction region for a future observation.
///
/// A candidate y is in the region when fewer than (1 - alpha)(n + 1) of the
/// n + 1 leave-one-out scores fall strictly below the candidate's own score
/// d(sample, y); with `randomize` the tied scores enter fractionally through
/// a single uniform draw from the `Conformal` lane, which makes the coverage
/// exact rather than conservative. An empty region is a valid outcome, not
/// an error. The seeding policy is required only when `randomize` is set.
pub fn conformal_region(
    sample: &[f64],
    measure: &NonconformityMeasure<'_>,
    alpha: f64,
    randomize: bool,
    policy: Option<&RngPolicy>,
) -> Result<ConformalRegion> {
    if sample.is_empty() {
        return Err(Error::InvalidArgument(String::from("sample must be nonempty")));
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(String::from("sample values must be finite")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidProbability { value: alpha });
    }
    let u = if randomize {
        let policy = policy.ok_or_else(|| {
            Error::InvalidArgument(String::from(
                "randomized conformal prediction requires a seeding policy",
            ))
        })?;
        let mut rng = policy.substream(Lane::Conformal, 0);
        let draw: f64 = rng.sample(Open01);
        Some(draw)
    } else {
        None
    };

    let mut sorted = sample.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len();
    let range = sorted[n - 1] - sorted[0];
    let span = if range > 0.0 { range } else { 1.0 };
    let lo = sorted[0] - WINDOW_MARGIN * span;
    let hi = sorted[n - 1] + WINDOW_MARGIN * span;

    let level = 1.0 - alpha;
    let denom = (n + 1) as f64;
    let u_eff = u.unwrap_or(0.0);
    let decide =
        |below: usize, ties: usize| (below as f64 + u_eff * ties as f64) / denom < level;

    let intervals = match measure {
        NonconformityMeasure::MeanDeviation | NonconformityMeasure::MedianDeviation => {
            let kind = match measure {
                NonconformityMeasure::MeanDeviation => CenterKind::Mean,
                _ => CenterKind::Median,
            };
            let scorer = BuiltinScorer::new(&sorted, kind);
            let candidates = builtin_candidates(&scorer, lo, hi);
            let member = |y: f64| {
                let (below, ties) = scorer.rank_parts(y);
                decide(below, ties)
            };
            assemble(&point_and_gap_cells(&candidates, member))
        }
        NonconformityMeasure::Custom { .. } => {
            let mut scratch: Vec<f64> = Vec::with_capacity(n);
            let mut member = |y: f64| {
                let (below, ties) = custom_rank_parts(&sorted, measure, y, &mut scratch);
                decide(below, ties)
            };
            let step = (hi - lo) / (GRID_POINTS - 1) as f64;
            let cells: Vec<Cell> = (0..GRID_POINTS)
                .map(|k| {
                    let y = if k + 1 == GRID_POINTS { hi } else { lo + step * k as f64 };
                    (member(y), y, y)
                })
                .collect();
            assemble(&cells)
        }
    };

    Ok(ConformalRegion {
        intervals,
        window: RealInterval { lower: lo, upper: hi },
        measure: String::from(measure.name()),
        alpha,
        randomized: randomize,
        u,
    })
}

#[derive(Clone, Copy)]
enum CenterKind {
    Mean,
    Median,
}

/// Exact evaluation of the built-in score profiles on the sorted sample.
/// Every profile is |affine| between consecutive sample points, which is
/// what the analytic candidate search exploits.
struct BuiltinScorer<'a> {
    sorted: &'a [f64],
    total: f64,
    center: f64,
    kind: CenterKind,
}

impl<'a> BuiltinScorer<'a> {
    fn new(sorted: &'a [f64], kind: CenterKind) -> Self {
        let total: f64 = sorted.iter().sum();
        let center = match kind {
            CenterKind::Mean => total / sorted.len() as f64,
            CenterKind::Median => sorted_median(sorted),
        };
        BuiltinScorer { sorted, total, center, kind }
    }

    /// Signed gap center(leave-one-out set with y) - omitted value; the
    /// score of the omitted value is its absolute value.
    fn loo_gap(&self, omit: usize, y: f64) -> f64 {
        let omitted = self.sorted[omit];
        match self.kind {
            CenterKind::Mean => {
                (self.total - omitted + y) / self.sorted.len() as f64 - omitted
            }
            CenterKind::Median => loo_median(self.sorted, omit, y) - omitted,
        }
    }

    /// Strictly-below and tied counts of the n + 1 scores against the
    /// candidate's own score; the candidate always ties itself.
    fn rank_parts(&self, y: f64) -> (usize, usize) {
        let own = (self.center - y).abs();
        let mut below = 0;
        let mut ties = 1;
        for omit in 0..self.sorted.len() {
            let score = self.loo_gap(omit, y).abs();
            if score < own {
                below += 1;
            } else if score == own {
                ties += 1;
            }
        }
        (below, ties)
    }
}

fn custom_rank_parts(
    sorted: &[f64],
    measure: &NonconformityMeasure<'_>,
    y: f64,
    scratch: &mut Vec<f64>,
) -> (usize, usize) {
    let own = measure.score(sorted, y);
    let mut below = 0;
    let mut ties = 1;
    for omit in 0..sorted.len() {
        scratch.clear();
        scratch.extend_from_slice(&sorted[..omit]);
        scratch.extend_from_slice(&sorted[omit + 1..]);
        scratch.push(y);
        let score = measure.score(scratch, sorted[omit]);
        if score < own {
            below += 1;
        } else if score == own {
            ties += 1;
        }
    }
    (below, ties)
}

/// Membership can change only where some score profile crosses the
/// candidate's own score. Three passes pin those points down exactly: the
/// sample points and the center (every kink of every profile lies there),
/// then the roots of each signed gap (the interior kinks of the absolute
/// profiles), then the crossings themselves, each found by interpolating an
/// affine piece.
fn builtin_candidates(scorer: &BuiltinScorer<'_>, lo: f64, hi: f64) -> Vec<f64> {
    let mut partition = Vec::with_capacity(scorer.sorted.len() + 3);
    partition.push(lo);
    partition.push(hi);
    partition.push(scorer.center);
    partition.extend_from_slice(scorer.sorted);
    sort_dedup(&mut partition);

    let mut refined = partition.clone();
    for omit in 0..scorer.sorted.len() {
        push_affine_roots(&partition, |y| scorer.loo_gap(omit, y), &mut refined);
    }
    sort_dedup(&mut refined);

    let mut candidates = refined.clone();
    for omit in 0..scorer.sorted.len() {
        push_affine_roots(
            &refined,
            |y| scorer.loo_gap(omit, y).abs() - (scorer.center - y).abs(),
            &mut candidates,
        );
    }
    sort_dedup(&mut candidates);
    candidates
}

/// Roots of a function that is affine between consecutive partition points,
/// by endpoint interpolation; endpoints that are themselves roots are
/// already partition points and are skipped.
fn push_affine_roots(partition: &[f64], g: impl Fn(f64) -> f64, out: &mut Vec<f64>) {
    for pair in partition.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (va, vb) = (g(a), g(b));
        if va == 0.0 || vb == 0.0 || (va > 0.0) == (vb > 0.0) {
            continue;
        }
        let root = a + (b - a) * va / (va - vb);
        if root > a && root < b {
            out.push(root);
        }
    }
}

/// Membership flag plus the closed span it certifies.
type Cell = (bool, f64, f64);

/// Cells over the candidate points and the open gaps between them. The
/// rank counts are constant on each gap, so one midpoint probe settles it;
/// gaps too narrow for a strict midpoint defer to their endpoints.
fn point_and_gap_cells(candidates: &[f64], mut member: impl FnMut(f64) -> bool) -> Vec<Cell> {
    let mut cells = Vec::with_capacity(2 * candidates.len());
    for (j, &point) in candidates.iter().enumerate() {
        let at_point = member(point);
        cells.push((at_point, point, point));
        if let Some(&next) = candidates.get(j + 1) {
            let mid = 0.5 * (point + next);
            let ok = if mid > point && mid < next {
                member(mid)
            } else {
                at_point && member(next)
            };
            cells.push((ok, point, next));
        }
    }
    cells
}

/// Merges consecutive member cells into maximal closed intervals.
fn assemble(cells: &[Cell]) -> Vec<RealInterval> {
    let mut out = Vec::new();
    let mut open: Option<RealInterval> = None;
    for &(member, a, b) in cells {
        if member {
            open = Some(match open {
                Some(run) => RealInterval { lower: run.lower, upper: b },
                None => RealInterval { lower: a, upper: b },
            });
        } else if let Some(run) = open.take() {
            out.push(run);
        }
    }
    if let Some(run) = open {
        out.push(run);
    }
    out
}

fn mean(data: &[f64]) -> f64 {
    data.iter().sum::<f64>() / data.len() as f64
}

fn sorted_median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Median of the sorted sample with index `omit` removed and `y` merged in,
/// by rank selection on the implicit merged sequence.
fn loo_median(sorted: &[f64], omit: usize, y: f64) -> f64 {
    let n = sorted.len();
    let base = |j: usize| sorted[j + usize::from(j >= omit)];
    let kept = n - 1;
    let mut before = 0;
    while before < kept && base(before) <= y {
        before += 1;
    }
    let value_at = |r: usize| {
        if r < before {
            base(r)
        } else if r == before {
            y
        } else {
            base(r - 1)
        }
    };
    if n % 2 == 1 {
        value_at(n / 2)
    } else {
        0.5 * (value_at(n / 2 - 1) + value_at(n / 2))
    }
}

fn sort_dedup(values: &mut Vec<f64>) {
    values.sort_unstable_by(f64::total_cmp);
    values.dedup();
}
