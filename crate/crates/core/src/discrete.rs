//! Prediction bounds for binomial and Poisson counts.
//!
//! Every method returns a pair of one-sided bounds at level 1 - alpha: a
//! lower bound L with P(Y >= L) targeting 1 - alpha and an upper bound U
//! with P(Y <= U) targeting 1 - alpha. Conservative bounds invert an exact
//! conditional test and guarantee the level; the approximate-pivot bounds
//! (Nelson, Krishnamoorthy-Peng, Wang) solve a studentized inequality by
//! integer scan; Jeffreys and Hinkley bounds are quantiles of closed-form
//! predictive distributions; the fiducial bounds integrate the predictand
//! cdf against Monte Carlo draws of the fiducial parameter quantity.
//!
//! Discrete quantiles follow the convention q(p) = min{k : F(k) >= p}
//! throughout, matching the distribution kernels. The Hinkley binomial
//! bounds instead use the sup/inf conventions of their defining display,
//! which differ from plain quantiles only at exact ties.

use alloc::string::String;
use alloc::vec::Vec;

// Needed for float math in no_std builds; in test builds a dev-dependency
// links std, which makes it redundant.
#[allow(unused_imports)]
use num_traits::Float;

use rand::Rng;
use rand_distr::Open01;

use crate::dist::Kernel;
use crate::error::{Error, Result};
use crate::rng::{Lane, RngPolicy};
use crate::special;

/// Monte Carlo replicates behind the fiducial methods.
const FIDUCIAL_REPLICATES: u32 = 100_000;

/// Doubling steps allowed when bracketing an unbounded count search.
const MAX_DOUBLINGS: u32 = 40;

/// The Krishnamoorthy-Peng estimate depends on the future count. The scan
/// substitutes each candidate y into the estimate (a self-consistent scan);
/// this flag records the convention so callers can tell which variant the
/// bounds implement. The alternative of freezing y at a pilot value is not
/// provided.
pub const KP_SUBSTITUTES_CANDIDATE: bool = true;

/// An observed binomial count with a binomial predictand: x successes in n
/// past trials, bounds wanted for the success count in m future trials.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BinomialProblem {
    x: u64,
    n: u64,
    m: u64,
    alpha: f64,
}

impl BinomialProblem {
    pub fn new(x: u64, n: u64, m: u64, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(String::from("binomial data size must be at least 1")));
        }
        if m == 0 {
            return Err(Error::InvalidArgument(String::from("binomial predictand size must be at least 1")));
        }
        if x > n {
            return Err(Error::InvalidArgument(String::from("observed successes exceed the number of trials")));
        }
        check_error_probability(alpha)?;
        Ok(Self { x, n, m, alpha })
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// An observed Poisson count with a Poisson predictand: x events over
/// exposure n, bounds wanted for the event count over exposure m.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PoissonProblem {
    x: u64,
    n: f64,
    m: f64,
    alpha: f64,
}

impl PoissonProblem {
    pub fn new(x: u64, n: f64, m: f64, alpha: f64) -> Result<Self> {
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidArgument(String::from("Poisson data exposure must be finite and positive")));
        }
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidArgument(String::from(
                "Poisson predictand exposure must be finite and positive",
            )));
        }
        check_error_probability(alpha)?;
        Ok(Self { x, n, m, alpha })
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Method selector for [`binom_bounds`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BinomialMethod {
    Conservative,
    Nelson,
    Kp,
    Wang,
    Jeffreys,
    Fiducial,
    Hinkley,
}

impl BinomialMethod {
    pub fn name(self) -> &'static str {
        match self {
            BinomialMethod::Conservative => "conservative",
            BinomialMethod::Nelson => "nelson",
            BinomialMethod::Kp => "kp",
            BinomialMethod::Wang => "wang",
            BinomialMethod::Jeffreys => "jeffreys",
            BinomialMethod::Fiducial => "fiducial",
            BinomialMethod::Hinkley => "hinkley",
        }
    }
}

/// Method selector for [`pois_bounds`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PoissonMethod {
    Conservative,
    Nelson,
    Kp,
    Jeffreys,
    Fiducial,
    Hinkley,
}

impl PoissonMethod {
    pub fn name(self) -> &'static str {
        match self {
            PoissonMethod::Conservative => "conservative",
            PoissonMethod::Nelson => "nelson",
            PoissonMethod::Kp => "kp",
            PoissonMethod::Jeffreys => "jeffreys",
            PoissonMethod::Fiducial => "fiducial",
            PoissonMethod::Hinkley => "hinkley",
        }
    }
}

/// Paired one-sided prediction bounds for a future count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DiscreteBound {
    pub lower: u64,
    pub upper: u64,
    pub method: &'static str,
}

/// Computes the paired 1 - alpha binomial prediction bounds. A seeding
/// policy is required for the fiducial method and ignored by the rest.
pub fn binom_bounds(
    problem: &BinomialProblem,
    method: BinomialMethod,
    policy: Option<&RngPolicy>,
) -> Result<DiscreteBound> {
    let (lower, upper) = match method {
        BinomialMethod::Conservative => binom_conservative(problem),
        BinomialMethod::Nelson => binom_pivot(problem, PivotEstimate::Nelson)?,
        BinomialMethod::Kp => binom_pivot(problem, PivotEstimate::Kp)?,
        BinomialMethod::Wang => binom_pivot(problem, PivotEstimate::Wang)?,
        BinomialMethod::Jeffreys => binom_jeffreys(problem)?,
        BinomialMethod::Fiducial => binom_fiducial(problem, required_policy(policy)?)?,
        BinomialMethod::Hinkley => binom_hinkley(problem),
    };
    Ok(DiscreteBound { lower, upper, method: method.name() })
}

/// Computes the paired 1 - alpha Poisson prediction bounds. A seeding
/// policy is required for the fiducial method and ignored by the rest.
pub fn pois_bounds(
    problem: &PoissonProblem,
    method: PoissonMethod,
    policy: Option<&RngPolicy>,
) -> Result<DiscreteBound> {
    let (lower, upper) = match method {
        PoissonMethod::Conservative => pois_conservative(problem)?,
        PoissonMethod::Nelson => pois_pivot(problem, PivotEstimate::Nelson)?,
        PoissonMethod::Kp => pois_pivot(problem, PivotEstimate::Kp)?,
        PoissonMethod::Jeffreys => pois_predictive_quantiles(problem, problem.x as f64 + 0.5)?,
        PoissonMethod::Fiducial => pois_fiducial(problem, required_policy(policy)?)?,
        PoissonMethod::Hinkley => pois_predictive_quantiles(problem, problem.x as f64 + 1.0)?,
    };
    Ok(DiscreteBound { lower, upper, method: method.name() })
}

fn check_error_probability(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::InvalidProbability { value: alpha });
    }
    Ok(())
}

fn required_policy(policy: Option<&RngPolicy>) -> Result<&RngPolicy> {
    policy.ok_or(Error::InvalidArgument(String::from("the fiducial method requires a seeding policy")))
}

enum PivotEstimate {
    Nelson,
    Kp,
    Wang,
}

/// Inverts the conditional hypergeometric test: given X + Y, the observed
/// count is hypergeometric, and each bound collects the candidate counts the
/// test does not reject.
fn binom_conservative(p: &BinomialProblem) -> (u64, u64) {
    let phyper = |k: f64, successes: u64| {
        Kernel::Hypergeometric { successes, draws: p.n, population: p.n + p.m }.cdf(k)
    };
    let mut lower = 0;
    for y in 0..=p.m {
        if 1.0 - phyper(p.x as f64 - 1.0, p.x + y) > p.alpha {
            lower = y;
            break;
        }
    }
    let mut upper = 0;
    for y in 0..=p.m {
        if phyper(p.x as f64, p.x + y) > p.alpha {
            upper = y;
        }
    }
    (lower, upper)
}

/// Scans the studentized pivot (y - m x / n) / sd(y) over the candidate
/// counts: the lower bound is the smallest y with pivot >= -z and the upper
/// bound the largest y with pivot <= z.
fn binom_pivot(p: &BinomialProblem, estimate: PivotEstimate) -> Result<(u64, u64)> {
    if matches!(estimate, PivotEstimate::Nelson) && (p.x == 0 || p.x == p.n) {
        return Err(Error::DegenerateSample(String::from(
            "point estimate of the success probability is 0 or 1",
        )));
    }
    let n = p.n as f64;
    let m = p.m as f64;
    let x = p.x as f64;
    let z = special::norm_quantile(1.0 - p.alpha);
    let center = m * x / n;
    let adjusted_x = if p.x == 0 {
        0.5
    } else if p.x == p.n {
        n - 0.5
    } else {
        x
    };
    let pivot = |y: f64| {
        let prob = match estimate {
            PivotEstimate::Nelson => x / n,
            PivotEstimate::Kp => (adjusted_x + y) / (n + m),
            PivotEstimate::Wang => (x + y + 0.5 * z * z) / (n + m + z * z),
        };
        (y - center) / ((n + m) * (m / n) * prob * (1.0 - prob)).sqrt()
    };
    let mut lower = None;
    let mut upper = None;
    for y in 0..=p.m {
        let value = pivot(y as f64);
        if lower.is_none() && value >= -z {
            lower = Some(y);
        }
        if value <= z {
            upper = Some(y);
        }
    }
    match (lower, upper) {
        (Some(lower), Some(upper)) => Ok((lower, upper)),
        _ => Err(Error::RootNotBracketed { what: "binomial pivot scan" }),
    }
}

fn binom_jeffreys(p: &BinomialProblem) -> Result<(u64, u64)> {
    let kernel = Kernel::BetaBinomial {
        trials: p.m,
        alpha: p.x as f64 + 0.5,
        beta: (p.n - p.x) as f64 + 0.5,
    };
    Ok((kernel.quantile(p.alpha)? as u64, kernel.quantile(1.0 - p.alpha)? as u64))
}

/// Draws the fiducial quantity R = U_(x) + D (U_(x+1) - U_(x)) from the
/// order statistics of n uniforms, with U_(0) = 0 and U_(n+1) = 1, one
/// substream per replicate. Each substream draws the n uniforms first and
/// the interpolation variable D last.
fn binom_fiducial_probs(p: &BinomialProblem, policy: &RngPolicy) -> Vec<f64> {
    let mut probs = Vec::with_capacity(FIDUCIAL_REPLICATES as usize);
    let mut uniforms = Vec::with_capacity(p.n as usize);
    for index in 0..FIDUCIAL_REPLICATES {
        let mut rng = policy.substream(Lane::Discrete, u64::from(index));
        uniforms.clear();
        for _ in 0..p.n {
            uniforms.push(rng.random::<f64>());
        }
        uniforms.sort_unstable_by(f64::total_cmp);
        let below = if p.x == 0 { 0.0 } else { uniforms[(p.x - 1) as usize] };
        let above = if p.x == p.n { 1.0 } else { uniforms[p.x as usize] };
        let d = rng.random::<f64>();
        probs.push(below + d * (above - below));
    }
    probs
}

fn binom_fiducial(p: &BinomialProblem, policy: &RngPolicy) -> Result<(u64, u64)> {
    let probs = binom_fiducial_probs(p, policy);
    let scale = 1.0 / probs.len() as f64;
    let cdf = |y: u64| {
        let total: f64 = probs
            .iter()
            .map(|&prob| Kernel::Binomial { trials: p.m, prob }.cdf(y as f64))
            .sum();
        total * scale
    };
    let lower = smallest_count(&cdf, p.alpha, Some(p.m))?;
    let upper = smallest_count(&cdf, 1.0 - p.alpha, Some(p.m))?;
    Ok((lower, upper))
}

/// Hinkley's predictive mass is the normalized combinatorial likelihood
/// L(y; x) = C(n, x) C(m, y) / C(n+m, x+y). The bounds follow its display
/// conventions: lower = sup{y : F(y-1) <= alpha} and
/// upper = inf{y : F(y) >= 1 - alpha}.
fn binom_hinkley(p: &BinomialProblem) -> (u64, u64) {
    let constant = special::ln_choose(p.n, p.x);
    let weights: Vec<f64> = (0..=p.m)
        .map(|y| (constant + special::ln_choose(p.m, y) - special::ln_choose(p.n + p.m, p.x + y)).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    let mut lower = 0;
    let mut upper = p.m;
    let mut cumulative = 0.0;
    for y in 0..=p.m {
        if cumulative <= p.alpha * total {
            lower = y;
        }
        cumulative += weights[y as usize];
        if cumulative >= (1.0 - p.alpha) * total {
            upper = y;
            break;
        }
    }
    (lower, upper)
}

/// Inverts the conditional binomial test: given X + Y = x + y, the observed
/// count is binomial with success probability n / (n + m). Both conditions
/// are monotone in y, so exponential search brackets each boundary.
fn pois_conservative(p: &PoissonProblem) -> Result<(u64, u64)> {
    let prob = p.n / (p.n + p.m);
    let pbinom = |k: f64, trials: u64| Kernel::Binomial { trials, prob }.cdf(k);
    let accepts_lower = |y: u64| 1.0 - pbinom(p.x as f64 - 1.0, p.x + y) > p.alpha;
    let accepts_upper = |y: u64| pbinom(p.x as f64, p.x + y) > p.alpha;
    let lower = first_count(&accepts_lower, "conservative Poisson lower scan")?;
    let upper = last_count(&accepts_upper, "conservative Poisson upper scan")?;
    Ok((lower, upper))
}

/// Scans the studentized Poisson pivot (y - m x / n) / sd(y). The deficit
/// of each side's condition is monotone in y, so exponential search
/// brackets the boundary of the accepted region.
fn pois_pivot(p: &PoissonProblem, estimate: PivotEstimate) -> Result<(u64, u64)> {
    if matches!(estimate, PivotEstimate::Nelson) && p.x == 0 {
        return Err(Error::DegenerateSample(String::from("point estimate of the rate is 0")));
    }
    let x = p.x as f64;
    let z = special::norm_quantile(1.0 - p.alpha);
    let center = p.m * x / p.n;
    let coefficient = p.m + p.m * p.m / p.n;
    let adjusted_x = if p.x == 0 { 0.5 } else { x };
    let pivot = |y: f64| {
        let rate = match estimate {
            PivotEstimate::Nelson => x / p.n,
            _ => (adjusted_x + y) / (p.n + p.m),
        };
        (y - center) / (coefficient * rate).sqrt()
    };
    let accepts_lower = |y: u64| pivot(y as f64) >= -z;
    let accepts_upper = |y: u64| pivot(y as f64) <= z;
    let lower = first_count(&accepts_lower, "Poisson pivot lower scan")?;
    let upper = last_count(&accepts_upper, "Poisson pivot upper scan")?;
    Ok((lower, upper))
}

/// Jeffreys and Hinkley Poisson bounds are quantiles of a negative-binomial
/// predictive distribution differing only in the size parameter.
fn pois_predictive_quantiles(p: &PoissonProblem, size: f64) -> Result<(u64, u64)> {
    let kernel = Kernel::NegativeBinomial { size, prob: p.n / (p.n + p.m) };
    Ok((kernel.quantile(p.alpha)? as u64, kernel.quantile(1.0 - p.alpha)? as u64))
}

/// Integrates the Poisson(m lambda) cdf against Monte Carlo rate draws
/// lambda ~ chi2_{2x+1} / (2n), one substream per replicate, each drawn by
/// inverting the chi-square cdf at a single uniform.
fn pois_fiducial(p: &PoissonProblem, policy: &RngPolicy) -> Result<(u64, u64)> {
    let kernel = Kernel::ChiSquare { df: 2.0 * p.x as f64 + 1.0 };
    let mut rates = Vec::with_capacity(FIDUCIAL_REPLICATES as usize);
    for index in 0..FIDUCIAL_REPLICATES {
        let mut rng = policy.substream(Lane::Discrete, u64::from(index));
        let u: f64 = rng.sample(Open01);
        rates.push(kernel.quantile(u)? / (2.0 * p.n));
    }
    let scale = 1.0 / rates.len() as f64;
    let cdf = |y: u64| {
        let total: f64 = rates
            .iter()
            .map(|&rate| Kernel::Poisson { mean: p.m * rate }.cdf(y as f64))
            .sum();
        total * scale
    };
    let lower = smallest_count(&cdf, p.alpha, None)?;
    let upper = smallest_count(&cdf, 1.0 - p.alpha, None)?;
    Ok((lower, upper))
}

/// Smallest count with cdf(k) >= target, for a nondecreasing cdf. With a
/// cap the search bisects [0, cap]; without one it brackets by doubling.
fn smallest_count<F: Fn(u64) -> f64>(cdf: &F, target: f64, cap: Option<u64>) -> Result<u64> {
    if cdf(0) >= target {
        return Ok(0);
    }
    let (mut lo, mut hi) = match cap {
        Some(cap) => {
            if cdf(cap) < target {
                return Err(Error::RootNotBracketed { what: "capped count search" });
            }
            (0, cap)
        }
        None => {
            let mut hi = 1u64;
            let mut steps = 0;
            while cdf(hi) < target {
                hi *= 2;
                steps += 1;
                if steps > MAX_DOUBLINGS {
                    return Err(Error::NoConvergence { what: "count search bracket", iterations: steps });
                }
            }
            (hi / 2, hi)
        }
    };
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if cdf(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Smallest count accepted by a condition that is false on a prefix of the
/// integers and true from some point on.
fn first_count<F: Fn(u64) -> bool>(accepts: &F, what: &'static str) -> Result<u64> {
    if accepts(0) {
        return Ok(0);
    }
    let mut hi = 1u64;
    let mut steps = 0;
    while !accepts(hi) {
        hi *= 2;
        steps += 1;
        if steps > MAX_DOUBLINGS {
            return Err(Error::NoConvergence { what, iterations: steps });
        }
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if accepts(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Largest count accepted by a condition that is true on a nonempty prefix
/// of the integers and false from some point on.
fn last_count<F: Fn(u64) -> bool>(accepts: &F, what: &'static str) -> Result<u64> {
    if !accepts(0) {
        return Err(Error::RootNotBracketed { what });
    }
    let mut hi = 1u64;
    let mut steps = 0;
    while accepts(hi) {
        hi *= 2;
        steps += 1;
        if steps > MAX_DOUBLINGS {
            return Err(Error::NoConvergence { what, iterations: steps });
        }
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if accepts(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
