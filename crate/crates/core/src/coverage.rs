//! Coverage-probability evaluation: a Monte Carlo harness over any method
//! in the crate, plus exact enumeration for the discrete methods.
//!
//! Every Monte Carlo replicate is a pure function of (configuration, seeding
//! policy, replicate index): data and predictand come from dedicated lanes,
//! nested simulations (a bootstrap inside a replicate) get their own derived
//! policy, and the result folds into integer hit and failure counts. Any
//! partition of the replicate range therefore aggregates to the same report,
//! which is what makes threaded drivers bit-identical to serial ones.
//!
//! Replicates whose sample degenerates under the method (a non-converged
//! fit, a point estimate on the boundary) are excluded from the coverage
//! estimate and counted; more than 1% of them invalidates the run. The
//! exact enumeration applies the same exclusion rule, conditioning the
//! coverage on data values the method accepts.

use alloc::format;
use alloc::string::String;

// Needed for float math in no_std builds; in test builds a dev-dependency
// links std, which makes it redundant.
#[allow(unused_imports)]
use num_traits::Float;

use crate::boot::{parametric_bootstrap, SampleShape};
use crate::discrete::{
    binom_bounds, pois_bounds, BinomialMethod, BinomialProblem, DiscreteBound, PoissonMethod,
    PoissonProblem,
};
use crate::dist::Kernel;
use crate::error::{Error, Result};
use crate::fiducial::{fiducial_predictive_cdf, gamma_fiducial_draws, invgauss_fiducial_draws};
use crate::fit::{fit_ml, Family, Sample};
use crate::gpq::{gpq_bound_from_batch, normal_exact_bound};
use crate::npar::{conformal_region, order_stat_interval, NonconformityMeasure};
use crate::predict::{calibration_bound_from_batch, direct_bootstrap_cdf, plugin_bound, Side};
use crate::rng::{Lane, RngPolicy};

/// Tail mass below which the Poisson data support may be truncated.
const POISSON_TAIL_BOUND: f64 = 1e-12;

/// Hard cap on enumerated Poisson data values.
const POISSON_ENUM_CAP: u64 = 1_000_000;

/// Which containment event a coverage run scores. Two-sided intervals are
/// the equal-tailed pair: both one-sided bounds at alpha / 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum IntervalSide {
    Lower,
    Upper,
    TwoSided,
}

impl IntervalSide {
    pub fn name(self) -> &'static str {
        match self {
            IntervalSide::Lower => "lower",
            IntervalSide::Upper => "upper",
            IntervalSide::TwoSided => "two_sided",
        }
    }

    /// Level at which each one-sided bound is built.
    fn bound_alpha(self, alpha: f64) -> f64 {
        match self {
            IntervalSide::TwoSided => 0.5 * alpha,
            _ => alpha,
        }
    }
}

/// The data-generating truth of a coverage study.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "model", rename_all = "snake_case"))]
pub enum ModelSpec {
    /// n i.i.d. draws from the kernel; the predictand is one more draw.
    Continuous { kernel: Kernel },
    /// Data X ~ Binomial(n, prob); predictand Y ~ Binomial(m, prob).
    Binomial { prob: f64 },
    /// Data X ~ Poisson(n rate); predictand Y ~ Poisson(m rate).
    Poisson { rate: f64 },
}

impl ModelSpec {
    pub fn family_name(&self) -> &'static str {
        match self {
            ModelSpec::Continuous { kernel } => kernel.family_name(),
            ModelSpec::Binomial { .. } => "binomial",
            ModelSpec::Poisson { .. } => "poisson",
        }
    }
}

/// The prediction method a coverage study evaluates.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "name", rename_all = "snake_case"))]
pub enum MethodConfig {
    /// Quantile of the truth itself; the definitional baseline.
    Oracle,
    /// Quantile of the fitted kernel.
    PlugIn,
    /// Calibration-bootstrap bound.
    CalibrationBootstrap { replicates: u32 },
    /// Quantile of the direct-bootstrap predictive cdf.
    DirectBootstrap { replicates: u32 },
    /// GPQ-bootstrap bound (location-scale families).
    GpqBootstrap { replicates: u32 },
    /// Quantile of the fiducial predictive cdf (gamma, inverse Gaussian).
    FiducialPredictive { replicates: u32 },
    /// Closed-form exact bound for complete normal samples.
    NormalExact,
    /// Binomial count bounds.
    Binomial { method: BinomialMethod },
    /// Poisson count bounds.
    Poisson { method: PoissonMethod },
    /// Conformal region under the mean-deviation measure.
    ConformalMean { randomize: bool },
    /// Distribution-free interval between order statistics r and s.
    OrderStatistic { r: usize, s: usize },
}

impl MethodConfig {
    /// Identifier echoed into reports and output rows.
    pub fn id(&self) -> String {
        match self {
            MethodConfig::Oracle => String::from("oracle"),
            MethodConfig::PlugIn => String::from("plug_in"),
            MethodConfig::CalibrationBootstrap { .. } => String::from("calibration_bootstrap"),
            MethodConfig::DirectBootstrap { .. } => String::from("direct_bootstrap"),
            MethodConfig::GpqBootstrap { .. } => String::from("gpq_bootstrap"),
            MethodConfig::FiducialPredictive { .. } => String::from("fiducial_predictive"),
            MethodConfig::NormalExact => String::from("normal_exact"),
            MethodConfig::Binomial { method } => format!("binomial_{}", method.name()),
            MethodConfig::Poisson { method } => format!("poisson_{}", method.name()),
            MethodConfig::ConformalMean { randomize: false } => String::from("conformal_mean"),
            MethodConfig::ConformalMean { randomize: true } => {
                String::from("conformal_mean_randomized")
            }
            MethodConfig::OrderStatistic { .. } => String::from("order_statistic"),
        }
    }
}

/// Full configuration of a Monte Carlo coverage study.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoverageConfig {
    pub method: MethodConfig,
    pub truth: ModelSpec,
    /// Sample size (continuous, nonparametric), data trial count (binomial),
    /// or integer data exposure (Poisson).
    pub n: u64,
    /// Predictand exposure: must be 1 for continuous methods, a positive
    /// integer for binomial, any positive value for Poisson.
    pub m: f64,
    pub alpha: f64,
    pub side: IntervalSide,
    pub n_sim: u64,
}

/// Result of a coverage study. Equal configurations and master seeds give
/// equal reports in every field except `wall_clock_seconds`, which the
/// clockless core leaves at zero for a driver with a clock to overwrite.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CoverageReport {
    pub method: String,
    pub truth: ModelSpec,
    pub n: u64,
    pub m: f64,
    pub alpha: f64,
    pub side: IntervalSide,
    pub n_sim: u64,
    /// Fraction of non-failed replicates whose bound contained the
    /// predictand.
    pub coverage: f64,
    /// Monte Carlo standard error sqrt(coverage (1 - coverage) / n_sim).
    pub se: f64,
    /// Replicates excluded because the method degenerated on the data.
    pub failures: u64,
    pub wall_clock_seconds: f64,
    pub master_seed: u64,
}

/// Outcome of one replicate: `None` when the method degenerated on the
/// drawn sample and the replicate is excluded.
pub type ReplicateOutcome = Option<bool>;

/// Checks every precondition a study needs before any replicate runs.
pub fn validate_config(config: &CoverageConfig) -> Result<()> {
    if config.n_sim < 100 {
        return Err(Error::InvalidArgument(String::from(
            "coverage study needs at least 100 replicates",
        )));
    }
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(Error::InvalidProbability { value: config.alpha });
    }
    if config.n < 1 {
        return Err(Error::InvalidArgument(String::from("sample size must be at least 1")));
    }
    match config.truth {
        ModelSpec::Continuous { kernel } => {
            kernel.validate()?;
            if kernel.is_discrete() {
                return Err(Error::UnsupportedFamily {
                    family: kernel.family_name(),
                    operation: "continuous coverage simulation",
                });
            }
            if config.m != 1.0 {
                return Err(Error::InvalidArgument(String::from(
                    "continuous prediction targets one future observation; m must be 1",
                )));
            }
        }
        ModelSpec::Binomial { prob } => {
            if !(prob > 0.0 && prob < 1.0) {
                return Err(Error::InvalidProbability { value: prob });
            }
            binomial_exposure(config.m)?;
        }
        ModelSpec::Poisson { rate } => {
            if !(rate.is_finite() && rate > 0.0) {
                return Err(Error::InvalidParameter(String::from(
                    "Poisson rate must be finite and positive",
                )));
            }
            if !(config.m.is_finite() && config.m > 0.0) {
                return Err(Error::InvalidArgument(String::from(
                    "Poisson predictand exposure must be finite and positive",
                )));
            }
        }
    }
    match (&config.method, &config.truth) {
        (MethodConfig::Binomial { .. }, ModelSpec::Binomial { .. }) => {}
        (MethodConfig::Poisson { .. }, ModelSpec::Poisson { .. }) => {}
        (MethodConfig::Binomial { .. } | MethodConfig::Poisson { .. }, truth) => {
            return Err(Error::UnsupportedFamily {
                family: truth.family_name(),
                operation: "discrete coverage simulation",
            });
        }
        (_, ModelSpec::Binomial { .. } | ModelSpec::Poisson { .. }) => {
            return Err(Error::UnsupportedFamily {
                family: config.truth.family_name(),
                operation: "continuous coverage simulation",
            });
        }
        (MethodConfig::GpqBootstrap { .. }, ModelSpec::Continuous { kernel }) => {
            if kernel.loc_scale().is_none() {
                return Err(Error::UnsupportedFamily {
                    family: kernel.family_name(),
                    operation: "GPQ bootstrap",
                });
            }
        }
        (MethodConfig::FiducialPredictive { .. }, ModelSpec::Continuous { kernel }) => {
            if !matches!(kernel, Kernel::Gamma { .. } | Kernel::InverseGaussian { .. }) {
                return Err(Error::UnsupportedFamily {
                    family: kernel.family_name(),
                    operation: "fiducial predictive distribution",
                });
            }
        }
        (MethodConfig::ConformalMean { .. }, _) => {
            if config.side != IntervalSide::TwoSided {
                return Err(Error::InvalidArgument(String::from(
                    "conformal coverage is evaluated two-sided",
                )));
            }
        }
        (MethodConfig::OrderStatistic { r, s }, _) => {
            if config.side != IntervalSide::TwoSided {
                return Err(Error::InvalidArgument(String::from(
                    "order-statistic coverage is evaluated two-sided",
                )));
            }
            if !(1 <= *r && r < s && *s as u64 <= config.n) {
                return Err(Error::InvalidArgument(String::from(
                    "order-statistic ranks must satisfy 1 <= r < s <= n",
                )));
            }
        }
        _ => {}
    }
    Ok(())
}

/// Serial driver: runs every replicate, applies the failure gate, and
/// assembles the report.
pub fn estimate_coverage(config: &CoverageConfig, policy: &RngPolicy) -> Result<CoverageReport> {
    validate_config(config)?;
    let mut hits = 0u64;
    let mut failures = 0u64;
    for rep in 0..config.n_sim {
        match coverage_replicate(config, policy, rep)? {
            Some(true) => hits += 1,
            Some(false) => {}
            None => failures += 1,
        }
    }
    assemble_report(config, policy, hits, failures)
}

/// One Monte Carlo replicate, a pure function of its address. Drivers that
/// partition the replicate range across threads must sum the hit and
/// failure counts and call [`assemble_report`]; the sums are
/// order-independent, so any partition reproduces the serial result.
pub fn coverage_replicate(
    config: &CoverageConfig,
    policy: &RngPolicy,
    rep: u64,
) -> Result<ReplicateOutcome> {
    match config.truth {
        ModelSpec::Continuous { kernel } => continuous_replicate(config, &kernel, policy, rep),
        ModelSpec::Binomial { prob } => binomial_replicate(config, prob, policy, rep),
        ModelSpec::Poisson { rate } => poisson_replicate(config, rate, policy, rep),
    }
}

/// Applies the excessive-failure gate and computes the estimate:
/// coverage over the replicates that produced a bound, standard error on
/// the configured simulation size.
pub fn assemble_report(
    config: &CoverageConfig,
    policy: &RngPolicy,
    hits: u64,
    failures: u64,
) -> Result<CoverageReport> {
    if failures as f64 > 0.01 * config.n_sim as f64 {
        return Err(Error::ExcessiveFailures { failures, total: config.n_sim });
    }
    let effective = config.n_sim - failures;
    let coverage = hits as f64 / effective as f64;
    let se = (coverage * (1.0 - coverage) / config.n_sim as f64).sqrt();
    Ok(CoverageReport {
        method: config.method.id(),
        truth: config.truth,
        n: config.n,
        m: config.m,
        alpha: config.alpha,
        side: config.side,
        n_sim: config.n_sim,
        coverage,
        se,
        failures,
        wall_clock_seconds: 0.0,
        master_seed: policy.master_seed(),
    })
}

/// Exact coverage of a discrete method: the data support is enumerated and
/// each data value weighs the probability that the predictand lands in the
/// resulting bound. Data values the method rejects are excluded, matching
/// the Monte Carlo harness.
pub fn exact_discrete_coverage(
    method: &MethodConfig,
    truth: &ModelSpec,
    n: u64,
    m: f64,
    alpha: f64,
    side: IntervalSide,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidProbability { value: alpha });
    }
    let bound_alpha = side.bound_alpha(alpha);
    match (method, truth) {
        (MethodConfig::Binomial { method }, ModelSpec::Binomial { prob }) => {
            let trials = binomial_exposure(m)?;
            enumerate_binomial_coverage(*prob, n, trials, side, |x| {
                let problem = BinomialProblem::new(x, n, trials, bound_alpha)?;
                binom_bounds(&problem, *method, None)
            })
        }
        (MethodConfig::Poisson { method }, ModelSpec::Poisson { rate }) => {
            enumerate_poisson_coverage(*rate, n as f64, m, side, |x| {
                let problem = PoissonProblem::new(x, n as f64, m, bound_alpha)?;
                pois_bounds(&problem, *method, None)
            })
        }
        _ => Err(Error::UnsupportedFamily {
            family: truth.family_name(),
            operation: "exact coverage enumeration",
        }),
    }
}

/// Exact coverage of an arbitrary binomial bound rule under
/// X ~ Binomial(n, prob), Y ~ Binomial(m, prob).
pub fn enumerate_binomial_coverage(
    prob: f64,
    n: u64,
    m: u64,
    side: IntervalSide,
    mut bound_for: impl FnMut(u64) -> Result<DiscreteBound>,
) -> Result<f64> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::InvalidProbability { value: prob });
    }
    let data = Kernel::Binomial { trials: n, prob };
    let pred = Kernel::Binomial { trials: m, prob };
    let mut covered_mass = 0.0;
    let mut accepted_mass = 0.0;
    for x in 0..=n {
        let weight = data.log_pdf(x as f64).exp();
        match bound_for(x) {
            Ok(bound) => {
                accepted_mass += weight;
                covered_mass += weight * containment_probability(&pred, &bound, side);
            }
            Err(err) if is_replicate_failure(&err) => {}
            Err(err) => return Err(err),
        }
    }
    finish_enumeration(covered_mass, accepted_mass)
}

/// Exact coverage of an arbitrary Poisson bound rule under
/// X ~ Poisson(n rate), Y ~ Poisson(m rate); the data support is truncated
/// once its remaining tail mass drops below 1e-12.
pub fn enumerate_poisson_coverage(
    rate: f64,
    n: f64,
    m: f64,
    side: IntervalSide,
    mut bound_for: impl FnMut(u64) -> Result<DiscreteBound>,
) -> Result<f64> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::InvalidParameter(String::from(
            "Poisson rate must be finite and positive",
        )));
    }
    let data = Kernel::Poisson { mean: n * rate };
    let pred = Kernel::Poisson { mean: m * rate };
    let mut covered_mass = 0.0;
    let mut accepted_mass = 0.0;
    let mut total_mass = 0.0;
    let mut x = 0u64;
    while 1.0 - total_mass >= POISSON_TAIL_BOUND {
        if x > POISSON_ENUM_CAP {
            return Err(Error::TruncationInsufficient { what: "Poisson data support" });
        }
        let weight = data.log_pdf(x as f64).exp();
        total_mass += weight;
        match bound_for(x) {
            Ok(bound) => {
                accepted_mass += weight;
                covered_mass += weight * containment_probability(&pred, &bound, side);
            }
            Err(err) if is_replicate_failure(&err) => {}
            Err(err) => return Err(err),
        }
        x += 1;
    }
    finish_enumeration(covered_mass, accepted_mass)
}

fn finish_enumeration(covered_mass: f64, accepted_mass: f64) -> Result<f64> {
    if !(accepted_mass > 0.0) {
        return Err(Error::DegenerateSample(String::from(
            "the method degenerates at every enumerated data value",
        )));
    }
    Ok(covered_mass / accepted_mass)
}

fn containment_probability(pred: &Kernel, bound: &DiscreteBound, side: IntervalSide) -> f64 {
    let below_lower = pred.cdf(bound.lower as f64 - 1.0);
    match side {
        IntervalSide::Lower => 1.0 - below_lower,
        IntervalSide::Upper => pred.cdf(bound.upper as f64),
        IntervalSide::TwoSided => pred.cdf(bound.upper as f64) - below_lower,
    }
}

/// Data-dependent breakdowns exclude a replicate; anything else is a
/// configuration or programming error and aborts the study.
fn is_replicate_failure(err: &Error) -> bool {
    matches!(
        err,
        Error::DegenerateSample(_)
            | Error::NoConvergence { .. }
            | Error::RootNotBracketed { .. }
            | Error::ExcessiveFailures { .. }
    )
}

fn classify(outcome: Result<bool>) -> Result<ReplicateOutcome> {
    match outcome {
        Ok(covered) => Ok(Some(covered)),
        Err(err) if is_replicate_failure(&err) => Ok(None),
        Err(err) => Err(err),
    }
}

fn binomial_exposure(m: f64) -> Result<u64> {
    if m.is_finite() && m >= 1.0 && m.fract() == 0.0 {
        Ok(m as u64)
    } else {
        Err(Error::InvalidArgument(String::from(
            "binomial predictand exposure must be a positive integer",
        )))
    }
}

/// Covered/not for a method whose interval is assembled from one-sided
/// endpoint constructions; two-sided runs build the equal-tailed pair.
fn covered_by_endpoints(
    side: IntervalSide,
    alpha: f64,
    y: f64,
    mut endpoint: impl FnMut(Side, f64) -> Result<f64>,
) -> Result<bool> {
    match side {
        IntervalSide::Lower => Ok(y >= endpoint(Side::Lower, alpha)?),
        IntervalSide::Upper => Ok(y <= endpoint(Side::Upper, alpha)?),
        IntervalSide::TwoSided => {
            let half = 0.5 * alpha;
            let lower = endpoint(Side::Lower, half)?;
            let upper = endpoint(Side::Upper, half)?;
            Ok(lower <= y && y <= upper)
        }
    }
}

fn fit_family(kernel: &Kernel) -> Result<Family> {
    match kernel {
        Kernel::Normal { .. } => Ok(Family::Normal),
        Kernel::Logistic { .. } => Ok(Family::Logistic),
        Kernel::Sev { .. } => Ok(Family::Sev),
        Kernel::Gamma { .. } => Ok(Family::Gamma),
        Kernel::InverseGaussian { .. } => Ok(Family::InverseGaussian),
        _ => Err(Error::UnsupportedFamily {
            family: kernel.family_name(),
            operation: "coverage simulation",
        }),
    }
}

fn continuous_replicate(
    config: &CoverageConfig,
    kernel: &Kernel,
    policy: &RngPolicy,
    rep: u64,
) -> Result<ReplicateOutcome> {
    let mut data_rng = policy.substream(Lane::Data, rep);
    let values = kernel.draw_vec(&mut data_rng, config.n as usize)?;
    let mut pred_rng = policy.substream(Lane::Predictand, rep);
    let y = kernel.draw(&mut pred_rng)?;

    match config.method {
        MethodConfig::Oracle => {
            return classify(covered_by_endpoints(config.side, config.alpha, y, |side, a| {
                kernel.quantile(side.target(a))
            }));
        }
        MethodConfig::ConformalMean { randomize } => {
            let nested = policy.nested(Lane::Conformal, rep);
            let policy_arg = randomize.then_some(&nested);
            let outcome = conformal_region(
                &values,
                &NonconformityMeasure::MeanDeviation,
                config.alpha,
                randomize,
                policy_arg,
            )
            .map(|region| region.contains(y));
            return classify(outcome);
        }
        MethodConfig::OrderStatistic { r, s } => {
            let outcome = order_stat_interval(&values, r, s).map(|interval| interval.contains(y));
            return classify(outcome);
        }
        _ => {}
    }

    let outcome = (|| -> Result<bool> {
        let sample = Sample::complete(values)?;
        match config.method {
            MethodConfig::PlugIn => {
                let fit = converged_fit(kernel, &sample)?;
                covered_by_endpoints(config.side, config.alpha, y, |side, a| {
                    plugin_bound(&fit, a, side).map(|b| b.endpoint)
                })
            }
            MethodConfig::NormalExact => {
                covered_by_endpoints(config.side, config.alpha, y, |side, a| {
                    normal_exact_bound(&sample, a, side).map(|b| b.endpoint)
                })
            }
            MethodConfig::CalibrationBootstrap { replicates } => {
                let fit = converged_fit(kernel, &sample)?;
                let nested = policy.nested(Lane::Bootstrap, rep);
                let batch =
                    parametric_bootstrap(&fit, SampleShape::of(&sample), replicates, &nested)?;
                covered_by_endpoints(config.side, config.alpha, y, |side, a| {
                    calibration_bound_from_batch(&fit, &batch, a, side).map(|b| b.endpoint)
                })
            }
            MethodConfig::DirectBootstrap { replicates } => {
                let fit = converged_fit(kernel, &sample)?;
                let nested = policy.nested(Lane::Bootstrap, rep);
                let batch =
                    parametric_bootstrap(&fit, SampleShape::of(&sample), replicates, &nested)?;
                let cdf = direct_bootstrap_cdf(&fit, &batch)?;
                covered_by_endpoints(config.side, config.alpha, y, |side, a| {
                    cdf.quantile(side.target(a))
                })
            }
            MethodConfig::GpqBootstrap { replicates } => {
                let fit = converged_fit(kernel, &sample)?;
                let nested = policy.nested(Lane::Bootstrap, rep);
                let batch =
                    parametric_bootstrap(&fit, SampleShape::of(&sample), replicates, &nested)?;
                covered_by_endpoints(config.side, config.alpha, y, |side, a| {
                    gpq_bound_from_batch(&fit, &batch, a, side).map(|b| b.endpoint)
                })
            }
            MethodConfig::FiducialPredictive { replicates } => {
                let nested = policy.nested(Lane::Fiducial, rep);
                let draws = match kernel {
                    Kernel::Gamma { .. } => gamma_fiducial_draws(&sample, replicates, &nested)?,
                    Kernel::InverseGaussian { .. } => {
                        invgauss_fiducial_draws(&sample, replicates, &nested)?
                    }
                    _ => {
                        return Err(Error::UnsupportedFamily {
                            family: kernel.family_name(),
                            operation: "fiducial predictive distribution",
                        })
                    }
                };
                let cdf = fiducial_predictive_cdf(&draws)?;
                covered_by_endpoints(config.side, config.alpha, y, |side, a| {
                    cdf.quantile(side.target(a))
                })
            }
            _ => unreachable!("non-continuous methods are dispatched earlier"),
        }
    })();
    classify(outcome)
}

fn converged_fit(kernel: &Kernel, sample: &Sample) -> Result<crate::fit::FitResult> {
    let fit = fit_ml(fit_family(kernel)?, sample)?;
    if !fit.converged {
        return Err(Error::NoConvergence {
            what: "maximum likelihood fit",
            iterations: fit.iterations,
        });
    }
    Ok(fit)
}

fn binomial_replicate(
    config: &CoverageConfig,
    prob: f64,
    policy: &RngPolicy,
    rep: u64,
) -> Result<ReplicateOutcome> {
    let MethodConfig::Binomial { method } = config.method else {
        return Err(Error::UnsupportedFamily {
            family: "binomial",
            operation: "continuous coverage simulation",
        });
    };
    let trials = binomial_exposure(config.m)?;
    let mut data_rng = policy.substream(Lane::Data, rep);
    let x = Kernel::Binomial { trials: config.n, prob }.draw(&mut data_rng)? as u64;
    let mut pred_rng = policy.substream(Lane::Predictand, rep);
    let y = Kernel::Binomial { trials, prob }.draw(&mut pred_rng)? as u64;

    let outcome = (|| -> Result<bool> {
        let problem =
            BinomialProblem::new(x, config.n, trials, config.side.bound_alpha(config.alpha))?;
        let nested = policy.nested(Lane::Fiducial, rep);
        let bound = binom_bounds(&problem, method, Some(&nested))?;
        Ok(count_covered(y, &bound, config.side))
    })();
    classify(outcome)
}

fn poisson_replicate(
    config: &CoverageConfig,
    rate: f64,
    policy: &RngPolicy,
    rep: u64,
) -> Result<ReplicateOutcome> {
    let MethodConfig::Poisson { method } = config.method else {
        return Err(Error::UnsupportedFamily {
            family: "poisson",
            operation: "continuous coverage simulation",
        });
    };
    let mut data_rng = policy.substream(Lane::Data, rep);
    let x = Kernel::Poisson { mean: config.n as f64 * rate }.draw(&mut data_rng)? as u64;
    let mut pred_rng = policy.substream(Lane::Predictand, rep);
    let y = Kernel::Poisson { mean: config.m * rate }.draw(&mut pred_rng)? as u64;

    let outcome = (|| -> Result<bool> {
        let problem = PoissonProblem::new(
            x,
            config.n as f64,
            config.m,
            config.side.bound_alpha(config.alpha),
        )?;
        let nested = policy.nested(Lane::Fiducial, rep);
        let bound = pois_bounds(&problem, method, Some(&nested))?;
        Ok(count_covered(y, &bound, config.side))
    })();
    classify(outcome)
}

fn count_covered(y: u64, bound: &DiscreteBound, side: IntervalSide) -> bool {
    match side {
        IntervalSide::Lower => y >= bound.lower,
        IntervalSide::Upper => y <= bound.upper,
        IntervalSide::TwoSided => bound.lower <= y && y <= bound.upper,
    }
}
