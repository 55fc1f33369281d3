//! Task execution: fit, predict, and coverage, including the threaded
//! coverage driver whose results are independent of the thread count.

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use predint_core::boot::{parametric_bootstrap, SampleShape};
use predint_core::coverage::{
    assemble_report, coverage_replicate, validate_config, CoverageConfig, CoverageReport,
    IntervalSide, MethodConfig, ModelSpec,
};
use predint_core::discrete::{
    binom_bounds, pois_bounds, BinomialMethod, BinomialProblem, PoissonMethod, PoissonProblem,
};
use predint_core::dist::Kernel;
use predint_core::fiducial::{fiducial_predictive_cdf, gamma_fiducial_draws, invgauss_fiducial_draws};
use predint_core::fit::{fit_ml, Family, FitResult, Sample};
use predint_core::gpq::{gpq_bound_from_batch, gpq_predictive_cdf, normal_exact_bound};
use predint_core::npar::{
    conformal_region, order_stat_interval, ConformalRegion, NonconformityMeasure,
    OrderStatInterval,
};
use predint_core::predict::{
    calibration_bound_from_batch, calibration_predictive_cdf, direct_bootstrap_cdf, plugin_bound,
    PredictionBound, Side,
};
use predint_core::rng::RngPolicy;
use predint_core::{Error, Result as CoreResult};
use serde::Serialize;

use crate::config::{FamilyName, GridSpec, MethodName, RunConfig, Task};
use crate::data::{load_data, LoadedData};
use crate::error::{core_error, CliError, CliResult};

#[derive(Clone, Debug, Serialize)]
pub struct Param {
    pub name: &'static str,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FitOutput {
    pub family: &'static str,
    pub n: usize,
    pub events: usize,
    pub parameters: Vec<Param>,
    pub loglik: f64,
    pub converged: bool,
    pub iterations: u32,
    pub gradient_norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundOut {
    pub side: &'static str,
    pub level: f64,
    pub endpoint: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicates: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failures: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_tilde: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CdfPoint {
    pub y: f64,
    pub p: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PredictOutput {
    pub method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<&'static str>,
    pub side: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub bounds: Vec<BoundOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<ConformalRegion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<OrderStatInterval>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cdf: Option<Vec<CdfPoint>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl PredictOutput {
    fn new(method: &'static str, side: IntervalSide) -> Self {
        PredictOutput {
            method,
            family: None,
            side: side.name(),
            alpha: None,
            bounds: Vec::new(),
            region: None,
            r: None,
            s: None,
            interval: None,
            cdf: None,
            seed: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverageOutput {
    #[serde(flatten)]
    pub report: CoverageReport,
    pub timestamp: u64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum TaskOutput {
    Fit(FitOutput),
    Predict(PredictOutput),
    Coverage(CoverageOutput),
}

pub fn execute(config: &RunConfig) -> CliResult<TaskOutput> {
    match config.task {
        Task::Fit => run_fit(config).map(TaskOutput::Fit),
        Task::Predict => run_predict(config).map(TaskOutput::Predict),
        Task::Coverage => run_coverage_task(config).map(TaskOutput::Coverage),
    }
}

fn require<T: Copy>(value: Option<T>, field: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Config(format!("config is missing the required field `{field}`")))
}

fn loaded_data(config: &RunConfig) -> CliResult<LoadedData> {
    let source = config
        .data
        .as_ref()
        .ok_or_else(|| CliError::config("config is missing the required field `data`"))?;
    load_data(source)
}

fn sample_from(loaded: LoadedData) -> CliResult<Sample> {
    match loaded.events {
        None => Sample::complete(loaded.values),
        Some(events) => Sample::type2(loaded.values, events),
    }
    .map_err(|err| core_error("data validation", err))
}

fn complete_values(config: &RunConfig, context: &str) -> CliResult<Vec<f64>> {
    let loaded = loaded_data(config)?;
    if loaded.events.is_some() {
        return Err(CliError::Config(format!("{context} requires complete (uncensored) data")));
    }
    Ok(loaded.values)
}

fn kernel_parameters(kernel: &Kernel) -> Vec<Param> {
    match *kernel {
        Kernel::Normal { location, scale }
        | Kernel::Logistic { location, scale }
        | Kernel::Sev { location, scale } => vec![
            Param { name: "location", value: location },
            Param { name: "scale", value: scale },
        ],
        Kernel::Gamma { shape, rate } => {
            vec![Param { name: "shape", value: shape }, Param { name: "rate", value: rate }]
        }
        Kernel::InverseGaussian { mean, shape } => {
            vec![Param { name: "mean", value: mean }, Param { name: "shape", value: shape }]
        }
        _ => Vec::new(),
    }
}

fn run_fit(config: &RunConfig) -> CliResult<FitOutput> {
    let family_name = require(config.family, "family")?;
    let family = family_name
        .continuous()
        .ok_or_else(|| CliError::config("task fit requires a continuous family"))?;
    let sample = sample_from(loaded_data(config)?)?;
    let fit = fit_ml(family, &sample)
        .map_err(|err| core_error("maximum likelihood fit", err))?;
    Ok(FitOutput {
        family: family.name(),
        n: sample.n(),
        events: sample.events(),
        parameters: kernel_parameters(&fit.kernel),
        loglik: fit.loglik,
        converged: fit.converged,
        iterations: fit.iterations,
        gradient_norm: fit.gradient_norm,
    })
}

/// One-sided bound constructions a two-sided request expands into.
fn side_plan(side: IntervalSide, alpha: f64) -> Vec<(Side, f64)> {
    match side {
        IntervalSide::Lower => vec![(Side::Lower, alpha)],
        IntervalSide::Upper => vec![(Side::Upper, alpha)],
        IntervalSide::TwoSided => {
            vec![(Side::Lower, 0.5 * alpha), (Side::Upper, 0.5 * alpha)]
        }
    }
}

fn bound_out(bound: PredictionBound) -> BoundOut {
    BoundOut {
        side: bound.side.name(),
        level: bound.level,
        endpoint: bound.endpoint,
        replicates: bound.diagnostics.as_ref().map(|d| d.replicates),
        failures: bound.diagnostics.as_ref().map(|d| d.failures),
        u_tilde: bound.diagnostics.as_ref().and_then(|d| d.u_tilde),
    }
}

fn grid_points(grid: &GridSpec, cdf: impl Fn(f64) -> f64) -> CliResult<Vec<CdfPoint>> {
    if grid.points < 2 || grid.points > 1_000_000 {
        return Err(CliError::config("grid `points` must lie in [2, 1000000]"));
    }
    if !(grid.min.is_finite() && grid.max.is_finite() && grid.min < grid.max) {
        return Err(CliError::config("grid needs finite `min` < `max`"));
    }
    let step = (grid.max - grid.min) / f64::from(grid.points - 1);
    Ok((0..grid.points)
        .map(|i| {
            let y = grid.min + f64::from(i) * step;
            CdfPoint { y, p: cdf(y) }
        })
        .collect())
}

fn run_predict(config: &RunConfig) -> CliResult<PredictOutput> {
    let method = require(config.method, "method")?;
    let side = config.side.unwrap_or(IntervalSide::Upper);
    match method {
        MethodName::Oracle => {
            Err(CliError::config("method oracle is only available in coverage studies"))
        }
        MethodName::ConformalMean => predict_conformal(config, side),
        MethodName::OrderStatistic => predict_order_stat(config, side),
        _ if method.is_count_method() => predict_discrete(config, method, side),
        _ => predict_continuous(config, method, side),
    }
}

fn predict_continuous(
    config: &RunConfig,
    method: MethodName,
    side: IntervalSide,
) -> CliResult<PredictOutput> {
    let family_name = require(config.family, "family")?;
    let family = family_name.continuous().ok_or_else(|| {
        CliError::Config(format!("method {} requires a continuous family", method.name()))
    })?;
    if method == MethodName::NormalExact && family != Family::Normal {
        return Err(CliError::config("method normal_exact requires family normal"));
    }
    let alpha = require(config.alpha, "alpha")?;
    if config.m.unwrap_or(1.0) != 1.0 {
        return Err(CliError::config(
            "continuous prediction targets one future observation; m must be 1",
        ));
    }
    let sample = sample_from(loaded_data(config)?)?;
    let context = format!("method {}", method.name());
    let fail = |err: Error| core_error(&context, err);

    let needs_rng = matches!(
        method,
        MethodName::CalibrationBootstrap
            | MethodName::DirectBootstrap
            | MethodName::GpqBootstrap
            | MethodName::FiducialPredictive
    );
    let replicates = if needs_rng { Some(require(config.b, "b")?) } else { None };
    let policy = if needs_rng { Some(RngPolicy::new(require(config.seed, "seed")?)) } else { None };

    let fit_for = |family: Family, sample: &Sample| -> CliResult<FitResult> {
        let fit = fit_ml(family, sample).map_err(fail)?;
        if !fit.converged {
            return Err(CliError::Numeric(format!(
                "{context}: maximum likelihood fit did not converge \
                 ({} iterations, gradient {:e})",
                fit.iterations, fit.gradient_norm
            )));
        }
        Ok(fit)
    };

    let mut output = PredictOutput::new(method.name(), side);
    output.family = Some(family.name());
    output.alpha = Some(alpha);
    output.seed = config.seed.filter(|_| needs_rng);
    let plan = side_plan(side, alpha);

    match method {
        MethodName::PlugIn => {
            let fit = fit_for(family, &sample)?;
            for (one_side, a) in &plan {
                output.bounds.push(bound_out(plugin_bound(&fit, *a, *one_side).map_err(fail)?));
            }
            if let Some(grid) = &config.grid {
                let kernel = fit.kernel;
                output.cdf = Some(grid_points(grid, |y| kernel.cdf(y))?);
            }
        }
        MethodName::NormalExact => {
            for (one_side, a) in &plan {
                output
                    .bounds
                    .push(bound_out(normal_exact_bound(&sample, *a, *one_side).map_err(fail)?));
            }
            if let Some(grid) = &config.grid {
                let values = sample.values();
                let n = values.len() as f64;
                let mean = values.iter().sum::<f64>() / n;
                let variance =
                    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
                let spread = (variance * (1.0 + 1.0 / n)).sqrt();
                let pivot = Kernel::StudentT { df: n - 1.0 };
                output.cdf = Some(grid_points(grid, |y| pivot.cdf((y - mean) / spread))?);
            }
        }
        MethodName::CalibrationBootstrap | MethodName::DirectBootstrap
        | MethodName::GpqBootstrap => {
            let fit = fit_for(family, &sample)?;
            let batch = parametric_bootstrap(
                &fit,
                SampleShape::of(&sample),
                replicates.unwrap(),
                policy.as_ref().unwrap(),
            )
            .map_err(fail)?;
            match method {
                MethodName::CalibrationBootstrap => {
                    for (one_side, a) in &plan {
                        let bound = calibration_bound_from_batch(&fit, &batch, *a, *one_side)
                            .map_err(fail)?;
                        output.bounds.push(bound_out(bound));
                    }
                    if let Some(grid) = &config.grid {
                        let cdf = calibration_predictive_cdf(&fit, &batch).map_err(fail)?;
                        output.cdf = Some(grid_points(grid, |y| cdf.evaluate(y))?);
                    }
                }
                MethodName::DirectBootstrap => {
                    let cdf = direct_bootstrap_cdf(&fit, &batch).map_err(fail)?;
                    for (one_side, a) in &plan {
                        output.bounds.push(BoundOut {
                            side: one_side.name(),
                            level: 1.0 - a,
                            endpoint: cdf.quantile(one_side.target(*a)).map_err(fail)?,
                            replicates,
                            failures: Some(batch.failures),
                            u_tilde: None,
                        });
                    }
                    if let Some(grid) = &config.grid {
                        output.cdf = Some(grid_points(grid, |y| cdf.evaluate(y))?);
                    }
                }
                _ => {
                    for (one_side, a) in &plan {
                        let bound =
                            gpq_bound_from_batch(&fit, &batch, *a, *one_side).map_err(fail)?;
                        output.bounds.push(bound_out(bound));
                    }
                    if let Some(grid) = &config.grid {
                        let cdf = gpq_predictive_cdf(&fit, &batch).map_err(fail)?;
                        output.cdf = Some(grid_points(grid, |y| cdf.evaluate(y))?);
                    }
                }
            }
        }
        MethodName::FiducialPredictive => {
            let b = replicates.unwrap();
            let policy = policy.as_ref().unwrap();
            let draws = match family {
                Family::Gamma => gamma_fiducial_draws(&sample, b, policy).map_err(fail)?,
                Family::InverseGaussian => {
                    invgauss_fiducial_draws(&sample, b, policy).map_err(fail)?
                }
                _ => {
                    return Err(CliError::Config(format!(
                        "method fiducial_predictive requires family gamma or \
                         inverse_gaussian, not {}",
                        family.name()
                    )))
                }
            };
            let failures = b - draws.len() as u32;
            let cdf = fiducial_predictive_cdf(&draws).map_err(fail)?;
            for (one_side, a) in &plan {
                output.bounds.push(BoundOut {
                    side: one_side.name(),
                    level: 1.0 - a,
                    endpoint: cdf.quantile(one_side.target(*a)).map_err(fail)?,
                    replicates,
                    failures: Some(failures),
                    u_tilde: None,
                });
            }
            if let Some(grid) = &config.grid {
                output.cdf = Some(grid_points(grid, |y| cdf.evaluate(y))?);
            }
        }
        _ => unreachable!("dispatched in run_predict"),
    }
    Ok(output)
}

fn to_binomial_method(method: MethodName) -> Option<BinomialMethod> {
    match method {
        MethodName::Conservative => Some(BinomialMethod::Conservative),
        MethodName::Nelson => Some(BinomialMethod::Nelson),
        MethodName::Kp => Some(BinomialMethod::Kp),
        MethodName::Wang => Some(BinomialMethod::Wang),
        MethodName::Jeffreys => Some(BinomialMethod::Jeffreys),
        MethodName::Fiducial => Some(BinomialMethod::Fiducial),
        MethodName::Hinkley => Some(BinomialMethod::Hinkley),
        _ => None,
    }
}

fn to_poisson_method(method: MethodName) -> Option<PoissonMethod> {
    match method {
        MethodName::Conservative => Some(PoissonMethod::Conservative),
        MethodName::Nelson => Some(PoissonMethod::Nelson),
        MethodName::Kp => Some(PoissonMethod::Kp),
        MethodName::Jeffreys => Some(PoissonMethod::Jeffreys),
        MethodName::Fiducial => Some(PoissonMethod::Fiducial),
        MethodName::Hinkley => Some(PoissonMethod::Hinkley),
        _ => None,
    }
}

fn observed_count(config: &RunConfig) -> CliResult<u64> {
    let loaded = loaded_data(config)?;
    if loaded.events.is_some() {
        return Err(CliError::config("count data cannot be censored"));
    }
    if loaded.values.len() != 1 {
        return Err(CliError::config(
            "discrete prediction takes a single observed count in `data`",
        ));
    }
    let value = loaded.values[0];
    if value.is_finite() && value >= 0.0 && value.fract() == 0.0 {
        Ok(value as u64)
    } else {
        Err(CliError::config("the observed count must be a non-negative integer"))
    }
}

fn predict_discrete(
    config: &RunConfig,
    method: MethodName,
    side: IntervalSide,
) -> CliResult<PredictOutput> {
    let family_name = require(config.family, "family")?;
    let alpha = require(config.alpha, "alpha")?;
    let n = require(config.n, "n")?;
    let m = config.m.unwrap_or(1.0);
    let x = observed_count(config)?;
    let bound_alpha = match side {
        IntervalSide::TwoSided => 0.5 * alpha,
        _ => alpha,
    };
    let context = format!("method {}", method.name());
    let fail = |err: Error| core_error(&context, err);

    let needs_rng = method == MethodName::Fiducial;
    let policy = if needs_rng { Some(RngPolicy::new(require(config.seed, "seed")?)) } else { None };

    let bound = match family_name {
        FamilyName::Binomial => {
            let trials = if m.is_finite() && m >= 1.0 && m.fract() == 0.0 {
                m as u64
            } else {
                return Err(CliError::config(
                    "binomial predictand exposure `m` must be a positive integer",
                ));
            };
            let kind = to_binomial_method(method).expect("count method");
            let problem = BinomialProblem::new(x, n, trials, bound_alpha).map_err(fail)?;
            binom_bounds(&problem, kind, policy.as_ref()).map_err(fail)?
        }
        FamilyName::Poisson => {
            let kind = to_poisson_method(method).ok_or_else(|| {
                CliError::Config(format!(
                    "method {} is not available for the poisson family",
                    method.name()
                ))
            })?;
            let problem = PoissonProblem::new(x, n as f64, m, bound_alpha).map_err(fail)?;
            pois_bounds(&problem, kind, policy.as_ref()).map_err(fail)?
        }
        _ => {
            return Err(CliError::Config(format!(
                "method {} requires family binomial or poisson",
                method.name()
            )))
        }
    };

    let mut output = PredictOutput::new(method.name(), side);
    output.family = Some(family_name.name());
    output.alpha = Some(alpha);
    output.seed = config.seed.filter(|_| needs_rng);
    let level = 1.0 - bound_alpha;
    match side {
        IntervalSide::Lower => output.bounds.push(BoundOut {
            side: "lower",
            level,
            endpoint: bound.lower as f64,
            replicates: None,
            failures: None,
            u_tilde: None,
        }),
        IntervalSide::Upper => output.bounds.push(BoundOut {
            side: "upper",
            level,
            endpoint: bound.upper as f64,
            replicates: None,
            failures: None,
            u_tilde: None,
        }),
        IntervalSide::TwoSided => {
            for (name, endpoint) in [("lower", bound.lower), ("upper", bound.upper)] {
                output.bounds.push(BoundOut {
                    side: name,
                    level,
                    endpoint: endpoint as f64,
                    replicates: None,
                    failures: None,
                    u_tilde: None,
                });
            }
        }
    }
    if config.grid.is_some() {
        return Err(CliError::Config(format!(
            "a predictive-cdf grid is not available for method {}",
            method.name()
        )));
    }
    Ok(output)
}

fn predict_conformal(config: &RunConfig, side: IntervalSide) -> CliResult<PredictOutput> {
    if side != IntervalSide::TwoSided {
        return Err(CliError::config("conformal prediction is two-sided; set side to two_sided"));
    }
    if config.grid.is_some() {
        return Err(CliError::config(
            "a predictive-cdf grid is not available for method conformal_mean",
        ));
    }
    let alpha = require(config.alpha, "alpha")?;
    let randomize = config.randomize.unwrap_or(false);
    let values = complete_values(config, "conformal prediction")?;
    let policy = if randomize { Some(RngPolicy::new(require(config.seed, "seed")?)) } else { None };
    let region = conformal_region(
        &values,
        &NonconformityMeasure::MeanDeviation,
        alpha,
        randomize,
        policy.as_ref(),
    )
    .map_err(|err| core_error("method conformal_mean", err))?;
    let mut output = PredictOutput::new("conformal_mean", side);
    output.alpha = Some(alpha);
    output.seed = config.seed.filter(|_| randomize);
    output.region = Some(region);
    Ok(output)
}

fn predict_order_stat(config: &RunConfig, side: IntervalSide) -> CliResult<PredictOutput> {
    if side != IntervalSide::TwoSided {
        return Err(CliError::config(
            "order-statistic prediction is two-sided; set side to two_sided",
        ));
    }
    if config.grid.is_some() {
        return Err(CliError::config(
            "a predictive-cdf grid is not available for method order_statistic",
        ));
    }
    let r = require(config.r, "r")?;
    let s = require(config.s, "s")?;
    let values = complete_values(config, "order-statistic prediction")?;
    let interval = order_stat_interval(&values, r, s)
        .map_err(|err| core_error("method order_statistic", err))?;
    let mut output = PredictOutput::new("order_statistic", side);
    output.alpha = config.alpha;
    output.r = Some(r);
    output.s = Some(s);
    output.interval = Some(interval);
    Ok(output)
}

fn build_method_config(
    method: MethodName,
    truth: &ModelSpec,
    config: &RunConfig,
) -> CliResult<MethodConfig> {
    let b = || require(config.b, "b");
    Ok(match method {
        MethodName::Oracle => MethodConfig::Oracle,
        MethodName::PlugIn => MethodConfig::PlugIn,
        MethodName::CalibrationBootstrap => {
            MethodConfig::CalibrationBootstrap { replicates: b()? }
        }
        MethodName::DirectBootstrap => MethodConfig::DirectBootstrap { replicates: b()? },
        MethodName::GpqBootstrap => MethodConfig::GpqBootstrap { replicates: b()? },
        MethodName::FiducialPredictive => MethodConfig::FiducialPredictive { replicates: b()? },
        MethodName::NormalExact => MethodConfig::NormalExact,
        MethodName::ConformalMean => {
            MethodConfig::ConformalMean { randomize: config.randomize.unwrap_or(false) }
        }
        MethodName::OrderStatistic => {
            MethodConfig::OrderStatistic { r: require(config.r, "r")?, s: require(config.s, "s")? }
        }
        _ => match truth {
            ModelSpec::Binomial { .. } => MethodConfig::Binomial {
                method: to_binomial_method(method).expect("count method"),
            },
            ModelSpec::Poisson { .. } => MethodConfig::Poisson {
                method: to_poisson_method(method).ok_or_else(|| {
                    CliError::Config(format!(
                        "method {} is not available for the poisson family",
                        method.name()
                    ))
                })?,
            },
            ModelSpec::Continuous { .. } => {
                return Err(CliError::Config(format!(
                    "method {} requires a binomial or poisson truth",
                    method.name()
                )))
            }
        },
    })
}

fn run_coverage_task(config: &RunConfig) -> CliResult<CoverageOutput> {
    let method_name = require(config.method, "method")?;
    let truth = require(config.truth, "truth")?;
    let coverage_config = CoverageConfig {
        method: build_method_config(method_name, &truth, config)?,
        truth,
        n: require(config.n, "n")?,
        m: config.m.unwrap_or(1.0),
        alpha: require(config.alpha, "alpha")?,
        side: config.side.unwrap_or(IntervalSide::Upper),
        n_sim: require(config.n_sim, "n_sim")?,
    };
    let policy = RngPolicy::new(require(config.seed, "seed")?);
    let threads = thread_count()?;
    let context = format!("coverage study of method {}", coverage_config.method.id());
    let report = run_coverage(&coverage_config, &policy, threads)
        .map_err(|err| core_error(&context, err))?;
    let timestamp =
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Ok(CoverageOutput { report, timestamp })
}

/// Worker parallelism: PREDINT_THREADS, with 0 or absence meaning the
/// machine's available parallelism.
pub fn thread_count() -> CliResult<usize> {
    let raw = match std::env::var("PREDINT_THREADS") {
        Ok(raw) => raw,
        Err(std::env::VarError::NotPresent) => return Ok(auto_threads()),
        Err(std::env::VarError::NotUnicode(_)) => {
            return Err(CliError::config("PREDINT_THREADS must be a non-negative integer"))
        }
    };
    let parsed: usize = raw.trim().parse().map_err(|_| {
        CliError::Config(format!("PREDINT_THREADS must be a non-negative integer, got `{raw}`"))
    })?;
    Ok(if parsed == 0 { auto_threads() } else { parsed })
}

fn auto_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Runs a coverage study on `threads` workers. Replicates are pure
/// functions of their index, and hit and failure counts are summed, so the
/// report is identical for every thread count; only the wall clock varies.
pub fn run_coverage(
    config: &CoverageConfig,
    policy: &RngPolicy,
    threads: usize,
) -> CoreResult<CoverageReport> {
    validate_config(config)?;
    let started = Instant::now();
    let workers = threads.clamp(1, config.n_sim.max(1) as usize);

    let mut hits = 0u64;
    let mut failures = 0u64;
    if workers == 1 {
        for rep in 0..config.n_sim {
            match coverage_replicate(config, policy, rep)? {
                Some(true) => hits += 1,
                Some(false) => {}
                None => failures += 1,
            }
        }
    } else {
        let chunk = config.n_sim.div_ceil(workers as u64);
        let outcomes: Vec<Result<(u64, u64), (u64, Error)>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers as u64)
                .map(|worker| {
                    let start = worker * chunk;
                    let stop = (start + chunk).min(config.n_sim);
                    scope.spawn(move || {
                        let mut hits = 0u64;
                        let mut failures = 0u64;
                        for rep in start..stop {
                            match coverage_replicate(config, policy, rep) {
                                Ok(Some(true)) => hits += 1,
                                Ok(Some(false)) => {}
                                Ok(None) => failures += 1,
                                Err(err) => return Err((rep, err)),
                            }
                        }
                        Ok((hits, failures))
                    })
                })
                .collect();
            handles.into_iter().map(|handle| handle.join().expect("worker panicked")).collect()
        });
        let mut first_error: Option<(u64, Error)> = None;
        for outcome in outcomes {
            match outcome {
                Ok((h, f)) => {
                    hits += h;
                    failures += f;
                }
                Err((rep, err)) => {
                    if first_error.as_ref().is_none_or(|(first, _)| rep < *first) {
                        first_error = Some((rep, err));
                    }
                }
            }
        }
        if let Some((_, err)) = first_error {
            return Err(err);
        }
    }

    let mut report = assemble_report(config, policy, hits, failures)?;
    report.wall_clock_seconds = started.elapsed().as_secs_f64();
    Ok(report)
}
