//! Location-scale specializations: the pivotal parameter transform applied
//! to bootstrap estimates, the predictive distribution it induces, and the
//! closed-form exact bound for complete normal samples.
//!
//! The transform sends a bootstrap estimate (mu*, sigma*) to
//! mu** = mu_hat + sigma_hat (mu_hat - mu*)/sigma*,
//! sigma** = sigma_hat (sigma_hat/sigma*); averaging the family cdf over the
//! transformed pairs gives a predictive cdf that agrees with the calibration
//! composition replicate by replicate. The sigma** grouping keeps identity
//! replicates exact: sigma/sigma is 1 by IEEE division, so an identity batch
//! collapses to the plug-in cdf bit for bit.

use alloc::string::String;
use alloc::vec::Vec;

// Needed for float math in no_std builds; in test builds a dev-dependency
// links std, which makes it redundant.
#[allow(unused_imports)]
use num_traits::Float;

use crate::boot::{parametric_bootstrap, BootstrapBatch, SampleShape};
use crate::dist::Kernel;
use crate::error::{Error, Result};
use crate::fit::{FitResult, Sample};
use crate::predict::{BoundDiagnostics, PredictionBound, PredictiveCdf, Side};
use crate::rng::RngPolicy;

/// One transformed parameter pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GpqDraw {
    pub mu_ss: f64,
    pub sigma_ss: f64,
}

/// Map a bootstrap estimate through the pivotal transform anchored at the
/// fitted parameters.
pub fn gpq_transform(fit: (f64, f64), boot_estimate: (f64, f64)) -> Result<GpqDraw> {
    let (mu_hat, sigma_hat) = fit;
    let (mu_star, sigma_star) = boot_estimate;
    if !(sigma_hat > 0.0) {
        return Err(Error::InvalidParameter(String::from("fitted scale must be positive")));
    }
    if !(sigma_star > 0.0) {
        return Err(Error::DegenerateSample(String::from("bootstrap scale is zero")));
    }
    let mu_ss = mu_hat + sigma_hat * (mu_hat - mu_star) / sigma_star;
    let sigma_ss = sigma_hat * (sigma_hat / sigma_star);
    Ok(GpqDraw { mu_ss, sigma_ss })
}

/// Predictive cdf F_p(y) = mean_b Phi((y - mu**_b)/sigma**_b) over the
/// transformed batch, with Phi the family's standardized cdf.
pub fn gpq_predictive_cdf(fit: &FitResult, batch: &BootstrapBatch) -> Result<PredictiveCdf> {
    let (family, mu_hat, sigma_hat) = fit.kernel.loc_scale().ok_or(Error::UnsupportedFamily {
        family: fit.kernel.family_name(),
        operation: "GPQ bootstrap",
    })?;
    let mut components = Vec::with_capacity(batch.estimates.len());
    for estimate in &batch.estimates {
        let (_, mu_star, sigma_star) = estimate.loc_scale().ok_or(Error::InvalidArgument(
            String::from("batch estimate is not location-scale"),
        ))?;
        let draw = gpq_transform((mu_hat, sigma_hat), (mu_star, sigma_star))?;
        components.push(family.kernel(draw.mu_ss, draw.sigma_ss));
    }
    PredictiveCdf::mixture(fit.kernel, components, "gpq_bootstrap")
}

/// GPQ-bootstrap bound computed from an existing batch.
pub fn gpq_bound_from_batch(
    fit: &FitResult,
    batch: &BootstrapBatch,
    alpha: f64,
    side: Side,
) -> Result<PredictionBound> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidProbability { value: alpha });
    }
    let cdf = gpq_predictive_cdf(fit, batch)?;
    let endpoint = cdf.quantile(side.target(alpha))?;
    Ok(PredictionBound {
        side,
        level: 1.0 - alpha,
        endpoint,
        method: "gpq_bootstrap",
        diagnostics: Some(BoundDiagnostics {
            replicates: batch.replicates,
            failures: batch.failures,
            u_tilde: None,
        }),
    })
}

/// Full GPQ-bootstrap pipeline for location-scale fits.
pub fn gpq_bootstrap_bound(
    sample: &Sample,
    fit: &FitResult,
    replicates: u32,
    alpha: f64,
    side: Side,
    policy: &RngPolicy,
) -> Result<PredictionBound> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidProbability { value: alpha });
    }
    if fit.kernel.loc_scale().is_none() {
        return Err(Error::UnsupportedFamily {
            family: fit.kernel.family_name(),
            operation: "GPQ bootstrap",
        });
    }
    let batch = parametric_bootstrap(fit, SampleShape::of(sample), replicates, policy)?;
    gpq_bound_from_batch(fit, &batch, alpha, side)
}

/// Closed-form exact bound for complete normal samples:
/// xbar +/- t s sqrt(1 + 1/n) with s the divisor-(n-1) standard deviation.
pub fn normal_exact_bound(sample: &Sample, alpha: f64, side: Side) -> Result<PredictionBound> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidProbability { value: alpha });
    }
    if !sample.is_complete() {
        return Err(Error::InvalidArgument(String::from(
            "the exact normal bound requires complete data",
        )));
    }
    let n = sample.n();
    if n < 2 {
        return Err(Error::InvalidArgument(String::from(
            "the exact normal bound requires at least 2 values",
        )));
    }
    let mut xs = sample.values().to_vec();
    xs.sort_unstable_by(|a, b| a.total_cmp(b));
    let nf = n as f64;
    let mean = xs.iter().sum::<f64>() / nf;
    let ss = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    let s = (ss / (nf - 1.0)).sqrt();
    if !(s > 0.0) {
        return Err(Error::DegenerateSample(String::from("all values identical")));
    }
    let t = Kernel::StudentT { df: nf - 1.0 }.quantile(side.target(alpha))?;
    let endpoint = mean + t * s * (1.0 + 1.0 / nf).sqrt();
    Ok(PredictionBound {
        side,
        level: 1.0 - alpha,
        endpoint,
        method: "normal_exact",
        diagnostics: None,
    })
}
