//! Family-generic continuous prediction methods: plug-in bounds, the
//! calibration bootstrap, and bootstrap predictive cdfs.
//!
//! The calibration machinery works through the curve
//! H(u) = mean_b G(G^{-1}(u; theta*_b); theta_hat), the exact cdf of the
//! calibration statistic u* given the bootstrap estimates. Solving
//! H(u) = 1 - alpha and mapping the root through the fitted quantile function
//! gives the calibrated bound; composing H with G(y; theta_hat) gives the
//! calibration predictive cdf, so the two agree by construction. Replicates
//! whose estimates equal the fitted kernel bit for bit contribute u itself,
//! which makes an identity bootstrap collapse to the plug-in method exactly.
//! Evaluations switch to survival-space composition once G(y; theta_hat)
//! exceeds 1 - 1e-8, where the direct form loses all precision.

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
use crate::rng::RngPolicy;

/// Which side of the predictand a bound covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Side {
    Lower,
    Upper,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Lower => "lower",
            Side::Upper => "upper",
        }
    }

    /// Probability level the bound's endpoint must cut from the predictive
    /// distribution: alpha for lower bounds, 1 - alpha for upper bounds.
    pub fn target(self, alpha: f64) -> f64 {
        match self {
            Side::Lower => alpha,
            Side::Upper => 1.0 - alpha,
        }
    }
}

/// Extra information about how a bootstrap-based bound was produced.
#[derive(Clone, Copy, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundDiagnostics {
    pub replicates: u32,
    pub failures: u32,
    pub u_tilde: Option<f64>,
}

/// A one-sided prediction bound at confidence level 1 - alpha.
#[derive(Clone, Copy, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PredictionBound {
    pub side: Side,
    pub level: f64,
    pub endpoint: f64,
    pub method: &'static str,
    pub diagnostics: Option<BoundDiagnostics>,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidProbability { value: alpha });
    }
    Ok(())
}

fn check_continuous(kernel: &Kernel, operation: &'static str) -> Result<()> {
    if kernel.is_discrete() {
        return Err(Error::UnsupportedFamily { family: kernel.family_name(), operation });
    }
    Ok(())
}

/// Quantile of the fitted kernel at the side's target level.
pub fn plugin_bound(fit: &FitResult, alpha: f64, side: Side) -> Result<PredictionBound> {
    check_alpha(alpha)?;
    if !fit.converged {
        return Err(Error::InvalidArgument(String::from("bound requires a converged fit")));
    }
    let endpoint = fit.kernel.quantile(side.target(alpha))?;
    Ok(PredictionBound { side, level: 1.0 - alpha, endpoint, method: "plug_in", diagnostics: None })
}

/// Mean over surviving replicates of G(G^{-1}(u; estimate_b); reference),
/// together with its derivative in u. Identity estimates contribute the
/// identity map exactly.
fn calibration_curve(reference: &Kernel, estimates: &[Kernel], u: f64) -> Result<(f64, f64)> {
    let mut value = 0.0;
    let mut slope = 0.0;
    for estimate in estimates {
        if estimate == reference {
            value += u;
            slope += 1.0;
        } else {
            let x = estimate.quantile(u)?;
            value += reference.cdf(x);
            let ratio = (reference.log_pdf(x) - estimate.log_pdf(x)).exp();
            if ratio.is_finite() {
                slope += ratio;
            }
        }
    }
    let b = estimates.len() as f64;
    Ok((value / b, slope / b))
}

/// Solve mean_b G(G^{-1}(u; estimate_b); reference) = target for u by
/// safeguarded Newton started at the target itself.
fn solve_calibration_u(reference: &Kernel, estimates: &[Kernel], target: f64) -> Result<f64> {
    if estimates.is_empty() {
        return Err(Error::InvalidArgument(String::from("batch has no surviving replicates")));
    }
    if estimates.iter().all(|estimate| estimate == reference) {
        return Ok(target);
    }
    let mut u = target;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let (value, slope) = calibration_curve(reference, estimates, u)?;
        let residual = value - target;
        if residual == 0.0 {
            return Ok(u);
        }
        if residual > 0.0 {
            hi = u;
        } else {
            lo = u;
        }
        if residual.abs() <= 1e-14 {
            return Ok(u);
        }
        let mut next = if slope > 0.0 { u - residual / slope } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - u).abs() <= 1e-16 * u.max(1.0 - u) {
            return Ok(next);
        }
        u = next.clamp(1e-15, 1.0 - 1e-16);
        if hi - lo <= 1e-15 {
            return Ok(u);
        }
    }
    Err(Error::NoConvergence { what: "calibration quantile", iterations: 200 })
}

/// Calibration-bootstrap bound computed from an existing batch.
pub fn calibration_bound_from_batch(
    fit: &FitResult,
    batch: &BootstrapBatch,
    alpha: f64,
    side: Side,
) -> Result<PredictionBound> {
    check_alpha(alpha)?;
    check_continuous(&fit.kernel, "calibration bootstrap")?;
    let u_tilde = solve_calibration_u(&fit.kernel, &batch.estimates, side.target(alpha))?;
    let endpoint = fit.kernel.quantile(u_tilde)?;
    Ok(PredictionBound {
        side,
        level: 1.0 - alpha,
        endpoint,
        method: "calibration_bootstrap",
        diagnostics: Some(BoundDiagnostics {
            replicates: batch.replicates,
            failures: batch.failures,
            u_tilde: Some(u_tilde),
        }),
    })
}

/// Full calibration-bootstrap pipeline: bootstrap the fitted model under the
/// sample's censoring shape, then calibrate the plug-in quantile level.
pub fn calibration_bootstrap_bound(
    sample: &Sample,
    fit: &FitResult,
    replicates: u32,
    alpha: f64,
    side: Side,
    policy: &RngPolicy,
) -> Result<PredictionBound> {
    check_alpha(alpha)?;
    check_continuous(&fit.kernel, "calibration bootstrap")?;
    let batch = parametric_bootstrap(fit, SampleShape::of(sample), replicates, policy)?;
    calibration_bound_from_batch(fit, &batch, alpha, side)
}

#[derive(Clone, Debug)]
enum CdfForm {
    /// Mean of component cdfs.
    Mixture,
    /// Composition H(G(y; reference)) through the calibration curve.
    Calibration,
}

/// A predictive cdf: nondecreasing, with limits 0 and 1 on the support of
/// the reference family. Quantiles are found by monotone bisection.
#[derive(Clone, Debug)]
pub struct PredictiveCdf {
    reference: Kernel,
    components: Vec<Kernel>,
    form: CdfForm,
    provenance: &'static str,
    identical: bool,
}

/// Threshold beyond which cdf-space composition is replaced by
/// survival-space composition.
const TAIL_SWITCH: f64 = 1.0 - 1e-8;

impl PredictiveCdf {
    fn new(
        reference: Kernel,
        components: Vec<Kernel>,
        form: CdfForm,
        provenance: &'static str,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument(String::from(
                "predictive cdf needs at least one surviving replicate",
            )));
        }
        let identical = components.iter().all(|component| component == &reference);
        Ok(PredictiveCdf { reference, components, form, provenance, identical })
    }

    /// Mixture of the component kernels' cdfs: used by the direct bootstrap,
    /// the GPQ method, and the fiducial constructions.
    pub fn mixture(reference: Kernel, components: Vec<Kernel>, provenance: &'static str) -> Result<Self> {
        check_continuous(&reference, "mixture predictive cdf")?;
        Self::new(reference, components, CdfForm::Mixture, provenance)
    }

    pub fn provenance(&self) -> &'static str {
        self.provenance
    }

    pub fn reference(&self) -> &Kernel {
        &self.reference
    }

    pub fn evaluate(&self, y: f64) -> f64 {
        if self.identical {
            return self.reference.cdf(y);
        }
        match self.form {
            CdfForm::Mixture => {
                let total: f64 = self.components.iter().map(|k| k.cdf(y)).sum();
                total / self.components.len() as f64
            }
            CdfForm::Calibration => {
                let u = self.reference.cdf(y);
                if u <= TAIL_SWITCH {
                    let mut total = 0.0;
                    for estimate in &self.components {
                        if estimate == &self.reference {
                            total += u;
                        } else if u == 0.0 {
                            total += 0.0;
                        } else {
                            total += self.reference.cdf(estimate.quantile(u).unwrap_or(y));
                        }
                    }
                    total / self.components.len() as f64
                } else {
                    // Survival-space composition keeps the far upper tail
                    // monotone where 1 - u has no precision left.
                    let s = self.reference.sf(y);
                    let mut tail = 0.0;
                    for estimate in &self.components {
                        if estimate == &self.reference {
                            tail += s;
                        } else {
                            tail += self.reference.sf(estimate.inv_sf(s).unwrap_or(y));
                        }
                    }
                    1.0 - tail / self.components.len() as f64
                }
            }
        }
    }

    /// inf{y : F_p(y) >= p}, located by bracketing and bisection.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidProbability { value: p });
        }
        let support_min = match self.reference {
            Kernel::Gamma { .. } | Kernel::InverseGaussian { .. } => 0.0,
            _ => f64::NEG_INFINITY,
        };
        let guess = self.reference.quantile(p)?;
        let scale = {
            let spread = self.reference.quantile(0.84)? - self.reference.quantile(0.16)?;
            spread.abs().max(1e-8)
        };

        let mut hi = guess;
        let mut step = scale;
        for _ in 0..200 {
            if self.evaluate(hi) >= p {
                break;
            }
            hi += step;
            step *= 2.0;
        }
        let mut lo = guess.min(hi);
        step = scale;
        for _ in 0..200 {
            if self.evaluate(lo) < p {
                break;
            }
            lo = if lo - step > support_min { lo - step } else { 0.5 * (lo + support_min) };
            step *= 2.0;
        }
        if !(self.evaluate(lo) < p && self.evaluate(hi) >= p) {
            return Err(Error::RootNotBracketed { what: "predictive quantile" });
        }
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.evaluate(mid) >= p {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-13 * (1.0 + lo.abs().max(hi.abs())) {
                break;
            }
        }
        Ok(hi)
    }
}

/// The direct bootstrap predictive cdf: F_p(y) = mean_b G(y; theta*_b).
pub fn direct_bootstrap_cdf(fit: &FitResult, batch: &BootstrapBatch) -> Result<PredictiveCdf> {
    check_continuous(&fit.kernel, "direct bootstrap")?;
    PredictiveCdf::new(
        fit.kernel,
        batch.estimates.clone(),
        CdfForm::Mixture,
        "direct_bootstrap",
    )
}

/// The calibration predictive cdf:
/// F_p(y) = mean_b G(G^{-1}(G(y; theta_hat); theta*_b); theta_hat).
pub fn calibration_predictive_cdf(fit: &FitResult, batch: &BootstrapBatch) -> Result<PredictiveCdf> {
    check_continuous(&fit.kernel, "calibration bootstrap")?;
    PredictiveCdf::new(
        fit.kernel,
        batch.estimates.clone(),
        CdfForm::Calibration,
        "calibration_bootstrap",
    )
}
