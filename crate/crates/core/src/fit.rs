//! Maximum likelihood estimation: location-scale families with complete or
//! Type-II censored data, and complete-data gamma and inverse Gaussian.
//!
//! Location-scale fits run Newton with backtracking line search on
//! (mu, log sigma), initialized from least squares of the observed order
//! statistics on standard quantiles at Blom plotting positions. Data are
//! standardized by equivariant statistics first, which makes the affine
//! equivariance of the estimates hold to rounding error. The gamma fit
//! solves the profiled shape equation log(alpha) - digamma(alpha) =
//! log(mean / geometric mean) by safeguarded Newton; the inverse Gaussian
//! fit is closed form.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

// Needed for float math in no_std builds; in test builds a dev-dependency
// links std, which makes it redundant.
#[allow(unused_imports)]
use num_traits::Float;

use crate::dist::{Kernel, LocScaleFamily};
use crate::error::{Error, Result};
use crate::special;

const LN_2PI: f64 = 1.837_877_066_409_345_4;
const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

/// Families the fitter handles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Family {
    Normal,
    Logistic,
    Sev,
    Gamma,
    InverseGaussian,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Normal => "normal",
            Family::Logistic => "logistic",
            Family::Sev => "sev",
            Family::Gamma => "gamma",
            Family::InverseGaussian => "inverse_gaussian",
        }
    }

    pub fn loc_scale(self) -> Option<LocScaleFamily> {
        match self {
            Family::Normal => Some(LocScaleFamily::Normal),
            Family::Logistic => Some(LocScaleFamily::Logistic),
            Family::Sev => Some(LocScaleFamily::Sev),
            _ => None,
        }
    }
}

/// Censoring scheme of a sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Censoring {
    Complete,
    /// Only the `events` smallest values are observed failures; the other
    /// n - events units are censored at the `events`-th order statistic.
    Type2 { events: usize },
}

/// Observed data: values plus censoring descriptor. Type-II samples are
/// stored sorted ascending so the first `events` entries are the failures.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    censoring: Censoring,
}

impl Sample {
    pub fn complete(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument(String::from("sample must be nonempty")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(String::from("sample values must be finite")));
        }
        Ok(Sample { values, censoring: Censoring::Complete })
    }

    pub fn type2(mut values: Vec<f64>, events: usize) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(String::from("sample values must be finite")));
        }
        if events < 2 || events > values.len() {
            return Err(Error::InvalidArgument(String::from(
                "Type-II censoring requires 2 <= events <= n",
            )));
        }
        values.sort_unstable_by(|a, b| a.total_cmp(b));
        Ok(Sample { values, censoring: Censoring::Type2 { events } })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn censoring(&self) -> Censoring {
        self.censoring
    }

    pub fn is_complete(&self) -> bool {
        matches!(self.censoring, Censoring::Complete)
            || matches!(self.censoring, Censoring::Type2 { events } if events == self.values.len())
    }

    /// Number of observed failures (n for complete data).
    pub fn events(&self) -> usize {
        match self.censoring {
            Censoring::Complete => self.values.len(),
            Censoring::Type2 { events } => events,
        }
    }

    /// The observed values: everything for complete data, the `events`
    /// smallest for Type-II.
    pub fn observed(&self) -> &[f64] {
        match self.censoring {
            Censoring::Complete => &self.values,
            Censoring::Type2 { events } => &self.values[..events],
        }
    }
}

/// A maximum likelihood fit. `gradient_norm` is the largest component of the
/// parameter-scaled score per observation, max_j |theta_j dl/dtheta_j| / n;
/// `converged` means it is at most 1e-8.
#[derive(Clone, Copy, Debug)]
pub struct FitResult {
    pub kernel: Kernel,
    pub loglik: f64,
    pub converged: bool,
    pub iterations: u32,
    pub gradient_norm: f64,
}

/// Maximize the (censored) log-likelihood of `sample` under `family`.
pub fn fit_ml(family: Family, sample: &Sample) -> Result<FitResult> {
    match family {
        Family::Normal if sample.is_complete() => fit_normal_complete(sample.values()),
        Family::Normal | Family::Logistic | Family::Sev => {
            fit_loc_scale(family.loc_scale().unwrap(), sample)
        }
        Family::Gamma => {
            if !sample.is_complete() {
                return Err(Error::UnsupportedFamily { family: "gamma", operation: "censored fitting" });
            }
            fit_gamma(sample.values())
        }
        Family::InverseGaussian => {
            if !sample.is_complete() {
                return Err(Error::UnsupportedFamily {
                    family: "inverse_gaussian",
                    operation: "censored fitting",
                });
            }
            fit_inverse_gaussian(sample.values())
        }
    }
}

// Closed-form fits accumulate over an ascending copy so that a complete
// sample and a Type-II sample with events = n (stored sorted) produce
// bit-identical estimates.
fn sorted_copy(xs: &[f64]) -> Vec<f64> {
    let mut copy = xs.to_vec();
    copy.sort_unstable_by(|a, b| a.total_cmp(b));
    copy
}

fn fit_normal_complete(xs: &[f64]) -> Result<FitResult> {
    if xs.len() < 2 {
        return Err(Error::InvalidArgument(String::from(
            "location-scale fitting requires at least 2 values",
        )));
    }
    let xs = sorted_copy(xs);
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    let sd = (ss / n).sqrt();
    if !(sd > 0.0) {
        return Err(Error::DegenerateSample(String::from("all values identical")));
    }
    Ok(FitResult {
        kernel: Kernel::Normal { location: mean, scale: sd },
        loglik: -n * (sd.ln() + 0.5 * LN_2PI) - 0.5 * n,
        converged: true,
        iterations: 0,
        gradient_norm: 0.0,
    })
}

fn fit_inverse_gaussian(xs: &[f64]) -> Result<FitResult> {
    if xs.iter().any(|&x| x <= 0.0) {
        return Err(Error::InvalidArgument(String::from(
            "inverse Gaussian fitting requires positive values",
        )));
    }
    let xs = sorted_copy(xs);
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let denom = xs.iter().map(|x| 1.0 / x).sum::<f64>() - n / mean;
    if !(denom > 0.0) {
        return Err(Error::DegenerateSample(String::from(
            "shape estimate undefined: reciprocal spread is zero",
        )));
    }
    let shape = n / denom;
    let kernel = Kernel::InverseGaussian { mean, shape };
    let loglik = xs.iter().map(|&x| kernel.log_pdf(x)).sum::<f64>();
    Ok(FitResult { kernel, loglik, converged: true, iterations: 0, gradient_norm: 0.0 })
}

fn fit_gamma(xs: &[f64]) -> Result<FitResult> {
    if xs.iter().any(|&x| x <= 0.0) {
        return Err(Error::InvalidArgument(String::from("gamma fitting requires positive values")));
    }
    let xs = sorted_copy(xs);
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let mean_ln = xs.iter().map(|x| x.ln()).sum::<f64>() / n;
    let spread = mean.ln() - mean_ln;
    if !(spread > 0.0) {
        return Err(Error::DegenerateSample(String::from("all values identical")));
    }

    // Johnson-Kotz starting value, then safeguarded Newton on the decreasing
    // profile equation f(a) = log(a) - digamma(a) - spread.
    let f = |a: f64| a.ln() - special::digamma(a) - spread;
    let mut a = ((3.0 - spread) + ((spread - 3.0) * (spread - 3.0) + 24.0 * spread).sqrt())
        / (12.0 * spread);
    a = a.clamp(1e-8, 1e8);
    let (mut lo, mut hi);
    if f(a) >= 0.0 {
        lo = a;
        hi = a;
        while f(hi) > 0.0 {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::NoConvergence { what: "gamma shape bracket", iterations: 0 });
            }
        }
    } else {
        hi = a;
        lo = a;
        while f(lo) < 0.0 {
            lo *= 0.5;
            if lo < 1e-12 {
                return Err(Error::NoConvergence { what: "gamma shape bracket", iterations: 0 });
            }
        }
    }
    let mut iterations = 0u32;
    for _ in 0..100 {
        iterations += 1;
        let fa = f(a);
        if fa == 0.0 {
            break;
        }
        if fa > 0.0 {
            lo = a;
        } else {
            hi = a;
        }
        let deriv = 1.0 / a - special::trigamma(a);
        let mut next = a - fa / deriv;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        if (next - a).abs() <= 1e-14 * a {
            a = next;
            break;
        }
        a = next;
    }

    let rate = a / mean;
    let sum_x = xs.iter().sum::<f64>();
    let sum_ln = xs.iter().map(|x| x.ln()).sum::<f64>();
    let loglik = n * a * rate.ln() + (a - 1.0) * sum_ln - rate * sum_x - n * special::ln_gamma(a);
    let score_shape = n * rate.ln() + sum_ln - n * special::digamma(a);
    let score_rate = n * a / rate - sum_x;
    let gradient_norm = (a * score_shape).abs().max((rate * score_rate).abs()) / n;
    if gradient_norm > 1e-8 {
        return Err(Error::NoConvergence { what: "gamma ML", iterations });
    }
    Ok(FitResult {
        kernel: Kernel::Gamma { shape: a, rate },
        loglik,
        converged: true,
        iterations,
        gradient_norm,
    })
}

/// (log phi)' and (log phi)'' of the standardized density at z.
fn std_dlog_pdf(fam: LocScaleFamily, z: f64) -> (f64, f64) {
    match fam {
        LocScaleFamily::Normal => (-z, -1.0),
        LocScaleFamily::Logistic => {
            let p = 1.0 / (1.0 + (-z).exp());
            (1.0 - 2.0 * p, -2.0 * p * (1.0 - p))
        }
        LocScaleFamily::Sev => {
            let e = z.exp();
            (1.0 - e, -e)
        }
    }
}

/// (log of the standardized survival function)' and '' at z.
fn std_dlog_sf(fam: LocScaleFamily, z: f64) -> (f64, f64) {
    match fam {
        LocScaleFamily::Normal => {
            let hazard = SQRT_2_OVER_PI / special::erfcx(z * FRAC_1_SQRT_2);
            (-hazard, hazard * (z - hazard))
        }
        LocScaleFamily::Logistic => {
            let p = 1.0 / (1.0 + (-z).exp());
            (-p, -p * (1.0 - p))
        }
        LocScaleFamily::Sev => {
            let e = z.exp();
            (-e, -e)
        }
    }
}

/// log of the standardized survival function, stable in both tails.
fn std_ln_sf(fam: LocScaleFamily, z: f64) -> f64 {
    match fam {
        LocScaleFamily::Normal => {
            -0.5 * z * z + (0.5 * special::erfcx(z * FRAC_1_SQRT_2)).ln()
        }
        LocScaleFamily::Logistic => {
            if z > 0.0 {
                -z - (-z).exp().ln_1p()
            } else {
                -z.exp().ln_1p()
            }
        }
        LocScaleFamily::Sev => -z.exp(),
    }
}

struct LocScaleDerivs {
    ell: f64,
    d_mu: f64,
    d_sigma: f64,
    h_mu_mu: f64,
    h_mu_sigma: f64,
    h_sigma_sigma: f64,
}

/// Log-likelihood with gradient and Hessian in (mu, sigma), for `r` observed
/// values `obs` out of `n` with the rest censored at `obs[r-1]`.
fn loc_scale_derivs(fam: LocScaleFamily, obs: &[f64], n: usize, mu: f64, sigma: f64) -> LocScaleDerivs {
    let r = obs.len();
    let mut ell = -(r as f64) * sigma.ln();
    let mut sum_g1 = 0.0;
    let mut sum_zg1 = 0.0;
    let mut sum_g2 = 0.0;
    let mut sum_zg2 = 0.0;
    let mut sum_zzg2 = 0.0;
    for &x in obs {
        let z = (x - mu) / sigma;
        ell += fam.std_log_pdf(z);
        let (g1, g2) = std_dlog_pdf(fam, z);
        sum_g1 += g1;
        sum_zg1 += z * g1;
        sum_g2 += g2;
        sum_zg2 += z * g2;
        sum_zzg2 += z * z * g2;
    }
    let cens = (n - r) as f64;
    let zr = (obs[r - 1] - mu) / sigma;
    let (h1, h2) = if cens > 0.0 { std_dlog_sf(fam, zr) } else { (0.0, 0.0) };
    if cens > 0.0 {
        ell += cens * std_ln_sf(fam, zr);
    }
    let s2 = sigma * sigma;
    LocScaleDerivs {
        ell,
        d_mu: -(sum_g1 + cens * h1) / sigma,
        d_sigma: -(sum_zg1 + r as f64 + cens * zr * h1) / sigma,
        h_mu_mu: (sum_g2 + cens * h2) / s2,
        h_mu_sigma: (sum_g1 + sum_zg2 + cens * (h1 + zr * h2)) / s2,
        h_sigma_sigma: (r as f64 + 2.0 * sum_zg1 + sum_zzg2 + cens * (2.0 * zr * h1 + zr * zr * h2)) / s2,
    }
}

fn loc_scale_ell(fam: LocScaleFamily, obs: &[f64], n: usize, mu: f64, sigma: f64) -> f64 {
    let r = obs.len();
    let mut ell = -(r as f64) * sigma.ln();
    for &x in obs {
        ell += fam.std_log_pdf((x - mu) / sigma);
    }
    let cens = (n - r) as f64;
    if cens > 0.0 {
        ell += cens * std_ln_sf(fam, (obs[r - 1] - mu) / sigma);
    }
    ell
}

fn fit_loc_scale(fam: LocScaleFamily, sample: &Sample) -> Result<FitResult> {
    let n = sample.n();
    if n < 2 {
        return Err(Error::InvalidArgument(String::from(
            "location-scale fitting requires at least 2 values",
        )));
    }
    let mut obs: Vec<f64> = sample.observed().to_vec();
    obs.sort_unstable_by(|a, b| a.total_cmp(b));
    let r = obs.len();
    if obs[r - 1] == obs[0] {
        return Err(Error::DegenerateSample(String::from("all observed values identical")));
    }

    // Standardize by equivariant statistics of the observed values.
    let center = obs.iter().sum::<f64>() / r as f64;
    let spread = (obs.iter().map(|x| (x - center) * (x - center)).sum::<f64>() / r as f64).sqrt();
    let w: Vec<f64> = obs.iter().map(|x| (x - center) / spread).collect();

    // Least squares of order statistics on standard quantiles at Blom
    // plotting positions.
    let quantiles: Vec<f64> = (0..r)
        .map(|i| fam.std_quantile((i as f64 + 1.0 - 0.375) / (n as f64 + 0.25)))
        .collect();
    let q_mean = quantiles.iter().sum::<f64>() / r as f64;
    let w_mean = w.iter().sum::<f64>() / r as f64;
    let mut sqq = 0.0;
    let mut sqw = 0.0;
    for i in 0..r {
        sqq += (quantiles[i] - q_mean) * (quantiles[i] - q_mean);
        sqw += (quantiles[i] - q_mean) * (w[i] - w_mean);
    }
    let mut sigma = if sqw > 0.0 && sqq > 0.0 { sqw / sqq } else { 1.0 };
    let mut mu = w_mean - sigma * q_mean;

    let mut iterations = 0u32;
    for _ in 0..200 {
        iterations += 1;
        let d = loc_scale_derivs(fam, &w, n, mu, sigma);
        // Gradient in (mu, t = log sigma); both components are scale-free
        // after multiplying the mu component by sigma.
        let g = (d.d_mu, sigma * d.d_sigma);
        let norm = (sigma * d.d_mu).abs().max(g.1.abs()) / n as f64;
        if norm <= 1e-12 {
            break;
        }
        let h_mm = d.h_mu_mu;
        let h_mt = sigma * d.h_mu_sigma;
        let h_tt = sigma * sigma * d.h_sigma_sigma + sigma * d.d_sigma;
        let det = h_mm * h_tt - h_mt * h_mt;
        let mut dir = if det.abs() > 1e-300 {
            (-(h_tt * g.0 - h_mt * g.1) / det, -(h_mm * g.1 - h_mt * g.0) / det)
        } else {
            g
        };
        let mut slope = dir.0 * g.0 + dir.1 * g.1;
        if !slope.is_finite() || slope <= 0.0 {
            dir = g;
            slope = g.0 * g.0 + g.1 * g.1;
        }
        let t = sigma.ln();
        let mut step = 1.0f64;
        let mut moved = false;
        for _ in 0..60 {
            let mu_new = mu + step * dir.0;
            let t_new = t + step * dir.1;
            let sigma_new = t_new.exp();
            let ell_new = loc_scale_ell(fam, &w, n, mu_new, sigma_new);
            if ell_new >= d.ell + 1e-4 * step * slope && ell_new.is_finite() {
                let displacement = (step * dir.0).abs().max((step * dir.1).abs());
                mu = mu_new;
                sigma = sigma_new;
                moved = displacement > 1e-15 * (1.0 + mu.abs());
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    // Line search stalls once the likelihood is flat to rounding, which can
    // leave the score around 1e-9. Polish with pure Newton steps on the score
    // itself, accepted only while the scaled gradient norm decreases.
    let score_norm = |sigma: f64, d: &LocScaleDerivs| {
        (sigma * d.d_mu).abs().max((sigma * d.d_sigma).abs()) / n as f64
    };
    let mut d = loc_scale_derivs(fam, &w, n, mu, sigma);
    let mut norm = score_norm(sigma, &d);
    for _ in 0..8 {
        if norm == 0.0 {
            break;
        }
        let g = (d.d_mu, sigma * d.d_sigma);
        let h_mm = d.h_mu_mu;
        let h_mt = sigma * d.h_mu_sigma;
        let h_tt = sigma * sigma * d.h_sigma_sigma + sigma * d.d_sigma;
        let det = h_mm * h_tt - h_mt * h_mt;
        if !(det.abs() > 1e-300) {
            break;
        }
        let step = (-(h_tt * g.0 - h_mt * g.1) / det, -(h_mm * g.1 - h_mt * g.0) / det);
        let mu_next = mu + step.0;
        let sigma_next = (sigma.ln() + step.1).exp();
        if !mu_next.is_finite() || !(sigma_next > 0.0) || !sigma_next.is_finite() {
            break;
        }
        let d_next = loc_scale_derivs(fam, &w, n, mu_next, sigma_next);
        let norm_next = score_norm(sigma_next, &d_next);
        if !(norm_next < norm) {
            break;
        }
        mu = mu_next;
        sigma = sigma_next;
        d = d_next;
        norm = norm_next;
    }
    if norm > 1e-8 {
        return Err(Error::NoConvergence { what: "location-scale ML", iterations });
    }
    Ok(FitResult {
        kernel: fam.kernel(center + spread * mu, spread * sigma),
        loglik: d.ell - r as f64 * spread.ln(),
        converged: true,
        iterations,
        gradient_norm: norm,
    })
}
