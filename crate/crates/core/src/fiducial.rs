//! Fiducial predictive distributions for the gamma and inverse Gaussian
//! families.
//!
//! Both samplers transfer the randomness of a pivotal statistic onto the
//! parameter space. For the gamma family the scaled log-moment statistic
//! W(alpha) = 2 n alpha log(mean/geometric mean) is approximately a scaled
//! chi-square variable c chi2_v; inverting the approximation draws the
//! shape, and the rate follows from 2 lambda sum(x_i) ~ chi2_{2 n alpha}.
//! For the inverse Gaussian family the reciprocal spread gives shape draws
//! through sum(1/x_i - 1/mean) ~ chi2_{n-1}/lambda, and the mean draw is
//! recovered from the sample-mean pivot: the mean of n observations follows
//! the same family with shape n lambda, so the mean draw solves a cdf
//! equation at the observed average. That equation has no finite solution
//! with positive probability, in which case the draw is +inf and the
//! component distribution is the Levy limit of the family.

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
use crate::fit::{fit_ml, Family, Sample};
use crate::predict::PredictiveCdf;
use crate::rng::{Lane, RngPolicy};
use crate::special;

/// Parameter draws from a fiducial distribution, tagged by family.
///
/// Each pair is (shape, rate) for the gamma family and (mean, shape) for the
/// inverse Gaussian family. An inverse Gaussian mean may be +inf; every
/// other component is finite and strictly positive.
#[derive(Clone, Debug, PartialEq)]
pub struct FiducialDraws {
    family: Family,
    draws: Vec<(f64, f64)>,
}

impl FiducialDraws {
    pub fn new(family: Family, draws: Vec<(f64, f64)>) -> Result<Self> {
        match family {
            Family::Gamma | Family::InverseGaussian => {}
            _ => {
                return Err(Error::UnsupportedFamily {
                    family: family.name(),
                    operation: "fiducial draws",
                })
            }
        }
        for &(first, second) in &draws {
            let first_ok = first > 0.0
                && (first.is_finite()
                    || (family == Family::InverseGaussian && first == f64::INFINITY));
            if !(first_ok && second > 0.0 && second.is_finite()) {
                return Err(Error::InvalidParameter(String::from(
                    "fiducial draw outside the parameter space",
                )));
            }
        }
        Ok(FiducialDraws { family, draws })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.draws
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    fn kernel(&self, pair: (f64, f64)) -> Kernel {
        match self.family {
            Family::InverseGaussian => Kernel::InverseGaussian { mean: pair.0, shape: pair.1 },
            _ => Kernel::Gamma { shape: pair.0, rate: pair.1 },
        }
    }
}

/// Chi-square draw by cdf inversion. Inversion keeps a paired-seed draw a
/// smooth function of the degrees of freedom, which rejection samplers do
/// not guarantee, so rescaling the data moves every draw continuously.
fn chi_square_by_inversion<R: Rng + ?Sized>(df: f64, rng: &mut R) -> Result<f64> {
    let u: f64 = rng.sample(Open01);
    Kernel::ChiSquare { df }.quantile(u)
}

fn complete_positive_values<'a>(sample: &'a Sample, family: Family) -> Result<&'a [f64]> {
    if !sample.is_complete() {
        return Err(Error::UnsupportedFamily {
            family: family.name(),
            operation: "censored fiducial sampling",
        });
    }
    let values = sample.values();
    if values.iter().any(|&x| x <= 0.0) {
        return Err(Error::InvalidArgument(String::from(
            "fiducial sampling requires positive values",
        )));
    }
    Ok(values)
}

/// Shape and rate draws for the gamma family via the scaled chi-square
/// approximation to the marginal fiducial distribution of the shape, with
/// the ML estimate supplying the moment-matching constants.
pub fn gamma_fiducial_draws(
    sample: &Sample,
    replicates: u32,
    policy: &RngPolicy,
) -> Result<FiducialDraws> {
    if replicates == 0 {
        return Err(Error::InvalidArgument(String::from(
            "fiducial draw count must be at least 1",
        )));
    }
    let values = complete_positive_values(sample, Family::Gamma)?;
    let fit = fit_ml(Family::Gamma, sample)?;
    let alpha_hat = match fit.kernel {
        Kernel::Gamma { shape, .. } => shape,
        _ => unreachable!("gamma fit produced a non-gamma kernel"),
    };

    let n = sample.n() as f64;
    let sum: f64 = values.iter().sum();
    let mean = sum / n;
    let mean_ln = values.iter().map(|x| x.ln()).sum::<f64>() / n;
    let log_term = 2.0 * n * (mean.ln() - mean_ln);
    if !(log_term > 0.0) {
        return Err(Error::DegenerateSample(String::from(
            "arithmetic and geometric means coincide",
        )));
    }

    let e_s1 = special::digamma(alpha_hat * n) - special::digamma(alpha_hat) - n.ln();
    let var_s1 = special::trigamma(alpha_hat) / n - special::trigamma(alpha_hat * n);
    if !(e_s1 > 0.0 && var_s1 > 0.0) {
        return Err(Error::DegenerateSample(String::from(
            "chi-square matching moments are not positive",
        )));
    }
    let v_hat = 2.0 * e_s1 * e_s1 / var_s1;
    let c_hat = 2.0 * n * alpha_hat * e_s1 / v_hat;

    let mut draws = Vec::with_capacity(replicates as usize);
    for index in 0..replicates {
        let mut rng = policy.substream(Lane::Fiducial, index as u64);
        let w = chi_square_by_inversion(v_hat, &mut rng)?;
        let alpha_b = c_hat * w / log_term;
        let q = chi_square_by_inversion(2.0 * n * alpha_b, &mut rng)?;
        draws.push((alpha_b, q / (2.0 * sum)));
    }
    FiducialDraws::new(Family::Gamma, draws)
}

/// Mean and shape draws for the inverse Gaussian family; mean draws may be
/// +inf, the Levy limit, which carries positive fiducial probability.
pub fn invgauss_fiducial_draws(
    sample: &Sample,
    replicates: u32,
    policy: &RngPolicy,
) -> Result<FiducialDraws> {
    if replicates == 0 {
        return Err(Error::InvalidArgument(String::from(
            "fiducial draw count must be at least 1",
        )));
    }
    let values = complete_positive_values(sample, Family::InverseGaussian)?;
    let n = sample.n() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let spread = values.iter().map(|x| 1.0 / x).sum::<f64>() - n / mean;
    if !(spread > 0.0) {
        return Err(Error::DegenerateSample(String::from(
            "shape pivot undefined: reciprocal spread is zero",
        )));
    }

    let mut draws = Vec::with_capacity(replicates as usize);
    for index in 0..replicates {
        let mut rng = policy.substream(Lane::Fiducial, index as u64);
        let lambda_b = chi_square_by_inversion(n - 1.0, &mut rng)? / spread;
        let u: f64 = rng.sample(Open01);
        let mu_b = solve_invgauss_mean(mean, n * lambda_b, u)?;
        draws.push((mu_b, lambda_b));
    }
    FiducialDraws::new(Family::InverseGaussian, draws)
}

/// Recover a mean draw from the sample-mean pivot: the mu solving
/// F(mean; mu, shape) = u, or +inf when even the Levy limit puts mass u
/// above the observed mean. The cdf decreases in mu from 1 toward the Levy
/// value, so bisection on (0, 1e12 mean] pins the root to a relative width
/// of 1e-10.
fn solve_invgauss_mean(mean: f64, shape: f64, u: f64) -> Result<f64> {
    let levy = Kernel::InverseGaussian { mean: f64::INFINITY, shape };
    if mean >= levy.quantile(u)? {
        return Ok(f64::INFINITY);
    }
    let value = |mu: f64| Kernel::InverseGaussian { mean: mu, shape }.cdf(mean);
    let mut lo = 0.0;
    let mut hi = 1e12 * mean;
    if value(hi) > u {
        return Err(Error::RootNotBracketed { what: "inverse Gaussian fiducial mean" });
    }
    for _ in 0..200 {
        if hi - lo <= 1e-10 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if value(mid) > u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Mixture predictive cdf over the fiducial parameter draws.
pub fn fiducial_predictive_cdf(draws: &FiducialDraws) -> Result<PredictiveCdf> {
    if draws.is_empty() {
        return Err(Error::InvalidArgument(String::from("fiducial draw set is empty")));
    }
    let components: Vec<Kernel> = draws.pairs().iter().map(|&pair| draws.kernel(pair)).collect();
    let reference = draws.kernel(median_pair(draws.pairs()));
    PredictiveCdf::mixture(reference, components, "fiducial")
}

/// Component-wise lower median: a stable bracketing start for quantile
/// search even when some mean draws are infinite.
fn median_pair(pairs: &[(f64, f64)]) -> (f64, f64) {
    let mut firsts: Vec<f64> = pairs.iter().map(|pair| pair.0).collect();
    let mut seconds: Vec<f64> = pairs.iter().map(|pair| pair.1).collect();
    firsts.sort_unstable_by(f64::total_cmp);
    seconds.sort_unstable_by(f64::total_cmp);
    (firsts[(firsts.len() - 1) / 2], seconds[(seconds.len() - 1) / 2])
}
