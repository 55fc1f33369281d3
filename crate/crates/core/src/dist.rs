//! Distribution kernels: cdf, survival, quantile, density, and sampling for
//! every family the prediction methods draw on.
//!
//! Continuous families route cdf and quantile work through the special
//! function layer so tail probabilities keep relative accuracy far past the
//! point where `1 - p` rounds to one. Discrete families evaluate cdfs either
//! through regularized incomplete functions (binomial, Poisson, negative
//! binomial) or through log-space summation from the nearer end of the
//! support (hypergeometric, beta-binomial), exponentiating once at the end.
//!
//! The inverse Gaussian kernel admits `mean = +inf`: the limit law with cdf
//! `erfc(sqrt(shape / (2 x)))`. Fiducial samplers emit that limit with
//! positive probability, and mixtures over fiducial draws stay well defined
//! only if the kernel itself handles it.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

// Needed for float math in no_std builds; in test builds a dev-dependency
// links std, which makes it redundant.
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, Open01, StandardNormal};

use crate::error::{Error, Result};
use crate::special;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;
const LN_2PI: f64 = 1.837_877_066_409_345_4;
const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Standardized member of the location-scale families handled in closed form.
///
/// `Sev` is the smallest extreme value law with standard cdf
/// `1 - exp(-exp(z))`, which makes the Weibull a log-location-scale member.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LocScaleFamily {
    Normal,
    Logistic,
    Sev,
}

impl LocScaleFamily {
    pub fn name(self) -> &'static str {
        match self {
            LocScaleFamily::Normal => "normal",
            LocScaleFamily::Logistic => "logistic",
            LocScaleFamily::Sev => "sev",
        }
    }

    /// Kernel with this standardized shape, location `mu`, scale `sigma`.
    pub fn kernel(self, location: f64, scale: f64) -> Kernel {
        match self {
            LocScaleFamily::Normal => Kernel::Normal { location, scale },
            LocScaleFamily::Logistic => Kernel::Logistic { location, scale },
            LocScaleFamily::Sev => Kernel::Sev { location, scale },
        }
    }

    pub fn std_cdf(self, z: f64) -> f64 {
        match self {
            LocScaleFamily::Normal => 0.5 * special::erfc(-z * FRAC_1_SQRT_2),
            LocScaleFamily::Logistic => 1.0 / (1.0 + (-z).exp()),
            LocScaleFamily::Sev => -(-z.exp()).exp_m1(),
        }
    }

    pub fn std_sf(self, z: f64) -> f64 {
        match self {
            LocScaleFamily::Normal => 0.5 * special::erfc(z * FRAC_1_SQRT_2),
            LocScaleFamily::Logistic => 1.0 / (1.0 + z.exp()),
            LocScaleFamily::Sev => (-z.exp()).exp(),
        }
    }

    /// Inverse of `std_cdf` on (0, 1).
    pub fn std_quantile(self, p: f64) -> f64 {
        match self {
            LocScaleFamily::Normal => special::norm_quantile(p),
            LocScaleFamily::Logistic => p.ln() - (-p).ln_1p(),
            LocScaleFamily::Sev => (-(-p).ln_1p()).ln(),
        }
    }

    /// Inverse of `std_sf` on (0, 1); accurate for `q` far below machine
    /// epsilon where `std_quantile(1 - q)` would lose the tail.
    pub fn std_inv_sf(self, q: f64) -> f64 {
        match self {
            LocScaleFamily::Normal => -special::norm_quantile(q),
            LocScaleFamily::Logistic => (-q).ln_1p() - q.ln(),
            LocScaleFamily::Sev => (-q.ln()).ln(),
        }
    }

    pub fn std_log_pdf(self, z: f64) -> f64 {
        match self {
            LocScaleFamily::Normal => -0.5 * z * z - LN_SQRT_2PI,
            LocScaleFamily::Logistic => {
                let a = -z.abs();
                a - 2.0 * a.exp().ln_1p()
            }
            LocScaleFamily::Sev => z - z.exp(),
        }
    }
}

/// A fully parameterized distribution, the unit every prediction method
/// composes: data models, bootstrap draws, predictive mixtures.
///
/// Construct a value, call [`Kernel::validate`] once, then use the evaluation
/// methods freely; they assume valid parameters. `draw` and `quantile`
/// re-check the cheap constraints and report violations as errors.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "snake_case"))]
pub enum Kernel {
    Normal { location: f64, scale: f64 },
    Logistic { location: f64, scale: f64 },
    Sev { location: f64, scale: f64 },
    Gamma { shape: f64, rate: f64 },
    InverseGaussian { mean: f64, shape: f64 },
    Binomial { trials: u64, prob: f64 },
    Poisson { mean: f64 },
    Hypergeometric { successes: u64, draws: u64, population: u64 },
    BetaBinomial { trials: u64, alpha: f64, beta: f64 },
    NegativeBinomial { size: f64, prob: f64 },
    ChiSquare { df: f64 },
    StudentT { df: f64 },
    Uniform01,
}

fn require(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(String::from(what)))
    }
}

fn pos_finite(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

impl Kernel {
    pub fn family_name(&self) -> &'static str {
        match self {
            Kernel::Normal { .. } => "normal",
            Kernel::Logistic { .. } => "logistic",
            Kernel::Sev { .. } => "sev",
            Kernel::Gamma { .. } => "gamma",
            Kernel::InverseGaussian { .. } => "inverse_gaussian",
            Kernel::Binomial { .. } => "binomial",
            Kernel::Poisson { .. } => "poisson",
            Kernel::Hypergeometric { .. } => "hypergeometric",
            Kernel::BetaBinomial { .. } => "beta_binomial",
            Kernel::NegativeBinomial { .. } => "negative_binomial",
            Kernel::ChiSquare { .. } => "chi_square",
            Kernel::StudentT { .. } => "student_t",
            Kernel::Uniform01 => "uniform01",
        }
    }

    /// Check every parameter constraint for this family.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Kernel::Normal { location, scale }
            | Kernel::Logistic { location, scale }
            | Kernel::Sev { location, scale } => {
                require(location.is_finite(), "location must be finite")?;
                require(pos_finite(scale), "scale must be finite and positive")
            }
            Kernel::Gamma { shape, rate } => {
                require(pos_finite(shape), "gamma shape must be finite and positive")?;
                require(pos_finite(rate), "gamma rate must be finite and positive")
            }
            Kernel::InverseGaussian { mean, shape } => {
                require(
                    mean > 0.0 && !mean.is_nan(),
                    "inverse Gaussian mean must be positive (may be +inf)",
                )?;
                require(pos_finite(shape), "inverse Gaussian shape must be finite and positive")
            }
            Kernel::Binomial { trials, prob } => {
                require(trials >= 1, "binomial trials must be at least 1")?;
                require(prob > 0.0 && prob < 1.0, "binomial prob must lie in (0, 1)")
            }
            Kernel::Poisson { mean } => require(pos_finite(mean), "Poisson mean must be finite and positive"),
            Kernel::Hypergeometric { successes, draws, population } => {
                require(population >= 1, "hypergeometric population must be at least 1")?;
                require(successes <= population, "hypergeometric successes must not exceed population")?;
                require(
                    draws >= 1 && draws <= population,
                    "hypergeometric draws must lie in [1, population]",
                )
            }
            Kernel::BetaBinomial { trials, alpha, beta } => {
                require(trials >= 1, "beta-binomial trials must be at least 1")?;
                require(pos_finite(alpha), "beta-binomial alpha must be finite and positive")?;
                require(pos_finite(beta), "beta-binomial beta must be finite and positive")
            }
            Kernel::NegativeBinomial { size, prob } => {
                require(pos_finite(size), "negative binomial size must be finite and positive")?;
                require(prob > 0.0 && prob < 1.0, "negative binomial prob must lie in (0, 1)")
            }
            Kernel::ChiSquare { df } => require(pos_finite(df), "chi-square df must be finite and positive"),
            Kernel::StudentT { df } => require(pos_finite(df), "Student t df must be finite and positive"),
            Kernel::Uniform01 => Ok(()),
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(
            self,
            Kernel::Binomial { .. }
                | Kernel::Poisson { .. }
                | Kernel::Hypergeometric { .. }
                | Kernel::BetaBinomial { .. }
                | Kernel::NegativeBinomial { .. }
        )
    }

    /// Location-scale view when the family has one.
    pub fn loc_scale(&self) -> Option<(LocScaleFamily, f64, f64)> {
        match *self {
            Kernel::Normal { location, scale } => Some((LocScaleFamily::Normal, location, scale)),
            Kernel::Logistic { location, scale } => Some((LocScaleFamily::Logistic, location, scale)),
            Kernel::Sev { location, scale } => Some((LocScaleFamily::Sev, location, scale)),
            _ => None,
        }
    }

    /// Support of a discrete kernel as `(lowest point, highest point)`;
    /// `None` in the second slot means unbounded above.
    fn discrete_support(&self) -> (u64, Option<u64>) {
        match *self {
            Kernel::Binomial { trials, .. } => (0, Some(trials)),
            Kernel::Poisson { .. } => (0, None),
            Kernel::Hypergeometric { successes, draws, population } => {
                let lo = (draws + successes).saturating_sub(population);
                (lo, Some(draws.min(successes)))
            }
            Kernel::BetaBinomial { trials, .. } => (0, Some(trials)),
            Kernel::NegativeBinomial { .. } => (0, None),
            _ => unreachable!("support queried on a continuous kernel"),
        }
    }

    /// P(X <= x). For discrete kernels this is the right-continuous step
    /// function evaluated at `floor(x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Kernel::Normal { location, scale } => LocScaleFamily::Normal.std_cdf((x - location) / scale),
            Kernel::Logistic { location, scale } => LocScaleFamily::Logistic.std_cdf((x - location) / scale),
            Kernel::Sev { location, scale } => LocScaleFamily::Sev.std_cdf((x - location) / scale),
            Kernel::Gamma { shape, rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    special::reg_gamma_p(shape, rate * x)
                }
            }
            Kernel::InverseGaussian { mean, shape } => ig_cdf(mean, shape, x),
            Kernel::Binomial { trials, prob } => match discrete_arg(x, 0, Some(trials)) {
                DiscreteArg::Below => 0.0,
                DiscreteArg::Above => 1.0,
                DiscreteArg::At(k) => special::reg_beta((trials - k) as f64, k as f64 + 1.0, 1.0 - prob),
            },
            Kernel::Poisson { mean } => match discrete_arg(x, 0, None) {
                DiscreteArg::Below => 0.0,
                DiscreteArg::Above => 1.0,
                DiscreteArg::At(k) => special::reg_gamma_q(k as f64 + 1.0, mean),
            },
            Kernel::Hypergeometric { successes, draws, population } => {
                let (lo, hi) = self.discrete_support();
                let hi = hi.unwrap();
                match discrete_arg(x, lo, Some(hi)) {
                    DiscreteArg::Below => 0.0,
                    DiscreteArg::Above => 1.0,
                    DiscreteArg::At(k) => {
                        let ln_pmf = |j: u64| hyper_ln_pmf(successes, draws, population, j);
                        sum_discrete_cdf(lo, hi, k, &ln_pmf)
                    }
                }
            }
            Kernel::BetaBinomial { trials, alpha, beta } => match discrete_arg(x, 0, Some(trials)) {
                DiscreteArg::Below => 0.0,
                DiscreteArg::Above => 1.0,
                DiscreteArg::At(k) => {
                    let ln_pmf = |j: u64| beta_binom_ln_pmf(trials, alpha, beta, j);
                    sum_discrete_cdf(0, trials, k, &ln_pmf)
                }
            },
            Kernel::NegativeBinomial { size, prob } => match discrete_arg(x, 0, None) {
                DiscreteArg::Below => 0.0,
                DiscreteArg::Above => 1.0,
                DiscreteArg::At(k) => special::reg_beta(size, k as f64 + 1.0, prob),
            },
            Kernel::ChiSquare { df } => {
                if x <= 0.0 {
                    0.0
                } else {
                    special::reg_gamma_p(0.5 * df, 0.5 * x)
                }
            }
            Kernel::StudentT { df } => {
                let half = 0.5 * t_tail_beta(df, x);
                if x >= 0.0 {
                    1.0 - half
                } else {
                    half
                }
            }
            Kernel::Uniform01 => x.clamp(0.0, 1.0),
        }
    }

    /// P(X > x), computed in survival space so deep right tails keep relative
    /// accuracy instead of rounding against one.
    pub fn sf(&self, x: f64) -> f64 {
        match *self {
            Kernel::Normal { location, scale } => LocScaleFamily::Normal.std_sf((x - location) / scale),
            Kernel::Logistic { location, scale } => LocScaleFamily::Logistic.std_sf((x - location) / scale),
            Kernel::Sev { location, scale } => LocScaleFamily::Sev.std_sf((x - location) / scale),
            Kernel::Gamma { shape, rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    special::reg_gamma_q(shape, rate * x)
                }
            }
            Kernel::InverseGaussian { mean, shape } => ig_sf(mean, shape, x),
            Kernel::Binomial { trials, prob } => match discrete_arg(x, 0, Some(trials)) {
                DiscreteArg::Below => 1.0,
                DiscreteArg::Above => 0.0,
                DiscreteArg::At(k) => special::reg_beta((k + 1) as f64, (trials - k) as f64, prob),
            },
            Kernel::Poisson { mean } => match discrete_arg(x, 0, None) {
                DiscreteArg::Below => 1.0,
                DiscreteArg::Above => 0.0,
                DiscreteArg::At(k) => special::reg_gamma_p((k + 1) as f64, mean),
            },
            Kernel::Hypergeometric { successes, draws, population } => {
                let (lo, hi) = self.discrete_support();
                let hi = hi.unwrap();
                match discrete_arg(x, lo, Some(hi)) {
                    DiscreteArg::Below => 1.0,
                    DiscreteArg::Above => 0.0,
                    DiscreteArg::At(k) => {
                        let ln_pmf = |j: u64| hyper_ln_pmf(successes, draws, population, j);
                        sum_discrete_sf(lo, hi, k, &ln_pmf)
                    }
                }
            }
            Kernel::BetaBinomial { trials, alpha, beta } => match discrete_arg(x, 0, Some(trials)) {
                DiscreteArg::Below => 1.0,
                DiscreteArg::Above => 0.0,
                DiscreteArg::At(k) => {
                    let ln_pmf = |j: u64| beta_binom_ln_pmf(trials, alpha, beta, j);
                    sum_discrete_sf(0, trials, k, &ln_pmf)
                }
            },
            Kernel::NegativeBinomial { size, prob } => match discrete_arg(x, 0, None) {
                DiscreteArg::Below => 1.0,
                DiscreteArg::Above => 0.0,
                DiscreteArg::At(k) => special::reg_beta((k + 1) as f64, size, 1.0 - prob),
            },
            Kernel::ChiSquare { df } => {
                if x <= 0.0 {
                    1.0
                } else {
                    special::reg_gamma_q(0.5 * df, 0.5 * x)
                }
            }
            Kernel::StudentT { df } => {
                let half = 0.5 * t_tail_beta(df, x);
                if x >= 0.0 {
                    half
                } else {
                    1.0 - half
                }
            }
            Kernel::Uniform01 => (1.0 - x).clamp(0.0, 1.0),
        }
    }

    /// inf{x : cdf(x) >= p}. Continuous kernels require `p` in (0, 1);
    /// discrete kernels accept [0, 1], with `p = 1` mapping to the top of a
    /// bounded support and to `+inf` for an unbounded one.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if self.is_discrete() {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidProbability { value: p });
            }
            return Ok(self.discrete_quantile(p));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidProbability { value: p });
        }
        Ok(match *self {
            Kernel::Normal { location, scale } => location + scale * LocScaleFamily::Normal.std_quantile(p),
            Kernel::Logistic { location, scale } => location + scale * LocScaleFamily::Logistic.std_quantile(p),
            Kernel::Sev { location, scale } => location + scale * LocScaleFamily::Sev.std_quantile(p),
            Kernel::Gamma { shape, rate } => special::inv_reg_gamma_p(shape, p) / rate,
            Kernel::InverseGaussian { mean, shape } => {
                if mean.is_infinite() {
                    levy_quantile(shape, p)
                } else {
                    ig_invert(mean, shape, p, false)
                }
            }
            Kernel::ChiSquare { df } => 2.0 * special::inv_reg_gamma_p(0.5 * df, p),
            Kernel::StudentT { df } => t_quantile(df, p),
            Kernel::Uniform01 => p,
            _ => unreachable!(),
        })
    }

    /// inf{x : sf(x) <= q}; the upper-tail companion to `quantile`, accurate
    /// for `q` much smaller than machine epsilon.
    pub fn inv_sf(&self, q: f64) -> Result<f64> {
        if self.is_discrete() {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::InvalidProbability { value: q });
            }
            return Ok(self.discrete_inv_sf(q));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidProbability { value: q });
        }
        Ok(match *self {
            Kernel::Normal { location, scale } => location + scale * LocScaleFamily::Normal.std_inv_sf(q),
            Kernel::Logistic { location, scale } => location + scale * LocScaleFamily::Logistic.std_inv_sf(q),
            Kernel::Sev { location, scale } => location + scale * LocScaleFamily::Sev.std_inv_sf(q),
            Kernel::Gamma { shape, rate } => special::inv_reg_gamma_q(shape, q) / rate,
            Kernel::InverseGaussian { mean, shape } => {
                if mean.is_infinite() {
                    levy_inv_sf(shape, q)
                } else {
                    ig_invert(mean, shape, q, true)
                }
            }
            Kernel::ChiSquare { df } => 2.0 * special::inv_reg_gamma_q(0.5 * df, q),
            Kernel::StudentT { df } => -t_quantile(df, q),
            Kernel::Uniform01 => 1.0 - q,
            _ => unreachable!(),
        })
    }

    /// Natural log of the density (continuous) or mass function (discrete);
    /// `-inf` off the support.
    pub fn log_pdf(&self, x: f64) -> f64 {
        match *self {
            Kernel::Normal { location, scale } => {
                LocScaleFamily::Normal.std_log_pdf((x - location) / scale) - scale.ln()
            }
            Kernel::Logistic { location, scale } => {
                LocScaleFamily::Logistic.std_log_pdf((x - location) / scale) - scale.ln()
            }
            Kernel::Sev { location, scale } => {
                LocScaleFamily::Sev.std_log_pdf((x - location) / scale) - scale.ln()
            }
            Kernel::Gamma { shape, rate } => {
                if x < 0.0 {
                    f64::NEG_INFINITY
                } else {
                    shape * rate.ln() + (shape - 1.0) * x.ln() - rate * x - special::ln_gamma(shape)
                }
            }
            Kernel::InverseGaussian { mean, shape } => ig_log_pdf(mean, shape, x),
            Kernel::Binomial { trials, prob } => match exact_count(x, 0, Some(trials)) {
                None => f64::NEG_INFINITY,
                Some(k) => {
                    special::ln_choose(trials, k)
                        + k as f64 * prob.ln()
                        + (trials - k) as f64 * (-prob).ln_1p()
                }
            },
            Kernel::Poisson { mean } => match exact_count(x, 0, None) {
                None => f64::NEG_INFINITY,
                Some(k) => k as f64 * mean.ln() - mean - special::ln_gamma(k as f64 + 1.0),
            },
            Kernel::Hypergeometric { successes, draws, population } => {
                let (lo, hi) = self.discrete_support();
                match exact_count(x, lo, hi) {
                    None => f64::NEG_INFINITY,
                    Some(k) => hyper_ln_pmf(successes, draws, population, k),
                }
            }
            Kernel::BetaBinomial { trials, alpha, beta } => match exact_count(x, 0, Some(trials)) {
                None => f64::NEG_INFINITY,
                Some(k) => beta_binom_ln_pmf(trials, alpha, beta, k),
            },
            Kernel::NegativeBinomial { size, prob } => match exact_count(x, 0, None) {
                None => f64::NEG_INFINITY,
                Some(k) => {
                    let y = k as f64;
                    special::ln_gamma(y + size) - special::ln_gamma(size) - special::ln_gamma(y + 1.0)
                        + size * prob.ln()
                        + y * (-prob).ln_1p()
                }
            },
            Kernel::ChiSquare { df } => {
                if x <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    let h = 0.5 * df;
                    (h - 1.0) * x.ln() - 0.5 * x - h * core::f64::consts::LN_2 - special::ln_gamma(h)
                }
            }
            Kernel::StudentT { df } => {
                special::ln_gamma(0.5 * (df + 1.0))
                    - special::ln_gamma(0.5 * df)
                    - 0.5 * (df * core::f64::consts::PI).ln()
                    - 0.5 * (df + 1.0) * (x * x / df).ln_1p()
            }
            Kernel::Uniform01 => {
                if (0.0..=1.0).contains(&x) {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    /// One variate. Validates first so constraint violations surface as
    /// errors rather than sampler panics.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        self.validate()?;
        Ok(self.draw_valid(rng))
    }

    /// `count` i.i.d. variates, deterministic given the generator state.
    pub fn draw_vec<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Result<Vec<f64>> {
        if count == 0 {
            return Err(Error::InvalidArgument(String::from("draw count must be at least 1")));
        }
        self.validate()?;
        Ok((0..count).map(|_| self.draw_valid(rng)).collect())
    }

    fn draw_valid<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Kernel::Normal { location, scale } => {
                let z: f64 = rng.sample(StandardNormal);
                location + scale * z
            }
            Kernel::Logistic { location, scale } => {
                let u: f64 = rng.sample(Open01);
                location + scale * (u.ln() - (-u).ln_1p())
            }
            Kernel::Sev { location, scale } => {
                let u: f64 = rng.sample(Open01);
                location + scale * (-u.ln()).ln()
            }
            Kernel::Gamma { shape, rate } => {
                let g = rand_distr::Gamma::new(shape, 1.0 / rate).expect("validated");
                g.sample(rng)
            }
            Kernel::InverseGaussian { mean, shape } => {
                if mean.is_infinite() {
                    let z = loop {
                        let z: f64 = rng.sample(StandardNormal);
                        if z != 0.0 {
                            break z;
                        }
                    };
                    shape / (z * z)
                } else {
                    rand_distr::InverseGaussian::new(mean, shape).expect("validated").sample(rng)
                }
            }
            Kernel::Binomial { trials, prob } => {
                rand_distr::Binomial::new(trials, prob).expect("validated").sample(rng) as f64
            }
            Kernel::Poisson { mean } => {
                let d = rand_distr::Poisson::new(mean).expect("validated");
                let y: f64 = d.sample(rng);
                y
            }
            Kernel::Hypergeometric { successes, draws, population } => {
                rand_distr::Hypergeometric::new(population, successes, draws)
                    .expect("validated")
                    .sample(rng) as f64
            }
            Kernel::BetaBinomial { trials, alpha, beta } => {
                let p: f64 = rand_distr::Beta::new(alpha, beta).expect("validated").sample(rng);
                if p <= 0.0 {
                    0.0
                } else if p >= 1.0 {
                    trials as f64
                } else {
                    rand_distr::Binomial::new(trials, p).expect("p in (0,1)").sample(rng) as f64
                }
            }
            Kernel::NegativeBinomial { size, prob } => {
                let g: f64 = rand_distr::Gamma::new(size, (1.0 - prob) / prob)
                    .expect("validated")
                    .sample(rng);
                if g > 0.0 {
                    let d = rand_distr::Poisson::new(g).expect("positive mean");
                    let y: f64 = d.sample(rng);
                    y
                } else {
                    0.0
                }
            }
            Kernel::ChiSquare { df } => rand_distr::ChiSquared::new(df).expect("validated").sample(rng),
            Kernel::StudentT { df } => rand_distr::StudentT::new(df).expect("validated").sample(rng),
            Kernel::Uniform01 => rng.random::<f64>(),
        }
    }

    fn discrete_quantile(&self, p: f64) -> f64 {
        let (lo, hi) = self.discrete_support();
        if p == 0.0 {
            return lo as f64;
        }
        if p == 1.0 {
            return match hi {
                Some(h) => h as f64,
                None => f64::INFINITY,
            };
        }
        let hi = match hi {
            Some(h) => h,
            None => self.grow_upper(|k| self.cdf(k as f64) >= p),
        };
        let mut k = lower_bound(lo, hi, |k| self.cdf(k as f64) >= p);
        while k > lo && self.cdf((k - 1) as f64) >= p {
            k -= 1;
        }
        while self.cdf(k as f64) < p && k < hi {
            k += 1;
        }
        k as f64
    }

    fn discrete_inv_sf(&self, q: f64) -> f64 {
        let (lo, hi) = self.discrete_support();
        if q == 0.0 {
            return match hi {
                Some(h) => h as f64,
                None => f64::INFINITY,
            };
        }
        if q == 1.0 {
            return lo as f64;
        }
        let hi = match hi {
            Some(h) => h,
            None => self.grow_upper(|k| self.sf(k as f64) <= q),
        };
        let mut k = lower_bound(lo, hi, |k| self.sf(k as f64) <= q);
        while k > lo && self.sf((k - 1) as f64) <= q {
            k -= 1;
        }
        while self.sf(k as f64) > q && k < hi {
            k += 1;
        }
        k as f64
    }

    /// Upper bracket for integer searches on an unbounded support: start past
    /// the mean plus ten standard deviations and double until `done`.
    fn grow_upper(&self, done: impl Fn(u64) -> bool) -> u64 {
        let (mean, sd) = match *self {
            Kernel::Poisson { mean } => (mean, mean.sqrt()),
            Kernel::NegativeBinomial { size, prob } => {
                let mean = size * (1.0 - prob) / prob;
                (mean, (size * (1.0 - prob)).sqrt() / prob)
            }
            _ => unreachable!(),
        };
        let mut h = (mean + 10.0 * sd + 16.0).min(u64::MAX as f64 / 4.0) as u64;
        for _ in 0..200 {
            if done(h) {
                return h;
            }
            h = h.saturating_mul(2).saturating_add(16);
        }
        h
    }
}

/// Smallest `k` in `[lo, hi]` with `pred(k)` true, assuming `pred` is
/// monotone (false then true) and `pred(hi)` holds.
fn lower_bound(lo: u64, hi: u64, pred: impl Fn(u64) -> bool) -> u64 {
    let (mut a, mut b) = (lo, hi);
    while a < b {
        let mid = a + (b - a) / 2;
        if pred(mid) {
            b = mid;
        } else {
            a = mid + 1;
        }
    }
    b
}

enum DiscreteArg {
    Below,
    At(u64),
    Above,
}

/// Classify a real argument against an integer support for cdf evaluation.
fn discrete_arg(x: f64, lo: u64, hi: Option<u64>) -> DiscreteArg {
    if x.is_nan() || x < lo as f64 {
        return DiscreteArg::Below;
    }
    let k = x.floor();
    if let Some(h) = hi {
        if k >= h as f64 {
            return DiscreteArg::Above;
        }
    }
    DiscreteArg::At(k as u64)
}

/// The support point `x` denotes, if `x` is exactly an integer inside the
/// support; mass functions vanish elsewhere.
fn exact_count(x: f64, lo: u64, hi: Option<u64>) -> Option<u64> {
    if !x.is_finite() || x.floor() != x || x < lo as f64 {
        return None;
    }
    if let Some(h) = hi {
        if x > h as f64 {
            return None;
        }
    }
    Some(x as u64)
}

/// cdf at `k` by log-space accumulation from the nearer end of `[lo, hi]`.
fn sum_discrete_cdf(lo: u64, hi: u64, k: u64, ln_pmf: &dyn Fn(u64) -> f64) -> f64 {
    debug_assert!((lo..hi).contains(&k));
    if k - lo <= hi - k - 1 {
        let mut acc = f64::NEG_INFINITY;
        for j in lo..=k {
            acc = special::log_add_exp(acc, ln_pmf(j));
        }
        acc.exp().min(1.0)
    } else {
        let mut acc = f64::NEG_INFINITY;
        for j in (k + 1)..=hi {
            acc = special::log_add_exp(acc, ln_pmf(j));
        }
        (1.0 - acc.exp()).max(0.0)
    }
}

fn sum_discrete_sf(lo: u64, hi: u64, k: u64, ln_pmf: &dyn Fn(u64) -> f64) -> f64 {
    debug_assert!((lo..hi).contains(&k));
    if hi - k - 1 <= k - lo {
        let mut acc = f64::NEG_INFINITY;
        for j in (k + 1)..=hi {
            acc = special::log_add_exp(acc, ln_pmf(j));
        }
        acc.exp().min(1.0)
    } else {
        let mut acc = f64::NEG_INFINITY;
        for j in lo..=k {
            acc = special::log_add_exp(acc, ln_pmf(j));
        }
        (1.0 - acc.exp()).max(0.0)
    }
}

fn hyper_ln_pmf(successes: u64, draws: u64, population: u64, k: u64) -> f64 {
    special::ln_choose(successes, k) + special::ln_choose(population - successes, draws - k)
        - special::ln_choose(population, draws)
}

fn beta_binom_ln_pmf(trials: u64, alpha: f64, beta: f64, k: u64) -> f64 {
    let y = k as f64;
    special::ln_choose(trials, k) + special::ln_beta(y + alpha, trials as f64 - y + beta)
        - special::ln_beta(alpha, beta)
}

/// Inverse Gaussian cdf. Both exponentially small pieces are assembled from
/// `erfcx` so neither tail overflows or cancels: with
/// `a = sqrt(shape/x) (x/mean - 1)` and `b = sqrt(shape/x) (x/mean + 1)`,
/// `exp(2 shape / mean) Phi(-b) = exp(-a^2/2) erfcx(b / sqrt(2)) / 2`.
fn ig_cdf(mean: f64, shape: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if mean.is_infinite() {
        return special::erfc((0.5 * shape / x).sqrt());
    }
    let s = (shape / x).sqrt();
    let a = s * (x / mean - 1.0);
    let b = s * (x / mean + 1.0);
    if a < 0.0 {
        let front = 0.5 * (-0.5 * a * a).exp();
        front * (special::erfcx(-a * FRAC_1_SQRT_2) + special::erfcx(b * FRAC_1_SQRT_2))
    } else {
        1.0 - ig_sf_right(a, b)
    }
}

fn ig_sf(mean: f64, shape: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if mean.is_infinite() {
        return special::erf((0.5 * shape / x).sqrt());
    }
    let s = (shape / x).sqrt();
    let a = s * (x / mean - 1.0);
    let b = s * (x / mean + 1.0);
    if a < 0.0 {
        1.0 - ig_cdf(mean, shape, x)
    } else {
        ig_sf_right(a, b)
    }
}

fn ig_sf_right(a: f64, b: f64) -> f64 {
    debug_assert!(a >= 0.0 && b >= a);
    let front = 0.5 * (-0.5 * a * a).exp();
    front * (special::erfcx(a * FRAC_1_SQRT_2) - special::erfcx(b * FRAC_1_SQRT_2))
}

fn ig_log_pdf(mean: f64, shape: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let quad = if mean.is_infinite() {
        0.5 * shape / x
    } else {
        let d = x - mean;
        shape * d * d / (2.0 * mean * mean * x)
    };
    0.5 * (shape.ln() - LN_2PI - 3.0 * x.ln()) - quad
}

/// Quantile of the `mean = +inf` limit law.
fn levy_quantile(shape: f64, p: f64) -> f64 {
    let z = special::norm_quantile(0.5 * p);
    shape / (z * z)
}

fn levy_inv_sf(shape: f64, q: f64) -> f64 {
    let s = if q < 1e-4 {
        let t = 0.5 * SQRT_PI * q;
        t * (1.0 + t * t * (1.0 / 3.0 + t * t * (7.0 / 30.0)))
    } else if q < 0.5 {
        special::norm_quantile(0.5 * (1.0 + q)) * FRAC_1_SQRT_2
    } else {
        -special::norm_quantile(0.5 * (1.0 - q)) * FRAC_1_SQRT_2
    };
    0.5 * shape / (s * s)
}

/// Invert the finite-mean inverse Gaussian cdf (or survival function when
/// `sf_space`) by bracketed Newton; the target function is increasing in `x`
/// in both spaces and the bracket never escapes (0, inf).
fn ig_invert(mean: f64, shape: f64, target: f64, sf_space: bool) -> f64 {
    let g = |x: f64| {
        if sf_space {
            target - ig_sf(mean, shape, x)
        } else {
            ig_cdf(mean, shape, x) - target
        }
    };
    let mut lo;
    let mut hi;
    if g(mean) >= 0.0 {
        hi = mean;
        lo = mean;
        loop {
            lo *= 0.5;
            if g(lo) <= 0.0 {
                break;
            }
            hi = lo;
            if lo < 1e-300 {
                return lo;
            }
        }
    } else {
        lo = mean;
        hi = mean;
        loop {
            hi *= 2.0;
            if g(hi) >= 0.0 {
                break;
            }
            lo = hi;
            if hi > 1e300 {
                return hi;
            }
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let gx = g(x);
        if gx == 0.0 {
            return x;
        }
        if gx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let pdf = ig_log_pdf(mean, shape, x).exp();
        let mut next = x - gx / pdf;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-14 * x.abs() {
            return next;
        }
        x = next;
        if hi - lo <= 1e-14 * lo {
            break;
        }
    }
    x
}

/// I_w(df/2, 1/2) with w = df/(df + x^2): twice the t tail probability
/// beyond |x|.
fn t_tail_beta(df: f64, x: f64) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    let w = df / (df + x * x);
    special::reg_beta(0.5 * df, 0.5, w)
}

fn t_quantile(df: f64, p: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    let tail = p.min(1.0 - p);
    let w = special::inv_reg_beta(0.5 * df, 0.5, 2.0 * tail);
    let t = (df * (1.0 - w) / w).sqrt();
    if p < 0.5 {
        -t
    } else {
        t
    }
}
