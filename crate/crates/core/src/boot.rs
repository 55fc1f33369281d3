//! Parametric bootstrap engine: draw samples from a fitted kernel under the
//! data's censoring shape, refit each one, and compute calibration u-values.
//!
//! Every replicate gets its own RNG substream keyed by (master seed, lane,
//! replicate index), so batches are pure functions of their inputs no matter
//! how the replicates are scheduled. Degenerate refits are discarded and
//! counted rather than retried; retrying would bias the bootstrap
//! distribution toward well-behaved samples.

use alloc::string::String;
use alloc::vec::Vec;

use crate::dist::Kernel;
use crate::error::{Error, Result};
use crate::fit::{fit_ml, Censoring, Family, FitResult, Sample};
use crate::rng::{Lane, RngPolicy};

/// Default replicate count when constructing an interval directly.
pub const DEFAULT_INTERVAL_REPLICATES: u32 = 5000;
/// Default replicate count inside coverage simulation loops.
pub const DEFAULT_COVERAGE_REPLICATES: u32 = 2000;

/// Shape a bootstrap replicate must reproduce: the sample size and the
/// censoring scheme of the observed data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SampleShape {
    n: usize,
    censoring: Censoring,
}

impl SampleShape {
    pub fn new(n: usize, censoring: Censoring) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(String::from(
                "bootstrap shape requires at least 2 observations",
            )));
        }
        if let Censoring::Type2 { events } = censoring {
            if events < 2 || events > n {
                return Err(Error::InvalidArgument(String::from(
                    "Type-II censoring requires 2 <= events <= n",
                )));
            }
        }
        Ok(SampleShape { n, censoring: Self::normalize(n, censoring) })
    }

    pub fn of(sample: &Sample) -> Self {
        let n = sample.n();
        SampleShape { n, censoring: Self::normalize(n, sample.censoring()) }
    }

    // Censoring every unit at the largest order statistic censors nothing.
    fn normalize(n: usize, censoring: Censoring) -> Censoring {
        match censoring {
            Censoring::Type2 { events } if events == n => Censoring::Complete,
            other => other,
        }
    }

    pub fn n(self) -> usize {
        self.n
    }

    pub fn censoring(self) -> Censoring {
        self.censoring
    }

    fn build(self, values: Vec<f64>) -> Result<Sample> {
        match self.censoring {
            Censoring::Complete => Sample::complete(values),
            Censoring::Type2 { events } => Sample::type2(values, events),
        }
    }
}

/// Refitted parameter estimates from one bootstrap run. `estimates[i]` came
/// from replicate `replicate_indices[i]`; keeping the original indices lets
/// later stages draw replicate-keyed randomness that stays aligned even when
/// some replicates were discarded.
#[derive(Clone, Debug)]
pub struct BootstrapBatch {
    pub replicates: u32,
    pub estimates: Vec<Kernel>,
    pub replicate_indices: Vec<u64>,
    pub u_values: Option<Vec<f64>>,
    pub failures: u32,
}

fn bootstrap_family(kernel: &Kernel, shape: SampleShape) -> Result<Family> {
    let family = match kernel {
        Kernel::Normal { .. } => Family::Normal,
        Kernel::Logistic { .. } => Family::Logistic,
        Kernel::Sev { .. } => Family::Sev,
        Kernel::Gamma { .. } => Family::Gamma,
        Kernel::InverseGaussian { .. } => Family::InverseGaussian,
        other => {
            return Err(Error::UnsupportedFamily {
                family: other.family_name(),
                operation: "parametric bootstrap",
            })
        }
    };
    if family.loc_scale().is_none() && !matches!(shape.censoring, Censoring::Complete) {
        return Err(Error::UnsupportedFamily {
            family: kernel.family_name(),
            operation: "censored bootstrap",
        });
    }
    Ok(family)
}

/// Draw `replicates` bootstrap samples from `fit.kernel` under `shape`,
/// refit each, and collect the surviving estimates.
pub fn parametric_bootstrap(
    fit: &FitResult,
    shape: SampleShape,
    replicates: u32,
    policy: &RngPolicy,
) -> Result<BootstrapBatch> {
    if replicates == 0 {
        return Err(Error::InvalidArgument(String::from("replicate count must be positive")));
    }
    if !fit.converged {
        return Err(Error::InvalidArgument(String::from(
            "bootstrap requires a converged fit",
        )));
    }
    let family = bootstrap_family(&fit.kernel, shape)?;

    let mut estimates = Vec::with_capacity(replicates as usize);
    let mut replicate_indices = Vec::with_capacity(replicates as usize);
    let mut failures = 0u32;
    for index in 0..u64::from(replicates) {
        let mut rng = policy.substream(Lane::Bootstrap, index);
        let values = fit.kernel.draw_vec(&mut rng, shape.n)?;
        let refit = shape.build(values).and_then(|sample| fit_ml(family, &sample));
        match refit {
            Ok(result) => {
                estimates.push(result.kernel);
                replicate_indices.push(index);
            }
            Err(_) => failures += 1,
        }
    }
    if f64::from(failures) > 0.1 * f64::from(replicates) {
        return Err(Error::ExcessiveFailures {
            failures: u64::from(failures),
            total: u64::from(replicates),
        });
    }
    Ok(BootstrapBatch { replicates, estimates, replicate_indices, u_values: None, failures })
}

/// For each surviving replicate, draw a predictand y* from the original
/// fitted kernel and return u* = G(y*; theta*_b). The predictand substream is
/// keyed by the replicate's original index, so pairing survives discards.
pub fn calibration_u_values(
    fit: &FitResult,
    batch: &BootstrapBatch,
    policy: &RngPolicy,
) -> Result<Vec<f64>> {
    if batch.estimates.len() != batch.replicate_indices.len() {
        return Err(Error::InvalidArgument(String::from(
            "batch estimates and replicate indices disagree",
        )));
    }
    let mut u_values = Vec::with_capacity(batch.estimates.len());
    for (estimate, &index) in batch.estimates.iter().zip(&batch.replicate_indices) {
        let mut rng = policy.substream(Lane::Predictand, index);
        let predictand = fit.kernel.draw(&mut rng)?;
        let u = estimate.cdf(predictand);
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::InvalidProbability { value: u });
        }
        u_values.push(u);
    }
    Ok(u_values)
}
