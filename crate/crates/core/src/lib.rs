//! Prediction intervals for a future observation.
//!
//! The crate provides, for a handful of parametric families and for
//! distribution-free settings, the machinery to compute one-sided prediction
//! bounds and two-sided prediction intervals together with the tools needed
//! to evaluate how well they cover:
//!
//! * [`dist`] — distribution kernels: cdf, quantile, survival, density, and
//!   seeded sampling for the continuous and discrete families used here.
//! * [`fit`] — maximum likelihood estimation, including Type-II censored
//!   location-scale fitting.
//! * [`rng`] — counter-based substream seeding so every Monte Carlo result
//!   is reproducible and independent of evaluation order.
//! * [`boot`] — parametric bootstrap batches and calibration u-values.
//! * [`predict`] — plug-in, calibration-bootstrap, and direct-bootstrap
//!   bounds and predictive cdfs.
//! * [`gpq`] — generalized-pivotal bootstrap for location-scale families and
//!   the exact normal bound.
//! * [`fiducial`] — fiducial predictive distributions for the gamma and
//!   inverse Gaussian families.
//! * [`discrete`] — prediction bounds for binomial and Poisson counts.
//! * [`npar`] — order-statistic intervals and conformal prediction regions.
//! * [`coverage`] — Monte Carlo and exact-enumeration coverage evaluation.
//!
//! The crate is `no_std` (it requires `alloc`); everything that needs an
//! operating system, such as file I/O, timing, and thread dispatch, lives in
//! the companion command-line crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod boot;
pub mod coverage;
pub mod discrete;
pub mod dist;
pub mod error;
pub mod fiducial;
pub mod fit;
pub mod gpq;
pub mod npar;
pub mod predict;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
