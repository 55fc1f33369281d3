//! The declarative run configuration: one JSON document per invocation.
//!
//! Fields are optional at parse time; each task validates the subset it
//! needs and reports the missing field by name. Command-line flags override
//! `seed`, `out`, and `format`, and [`RunConfig::resolved`] folds those
//! overrides plus the defaults into the config that gets embedded verbatim
//! in JSON output, so a run can always be reproduced from its own artifact.

use predint_core::coverage::{IntervalSide, ModelSpec};
use predint_core::fit::Family;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Fit,
    Predict,
    Coverage,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Fit => "fit",
            Task::Predict => "predict",
            Task::Coverage => "coverage",
        }
    }
}

/// Families the command line accepts: the five continuous fitting families
/// plus the two count models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Normal,
    Logistic,
    Sev,
    Gamma,
    InverseGaussian,
    Binomial,
    Poisson,
}

impl FamilyName {
    pub fn name(self) -> &'static str {
        match self {
            FamilyName::Normal => "normal",
            FamilyName::Logistic => "logistic",
            FamilyName::Sev => "sev",
            FamilyName::Gamma => "gamma",
            FamilyName::InverseGaussian => "inverse_gaussian",
            FamilyName::Binomial => "binomial",
            FamilyName::Poisson => "poisson",
        }
    }

    pub fn continuous(self) -> Option<Family> {
        match self {
            FamilyName::Normal => Some(Family::Normal),
            FamilyName::Logistic => Some(Family::Logistic),
            FamilyName::Sev => Some(Family::Sev),
            FamilyName::Gamma => Some(Family::Gamma),
            FamilyName::InverseGaussian => Some(Family::InverseGaussian),
            FamilyName::Binomial | FamilyName::Poisson => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Oracle,
    PlugIn,
    CalibrationBootstrap,
    DirectBootstrap,
    GpqBootstrap,
    FiducialPredictive,
    NormalExact,
    Conservative,
    Nelson,
    Kp,
    Wang,
    Jeffreys,
    Fiducial,
    Hinkley,
    ConformalMean,
    OrderStatistic,
}

impl MethodName {
    pub fn name(self) -> &'static str {
        match self {
            MethodName::Oracle => "oracle",
            MethodName::PlugIn => "plug_in",
            MethodName::CalibrationBootstrap => "calibration_bootstrap",
            MethodName::DirectBootstrap => "direct_bootstrap",
            MethodName::GpqBootstrap => "gpq_bootstrap",
            MethodName::FiducialPredictive => "fiducial_predictive",
            MethodName::NormalExact => "normal_exact",
            MethodName::Conservative => "conservative",
            MethodName::Nelson => "nelson",
            MethodName::Kp => "kp",
            MethodName::Wang => "wang",
            MethodName::Jeffreys => "jeffreys",
            MethodName::Fiducial => "fiducial",
            MethodName::Hinkley => "hinkley",
            MethodName::ConformalMean => "conformal_mean",
            MethodName::OrderStatistic => "order_statistic",
        }
    }

    pub fn is_count_method(self) -> bool {
        matches!(
            self,
            MethodName::Conservative
                | MethodName::Nelson
                | MethodName::Kp
                | MethodName::Wang
                | MethodName::Jeffreys
                | MethodName::Fiducial
                | MethodName::Hinkley
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Where the observations come from: an inline list or a CSV file with one
/// value column and an optional 0/1 status column (1 = observed failure,
/// 0 = censored).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inline: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub column: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status_column: Option<String>,
}

/// Evaluation grid for the optional predictive-cdf table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: Task,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<MethodName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<DataSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<ModelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<IntervalSide>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_sim: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub randomize: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

impl RunConfig {
    /// Applies command-line overrides and fills the defaults (`format`
    /// json, `m` 1, `side` upper, or two-sided for the inherently
    /// two-sided nonparametric methods).
    pub fn resolved(
        mut self,
        seed: Option<u64>,
        out: Option<String>,
        format: Option<OutputFormat>,
    ) -> Self {
        if let Some(seed) = seed {
            self.seed = Some(seed);
        }
        if let Some(out) = out {
            self.out = Some(out);
        }
        if let Some(format) = format {
            self.format = Some(format);
        }
        if self.format.is_none() {
            self.format = Some(OutputFormat::Json);
        }
        if self.m.is_none() {
            self.m = Some(1.0);
        }
        if self.side.is_none() {
            self.side = Some(match self.method {
                Some(MethodName::ConformalMean) | Some(MethodName::OrderStatistic) => {
                    IntervalSide::TwoSided
                }
                _ => IntervalSide::Upper,
            });
        }
        self
    }
}
