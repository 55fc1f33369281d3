//! Output rendering. JSON documents embed the fully resolved configuration
//! so a saved result can be re-run; CSV tables print floats with 17
//! significant digits so a re-run reproduces the file byte for byte.

use serde::Serialize;
use serde_json::Value;

use predint_core::coverage::ModelSpec;

use crate::config::{OutputFormat, RunConfig};
use crate::error::{CliError, CliResult};
use crate::run::{CoverageOutput, FitOutput, PredictOutput, TaskOutput};

#[derive(Serialize)]
struct Document<'a> {
    config: &'a RunConfig,
    result: &'a TaskOutput,
}

pub fn render(config: &RunConfig, output: &TaskOutput) -> CliResult<String> {
    match config.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => {
            let document = Document { config, result: output };
            let text = serde_json::to_string_pretty(&document)
                .map_err(|err| CliError::Numeric(format!("could not encode output: {err}")))?;
            Ok(text + "\n")
        }
        OutputFormat::Csv => Ok(match output {
            TaskOutput::Fit(fit) => fit_csv(fit),
            TaskOutput::Predict(predict) => predict_csv(predict),
            TaskOutput::Coverage(coverage) => coverage_csv(coverage),
        }),
    }
}

fn f17(value: f64) -> String {
    format!("{value:.16e}")
}

fn opt_f17(value: Option<f64>) -> String {
    value.map(f17).unwrap_or_default()
}

fn opt_plain<T: ToString>(value: Option<T>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn fit_csv(fit: &FitOutput) -> String {
    let mut header =
        String::from("family,n,events,converged,iterations,loglik,gradient_norm");
    let mut row = format!(
        "{},{},{},{},{},{},{}",
        fit.family,
        fit.n,
        fit.events,
        fit.converged,
        fit.iterations,
        f17(fit.loglik),
        f17(fit.gradient_norm)
    );
    for param in &fit.parameters {
        header.push(',');
        header.push_str(param.name);
        row.push(',');
        row.push_str(&f17(param.value));
    }
    format!("{header}\n{row}\n")
}

fn predict_csv(predict: &PredictOutput) -> String {
    if let Some(region) = &predict.region {
        let mut text = String::from("method,alpha,randomized,u,interval_lower,interval_upper\n");
        let prefix = format!(
            "{},{},{},{}",
            predict.method,
            opt_f17(predict.alpha),
            region.randomized,
            opt_f17(region.u)
        );
        if region.intervals.is_empty() {
            text.push_str(&format!("{prefix},,\n"));
        }
        for interval in &region.intervals {
            text.push_str(&format!("{prefix},{},{}\n", f17(interval.lower), f17(interval.upper)));
        }
        return text;
    }
    if let Some(interval) = &predict.interval {
        return format!(
            "method,r,s,lower,upper,coverage,tied\n{},{},{},{},{},{},{}\n",
            predict.method,
            opt_plain(predict.r),
            opt_plain(predict.s),
            f17(interval.lower),
            f17(interval.upper),
            f17(interval.coverage),
            interval.tied
        );
    }
    let mut text =
        String::from("method,family,side,level,endpoint,replicates,failures,u_tilde,seed\n");
    for bound in &predict.bounds {
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            predict.method,
            predict.family.unwrap_or(""),
            bound.side,
            f17(bound.level),
            f17(bound.endpoint),
            opt_plain(bound.replicates),
            opt_plain(bound.failures),
            opt_f17(bound.u_tilde),
            opt_plain(predict.seed)
        ));
    }
    if let Some(cdf) = &predict.cdf {
        text.push('\n');
        text.push_str("y,cdf\n");
        for point in cdf {
            text.push_str(&format!("{},{}\n", f17(point.y), f17(point.p)));
        }
    }
    text
}

/// One-cell label for the data-generating model, e.g.
/// `normal{location=0.0e0;scale=1.0e0}` or `binomial{prob=3.0e-1}`.
fn model_cell(truth: &ModelSpec) -> String {
    let value = match truth {
        ModelSpec::Continuous { kernel } => serde_json::to_value(kernel),
        other => serde_json::to_value(other),
    }
    .expect("model serialization");
    let object = value.as_object().expect("tagged object");
    let mut entries: Vec<(&String, &Value)> = object
        .iter()
        .filter(|(key, _)| key.as_str() != "family" && key.as_str() != "model")
        .collect();
    entries.sort_by_key(|(key, _)| key.as_str());
    let params: Vec<String> = entries
        .iter()
        .map(|(key, value)| {
            let rendered = match value {
                Value::Number(number) => {
                    number.as_f64().map(f17).unwrap_or_else(|| number.to_string())
                }
                other => other.to_string(),
            };
            format!("{key}={rendered}")
        })
        .collect();
    format!("{}{{{}}}", truth.family_name(), params.join(";"))
}

fn coverage_csv(coverage: &CoverageOutput) -> String {
    let report = &coverage.report;
    format!(
        "method,model,n,m,alpha,side,n_sim,coverage,se,failures,master_seed,timestamp\n\
         {},{},{},{},{},{},{},{},{},{},{},{}\n",
        report.method,
        model_cell(&report.truth),
        report.n,
        f17(report.m),
        f17(report.alpha),
        report.side.name(),
        report.n_sim,
        f17(report.coverage),
        f17(report.se),
        report.failures,
        report.master_seed,
        coverage.timestamp
    )
}
