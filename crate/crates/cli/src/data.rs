//! Data ingestion: inline lists and one-column CSV files with an optional
//! header and an optional 0/1 status column for Type-II censored samples.

use std::fs;

use crate::config::DataSource;
use crate::error::{CliError, CliResult};

/// Parsed observations. `events` is `None` for complete data; otherwise it
/// counts the observed failures of a Type-II censored sample.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedData {
    pub values: Vec<f64>,
    pub events: Option<usize>,
}

pub fn load_data(source: &DataSource) -> CliResult<LoadedData> {
    match (&source.inline, &source.csv) {
        (Some(_), Some(_)) | (None, None) => Err(CliError::config(
            "field `data` must set exactly one of `inline` and `csv`",
        )),
        (Some(values), None) => {
            if source.column.is_some() || source.status_column.is_some() {
                return Err(CliError::config("column selectors apply only to csv data sources"));
            }
            Ok(LoadedData { values: values.clone(), events: None })
        }
        (None, Some(path)) => {
            load_csv(path, source.column.as_deref(), source.status_column.as_deref())
        }
    }
}

fn load_csv(path: &str, column: Option<&str>, status_column: Option<&str>) -> CliResult<LoadedData> {
    let text = fs::read_to_string(path)
        .map_err(|err| CliError::Config(format!("cannot read data file {path}: {err}")))?;
    let rows: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .map(|(index, line)| (index + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty())
        .map(|(number, line)| (number, line.split(',').map(str::trim).collect()))
        .collect();
    if rows.is_empty() {
        return Err(CliError::Config(format!("data file {path} holds no rows")));
    }

    let width = rows[0].1.len();
    for (number, cells) in &rows {
        if cells.len() != width {
            return Err(CliError::Config(format!(
                "{path} line {number}: expected {width} cells, found {}",
                cells.len()
            )));
        }
    }

    let has_header = rows[0].1.iter().any(|cell| cell.parse::<f64>().is_err());
    let (value_index, status_index) = if has_header {
        let names = &rows[0].1;
        let find = |wanted: &str| -> CliResult<usize> {
            names.iter().position(|name| *name == wanted).ok_or_else(|| {
                CliError::Config(format!(
                    "{path}: no column named `{wanted}` (header: {})",
                    names.join(", ")
                ))
            })
        };
        let value_index = match column {
            Some(name) => find(name)?,
            None => 0,
        };
        let status_index = match status_column {
            Some(name) => Some(find(name)?),
            None => names.iter().position(|name| *name == "status"),
        };
        (value_index, status_index)
    } else {
        if column.is_some() || status_column.is_some() {
            return Err(CliError::Config(format!(
                "{path}: column selectors require a header row"
            )));
        }
        match width {
            1 => (0, None),
            2 => (0, Some(1)),
            _ => {
                return Err(CliError::Config(format!(
                    "{path}: a headerless file must have one value column \
                     or a value,status pair"
                )))
            }
        }
    };

    let body = if has_header { &rows[1..] } else { &rows[..] };
    if body.is_empty() {
        return Err(CliError::Config(format!("data file {path} holds no data rows")));
    }

    let mut values = Vec::with_capacity(body.len());
    let mut statuses = Vec::with_capacity(body.len());
    for (number, cells) in body {
        let raw = cells[value_index];
        let value: f64 = raw.parse().map_err(|_| {
            CliError::Config(format!("{path} line {number}: `{raw}` is not a number"))
        })?;
        values.push(value);
        if let Some(index) = status_index {
            let status = match cells[index] {
                "1" => true,
                "0" => false,
                other => {
                    return Err(CliError::Config(format!(
                        "{path} line {number}: status must be 0 or 1, found `{other}`"
                    )))
                }
            };
            statuses.push((*number, status));
        }
    }

    if status_index.is_none() || statuses.iter().all(|(_, event)| *event) {
        return Ok(LoadedData { values, events: None });
    }

    let events = statuses.iter().filter(|(_, event)| *event).count();
    let mut largest_event = f64::NEG_INFINITY;
    let mut smallest_censored = f64::INFINITY;
    let mut censored_line = 0usize;
    for ((line, event), value) in statuses.iter().zip(&values) {
        if *event {
            largest_event = largest_event.max(*value);
        } else if *value < smallest_censored {
            smallest_censored = *value;
            censored_line = *line;
        }
    }
    if smallest_censored < largest_event {
        return Err(CliError::Config(format!(
            "{path} line {censored_line}: Type-II shape violated; censored value \
             {smallest_censored} is below the observed failure {largest_event}"
        )));
    }
    Ok(LoadedData { values, events: Some(events) })
}
