//! The `summarize` plugin: seven summary statistics per series or per row.
//!
//! Statistics and their quirks, fixed here by contract:
//! - summation and arithmetic_mean accumulate in the frame's row order;
//! - median is the sorted value at index n/2 (upper median for even n);
//! - standard_deviation divides by n-1 below 30 observations and by n at
//!   30 or more, and is the text "NA" for a single observation;
//! - count is an integer, every other statistic a real.
//!
//! The results frame always carries the statistic series in alphabetical
//! order: arithmetic_mean, count, maximum, median, minimum,
//! standard_deviation, summation.

use std::collections::BTreeMap;

use crate::dataframe::DataFrame;
use crate::plugin::{ParameterSet, PluginError};
use crate::value::CellValue;

pub const STATISTIC_NAMES: [&str; 7] = [
    "arithmetic_mean",
    "count",
    "maximum",
    "median",
    "minimum",
    "standard_deviation",
    "summation",
];

/// Statistic columns keyed by statistic name (so alphabetical), plus the
/// labels of the result rows, in order.
pub type StatTable = (BTreeMap<String, Vec<CellValue>>, Vec<String>);

/// Plugin entry point. `analytical_method` picks the orientation:
/// "by_series" (also the default when unset) or "by_labels". Any other
/// method leaves the results frame empty.
pub fn entry(mut p: ParameterSet) -> Result<ParameterSet, PluginError> {
    let input = p
        .input_frame
        .as_ref()
        .ok_or_else(|| PluginError::Failed("no input dataframe bound".to_string()))?;
    let mut results = p
        .results_frame
        .take()
        .ok_or_else(|| PluginError::Failed("no results dataframe provided".to_string()))?;
    match p.analytical_method.as_deref() {
        Some("by_series") | None => {
            let (columns, row_labels) = summarize_by_series(input)?;
            results
                .add_columnar_data(&columns, &row_labels)
                .map_err(|e| PluginError::Failed(e.to_string()))?;
        }
        Some("by_labels") => {
            let (columns, row_labels) = summarize_by_labels(input)?;
            results
                .add_columnar_data(&columns, &row_labels)
                .map_err(|e| PluginError::Failed(e.to_string()))?;
        }
        Some(_) => {}
    }
    p.results_frame = Some(results);
    Ok(p)
}

/// One series' statistics. `stdev` is None when undefined (n = 1).
struct Stats {
    summation: f64,
    mean: f64,
    median: f64,
    maximum: f64,
    minimum: f64,
    count: usize,
    stdev: Option<f64>,
}

fn stats_of(values: &[f64]) -> Stats {
    let n = values.len();
    debug_assert!(n > 0);
    let summation: f64 = values.iter().sum();
    let mean = summation / n as f64;
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("cells are finite"));
    let stdev = if n == 1 {
        None
    } else {
        let ss: f64 = sorted.iter().map(|x| (x - mean) * (x - mean)).sum();
        let divisor = if n < 30 { (n - 1) as f64 } else { n as f64 };
        Some((ss / divisor).sqrt())
    };
    Stats {
        summation,
        mean,
        median: sorted[n / 2],
        maximum: sorted[n - 1],
        minimum: sorted[0],
        count: n,
        stdev,
    }
}

fn stdev_cell(stdev: Option<f64>) -> CellValue {
    match stdev {
        Some(v) => CellValue::Real(v),
        None => CellValue::text("NA"),
    }
}

fn numeric(df: &DataFrame, series: &str, label: &str, cell: &CellValue) -> Result<f64, PluginError> {
    let _ = df;
    cell.numeric_value().ok_or_else(|| PluginError::NonNumericCell {
        series: series.to_string(),
        label: label.to_string(),
    })
}

/// Statistics per series; the result rows are the input's series names
/// in order.
pub fn summarize_by_series(df: &DataFrame) -> Result<StatTable, PluginError> {
    let mut columns: BTreeMap<String, Vec<CellValue>> = STATISTIC_NAMES
        .iter()
        .map(|n| (n.to_string(), Vec::new()))
        .collect();
    if df.n_series() == 0 {
        return Ok((BTreeMap::new(), Vec::new()));
    }
    if df.n_rows() == 0 {
        return Err(PluginError::Failed(
            "dataframe has no data rows to summarize".to_string(),
        ));
    }
    for (idx, series) in df.series_names().iter().enumerate() {
        let mut values = Vec::with_capacity(df.n_rows());
        for (label, row) in df.rows() {
            values.push(numeric(df, series, label, &row[idx])?);
        }
        let s = stats_of(&values);
        columns.get_mut("arithmetic_mean").unwrap().push(CellValue::Real(s.mean));
        columns.get_mut("count").unwrap().push(CellValue::Int(s.count as i64));
        columns.get_mut("maximum").unwrap().push(CellValue::Real(s.maximum));
        columns.get_mut("median").unwrap().push(CellValue::Real(s.median));
        columns.get_mut("minimum").unwrap().push(CellValue::Real(s.minimum));
        columns.get_mut("standard_deviation").unwrap().push(stdev_cell(s.stdev));
        columns.get_mut("summation").unwrap().push(CellValue::Real(s.summation));
    }
    let row_labels = df.series_names().to_vec();
    Ok((columns, row_labels))
}

/// Statistics per row label, same columns, row labels preserved.
pub fn summarize_by_labels(df: &DataFrame) -> Result<StatTable, PluginError> {
    let mut columns: BTreeMap<String, Vec<CellValue>> = STATISTIC_NAMES
        .iter()
        .map(|n| (n.to_string(), Vec::new()))
        .collect();
    if df.n_rows() == 0 {
        return Ok((BTreeMap::new(), Vec::new()));
    }
    if df.n_series() == 0 {
        return Err(PluginError::Failed(
            "dataframe has no series to summarize".to_string(),
        ));
    }
    let mut row_labels = Vec::with_capacity(df.n_rows());
    for (label, row) in df.rows() {
        let mut values = Vec::with_capacity(row.len());
        for (idx, cell) in row.iter().enumerate() {
            values.push(numeric(df, &df.series_names()[idx], label, cell)?);
        }
        let s = stats_of(&values);
        columns.get_mut("arithmetic_mean").unwrap().push(CellValue::Real(s.mean));
        columns.get_mut("count").unwrap().push(CellValue::Int(s.count as i64));
        columns.get_mut("maximum").unwrap().push(CellValue::Real(s.maximum));
        columns.get_mut("median").unwrap().push(CellValue::Real(s.median));
        columns.get_mut("minimum").unwrap().push(CellValue::Real(s.minimum));
        columns.get_mut("standard_deviation").unwrap().push(stdev_cell(s.stdev));
        columns.get_mut("summation").unwrap().push(CellValue::Real(s.summation));
        row_labels.push(label.to_string());
    }
    Ok((columns, row_labels))
}
