//! Rectangular data frames and the pure operations the bytecodes invoke.
//!
//! A frame is a named table: an ordered list of series (columns) crossed
//! with labeled rows. Every row holds exactly one cell per series, rows
//! keep insertion order, and labels are unique within a frame. The session
//! container holds any number of frames under unique names.

use std::collections::BTreeMap;
use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::value::{cast_cell, compare_values, BinOp, CastType, CellValue};

#[derive(Debug, Error, PartialEq)]
pub enum DataError {
    #[error("unknown series '{0}'")]
    UnknownSeries(String),
    #[error("series schemas do not match between source and destination")]
    SeriesMismatch,
    #[error("duplicate series name '{0}'")]
    DuplicateSeries(String),
    #[error("label '{0}' is not present in both frames")]
    LabelMismatch(String),
    #[error("unknown name '{0}'")]
    UnknownName(String),
    #[error("name '{0}' already exists")]
    DuplicateName(String),
    #[error("column length {got} does not match label count {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("duplicate row label '{0}'")]
    DuplicateLabel(String),
    #[error("series names must be non-empty")]
    EmptySeriesName,
    #[error("duplicate frame name '{0}'")]
    DuplicateFrame(String),
    #[error("row has {got} values but the frame has {expected} series")]
    RowLengthMismatch { expected: usize, got: usize },
}

/// Selects series by explicit name list or all at once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeriesSelector {
    All,
    Named(Vec<String>),
}

impl SeriesSelector {
    /// Resolve against a frame, yielding concrete series names.
    pub fn resolve(&self, df: &DataFrame) -> Result<Vec<String>, DataError> {
        match self {
            SeriesSelector::All => Ok(df.series_names.clone()),
            SeriesSelector::Named(names) => {
                for n in names {
                    if !df.series_names.iter().any(|s| s == n) {
                        return Err(DataError::UnknownSeries(n.clone()));
                    }
                }
                Ok(names.clone())
            }
        }
    }
}

/// A named rectangular table of cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DataFrame {
    name: String,
    series_names: Vec<String>,
    rows: IndexMap<String, Vec<CellValue>>,
}

impl DataFrame {
    /// An empty frame: no series, no rows.
    pub fn new(name: impl Into<String>) -> Self {
        DataFrame {
            name: name.into(),
            series_names: Vec::new(),
            rows: IndexMap::new(),
        }
    }

    /// An empty frame with a declared series schema.
    pub fn with_series(
        name: impl Into<String>,
        series_names: Vec<String>,
    ) -> Result<Self, DataError> {
        let mut seen = std::collections::HashSet::new();
        for s in &series_names {
            if s.is_empty() {
                return Err(DataError::EmptySeriesName);
            }
            if !seen.insert(s.clone()) {
                return Err(DataError::DuplicateSeries(s.clone()));
            }
        }
        Ok(DataFrame {
            name: name.into(),
            series_names,
            rows: IndexMap::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn series_names(&self) -> &[String] {
        &self.series_names
    }

    pub fn series_index(&self, name: &str) -> Option<usize> {
        self.series_names.iter().position(|s| s == name)
    }

    pub fn n_series(&self) -> usize {
        self.series_names.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series_names.is_empty() && self.rows.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(String::as_str)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &[CellValue])> {
        self.rows.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn row(&self, label: &str) -> Option<&[CellValue]> {
        self.rows.get(label).map(Vec::as_slice)
    }

    pub fn cell(&self, label: &str, series: &str) -> Option<&CellValue> {
        let idx = self.series_index(series)?;
        self.rows.get(label).map(|r| &r[idx])
    }

    /// Append a row; the value count must match the series schema and the
    /// label must be new.
    pub fn insert_row(
        &mut self,
        label: impl Into<String>,
        values: Vec<CellValue>,
    ) -> Result<(), DataError> {
        if values.len() != self.series_names.len() {
            return Err(DataError::RowLengthMismatch {
                expected: self.series_names.len(),
                got: values.len(),
            });
        }
        let label = label.into();
        if self.rows.contains_key(&label) {
            return Err(DataError::DuplicateLabel(label));
        }
        self.rows.insert(label, values);
        Ok(())
    }

    /// Convert the cells of the selected series in place. Unconvertible
    /// cells are left unchanged; the returned count covers converted cells
    /// only.
    pub fn cast_values(
        &mut self,
        selector: &SeriesSelector,
        t: CastType,
    ) -> Result<usize, DataError> {
        let names = selector.resolve(self)?;
        let indices: Vec<usize> = names
            .iter()
            .map(|n| self.series_index(n).expect("resolved names exist"))
            .collect();
        let mut converted = 0;
        for values in self.rows.values_mut() {
            for &i in &indices {
                if let Some(cast) = cast_cell(&values[i], t) {
                    values[i] = cast;
                    converted += 1;
                }
            }
        }
        Ok(converted)
    }

    /// Deep copy of the frame under a new name.
    pub fn select_all(&self, new_name: impl Into<String>) -> DataFrame {
        let mut copy = self.clone();
        copy.name = new_name.into();
        copy
    }

    /// Rows where at least one cell satisfies the predicate; series and row
    /// order are preserved.
    pub fn select_greedy(&self, new_name: impl Into<String>, op: BinOp, v: &CellValue) -> DataFrame {
        let rows = self
            .rows
            .iter()
            .filter(|(_, values)| values.iter().any(|c| compare_values(c, v, op)))
            .map(|(k, values)| (k.clone(), values.clone()))
            .collect();
        DataFrame {
            name: new_name.into(),
            series_names: self.series_names.clone(),
            rows,
        }
    }

    /// Rows whose cell in the named series satisfies the predicate.
    pub fn select_by_series(
        &self,
        new_name: impl Into<String>,
        series: &str,
        op: BinOp,
        v: &CellValue,
    ) -> Result<DataFrame, DataError> {
        let idx = self
            .series_index(series)
            .ok_or_else(|| DataError::UnknownSeries(series.to_string()))?;
        let rows = self
            .rows
            .iter()
            .filter(|(_, values)| compare_values(&values[idx], v, op))
            .map(|(k, values)| (k.clone(), values.clone()))
            .collect();
        Ok(DataFrame {
            name: new_name.into(),
            series_names: self.series_names.clone(),
            rows,
        })
    }

    /// Merge rows of `src` into this frame. Labels present in both frames
    /// keep this frame's row unless `replace` is set; new labels are
    /// appended in source order. Requires identical series schemas.
    pub fn merge_labels(&mut self, src: &DataFrame, replace: bool) -> Result<(), DataError> {
        if self.series_names != src.series_names {
            return Err(DataError::SeriesMismatch);
        }
        for (label, values) in &src.rows {
            match self.rows.get_mut(label) {
                Some(existing) => {
                    if replace {
                        *existing = values.clone();
                    }
                }
                None => {
                    self.rows.insert(label.clone(), values.clone());
                }
            }
        }
        Ok(())
    }

    /// Append the listed series of `src` as new columns, matching values by
    /// row label. The label sets of both frames must coincide.
    pub fn merge_series(&mut self, series_list: &[String], src: &DataFrame) -> Result<(), DataError> {
        let mut indices = Vec::with_capacity(series_list.len());
        for name in series_list {
            let idx = src
                .series_index(name)
                .ok_or_else(|| DataError::UnknownSeries(name.clone()))?;
            if self.series_index(name).is_some()
                || series_list.iter().filter(|n| *n == name).count() > 1
            {
                return Err(DataError::DuplicateSeries(name.clone()));
            }
            indices.push(idx);
        }
        for label in self.rows.keys() {
            if !src.rows.contains_key(label) {
                return Err(DataError::LabelMismatch(label.clone()));
            }
        }
        for label in src.rows.keys() {
            if !self.rows.contains_key(label) {
                return Err(DataError::LabelMismatch(label.clone()));
            }
        }
        for (label, values) in self.rows.iter_mut() {
            let src_row = &src.rows[label];
            values.extend(indices.iter().map(|&i| src_row[i].clone()));
        }
        self.series_names.extend(series_list.iter().cloned());
        Ok(())
    }

    /// Rename one series or one label; data and order are untouched.
    /// Renaming a name to itself is a no-op.
    pub fn rename(&mut self, axis: RenameAxis, old: &str, new: &str) -> Result<(), DataError> {
        if old == new {
            return match axis {
                RenameAxis::Series if self.series_index(old).is_none() => {
                    Err(DataError::UnknownName(old.to_string()))
                }
                RenameAxis::Labels if !self.rows.contains_key(old) => {
                    Err(DataError::UnknownName(old.to_string()))
                }
                _ => Ok(()),
            };
        }
        match axis {
            RenameAxis::Series => {
                let idx = self
                    .series_index(old)
                    .ok_or_else(|| DataError::UnknownName(old.to_string()))?;
                if self.series_index(new).is_some() {
                    return Err(DataError::DuplicateName(new.to_string()));
                }
                self.series_names[idx] = new.to_string();
            }
            RenameAxis::Labels => {
                let idx = self
                    .rows
                    .get_index_of(old)
                    .ok_or_else(|| DataError::UnknownName(old.to_string()))?;
                if self.rows.contains_key(new) {
                    return Err(DataError::DuplicateName(new.to_string()));
                }
                // Rebuild the key in place to keep row order.
                let (_, values) = self.rows.swap_remove_index(idx).expect("index valid");
                self.rows.insert(new.to_string(), values);
                let last = self.rows.len() - 1;
                self.rows.move_index(last, idx);
            }
        }
        Ok(())
    }

    /// Populate an empty frame from whole columns. Series take the column
    /// keys in sorted order; row `i` carries `row_labels[i]`.
    pub fn add_columnar_data(
        &mut self,
        columns: &BTreeMap<String, Vec<CellValue>>,
        row_labels: &[String],
    ) -> Result<(), DataError> {
        assert!(self.is_empty(), "add_columnar_data requires an empty frame");
        for (name, values) in columns {
            if name.is_empty() {
                return Err(DataError::EmptySeriesName);
            }
            if values.len() != row_labels.len() {
                return Err(DataError::LengthMismatch {
                    expected: row_labels.len(),
                    got: values.len(),
                });
            }
        }
        let mut seen = std::collections::HashSet::new();
        for label in row_labels {
            if !seen.insert(label.clone()) {
                return Err(DataError::DuplicateLabel(label.clone()));
            }
        }
        self.series_names = columns.keys().cloned().collect();
        for (i, label) in row_labels.iter().enumerate() {
            let values = columns.values().map(|col| col[i].clone()).collect();
            self.rows.insert(label.clone(), values);
        }
        Ok(())
    }

    /// Frame header plus per-series numeric range and type counts.
    pub fn describe(&self) -> DescriptionReport {
        let series = self
            .series_names
            .iter()
            .enumerate()
            .map(|(idx, name)| {
                let mut counts = TypeCounts::default();
                let mut min: Option<(f64, CellValue)> = None;
                let mut max: Option<(f64, CellValue)> = None;
                for values in self.rows.values() {
                    let cell = &values[idx];
                    match cell {
                        CellValue::Text(_) => counts.string += 1,
                        CellValue::Int(_) => counts.integer += 1,
                        CellValue::Real(_) => counts.float += 1,
                    }
                    if let Some(v) = cell.numeric_value() {
                        if min.as_ref().is_none_or(|(m, _)| v < *m) {
                            min = Some((v, cell.clone()));
                        }
                        if max.as_ref().is_none_or(|(m, _)| v > *m) {
                            max = Some((v, cell.clone()));
                        }
                    }
                }
                SeriesDescription {
                    name: name.clone(),
                    min: min.map(|(_, c)| c),
                    max: max.map(|(_, c)| c),
                    counts,
                }
            })
            .collect();
        DescriptionReport {
            frame_name: self.name.clone(),
            series_names: self.series_names.clone(),
            n_rows: self.rows.len(),
            series,
        }
    }

    /// Every row carries exactly one cell per series.
    pub fn is_rectangular(&self) -> bool {
        self.rows.values().all(|v| v.len() == self.series_names.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenameAxis {
    Series,
    Labels,
}

/// Per-series counts of the three cell classes. `unknown` exists for
/// report parity and is always zero: the cell union is closed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeCounts {
    pub string: usize,
    pub integer: usize,
    pub float: usize,
    pub unknown: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesDescription {
    pub name: String,
    pub min: Option<CellValue>,
    pub max: Option<CellValue>,
    pub counts: TypeCounts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescriptionReport {
    pub frame_name: String,
    pub series_names: Vec<String>,
    pub n_rows: usize,
    pub series: Vec<SeriesDescription>,
}

impl fmt::Display for DescriptionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Describing Dataframe - {}", self.frame_name)?;
        writeln!(f)?;
        writeln!(f, "Series Names: {}", self.series_names.join(","))?;
        writeln!(f, "Number of Series: {}", self.series_names.len())?;
        write!(f, "Number of Labels (data rows): {}", self.n_rows)?;
        for s in &self.series {
            writeln!(f)?;
            writeln!(f)?;
            writeln!(f, "Series Name - {}", s.name)?;
            if let Some(min) = &s.min {
                writeln!(f, "Minimum value in {}: {}", s.name, min.render())?;
            }
            if let Some(max) = &s.max {
                writeln!(f, "Maximum value in {}: {}", s.name, max.render())?;
            }
            writeln!(f, "Number of string data type values: {}", s.counts.string)?;
            writeln!(f, "Number of integer data type values: {}", s.counts.integer)?;
            writeln!(f, "Number of float data type values: {}", s.counts.float)?;
            write!(f, "Number of unknown data type values: {}", s.counts.unknown)?;
        }
        Ok(())
    }
}

/// The session's container of named frames. A frame's own name always
/// equals its key here.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MultiDataFrame {
    frames: IndexMap<String, DataFrame>,
}

impl MultiDataFrame {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn attach(&mut self, df: DataFrame) -> Result<(), DataError> {
        if self.frames.contains_key(df.name()) {
            return Err(DataError::DuplicateFrame(df.name().to_string()));
        }
        self.frames.insert(df.name().to_string(), df);
        Ok(())
    }

    pub fn remove(&mut self, name: &str) -> Option<DataFrame> {
        self.frames.shift_remove(name)
    }

    pub fn get(&self, name: &str) -> Option<&DataFrame> {
        self.frames.get(name)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut DataFrame> {
        self.frames.get_mut(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.frames.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &DataFrame> {
        self.frames.values()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.frames.keys().map(String::as_str)
    }

    /// Take two frames out by name for a source/destination mutation.
    pub fn take_pair(&mut self, src: &str, dst: &str) -> Option<(DataFrame, DataFrame)> {
        if src == dst || !self.contains(src) || !self.contains(dst) {
            return None;
        }
        let s = self.frames.shift_remove(src).expect("checked");
        let d = self.frames.shift_remove(dst).expect("checked");
        Some((s, d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(name: &str, series: &[&str], rows: &[(&str, &[i64])]) -> DataFrame {
        let mut df = DataFrame::with_series(
            name,
            series.iter().map(|s| s.to_string()).collect(),
        )
        .unwrap();
        for (label, values) in rows {
            df.insert_row(
                *label,
                values.iter().map(|v| CellValue::Int(*v)).collect(),
            )
            .unwrap();
        }
        df
    }

    #[test]
    fn rows_keep_insertion_order() {
        let df = frame("f", &["a"], &[("z", &[1]), ("m", &[2]), ("a", &[3])]);
        let labels: Vec<_> = df.labels().collect();
        assert_eq!(labels, vec!["z", "m", "a"]);
    }

    #[test]
    fn insert_row_enforces_rectangularity() {
        let mut df = frame("f", &["a", "b"], &[]);
        let err = df.insert_row("r", vec![CellValue::Int(1)]).unwrap_err();
        assert_eq!(err, DataError::RowLengthMismatch { expected: 2, got: 1 });
        let err = frame("f", &["a"], &[("r", &[1])])
            .insert_row("r", vec![CellValue::Int(2)])
            .unwrap_err();
        assert_eq!(err, DataError::DuplicateLabel("r".into()));
    }

    #[test]
    fn select_all_is_a_deep_copy() {
        let src = frame("src", &["a"], &[("r1", &[1])]);
        let mut copy = src.select_all("copy");
        assert_eq!(copy.name(), "copy");
        assert_eq!(copy.series_names(), src.series_names());
        assert_eq!(copy.row("r1"), src.row("r1"));
        copy.insert_row("r2", vec![CellValue::Int(9)]).unwrap();
        assert_eq!(src.n_rows(), 1);

        let empty = DataFrame::with_series("e", vec!["a".into()]).unwrap();
        let dup = empty.select_all("e2");
        assert_eq!(dup.series_names(), empty.series_names());
        assert_eq!(dup.n_rows(), 0);
    }

    #[test]
    fn select_greedy_matches_any_cell() {
        let df = frame("f", &["a", "b"], &[("r1", &[1, 5]), ("r2", &[10, 2])]);
        let out = df.select_greedy("g", BinOp::Gt, &CellValue::Int(6));
        assert_eq!(out.labels().collect::<Vec<_>>(), vec!["r2"]);

        // NE against an absent value keeps every row.
        let all = df.select_greedy("g", BinOp::Ne, &CellValue::Int(999));
        assert_eq!(all.n_rows(), 2);

        // A vacuous predicate yields an empty frame with the same schema.
        let none = df.select_greedy("g", BinOp::Lt, &CellValue::Int(-100));
        assert_eq!(none.n_rows(), 0);
        assert_eq!(none.series_names(), df.series_names());
    }

    #[test]
    fn select_by_series_filters_one_column() {
        let df = frame(
            "f",
            &["A"],
            &[("r1", &[1]), ("r2", &[2]), ("r3", &[3])],
        );
        let out = df
            .select_by_series("s", "A", BinOp::Ge, &CellValue::Int(2))
            .unwrap();
        assert_eq!(out.labels().collect::<Vec<_>>(), vec!["r2", "r3"]);

        let err = df
            .select_by_series("s", "missing", BinOp::Eq, &CellValue::Int(0))
            .unwrap_err();
        assert_eq!(err, DataError::UnknownSeries("missing".into()));

        // Equality on a constant series keeps the whole frame.
        let c = frame("c", &["k"], &[("r1", &[7]), ("r2", &[7])]);
        let out = c
            .select_by_series("s", "k", BinOp::Eq, &CellValue::Int(7))
            .unwrap();
        assert_eq!(out.n_rows(), 2);
    }

    #[test]
    fn merge_labels_keeps_or_replaces() {
        let src = frame("src", &["a"], &[("b", &[20]), ("c", &[30])]);
        let mut keep = frame("dst", &["a"], &[("a", &[1]), ("b", &[2])]);
        keep.merge_labels(&src, false).unwrap();
        assert_eq!(keep.labels().collect::<Vec<_>>(), vec!["a", "b", "c"]);
        assert_eq!(keep.row("b").unwrap()[0], CellValue::Int(2));

        let mut repl = frame("dst", &["a"], &[("a", &[1]), ("b", &[2])]);
        repl.merge_labels(&src, true).unwrap();
        assert_eq!(repl.labels().collect::<Vec<_>>(), vec!["a", "b", "c"]);
        assert_eq!(repl.row("b").unwrap()[0], CellValue::Int(20));
    }

    #[test]
    fn merge_labels_rejects_schema_mismatch() {
        let src = frame("src", &["x"], &[]);
        let mut dst = frame("dst", &["a"], &[]);
        assert_eq!(dst.merge_labels(&src, false).unwrap_err(), DataError::SeriesMismatch);
    }

    #[test]
    fn merge_labels_disjoint_is_additive() {
        let src = frame("src", &["a"], &[("c", &[3]), ("d", &[4])]);
        let mut dst = frame("dst", &["a"], &[("a", &[1]), ("b", &[2])]);
        dst.merge_labels(&src, false).unwrap();
        assert_eq!(dst.n_rows(), 4);
    }

    #[test]
    fn merge_series_appends_columns_by_label() {
        let src = frame("src", &["B"], &[("r1", &[10]), ("r2", &[20])]);
        let mut dst = frame("dst", &["A"], &[("r1", &[1]), ("r2", &[2])]);
        dst.merge_series(&["B".into()], &src).unwrap();
        assert_eq!(dst.series_names(), &["A", "B"]);
        assert_eq!(
            dst.row("r2").unwrap(),
            &[CellValue::Int(2), CellValue::Int(20)]
        );
        assert!(dst.is_rectangular());

        // Empty list leaves the frame untouched.
        let before = dst.clone();
        dst.merge_series(&[], &src).unwrap();
        assert_eq!(dst, before);
    }

    #[test]
    fn merge_series_requires_equal_label_sets() {
        let src = frame("src", &["B"], &[("r1", &[10])]);
        let mut dst = frame("dst", &["A"], &[("r1", &[1]), ("r2", &[2])]);
        let err = dst.merge_series(&["B".into()], &src).unwrap_err();
        assert_eq!(err, DataError::LabelMismatch("r2".into()));
    }

    #[test]
    fn merge_series_rejects_existing_column() {
        let src = frame("src", &["A"], &[("r1", &[10])]);
        let mut dst = frame("dst", &["A"], &[("r1", &[1])]);
        let err = dst.merge_series(&["A".into()], &src).unwrap_err();
        assert_eq!(err, DataError::DuplicateSeries("A".into()));
    }

    #[test]
    fn rename_series_updates_one_name() {
        let mut df = frame("f", &["Open", "Close"], &[("r", &[1, 2])]);
        df.rename(RenameAxis::Series, "Open", "open_px").unwrap();
        assert_eq!(df.series_names(), &["open_px", "Close"]);
        assert_eq!(df.row("r").unwrap().len(), 2);

        // Identity rename succeeds; renaming over an existing name fails.
        df.rename(RenameAxis::Series, "Close", "Close").unwrap();
        let err = df
            .rename(RenameAxis::Series, "Close", "open_px")
            .unwrap_err();
        assert_eq!(err, DataError::DuplicateName("open_px".into()));
    }

    #[test]
    fn rename_labels_preserves_order_and_values() {
        let mut df = frame("f", &["a"], &[("x", &[1]), ("y", &[2]), ("z", &[3])]);
        df.rename(RenameAxis::Labels, "y", "mid").unwrap();
        assert_eq!(df.labels().collect::<Vec<_>>(), vec!["x", "mid", "z"]);
        assert_eq!(df.row("mid").unwrap()[0], CellValue::Int(2));
        let err = df.rename(RenameAxis::Labels, "gone", "new").unwrap_err();
        assert_eq!(err, DataError::UnknownName("gone".into()));
    }

    #[test]
    fn add_columnar_data_sorts_series() {
        let mut df = DataFrame::new("r");
        let mut columns = BTreeMap::new();
        columns.insert("mean".to_string(), vec![CellValue::Real(2.0)]);
        columns.insert("count".to_string(), vec![CellValue::Int(3)]);
        df.add_columnar_data(&columns, &["A".to_string()]).unwrap();
        assert_eq!(df.series_names(), &["count", "mean"]);
        assert_eq!(df.n_rows(), 1);
        assert_eq!(
            df.row("A").unwrap(),
            &[CellValue::Int(3), CellValue::Real(2.0)]
        );

        let mut empty = DataFrame::new("e");
        empty.add_columnar_data(&BTreeMap::new(), &[]).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn add_columnar_data_checks_lengths() {
        let mut df = DataFrame::new("r");
        let mut columns = BTreeMap::new();
        columns.insert("a".to_string(), vec![CellValue::Int(1)]);
        let err = df
            .add_columnar_data(&columns, &["x".to_string(), "y".to_string()])
            .unwrap_err();
        assert_eq!(err, DataError::LengthMismatch { expected: 2, got: 1 });
    }

    #[test]
    fn describe_counts_types_and_ranges() {
        let mut df = DataFrame::with_series("d", vec!["v".into()]).unwrap();
        df.insert_row("1", vec![CellValue::Real(1.5)]).unwrap();
        df.insert_row("2", vec![CellValue::Int(7)]).unwrap();
        df.insert_row("3", vec![CellValue::text("abc")]).unwrap();
        df.insert_row("4", vec![CellValue::text("2")]).unwrap();
        let report = df.describe();
        assert_eq!(report.n_rows, 4);
        let s = &report.series[0];
        assert_eq!(s.counts.string, 2);
        assert_eq!(s.counts.integer, 1);
        assert_eq!(s.counts.float, 1);
        assert_eq!(s.counts.unknown, 0);
        assert_eq!(s.min, Some(CellValue::Real(1.5)));
        assert_eq!(s.max, Some(CellValue::Int(7)));
    }

    #[test]
    fn describe_empty_frame_has_no_series_blocks() {
        let report = DataFrame::new("e").describe();
        assert_eq!(report.n_rows, 0);
        assert!(report.series.is_empty());
        let text = report.to_string();
        assert!(text.contains("Number of Series: 0"));
        assert!(text.contains("Number of Labels (data rows): 0"));
    }

    #[test]
    fn describe_all_float_series() {
        let mut df = DataFrame::with_series("d", vec!["m".into()]).unwrap();
        for i in 0..6 {
            df.insert_row(i.to_string(), vec![CellValue::Real(i as f64)])
                .unwrap();
        }
        let text = df.describe().to_string();
        assert!(text.contains("Number of float data type values: 6"));
        assert!(text.contains("Number of string data type values: 0"));
    }

    #[test]
    fn describe_skips_range_for_non_numeric_series() {
        let mut df = DataFrame::with_series("d", vec!["t".into()]).unwrap();
        df.insert_row("1", vec![CellValue::text("abc")]).unwrap();
        let report = df.describe();
        assert_eq!(report.series[0].min, None);
        assert!(!report.to_string().contains("Minimum value"));
    }

    #[test]
    fn mdf_rejects_duplicate_names() {
        let mut mdf = MultiDataFrame::new();
        mdf.attach(DataFrame::new("a")).unwrap();
        let err = mdf.attach(DataFrame::new("a")).unwrap_err();
        assert_eq!(err, DataError::DuplicateFrame("a".into()));
        assert_eq!(mdf.len(), 1);
    }
}
