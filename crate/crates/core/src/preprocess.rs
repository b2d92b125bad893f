//! Series containers, CSV ingestion and z-score normalization.
//!
//! CSV layout: UTF-8, comma separated, one header row, one column per
//! variable in file order, plus an optional `label` column holding `1`
//! (normal) or `2` (abnormal).

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Standard deviations below this are treated as a constant column.
pub const MIN_STD: f64 = 1e-12;

/// Name of the label column in CSV files.
pub const LABEL_COLUMN: &str = "label";

/// A T×n matrix of finite values stored row-major, one row per time point.
#[derive(Debug, Clone, PartialEq)]
pub struct MultivariateSeries {
    n_vars: usize,
    values: Vec<f64>,
}

impl MultivariateSeries {
    /// Builds a series from row-major values. Rejects empty, ragged or
    /// non-finite input.
    pub fn new(n_vars: usize, values: Vec<f64>) -> Result<Self> {
        if n_vars == 0 {
            return Err(Error::Data("series needs at least one variable".into()));
        }
        if values.is_empty() {
            return Err(Error::Data("series has no rows".into()));
        }
        if !values.len().is_multiple_of(n_vars) {
            return Err(Error::Data(format!(
                "{} values cannot be split into rows of {n_vars}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Cell {
                row: pos / n_vars + 1,
                column: (pos % n_vars + 1).to_string(),
                message: "non-finite value".into(),
            });
        }
        Ok(Self { n_vars, values })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_vars = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut values = Vec::with_capacity(rows.len() * n_vars);
        for (j, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n_vars {
                return Err(Error::Cell {
                    row: j + 1,
                    column: (row.len().min(n_vars) + 1).to_string(),
                    message: format!("expected {n_vars} values, found {}", row.len()),
                });
            }
            values.extend_from_slice(row);
        }
        Self::new(n_vars, values)
    }

    /// Number of time points T.
    pub fn len(&self) -> usize {
        self.values.len() / self.n_vars
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of variables n.
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.n_vars..(j + 1) * self.n_vars]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.n_vars)
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        self.rows().map(|r| r[i]).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Splits into the first `at` rows and the remainder. Both halves must
    /// be non-empty.
    pub fn split_at(&self, at: usize) -> Result<(Self, Self)> {
        if at == 0 || at >= self.len() {
            return Err(Error::InvalidParameter(format!(
                "split point {at} leaves an empty segment of a {}-point series",
                self.len()
            )));
        }
        let (head, tail) = self.values.split_at(at * self.n_vars);
        Ok((
            Self {
                n_vars: self.n_vars,
                values: head.to_vec(),
            },
            Self {
                n_vars: self.n_vars,
                values: tail.to_vec(),
            },
        ))
    }

    /// Applies `f(value, column)` to every cell.
    pub(crate) fn map_cells(&self, f: impl Fn(f64, usize) -> f64) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, &v)| f(v, k % self.n_vars))
            .collect();
        Self {
            n_vars: self.n_vars,
            values,
        }
    }

    fn check_arity(&self, expected: usize) -> Result<()> {
        if self.n_vars != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: self.n_vars,
            });
        }
        Ok(())
    }
}

/// Hidden state of a time point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Label {
    Normal,
    Abnormal,
}

impl Label {
    /// External code: 1 for normal, 2 for abnormal.
    pub fn code(self) -> u8 {
        match self {
            Label::Normal => 1,
            Label::Abnormal => 2,
        }
    }

    /// Zero-based state index used by the HMM.
    pub fn index(self) -> usize {
        match self {
            Label::Normal => 0,
            Label::Abnormal => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            Label::Normal
        } else {
            Label::Abnormal
        }
    }
}

impl From<Label> for u8 {
    fn from(l: Label) -> u8 {
        l.code()
    }
}

impl TryFrom<u8> for Label {
    type Error = String;

    fn try_from(code: u8) -> std::result::Result<Self, String> {
        match code {
            1 => Ok(Label::Normal),
            2 => Ok(Label::Abnormal),
            other => Err(format!("label must be 1 or 2, got {other}")),
        }
    }
}

/// Per-time-point hidden-state labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelSequence(Vec<Label>);

impl LabelSequence {
    pub fn new(labels: Vec<Label>) -> Self {
        Self(labels)
    }

    pub fn from_codes(codes: &[u8]) -> Result<Self> {
        codes
            .iter()
            .map(|&c| Label::try_from(c).map_err(Error::Data))
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Label] {
        &self.0
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = Label> + '_ {
        self.0.iter().copied()
    }

    pub fn count(&self, label: Label) -> usize {
        self.0.iter().filter(|&&l| l == label).count()
    }

    pub fn split_at(&self, at: usize) -> (Self, Self) {
        let (a, b) = self.0.split_at(at);
        (Self(a.to_vec()), Self(b.to_vec()))
    }
}

impl FromIterator<Label> for LabelSequence {
    fn from_iter<I: IntoIterator<Item = Label>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Reads a CSV file. When `has_labels` is set the file must contain a
/// `label` column; it is removed from the returned series.
pub fn load_csv(path: impl AsRef<Path>, has_labels: bool) -> Result<(MultivariateSeries, Option<LabelSequence>)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };

    let headers: Vec<String> = reader.headers().map_err(csv_err)?.iter().map(str::to_owned).collect();
    let label_col = headers.iter().position(|h| h == LABEL_COLUMN);
    if has_labels && label_col.is_none() {
        return Err(Error::Data(format!(
            "{}: no `{LABEL_COLUMN}` column in header",
            path.display()
        )));
    }
    let label_col = if has_labels { label_col } else { None };
    let n_vars = headers.len() - usize::from(label_col.is_some());
    if n_vars == 0 {
        return Err(Error::Data(format!("{}: no variable columns", path.display())));
    }

    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (j, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row = j + 1;
        if record.len() != headers.len() {
            return Err(Error::Cell {
                row,
                column: (record.len().min(headers.len()) + 1).to_string(),
                message: format!("expected {} fields, found {}", headers.len(), record.len()),
            });
        }
        for (k, cell) in record.iter().enumerate() {
            let cell_err = |message: String| Error::Cell {
                row,
                column: headers[k].clone(),
                message,
            };
            if cell.is_empty() {
                return Err(cell_err("empty cell".into()));
            }
            if Some(k) == label_col {
                let label = match cell {
                    "1" => Label::Normal,
                    "2" => Label::Abnormal,
                    other => return Err(cell_err(format!("label must be 1 or 2, got `{other}`"))),
                };
                labels.push(label);
            } else {
                let v: f64 = cell.parse().map_err(|_| cell_err(format!("not a number: `{cell}`")))?;
                if !v.is_finite() {
                    return Err(cell_err(format!("non-finite value `{cell}`")));
                }
                values.push(v);
            }
        }
    }
    let series = MultivariateSeries::new(n_vars, values)?;
    Ok((series, label_col.map(|_| LabelSequence(labels))))
}

/// Writes a series (and optional trailing `label` column) as CSV. Values use
/// the shortest representation that parses back to the same bits.
pub fn write_csv(path: impl AsRef<Path>, series: &MultivariateSeries, labels: Option<&LabelSequence>) -> Result<()> {
    let path = path.as_ref();
    if let Some(labels) = labels {
        if labels.len() != series.len() {
            return Err(Error::DimensionMismatch {
                expected: series.len(),
                actual: labels.len(),
            });
        }
    }
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = std::io::BufWriter::new(File::create(path).map_err(io_err)?);
    let mut header: Vec<String> = (1..=series.n_vars()).map(|i| format!("x{i}")).collect();
    if labels.is_some() {
        header.push(LABEL_COLUMN.to_string());
    }
    writeln!(out, "{}", header.join(",")).map_err(io_err)?;
    for (j, row) in series.rows().enumerate() {
        let mut line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        if let Some(labels) = labels {
            line.push(labels.0[j].code().to_string());
        }
        writeln!(out, "{}", line.join(",")).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

/// Per-column normalization statistics fitted on a training segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZScoreParams {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

/// Column means and population standard deviations. Columns with a standard
/// deviation below [`MIN_STD`] get `std = 1`.
pub fn fit_zscore(train: &MultivariateSeries) -> Result<ZScoreParams> {
    let t = train.len();
    if t < 2 {
        return Err(Error::Data(format!("z-score needs at least 2 rows, got {t}")));
    }
    let n = train.n_vars();
    let mut means = vec![0.0; n];
    for row in train.rows() {
        for (m, v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    means.iter_mut().for_each(|m| *m /= t as f64);

    let mut vars = vec![0.0; n];
    for row in train.rows() {
        for ((s, v), m) in vars.iter_mut().zip(row).zip(&means) {
            *s += (v - m) * (v - m);
        }
    }
    let stds = vars
        .into_iter()
        .map(|s| {
            let sd = (s / t as f64).sqrt();
            if sd < MIN_STD {
                1.0
            } else {
                sd
            }
        })
        .collect();
    Ok(ZScoreParams { means, stds })
}

pub fn apply_zscore(series: &MultivariateSeries, params: &ZScoreParams) -> Result<MultivariateSeries> {
    series.check_arity(params.means.len())?;
    Ok(series.map_cells(|v, i| (v - params.means[i]) / params.stds[i]))
}
