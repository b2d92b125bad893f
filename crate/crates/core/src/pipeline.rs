//! End-to-end detector: split → z-score → transform → HMM → metrics, plus
//! the parameter sweep harness and report writers.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{mean_fusion, pca_fit, pca_project, PcaModel};
use crate::discretize::{fit_bins, to_symbols, Discretizer, ObservedSequence};
use crate::error::{Error, Result};
use crate::fcm::{fcm_assign, fcm_fit, FcmConfig, FcmModel};
use crate::fuzzy_integral::{
    apply_unit_rescale, densities_from_labels, fit_unit_rescale, uniform_densities, FuzzyMeasure, UnitRescaleParams,
};
use crate::hmm::{estimate_supervised, viterbi, HmmModel};
use crate::metrics::{compute_metrics, confusion, ConfusionMatrix, MetricsReport, Score};
use crate::preprocess::{apply_zscore, fit_zscore, Label, LabelSequence, MultivariateSeries, ZScoreParams};

/// Multivariate → univariate transformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fcm,
    Sugeno,
    Choquet,
    Pca,
    Mean,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Fcm, Method::Sugeno, Method::Choquet, Method::Pca, Method::Mean];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Fcm => "fcm",
            Method::Sugeno => "sugeno",
            Method::Choquet => "choquet",
            Method::Pca => "pca",
            Method::Mean => "mean",
        }
    }

    fn is_integral(self) -> bool {
        matches!(self, Method::Sugeno | Method::Choquet)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method `{s}` (fcm|sugeno|choquet|pca|mean)")))
    }
}

/// How fuzzy densities are chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum DensitySpec {
    /// `density_sum / n` for every variable.
    Uniform,
    /// Proportional to the absolute label correlation of each variable.
    LabelCorr,
    Explicit(Vec<f64>),
}

impl fmt::Display for DensitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensitySpec::Uniform => f.write_str("uniform"),
            DensitySpec::LabelCorr => f.write_str("label-corr"),
            DensitySpec::Explicit(g) => {
                let parts: Vec<String> = g.iter().map(|v| format!("{v:?}")).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl FromStr for DensitySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "uniform" => Ok(DensitySpec::Uniform),
            "label-corr" => Ok(DensitySpec::LabelCorr),
            list => {
                let g = list
                    .split(',')
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| {
                        Error::InvalidParameter(format!(
                            "densities must be uniform, label-corr or a comma-separated list, got `{s}`"
                        ))
                    })?;
                if let Some(bad) = g.iter().find(|v| !(**v > 0.0 && **v < 1.0)) {
                    return Err(Error::InvalidParameter(format!("density {bad} outside (0, 1)")));
                }
                Ok(DensitySpec::Explicit(g))
            }
        }
    }
}

impl From<DensitySpec> for String {
    fn from(d: DensitySpec) -> String {
        d.to_string()
    }
}

impl TryFrom<String> for DensitySpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub method: Method,
    pub clusters: usize,
    pub fuzzifier: f64,
    pub symbols: usize,
    /// Fraction of leading time points used for training.
    pub split: f64,
    pub smoothing: f64,
    pub densities: DensitySpec,
    pub density_sum: f64,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            method: Method::Choquet,
            clusters: 10,
            fuzzifier: 2.0,
            symbols: 30,
            split: 0.7,
            smoothing: 1.0,
            densities: DensitySpec::Uniform,
            density_sum: 0.6,
            seed: 0,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("invalid value for `{key}`: `{value}`")))
}

impl PipelineConfig {
    /// Keys accepted by [`PipelineConfig::set`].
    pub const KEYS: [&'static str; 9] = [
        "method",
        "clusters",
        "fuzzifier",
        "symbols",
        "split",
        "smoothing",
        "densities",
        "density-sum",
        "seed",
    ];

    /// Sets one field from its textual form. Keys match the CLI flag names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "method" => self.method = value.trim().parse()?,
            "clusters" => self.clusters = parse_value(key, value)?,
            "fuzzifier" => self.fuzzifier = parse_value(key, value)?,
            "symbols" => self.symbols = parse_value(key, value)?,
            "split" => self.split = parse_value(key, value)?,
            "smoothing" => self.smoothing = parse_value(key, value)?,
            "densities" => self.densities = value.parse()?,
            "density-sum" | "density_sum" => self.density_sum = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            other => return Err(Error::InvalidParameter(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Checks the parameters that matter for the configured method.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.split > 0.0 && self.split < 1.0) {
            return bad(format!("split must lie in (0, 1), got {}", self.split));
        }
        if !(self.smoothing >= 0.0 && self.smoothing.is_finite()) {
            return bad(format!("smoothing must be >= 0, got {}", self.smoothing));
        }
        match self.method {
            Method::Fcm => {
                if self.clusters == 0 {
                    return bad("clusters must be at least 1".into());
                }
                if !(self.fuzzifier > 1.0 && self.fuzzifier.is_finite()) {
                    return bad(format!("fuzzifier must be > 1, got {}", self.fuzzifier));
                }
            }
            _ => {
                if self.symbols < 2 {
                    return bad(format!("symbols must be at least 2, got {}", self.symbols));
                }
            }
        }
        if self.method.is_integral() && !matches!(self.densities, DensitySpec::Explicit(_)) && !(self.density_sum > 0.0)
        {
            return bad(format!("density sum must be positive, got {}", self.density_sum));
        }
        Ok(())
    }
}

/// Parses `key = value` lines. Blank lines and `#` comments are ignored.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("config line {}: expected `key = value`", k + 1)))?;
        out.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}

/// Parameters fitted on the training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedPipeline {
    pub zscore: ZScoreParams,
    pub transform: FittedTransform,
    pub hmm: HmmModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FittedTransform {
    Fcm {
        model: FcmModel,
    },
    Integral {
        rescale: UnitRescaleParams,
        measure: FuzzyMeasure,
        bins: Discretizer,
    },
    Pca {
        model: PcaModel,
        bins: Discretizer,
    },
    Mean {
        bins: Discretizer,
    },
}

/// Compact description of the fitted transform for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TransformSummary {
    Fcm {
        prototypes: Vec<Vec<f64>>,
        objective: f64,
        iterations: usize,
    },
    Integral {
        densities: Vec<f64>,
        lambda: f64,
        bins: Discretizer,
    },
    Pca {
        direction: Vec<f64>,
        eigenvalue: f64,
        bins: Discretizer,
    },
    Mean {
        bins: Discretizer,
    },
}

impl From<&FittedTransform> for TransformSummary {
    fn from(t: &FittedTransform) -> Self {
        match t {
            FittedTransform::Fcm { model } => TransformSummary::Fcm {
                prototypes: model.prototypes.clone(),
                objective: model.objective,
                iterations: model.iterations,
            },
            FittedTransform::Integral { measure, bins, .. } => TransformSummary::Integral {
                densities: measure.densities().to_vec(),
                lambda: measure.lambda(),
                bins: bins.clone(),
            },
            FittedTransform::Pca { model, bins } => TransformSummary::Pca {
                direction: model.direction.clone(),
                eigenvalue: model.eigenvalue,
                bins: bins.clone(),
            },
            FittedTransform::Mean { bins } => TransformSummary::Mean { bins: bins.clone() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub points: usize,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: PipelineConfig,
    pub train: SplitReport,
    pub test: SplitReport,
    pub model: HmmModel,
    pub transform: TransformSummary,
    #[serde(default)]
    pub warnings: Vec<String>,
    /// Wall-clock time; absent unless requested, so reports stay reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

/// Number of leading points used for training.
pub fn train_len(total: usize, split: f64) -> usize {
    (split * total as f64).round() as usize
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.in_stage(name))
}

struct Symbols {
    train: ObservedSequence,
    test: ObservedSequence,
    alphabet: usize,
}

fn resolve_measure(
    config: &PipelineConfig,
    train: &MultivariateSeries,
    labels: &LabelSequence,
    warnings: &mut Vec<String>,
) -> Result<FuzzyMeasure> {
    let n = train.n_vars();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "fuzzy integrals need at least 2 variables, got {n}"
        )));
    }
    let densities = match &config.densities {
        DensitySpec::Uniform => uniform_densities(n, config.density_sum)?,
        DensitySpec::LabelCorr => match densities_from_labels(train, labels, config.density_sum) {
            Ok(g) => g,
            Err(Error::Degenerate(msg)) => {
                warnings.push(format!("{msg}; falling back to uniform densities"));
                uniform_densities(n, config.density_sum)?
            }
            Err(e) => return Err(e),
        },
        DensitySpec::Explicit(g) => {
            if g.len() != n {
                return Err(Error::InvalidParameter(format!(
                    "{} densities given for {n} variables",
                    g.len()
                )));
            }
            g.clone()
        }
    };
    FuzzyMeasure::new(densities)
}

fn integrate(series: &MultivariateSeries, measure: &FuzzyMeasure, method: Method) -> Result<Vec<f64>> {
    series
        .rows()
        .map(|h| match method {
            Method::Sugeno => measure.sugeno(h),
            _ => measure.choquet(h),
        })
        .collect()
}

fn transform(
    config: &PipelineConfig,
    stream: u64,
    train: &MultivariateSeries,
    test: &MultivariateSeries,
    labels: &LabelSequence,
    warnings: &mut Vec<String>,
) -> Result<(FittedTransform, Symbols)> {
    let binned = |train_values: Vec<f64>, test_values: Vec<f64>| -> Result<(Discretizer, Symbols)> {
        let bins = stage("discretize", fit_bins(&train_values, config.symbols))?;
        let symbols = Symbols {
            train: to_symbols(&train_values, &bins),
            test: to_symbols(&test_values, &bins),
            alphabet: config.symbols,
        };
        Ok((bins, symbols))
    };

    match config.method {
        Method::Fcm => {
            let fcm_config = FcmConfig {
                clusters: config.clusters,
                fuzzifier: config.fuzzifier,
                seed: config.seed,
                stream,
                ..FcmConfig::default()
            };
            let model = stage("fcm", fcm_fit(train, &fcm_config))?;
            let symbols = Symbols {
                train: stage("fcm", fcm_assign(train, &model))?,
                test: stage("fcm", fcm_assign(test, &model))?,
                alphabet: config.clusters,
            };
            Ok((FittedTransform::Fcm { model }, symbols))
        }
        Method::Sugeno | Method::Choquet => {
            let rescale = stage("rescale", fit_unit_rescale(train))?;
            let h_train = stage("rescale", apply_unit_rescale(train, &rescale))?;
            let h_test = stage("rescale", apply_unit_rescale(test, &rescale))?;
            let measure = stage("fuzzy measure", resolve_measure(config, train, labels, warnings))?;
            let v_train = stage("integral", integrate(&h_train, &measure, config.method))?;
            let v_test = stage("integral", integrate(&h_test, &measure, config.method))?;
            let (bins, symbols) = binned(v_train, v_test)?;
            Ok((FittedTransform::Integral { rescale, measure, bins }, symbols))
        }
        Method::Pca => {
            let model = stage("pca", pca_fit(train))?;
            let p_train = stage("pca", pca_project(train, &model))?;
            let p_test = stage("pca", pca_project(test, &model))?;
            let (bins, symbols) = binned(p_train, p_test)?;
            Ok((FittedTransform::Pca { model, bins }, symbols))
        }
        Method::Mean => {
            let (bins, symbols) = binned(mean_fusion(train), mean_fusion(test))?;
            Ok((FittedTransform::Mean { bins }, symbols))
        }
    }
}

fn score_split(model: &HmmModel, obs: &ObservedSequence, truth: &LabelSequence) -> Result<SplitReport> {
    let path = viterbi(obs, model)?;
    let cm = confusion(&path.states, truth)?;
    Ok(SplitReport {
        points: truth.len(),
        confusion: cm,
        metrics: compute_metrics(&cm)?,
    })
}

/// Runs the full detector and also returns every fitted parameter.
/// `stream` selects the RNG stream for FCM initialization.
pub fn run_pipeline_detailed(
    data: &MultivariateSeries,
    labels: &LabelSequence,
    config: &PipelineConfig,
    stream: u64,
) -> Result<(RunReport, FittedPipeline)> {
    stage("config", config.validate())?;
    if labels.len() != data.len() {
        return Err(Error::DimensionMismatch {
            expected: data.len(),
            actual: labels.len(),
        }
        .in_stage("input"));
    }
    let n_train = train_len(data.len(), config.split);
    if n_train < 2 || n_train >= data.len() {
        return Err(Error::InvalidParameter(format!(
            "split {} of {} points leaves {n_train} training and {} test points",
            config.split,
            data.len(),
            data.len().saturating_sub(n_train)
        ))
        .in_stage("split"));
    }
    let (raw_train, raw_test) = stage("split", data.split_at(n_train))?;
    let (train_labels, test_labels) = labels.split_at(n_train);

    let mut warnings = Vec::new();
    for (label, name) in [(Label::Normal, "normal"), (Label::Abnormal, "abnormal")] {
        if train_labels.count(label) == 0 {
            warnings.push(format!(
                "training split contains no {name} points; its HMM rows rest on smoothing alone"
            ));
        }
    }

    let zscore = stage("z-score", fit_zscore(&raw_train))?;
    let train = stage("z-score", apply_zscore(&raw_train, &zscore))?;
    let test = stage("z-score", apply_zscore(&raw_test, &zscore))?;

    let (fitted_transform, symbols) = transform(config, stream, &train, &test, &train_labels, &mut warnings)?;

    let hmm = stage(
        "hmm estimation",
        estimate_supervised(&symbols.train, &train_labels, symbols.alphabet, config.smoothing),
    )?;
    let train_report = stage("viterbi (train)", score_split(&hmm, &symbols.train, &train_labels))?;
    let test_report = stage("viterbi (test)", score_split(&hmm, &symbols.test, &test_labels))?;

    let report = RunReport {
        config: config.clone(),
        train: train_report,
        test: test_report,
        model: hmm.clone(),
        transform: TransformSummary::from(&fitted_transform),
        warnings,
        timing: None,
    };
    let fitted = FittedPipeline {
        zscore,
        transform: fitted_transform,
        hmm,
    };
    Ok((report, fitted))
}

pub fn run_pipeline(data: &MultivariateSeries, labels: &LabelSequence, config: &PipelineConfig) -> Result<RunReport> {
    run_pipeline_detailed(data, labels, config, 0).map(|(r, _)| r)
}

/// Parameter ranges for a sweep. Only the axes relevant to the base
/// method are used: clusters × fuzzifiers for FCM, symbols otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub clusters: Vec<usize>,
    pub fuzzifiers: Vec<f64>,
    pub symbols: Vec<usize>,
}

impl Default for SweepGrid {
    /// Fuzzifiers 1.1..=2.9 step 0.1, clusters 2..=198, symbols 2..=80.
    fn default() -> Self {
        Self {
            clusters: (2..=198).collect(),
            fuzzifiers: float_range(1.1, 2.9, 0.1).expect("static range"),
            symbols: (2..=80).collect(),
        }
    }
}

/// `lo, lo + step, …` up to `hi` inclusive, rounded to 12 decimals so that
/// 1.1 + 8·0.1 prints as 1.9.
pub fn float_range(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || hi < lo {
        return Err(Error::InvalidParameter(format!("bad range {lo}:{hi}:{step}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|k| ((lo + k as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

/// Parses `a:b:step` (inclusive) or a comma-separated list.
pub fn parse_float_grid(s: &str) -> Result<Vec<f64>> {
    let err = || Error::InvalidParameter(format!("bad grid `{s}`"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let v: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse().map_err(|_| err()))
            .collect::<Result<_>>()?;
        return float_range(v[0], v[1], v[2]);
    }
    s.split(',').map(|p| p.trim().parse().map_err(|_| err())).collect()
}

/// Parses `a:b[:step]` (inclusive, step defaults to 1) or a comma-separated list.
pub fn parse_int_grid(s: &str) -> Result<Vec<usize>> {
    let err = || Error::InvalidParameter(format!("bad grid `{s}`"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 2 || parts.len() == 3 {
        let v: Vec<usize> = parts
            .iter()
            .map(|p| p.trim().parse().map_err(|_| err()))
            .collect::<Result<_>>()?;
        let step = v.get(2).copied().unwrap_or(1);
        if step == 0 || v[1] < v[0] {
            return Err(err());
        }
        return Ok((v[0]..=v[1]).step_by(step).collect());
    }
    s.split(',').map(|p| p.trim().parse().map_err(|_| err())).collect()
}

impl SweepGrid {
    /// Expands the grid around `base`, in clusters-major order for FCM.
    pub fn points(&self, base: &PipelineConfig) -> Result<Vec<PipelineConfig>> {
        let points: Vec<PipelineConfig> = if base.method == Method::Fcm {
            self.clusters
                .iter()
                .flat_map(|&clusters| {
                    self.fuzzifiers.iter().map(move |&fuzzifier| PipelineConfig {
                        clusters,
                        fuzzifier,
                        ..base.clone()
                    })
                })
                .collect()
        } else {
            self.symbols
                .iter()
                .map(|&symbols| PipelineConfig {
                    symbols,
                    ..base.clone()
                })
                .collect()
        };
        if points.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "empty sweep grid for method {}",
                base.method
            )));
        }
        Ok(points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    /// Position in grid order; also the FCM RNG stream of this run.
    pub index: usize,
    pub config: PipelineConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<RunReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SweepEntry {
    fn test_accuracy(&self) -> Option<f64> {
        self.report.as_ref().and_then(|r| r.test.metrics.accuracy.value())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    /// Sorted by test accuracy (descending), failures last, ties by index.
    pub entries: Vec<SweepEntry>,
}

/// Runs every grid point in parallel. Failures are recorded per entry.
pub fn sweep(
    data: &MultivariateSeries,
    labels: &LabelSequence,
    base: &PipelineConfig,
    grid: &SweepGrid,
) -> Result<SweepReport> {
    let points = grid.points(base)?;
    let mut entries: Vec<SweepEntry> = points
        .into_par_iter()
        .enumerate()
        .map(
            |(index, config)| match run_pipeline_detailed(data, labels, &config, index as u64) {
                Ok((report, _)) => SweepEntry {
                    index,
                    config,
                    report: Some(report),
                    error: None,
                },
                Err(e) => SweepEntry {
                    index,
                    config,
                    report: None,
                    error: Some(e.to_string()),
                },
            },
        )
        .collect();
    entries.sort_by(|a, b| {
        let key = |e: &SweepEntry| e.test_accuracy().unwrap_or(f64::NEG_INFINITY);
        key(b).total_cmp(&key(a)).then(a.index.cmp(&b.index))
    });
    Ok(SweepReport { entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::InvalidParameter(format!("unknown format `{other}` (json|csv)"))),
        }
    }
}

/// Something that can be written as a report.
#[derive(Debug, Clone, Copy)]
pub enum Emit<'a> {
    Run(&'a RunReport),
    Sweep(&'a SweepReport),
}

pub const CSV_HEADER: [&str; 19] = [
    "index",
    "method",
    "clusters",
    "fuzzifier",
    "symbols",
    "split",
    "smoothing",
    "densities",
    "density_sum",
    "seed",
    "error",
    "train_accuracy",
    "train_sensitivity",
    "train_specificity",
    "train_f_measure",
    "test_accuracy",
    "test_sensitivity",
    "test_specificity",
    "test_f_measure",
];

fn score_cell(s: Score) -> String {
    s.value().map(|v| format!("{v:?}")).unwrap_or_default()
}

fn csv_row(index: usize, config: &PipelineConfig, report: Option<&RunReport>, error: Option<&str>) -> Vec<String> {
    let fcm = config.method == Method::Fcm;
    let integral = config.method.is_integral();
    let opt = |cond: bool, v: String| if cond { v } else { String::new() };
    let mut row = vec![
        index.to_string(),
        config.method.to_string(),
        opt(fcm, config.clusters.to_string()),
        opt(fcm, format!("{:?}", config.fuzzifier)),
        opt(!fcm, config.symbols.to_string()),
        format!("{:?}", config.split),
        format!("{:?}", config.smoothing),
        opt(integral, config.densities.to_string()),
        opt(integral, format!("{:?}", config.density_sum)),
        config.seed.to_string(),
        error.unwrap_or("").to_string(),
    ];
    for split in ["train", "test"] {
        match report {
            Some(r) => {
                let m = if split == "train" {
                    &r.train.metrics
                } else {
                    &r.test.metrics
                };
                row.extend([m.accuracy, m.sensitivity, m.specificity, m.f_measure].map(score_cell));
            }
            None => row.extend(std::iter::repeat_n(String::new(), 4)),
        }
    }
    row
}

/// Renders a report as a string in the requested format.
pub fn render_report(what: Emit<'_>, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => {
            let mut s = match what {
                Emit::Run(r) => serde_json::to_string_pretty(r)?,
                Emit::Sweep(s) => serde_json::to_string_pretty(s)?,
            };
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| Error::Data(format!("csv: {e}"));
            w.write_record(CSV_HEADER).map_err(csv_err)?;
            match what {
                Emit::Run(r) => w.write_record(csv_row(0, &r.config, Some(r), None)).map_err(csv_err)?,
                Emit::Sweep(s) => {
                    for e in &s.entries {
                        w.write_record(csv_row(e.index, &e.config, e.report.as_ref(), e.error.as_deref()))
                            .map_err(csv_err)?;
                    }
                }
            }
            let bytes = w.into_inner().map_err(|e| Error::Data(format!("csv: {e}")))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

pub fn emit_report(what: Emit<'_>, path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    let path = path.as_ref();
    let text = render_report(what, format)?;
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
