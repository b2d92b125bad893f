//! Confusion counts and detection scores.
//!
//! Convention: the *positive* class is **normal**. TP counts normal points
//! predicted normal, TN abnormal points predicted abnormal, FP abnormal
//! points predicted normal and FN normal points predicted abnormal. So
//! sensitivity is the hit rate on normal points and specificity the
//! detection rate of anomalies.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::preprocess::{Label, LabelSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// A score that may be undefined because its denominator is zero.
/// Serialized as a number or the string `"undefined"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Score {
    Defined(f64),
    Undefined,
}

impl Score {
    fn ratio(num: u64, den: u64) -> Self {
        if den == 0 {
            Score::Undefined
        } else {
            Score::Defined(num as f64 / den as f64)
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Score::Defined(v) => Some(v),
            Score::Undefined => None,
        }
    }
}

impl Serialize for Score {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Score::Defined(v) => s.serialize_f64(*v),
            Score::Undefined => s.serialize_str("undefined"),
        }
    }
}

impl<'de> Deserialize<'de> for Score {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct ScoreVisitor;

        impl Visitor<'_> for ScoreVisitor {
            type Value = Score;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"undefined\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Score, E> {
                Ok(Score::Defined(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Score, E> {
                Ok(Score::Defined(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Score, E> {
                Ok(Score::Defined(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Score, E> {
                if v == "undefined" {
                    Ok(Score::Undefined)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }

        d.deserialize_any(ScoreVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: Score,
    pub sensitivity: Score,
    pub specificity: Score,
    pub precision: Score,
    pub recall: Score,
    pub f_measure: Score,
}

pub fn confusion(predicted: &LabelSequence, truth: &LabelSequence) -> Result<ConfusionMatrix> {
    if predicted.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            actual: predicted.len(),
        });
    }
    let mut cm = ConfusionMatrix::default();
    for (p, t) in predicted.iter().zip(truth.iter()) {
        match (t, p) {
            (Label::Normal, Label::Normal) => cm.tp += 1,
            (Label::Normal, Label::Abnormal) => cm.fn_ += 1,
            (Label::Abnormal, Label::Normal) => cm.fp += 1,
            (Label::Abnormal, Label::Abnormal) => cm.tn += 1,
        }
    }
    Ok(cm)
}

pub fn compute_metrics(cm: &ConfusionMatrix) -> Result<MetricsReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::Data("empty confusion matrix".into()));
    }
    let precision = Score::ratio(cm.tp, cm.tp + cm.fp);
    let recall = Score::ratio(cm.tp, cm.tp + cm.fn_);
    let f_measure = match (precision, recall) {
        (Score::Defined(p), Score::Defined(r)) if p + r > 0.0 => Score::Defined(2.0 * p * r / (p + r)),
        _ => Score::Undefined,
    };
    Ok(MetricsReport {
        accuracy: Score::ratio(cm.tp + cm.tn, total),
        sensitivity: recall,
        specificity: Score::ratio(cm.tn, cm.tn + cm.fp),
        precision,
        recall,
        f_measure,
    })
}

/// Relative accuracy gain in percent: 100 · (new − base) / base.
pub fn improvement(base_accuracy: f64, new_accuracy: f64) -> Result<f64> {
    if !(base_accuracy > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "base accuracy must be positive, got {base_accuracy}"
        )));
    }
    Ok(100.0 * (new_accuracy - base_accuracy) / base_accuracy)
}
