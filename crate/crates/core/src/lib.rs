//! Point-anomaly detection for multivariate time series.
//!
//! Each time point's variable vector is reduced to a discrete observed
//! symbol (fuzzy c-means cluster, binned Sugeno or Choquet integral, or a
//! binned PCA/mean baseline). A two-state HMM (normal/abnormal) estimated
//! from labeled training data then labels every point by Viterbi decoding.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod discretize;
pub mod error;
pub mod fcm;
pub mod fuzzy_integral;
pub mod hmm;
pub mod metrics;
pub mod pipeline;
pub mod preprocess;
pub mod synth;

pub use error::{Error, Result};
pub use preprocess::{Label, LabelSequence, MultivariateSeries};
