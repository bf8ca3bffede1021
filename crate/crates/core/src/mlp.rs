//! Small feedforward regressor: one ReLU hidden layer, scalar output,
//! trained with minibatch SGD (momentum) on squared error.
//!
//! The model stores its feature normalization statistics, so callers always
//! pass raw feature vectors. Predictions are clamped to `[0, 1]`; training
//! happens on the unclamped output so gradients do not die at the rails.
//!
//! The on-disk format is versioned JSON so other implementations can load
//! the weights:
//!
//! ```json
//! {
//!   "format": "mlp-regression",
//!   "version": 1,
//!   "input_dim": 16,
//!   "hidden": 150,
//!   "feat_mean": [...], "feat_std": [...],
//!   "w1": [[row 0], [row 1], ...],   // hidden x input_dim
//!   "b1": [...],                     // hidden
//!   "w2": [...],                     // hidden
//!   "b2": 0.0
//! }
//! ```

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::alarms::FeatureSet;
use crate::error::{Error, Result};
use crate::rng::{substream, Domain};

const FORMAT_NAME: &str = "mlp-regression";
const FORMAT_VERSION: u32 = 1;

/// Feedforward network with one hidden layer and clamped scalar output.
#[derive(Debug, Clone)]
pub struct RegressionModel {
    w1: DMatrix<f64>, // hidden x input
    b1: DVector<f64>,
    w2: DVector<f64>,
    b2: f64,
    feat_mean: DVector<f64>,
    feat_std: DVector<f64>,
    features: FeatureSet,
}

impl RegressionModel {
    /// Assemble a model from raw parts, validating shapes and finiteness.
    pub fn from_parts(
        w1: DMatrix<f64>,
        b1: DVector<f64>,
        w2: DVector<f64>,
        b2: f64,
        feat_mean: DVector<f64>,
        feat_std: DVector<f64>,
    ) -> Result<Self> {
        let hidden = w1.nrows();
        let input = w1.ncols();
        if b1.len() != hidden || w2.len() != hidden {
            return Err(Error::DimensionMismatch {
                expected: hidden,
                actual: b1.len().min(w2.len()),
            });
        }
        if feat_mean.len() != input || feat_std.len() != input {
            return Err(Error::DimensionMismatch {
                expected: input,
                actual: feat_mean.len(),
            });
        }
        let finite = w1.iter().all(|v| v.is_finite())
            && b1.iter().all(|v| v.is_finite())
            && w2.iter().all(|v| v.is_finite())
            && b2.is_finite()
            && feat_mean.iter().all(|v| v.is_finite())
            && feat_std.iter().all(|v| v.is_finite() && *v > 0.0);
        if !finite {
            return Err(Error::ModelFormat("non-finite or non-positive entries".into()));
        }
        Ok(RegressionModel {
            w1,
            b1,
            w2,
            b2,
            feat_mean,
            feat_std,
            features: FeatureSet::Raw,
        })
    }

    /// Tag the model with the feature set it was trained on; the
    /// regression alarm extracts matching inputs at query time.
    pub fn with_feature_set(mut self, features: FeatureSet) -> Self {
        self.features = features;
        self
    }

    pub fn feature_set(&self) -> FeatureSet {
        self.features
    }

    pub fn input_dim(&self) -> usize {
        self.w1.ncols()
    }

    pub fn hidden_width(&self) -> usize {
        self.w1.nrows()
    }

    fn raw_output(&self, features: &DVector<f64>) -> f64 {
        let normed = (features - &self.feat_mean).component_div(&self.feat_std);
        let mut h = &self.w1 * normed + &self.b1;
        h.apply(|v| *v = v.max(0.0));
        self.w2.dot(&h) + self.b2
    }

    /// Predicted collision probability, clamped to `[0, 1]`.
    pub fn predict(&self, features: &DVector<f64>) -> f64 {
        self.raw_output(features).clamp(0.0, 1.0)
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let file = ModelFile::from(self);
        let json = serde_json::to_string_pretty(&file)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: ModelFile = serde_json::from_str(&text)?;
        file.into_model()
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    #[serde(default)]
    features: FeatureSet,
    input_dim: usize,
    hidden: usize,
    feat_mean: Vec<f64>,
    feat_std: Vec<f64>,
    w1: Vec<Vec<f64>>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: f64,
}

impl From<&RegressionModel> for ModelFile {
    fn from(m: &RegressionModel) -> Self {
        ModelFile {
            format: FORMAT_NAME.into(),
            version: FORMAT_VERSION,
            features: m.features,
            input_dim: m.input_dim(),
            hidden: m.hidden_width(),
            feat_mean: m.feat_mean.iter().copied().collect(),
            feat_std: m.feat_std.iter().copied().collect(),
            w1: m
                .w1
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect(),
            b1: m.b1.iter().copied().collect(),
            w2: m.w2.iter().copied().collect(),
            b2: m.b2,
        }
    }
}

impl ModelFile {
    fn into_model(self) -> Result<RegressionModel> {
        if self.format != FORMAT_NAME {
            return Err(Error::ModelFormat(format!(
                "unexpected format {:?}",
                self.format
            )));
        }
        if self.version != FORMAT_VERSION {
            return Err(Error::ModelFormat(format!(
                "unsupported version {}",
                self.version
            )));
        }
        if self.w1.len() != self.hidden || self.w1.iter().any(|r| r.len() != self.input_dim) {
            return Err(Error::ModelFormat("w1 shape mismatch".into()));
        }
        let w1 = DMatrix::from_row_iterator(
            self.hidden,
            self.input_dim,
            self.w1.into_iter().flatten(),
        );
        Ok(RegressionModel::from_parts(
            w1,
            DVector::from_vec(self.b1),
            DVector::from_vec(self.w2),
            self.b2,
            DVector::from_vec(self.feat_mean),
            DVector::from_vec(self.feat_std),
        )?
        .with_feature_set(self.features))
    }
}

/// SGD hyperparameters. Width aside, these are implementation defaults, not
/// quantities the alarm theory depends on.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Stop after this many epochs without the training RMSE improving by
    /// more than `min_improvement`.
    pub patience: usize,
    pub min_improvement: f64,
    pub momentum: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-3,
            batch_size: 256,
            max_epochs: 200,
            patience: 10,
            min_improvement: 1e-4,
            momentum: 0.9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitStats {
    pub epochs: usize,
    pub train_rmse: f64,
}

/// Fit a width-`hidden` network to `(features, labels)` by minibatch SGD on
/// squared error. Deterministic given `seed`.
pub fn fit(
    features: &[DVector<f64>],
    labels: &[f64],
    hidden: usize,
    cfg: &TrainConfig,
    seed: u64,
) -> Result<(RegressionModel, FitStats)> {
    let n = features.len();
    if n == 0 || labels.len() != n {
        return Err(Error::BadTrainingSet(format!(
            "{} feature rows vs {} labels",
            n,
            labels.len()
        )));
    }
    if hidden == 0 {
        return Err(Error::BadTrainingSet("zero hidden width".into()));
    }
    let d = features[0].len();
    if features.iter().any(|f| f.len() != d) {
        return Err(Error::BadTrainingSet("inconsistent feature dims".into()));
    }

    // Normalization statistics; constant features get unit std.
    let mut mean = DVector::zeros(d);
    for f in features {
        mean += f;
    }
    mean /= n as f64;
    let mut var = DVector::zeros(d);
    for f in features {
        let dlt = f - &mean;
        var += dlt.component_mul(&dlt);
    }
    var /= n as f64;
    let std = var.map(|v| if v > 1e-18 { v.sqrt() } else { 1.0 });

    let normed: Vec<DVector<f64>> = features
        .iter()
        .map(|f| (f - &mean).component_div(&std))
        .collect();

    // He initialization for the ReLU layer; output starts at the label mean.
    let mut init_rng = substream(seed, Domain::NetworkInit, 0);
    let w1_scale = (2.0 / d as f64).sqrt();
    let mut w1 = DMatrix::from_fn(hidden, d, |_, _| {
        init_rng.sample::<f64, _>(StandardNormal) * w1_scale
    });
    let mut b1 = DVector::zeros(hidden);
    let w2_scale = (1.0 / hidden as f64).sqrt();
    let mut w2 =
        DVector::from_fn(hidden, |_, _| init_rng.sample::<f64, _>(StandardNormal) * w2_scale);
    let mut b2 = labels.iter().sum::<f64>() / n as f64;

    let mut vel_w1 = DMatrix::zeros(hidden, d);
    let mut vel_b1 = DVector::zeros(hidden);
    let mut vel_w2 = DVector::zeros(hidden);
    let mut vel_b2 = 0.0;

    let batch = cfg.batch_size.max(1).min(n);
    let mut order: Vec<usize> = (0..n).collect();
    let mut best_rmse = f64::INFINITY;
    let mut stale = 0usize;
    let mut epochs_run = 0usize;
    let mut last_rmse = f64::INFINITY;

    for epoch in 0..cfg.max_epochs {
        epochs_run = epoch + 1;
        let mut shuffle_rng = substream(seed, Domain::Shuffle, epoch as u64);
        // Fisher-Yates.
        for i in (1..n).rev() {
            let j = shuffle_rng.random_range(0..=i);
            order.swap(i, j);
        }

        let mut sq_sum = 0.0;
        for chunk in order.chunks(batch) {
            let b = chunk.len();
            let mut x = DMatrix::zeros(d, b);
            let mut y = DVector::zeros(b);
            for (c, &idx) in chunk.iter().enumerate() {
                x.set_column(c, &normed[idx]);
                y[c] = labels[idx];
            }
            let mut h = &w1 * &x; // hidden x b
            for mut col in h.column_iter_mut() {
                col += &b1;
            }
            let mask = h.map(|v| if v > 0.0 { 1.0 } else { 0.0 });
            h.apply(|v| *v = v.max(0.0));
            let pred = h.transpose() * &w2 + DVector::from_element(b, b2);
            let err = pred - y; // b
            sq_sum += err.dot(&err);

            let scale = 1.0 / b as f64;
            let g_w2 = &h * &err * scale;
            let g_b2 = err.sum() * scale;
            // Backprop through ReLU.
            let dh = (&w2 * err.transpose()).component_mul(&mask); // hidden x b
            let g_w1 = &dh * x.transpose() * scale;
            let g_b1 = dh.column_sum() * scale;

            vel_w1 = vel_w1 * cfg.momentum - g_w1 * cfg.learning_rate;
            vel_b1 = vel_b1 * cfg.momentum - g_b1 * cfg.learning_rate;
            vel_w2 = vel_w2 * cfg.momentum - g_w2 * cfg.learning_rate;
            vel_b2 = vel_b2 * cfg.momentum - g_b2 * cfg.learning_rate;
            w1 += &vel_w1;
            b1 += &vel_b1;
            w2 += &vel_w2;
            b2 += vel_b2;
        }

        let rmse = (sq_sum / n as f64).sqrt();
        if !rmse.is_finite() {
            return Err(Error::DivergentTraining(epoch));
        }
        last_rmse = rmse;
        if rmse + cfg.min_improvement < best_rmse {
            best_rmse = rmse;
            stale = 0;
        } else {
            stale += 1;
            if stale >= cfg.patience {
                break;
            }
        }
    }

    let model = RegressionModel::from_parts(w1, b1, w2, b2, mean, std)?;
    Ok((
        model,
        FitStats {
            epochs: epochs_run,
            train_rmse: last_rmse,
        },
    ))
}
