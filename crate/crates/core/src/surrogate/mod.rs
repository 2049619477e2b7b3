//! Multilayer perceptron surrogate: training with early stopping, k-fold
//! error estimate and frozen deterministic inference.

mod network;
mod train;

pub use network::Activation;
pub use train::{fit_surrogate, gradient_check, kfold_rmse, train, TrainReport};

use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use network::{Dense, Net};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub hidden: Vec<usize>,
    pub activation: Activation,
    /// One rate per hidden layer, applied to its output during training only.
    pub dropout: Vec<f64>,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub validation_fraction: f64,
    pub patience: usize,
}

impl MlpConfig {
    pub fn sfr() -> Self {
        Self {
            hidden: vec![388, 322],
            activation: Activation::Relu,
            dropout: vec![0.1, 0.0],
            epochs: 500,
            batch_size: 64,
            learning_rate: 6e-4,
            validation_fraction: 0.3,
            patience: 20,
        }
    }

    pub fn aid() -> Self {
        Self {
            hidden: vec![92, 116, 34],
            activation: Activation::LeakyRelu,
            dropout: vec![0.1, 0.1, 0.0],
            epochs: 100,
            batch_size: 128,
            learning_rate: 8.3e-4,
            validation_fraction: 0.3,
            patience: 20,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return bad("hidden layer widths must be >= 1");
        }
        if self.dropout.len() != self.hidden.len() {
            return bad("one dropout rate per hidden layer expected");
        }
        if self.dropout.iter().any(|r| !(0.0..1.0).contains(r)) {
            return bad("dropout rates must lie in [0, 1)");
        }
        if self.batch_size == 0 || !(self.learning_rate > 0.0) {
            return bad("batch size and learning rate must be positive");
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return bad("validation fraction must lie in [0, 1)");
        }
        Ok(())
    }
}

/// Anything that maps a design to a scalar summary with a known error scale.
pub trait Surrogate: Sync {
    fn input_dim(&self) -> usize;
    fn predict(&self, x: &[f64]) -> Result<f64>;
    /// Cross-validated RMSE in label units.
    fn cv_rmse(&self) -> f64;
}

impl Surrogate for SurrogateModel {
    fn input_dim(&self) -> usize {
        SurrogateModel::input_dim(self)
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        SurrogateModel::predict(self, x)
    }

    fn cv_rmse(&self) -> f64 {
        self.cv_rmse
    }
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Trained network plus the standardization it was trained under.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateModel {
    pub(crate) net: Net,
    pub activation: Activation,
    pub input_mean: Vec<f64>,
    pub input_std: Vec<f64>,
    pub label_mean: f64,
    pub label_std: f64,
    /// Mean k-fold RMSE in label units; sets the gate threshold.
    pub cv_rmse: f64,
}

impl SurrogateModel {
    pub fn input_dim(&self) -> usize {
        self.input_mean.len()
    }

    pub fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.input_mean.iter().zip(&self.input_std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        check_len(self.input_dim(), x.len())?;
        let z = Array2::from_shape_vec((1, x.len()), self.standardize(x)).expect("shape");
        Ok(self.net.infer(z.view(), self.activation)[[0, 0]] * self.label_std + self.label_mean)
    }

    pub fn predict_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        if xs.is_empty() {
            return Ok(Vec::new());
        }
        let m = self.input_dim();
        let mut flat = Vec::with_capacity(xs.len() * m);
        for x in xs {
            check_len(m, x.len())?;
            flat.extend(self.standardize(x));
        }
        let z = Array2::from_shape_vec((xs.len(), m), flat).expect("shape");
        let out = self.net.infer(z.view(), self.activation);
        Ok(out.column(0).iter().map(|v| v * self.label_std + self.label_mean).collect())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ModelFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<ModelFile>(text)?.try_into()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingArtifact(path.display().to_string()));
        }
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Serialize, Deserialize)]
struct LayerFile {
    inputs: usize,
    outputs: usize,
    /// Row-major `inputs x outputs`.
    weights: Vec<f64>,
    bias: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    activation: Activation,
    input_mean: Vec<f64>,
    input_std: Vec<f64>,
    label_mean: f64,
    label_std: f64,
    cv_rmse: f64,
    layers: Vec<LayerFile>,
}

impl From<&SurrogateModel> for ModelFile {
    fn from(m: &SurrogateModel) -> Self {
        ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            activation: m.activation,
            input_mean: m.input_mean.clone(),
            input_std: m.input_std.clone(),
            label_mean: m.label_mean,
            label_std: m.label_std,
            cv_rmse: m.cv_rmse,
            layers: m
                .net
                .layers
                .iter()
                .map(|l| LayerFile {
                    inputs: l.w.nrows(),
                    outputs: l.w.ncols(),
                    weights: l.w.iter().copied().collect(),
                    bias: l.b.to_vec(),
                })
                .collect(),
        }
    }
}

impl TryFrom<ModelFile> for SurrogateModel {
    type Error = Error;

    fn try_from(f: ModelFile) -> Result<Self> {
        if f.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::InvalidConfig(format!("unsupported model format {}", f.format_version)));
        }
        check_len(f.input_mean.len(), f.input_std.len())?;
        let mut layers = Vec::with_capacity(f.layers.len());
        let mut width = f.input_mean.len();
        for l in f.layers {
            check_len(width, l.inputs)?;
            check_len(l.outputs, l.bias.len())?;
            let w = Array2::from_shape_vec((l.inputs, l.outputs), l.weights)
                .map_err(|e| Error::InvalidConfig(format!("layer shape: {e}")))?;
            layers.push(Dense { w, b: Array1::from(l.bias) });
            width = l.outputs;
        }
        if width != 1 || layers.is_empty() {
            return Err(Error::InvalidConfig("network must end in a single output".into()));
        }
        Ok(SurrogateModel {
            net: Net { layers },
            activation: f.activation,
            input_mean: f.input_mean,
            input_std: f.input_std,
            label_mean: f.label_mean,
            label_std: f.label_std,
            cv_rmse: f.cv_rmse,
        })
    }
}
