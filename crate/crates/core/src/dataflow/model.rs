use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{read_f32_matrix, F32Matrix};

use super::matrix::Matrix;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Relu,
    Identity,
}

impl Activation {
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Activation::Relu => v.max(0.0),
            Activation::Identity => v,
        }
    }
}

/// Feature-extraction MLP: layer `x` maps `α(x)` inputs to `α(x+1)` outputs
/// and every layer is followed by the activation.
#[derive(Clone, Debug, PartialEq)]
pub struct GnnModel {
    weights: Vec<Matrix>,
    activation: Activation,
}

impl GnnModel {
    pub fn new(weights: Vec<Matrix>, activation: Activation) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Shape("model needs at least one layer".into()));
        }
        for (x, w) in weights.iter().enumerate() {
            if w.rows == 0 || w.cols == 0 {
                return Err(Error::Shape(format!("layer {} has an empty dimension", x + 1)));
            }
        }
        for (x, pair) in weights.windows(2).enumerate() {
            if pair[0].cols != pair[1].rows {
                return Err(Error::Shape(format!(
                    "layer {} outputs {} but layer {} takes {}",
                    x + 1,
                    pair[0].cols,
                    x + 2,
                    pair[1].rows
                )));
            }
        }
        Ok(Self { weights, activation })
    }

    /// Seeded weights uniform in `±1/sqrt(fan_in)`.
    pub fn random(widths: &[usize], activation: Activation, seed: u64) -> Result<Self> {
        if widths.len() < 2 {
            return Err(Error::Shape("need at least input and output widths".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights = widths
            .windows(2)
            .map(|w| {
                let bound = 1.0 / (w[0] as f64).sqrt();
                Matrix::from_fn(w[0], w[1], |_, _| rng.random_range(-bound..bound))
            })
            .collect();
        Self::new(weights, activation)
    }

    pub fn from_matrices(mats: Vec<F32Matrix>, activation: Activation) -> Result<Self> {
        let weights = mats
            .into_iter()
            .map(|m| Matrix::from_vec(m.rows, m.cols, m.data.into_iter().map(f64::from).collect()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(weights, activation)
    }

    /// Loads one flat-binary weight matrix per layer.
    pub fn load<P: AsRef<Path>>(paths: &[P], activation: Activation) -> Result<Self> {
        let mats = paths
            .iter()
            .map(|p| read_f32_matrix(BufReader::new(File::open(p)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_matrices(mats, activation)
    }

    /// Number of layers, X.
    pub fn layers(&self) -> usize {
        self.weights.len()
    }

    /// `α(1) .. α(X+1)`.
    pub fn widths(&self) -> Vec<usize> {
        let mut w = vec![self.weights[0].rows];
        w.extend(self.weights.iter().map(|m| m.cols));
        w
    }

    pub fn weights(&self) -> &[Matrix] {
        &self.weights
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    /// Dense `f64` forward pass, used as a reference.
    pub fn forward_dense(&self, z: &[f64]) -> Result<Vec<f64>> {
        let mut h = z.to_vec();
        for w in &self.weights {
            h = w.left_mul(&h)?;
            h.iter_mut().for_each(|v| *v = self.activation.apply(*v));
        }
        Ok(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths_chain() {
        let m = GnnModel::random(&[8, 4, 2], Activation::Relu, 0).unwrap();
        assert_eq!(m.widths(), vec![8, 4, 2]);
        assert_eq!(m.layers(), 2);
    }

    #[test]
    fn mismatched_layers_rejected() {
        let err = GnnModel::new(vec![Matrix::zeros(3, 4), Matrix::zeros(5, 2)], Activation::Relu);
        assert!(matches!(err, Err(Error::Shape(_))));
        assert!(GnnModel::new(vec![], Activation::Relu).is_err());
    }

    #[test]
    fn loads_binary_layers() {
        use crate::graph::write_f32_matrix;
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w1.bin");
        let m = F32Matrix { rows: 2, cols: 1, data: vec![0.5, -1.0] };
        write_f32_matrix(File::create(&p).unwrap(), &m).unwrap();
        let model = GnnModel::load(&[&p], Activation::Identity).unwrap();
        assert_eq!(model.forward_dense(&[2.0, 1.0]).unwrap(), vec![0.0]);
    }
}
