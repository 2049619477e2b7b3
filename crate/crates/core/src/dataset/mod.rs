//! Surrogate training data: sampling plans, the randomized boundary
//! generator, low-fidelity labeling and persistence.

mod bcgen;
mod io;
mod lhs;

pub use bcgen::{generate_bc, BcRecipe, BcShape};
pub use io::{meta_path, read_dataset, write_dataset};
pub use lhs::lhs_sample;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{Bounds, HfEvaluator};
use crate::error::{Error, Result};
use crate::rng::{component_rng, derive_seed, stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Problem {
    #[serde(rename = "AID")]
    Aid,
    #[serde(rename = "SFR")]
    Sfr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub problem: Problem,
    pub seed: u64,
    pub requested: usize,
    pub fidelity: String,
    /// Row indices whose evaluation failed.
    pub dropped: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub inputs: Vec<Vec<f64>>,
    pub labels: Vec<f64>,
    pub meta: DatasetMeta,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.inputs.first().map_or(0, Vec::len)
    }

    pub fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            inputs: rows.iter().map(|&r| self.inputs[r].clone()).collect(),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            meta: self.meta.clone(),
        }
    }
}

/// Boundary vectors for the reconstruction problem, one independent stream per row.
pub fn sfr_inputs(n: usize, lf_n: usize, s_top: f64, seed: u64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let mut rng = component_rng(derive_seed(seed, i as u64), stream::BOUNDARY_GENERATOR);
            generate_bc(lf_n, s_top, &mut rng)
        })
        .collect()
}

pub fn aid_inputs(bounds: &Bounds, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    lhs_sample(bounds, n, &mut component_rng(seed, stream::LHS))
}

/// Labels each input with the maximum of the evaluator output. Airfoil
/// evaluators return negated Cp, so the label is minus the minimum Cp.
/// Rows whose evaluation fails are dropped and recorded.
pub fn build_dataset(
    problem: Problem,
    inputs: Vec<Vec<f64>>,
    evaluator: &dyn HfEvaluator,
    seed: u64,
) -> Result<Dataset> {
    if inputs.is_empty() {
        return Err(Error::Empty("dataset inputs"));
    }
    let requested = inputs.len();
    let outcomes: Vec<Option<f64>> = inputs
        .par_iter()
        .map(|x| {
            evaluator
                .evaluate(x)
                .ok()
                .map(|v| v.into_iter().fold(f64::NEG_INFINITY, f64::max))
                .filter(|l| l.is_finite())
        })
        .collect();
    let mut kept_inputs = Vec::with_capacity(requested);
    let mut labels = Vec::with_capacity(requested);
    let mut dropped = Vec::new();
    for (i, (x, label)) in inputs.into_iter().zip(outcomes).enumerate() {
        match label {
            Some(l) => {
                kept_inputs.push(x);
                labels.push(l);
            }
            None => dropped.push(i),
        }
    }
    Ok(Dataset {
        inputs: kept_inputs,
        labels,
        meta: DatasetMeta { problem, seed, requested, fidelity: "LF".into(), dropped },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::{field_max, solve, DiffusionConfig, FieldEvaluator, Grid};

    #[test]
    fn sfr_labels_are_lf_field_maxima() {
        let inputs = sfr_inputs(10, 20, 30.0, 3);
        let ds = build_dataset(Problem::Sfr, inputs.clone(), &FieldEvaluator::lf(), 3).unwrap();
        assert_eq!(ds.len(), 10);
        for (x, l) in inputs.iter().zip(&ds.labels) {
            let f = solve(&Grid::lf(), x, &DiffusionConfig::default()).unwrap();
            assert_eq!(*l, field_max(&f));
        }
    }

    struct Flaky;
    impl HfEvaluator for Flaky {
        fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
            if x[0] < 0.5 {
                Err(Error::Evaluator("refused".into()))
            } else {
                Ok(vec![x[0], 2.0 * x[0]])
            }
        }
    }

    #[test]
    fn failed_rows_are_dropped_and_logged() {
        let inputs = vec![vec![0.1], vec![0.7], vec![0.2], vec![0.9]];
        let ds = build_dataset(Problem::Aid, inputs, &Flaky, 0).unwrap();
        assert_eq!(ds.labels, vec![1.4, 1.8]);
        assert_eq!(ds.meta.dropped, vec![0, 2]);
        assert_eq!(ds.meta.requested, 4);
    }

    #[test]
    fn sfr_inputs_are_reproducible() {
        assert_eq!(sfr_inputs(5, 20, 30.0, 9), sfr_inputs(5, 20, 30.0, 9));
        assert_ne!(sfr_inputs(5, 20, 30.0, 9), sfr_inputs(5, 20, 30.0, 10));
    }
}
