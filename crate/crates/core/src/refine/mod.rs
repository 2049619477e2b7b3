//! Bound refinement from surrogate-only searches.

mod aid;
mod sfr;

pub use aid::aid_refine;
pub use sfr::{fit_polynomial, sfr_refine, DEFAULT_DEGREES};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{Bounds, PlainObjective};
use crate::error::{Error, Result};
use crate::optimizers::refinement_inner_run;
use crate::rng::derive_seed;
use crate::surrogate::Surrogate;

/// One optimized design per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionMatrix {
    pub rows: Vec<Vec<f64>>,
}

impl SolutionMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::Empty("solution matrix"));
        };
        let m = first.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != m) {
            return Err(Error::LengthMismatch { expected: m, actual: bad.len() });
        }
        Ok(Self { rows })
    }

    pub fn column_means(&self) -> Vec<f64> {
        let n = self.rows.len() as f64;
        let m = self.rows[0].len();
        (0..m).map(|j| self.rows.iter().map(|r| r[j]).sum::<f64>() / n).collect()
    }
}

/// `n` independent searches for `argmin |M(x) - T_info|` inside `bounds`.
/// Only the surrogate is queried.
pub fn collect_solutions(
    model: &dyn Surrogate,
    target_info: f64,
    bounds: &Bounds,
    n: usize,
    seed: u64,
) -> Result<SolutionMatrix> {
    if n == 0 {
        return Err(Error::Empty("refinement runs"));
    }
    crate::error::check_len(model.input_dim(), bounds.dim())?;
    let rows = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut objective = PlainObjective(|x: &[f64]| match model.predict(x) {
                Ok(m) => (m - target_info).abs(),
                Err(_) => f64::INFINITY,
            });
            refinement_inner_run(&mut objective, bounds, derive_seed(seed, i as u64)).map(|r| r.best_x)
        })
        .collect::<Result<Vec<_>>>()?;
    SolutionMatrix::new(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum Strategy {
    ColumnAverage { eta: f64 },
    PolynomialEnvelope { degrees: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinedBounds {
    pub bounds: Bounds,
    pub strategy: Strategy,
    pub n_solutions: usize,
    /// 1 - (total refined width / total original width).
    pub pruning_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    #[serde(flatten)]
    pub strategy: Strategy,
    #[serde(rename = "N")]
    pub n: usize,
    pub lb_r: Vec<f64>,
    pub ub_r: Vec<f64>,
    pub pruning_fraction: f64,
}

impl RefinedBounds {
    pub fn report(&self) -> RefinementReport {
        RefinementReport {
            strategy: self.strategy.clone(),
            n: self.n_solutions,
            lb_r: self.bounds.lower().to_vec(),
            ub_r: self.bounds.upper().to_vec(),
            pruning_fraction: self.pruning_fraction,
        }
    }
}

impl RefinementReport {
    pub fn bounds(&self) -> Result<Bounds> {
        Bounds::new(self.lb_r.clone(), self.ub_r.clone())
    }
}

pub(crate) fn pruning(refined: &Bounds, original: &Bounds) -> f64 {
    let total = original.total_width();
    if total > 0.0 {
        1.0 - refined.total_width() / total
    } else {
        0.0
    }
}

/// Spread of solution profiles over growing prefixes of the run list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub runs: usize,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// Average of `mean` over all profile points.
    pub overall_mean: f64,
}

/// For each size `k`, pointwise mean and population std of the first `k` profiles.
pub fn convergence_summary(profiles: &[Vec<f64>], sizes: &[usize]) -> Result<Vec<ConvergenceRow>> {
    let m = profiles.first().map(Vec::len).ok_or(Error::Empty("profiles"))?;
    sizes
        .iter()
        .map(|&k| {
            if k == 0 || k > profiles.len() {
                return Err(Error::InvalidConfig(format!("subset of {k} runs from {}", profiles.len())));
            }
            let sub = &profiles[..k];
            let mean: Vec<f64> = (0..m).map(|j| sub.iter().map(|p| p[j]).sum::<f64>() / k as f64).collect();
            let std = (0..m)
                .map(|j| (sub.iter().map(|p| (p[j] - mean[j]).powi(2)).sum::<f64>() / k as f64).sqrt())
                .collect();
            let overall_mean = mean.iter().sum::<f64>() / m as f64;
            Ok(ConvergenceRow { runs: k, mean, std, overall_mean })
        })
        .collect()
}
