//! Bounded population metaheuristics with a per-candidate objective hook.

mod pso;
mod shade;
mod trace;

pub use pso::{pso_run, PsoConfig};
pub use shade::{binomial_crossover, refinement_inner_run, shade_run, ShadeConfig, REFINEMENT_BUDGET};
pub use trace::{read_trace_csv, write_trace_csv, TraceEntry};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::lhs_sample;
use crate::domain::{Bounds, EvaluationBudget, Objective};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    Uniform,
    Lhs,
    /// Explicit starting points; their count must match the population.
    Given(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best_x: Vec<f64>,
    pub best_f: f64,
    pub trace: Vec<TraceEntry>,
    pub budget: EvaluationBudget,
    /// Fitness of the initial population, in evaluation order.
    pub initial_fitness: Vec<f64>,
}

pub(crate) fn initial_population<R: Rng + ?Sized>(
    init: &Init,
    bounds: &Bounds,
    n: usize,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    match init {
        Init::Uniform => Ok((0..n)
            .map(|_| {
                (0..bounds.dim())
                    .map(|d| {
                        let (lo, hi) = (bounds.lower()[d], bounds.upper()[d]);
                        if hi > lo {
                            rng.random_range(lo..=hi)
                        } else {
                            lo
                        }
                    })
                    .collect()
            })
            .collect()),
        Init::Lhs => lhs_sample(bounds, n, rng),
        Init::Given(points) => {
            if points.len() != n || points.iter().any(|p| !bounds.contains(p)) {
                return Err(Error::InvalidConfig(format!(
                    "{} given start points; need {n}, all inside the bounds",
                    points.len()
                )));
            }
            Ok(points.clone())
        }
    }
}

/// Owns the budget and trace; every objective call goes through here.
pub(crate) struct Recorder<'a> {
    objective: &'a mut dyn Objective,
    bounds: &'a Bounds,
    pub budget: EvaluationBudget,
    pub trace: Vec<TraceEntry>,
    pub best_x: Vec<f64>,
    pub best_f: f64,
}

impl<'a> Recorder<'a> {
    pub fn new(objective: &'a mut dyn Objective, bounds: &'a Bounds, budget: EvaluationBudget) -> Self {
        Self { objective, bounds, budget, trace: Vec::new(), best_x: Vec::new(), best_f: f64::INFINITY }
    }

    pub fn exhausted(&self) -> bool {
        self.budget.is_exhausted()
    }

    /// `None` once the budget is spent.
    pub fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.budget.is_exhausted() {
            return None;
        }
        assert!(self.bounds.contains(x), "candidate left the search box");
        let e = self.objective.evaluate(x);
        self.budget.tick(!e.hf).expect("checked above");
        // NaN never becomes the incumbent
        let f = if e.fitness.is_nan() { f64::INFINITY } else { e.fitness };
        if f < self.best_f || self.best_x.is_empty() {
            self.best_f = f;
            self.best_x = x.to_vec();
        }
        self.trace.push(TraceEntry {
            eval_index: self.trace.len() + 1,
            fitness: f,
            hf: e.hf,
            best_so_far: self.best_f,
        });
        Some(f)
    }

    pub fn finish(self, initial_fitness: Vec<f64>) -> RunResult {
        RunResult {
            best_x: self.best_x,
            best_f: self.best_f,
            trace: self.trace,
            budget: self.budget,
            initial_fitness,
        }
    }
}
