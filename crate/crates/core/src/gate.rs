//! Surrogate screening in front of the high-fidelity evaluator.

use serde::{Deserialize, Serialize};

use crate::diffusion::downsample_bc;
use crate::domain::{rmse_objective, Evaluation, EvaluationBudget, HfEvaluator, Objective, TargetSpec};
use crate::error::{Error, Result};
use crate::surrogate::Surrogate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputAdapter {
    Identity,
    /// 80 boundary values to the surrogate's 20.
    Downsample80To20,
}

pub fn adapt_input(x: &[f64], adapter: InputAdapter) -> Result<Vec<f64>> {
    match adapter {
        InputAdapter::Identity => Ok(x.to_vec()),
        InputAdapter::Downsample80To20 => downsample_bc(x),
    }
}

pub const DEFAULT_LAMBDA: f64 = 2.0;

pub fn penalty(delta: f64, lambda: f64) -> f64 {
    lambda * delta.exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GatePath {
    Hf,
    Penalized,
    /// The simulation was attempted and failed; scored as a penalty at Δ = ω.
    HfFailed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GatedResult {
    pub fitness: f64,
    pub path: GatePath,
    pub delta: f64,
    pub m_info: f64,
}

impl GatedResult {
    pub fn gated(&self) -> bool {
        self.path != GatePath::Hf
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateConfig {
    pub c: f64,
    pub lambda: f64,
    pub adapter: InputAdapter,
}

impl GateConfig {
    pub fn new(c: f64, lambda: f64, adapter: InputAdapter) -> Result<Self> {
        if !(c > 0.0) || !(lambda > 0.0) {
            return Err(Error::InvalidConfig(format!("c and lambda must be positive (c={c}, lambda={lambda})")));
        }
        Ok(Self { c, lambda, adapter })
    }

    /// Threshold `c * cv_rmse`, fixed for the whole run.
    pub fn omega(&self, model: &dyn Surrogate) -> Result<f64> {
        let w = self.c * model.cv_rmse();
        if w > 0.0 {
            Ok(w)
        } else {
            Err(Error::InvalidConfig(format!("gate threshold must be positive, got {w}")))
        }
    }
}

/// Screen, then either penalize or simulate. Ties `Δ = ω` are simulated.
pub fn decide(
    x: &[f64],
    cfg: &GateConfig,
    model: &dyn Surrogate,
    target: &TargetSpec,
    hf: &dyn HfEvaluator,
) -> Result<GatedResult> {
    let omega = cfg.omega(model)?;
    let m_info = model.predict(&adapt_input(x, cfg.adapter)?)?;
    let delta = (m_info - target.info).abs();
    if delta > omega {
        return Ok(GatedResult { fitness: penalty(delta, cfg.lambda), path: GatePath::Penalized, delta, m_info });
    }
    match hf.evaluate(x).and_then(|p| rmse_objective(&p, &target.values)) {
        Ok(fitness) => Ok(GatedResult { fitness, path: GatePath::Hf, delta, m_info }),
        Err(_) => Ok(GatedResult {
            fitness: penalty(omega, cfg.lambda),
            path: GatePath::HfFailed,
            delta: omega,
            m_info,
        }),
    }
}

/// [`decide`] plus the budget tick.
pub fn gated_objective(
    x: &[f64],
    cfg: &GateConfig,
    model: &dyn Surrogate,
    target: &TargetSpec,
    hf: &dyn HfEvaluator,
    budget: &mut EvaluationBudget,
) -> Result<GatedResult> {
    if budget.is_exhausted() {
        return Err(Error::BudgetExhausted(budget.consumed));
    }
    let r = decide(x, cfg, model, target, hf)?;
    budget.tick(r.gated())?;
    Ok(r)
}

/// Objective hook for the optimizers; keeps every decision for reporting.
pub struct GatedObjective<'a> {
    pub cfg: GateConfig,
    pub model: &'a dyn Surrogate,
    pub target: &'a TargetSpec,
    pub hf: &'a dyn HfEvaluator,
    pub log: Vec<GatedResult>,
}

impl<'a> GatedObjective<'a> {
    pub fn new(
        cfg: GateConfig,
        model: &'a dyn Surrogate,
        target: &'a TargetSpec,
        hf: &'a dyn HfEvaluator,
    ) -> Result<Self> {
        cfg.omega(model)?;
        if model.input_dim() == 0 {
            return Err(Error::InvalidConfig("surrogate has no inputs".into()));
        }
        Ok(Self { cfg, model, target, hf, log: Vec::new() })
    }
}

impl Objective for GatedObjective<'_> {
    fn evaluate(&mut self, x: &[f64]) -> Evaluation {
        // input-shape errors are configuration bugs caught in `new` and tests
        let r = decide(x, &self.cfg, self.model, self.target, self.hf).expect("gate decision");
        self.log.push(r);
        Evaluation { fitness: r.fitness, hf: !r.gated() }
    }
}
