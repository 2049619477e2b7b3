//! Multi-fidelity inverse design: surrogate-gated metaheuristic search with
//! surrogate-driven bound refinement, for boundary reconstruction of a
//! diffusion field and B-spline airfoil design.

pub mod airfoil;
pub mod dataset;
pub mod diffusion;
pub mod domain;
pub mod error;
pub mod gate;
pub mod harness;
pub mod interp;
pub mod optimizers;
pub mod refine;
pub mod rng;
pub mod surrogate;

pub use domain::{
    budget_tick, derive_target_info, rmse_objective, Bounds, DesignVector, Evaluation,
    EvaluationBudget, HfEvaluator, HfObjective, Objective, PlainObjective, Reduction, TargetSpec,
};
pub use error::{Error, Result};
