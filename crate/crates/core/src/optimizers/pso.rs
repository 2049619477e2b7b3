use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{initial_population, Init, Recorder, RunResult};
use crate::domain::{Bounds, EvaluationBudget, Objective};
use crate::error::{Error, Result};
use crate::rng::{component_rng, stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsoConfig {
    pub swarm: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Velocity limit as a fraction of each dimension's range.
    pub velocity_clamp: f64,
    pub init: Init,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self { swarm: 10, inertia: 0.8, cognitive: 1.0, social: 1.0, velocity_clamp: 0.5, init: Init::Uniform }
    }
}

/// Global-best PSO. Velocities start at zero; the global best is refreshed
/// once per sweep over the swarm. A coordinate leaving the box is clamped
/// and its velocity component zeroed.
pub fn pso_run(
    objective: &mut dyn Objective,
    bounds: &Bounds,
    cfg: &PsoConfig,
    budget: EvaluationBudget,
    seed: u64,
) -> Result<RunResult> {
    if cfg.swarm < 2 || cfg.inertia < 0.0 || cfg.cognitive < 0.0 || cfg.social < 0.0 {
        return Err(Error::InvalidConfig("swarm >= 2 and non-negative coefficients required".into()));
    }
    if budget.remaining() < cfg.swarm {
        return Err(Error::InvalidConfig("budget smaller than the swarm".into()));
    }
    let mut rng = component_rng(seed, stream::OPTIMIZER);
    let dim = bounds.dim();
    let vmax: Vec<f64> = (0..dim).map(|d| cfg.velocity_clamp * bounds.width(d)).collect();
    let mut x = initial_population(&cfg.init, bounds, cfg.swarm, &mut rng)?;
    let mut v = vec![vec![0.0; dim]; cfg.swarm];
    let mut rec = Recorder::new(objective, bounds, budget);

    let mut pbest = x.clone();
    let mut pbest_f = Vec::with_capacity(cfg.swarm);
    for p in &x {
        pbest_f.push(rec.eval(p).expect("budget covers the swarm"));
    }
    let initial = pbest_f.clone();
    let best_index = |f: &[f64]| (0..f.len()).fold(0, |b, i| if f[i] < f[b] { i } else { b });
    let mut g = best_index(&pbest_f);
    let mut gbest = pbest[g].clone();

    'outer: loop {
        for i in 0..cfg.swarm {
            for d in 0..dim {
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                let vel = cfg.inertia * v[i][d]
                    + cfg.cognitive * r1 * (pbest[i][d] - x[i][d])
                    + cfg.social * r2 * (gbest[d] - x[i][d]);
                v[i][d] = vel.clamp(-vmax[d], vmax[d]);
                let pos = x[i][d] + v[i][d];
                let clamped = bounds.clamp(d, pos);
                if clamped != pos {
                    v[i][d] = 0.0;
                }
                x[i][d] = clamped;
            }
            let Some(f) = rec.eval(&x[i]) else { break 'outer };
            if f < pbest_f[i] {
                pbest_f[i] = f;
                pbest[i].clone_from(&x[i]);
            }
        }
        g = best_index(&pbest_f);
        gbest.clone_from(&pbest[g]);
        if rec.exhausted() {
            break;
        }
    }
    Ok(rec.finish(initial))
}
