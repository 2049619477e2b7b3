use rand::Rng;
use rand_distr::{Cauchy, Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{initial_population, Init, Recorder, RunResult};
use crate::domain::{Bounds, EvaluationBudget, Objective};
use crate::error::{Error, Result};
use crate::rng::{component_rng, stream};

/// Evaluations per surrogate-only refinement search.
pub const REFINEMENT_BUDGET: usize = 800;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadeConfig {
    pub population: usize,
    /// Archive capacity as a multiple of the population.
    pub archive_factor: f64,
    pub memory: usize,
    /// Fraction of the population eligible as the p-best donor.
    pub p_best: f64,
    pub init: Init,
}

impl Default for ShadeConfig {
    fn default() -> Self {
        Self { population: 10, archive_factor: 2.6, memory: 4, p_best: 0.11, init: Init::Uniform }
    }
}

/// Trial vector: mutant components where a uniform draw falls below `cr`,
/// and always at `j_rand`.
pub fn binomial_crossover<R: Rng + ?Sized>(
    target: &[f64],
    mutant: &[f64],
    cr: f64,
    j_rand: usize,
    rng: &mut R,
) -> Vec<f64> {
    (0..target.len())
        .map(|j| if j == j_rand || rng.random::<f64>() < cr { mutant[j] } else { target[j] })
        .collect()
}

/// Weighted Lehmer mean sum(w s^2) / sum(w s); `None` when undefined.
fn lehmer(values: &[f64], weights: &[f64]) -> Option<f64> {
    let num: f64 = values.iter().zip(weights).map(|(s, w)| w * s * s).sum();
    let den: f64 = values.iter().zip(weights).map(|(s, w)| w * s).sum();
    (den > 0.0).then(|| num / den)
}

fn pick_excluding<R: Rng + ?Sized>(rng: &mut R, n: usize, excluded: &[usize]) -> usize {
    loop {
        let k = rng.random_range(0..n);
        if !excluded.contains(&k) {
            return k;
        }
    }
}

/// SHADE: current-to-pbest/1 with an external archive, binomial crossover,
/// success-history adaptation of F and CR. Infeasible mutant components are
/// moved halfway between the parent and the violated bound.
pub fn shade_run(
    objective: &mut dyn Objective,
    bounds: &Bounds,
    cfg: &ShadeConfig,
    budget: EvaluationBudget,
    seed: u64,
) -> Result<RunResult> {
    let np = cfg.population;
    if np < 4 || cfg.memory < 1 || !(cfg.p_best > 0.0) {
        return Err(Error::InvalidConfig("population >= 4, memory >= 1 and p > 0 required".into()));
    }
    if budget.remaining() < np {
        return Err(Error::InvalidConfig("budget smaller than the population".into()));
    }
    let mut rng = component_rng(seed, stream::OPTIMIZER);
    let dim = bounds.dim();
    let archive_cap = (cfg.archive_factor * np as f64).round() as usize;
    let n_pbest = ((cfg.p_best * np as f64).ceil() as usize).clamp(1, np);
    let mut m_f = vec![0.5; cfg.memory];
    let mut m_cr = vec![0.5; cfg.memory];
    let mut k_mem = 0;

    let mut pop = initial_population(&cfg.init, bounds, np, &mut rng)?;
    let mut rec = Recorder::new(objective, bounds, budget);
    let mut fit = Vec::with_capacity(np);
    for x in &pop {
        fit.push(rec.eval(x).expect("budget covers the population"));
    }
    let initial = fit.clone();
    let mut archive: Vec<Vec<f64>> = Vec::new();

    while !rec.exhausted() {
        let mut ranked: Vec<usize> = (0..np).collect();
        ranked.sort_by(|&a, &b| fit[a].total_cmp(&fit[b]));
        let mut trials = Vec::with_capacity(np);
        let mut params = Vec::with_capacity(np);
        for i in 0..np {
            let r = rng.random_range(0..cfg.memory);
            let cr = Normal::<f64>::new(m_cr[r], 0.1).expect("finite").sample(&mut rng).clamp(0.0, 1.0);
            let cauchy = Cauchy::new(m_f[r], 0.1).expect("finite");
            let f = loop {
                let f: f64 = cauchy.sample(&mut rng);
                if f > 0.0 {
                    break f.min(1.0);
                }
            };
            let pbest = ranked[rng.random_range(0..n_pbest)];
            let r1 = pick_excluding(&mut rng, np, &[i]);
            let r2 = pick_excluding(&mut rng, np + archive.len(), &[i, r1]);
            let x_r2 = if r2 < np { &pop[r2] } else { &archive[r2 - np] };
            let mutant: Vec<f64> = (0..dim)
                .map(|j| {
                    let xi = pop[i][j];
                    let v = xi + f * (pop[pbest][j] - xi) + f * (pop[r1][j] - x_r2[j]);
                    let (lo, hi) = (bounds.lower()[j], bounds.upper()[j]);
                    if v < lo {
                        0.5 * (lo + xi)
                    } else if v > hi {
                        0.5 * (hi + xi)
                    } else {
                        v
                    }
                })
                .collect();
            let j_rand = rng.random_range(0..dim);
            trials.push(binomial_crossover(&pop[i], &mutant, cr, j_rand, &mut rng));
            params.push((f, cr));
        }

        let mut s_f = Vec::new();
        let mut s_cr = Vec::new();
        let mut weights = Vec::new();
        for (i, trial) in trials.into_iter().enumerate() {
            let Some(ft) = rec.eval(&trial) else { break };
            if ft <= fit[i] {
                if ft < fit[i] {
                    s_f.push(params[i].0);
                    s_cr.push(params[i].1);
                    weights.push(fit[i] - ft);
                    archive.push(std::mem::replace(&mut pop[i], trial));
                } else {
                    pop[i] = trial;
                }
                fit[i] = ft;
            }
        }
        while archive.len() > archive_cap {
            let k = rng.random_range(0..archive.len());
            archive.swap_remove(k);
        }
        // infinite improvements (from a non-finite parent) carry unit weight
        for w in &mut weights {
            if !w.is_finite() {
                *w = 1.0;
            }
        }
        if !s_f.is_empty() {
            if let Some(v) = lehmer(&s_f, &weights) {
                m_f[k_mem] = v;
            }
            if let Some(v) = lehmer(&s_cr, &weights) {
                m_cr[k_mem] = v;
            }
            k_mem = (k_mem + 1) % cfg.memory;
        }
    }
    Ok(rec.finish(initial))
}

/// Surrogate-only search used by bound refinement: population equal to the
/// dimension, fixed evaluation budget.
pub fn refinement_inner_run(objective: &mut dyn Objective, bounds: &Bounds, seed: u64) -> Result<RunResult> {
    let cfg = ShadeConfig { population: bounds.dim().max(4), ..ShadeConfig::default() };
    shade_run(objective, bounds, &cfg, EvaluationBudget::new(REFINEMENT_BUDGET), seed)
}
