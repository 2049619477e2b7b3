use std::path::Path;
use std::sync::{Arc, OnceLock};
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{EvaluatorCommand, ExperimentConfig, OptimizerKind};
use super::report::{emit_report, SummaryReport};
use super::targets::{make_target, TargetKind, TargetRecord};
use crate::airfoil::{fit_baseline, original_bounds, AirfoilEvaluator, ExternalEvaluator, Fidelity};
use crate::dataset::Problem;
use crate::diffusion::{FieldEvaluator, LinearResponseEvaluator, ProbeEvaluator, S_TOP_MAX};
use crate::domain::{Bounds, EvaluationBudget, HfEvaluator, HfObjective, Objective};
use crate::error::{Error, Result};
use crate::gate::{GateConfig, GatedObjective, InputAdapter};
use crate::optimizers::{pso_run, shade_run, write_trace_csv, PsoConfig, RunResult, ShadeConfig};
use crate::refine::RefinementReport;
use crate::rng::derive_seed;
use crate::surrogate::{Surrogate, SurrogateModel};

/// Scale applied to the NACA0012 coefficients to form the airfoil search box.
pub const AID_GAMMA: f64 = 3.0;
const BASELINE_POINTS: usize = 160;
pub const SFR_HF_DIM: usize = 80;
pub const SFR_LF_DIM: usize = 20;

/// High-fidelity probe model of the reconstruction problem, built once per
/// process (80 unit-boundary solves).
pub fn sfr_hf() -> Result<Arc<LinearResponseEvaluator>> {
    static CACHE: OnceLock<Arc<LinearResponseEvaluator>> = OnceLock::new();
    if let Some(e) = CACHE.get() {
        return Ok(e.clone());
    }
    let built = Arc::new(LinearResponseEvaluator::build(&ProbeEvaluator::hf())?);
    Ok(CACHE.get_or_init(|| built).clone())
}

pub fn sfr_bounds() -> Bounds {
    Bounds::uniform(SFR_HF_DIM, 0.0, S_TOP_MAX).expect("valid box")
}

pub fn aid_bounds() -> Result<Bounds> {
    let b = fit_baseline(BASELINE_POINTS)?;
    original_bounds(&b.lower, &b.upper, AID_GAMMA)
}

fn airfoil_evaluator(fidelity: Fidelity, cmd: Option<&EvaluatorCommand>) -> AirfoilEvaluator {
    let mut e = AirfoilEvaluator::mock(fidelity);
    if let Some(cmd) = cmd {
        let mut ext = ExternalEvaluator::new(&cmd.program, cmd.args.clone());
        ext.timeout = Duration::from_secs(cmd.timeout_secs);
        e.backend = Arc::new(ext);
    }
    e
}

/// Evaluator producing surrogate training labels (the label is the maximum of its output).
pub fn lf_evaluator(problem: Problem, cmd: Option<&EvaluatorCommand>) -> Box<dyn HfEvaluator> {
    match problem {
        Problem::Sfr => Box::new(FieldEvaluator::lf()),
        Problem::Aid => Box::new(airfoil_evaluator(Fidelity::Lf, cmd)),
    }
}

/// Everything an optimization run needs besides the surrogate.
pub struct ProblemContext {
    pub hf: Arc<dyn HfEvaluator>,
    pub original: Bounds,
    pub adapter: InputAdapter,
    pub record: TargetRecord,
}

impl ProblemContext {
    pub fn new(target: TargetKind, cmd: Option<&EvaluatorCommand>) -> Result<Self> {
        let (hf, original, adapter): (Arc<dyn HfEvaluator>, _, _) = match target.problem() {
            Problem::Sfr => (sfr_hf()?, sfr_bounds(), InputAdapter::Downsample80To20),
            Problem::Aid => (Arc::new(airfoil_evaluator(Fidelity::Hf, cmd)), aid_bounds()?, InputAdapter::Identity),
        };
        let record = make_target(target, hf.as_ref())?;
        Ok(Self { hf, original, adapter, record })
    }
}

/// One optimization repeat, as reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub repeat: usize,
    pub seed: u64,
    /// Best fitness among evaluations that ran the high-fidelity model.
    pub final_fitness: Option<f64>,
    pub hf_count: usize,
    pub rb: usize,
    pub consumed: usize,
    /// No finite high-fidelity evaluation happened, so there is nothing to report.
    pub degenerate: bool,
    pub trace_path: Option<String>,
}

impl RunRecord {
    pub fn from_run(repeat: usize, seed: u64, run: &RunResult) -> Self {
        let final_fitness = run
            .trace
            .iter()
            .filter(|e| e.hf && e.fitness.is_finite())
            .map(|e| e.fitness)
            .min_by(f64::total_cmp);
        Self {
            repeat,
            seed,
            final_fitness,
            hf_count: run.budget.hf_count,
            rb: run.budget.rb,
            consumed: run.budget.consumed,
            degenerate: final_fitness.is_none(),
            trace_path: None,
        }
    }
}

/// Seed of repeat `r`; vanilla and enhanced runs of one config share them.
pub fn repeat_seed(seed: u64, r: usize) -> u64 {
    derive_seed(seed, r as u64)
}

fn optimize(kind: OptimizerKind, obj: &mut dyn Objective, bounds: &Bounds, tsb: usize, seed: u64) -> Result<RunResult> {
    let budget = EvaluationBudget::new(tsb);
    match kind {
        OptimizerKind::Pso => pso_run(obj, bounds, &PsoConfig::default(), budget, seed),
        OptimizerKind::De => shade_run(obj, bounds, &ShadeConfig::default(), budget, seed),
    }
}

/// Runs every repeat on `search`. With a model the objective is gated,
/// otherwise every candidate is simulated.
pub fn run_repeats(
    cfg: &ExperimentConfig,
    ctx: &ProblemContext,
    model: Option<&dyn Surrogate>,
    search: &Bounds,
) -> Result<Vec<(RunRecord, RunResult)>> {
    if !search.nested_in(&ctx.original) {
        return Err(Error::InvalidBounds("search box leaves the original bounds".into()));
    }
    let gate = GateConfig::new(cfg.c, cfg.lambda, ctx.adapter)?;
    let target = &ctx.record.target;
    (0..cfg.repeats)
        .into_par_iter()
        .map(|r| {
            let seed = repeat_seed(cfg.seed, r);
            let run = match model {
                Some(m) => {
                    let mut obj = GatedObjective::new(gate, m, target, ctx.hf.as_ref())?;
                    optimize(cfg.optimizer, &mut obj, search, cfg.tsb, seed)?
                }
                None => {
                    let mut obj = HfObjective { evaluator: ctx.hf.as_ref(), target };
                    optimize(cfg.optimizer, &mut obj, search, cfg.tsb, seed)?
                }
            };
            Ok((RunRecord::from_run(r, seed, &run), run))
        })
        .collect()
}

pub fn load_refined(path: &Path) -> Result<RefinementReport> {
    if !path.exists() {
        return Err(Error::MissingArtifact(path.display().to_string()));
    }
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

/// Full protocol for one config: build the problem, load artifacts, run the
/// repeats, and write traces plus the report when `paths.out_dir` is set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<SummaryReport> {
    cfg.validate()?;
    let model = match (&cfg.paths.model, cfg.enhanced) {
        (Some(p), true) => Some(SurrogateModel::load(p)?),
        _ => None,
    };
    let refined = match (&cfg.paths.refined, cfg.refined_bounds()) {
        (Some(p), true) => Some(load_refined(p)?.bounds()?),
        _ => None,
    };
    let ctx = ProblemContext::new(cfg.target, cfg.evaluator.as_ref())?;
    if let Some(m) = &model {
        let want = match cfg.problem {
            Problem::Sfr => SFR_LF_DIM,
            Problem::Aid => ctx.original.dim(),
        };
        if m.input_dim() != want {
            return Err(Error::InvalidConfig(format!("model takes {} inputs, problem needs {want}", m.input_dim())));
        }
    }
    let search = refined.unwrap_or_else(|| ctx.original.clone());
    let runs = run_repeats(cfg, &ctx, model.as_ref().map(|m| m as &dyn Surrogate), &search)?;
    let mut rows = Vec::with_capacity(runs.len());
    for (mut row, run) in runs {
        if let Some(dir) = &cfg.paths.out_dir {
            let rel = format!("traces/run_{:03}.csv", row.repeat);
            let path = dir.join(&rel);
            std::fs::create_dir_all(path.parent().expect("has parent"))?;
            write_trace_csv(std::fs::File::create(&path)?, &run.trace)?;
            row.trace_path = Some(rel);
        }
        rows.push(row);
    }
    let report = SummaryReport::new(cfg, rows)?;
    if let Some(dir) = &cfg.paths.out_dir {
        emit_report(&report, dir)?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::OptimizerKind;

    #[test]
    fn small_vanilla_sfr_run() {
        let mut cfg = ExperimentConfig::new(Problem::Sfr, OptimizerKind::Pso, false, TargetKind::Linear);
        cfg.repeats = 2;
        cfg.tsb = 20;
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.rows.len(), 2);
        for row in &report.rows {
            assert_eq!((row.consumed, row.hf_count, row.rb), (20, 20, 0));
            assert!(!row.degenerate);
        }
        assert_ne!(report.rows[0].seed, report.rows[1].seed);
    }

    #[test]
    fn missing_model_is_reported() {
        let mut cfg = ExperimentConfig::new(Problem::Sfr, OptimizerKind::De, true, TargetKind::Linear);
        cfg.use_refined_bounds = Some(false);
        cfg.paths.model = Some("/nonexistent/model.json".into());
        assert_eq!(run_experiment(&cfg).unwrap_err().kind(), "missing_artifact");
    }

    #[test]
    fn truth_reproduces_target() {
        for kind in [TargetKind::Sinusoidal, TargetKind::Naca2410] {
            let ctx = ProblemContext::new(kind, None).unwrap();
            assert!(ctx.original.contains(&ctx.record.ground_truth));
            let p = ctx.hf.evaluate(&ctx.record.ground_truth).unwrap();
            assert_eq!(p, ctx.record.target.values);
        }
    }
}
