use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use mfinv_core::airfoil::serve;
use mfinv_core::dataset::{aid_inputs, build_dataset, read_dataset, sfr_inputs, write_dataset, Problem};
use mfinv_core::diffusion::{slab_solution, solve, DiffusionConfig, Grid, ScalarField, DOMAIN_HEIGHT, S_TOP_MAX};
use mfinv_core::harness::{
    aid_bounds, lf_evaluator, plot_table, read_summary, run_experiment, write_plot_csv, EvaluatorCommand,
    ExperimentConfig, ProblemContext, TargetKind, SFR_HF_DIM, SFR_LF_DIM,
};
use mfinv_core::refine::{aid_refine, collect_solutions, sfr_refine, DEFAULT_DEGREES};
use mfinv_core::surrogate::{fit_surrogate, MlpConfig, SurrogateModel};
use mfinv_core::{Bounds, Error, Result};

#[derive(Parser)]
#[command(name = "mfinv", version, about = "Surrogate-gated multi-fidelity inverse design")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Sfr,
    Aid,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Sfr => Problem::Sfr,
            ProblemArg::Aid => Problem::Aid,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Sinusoidal,
    Linear,
    Naca2410,
}

impl From<TargetArg> for TargetKind {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::Sinusoidal => TargetKind::Sinusoidal,
            TargetArg::Linear => TargetKind::Linear,
            TargetArg::Naca2410 => TargetKind::Naca2410,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GridArg {
    Lf,
    Hf,
}

#[derive(clap::Args)]
struct ExternalArgs {
    /// External pressure evaluator (airfoil only); speaks NDJSON on stdin/stdout.
    #[arg(long)]
    evaluator: Option<PathBuf>,
    #[arg(long = "evaluator-arg", allow_hyphen_values = true)]
    evaluator_args: Vec<String>,
}

impl ExternalArgs {
    fn command(&self) -> Option<EvaluatorCommand> {
        self.evaluator.as_ref().map(|p| EvaluatorCommand { program: p.clone(), args: self.evaluator_args.clone(), timeout_secs: 60 })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sample designs and label them with the low-fidelity model.
    Dataset {
        #[arg(long, value_enum)]
        problem: ProblemArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        external: ExternalArgs,
    },
    /// Train the surrogate and attach its k-fold RMSE.
    Train {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        k: usize,
        /// Overrides the epoch cap of the problem's default architecture.
        #[arg(long)]
        epochs: Option<usize>,
    },
    /// Shrink the search box with surrogate-only searches.
    Refine {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum)]
        target: TargetArg,
        #[arg(long, default_value_t = 150)]
        solutions: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Safety factor on the column means (airfoil).
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        /// Polynomial degrees of the envelope (boundary reconstruction).
        #[arg(long, value_delimiter = ',')]
        degrees: Option<Vec<usize>>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        external: ExternalArgs,
    },
    /// Run the repeats of one experiment config (TOML).
    Optimize {
        #[arg(long)]
        config: PathBuf,
    },
    /// Merge summaries into one plot table.
    Report {
        #[arg(long)]
        out: PathBuf,
        #[arg(required = true)]
        summaries: Vec<PathBuf>,
    },
    /// Analytic slab profile next to the numerical column profile for a constant boundary.
    Oracle {
        #[arg(long, default_value_t = 10.0)]
        s0: f64,
        #[arg(long, default_value_t = 0.1)]
        t: f64,
        #[arg(long, default_value_t = 1.0)]
        diffusivity: f64,
        #[arg(long, value_enum, default_value = "lf")]
        grid: GridArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mock pressure evaluator on stdin/stdout.
    #[command(hide = true)]
    Serve,
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn write_json(path: &Path, v: &impl serde::Serialize) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn dataset(problem: Problem, n: usize, seed: u64, out: &Path, cmd: Option<EvaluatorCommand>) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidConfig("n must be positive".into()));
    }
    if cmd.is_some() && problem != Problem::Aid {
        return Err(Error::InvalidConfig("an external evaluator only applies to the airfoil problem".into()));
    }
    let inputs = match problem {
        Problem::Sfr => sfr_inputs(n, SFR_LF_DIM, S_TOP_MAX, seed),
        Problem::Aid => aid_inputs(&aid_bounds()?, n, seed)?,
    };
    let evaluator = lf_evaluator(problem, cmd.as_ref());
    let ds = build_dataset(problem, inputs, evaluator.as_ref(), seed)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_dataset(out, &ds)?;
    print_json(&json!({ "rows": ds.len(), "dropped": ds.meta.dropped.len(), "path": out }))
}

fn train(dataset: &Path, out: &Path, seed: u64, k: usize, epochs: Option<usize>) -> Result<()> {
    let data = read_dataset(dataset)?;
    let mut cfg = match data.meta.problem {
        Problem::Sfr => MlpConfig::sfr(),
        Problem::Aid => MlpConfig::aid(),
    };
    if let Some(e) = epochs {
        cfg.epochs = e;
    }
    let (model, report, (cv_mean, cv_std)) = fit_surrogate(&data, &cfg, k, seed)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    model.save(out)?;
    let summary = json!({
        "rows": data.len(),
        "cv_rmse": cv_mean,
        "cv_rmse_std": cv_std,
        "best_epoch": report.best_epoch,
        "stopped_early": report.stopped_early,
    });
    write_json(&out.with_extension("train.json"), &summary)?;
    print_json(&summary)
}

#[allow(clippy::too_many_arguments)]
fn refine(
    model: &Path,
    target: TargetKind,
    solutions: usize,
    seed: u64,
    eta: f64,
    degrees: Option<Vec<usize>>,
    out: &Path,
    cmd: Option<EvaluatorCommand>,
) -> Result<()> {
    let model = SurrogateModel::load(model)?;
    let ctx = ProblemContext::new(target, cmd.as_ref())?;
    let t_info = ctx.record.target.info;
    let refined = match target.problem() {
        Problem::Sfr => {
            let lf_box = Bounds::uniform(SFR_LF_DIM, 0.0, S_TOP_MAX)?;
            let s = collect_solutions(&model, t_info, &lf_box, solutions, seed)?;
            let degrees = degrees.unwrap_or_else(|| DEFAULT_DEGREES.to_vec());
            sfr_refine(&s, &degrees, SFR_HF_DIM, S_TOP_MAX)?
        }
        Problem::Aid => {
            let s = collect_solutions(&model, t_info, &ctx.original, solutions, seed)?;
            aid_refine(&s, eta, &ctx.original)?
        }
    };
    let report = refined.report();
    write_json(out, &report)?;
    print_json(&json!({
        "n": report.n,
        "pruning_fraction": report.pruning_fraction,
        "contains_ground_truth": refined.bounds.contains(&ctx.record.ground_truth),
        "path": out,
    }))
}

fn optimize(config: &Path) -> Result<()> {
    let cfg = ExperimentConfig::load(config)?;
    let report = run_experiment(&cfg)?;
    print_json(&serde_json::to_value(&report.aggregate)?)
}

fn report(out: &Path, summaries: &[PathBuf]) -> Result<()> {
    let reports = summaries.iter().map(|p| read_summary(p)).collect::<Result<Vec<_>>>()?;
    if let Some(bad) = reports.iter().find(|r| !r.is_consistent()) {
        return Err(Error::InvalidConfig(format!("summary for seed {} has inconsistent aggregates", bad.seed)));
    }
    let rows = plot_table(&reports);
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_plot_csv(out, &rows)?;
    print_json(&json!({ "rows": rows.len(), "path": out }))
}

fn oracle(s0: f64, t: f64, diffusivity: f64, grid: GridArg, out: Option<&Path>) -> Result<()> {
    let grid = match grid {
        GridArg::Lf => Grid::lf(),
        GridArg::Hf => Grid::hf(),
    };
    let cfg = DiffusionConfig { diffusivity, t_max: t, ..DiffusionConfig::default() };
    let field: ScalarField = solve(&grid, &vec![s0; grid.nx], &cfg)?;
    let mut text = String::from("y,analytic,numerical\n");
    for j in 0..grid.ny {
        let y = grid.y_centre(j);
        let row = field.row(j);
        let numerical = row.iter().sum::<f64>() / row.len() as f64;
        let analytic = slab_solution(s0, y, t, diffusivity, DOMAIN_HEIGHT);
        text.push_str(&format!("{y},{analytic},{numerical}\n"));
    }
    match out {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => Ok(std::io::stdout().lock().write_all(text.as_bytes())?),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Dataset { problem, n, seed, out, external } => dataset(problem.into(), n, seed, &out, external.command()),
        Command::Train { dataset, out, seed, k, epochs } => train(&dataset, &out, seed, k, epochs),
        Command::Refine { model, target, solutions, seed, eta, degrees, out, external } => {
            refine(&model, target.into(), solutions, seed, eta, degrees, &out, external.command())
        }
        Command::Optimize { config } => optimize(&config),
        Command::Report { out, summaries } => report(&out, &summaries),
        Command::Oracle { s0, t, diffusivity, grid, out } => oracle(s0, t, diffusivity, grid, out.as_deref()),
        Command::Serve => serve(std::io::stdin().lock(), std::io::stdout().lock()),
    }
}

fn fail(kind: &str, message: &str) -> ExitCode {
    eprintln!("{}", json!({ "error": kind, "message": message }));
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.render().to_string().trim()),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), &e.to_string()),
    }
}
