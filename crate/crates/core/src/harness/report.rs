use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, OptimizerKind};
use super::experiment::RunRecord;
use super::targets::TargetKind;
use crate::dataset::Problem;
use crate::error::{Error, Result};

/// Aggregates over the non-degenerate repeats; `mean_rb` covers all of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean_fitness: Option<f64>,
    /// Population standard deviation.
    pub std_fitness: Option<f64>,
    pub median_fitness: Option<f64>,
    pub mean_rb: f64,
    pub n_valid: usize,
    pub n_degenerate: usize,
}

impl Aggregate {
    pub fn from_rows(rows: &[RunRecord]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Empty("report rows"));
        }
        let mut f: Vec<f64> = rows.iter().filter_map(|r| r.final_fitness).collect();
        f.sort_by(f64::total_cmp);
        let n = f.len();
        let mean = (n > 0).then(|| f.iter().sum::<f64>() / n as f64);
        let std = mean.map(|m| (f.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n as f64).sqrt());
        let median = (n > 0).then(|| if n % 2 == 1 { f[n / 2] } else { 0.5 * (f[n / 2 - 1] + f[n / 2]) });
        Ok(Self {
            mean_fitness: mean,
            std_fitness: std,
            median_fitness: median,
            mean_rb: rows.iter().map(|r| r.rb as f64).sum::<f64>() / rows.len() as f64,
            n_valid: n,
            n_degenerate: rows.len() - n,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub schema_version: u32,
    pub problem: Problem,
    pub target: TargetKind,
    pub optimizer: OptimizerKind,
    pub enhanced: bool,
    pub dataset_size: usize,
    pub c: f64,
    pub eta: f64,
    pub tsb: usize,
    pub seed: u64,
    pub rows: Vec<RunRecord>,
    pub aggregate: Aggregate,
}

impl SummaryReport {
    pub fn new(cfg: &ExperimentConfig, rows: Vec<RunRecord>) -> Result<Self> {
        let aggregate = Aggregate::from_rows(&rows)?;
        Ok(Self {
            schema_version: cfg.schema_version,
            problem: cfg.problem,
            target: cfg.target,
            optimizer: cfg.optimizer,
            enhanced: cfg.enhanced,
            dataset_size: cfg.dataset_size,
            c: cfg.c,
            eta: cfg.eta,
            tsb: cfg.tsb,
            seed: cfg.seed,
            rows,
            aggregate,
        })
    }

    /// Rows and aggregates agree, and no run overspent.
    pub fn is_consistent(&self) -> bool {
        Aggregate::from_rows(&self.rows).is_ok_and(|a| a == self.aggregate)
            && self.rows.iter().all(|r| r.hf_count + r.rb == r.consumed && r.consumed <= self.tsb)
    }
}

/// One point of the fitness-versus-c chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub problem: Problem,
    pub target: TargetKind,
    pub optimizer: OptimizerKind,
    pub enhanced: bool,
    pub dataset_size: usize,
    pub c: f64,
    pub eta: f64,
    pub mean_fitness: Option<f64>,
    pub std_fitness: Option<f64>,
    pub median_fitness: Option<f64>,
    pub mean_rb: f64,
}

impl From<&SummaryReport> for PlotRow {
    fn from(r: &SummaryReport) -> Self {
        Self {
            problem: r.problem,
            target: r.target,
            optimizer: r.optimizer,
            enhanced: r.enhanced,
            dataset_size: r.dataset_size,
            c: r.c,
            eta: r.eta,
            mean_fitness: r.aggregate.mean_fitness,
            std_fitness: r.aggregate.std_fitness,
            median_fitness: r.aggregate.median_fitness,
            mean_rb: r.aggregate.mean_rb,
        }
    }
}

/// Rows grouped by dataset size, then ordered by c.
pub fn plot_table(reports: &[SummaryReport]) -> Vec<PlotRow> {
    let mut rows: Vec<PlotRow> = reports.iter().map(PlotRow::from).collect();
    rows.sort_by(|a, b| {
        (a.problem as u8, a.target as u8, a.optimizer as u8, a.enhanced, a.dataset_size)
            .cmp(&(b.problem as u8, b.target as u8, b.optimizer as u8, b.enhanced, b.dataset_size))
            .then(a.c.total_cmp(&b.c))
            .then(a.eta.total_cmp(&b.eta))
    });
    rows
}

pub fn write_plot_csv(path: &Path, rows: &[PlotRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportFiles {
    pub runs_csv: PathBuf,
    pub summary_json: PathBuf,
    pub plot_csv: PathBuf,
}

/// Writes `runs.csv`, `summary.json` and a one-row `plot.csv` into `dir`.
pub fn emit_report(report: &SummaryReport, dir: &Path) -> Result<ReportFiles> {
    if report.rows.is_empty() {
        return Err(Error::Empty("report rows"));
    }
    std::fs::create_dir_all(dir)?;
    let files = ReportFiles {
        runs_csv: dir.join("runs.csv"),
        summary_json: dir.join("summary.json"),
        plot_csv: dir.join("plot.csv"),
    };
    let mut w = csv::Writer::from_path(&files.runs_csv)?;
    for r in &report.rows {
        w.serialize(r)?;
    }
    w.flush()?;
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    std::fs::write(&files.summary_json, json)?;
    write_plot_csv(&files.plot_csv, &plot_table(std::slice::from_ref(report)))?;
    Ok(files)
}

pub fn read_summary(path: &Path) -> Result<SummaryReport> {
    if !path.exists() {
        return Err(Error::MissingArtifact(path.display().to_string()));
    }
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

pub fn read_runs_csv(path: &Path) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(repeat: usize, f: Option<f64>, rb: usize) -> RunRecord {
        RunRecord {
            repeat,
            seed: repeat as u64,
            final_fitness: f,
            hf_count: 20 - rb,
            rb,
            consumed: 20,
            degenerate: f.is_none(),
            trace_path: Some(format!("traces/run_{repeat:03}.csv")),
        }
    }

    fn report(rows: Vec<RunRecord>) -> SummaryReport {
        let mut cfg = ExperimentConfig::new(Problem::Sfr, OptimizerKind::Pso, false, TargetKind::Linear);
        cfg.tsb = 20;
        SummaryReport::new(&cfg, rows).unwrap()
    }

    #[test]
    fn aggregates() {
        let r = report(vec![row(0, Some(1.0), 0), row(1, Some(3.0), 4), row(2, None, 20), row(3, Some(2.0), 6)]);
        let a = &r.aggregate;
        assert_eq!((a.n_valid, a.n_degenerate), (3, 1));
        assert_eq!(a.mean_fitness, Some(2.0));
        assert_eq!(a.median_fitness, Some(2.0));
        assert!((a.std_fitness.unwrap() - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(a.mean_rb, 7.5);
        assert!(r.is_consistent());
    }

    #[test]
    fn empty_rows_rejected() {
        let cfg = ExperimentConfig::new(Problem::Sfr, OptimizerKind::Pso, false, TargetKind::Linear);
        assert!(SummaryReport::new(&cfg, vec![]).is_err());
        let mut r = report(vec![row(0, Some(1.0), 0)]);
        r.rows.clear();
        assert!(emit_report(&r, Path::new("/tmp")).is_err());
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let r = report(vec![row(0, Some(0.1 + 0.2), 3), row(1, None, 20), row(2, Some(1e-7 / 3.0), 0)]);
        let files = emit_report(&r, dir.path()).unwrap();
        let back = read_summary(&files.summary_json).unwrap();
        assert_eq!(back, r);
        assert_eq!(Aggregate::from_rows(&read_runs_csv(&files.runs_csv).unwrap()).unwrap(), r.aggregate);
        let plot = std::fs::read_to_string(&files.plot_csv).unwrap();
        assert!(plot.starts_with("problem,target,optimizer,enhanced,dataset_size,c,eta,mean_fitness"));
        assert!(back.rows.iter().all(|x| x.rb <= back.tsb));
    }
}
