use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::targets::TargetKind;
use crate::dataset::Problem;
use crate::error::{Error, Result};
use crate::gate::DEFAULT_LAMBDA;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OptimizerKind {
    #[serde(rename = "PSO")]
    Pso,
    /// SHADE.
    #[serde(rename = "DE")]
    De,
}

/// Command line of an external pressure evaluator speaking the NDJSON protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluatorCommand {
    pub program: PathBuf,
    #[serde(default)]
    pub args: Vec<String>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
}

fn default_timeout() -> u64 {
    60
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    /// Traces and reports go here.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub model: Option<PathBuf>,
    /// Refinement report JSON produced by `refine`.
    #[serde(default)]
    pub refined: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub problem: Problem,
    pub optimizer: OptimizerKind,
    pub enhanced: bool,
    pub target: TargetKind,
    /// Size of the dataset the surrogate was trained on; used to label reports.
    #[serde(default = "default_dataset_size")]
    pub dataset_size: usize,
    #[serde(default = "one")]
    pub c: f64,
    /// Recorded in reports for airfoil runs; the refinement itself happens in `refine`.
    #[serde(default = "one")]
    pub eta: f64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_tsb")]
    pub tsb: usize,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to `enhanced`.
    #[serde(default)]
    pub use_refined_bounds: Option<bool>,
    #[serde(default)]
    pub evaluator: Option<EvaluatorCommand>,
    #[serde(default)]
    pub paths: Paths,
}

fn default_dataset_size() -> usize {
    1000
}
fn one() -> f64 {
    1.0
}
fn default_lambda() -> f64 {
    DEFAULT_LAMBDA
}
fn default_tsb() -> usize {
    200
}
fn default_repeats() -> usize {
    30
}

/// Smallest budget every optimizer accepts: one full initial population.
pub const MIN_TSB: usize = 10;

impl ExperimentConfig {
    pub fn new(problem: Problem, optimizer: OptimizerKind, enhanced: bool, target: TargetKind) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            problem,
            optimizer,
            enhanced,
            target,
            dataset_size: default_dataset_size(),
            c: 1.0,
            eta: 1.0,
            lambda: DEFAULT_LAMBDA,
            tsb: default_tsb(),
            repeats: default_repeats(),
            seed: 0,
            use_refined_bounds: None,
            evaluator: None,
            paths: Paths::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads, applies environment path overrides, validates.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg: Self = toml::from_str(&std::fs::read_to_string(path)?)?;
        cfg.apply_env(|k| std::env::var_os(k).map(PathBuf::from));
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    /// `MFINV_OUT_DIR`, `MFINV_MODEL` and `MFINV_REFINED` replace the matching
    /// paths. Nothing else can be overridden from the environment.
    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<PathBuf>) {
        if let Some(p) = lookup("MFINV_OUT_DIR") {
            self.paths.out_dir = Some(p);
        }
        if let Some(p) = lookup("MFINV_MODEL") {
            self.paths.model = Some(p);
        }
        if let Some(p) = lookup("MFINV_REFINED") {
            self.paths.refined = Some(p);
        }
    }

    pub fn refined_bounds(&self) -> bool {
        self.use_refined_bounds.unwrap_or(self.enhanced)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", self.schema_version));
        }
        if self.target.problem() != self.problem {
            return bad(format!("target {:?} does not belong to problem {:?}", self.target, self.problem));
        }
        if !(self.c > 0.0) || !(self.lambda > 0.0) || !(self.eta > 0.0) {
            return bad("c, lambda and eta must be positive".into());
        }
        if self.tsb < MIN_TSB {
            return bad(format!("tsb must be at least {MIN_TSB}"));
        }
        if self.repeats == 0 {
            return bad("repeats must be at least 1".into());
        }
        if self.dataset_size == 0 {
            return bad("dataset_size must be positive".into());
        }
        if self.refined_bounds() && !self.enhanced {
            return bad("vanilla runs search the original bounds".into());
        }
        if self.evaluator.is_some() && self.problem != Problem::Aid {
            return bad("an external evaluator only applies to the airfoil problem".into());
        }
        if self.enhanced && self.paths.model.is_none() {
            return bad("enhanced runs need paths.model".into());
        }
        if self.refined_bounds() && self.paths.refined.is_none() {
            return bad("refined bounds requested without paths.refined".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
schema_version = 1
problem = "SFR"
optimizer = "DE"
enhanced = false
target = "sinusoidal"
"#;

    #[test]
    fn defaults() {
        let c = ExperimentConfig::from_toml(MINIMAL).unwrap();
        assert_eq!((c.tsb, c.repeats, c.c, c.lambda), (200, 30, 1.0, 2.0));
        assert!(!c.refined_bounds());
        let again = ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn rejects_conflicts() {
        let err = |extra: &str| ExperimentConfig::from_toml(&format!("{MINIMAL}{extra}")).unwrap_err().kind();
        assert_eq!(err("tsb = 5\n"), "invalid_config");
        assert_eq!(err("use_refined_bounds = true\n"), "invalid_config");
        assert_eq!(err("unknown_key = 1\n"), "toml");
        let wrong_target = MINIMAL.replace("sinusoidal", "naca2410");
        assert!(ExperimentConfig::from_toml(&wrong_target).is_err());
        let enhanced = MINIMAL.replace("enhanced = false", "enhanced = true");
        assert!(ExperimentConfig::from_toml(&enhanced).is_err());
        let with_model = format!("{enhanced}[paths]\nmodel = \"m.json\"\nrefined = \"r.json\"\n");
        assert!(ExperimentConfig::from_toml(&with_model).unwrap().refined_bounds());
        let bumped = MINIMAL.replace("schema_version = 1", "schema_version = 2");
        assert!(ExperimentConfig::from_toml(&bumped).is_err());
    }

    #[test]
    fn env_overrides_touch_paths_only() {
        let mut c = ExperimentConfig::from_toml(MINIMAL).unwrap();
        let before = c.clone();
        c.apply_env(|k| (k == "MFINV_OUT_DIR").then(|| PathBuf::from("/tmp/x")));
        assert_eq!(c.paths.out_dir.as_deref(), Some(Path::new("/tmp/x")));
        c.paths = before.paths.clone();
        assert_eq!(c, before);
    }
}
