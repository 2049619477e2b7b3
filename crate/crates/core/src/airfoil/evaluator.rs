use std::io::{BufRead, Read, Write};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::bspline::SplineBasis;
use super::geometry::{realize_geometry, AirfoilDesign};
use crate::domain::HfEvaluator;
use crate::error::{check_finite, Error, Result};
use crate::interp::{linear, linear_at};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fidelity {
    #[serde(rename = "HF")]
    Hf,
    #[serde(rename = "LF")]
    Lf,
}

impl Fidelity {
    /// Number of surface samples returned.
    pub fn panels(self) -> usize {
        match self {
            Fidelity::Hf => 300,
            Fidelity::Lf => 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowConditions {
    pub re: f64,
    pub aoa: f64,
    pub mach: f64,
}

impl Default for FlowConditions {
    fn default() -> Self {
        Self { re: 5e7, aoa: 4.0, mach: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub coords: Vec<[f64; 2]>,
    pub fidelity: Fidelity,
    pub re: f64,
    pub aoa: f64,
    pub mach: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Response {
    Ok { s: Vec<f64>, cp: Vec<f64> },
    Err { error: String },
}

/// Pressure coefficients at surface arc parameters `s` in [0, 1], running
/// from the trailing edge over the upper surface and back along the lower one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpDistribution {
    pub s: Vec<f64>,
    pub cp: Vec<f64>,
}

/// Piecewise-linear re-sampling onto `target_locations`.
pub fn interpolate_cp(computed: &CpDistribution, target_locations: &[f64]) -> Result<Vec<f64>> {
    if computed.s.len() < 2 {
        return Err(Error::Empty("pressure distribution"));
    }
    linear(&computed.s, &computed.cp, target_locations)
}

const THICKNESS_GAIN: f64 = 4.0;
const CURVATURE_GAIN: f64 = 0.25;
const CURVATURE_STEP: f64 = 0.02;

fn split_surfaces(coords: &[[f64; 2]]) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
    if coords.len() < 4 {
        return Err(Error::Empty("airfoil coordinates"));
    }
    let flat: Vec<f64> = coords.iter().flatten().copied().collect();
    check_finite(&flat)?;
    let le = (0..coords.len())
        .min_by(|&a, &b| coords[a][0].total_cmp(&coords[b][0]))
        .expect("non-empty");
    let (mut ux, mut uy): (Vec<f64>, Vec<f64>) = coords[..=le].iter().rev().map(|c| (c[0], c[1])).unzip();
    let (lx, ly): (Vec<f64>, Vec<f64>) = coords[le..].iter().map(|c| (c[0], c[1])).unzip();
    if ux.len() < 2 || lx.len() < 2 {
        return Err(Error::Evaluator("leading edge at an end of the coordinate list".into()));
    }
    let sorted = |v: &[f64]| v.windows(2).all(|w| w[0] <= w[1]);
    if !sorted(&ux) || !sorted(&lx) {
        return Err(Error::Evaluator("surface abscissae are not monotone".into()));
    }
    ux.shrink_to_fit();
    uy.shrink_to_fit();
    Ok((ux, uy, lx, ly))
}

/// Analytic stand-in for a panel code: a thickness suction term plus a
/// surface-curvature term. Linear in the ordinates, so scaling a shape
/// scales its pseudo-Cp, and a flat plate gives zero everywhere.
pub fn mock_pressure(coords: &[[f64; 2]], fidelity: Fidelity) -> Result<CpDistribution> {
    let (ux, uy, lx, ly) = split_surfaces(coords)?;
    let yu = |x: f64| linear_at(&ux, &uy, x);
    let yl = |x: f64| linear_at(&lx, &ly, x);
    // The stencil never leaves the surface: near either end it is frozen at
    // the closest centre whose three points all lie on the chord.
    let (x_lo, x_hi) = (ux[0].max(lx[0]), ux[ux.len() - 1].min(lx[lx.len() - 1]));
    let curvature = |f: &dyn Fn(f64) -> f64, x: f64| {
        let h = CURVATURE_STEP;
        let c = x.clamp(x_lo + h, (x_hi - h).max(x_lo + h));
        (f(c + h) - 2.0 * f(c) + f(c - h)) / (h * h)
    };
    let n = fidelity.panels();
    let mut s = Vec::with_capacity(n);
    let mut cp = Vec::with_capacity(n);
    for k in 0..n {
        let sk = k as f64 / (n - 1) as f64;
        let zeta = 0.5 * (1.0 + (2.0 * std::f64::consts::PI * sk).cos());
        let thickness = yu(zeta) - yl(zeta);
        let bend = if sk < 0.5 { curvature(&yu, zeta) } else { -curvature(&yl, zeta) };
        s.push(sk);
        cp.push(-THICKNESS_GAIN * thickness + CURVATURE_GAIN * bend);
    }
    Ok(CpDistribution { s, cp })
}

pub trait PressureBackend: Send + Sync {
    fn pressure(&self, coords: &[[f64; 2]], fidelity: Fidelity) -> Result<CpDistribution>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MockBackend;

impl PressureBackend for MockBackend {
    fn pressure(&self, coords: &[[f64; 2]], fidelity: Fidelity) -> Result<CpDistribution> {
        mock_pressure(coords, fidelity)
    }
}

/// Answers one request line per input line with the mock model.
pub fn serve<R: BufRead, W: Write>(input: R, mut output: W) -> Result<()> {
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let response = match serde_json::from_str::<Request>(&line) {
            Ok(req) => match mock_pressure(&req.coords, req.fidelity) {
                Ok(d) => Response::Ok { s: d.s, cp: d.cp },
                Err(e) => Response::Err { error: e.to_string() },
            },
            Err(e) => Response::Err { error: format!("bad request: {e}") },
        };
        serde_json::to_writer(&mut output, &response)?;
        output.write_all(b"\n")?;
        output.flush()?;
    }
    Ok(())
}

/// One child process per request, speaking newline-delimited JSON.
#[derive(Debug, Clone)]
pub struct ExternalEvaluator {
    pub program: PathBuf,
    pub args: Vec<String>,
    pub timeout: Duration,
    pub flow: FlowConditions,
}

impl ExternalEvaluator {
    pub fn new(program: impl Into<PathBuf>, args: Vec<String>) -> Self {
        Self { program: program.into(), args, timeout: Duration::from_secs(60), flow: FlowConditions::default() }
    }
}

impl PressureBackend for ExternalEvaluator {
    fn pressure(&self, coords: &[[f64; 2]], fidelity: Fidelity) -> Result<CpDistribution> {
        let request = Request {
            coords: coords.to_vec(),
            fidelity,
            re: self.flow.re,
            aoa: self.flow.aoa,
            mach: self.flow.mach,
        };
        let mut line = serde_json::to_string(&request)?;
        line.push('\n');
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| Error::Evaluator(format!("spawn {}: {e}", self.program.display())))?;
        let mut stdin = child.stdin.take().expect("piped stdin");
        let mut stdout = child.stdout.take().expect("piped stdout");
        let reader = std::thread::spawn(move || {
            let mut buf = String::new();
            stdout.read_to_string(&mut buf).map(|_| buf)
        });
        let write_result = stdin.write_all(line.as_bytes());
        drop(stdin);
        let start = Instant::now();
        let status = loop {
            if let Some(status) = child.try_wait()? {
                break status;
            }
            if start.elapsed() > self.timeout {
                let _ = child.kill();
                let _ = child.wait();
                return Err(Error::Evaluator(format!("timed out after {:?}", self.timeout)));
            }
            std::thread::sleep(Duration::from_millis(2));
        };
        let out = reader
            .join()
            .map_err(|_| Error::Evaluator("reader thread panicked".into()))??;
        write_result.map_err(|e| Error::Evaluator(format!("write request: {e}")))?;
        if !status.success() {
            return Err(Error::Evaluator(format!("evaluator exited with {status}")));
        }
        let first = out
            .lines()
            .find(|l| !l.trim().is_empty())
            .ok_or_else(|| Error::Evaluator("empty response".into()))?;
        match serde_json::from_str::<Response>(first)? {
            Response::Ok { s, cp } => {
                if s.len() != cp.len() || s.len() < 2 {
                    return Err(Error::Evaluator("malformed pressure distribution".into()));
                }
                check_finite(&cp)?;
                Ok(CpDistribution { s, cp })
            }
            Response::Err { error } => Err(Error::Evaluator(error)),
        }
    }
}

/// Design vector -> negated Cp, optionally re-sampled at fixed locations.
#[derive(Clone)]
pub struct AirfoilEvaluator {
    pub basis: SplineBasis,
    pub backend: Arc<dyn PressureBackend>,
    pub fidelity: Fidelity,
    pub n_points: usize,
    pub target_locations: Option<Vec<f64>>,
}

impl AirfoilEvaluator {
    pub fn mock(fidelity: Fidelity) -> Self {
        Self {
            basis: SplineBasis::airfoil(),
            backend: Arc::new(MockBackend),
            fidelity,
            n_points: 160,
            target_locations: None,
        }
    }

    pub fn pressure(&self, x: &[f64]) -> Result<CpDistribution> {
        let design = AirfoilDesign::from_slice(x)?;
        let geometry = realize_geometry(&design, &self.basis, self.n_points);
        self.backend.pressure(&geometry.coords, self.fidelity)
    }
}

impl HfEvaluator for AirfoilEvaluator {
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        let dist = self.pressure(x)?;
        let cp = match &self.target_locations {
            Some(t) => interpolate_cp(&dist, t)?,
            None => dist.cp,
        };
        Ok(cp.into_iter().map(|v| -v).collect())
    }
}
