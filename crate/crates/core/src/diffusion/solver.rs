use serde::{Deserialize, Serialize};

use super::grid::{Grid, ScalarField};
use crate::error::{check_finite, check_len, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ExplicitFtcs,
    ImplicitEuler,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionConfig {
    pub diffusivity: f64,
    pub t_max: f64,
    pub scheme: Scheme,
    /// `None` picks 0.9x the stability limit (explicit) or 200 steps (implicit).
    pub dt: Option<f64>,
}

impl Default for DiffusionConfig {
    fn default() -> Self {
        Self { diffusivity: 1.0, t_max: 0.1, scheme: Scheme::ExplicitFtcs, dt: None }
    }
}

impl DiffusionConfig {
    pub fn implicit() -> Self {
        Self { scheme: Scheme::ImplicitEuler, ..Self::default() }
    }

    /// Largest explicit step that keeps every update a convex combination.
    /// The top row couples to the face value through a half cell, hence 3/dy².
    pub fn stability_limit(&self, grid: &Grid) -> f64 {
        1.0 / (self.diffusivity * (2.0 / (grid.dx * grid.dx) + 3.0 / (grid.dy * grid.dy)))
    }

    pub fn time_stepping(&self, grid: &Grid) -> Result<TimeStepping> {
        if !(self.diffusivity > 0.0) || !(self.t_max >= 0.0) {
            return Err(Error::InvalidConfig("diffusivity must be > 0 and t_max >= 0".into()));
        }
        let requested = match (self.scheme, self.dt) {
            (_, Some(dt)) if !(dt > 0.0) => {
                return Err(Error::InvalidConfig(format!("time step {dt} must be positive")))
            }
            (Scheme::ExplicitFtcs, Some(dt)) => {
                let limit = self.stability_limit(grid);
                if dt > limit {
                    return Err(Error::UnstableTimeStep { dt, limit });
                }
                dt
            }
            (Scheme::ExplicitFtcs, None) => 0.9 * self.stability_limit(grid),
            (Scheme::ImplicitEuler, Some(dt)) => dt,
            (Scheme::ImplicitEuler, None) => self.t_max / 200.0,
        };
        if self.t_max == 0.0 {
            return Ok(TimeStepping { steps: 0, dt: 0.0 });
        }
        let steps = (self.t_max / requested).ceil() as usize;
        Ok(TimeStepping { steps, dt: self.t_max / steps as f64 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeStepping {
    pub steps: usize,
    pub dt: f64,
}

pub fn solve(grid: &Grid, bc: &[f64], cfg: &DiffusionConfig) -> Result<ScalarField> {
    solve_with(grid, bc, cfg, None, |_, _| {})
}

/// Like [`solve`], optionally from a non-zero initial field, calling
/// `observer(step, field)` after every time step.
pub fn solve_with(
    grid: &Grid,
    bc: &[f64],
    cfg: &DiffusionConfig,
    initial: Option<&ScalarField>,
    mut observer: impl FnMut(usize, &ScalarField),
) -> Result<ScalarField> {
    check_len(grid.nx, bc.len())?;
    check_finite(bc)?;
    let ts = cfg.time_stepping(grid)?;
    let mut field = match initial {
        Some(f) => {
            if f.grid != *grid {
                return Err(Error::InvalidConfig("initial field grid mismatch".into()));
            }
            f.clone()
        }
        None => ScalarField::zeros(*grid),
    };
    let rx = cfg.diffusivity * ts.dt / (grid.dx * grid.dx);
    let ry = cfg.diffusivity * ts.dt / (grid.dy * grid.dy);
    match cfg.scheme {
        Scheme::ExplicitFtcs => {
            let mut next = field.values.clone();
            for step in 1..=ts.steps {
                ftcs_step(grid, bc, rx, ry, &field.values, &mut next);
                std::mem::swap(&mut field.values, &mut next);
                observer(step, &field);
            }
        }
        Scheme::ImplicitEuler => {
            let mut cg = CgWorkspace::new(grid.cells());
            for step in 1..=ts.steps {
                implicit_step(grid, bc, rx, ry, &mut field.values, &mut cg)?;
                observer(step, &field);
            }
        }
    }
    if let Some(k) = field.values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Diverged(k));
    }
    Ok(field)
}

pub fn field_max(field: &ScalarField) -> f64 {
    field.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// One forward-Euler update written as a weighted sum of non-negative terms,
/// so the discrete maximum principle holds in floating point as well.
fn ftcs_step(grid: &Grid, bc: &[f64], rx: f64, ry: f64, cur: &[f64], next: &mut [f64]) {
    let (nx, ny) = (grid.nx, grid.ny);
    for j in 0..ny {
        let row = &cur[j * nx..(j + 1) * nx];
        // the bottom row has no lower neighbour: reuse its own row with weight 0
        let (below, wb) = if j > 0 { (&cur[(j - 1) * nx..j * nx], ry) } else { (row, 0.0) };
        // ghost = 2 bc - s puts the prescribed value on the top face
        let (above, wa) = if j + 1 < ny { (&cur[(j + 1) * nx..(j + 2) * nx], ry) } else { (bc, 2.0 * ry) };
        let out = &mut next[j * nx..(j + 1) * nx];
        let keep_edge = 1.0 - (rx + wb + wa);
        let keep = 1.0 - (2.0 * rx + wb + wa);
        out[0] = keep_edge * row[0] + (rx * row[1] + wb * below[0] + wa * above[0]);
        for i in 1..nx - 1 {
            out[i] = keep * row[i] + (rx * (row[i - 1] + row[i + 1]) + wb * below[i] + wa * above[i]);
        }
        let l = nx - 1;
        out[l] = keep_edge * row[l] + (rx * row[l - 1] + wb * below[l] + wa * above[l]);
    }
}

/// y = (I - dt D L) x with the Dirichlet data moved to the right-hand side.
fn apply_operator(grid: &Grid, rx: f64, ry: f64, x: &[f64], y: &mut [f64]) {
    let (nx, ny) = (grid.nx, grid.ny);
    for j in 0..ny {
        let row = j * nx;
        for i in 0..nx {
            let k = row + i;
            let mut off = 0.0;
            let mut w = 0.0;
            if i > 0 {
                off += rx * x[k - 1];
                w += rx;
            }
            if i + 1 < nx {
                off += rx * x[k + 1];
                w += rx;
            }
            if j > 0 {
                off += ry * x[k - nx];
                w += ry;
            }
            if j + 1 < ny {
                off += ry * x[k + nx];
                w += ry;
            } else {
                w += 2.0 * ry;
            }
            y[k] = (1.0 + w) * x[k] - off;
        }
    }
}

struct CgWorkspace {
    rhs: Vec<f64>,
    r: Vec<f64>,
    z: Vec<f64>,
    p: Vec<f64>,
    ap: Vec<f64>,
    diag: Vec<f64>,
}

impl CgWorkspace {
    fn new(n: usize) -> Self {
        Self {
            rhs: vec![0.0; n],
            r: vec![0.0; n],
            z: vec![0.0; n],
            p: vec![0.0; n],
            ap: vec![0.0; n],
            diag: Vec::new(),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Backward-Euler step solved with Jacobi-preconditioned conjugate gradients.
/// The operator is symmetric positive definite on a uniform grid.
fn implicit_step(
    grid: &Grid,
    bc: &[f64],
    rx: f64,
    ry: f64,
    x: &mut [f64],
    ws: &mut CgWorkspace,
) -> Result<()> {
    let n = x.len();
    let nx = grid.nx;
    if ws.diag.is_empty() {
        ws.diag = (0..n)
            .map(|k| {
                let (i, j) = (k % nx, k / nx);
                let mut w = 0.0;
                if i > 0 {
                    w += rx;
                }
                if i + 1 < nx {
                    w += rx;
                }
                if j > 0 {
                    w += ry;
                }
                w += if j + 1 < grid.ny { ry } else { 2.0 * ry };
                1.0 + w
            })
            .collect();
    }
    ws.rhs.copy_from_slice(x);
    let top = (grid.ny - 1) * nx;
    for i in 0..nx {
        ws.rhs[top + i] += 2.0 * ry * bc[i];
    }
    // previous state is the initial guess
    apply_operator(grid, rx, ry, x, &mut ws.ap);
    for k in 0..n {
        ws.r[k] = ws.rhs[k] - ws.ap[k];
        ws.z[k] = ws.r[k] / ws.diag[k];
    }
    ws.p.copy_from_slice(&ws.z);
    let b_norm = dot(&ws.rhs, &ws.rhs).sqrt().max(f64::MIN_POSITIVE);
    let mut rz = dot(&ws.r, &ws.z);
    for _ in 0..(10 * n) {
        if dot(&ws.r, &ws.r).sqrt() <= 1e-13 * b_norm {
            return Ok(());
        }
        apply_operator(grid, rx, ry, &ws.p, &mut ws.ap);
        let pap = dot(&ws.p, &ws.ap);
        if !(pap > 0.0) {
            break;
        }
        let alpha = rz / pap;
        for k in 0..n {
            x[k] += alpha * ws.p[k];
            ws.r[k] -= alpha * ws.ap[k];
            ws.z[k] = ws.r[k] / ws.diag[k];
        }
        let rz_new = dot(&ws.r, &ws.z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            ws.p[k] = ws.z[k] + beta * ws.p[k];
        }
    }
    if dot(&ws.r, &ws.r).sqrt() <= 1e-10 * b_norm {
        Ok(())
    } else {
        Err(Error::Diverged(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_bc_gives_zero_field() {
        for cfg in [DiffusionConfig::default(), DiffusionConfig::implicit()] {
            let f = solve(&Grid::lf(), &[0.0; 20], &cfg).unwrap();
            assert!(f.values.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn steady_state_is_preserved() {
        let grid = Grid::lf();
        let init = ScalarField::constant(grid, 7.5);
        for cfg in [DiffusionConfig::default(), DiffusionConfig::implicit()] {
            let f = solve_with(&grid, &[7.5; 20], &cfg, Some(&init), |_, _| {}).unwrap();
            for v in f.values {
                assert!((v - 7.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn explicit_rejects_unstable_step() {
        let grid = Grid::lf();
        let mut cfg = DiffusionConfig::default();
        cfg.dt = Some(1.01 * cfg.stability_limit(&grid));
        assert!(matches!(solve(&grid, &[1.0; 20], &cfg), Err(Error::UnstableTimeStep { .. })));
    }

    #[test]
    fn auto_step_counts() {
        let cfg = DiffusionConfig::default();
        let hf = cfg.time_stepping(&Grid::hf()).unwrap();
        let lf = cfg.time_stepping(&Grid::lf()).unwrap();
        assert!(hf.dt <= cfg.stability_limit(&Grid::hf()));
        assert!((hf.dt * hf.steps as f64 - 0.1).abs() < 1e-12);
        assert_eq!(lf.steps, 623);
        assert_eq!(DiffusionConfig::implicit().time_stepping(&Grid::hf()).unwrap().steps, 200);
    }

    #[test]
    fn bc_length_checked() {
        assert!(matches!(
            solve(&Grid::lf(), &[1.0; 19], &DiffusionConfig::default()),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn constant_bc_transient_is_below_boundary() {
        let f = solve(&Grid::lf(), &[10.0; 20], &DiffusionConfig::default()).unwrap();
        let m = field_max(&f);
        assert!(m > 0.0 && m < 10.0);
        assert_eq!(field_max(&ScalarField::zeros(Grid::lf())), 0.0);
    }

    #[test]
    fn field_max_non_decreasing_in_time() {
        let mut last = 0.0;
        let mut ok = true;
        solve_with(&Grid::lf(), &[12.0; 20], &DiffusionConfig::default(), None, |_, f| {
            let m = field_max(f);
            ok &= m >= last;
            last = m;
        })
        .unwrap();
        assert!(ok);
    }
}
