use super::grid::Grid;
use super::probes::{probe_sample, ProbeSet};
use super::solver::{solve, DiffusionConfig};
use crate::domain::HfEvaluator;
use crate::error::{check_len, Result};

/// Boundary vector -> probe readings at `t_max`.
#[derive(Debug, Clone)]
pub struct ProbeEvaluator {
    pub grid: Grid,
    pub config: DiffusionConfig,
    pub probes: ProbeSet,
}

impl ProbeEvaluator {
    pub fn hf() -> Self {
        Self { grid: Grid::hf(), config: DiffusionConfig::default(), probes: ProbeSet::default() }
    }
}

impl HfEvaluator for ProbeEvaluator {
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        let field = solve(&self.grid, x, &self.config)?;
        probe_sample(&field, &self.probes)
    }
}

/// Boundary vector -> every cell value; its maximum is the surrogate label.
#[derive(Debug, Clone)]
pub struct FieldEvaluator {
    pub grid: Grid,
    pub config: DiffusionConfig,
}

impl FieldEvaluator {
    pub fn lf() -> Self {
        Self { grid: Grid::lf(), config: DiffusionConfig::default() }
    }
}

impl HfEvaluator for FieldEvaluator {
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(solve(&self.grid, x, &self.config)?.values)
    }
}

/// Probe readings as a matrix-vector product.
///
/// With a zero initial field the discrete solution operator is linear in the
/// boundary data, so column `i` is the probe response to a unit value in
/// boundary cell `i`. Results match [`ProbeEvaluator`] up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearResponseEvaluator {
    /// `q x nx`, row-major.
    pub response: Vec<f64>,
    pub q: usize,
    pub nx: usize,
}

impl LinearResponseEvaluator {
    pub fn build(base: &ProbeEvaluator) -> Result<Self> {
        let nx = base.grid.nx;
        let q = base.probes.len();
        let columns: Vec<Vec<f64>> = (0..nx)
            .map(|i| {
                let mut unit = vec![0.0; nx];
                unit[i] = 1.0;
                base.evaluate(&unit)
            })
            .collect::<Result<_>>()?;
        let mut response = vec![0.0; q * nx];
        for (i, col) in columns.iter().enumerate() {
            for p in 0..q {
                response[p * nx + i] = col[p];
            }
        }
        Ok(Self { response, q, nx })
    }
}

impl HfEvaluator for LinearResponseEvaluator {
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.nx, x.len())?;
        Ok(self
            .response
            .chunks_exact(self.nx)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_response_matches_direct_solves_on_lf() {
        let base = ProbeEvaluator {
            grid: Grid::lf(),
            config: DiffusionConfig::default(),
            probes: ProbeSet::default(),
        };
        let lin = LinearResponseEvaluator::build(&base).unwrap();
        let bc: Vec<f64> = (0..20).map(|i| 15.0 + 10.0 * (0.7 * i as f64).sin()).collect();
        let direct = base.evaluate(&bc).unwrap();
        let fast = lin.evaluate(&bc).unwrap();
        for (a, b) in direct.iter().zip(&fast) {
            assert!((a - b).abs() < 1e-11 * a.abs().max(1.0));
        }
    }
}
