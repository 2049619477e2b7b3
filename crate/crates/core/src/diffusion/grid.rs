use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DOMAIN_WIDTH: f64 = 1.0;
pub const DOMAIN_HEIGHT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
}

impl Grid {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidConfig(format!("grid {nx}x{ny} needs at least 2 cells per axis")));
        }
        Ok(Self { nx, ny, dx: DOMAIN_WIDTH / nx as f64, dy: DOMAIN_HEIGHT / ny as f64 })
    }

    /// 20 x 20 cells.
    pub fn lf() -> Self {
        Self::new(20, 20).expect("static grid")
    }

    /// 80 x 80 cells.
    pub fn hf() -> Self {
        Self::new(80, 80).expect("static grid")
    }

    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn x_centre(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx
    }

    pub fn y_centre(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dy
    }
}

/// Cell values stored row by row, row 0 at the bottom wall.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![0.0; grid.cells()] }
    }

    pub fn constant(grid: Grid, v: f64) -> Self {
        Self { grid, values: vec![v; grid.cells()] }
    }

    /// Samples `f(x, y)` at every cell centre.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.cells());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                values.push(f(grid.x_centre(i), grid.y_centre(j)));
            }
        }
        Self { grid, values }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.nx + i]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.grid.nx..(j + 1) * self.grid.nx]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_cover_the_domain() {
        for g in [Grid::lf(), Grid::hf()] {
            assert!((g.nx as f64 * g.dx - 1.0).abs() < 1e-12);
            assert!((g.ny as f64 * g.dy - 0.5).abs() < 1e-12);
        }
        let lf = Grid::lf();
        assert_eq!((lf.cells(), lf.dx, lf.dy), (400, 0.05, 0.025));
        let hf = Grid::hf();
        assert_eq!((hf.cells(), hf.dx, hf.dy), (6400, 0.0125, 0.00625));
    }
}
