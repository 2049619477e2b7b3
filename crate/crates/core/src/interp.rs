//! Piecewise-linear interpolation on sorted abscissae.

use crate::error::{check_len, Error, Result};

/// Evaluates the piecewise-linear interpolant through `(xs, ys)` at `x`.
/// Outside `[xs[0], xs[n-1]]` the end values are held constant.
pub fn linear_at(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    // first index with xs[i] > x
    let hi = xs.partition_point(|&v| v <= x);
    let lo = hi - 1;
    let span = xs[hi] - xs[lo];
    if span == 0.0 {
        return ys[lo];
    }
    let w = (x - xs[lo]) / span;
    ys[lo] + w * (ys[hi] - ys[lo])
}

pub fn linear(xs: &[f64], ys: &[f64], targets: &[f64]) -> Result<Vec<f64>> {
    check_len(xs.len(), ys.len())?;
    if xs.is_empty() {
        return Err(Error::Empty("interpolation abscissae"));
    }
    if xs.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidConfig("interpolation abscissae must be sorted".into()));
    }
    Ok(targets.iter().map(|&t| linear_at(xs, ys, t)).collect())
}

/// Cell-centre abscissae `(i + 1/2) / n` of `n` equal cells on `[0, 1]`.
pub fn cell_centres(n: usize) -> Vec<f64> {
    (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect()
}

/// `n` equally spaced points on `[0, 1]`, endpoints included.
pub fn linspace01(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_nodes_and_midpoints() {
        let xs = [0.0, 1.0, 3.0];
        let ys = [1.0, 3.0, -1.0];
        assert_eq!(linear_at(&xs, &ys, 1.0), 3.0);
        assert_eq!(linear_at(&xs, &ys, 0.5), 2.0);
        assert_eq!(linear_at(&xs, &ys, 2.0), 1.0);
        assert_eq!(linear_at(&xs, &ys, -4.0), 1.0);
        assert_eq!(linear_at(&xs, &ys, 9.0), -1.0);
    }

    #[test]
    fn rejects_unsorted() {
        assert!(linear(&[0.0, 2.0, 1.0], &[0.0; 3], &[0.5]).is_err());
    }
}
