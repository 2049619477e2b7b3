use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// Clamped B-spline basis on [0, 1] with a frozen knot vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineBasis {
    degree: usize,
    knots: Vec<f64>,
}

impl SplineBasis {
    pub fn new(degree: usize, knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 * (degree + 1) {
            return Err(Error::InvalidConfig("too few knots for the degree".into()));
        }
        if knots.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidConfig("knot vector must be non-decreasing".into()));
        }
        Ok(Self { degree, knots })
    }

    /// Degree 5 with 15 coefficients; interior knots cluster towards the
    /// leading edge as (k/10)^3.
    pub fn airfoil() -> Self {
        let degree = 5;
        let mut knots = vec![0.0; degree + 1];
        knots.extend((1..10).map(|k| (k as f64 / 10.0).powi(3)));
        knots.extend(vec![1.0; degree + 1]);
        Self::new(degree, knots).expect("static knot vector")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn n_coeffs(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// Values of all basis functions at `x` (Cox-de Boor). The right end is
    /// treated as belonging to the last non-empty span.
    pub fn basis_at(&self, x: f64) -> Vec<f64> {
        let p = self.degree;
        let t = &self.knots;
        let n = self.n_coeffs();
        let lo = t[p];
        let hi = t[n];
        let x = x.clamp(lo, hi);
        // span index s with t[s] <= x < t[s+1]
        let mut s = p;
        while s < n - 1 && x >= t[s + 1] {
            s += 1;
        }
        let mut out = vec![0.0; n];
        let mut nloc = vec![0.0; p + 1];
        nloc[0] = 1.0;
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        for d in 1..=p {
            left[d] = x - t[s + 1 - d];
            right[d] = t[s + d] - x;
            let mut saved = 0.0;
            for r in 0..d {
                let denom = right[r + 1] + left[d - r];
                let tmp = if denom == 0.0 { 0.0 } else { nloc[r] / denom };
                nloc[r] = saved + right[r + 1] * tmp;
                saved = left[d - r] * tmp;
            }
            nloc[d] = saved;
        }
        for (r, v) in nloc.into_iter().enumerate() {
            out[s - p + r] = v;
        }
        out
    }

    pub fn eval(&self, coeffs: &[f64], x: f64) -> f64 {
        self.basis_at(x).iter().zip(coeffs).map(|(b, c)| b * c).sum()
    }
}

/// Least-squares coefficients for samples `(xs, ys)`. Coefficients listed in
/// `pinned` are held at the given values and excluded from the solve.
pub fn fit_least_squares(
    basis: &SplineBasis,
    xs: &[f64],
    ys: &[f64],
    pinned: &[(usize, f64)],
) -> Result<Vec<f64>> {
    check_len(xs.len(), ys.len())?;
    let n = basis.n_coeffs();
    let free: Vec<usize> = (0..n).filter(|i| !pinned.iter().any(|(p, _)| p == i)).collect();
    if xs.len() < free.len() {
        return Err(Error::RankDeficient);
    }
    let mut a = DMatrix::<f64>::zeros(xs.len(), free.len());
    let mut b = DVector::<f64>::zeros(xs.len());
    for (r, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        let row = basis.basis_at(x);
        let fixed: f64 = pinned.iter().map(|&(i, v)| row[i] * v).sum();
        b[r] = y - fixed;
        for (c, &i) in free.iter().enumerate() {
            a[(r, c)] = row[i];
        }
    }
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-12 * smax) {
        return Err(Error::RankDeficient);
    }
    let sol = svd.solve(&b, 0.0).map_err(|_| Error::RankDeficient)?;
    let mut coeffs = vec![0.0; n];
    for &(i, v) in pinned {
        coeffs[i] = v;
    }
    for (c, &i) in free.iter().enumerate() {
        coeffs[i] = sol[c];
    }
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn airfoil_basis_shape() {
        let b = SplineBasis::airfoil();
        assert_eq!(b.degree(), 5);
        assert_eq!(b.knots().len(), 21);
        assert_eq!(b.n_coeffs(), 15);
    }

    #[test]
    fn partition_of_unity_and_endpoints() {
        let b = SplineBasis::airfoil();
        for k in 0..=200 {
            let x = k as f64 / 200.0;
            let s: f64 = b.basis_at(x).iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "x={x}");
        }
        let c: Vec<f64> = (0..15).map(|i| i as f64 * 0.3 - 1.0).collect();
        assert!((b.eval(&c, 0.0) - c[0]).abs() < 1e-14);
        assert!((b.eval(&c, 1.0) - c[14]).abs() < 1e-14);
    }

    #[test]
    fn reproduces_polynomials_of_the_degree() {
        let b = SplineBasis::airfoil();
        // cosine spacing puts samples in the short spans near x = 0
        let xs: Vec<f64> =
            (0..100).map(|k| 0.5 * (1.0 - (std::f64::consts::PI * k as f64 / 99.0).cos())).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 - 2.0 * x + x.powi(5)).collect();
        let c = fit_least_squares(&b, &xs, &ys, &[]).unwrap();
        for (&x, &y) in xs.iter().zip(&ys) {
            assert!((b.eval(&c, x) - y).abs() < 1e-10);
        }
    }

    #[test]
    fn too_few_points_is_rank_deficient() {
        let b = SplineBasis::airfoil();
        let xs = [0.1, 0.2, 0.3];
        assert!(matches!(fit_least_squares(&b, &xs, &[0.0; 3], &[]), Err(Error::RankDeficient)));
        // enough points, all in one span
        let xs: Vec<f64> = (0..40).map(|k| 0.5 + k as f64 * 1e-3).collect();
        assert!(matches!(fit_least_squares(&b, &xs, &[0.0; 40], &[]), Err(Error::RankDeficient)));
    }
}
