use nalgebra::{DMatrix, DVector};

use super::{pruning, RefinedBounds, SolutionMatrix, Strategy};
use crate::domain::Bounds;
use crate::error::{check_len, Error, Result};
use crate::interp::linspace01;

pub const DEFAULT_DEGREES: [usize; 4] = [1, 2, 3, 4];

/// Least-squares monomial coefficients (constant term first).
pub fn fit_polynomial(xs: &[f64], ys: &[f64], degree: usize) -> Result<Vec<f64>> {
    check_len(xs.len(), ys.len())?;
    if xs.len() <= degree {
        return Err(Error::RankDeficient);
    }
    let a = DMatrix::from_fn(xs.len(), degree + 1, |r, c| xs[r].powi(c as i32));
    let svd = a.svd(true, true);
    if !(svd.singular_values.min() > 1e-12 * svd.singular_values.max()) {
        return Err(Error::RankDeficient);
    }
    let sol = svd.solve(&DVector::from_column_slice(ys), 0.0).map_err(|_| Error::RankDeficient)?;
    Ok(sol.iter().copied().collect())
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Fits every row with every degree on a unit abscissa, evaluates the fits
/// on `hf_dim` points and takes the overall maximum (capped at `s_ub`) as
/// a single upper bound for all dimensions. The lower bound stays 0.
pub fn sfr_refine(s: &SolutionMatrix, degrees: &[usize], hf_dim: usize, s_ub: f64) -> Result<RefinedBounds> {
    if degrees.is_empty() {
        return Err(Error::Empty("polynomial degrees"));
    }
    let lf = linspace01(s.rows[0].len());
    let hf = linspace01(hf_dim);
    let mut top = f64::NEG_INFINITY;
    for row in &s.rows {
        for &d in degrees {
            let c = fit_polynomial(&lf, row, d)?;
            top = hf.iter().map(|&x| horner(&c, x)).fold(top, f64::max);
        }
    }
    let mut ub = top.min(s_ub);
    if !(ub > 0.0) {
        ub = 1e-9;
    }
    let original = Bounds::uniform(hf_dim, 0.0, s_ub)?;
    let bounds = Bounds::uniform(hf_dim, 0.0, ub)?;
    let pruning_fraction = pruning(&bounds, &original);
    Ok(RefinedBounds {
        bounds,
        strategy: Strategy::PolynomialEnvelope { degrees: degrees.to_vec() },
        n_solutions: s.rows.len(),
        pruning_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::component_rng;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::Rng;

    #[test]
    fn constant_rows() {
        let s = SolutionMatrix::new(vec![vec![10.0; 20]; 3]).unwrap();
        let r = sfr_refine(&s, &DEFAULT_DEGREES, 80, 30.0).unwrap();
        assert_eq!(r.bounds.dim(), 80);
        for i in 0..80 {
            assert!((r.bounds.upper()[i] - 10.0).abs() < 1e-9);
            assert_eq!(r.bounds.lower()[i], 0.0);
        }
        assert!((r.pruning_fraction - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn linear_ramp() {
        let row: Vec<f64> = linspace01(20).iter().map(|x| 20.0 * x).collect();
        let s = SolutionMatrix::new(vec![row]).unwrap();
        let r = sfr_refine(&s, &[1], 80, 30.0).unwrap();
        assert!((r.bounds.upper()[0] - 20.0).abs() < 1e-9);
    }

    #[test]
    fn capped_at_upper_limit() {
        let row: Vec<f64> = linspace01(20).iter().map(|x| 60.0 * x).collect();
        let s = SolutionMatrix::new(vec![row]).unwrap();
        let r = sfr_refine(&s, &DEFAULT_DEGREES, 80, 30.0).unwrap();
        assert_eq!(r.bounds.upper()[5], 30.0);
        assert_eq!(r.pruning_fraction, 0.0);
    }

    #[test]
    fn polynomial_fit_is_exact_for_its_degree() {
        let xs = linspace01(20);
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 - 3.0 * x + 0.5 * x.powi(4)).collect();
        let c = fit_polynomial(&xs, &ys, 4).unwrap();
        for (got, want) in c.iter().zip([1.0, -3.0, 0.0, 0.0, 0.5]) {
            assert!((got - want).abs() < 1e-9);
        }
        assert!(fit_polynomial(&xs[..3], &ys[..3], 4).is_err());
    }

    proptest! {
        #[test]
        fn row_order_does_not_matter(seed in any::<u64>()) {
            let mut rng = component_rng(seed, 0);
            let mut rows: Vec<Vec<f64>> =
                (0..6).map(|_| (0..20).map(|_| rng.random_range(0.0..30.0)).collect()).collect();
            let a = sfr_refine(&SolutionMatrix::new(rows.clone()).unwrap(), &DEFAULT_DEGREES, 80, 30.0).unwrap();
            rows.shuffle(&mut rng);
            let b = sfr_refine(&SolutionMatrix::new(rows).unwrap(), &DEFAULT_DEGREES, 80, 30.0).unwrap();
            prop_assert_eq!(a.bounds, b.bounds);
        }
    }
}
