use super::bspline::{fit_least_squares, SplineBasis};
use crate::error::Result;

/// `n` abscissae on [0, 1], clustered at both ends.
pub fn cosine_spacing(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| 0.5 * (1.0 - (std::f64::consts::PI * k as f64 / (n - 1) as f64).cos()))
        .collect()
}

/// Closed trailing-edge 4-digit half thickness for thickness ratio `t`.
/// The polynomial vanishes at x = 1 up to rounding; clamp that to zero.
fn half_thickness(t: f64, x: f64) -> f64 {
    let poly = 0.2969 * x.sqrt() - 0.1260 * x - 0.3516 * x * x + 0.2843 * x.powi(3) - 0.1036 * x.powi(4);
    5.0 * t * poly.max(0.0)
}

fn camber(m: f64, p: f64, x: f64) -> f64 {
    if m == 0.0 {
        0.0
    } else if x < p {
        m / (p * p) * (2.0 * p * x - x * x)
    } else {
        m / ((1.0 - p) * (1.0 - p)) * (1.0 - 2.0 * p + 2.0 * p * x - x * x)
    }
}

/// Upper and lower ordinates of a 4-digit section at `xs`. Thickness is
/// added vertically to the camber line so both surfaces share abscissae.
pub fn naca4_surfaces(code: &str, xs: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let d: Vec<f64> = code.chars().filter_map(|c| c.to_digit(10)).map(f64::from).collect();
    assert_eq!(d.len(), 4, "4-digit designation expected");
    let m = d[0] / 100.0;
    let p = d[1] / 10.0;
    let t = (d[2] * 10.0 + d[3]) / 100.0;
    let upper = xs.iter().map(|&x| camber(m, p, x) + half_thickness(t, x)).collect();
    let lower = xs.iter().map(|&x| camber(m, p, x) - half_thickness(t, x)).collect();
    (upper, lower)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Baseline {
    pub basis: SplineBasis,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Fits both surfaces of a section on the default basis. End coefficients
/// are pinned to the leading- and trailing-edge ordinates, which the clamped
/// spline interpolates.
pub fn fit_surfaces(xs: &[f64], upper: &[f64], lower: &[f64]) -> Result<Baseline> {
    let basis = SplineBasis::airfoil();
    let last = basis.n_coeffs() - 1;
    let fit = |ys: &[f64]| {
        fit_least_squares(&basis, xs, ys, &[(0, ys[0]), (last, ys[ys.len() - 1])])
    };
    let upper = fit(upper)?;
    let lower = fit(lower)?;
    Ok(Baseline { basis, lower, upper })
}

/// NACA0012 from `n` cosine-spaced points per surface.
pub fn fit_baseline(n: usize) -> Result<Baseline> {
    let xs = cosine_spacing(n);
    let (u, l) = naca4_surfaces("0012", &xs);
    fit_surfaces(&xs, &u, &l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_trailing_edge() {
        let (u, l) = naca4_surfaces("0012", &[0.0, 1.0]);
        assert_eq!(u, vec![0.0, 0.0]);
        assert_eq!(l, vec![0.0, 0.0]);
        // maximum thickness ~ 12% near 30% chord
        let (u, l) = naca4_surfaces("0012", &[0.3]);
        assert!((u[0] - l[0] - 0.12).abs() < 1e-3);
    }

    #[test]
    fn baseline_fit_accuracy_and_symmetry() {
        let b = fit_baseline(160).unwrap();
        for (u, l) in b.upper.iter().zip(&b.lower) {
            assert!((u + l).abs() < 1e-6);
        }
        let xs = cosine_spacing(160);
        let (u, _) = naca4_surfaces("0012", &xs);
        let err = xs
            .iter()
            .zip(&u)
            .map(|(&x, &y)| (b.basis.eval(&b.upper, x) - y).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-3, "max error {err}");
    }

    #[test]
    fn refit_on_denser_points_is_stable() {
        let a = fit_baseline(160).unwrap();
        let b = fit_baseline(320).unwrap();
        for (x, y) in a.upper.iter().zip(&b.upper) {
            assert!((x - y).abs() <= 1e-4, "{x} vs {y}");
        }
    }
}
