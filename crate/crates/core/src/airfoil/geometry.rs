use serde::{Deserialize, Serialize};

use super::bspline::SplineBasis;
use super::naca::cosine_spacing;
use super::BOUND_MARGIN;
use crate::domain::Bounds;
use crate::error::{check_len, Error, Result};

pub const COEFFS_PER_SURFACE: usize = 15;

/// Lower-surface coefficients (non-positive) followed by upper-surface ones
/// (non-negative) form the 30-dimensional design vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AirfoilDesign {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl AirfoilDesign {
    pub fn from_slice(x: &[f64]) -> Result<Self> {
        check_len(2 * COEFFS_PER_SURFACE, x.len())?;
        Ok(Self {
            lower: x[..COEFFS_PER_SURFACE].to_vec(),
            upper: x[COEFFS_PER_SURFACE..].to_vec(),
        })
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.lower.clone();
        v.extend_from_slice(&self.upper);
        v
    }
}

/// Lower dims `[γ(c_L - m), 0]`, upper dims `[0, γ(c_U + m)]`.
pub fn original_bounds(lower: &[f64], upper: &[f64], gamma: f64) -> Result<Bounds> {
    check_len(lower.len(), upper.len())?;
    if !(gamma > 0.0) {
        return Err(Error::InvalidConfig(format!("gamma must be positive, got {gamma}")));
    }
    let mut lo: Vec<f64> = lower.iter().map(|c| gamma * (c - BOUND_MARGIN)).collect();
    let mut hi = vec![0.0; lower.len()];
    lo.extend(std::iter::repeat_n(0.0, upper.len()));
    hi.extend(upper.iter().map(|c| gamma * (c + BOUND_MARGIN)));
    Bounds::new(lo, hi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    /// Upper surface from trailing to leading edge, then lower surface back
    /// to the trailing edge; the leading-edge point appears once per surface.
    pub coords: Vec<[f64; 2]>,
    /// False when the upper surface dips below the lower one anywhere.
    pub valid: bool,
}

pub fn realize_geometry(design: &AirfoilDesign, basis: &SplineBasis, n_points: usize) -> Geometry {
    let xs = cosine_spacing(n_points.max(2));
    let yu: Vec<f64> = xs.iter().map(|&x| basis.eval(&design.upper, x)).collect();
    let yl: Vec<f64> = xs.iter().map(|&x| basis.eval(&design.lower, x)).collect();
    let valid = yu.iter().zip(&yl).all(|(u, l)| u >= l);
    let mut coords = Vec::with_capacity(2 * xs.len());
    for k in (0..xs.len()).rev() {
        coords.push([xs[k], yu[k]]);
    }
    for k in 0..xs.len() {
        coords.push([xs[k], yl[k]]);
    }
    Geometry { coords, valid }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airfoil::{fit_baseline, naca4_surfaces};

    #[test]
    fn bound_arithmetic() {
        let b = original_bounds(&[-0.04], &[0.05], 3.0).unwrap();
        assert!((b.lower()[0] + 0.12003).abs() < 1e-15);
        assert_eq!(b.upper()[0], 0.0);
        assert_eq!(b.lower()[1], 0.0);
        assert!((b.upper()[1] - 0.15003).abs() < 1e-15);
        let b = original_bounds(&[-0.04], &[0.05], 1.0).unwrap();
        assert!((b.lower()[0] - (-0.04 - 1e-5)).abs() < 1e-15);
        assert!((b.upper()[1] - (0.05 + 1e-5)).abs() < 1e-15);
        assert!(original_bounds(&[-0.04], &[0.05], 0.0).is_err());
    }

    #[test]
    fn baseline_geometry_matches_formula() {
        let base = fit_baseline(160).unwrap();
        let design = AirfoilDesign { lower: base.lower.clone(), upper: base.upper.clone() };
        let g = realize_geometry(&design, &base.basis, 160);
        assert!(g.valid);
        assert_eq!(g.coords.len(), 320);
        assert_eq!(g.coords[0][0], 1.0);
        assert_eq!(g.coords[159][0], 0.0);
        for c in &g.coords[..160] {
            let (u, _) = naca4_surfaces("0012", &[c[0]]);
            assert!((c[1] - u[0]).abs() <= 1e-3);
        }
    }

    #[test]
    fn zero_design_is_flat_plate() {
        let design = AirfoilDesign { lower: vec![0.0; 15], upper: vec![0.0; 15] };
        let g = realize_geometry(&design, &SplineBasis::airfoil(), 50);
        assert!(g.coords.iter().all(|c| c[1] == 0.0));
        assert!(g.valid);
    }

    #[test]
    fn crossed_surfaces_are_flagged() {
        let design = AirfoilDesign { lower: vec![0.01; 15], upper: vec![0.0; 15] };
        assert!(!realize_geometry(&design, &SplineBasis::airfoil(), 50).valid);
    }
}
