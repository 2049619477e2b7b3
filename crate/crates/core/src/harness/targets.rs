use serde::{Deserialize, Serialize};

use crate::airfoil::{cosine_spacing, fit_surfaces, naca4_surfaces};
use crate::dataset::Problem;
use crate::domain::{HfEvaluator, Reduction, TargetSpec};
use crate::error::Result;
use crate::interp::cell_centres;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    /// 6 + 4 sin(3πξ) along the top wall.
    Sinusoidal,
    /// 2 + 8ξ along the top wall.
    Linear,
    /// A cambered 10% section, projected into the coefficient sign pattern.
    Naca2410,
}

impl TargetKind {
    pub fn problem(self) -> Problem {
        match self {
            TargetKind::Sinusoidal | TargetKind::Linear => Problem::Sfr,
            TargetKind::Naca2410 => Problem::Aid,
        }
    }
}

/// Target vector together with the design that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetRecord {
    pub kind: TargetKind,
    pub ground_truth: Vec<f64>,
    pub target: TargetSpec,
}

/// Boundary values of a reconstruction target at the 80 high-fidelity top cells.
pub fn sfr_boundary(kind: TargetKind) -> Vec<f64> {
    cell_centres(80)
        .into_iter()
        .map(|x| match kind {
            TargetKind::Sinusoidal => 6.0 + 4.0 * (3.0 * std::f64::consts::PI * x).sin(),
            TargetKind::Linear => 2.0 + 8.0 * x,
            TargetKind::Naca2410 => panic!("not a boundary target"),
        })
        .collect()
}

/// Spline coefficients (lower then upper) of the airfoil target. Lower
/// coefficients are capped at 0 and upper ones floored at 0 so the design
/// respects the coefficient sign bounds.
pub fn aid_design() -> Result<Vec<f64>> {
    let xs = cosine_spacing(160);
    let (u, l) = naca4_surfaces("2410", &xs);
    let fit = fit_surfaces(&xs, &u, &l)?;
    let mut x: Vec<f64> = fit.lower.iter().map(|c| c.min(0.0)).collect();
    x.extend(fit.upper.iter().map(|c| c.max(0.0)));
    Ok(x)
}

/// Runs `hf` on the ground-truth design. Boundary targets summarize with the
/// maximum probe reading, the airfoil with the maximum negated Cp.
pub fn make_target(kind: TargetKind, hf: &dyn HfEvaluator) -> Result<TargetRecord> {
    let ground_truth = match kind {
        TargetKind::Naca2410 => aid_design()?,
        _ => sfr_boundary(kind),
    };
    let values = hf.evaluate(&ground_truth)?;
    Ok(TargetRecord { kind, ground_truth, target: TargetSpec::new(values, Reduction::Max)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::{DiffusionConfig, Grid, ProbeEvaluator, ProbeSet};

    fn lf_probes() -> ProbeEvaluator {
        ProbeEvaluator { grid: Grid::lf(), config: DiffusionConfig::default(), probes: ProbeSet::default() }
    }

    #[test]
    fn boundary_shapes() {
        let s = sfr_boundary(TargetKind::Sinusoidal);
        assert_eq!(s.len(), 80);
        assert!(s.iter().all(|v| (2.0..=10.0).contains(v)));
        let l = sfr_boundary(TargetKind::Linear);
        assert!(l.windows(2).all(|w| w[1] > w[0]));
        assert!((l[0] - 2.05).abs() < 1e-12);
    }

    #[test]
    fn flat_boundary_target_stays_below_boundary() {
        struct Const;
        impl HfEvaluator for Const {
            fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
                lf_probes().evaluate(&crate::diffusion::resample_cell_centred(x, 20)?)
            }
        }
        let t = TargetSpec::new(Const.evaluate(&[7.0; 80]).unwrap(), Reduction::Max).unwrap();
        assert!(t.info < 7.0 && t.info > 0.0);
        let zero = TargetSpec::new(Const.evaluate(&[0.0; 80]).unwrap(), Reduction::Max).unwrap();
        assert!(zero.values.iter().all(|&v| v == 0.0));
        assert_eq!(zero.info, 0.0);
    }

    #[test]
    fn airfoil_design_signs() {
        let x = aid_design().unwrap();
        assert_eq!(x.len(), 30);
        assert!(x[..15].iter().all(|&c| c <= 0.0));
        assert!(x[15..].iter().all(|&c| c >= 0.0));
    }
}
