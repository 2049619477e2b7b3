use super::{pruning, RefinedBounds, SolutionMatrix, Strategy};
use crate::airfoil::COEFFS_PER_SURFACE;
use crate::domain::Bounds;
use crate::error::{check_len, Error, Result};

const DEGENERATE_WIDTH: f64 = 1e-9;

/// Column means scaled by `eta`, clamped to the original box. Lower-surface
/// dimensions become `[eta * mean, 0]`, upper-surface ones `[0, eta * mean]`.
pub fn aid_refine(s: &SolutionMatrix, eta: f64, original: &Bounds) -> Result<RefinedBounds> {
    let m = 2 * COEFFS_PER_SURFACE;
    check_len(m, original.dim())?;
    check_len(m, s.rows[0].len())?;
    if !(eta > 0.0) {
        return Err(Error::InvalidConfig(format!("eta must be positive, got {eta}")));
    }
    let means = s.column_means();
    let mut lo = Vec::with_capacity(m);
    let mut hi = Vec::with_capacity(m);
    for (i, &xbar) in means.iter().enumerate() {
        let scaled = original.clamp(i, eta * xbar);
        let (mut l, mut u) = if i < COEFFS_PER_SURFACE {
            (scaled, original.clamp(i, 0.0))
        } else {
            (original.clamp(i, 0.0), scaled)
        };
        if l == u {
            // keep the box open, widening towards the interior of the original
            if u + DEGENERATE_WIDTH <= original.upper()[i] {
                u += DEGENERATE_WIDTH;
            } else {
                l -= DEGENERATE_WIDTH;
            }
        }
        lo.push(l);
        hi.push(u);
    }
    let bounds = Bounds::new(lo, hi)?;
    let pruning_fraction = pruning(&bounds, original);
    Ok(RefinedBounds {
        bounds,
        strategy: Strategy::ColumnAverage { eta },
        n_solutions: s.rows.len(),
        pruning_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn original() -> Bounds {
        let mut lo = vec![-0.24; 15];
        lo.extend(vec![0.0; 15]);
        let mut hi = vec![0.0; 15];
        hi.extend(vec![0.24; 15]);
        Bounds::new(lo, hi).unwrap()
    }

    fn row(lower: f64, upper: f64) -> Vec<f64> {
        let mut r = vec![lower; 15];
        r.extend(vec![upper; 15]);
        r
    }

    #[test]
    fn identical_rows_give_their_own_bounds() {
        let s = SolutionMatrix::new(vec![row(-0.05, 0.07), row(-0.05, 0.07)]).unwrap();
        let r = aid_refine(&s, 1.0, &original()).unwrap();
        assert_eq!(r.bounds.lower()[0], -0.05);
        assert_eq!(r.bounds.upper()[0], 0.0);
        assert_eq!(r.bounds.lower()[20], 0.0);
        assert_eq!(r.bounds.upper()[20], 0.07);
    }

    #[test]
    fn scaling_and_clamping() {
        let s = SolutionMatrix::new(vec![row(-0.20, 0.10)]).unwrap();
        let r = aid_refine(&s, 1.3, &original()).unwrap();
        assert!((r.bounds.upper()[15] - 0.13).abs() < 1e-15);
        assert_eq!(r.bounds.lower()[0], -0.24);
        assert!(r.bounds.nested_in(&original()));
    }

    #[test]
    fn zero_average_is_widened() {
        let s = SolutionMatrix::new(vec![row(0.0, 0.0)]).unwrap();
        let r = aid_refine(&s, 1.0, &original()).unwrap();
        for i in 0..30 {
            assert!(r.bounds.width(i) > 0.0);
        }
        assert!(r.bounds.nested_in(&original()));
    }

    proptest! {
        #[test]
        fn nested_and_monotone_in_eta(
            rows in prop::collection::vec(
                (prop::collection::vec(-0.24f64..=0.0, 15), prop::collection::vec(0.0f64..=0.24, 15)),
                1..6,
            ),
            e1 in 0.5f64..2.0,
            de in 0.0f64..1.0,
        ) {
            let rows: Vec<Vec<f64>> = rows.into_iter().map(|(mut l, u)| { l.extend(u); l }).collect();
            let s = SolutionMatrix::new(rows).unwrap();
            let a = aid_refine(&s, e1, &original()).unwrap();
            let b = aid_refine(&s, e1 + de, &original()).unwrap();
            prop_assert!(a.bounds.nested_in(&original()));
            prop_assert!(b.bounds.nested_in(&original()));
            prop_assert!(a.bounds.nested_in(&b.bounds));
        }
    }
}
