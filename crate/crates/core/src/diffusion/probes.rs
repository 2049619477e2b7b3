use super::grid::{ScalarField, DOMAIN_HEIGHT, DOMAIN_WIDTH};
use crate::error::{check_len, Error, Result};
use crate::interp::{cell_centres, linear};

/// The 30 measurement locations, in metres.
pub const DEFAULT_PROBES: [(f64, f64); 30] = [
    (0.168, 0.263),
    (0.063, 0.043),
    (0.867, 0.445),
    (0.711, 0.292),
    (0.412, 0.329),
    (0.593, 0.193),
    (0.096, 0.227),
    (0.670, 0.104),
    (0.814, 0.064),
    (0.109, 0.083),
    (0.666, 0.216),
    (0.024, 0.399),
    (0.560, 0.276),
    (0.322, 0.374),
    (0.250, 0.009),
    (0.210, 0.343),
    (0.277, 0.128),
    (0.957, 0.136),
    (0.933, 0.496),
    (0.151, 0.175),
    (0.461, 0.409),
    (0.385, 0.470),
    (0.785, 0.032),
    (0.511, 0.091),
    (0.488, 0.458),
    (0.619, 0.307),
    (0.355, 0.361),
    (0.865, 0.425),
    (0.976, 0.163),
    (0.765, 0.249),
];

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSet {
    pub points: Vec<(f64, f64)>,
}

impl Default for ProbeSet {
    fn default() -> Self {
        Self { points: DEFAULT_PROBES.to_vec() }
    }
}

impl ProbeSet {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        for (index, &(x, y)) in points.iter().enumerate() {
            if !(0.0..=DOMAIN_WIDTH).contains(&x) || !(0.0..=DOMAIN_HEIGHT).contains(&y) {
                return Err(Error::ProbeOutside { index, x, y });
            }
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Lower neighbour index and weight along one axis of cell centres,
/// clamped to the outermost centres.
fn axis_weight(coord: f64, spacing: f64, n: usize) -> (usize, f64) {
    let f = (coord / spacing - 0.5).clamp(0.0, (n - 1) as f64);
    let i0 = (f.floor() as usize).min(n - 2);
    (i0, f - i0 as f64)
}

/// Bilinear interpolation from the four surrounding cell centres.
pub fn probe_sample(field: &ScalarField, probes: &ProbeSet) -> Result<Vec<f64>> {
    let g = field.grid;
    probes
        .points
        .iter()
        .enumerate()
        .map(|(index, &(x, y))| {
            if !(0.0..=DOMAIN_WIDTH).contains(&x) || !(0.0..=DOMAIN_HEIGHT).contains(&y) {
                return Err(Error::ProbeOutside { index, x, y });
            }
            let (i0, wx) = axis_weight(x, g.dx, g.nx);
            let (j0, wy) = axis_weight(y, g.dy, g.ny);
            let bottom = (1.0 - wx) * field.at(i0, j0) + wx * field.at(i0 + 1, j0);
            let top = (1.0 - wx) * field.at(i0, j0 + 1) + wx * field.at(i0 + 1, j0 + 1);
            Ok((1.0 - wy) * bottom + wy * top)
        })
        .collect()
}

/// Re-samples values given at `n_in` cell centres of [0, 1] onto `n_out` cell centres.
pub fn resample_cell_centred(values: &[f64], n_out: usize) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::Empty("boundary values"));
    }
    linear(&cell_centres(values.len()), values, &cell_centres(n_out))
}

/// 80 high-fidelity top-boundary values to the 20 low-fidelity ones.
pub fn downsample_bc(hf_values: &[f64]) -> Result<Vec<f64>> {
    check_len(80, hf_values.len())?;
    resample_cell_centred(hf_values, 20)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::Grid;

    #[test]
    fn constant_field_is_reproduced() {
        let f = ScalarField::constant(Grid::hf(), 4.25);
        let s = probe_sample(&f, &ProbeSet::default()).unwrap();
        assert_eq!(s.len(), 30);
        assert!(s.iter().all(|&v| (v - 4.25).abs() < 1e-14));
    }

    #[test]
    fn cell_centre_probe_returns_cell_value() {
        let g = Grid::lf();
        let f = ScalarField::from_fn(g, |x, y| (7.0 * x).sin() + y * y);
        let p = ProbeSet::new(vec![(g.x_centre(3), g.y_centre(11))]).unwrap();
        assert!((probe_sample(&f, &p).unwrap()[0] - f.at(3, 11)).abs() < 1e-14);
    }

    #[test]
    fn linear_field_is_exact() {
        for g in [Grid::lf(), Grid::hf()] {
            let f = ScalarField::from_fn(g, |x, y| x + y);
            let s = probe_sample(&f, &ProbeSet::default()).unwrap();
            assert!((s[0] - 0.431).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_outside_probe() {
        assert!(matches!(
            ProbeSet::new(vec![(0.5, 0.6)]),
            Err(Error::ProbeOutside { index: 0, .. })
        ));
        let f = ScalarField::zeros(Grid::lf());
        let bad = ProbeSet { points: vec![(-0.1, 0.2)] };
        assert!(probe_sample(&f, &bad).is_err());
    }

    #[test]
    fn downsample_examples() {
        assert_eq!(downsample_bc(&[7.0; 80]).unwrap(), vec![7.0; 20]);
        let ramp: Vec<f64> = cell_centres(80).iter().map(|x| 3.0 * x - 1.0).collect();
        let lf = downsample_bc(&ramp).unwrap();
        for (v, x) in lf.iter().zip(cell_centres(20)) {
            assert!((v - (3.0 * x - 1.0)).abs() < 1e-12);
        }
        assert!(downsample_bc(&[1.0; 20]).is_err());
    }
}
