use rand::seq::SliceRandom;
use rand::Rng;

use crate::domain::Bounds;
use crate::error::{Error, Result};

/// Latin hypercube: each dimension gets exactly one point per equal-width
/// stratum, jittered uniformly inside it, with independent stratum orders.
pub fn lhs_sample<R: Rng + ?Sized>(bounds: &Bounds, n: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::Empty("sample count"));
    }
    let m = bounds.dim();
    let mut out = vec![vec![0.0; m]; n];
    let mut order: Vec<usize> = (0..n).collect();
    for d in 0..m {
        order.shuffle(rng);
        let (lo, w) = (bounds.lower()[d], bounds.width(d));
        for (row, &stratum) in out.iter_mut().zip(&order) {
            let u: f64 = rng.random();
            row[d] = (lo + (stratum as f64 + u) / n as f64 * w).min(bounds.upper()[d]);
        }
    }
    Ok(out)
}
