use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::interp::linspace01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BcShape {
    Linear,
    Parabolic,
    Sinusoidal,
}

/// Every random draw behind one generated boundary, so a draw can be
/// replayed or a branch forced in tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BcRecipe {
    pub shape: BcShape,
    pub sigma: f64,
    pub noise: Vec<f64>,
    pub coeffs: [f64; 3],
    /// Substitutes for out-of-range entries, one per position.
    pub replacements: Vec<f64>,
    pub reverse: bool,
}

impl BcRecipe {
    pub fn draw<R: Rng + ?Sized>(lf_n: usize, s_top: f64, rng: &mut R) -> Self {
        let shape = match rng.random_range(0..3u8) {
            0 => BcShape::Linear,
            1 => BcShape::Parabolic,
            _ => BcShape::Sinusoidal,
        };
        let sigma = rng.random_range(0.0..100.0);
        let normal = Normal::new(0.0, sigma).expect("sigma is finite and non-negative");
        let noise = (0..lf_n).map(|_| normal.sample(rng)).collect();
        let coeffs = [rng.random_range(0.0..10.0), rng.random_range(0.0..10.0), rng.random_range(0.0..10.0)];
        let replacements = (0..lf_n).map(|_| rng.random_range(0.0..s_top)).collect();
        let reverse = rng.random_bool(0.5);
        Self { shape, sigma, noise, coeffs, replacements, reverse }
    }

    /// Shape plus noise; entries whose magnitude exceeds `s_top` take their
    /// replacement value; optional reversal; absolute value.
    pub fn realize(&self, s_top: f64) -> Vec<f64> {
        let [r1, r2, r3] = self.coeffs;
        let mut bc: Vec<f64> = linspace01(self.noise.len())
            .into_iter()
            .zip(&self.noise)
            .map(|(x, g)| {
                let base = match self.shape {
                    BcShape::Linear => r1 * x + r2,
                    BcShape::Parabolic => r1 * x * x + r2 * x + r3,
                    BcShape::Sinusoidal => r1 * (r3 * x).sin() + r2,
                };
                base + g
            })
            .collect();
        for (v, &r) in bc.iter_mut().zip(&self.replacements) {
            if v.abs() > s_top {
                *v = r;
            }
        }
        if self.reverse {
            bc.reverse();
        }
        bc.into_iter().map(f64::abs).collect()
    }
}

pub fn generate_bc<R: Rng + ?Sized>(lf_n: usize, s_top: f64, rng: &mut R) -> Vec<f64> {
    BcRecipe::draw(lf_n, s_top, rng).realize(s_top)
}
