use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    /// Negative slope 0.3.
    LeakyRelu,
    Linear,
}

const LEAKY_SLOPE: f64 = 0.3;

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::LeakyRelu => {
                if z > 0.0 {
                    z
                } else {
                    LEAKY_SLOPE * z
                }
            }
            Activation::Linear => z,
        }
    }

    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::LeakyRelu => {
                if z > 0.0 {
                    1.0
                } else {
                    LEAKY_SLOPE
                }
            }
            Activation::Linear => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Dense {
    /// `inputs x outputs`
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Net {
    pub layers: Vec<Dense>,
}

/// Intermediate values kept for back-propagation.
pub(crate) struct Tape {
    /// Input to each layer.
    inputs: Vec<Array2<f64>>,
    /// Pre-activations of hidden layers.
    pre: Vec<Array2<f64>>,
    /// Inverted-dropout multipliers of hidden layers, if any.
    masks: Vec<Option<Array2<f64>>>,
    pub output: Array2<f64>,
}

impl Net {
    /// Hidden layers draw U(-sqrt(6/fan_in), sqrt(6/fan_in)); biases and the
    /// output layer start at zero, so an untrained net predicts the label mean.
    pub fn init<R: Rng + ?Sized>(input_dim: usize, hidden: &[usize], rng: &mut R) -> Self {
        let mut widths = vec![input_dim];
        widths.extend_from_slice(hidden);
        let mut layers: Vec<Dense> = widths
            .windows(2)
            .map(|w| {
                let limit = (6.0 / w[0] as f64).sqrt();
                let weights = Array2::from_shape_simple_fn((w[0], w[1]), || rng.random_range(-limit..limit));
                Dense { w: weights, b: Array1::zeros(w[1]) }
            })
            .collect();
        let last = *widths.last().expect("input width");
        layers.push(Dense { w: Array2::zeros((last, 1)), b: Array1::zeros(1) });
        Net { layers }
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(|l| l.w.len() + l.b.len()).sum()
    }

    pub fn infer(&self, x: ArrayView2<f64>, act: Activation) -> Array2<f64> {
        let last = self.layers.len() - 1;
        let mut a = x.to_owned();
        for (k, l) in self.layers.iter().enumerate() {
            let mut z = a.dot(&l.w) + &l.b;
            if k < last {
                z.mapv_inplace(|v| act.apply(v));
            }
            a = z;
        }
        a
    }

    /// Forward pass recording a tape; `dropout` supplies rates and an RNG
    /// during training.
    pub fn forward<R: Rng + ?Sized>(
        &self,
        x: ArrayView2<f64>,
        act: Activation,
        mut dropout: Option<(&[f64], &mut R)>,
    ) -> Tape {
        let last = self.layers.len() - 1;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(last);
        let mut masks = Vec::with_capacity(last);
        let mut a = x.to_owned();
        for (k, l) in self.layers.iter().enumerate() {
            let z = a.dot(&l.w) + &l.b;
            inputs.push(a);
            if k == last {
                return Tape { inputs, pre, masks, output: z };
            }
            let mut h = z.mapv(|v| act.apply(v));
            let mask = match dropout.as_mut() {
                Some((rates, rng)) if rates[k] > 0.0 => {
                    let keep = 1.0 - rates[k];
                    let m = Array2::from_shape_simple_fn(h.raw_dim(), || {
                        if rng.random::<f64>() < rates[k] {
                            0.0
                        } else {
                            1.0 / keep
                        }
                    });
                    h *= &m;
                    Some(m)
                }
                _ => None,
            };
            pre.push(z);
            masks.push(mask);
            a = h;
        }
        unreachable!("network has an output layer")
    }

    /// Gradients of a loss whose derivative w.r.t. the output is `grad_out`.
    pub fn backward(&self, tape: &Tape, act: Activation, grad_out: Array2<f64>) -> Vec<Dense> {
        let mut grads: Vec<Dense> = Vec::with_capacity(self.layers.len());
        let mut g = grad_out;
        for k in (0..self.layers.len()).rev() {
            let dw = tape.inputs[k].t().dot(&g);
            let db = g.sum_axis(Axis(0));
            if k > 0 {
                let mut prev = g.dot(&self.layers[k].w.t());
                if let Some(m) = &tape.masks[k - 1] {
                    prev *= m;
                }
                ndarray::Zip::from(&mut prev)
                    .and(&tape.pre[k - 1])
                    .for_each(|p, &z| *p *= act.derivative(z));
                g = prev;
            }
            grads.push(Dense { w: dw, b: db });
        }
        grads.reverse();
        grads
    }

    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        for l in &self.layers {
            out.extend(l.w.iter());
            out.extend(l.b.iter());
        }
        out
    }

    pub fn set_params(&mut self, p: &[f64]) {
        let mut it = p.iter();
        for l in &mut self.layers {
            for v in l.w.iter_mut().chain(l.b.iter_mut()) {
                *v = *it.next().expect("parameter count");
            }
        }
    }
}

pub(crate) fn flatten(grads: &[Dense]) -> Vec<f64> {
    let mut out = Vec::new();
    for g in grads {
        out.extend(g.w.iter());
        out.extend(g.b.iter());
    }
    out
}
