use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;

use super::network::{flatten, Activation, Dense, Net};
use super::{MlpConfig, SurrogateModel};
use crate::dataset::Dataset;
use crate::error::{check_finite, check_len, Error, Result};
use crate::rng::{component_rng, derive_seed, stream};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Training-split MSE (standardized labels, no dropout) after each epoch.
    pub train_loss: Vec<f64>,
    pub val_loss: Vec<f64>,
    /// Epoch whose weights were kept (0 = initial weights).
    pub best_epoch: usize,
    pub stopped_early: bool,
}

struct Adam {
    m: Vec<Dense>,
    v: Vec<Dense>,
    t: i32,
    lr: f64,
}

impl Adam {
    const B1: f64 = 0.9;
    const B2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(net: &Net, lr: f64) -> Self {
        let zeros: Vec<Dense> = net
            .layers
            .iter()
            .map(|l| Dense { w: Array2::zeros(l.w.raw_dim()), b: ndarray::Array1::zeros(l.b.len()) })
            .collect();
        Self { m: zeros.clone(), v: zeros, t: 0, lr }
    }

    fn step(&mut self, net: &mut Net, grads: &[Dense]) {
        self.t += 1;
        let c1 = 1.0 - Self::B1.powi(self.t);
        let c2 = 1.0 - Self::B2.powi(self.t);
        let lr = self.lr;
        for ((layer, g), (m, v)) in net.layers.iter_mut().zip(grads).zip(self.m.iter_mut().zip(&mut self.v)) {
            let update = |p: &mut f64, g: f64, m: &mut f64, v: &mut f64| {
                *m = Self::B1 * *m + (1.0 - Self::B1) * g;
                *v = Self::B2 * *v + (1.0 - Self::B2) * g * g;
                *p -= lr * (*m / c1) / ((*v / c2).sqrt() + Self::EPS);
            };
            ndarray::Zip::from(&mut layer.w).and(&g.w).and(&mut m.w).and(&mut v.w).for_each(
                |p, &g, m, v| update(p, g, m, v),
            );
            ndarray::Zip::from(&mut layer.b).and(&g.b).and(&mut m.b).and(&mut v.b).for_each(
                |p, &g, m, v| update(p, g, m, v),
            );
        }
    }
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    // constant columns are centred but not scaled
    (mean, if std > 1e-12 { std } else { 1.0 })
}

fn design_matrix(model: &SurrogateModel, data: &Dataset, rows: &[usize]) -> (Array2<f64>, Array2<f64>) {
    let m = model.input_dim();
    let mut x = Array2::zeros((rows.len(), m));
    let mut y = Array2::zeros((rows.len(), 1));
    for (r, &i) in rows.iter().enumerate() {
        for (c, v) in model.standardize(&data.inputs[i]).into_iter().enumerate() {
            x[[r, c]] = v;
        }
        y[[r, 0]] = (data.labels[i] - model.label_mean) / model.label_std;
    }
    (x, y)
}

fn mse(net: &Net, act: Activation, x: &Array2<f64>, y: &Array2<f64>) -> f64 {
    if x.nrows() == 0 {
        return f64::NAN;
    }
    let out = net.infer(x.view(), act);
    (&out - y).mapv(|d| d * d).mean().unwrap_or(f64::NAN)
}

/// Mini-batch Adam on mean-squared error with early stopping on a held-out
/// fraction. The best-validation weights are restored at the end.
pub fn train(data: &Dataset, cfg: &MlpConfig, seed: u64) -> Result<(SurrogateModel, TrainReport)> {
    cfg.validate()?;
    let n = data.len();
    if n < 10 {
        return Err(Error::InvalidConfig(format!("training needs at least 10 rows, got {n}")));
    }
    let dim = data.dim();
    for (x, y) in data.inputs.iter().zip(&data.labels) {
        check_len(dim, x.len())?;
        check_finite(x)?;
        check_finite(&[*y])?;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut component_rng(seed, stream::TRAIN_SPLIT));
    let n_val = (cfg.validation_fraction * n as f64).round() as usize;
    let (val_rows, train_rows) = order.split_at(n_val);
    let mut train_rows = train_rows.to_vec();

    let mut input_mean = Vec::with_capacity(dim);
    let mut input_std = Vec::with_capacity(dim);
    for d in 0..dim {
        let (m, s) = mean_std(train_rows.iter().map(|&i| data.inputs[i][d]));
        input_mean.push(m);
        input_std.push(s);
    }
    let (label_mean, label_std) = mean_std(train_rows.iter().map(|&i| data.labels[i]));

    let net = Net::init(dim, &cfg.hidden, &mut component_rng(seed, stream::WEIGHT_INIT));
    let mut model = SurrogateModel {
        net,
        activation: cfg.activation,
        input_mean,
        input_std,
        label_mean,
        label_std,
        cv_rmse: 0.0,
    };
    let (x_train, y_train) = design_matrix(&model, data, &train_rows);
    let (x_val, y_val) = design_matrix(&model, data, val_rows);

    let mut report = TrainReport { train_loss: Vec::new(), val_loss: Vec::new(), best_epoch: 0, stopped_early: false };
    let act = cfg.activation;
    let mut best_net = model.net.clone();
    let mut best_val = mse(&model.net, act, &x_val, &y_val);
    let mut since_best = 0;
    let mut adam = Adam::new(&model.net, cfg.learning_rate);
    let mut shuffle_rng = component_rng(seed, stream::TRAIN_SPLIT + 100);
    let mut dropout_rng = component_rng(seed, stream::DROPOUT);
    let mut positions: Vec<usize> = (0..train_rows.len()).collect();

    for epoch in 1..=cfg.epochs {
        positions.shuffle(&mut shuffle_rng);
        for batch in positions.chunks(cfg.batch_size) {
            let xb = x_train.select(Axis(0), batch);
            let yb = y_train.select(Axis(0), batch);
            let tape = model.net.forward(xb.view(), act, Some((&cfg.dropout[..], &mut dropout_rng)));
            let grad_out = (&tape.output - &yb) * (2.0 / batch.len() as f64);
            let grads = model.net.backward(&tape, act, grad_out);
            adam.step(&mut model.net, &grads);
        }
        let train_loss = mse(&model.net, act, &x_train, &y_train);
        if !train_loss.is_finite() {
            return Err(Error::TrainingDiverged { epoch, loss: train_loss });
        }
        report.train_loss.push(train_loss);
        if x_val.nrows() == 0 {
            best_net = model.net.clone();
            report.best_epoch = epoch;
            continue;
        }
        let val = mse(&model.net, act, &x_val, &y_val);
        report.val_loss.push(val);
        if val < best_val || !best_val.is_finite() {
            best_val = val;
            best_net = model.net.clone();
            report.best_epoch = epoch;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= cfg.patience {
                report.stopped_early = true;
                break;
            }
        }
    }
    model.net = best_net;
    train_rows.clear();
    Ok((model, report))
}

/// Mean and population standard deviation of the held-out RMSE over `k`
/// shuffled folds, in label units.
pub fn kfold_rmse(data: &Dataset, cfg: &MlpConfig, k: usize, seed: u64) -> Result<(f64, f64)> {
    let n = data.len();
    if k < 2 || n < k {
        return Err(Error::InvalidConfig(format!("k-fold needs 2 <= k <= n (k={k}, n={n})")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut component_rng(seed, stream::KFOLD));
    let mut scores = Vec::with_capacity(k);
    for fold in 0..k {
        let lo = fold * n / k;
        let hi = (fold + 1) * n / k;
        let test_rows = &order[lo..hi];
        let train_rows: Vec<usize> = order[..lo].iter().chain(&order[hi..]).copied().collect();
        let (model, _) = train(&data.subset(&train_rows), cfg, derive_seed(seed, fold as u64))?;
        let test = data.subset(test_rows);
        let pred = model.predict_batch(&test.inputs)?;
        scores.push(crate::domain::rmse_objective(&pred, &test.labels)?);
    }
    let mean = scores.iter().sum::<f64>() / k as f64;
    let var = scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / k as f64;
    Ok((mean, var.sqrt()))
}

/// Trains on all rows and attaches the k-fold RMSE used as the gate scale.
pub fn fit_surrogate(
    data: &Dataset,
    cfg: &MlpConfig,
    k: usize,
    seed: u64,
) -> Result<(SurrogateModel, TrainReport, (f64, f64))> {
    let cv = kfold_rmse(data, cfg, k, seed)?;
    let (mut model, report) = train(data, cfg, seed)?;
    model.cv_rmse = cv.0;
    Ok((model, report, cv))
}

/// Relative error between the analytic directional derivative of the
/// squared error at `(x, y)` along parameter-space `direction` and its
/// central finite difference with step `h`. Both are zero for a zero direction.
pub fn gradient_check(model: &SurrogateModel, x: &[f64], y: f64, direction: &[f64], h: f64) -> Result<f64> {
    check_len(model.input_dim(), x.len())?;
    let mut net = model.net.clone();
    check_len(net.n_params(), direction.len())?;
    let act = model.activation;
    let xs = Array2::from_shape_vec((1, x.len()), model.standardize(x)).expect("shape");
    let ys = (y - model.label_mean) / model.label_std;
    let loss = |net: &Net| {
        let d = net.infer(xs.view(), act)[[0, 0]] - ys;
        d * d
    };
    let tape = net.forward::<rand_chacha::ChaCha8Rng>(xs.view(), act, None);
    let grad_out = tape.output.mapv(|o| 2.0 * (o - ys));
    let grad = flatten(&net.backward(&tape, act, grad_out));
    let analytic: f64 = grad.iter().zip(direction).map(|(g, d)| g * d).sum();

    let base = net.params();
    let shifted = |sign: f64| -> Vec<f64> { base.iter().zip(direction).map(|(p, d)| p + sign * h * d).collect() };
    net.set_params(&shifted(1.0));
    let plus = loss(&net);
    net.set_params(&shifted(-1.0));
    let minus = loss(&net);
    let numeric = (plus - minus) / (2.0 * h);

    let scale = analytic.abs().max(numeric.abs());
    Ok(if scale == 0.0 { 0.0 } else { (analytic - numeric).abs() / scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{DatasetMeta, Problem};
    use crate::rng::component_rng;
    use rand::Rng;

    fn dataset(inputs: Vec<Vec<f64>>, labels: Vec<f64>) -> Dataset {
        Dataset {
            inputs,
            labels,
            meta: DatasetMeta { problem: Problem::Sfr, seed: 0, requested: 0, fidelity: "LF".into(), dropped: vec![] },
        }
    }

    fn small(epochs: usize) -> MlpConfig {
        MlpConfig {
            hidden: vec![16, 16],
            activation: Activation::Relu,
            dropout: vec![0.0, 0.0],
            epochs,
            batch_size: 16,
            learning_rate: 5e-3,
            validation_fraction: 0.3,
            patience: 20,
        }
    }

    fn line_data(n: usize) -> Dataset {
        let xs: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 / (n - 1) as f64]).collect();
        let ys = xs.iter().map(|x| 2.0 * x[0] + 1.0).collect();
        dataset(xs, ys)
    }

    #[test]
    fn learns_a_line() {
        let data = line_data(200);
        let (model, report) = train(&data, &small(300), 1).unwrap();
        assert!(report.best_epoch > 0);
        let xs: Vec<Vec<f64>> = (0..50).map(|i| vec![(i as f64 + 0.37) / 50.0]).collect();
        let truth: Vec<f64> = xs.iter().map(|x| 2.0 * x[0] + 1.0).collect();
        let rmse = crate::domain::rmse_objective(&model.predict_batch(&xs).unwrap(), &truth).unwrap();
        assert!(rmse < 0.05, "rmse {rmse}");
    }

    #[test]
    fn constant_labels_are_reproduced() {
        let mut rng = component_rng(3, 0);
        let xs: Vec<Vec<f64>> = (0..60).map(|_| vec![rng.random(), rng.random()]).collect();
        let data = dataset(xs, vec![4.2; 60]);
        let (model, _) = train(&data, &small(50), 2).unwrap();
        for x in [[0.1, 0.9], [0.5, 0.5], [0.77, 0.01]] {
            assert!((model.predict(&x).unwrap() - 4.2).abs() < 1e-3);
        }
    }

    #[test]
    fn zero_epochs_gives_initial_network() {
        let (model, report) = train(&line_data(20), &small(0), 1).unwrap();
        assert!(report.train_loss.is_empty());
        assert!(model.predict(&[0.5]).unwrap().is_finite());
    }

    #[test]
    fn prediction_is_deterministic_and_batch_consistent() {
        let (model, _) = train(&line_data(40), &small(5), 4).unwrap();
        let xs: Vec<Vec<f64>> = (0..100).map(|i| vec![i as f64 / 37.0 - 0.5]).collect();
        let batch = model.predict_batch(&xs).unwrap();
        for (x, b) in xs.iter().zip(&batch) {
            assert_eq!(model.predict(x).unwrap(), model.predict(x).unwrap());
            assert!((model.predict(x).unwrap() - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
        let centre = model.input_mean.clone();
        assert!(model.standardize(&centre).iter().all(|&v| v == 0.0));
        assert!(matches!(model.predict(&[1.0, 2.0]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn too_little_data_is_rejected() {
        assert!(train(&line_data(9), &small(1), 0).is_err());
    }

    #[test]
    fn kfold_on_easy_problems() {
        let (mean, std) = kfold_rmse(&line_data(150), &small(200), 5, 8).unwrap();
        assert!(mean < 0.05, "mean {mean}");
        assert!(std >= 0.0);
        let flat = dataset((0..30).map(|i| vec![i as f64]).collect(), vec![1.5; 30]);
        let (mean, _) = kfold_rmse(&flat, &small(20), 5, 8).unwrap();
        assert!(mean < 1e-6);
        assert!(kfold_rmse(&line_data(10), &small(1), 11, 0).is_err());
    }

    #[test]
    fn gradient_check_agrees_with_finite_differences() {
        let mut cfg = small(0);
        cfg.activation = Activation::LeakyRelu;
        let (model, _) = train(&line_data(20), &cfg, 5).unwrap();
        let n = model.net.n_params();
        let mut rng = component_rng(9, 0);
        let dir: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let err = gradient_check(&model, &[0.3], 3.5, &dir, 1e-5).unwrap();
        assert!(err < 1e-4, "relative error {err}");
        assert_eq!(gradient_check(&model, &[0.3], 2.0, &vec![0.0; n], 1e-5).unwrap(), 0.0);

        cfg.epochs = 30;
        let (trained, _) = train(&line_data(20), &cfg, 5).unwrap();
        let err = gradient_check(&trained, &[0.55], 0.5, &dir, 1e-5).unwrap();
        assert!(err < 1e-4, "relative error {err}");
    }

    #[test]
    fn gradient_check_linear_network_is_tight() {
        let mut cfg = small(0);
        cfg.activation = Activation::Linear;
        let (model, _) = train(&line_data(20), &cfg, 6).unwrap();
        let n = model.net.n_params();
        let mut rng = component_rng(10, 0);
        let dir: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let err = gradient_check(&model, &[0.8], -1.0, &dir, 1e-5).unwrap();
        assert!(err < 1e-8, "relative error {err}");
    }

    #[test]
    fn json_round_trip_is_bit_stable() {
        let (mut model, _) = train(&line_data(40), &small(3), 4).unwrap();
        model.cv_rmse = 0.123456789012345678;
        let back = SurrogateModel::from_json(&model.to_json().unwrap()).unwrap();
        assert_eq!(back, model);
        for x in [0.0, 0.31, 1.7] {
            assert_eq!(back.predict(&[x]).unwrap().to_bits(), model.predict(&[x]).unwrap().to_bits());
        }
        let bumped = model.to_json().unwrap().replace("\"format_version\":1", "\"format_version\":9");
        assert!(SurrogateModel::from_json(&bumped).is_err());
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut c = MlpConfig::sfr();
        c.dropout = vec![0.1];
        assert!(c.validate().is_err());
        let mut c = MlpConfig::aid();
        c.dropout[0] = 1.0;
        assert!(c.validate().is_err());
        assert!(MlpConfig::sfr().validate().is_ok());
    }
}
