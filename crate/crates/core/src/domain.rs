//! Shared value types, the RMSE objective and budget accounting.

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_len, Error, Result};

/// Bounded real design vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DesignVector(Vec<f64>);

impl DesignVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("design vector"));
        }
        check_finite(&values)?;
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Per-dimension box limits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_len(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(Error::Empty("bounds"));
        }
        check_finite(&lower)?;
        check_finite(&upper)?;
        if let Some(i) = (0..lower.len()).find(|&i| lower[i] > upper[i]) {
            return Err(Error::InvalidBounds(format!(
                "dimension {i}: lower {} > upper {}",
                lower[i], upper[i]
            )));
        }
        Ok(Self { lower, upper })
    }

    /// The same interval `[lo, hi]` in every one of `dim` dimensions.
    pub fn uniform(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    pub fn total_width(&self) -> f64 {
        (0..self.dim()).map(|i| self.width(i)).sum()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &hi))| lo <= v && v <= hi)
    }

    /// True when every interval of `self` lies inside the matching interval of `outer`.
    pub fn nested_in(&self, outer: &Bounds) -> bool {
        self.dim() == outer.dim()
            && (0..self.dim())
                .all(|i| outer.lower[i] <= self.lower[i] && self.upper[i] <= outer.upper[i])
    }

    pub fn clamp(&self, i: usize, v: f64) -> f64 {
        v.clamp(self.lower[i], self.upper[i])
    }

    pub fn clamp_vec(&self, x: &mut [f64]) {
        for (i, v) in x.iter_mut().enumerate() {
            *v = self.clamp(i, *v);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    Mean,
    Max,
}

pub fn derive_target_info(values: &[f64], reduction: Reduction) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Empty("target vector"));
    }
    check_finite(values)?;
    Ok(match reduction {
        Reduction::Mean => values.iter().sum::<f64>() / values.len() as f64,
        Reduction::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Target performance vector and its scalar summary.
///
/// Airfoil pipelines store negated Cp so that the minimum pressure
/// coefficient becomes a maximum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub values: Vec<f64>,
    pub info: f64,
    pub reduction: Reduction,
}

impl TargetSpec {
    pub fn new(values: Vec<f64>, reduction: Reduction) -> Result<Self> {
        let info = derive_target_info(&values, reduction)?;
        Ok(Self { values, info, reduction })
    }

    /// Recomputes the summary and checks it against the stored one.
    pub fn is_consistent(&self) -> bool {
        match derive_target_info(&self.values, self.reduction) {
            Ok(v) => (v - self.info).abs() <= 1e-12 * v.abs().max(1.0),
            Err(_) => false,
        }
    }
}

pub fn rmse_objective(computed: &[f64], target: &[f64]) -> Result<f64> {
    check_len(target.len(), computed.len())?;
    if computed.is_empty() {
        return Err(Error::Empty("performance vector"));
    }
    check_finite(computed)?;
    check_finite(target)?;
    let sq: f64 = computed.iter().zip(target).map(|(c, t)| (c - t) * (c - t)).sum();
    Ok((sq / computed.len() as f64).sqrt())
}

/// Counts objective calls. `consumed` is always `hf_count + rb`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationBudget {
    pub total: usize,
    pub consumed: usize,
    pub hf_count: usize,
    pub rb: usize,
}

impl EvaluationBudget {
    pub fn new(total: usize) -> Self {
        Self { total, consumed: 0, hf_count: 0, rb: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.total - self.consumed
    }

    pub fn is_exhausted(&self) -> bool {
        self.consumed >= self.total
    }

    pub fn tick(&mut self, gated: bool) -> Result<()> {
        *self = budget_tick(*self, gated)?;
        Ok(())
    }

    pub fn is_consistent(&self) -> bool {
        self.consumed == self.hf_count + self.rb && self.consumed <= self.total
    }
}

pub fn budget_tick(budget: EvaluationBudget, gated: bool) -> Result<EvaluationBudget> {
    if budget.consumed >= budget.total {
        return Err(Error::BudgetExhausted(budget.consumed));
    }
    let mut next = budget;
    next.consumed += 1;
    if gated {
        next.rb += 1;
    } else {
        next.hf_count += 1;
    }
    Ok(next)
}

/// One objective call as seen by an optimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub fitness: f64,
    /// False when the call was answered without a high-fidelity simulation.
    pub hf: bool,
}

/// Per-candidate objective hook. Optimizers call it once per evaluation and
/// tick their budget with the returned flag.
pub trait Objective {
    fn evaluate(&mut self, x: &[f64]) -> Evaluation;
}

/// Wraps a plain function; every call counts as a high-fidelity evaluation.
pub struct PlainObjective<F>(pub F);

impl<F: FnMut(&[f64]) -> f64> Objective for PlainObjective<F> {
    fn evaluate(&mut self, x: &[f64]) -> Evaluation {
        Evaluation { fitness: (self.0)(x), hf: true }
    }
}

/// Expensive simulation returning the computed performance vector.
pub trait HfEvaluator: Send + Sync {
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>>;
}

impl<T: HfEvaluator + ?Sized> HfEvaluator for Box<T> {
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        (**self).evaluate(x)
    }
}

impl<T: HfEvaluator + ?Sized> HfEvaluator for std::sync::Arc<T> {
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        (**self).evaluate(x)
    }
}

/// Always-HF objective: RMSE between the evaluator output and the target.
/// Evaluator failures score as `+inf`.
pub struct HfObjective<'a, E: HfEvaluator + ?Sized> {
    pub evaluator: &'a E,
    pub target: &'a TargetSpec,
}

impl<E: HfEvaluator + ?Sized> Objective for HfObjective<'_, E> {
    fn evaluate(&mut self, x: &[f64]) -> Evaluation {
        let fitness = self
            .evaluator
            .evaluate(x)
            .and_then(|p| rmse_objective(&p, &self.target.values))
            .unwrap_or(f64::INFINITY);
        Evaluation { fitness, hf: true }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rmse_examples() {
        assert_eq!(rmse_objective(&[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(rmse_objective(&[2.0, 2.0], &[0.0, 0.0]).unwrap(), 2.0);
        let v = rmse_objective(&[1.0, 2.0, 3.0, 4.0], &[0.0; 4]).unwrap();
        assert!((v - 7.5f64.sqrt()).abs() < 1e-15);
        assert!((v - 2.7386).abs() < 1e-4);
    }

    #[test]
    fn rmse_errors() {
        assert!(matches!(
            rmse_objective(&[1.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(rmse_objective(&[f64::NAN], &[1.0]), Err(Error::NonFinite(0))));
        assert!(rmse_objective(&[], &[]).is_err());
    }

    #[test]
    fn target_info_examples() {
        assert_eq!(derive_target_info(&[1.0, 2.0, 3.0], Reduction::Mean).unwrap(), 2.0);
        assert_eq!(derive_target_info(&[1.0, 2.0, 3.0], Reduction::Max).unwrap(), 3.0);
        assert!(derive_target_info(&[], Reduction::Max).is_err());
        assert!(TargetSpec::new(vec![0.5, 4.0], Reduction::Mean).unwrap().is_consistent());
    }

    #[test]
    fn budget_examples() {
        let b = budget_tick(EvaluationBudget::new(200), true).unwrap();
        assert_eq!((b.rb, b.hf_count, b.consumed), (1, 0, 1));

        let b = EvaluationBudget { total: 200, consumed: 199, hf_count: 199, rb: 0 };
        let b = budget_tick(b, false).unwrap();
        assert_eq!(b.consumed, 200);
        assert!(b.is_exhausted());
        assert!(matches!(budget_tick(b, false), Err(Error::BudgetExhausted(200))));

        let mut b = EvaluationBudget::new(200);
        for i in 0..200 {
            b.tick(i % 5 == 0).unwrap();
        }
        assert_eq!((b.hf_count, b.rb), (160, 40));
        assert!(b.is_consistent());
    }

    #[test]
    fn bounds_validation() {
        assert!(Bounds::new(vec![1.0], vec![0.0]).is_err());
        assert!(Bounds::new(vec![0.0], vec![0.0, 1.0]).is_err());
        let b = Bounds::uniform(2, -1.0, 1.0).unwrap();
        assert!(b.contains(&[0.0, 1.0]));
        assert!(!b.contains(&[0.0, 1.5]));
        let inner = Bounds::uniform(2, -0.5, 0.5).unwrap();
        assert!(inner.nested_in(&b));
        assert!(!b.nested_in(&inner));
        assert!(DesignVector::new(vec![]).is_err());
        assert!(DesignVector::new(vec![f64::INFINITY]).is_err());
    }

    proptest! {
        #[test]
        fn rmse_scales_linearly(
            pairs in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..40),
            a in -20.0f64..20.0,
        ) {
            let (u, v): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let base = rmse_objective(&u, &v).unwrap();
            let su: Vec<f64> = u.iter().map(|x| a * x).collect();
            let sv: Vec<f64> = v.iter().map(|x| a * x).collect();
            let scaled = rmse_objective(&su, &sv).unwrap();
            prop_assert!((scaled - a.abs() * base).abs() <= 1e-9 * (1.0 + scaled));
            // symmetric in the sign of the residuals
            prop_assert_eq!(base, rmse_objective(&v, &u).unwrap());
        }

        #[test]
        fn max_dominates_mean(t in prop::collection::vec(-1e6f64..1e6, 1..50)) {
            let mean = derive_target_info(&t, Reduction::Mean).unwrap();
            let max = derive_target_info(&t, Reduction::Max).unwrap();
            prop_assert!(max >= mean - 1e-9 * max.abs().max(1.0));
        }

        #[test]
        fn budget_identity_holds(flags in prop::collection::vec(any::<bool>(), 0..250)) {
            let mut b = EvaluationBudget::new(200);
            for g in flags {
                let before = b;
                match b.tick(g) {
                    Ok(()) => prop_assert_eq!(b.consumed, before.consumed + 1),
                    Err(_) => prop_assert_eq!(before.consumed, 200),
                }
                prop_assert!(b.is_consistent());
            }
        }
    }
}
