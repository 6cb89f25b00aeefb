//! Parametric reward distributions for the arms of a bandit instance.

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Distribution family and parameters of one arm.
#[derive(Debug, Clone, PartialEq)]
pub enum RewardFamily<S> {
    Bernoulli { p: S },
    /// Finite distribution over `support` (default `0..d-1`) with weights `probs`.
    Categorical { probs: Vec<S>, support: Vec<S> },
    GaussianKnownVar { mean: S, var: S },
    Poisson { rate: S },
}

/// A validated reward distribution. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardModel<S> {
    family: RewardFamily<S>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

impl<S: Scalar> RewardModel<S> {
    pub fn bernoulli(p: S) -> Result<Self> {
        if !(p >= S::zero() && p <= S::one()) {
            return Err(invalid(format!("bernoulli p = {p} outside [0, 1]")));
        }
        Ok(Self {
            family: RewardFamily::Bernoulli { p },
        })
    }

    /// Categorical over the integer support `0..probs.len()`.
    pub fn categorical(probs: Vec<S>) -> Result<Self> {
        let support = (0..probs.len() as u64).map(S::from_count).collect();
        Self::categorical_with_support(probs, support)
    }

    pub fn categorical_with_support(probs: Vec<S>, support: Vec<S>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(invalid("categorical needs at least two categories"));
        }
        if probs.len() != support.len() {
            return Err(invalid(format!(
                "categorical has {} probabilities but {} support values",
                probs.len(),
                support.len()
            )));
        }
        if probs.iter().any(|&q| !(q >= S::zero()) || !q.is_finite()) {
            return Err(invalid("categorical probabilities must be finite and nonnegative"));
        }
        let total = probs.iter().fold(S::zero(), |acc, &q| acc + q);
        // 1e-12 is below f32 resolution; allow a few ulps there.
        let tol = S::lit(1e-12).max(S::epsilon() * S::lit(4.0));
        if (total - S::one()).abs() > tol {
            return Err(invalid(format!("categorical probabilities sum to {total}, not 1")));
        }
        if support.iter().any(|v| !v.is_finite()) {
            return Err(invalid("categorical support values must be finite"));
        }
        for (i, a) in support.iter().enumerate() {
            if support[..i].contains(a) {
                return Err(invalid(format!("duplicate categorical support value {a}")));
            }
        }
        Ok(Self {
            family: RewardFamily::Categorical { probs, support },
        })
    }

    pub fn gaussian(mean: S, var: S) -> Result<Self> {
        if !mean.is_finite() {
            return Err(invalid("gaussian mean must be finite"));
        }
        if !(var > S::zero()) || !var.is_finite() {
            return Err(invalid(format!("gaussian variance {var} must be positive")));
        }
        Ok(Self {
            family: RewardFamily::GaussianKnownVar { mean, var },
        })
    }

    pub fn poisson(rate: S) -> Result<Self> {
        if !(rate > S::zero()) || !rate.is_finite() {
            return Err(invalid(format!("poisson rate {rate} must be positive")));
        }
        Ok(Self {
            family: RewardFamily::Poisson { rate },
        })
    }

    pub fn family(&self) -> &RewardFamily<S> {
        &self.family
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            RewardFamily::Bernoulli { .. } => "bernoulli",
            RewardFamily::Categorical { .. } => "categorical",
            RewardFamily::GaussianKnownVar { .. } => "gaussian",
            RewardFamily::Poisson { .. } => "poisson",
        }
    }

    pub fn mean(&self) -> S {
        match &self.family {
            RewardFamily::Bernoulli { p } => *p,
            RewardFamily::Categorical { probs, support } => probs
                .iter()
                .zip(support)
                .fold(S::zero(), |acc, (&q, &v)| acc + q * v),
            RewardFamily::GaussianKnownVar { mean, .. } => *mean,
            RewardFamily::Poisson { rate } => *rate,
        }
    }

    pub fn variance(&self) -> S {
        match &self.family {
            RewardFamily::Bernoulli { p } => *p * (S::one() - *p),
            RewardFamily::Categorical { probs, support } => {
                let m = self.mean();
                probs
                    .iter()
                    .zip(support)
                    .fold(S::zero(), |acc, (&q, &v)| acc + q * (v - m) * (v - m))
            }
            RewardFamily::GaussianKnownVar { var, .. } => *var,
            RewardFamily::Poisson { rate } => *rate,
        }
    }

    /// One reward draw. The stream is the only source of randomness.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> S {
        match &self.family {
            RewardFamily::Bernoulli { p } => {
                if S::sample_unit(rng) < *p {
                    S::one()
                } else {
                    S::zero()
                }
            }
            RewardFamily::Categorical { probs, support } => {
                let u = S::sample_unit(rng);
                let mut cum = S::zero();
                for (&q, &v) in probs.iter().zip(support) {
                    cum += q;
                    if u < cum {
                        return v;
                    }
                }
                // Rounding left u above the last partial sum.
                let last = probs.iter().rposition(|&q| q > S::zero()).unwrap_or(probs.len() - 1);
                support[last]
            }
            RewardFamily::GaussianKnownVar { mean, var } => *mean + var.sqrt() * S::sample_standard_normal(rng),
            RewardFamily::Poisson { rate } => S::sample_poisson(*rate, rng),
        }
    }

    /// True when both models are in the same family and, for categorical
    /// models, share dimension and support.
    pub fn same_family(&self, other: &Self) -> bool {
        match (&self.family, &other.family) {
            (RewardFamily::Bernoulli { .. }, RewardFamily::Bernoulli { .. })
            | (RewardFamily::GaussianKnownVar { .. }, RewardFamily::GaussianKnownVar { .. })
            | (RewardFamily::Poisson { .. }, RewardFamily::Poisson { .. }) => true,
            (RewardFamily::Categorical { support: a, .. }, RewardFamily::Categorical { support: b, .. }) => a == b,
            _ => false,
        }
    }

    /// Parameter equality within the absolute tolerance `1e-12`.
    pub fn approx_eq(&self, other: &Self) -> bool {
        let tol = crate::scalar::param_tolerance::<S>();
        let close = |a: S, b: S| (a - b).abs() <= tol;
        match (&self.family, &other.family) {
            (RewardFamily::Bernoulli { p: a }, RewardFamily::Bernoulli { p: b }) => close(*a, *b),
            (RewardFamily::Categorical { probs: a, support: sa }, RewardFamily::Categorical { probs: b, support: sb }) => {
                sa == sb && a.iter().zip(b).all(|(&x, &y)| close(x, y))
            }
            (
                RewardFamily::GaussianKnownVar { mean: ma, var: va },
                RewardFamily::GaussianKnownVar { mean: mb, var: vb },
            ) => close(*ma, *mb) && close(*va, *vb),
            (RewardFamily::Poisson { rate: a }, RewardFamily::Poisson { rate: b }) => close(*a, *b),
            _ => false,
        }
    }

    /// Probability vector and support for discrete families with finite support.
    pub(crate) fn finite_pmf(&self) -> Option<(Vec<S>, Vec<S>)> {
        match &self.family {
            RewardFamily::Bernoulli { p } => Some((vec![S::one() - *p, *p], vec![S::zero(), S::one()])),
            RewardFamily::Categorical { probs, support } => Some((probs.clone(), support.clone())),
            _ => None,
        }
    }
}
