use rayon::prelude::*;
use serde::Serialize;

use super::bounds::c_alpha;
use crate::error::{Error, Result};
use crate::posterior::{PriorSpec, TemperedPosterior};
use crate::rng::{derive_seed, stream_from_seed};
use crate::reward::RewardModel;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationSettings<S> {
    /// Number of simulated datasets (at least 100).
    pub outer: usize,
    /// Posterior draws per dataset (at least 1000).
    pub inner: usize,
    pub seed: u64,
    /// Reward-family constant `D` used in `C(α)`.
    pub family_constant: S,
}

impl<S: Scalar> Default for ConcentrationSettings<S> {
    fn default() -> Self {
        Self {
            outer: 500,
            inner: 5000,
            seed: 0,
            family_constant: S::one(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcentrationReport<S> {
    pub alpha: S,
    pub nabla: S,
    pub n: u64,
    pub c_alpha: S,
    /// Average over datasets of the fraction of posterior draws with
    /// `|μ(θ) − μ₀| ≥ ∇`.
    pub empirical: S,
    pub std_error: S,
    pub bound: S,
    /// `empirical ≤ bound + 3 · std_error`.
    pub holds: bool,
}

/// `½ exp(−C(α) n ∇²)`.
pub fn concentration_bound<S: Scalar>(alpha: S, d: S, nabla: S, n: u64) -> Result<S> {
    let c = c_alpha(alpha, d)?;
    Ok(S::lit(0.5) * (-c * S::from_count(n) * nabla * nabla).exp())
}

/// Monte Carlo estimate of the posterior tail mass beyond `∇` after `n`
/// observations drawn from `truth`, compared against `½ exp(−C(α) n ∇²)`.
///
/// Datasets are simulated in parallel on streams derived from the seed, so
/// the result does not depend on the thread count.
pub fn verify_concentration<S: Scalar>(
    prior: &PriorSpec<S>,
    truth: &RewardModel<S>,
    alpha: S,
    nabla: S,
    n: u64,
    settings: &ConcentrationSettings<S>,
) -> Result<ConcentrationReport<S>> {
    if settings.outer < 100 || settings.inner < 1000 {
        return Err(Error::InvalidConfig(format!(
            "need at least 100 datasets and 1000 posterior draws, got {} and {}",
            settings.outer, settings.inner
        )));
    }
    if !(nabla > S::zero()) || !nabla.is_finite() {
        return Err(Error::InvalidParameter(format!("deviation {nabla} must be positive")));
    }
    if !prior.matches(truth) {
        return Err(Error::MixedFamilies);
    }
    let bound = concentration_bound(alpha, settings.family_constant, nabla, n)?;
    let start = TemperedPosterior::new(prior.clone(), alpha)?;
    let mu0 = truth.mean();

    let fractions: Vec<S> = (0..settings.outer)
        .into_par_iter()
        .map(|j| -> Result<S> {
            let mut rng = stream_from_seed(derive_seed(settings.seed, &[j as u64]));
            let mut post = start.clone();
            for _ in 0..n {
                post.absorb(truth.sample(&mut rng))?;
            }
            let hits = (0..settings.inner)
                .filter(|_| (post.sample_mean(&mut rng) - mu0).abs() >= nabla)
                .count();
            Ok(S::from_count(hits as u64) / S::from_count(settings.inner as u64))
        })
        .collect::<Result<_>>()?;

    let m = S::from_count(settings.outer as u64);
    let empirical = fractions.iter().fold(S::zero(), |a, &b| a + b) / m;
    let var = fractions
        .iter()
        .fold(S::zero(), |a, &f| a + (f - empirical) * (f - empirical))
        / (m - S::one());
    let std_error = (var / m).sqrt();
    Ok(ConcentrationReport {
        alpha,
        nabla,
        n,
        c_alpha: c_alpha(alpha, settings.family_constant)?,
        empirical,
        std_error,
        bound,
        holds: empirical <= bound + S::lit(3.0) * std_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> ConcentrationSettings<f64> {
        ConcentrationSettings {
            outer: 100,
            inner: 1000,
            seed: 7,
            family_constant: 1.0,
        }
    }

    #[test]
    fn bound_formula() {
        assert_eq!(concentration_bound(0.5, 1.0, 0.1, 0).unwrap(), 0.5);
        let b = concentration_bound(0.5, 1.0, 0.1, 1000).unwrap();
        assert!((b - 0.5 * (-0.015625f64 * 10.0).exp()).abs() < 1e-15);
    }

    #[test]
    fn bernoulli_concentration_is_deterministic_and_holds() {
        let prior = PriorSpec::beta(1.0, 1.0).unwrap();
        let truth = RewardModel::bernoulli(0.5).unwrap();
        let a = verify_concentration(&prior, &truth, 0.5, 0.1, 100, &quick()).unwrap();
        let b = verify_concentration(&prior, &truth, 0.5, 0.1, 100, &quick()).unwrap();
        assert_eq!(a, b);
        assert!(a.holds);
        assert!(a.empirical > 0.0 && a.empirical < 1.0);
    }

    #[test]
    fn zero_observations_uses_prior() {
        // Uniform prior: P(|θ − 0.5| ≥ 0.1) = 0.8
        let prior = PriorSpec::beta(1.0, 1.0).unwrap();
        let truth = RewardModel::bernoulli(0.5).unwrap();
        let r = verify_concentration(&prior, &truth, 0.5, 0.1, 0, &quick()).unwrap();
        assert!((r.empirical - 0.8).abs() < 0.01);
        assert!(!r.holds);
    }

    #[test]
    fn rejects_small_settings() {
        let prior = PriorSpec::beta(1.0, 1.0).unwrap();
        let truth = RewardModel::bernoulli(0.5).unwrap();
        let mut s = quick();
        s.outer = 10;
        assert!(verify_concentration(&prior, &truth, 0.5, 0.1, 1, &s).is_err());
        assert!(verify_concentration(&prior, &truth, 1.0, 0.1, 1, &quick()).is_err());
    }
}
