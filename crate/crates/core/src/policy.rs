//! Arm-selection rules: α-Thompson sampling and the UCB1, UCB-V and MOSS
//! index baselines.
//!
//! All policies break ties towards the lowest arm index.

use rand::Rng;

use crate::error::{Error, Result};
use crate::posterior::{check_tempering_alpha, PriorSpec, TemperedPosterior};
use crate::scalar::{argmax, Scalar};

/// The arm a policy picked together with the per-arm scores it compared
/// (sampled means for Thompson sampling, index values for UCB rules).
#[derive(Debug, Clone, PartialEq)]
pub struct ArmChoice<S> {
    pub arm: usize,
    pub scores: Vec<S>,
}

impl<S: Scalar> ArmChoice<S> {
    fn from_scores(scores: Vec<S>) -> Self {
        let arm = argmax(&scores).unwrap_or(0);
        Self { arm, scores }
    }
}

/// Interface the simulator drives. `record_reward` consumes the policy and
/// returns the successor state.
pub trait BanditPolicy<S: Scalar>: Sized {
    fn num_arms(&self) -> usize;

    fn choose_arm<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ArmChoice<S>>;

    fn record_reward(self, arm: usize, reward: S) -> Result<Self>;
}

fn check_arm(arm: usize, arms: usize) -> Result<()> {
    if arm < arms {
        Ok(())
    } else {
        Err(Error::ArmOutOfRange { arm, arms })
    }
}

/// α-Thompson sampling over independent tempered posteriors.
///
/// Drawing one mean per arm and taking the argmax is an exact draw from the
/// categorical distribution whose weights are the posterior probabilities
/// that each arm has the largest mean.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaTs<S> {
    posteriors: Vec<TemperedPosterior<S>>,
    alpha: S,
    t: u64,
}

impl<S: Scalar> AlphaTs<S> {
    pub fn new(priors: Vec<PriorSpec<S>>, alpha: S) -> Result<Self> {
        check_tempering_alpha(alpha)?;
        let posteriors = priors
            .into_iter()
            .map(|p| TemperedPosterior::new(p, alpha))
            .collect::<Result<Vec<_>>>()?;
        Self::from_posteriors(posteriors)
    }

    /// Wraps existing posteriors, which must all share the same `α`.
    pub fn from_posteriors(posteriors: Vec<TemperedPosterior<S>>) -> Result<Self> {
        let first = posteriors
            .first()
            .ok_or_else(|| Error::InvalidConfig("policy needs at least one arm".into()))?;
        let alpha = first.alpha();
        if posteriors.iter().any(|p| p.alpha() != alpha) {
            return Err(Error::InvalidConfig("all arms must share the same tempering factor".into()));
        }
        let t = posteriors.iter().map(|p| p.n_obs()).sum();
        Ok(Self { posteriors, alpha, t })
    }

    pub fn alpha(&self) -> S {
        self.alpha
    }

    pub fn posteriors(&self) -> &[TemperedPosterior<S>] {
        &self.posteriors
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// Same rule as [`BanditPolicy::choose_arm`] but arm `k` draws from
    /// `streams[k]`, for callers that keep one stream per arm.
    pub fn choose_arm_with_streams<R: Rng>(&self, streams: &mut [R]) -> Result<ArmChoice<S>> {
        if streams.len() != self.posteriors.len() {
            return Err(Error::InvalidConfig(format!(
                "{} streams for {} arms",
                streams.len(),
                self.posteriors.len()
            )));
        }
        let scores = self
            .posteriors
            .iter()
            .zip(streams.iter_mut())
            .map(|(p, rng)| p.sample_mean(rng))
            .collect();
        Ok(ArmChoice::from_scores(scores))
    }

    /// Monte Carlo estimate of the probability that each arm is selected:
    /// the fraction of `mc_draws` joint posterior draws in which it has the
    /// largest sampled mean. Entries sum to one.
    pub fn arm_selection_probabilities<R: Rng + ?Sized>(&self, mc_draws: u64, rng: &mut R) -> Result<Vec<S>> {
        if mc_draws == 0 {
            return Err(Error::InvalidConfig("mc_draws must be positive".into()));
        }
        let mut wins = vec![0u64; self.posteriors.len()];
        let mut scores = vec![S::zero(); self.posteriors.len()];
        for _ in 0..mc_draws {
            for (s, p) in scores.iter_mut().zip(&self.posteriors) {
                *s = p.sample_mean(rng);
            }
            wins[argmax(&scores).unwrap_or(0)] += 1;
        }
        let total = S::from_count(mc_draws);
        Ok(wins.into_iter().map(|w| S::from_count(w) / total).collect())
    }
}

impl<S: Scalar> BanditPolicy<S> for AlphaTs<S> {
    fn num_arms(&self) -> usize {
        self.posteriors.len()
    }

    fn choose_arm<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ArmChoice<S>> {
        let scores = self.posteriors.iter().map(|p| p.sample_mean(rng)).collect();
        Ok(ArmChoice::from_scores(scores))
    }

    fn record_reward(mut self, arm: usize, reward: S) -> Result<Self> {
        check_arm(arm, self.posteriors.len())?;
        self.posteriors[arm].absorb(reward)?;
        self.t += 1;
        Ok(self)
    }
}

/// Pull counts and reward moments shared by the index policies.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmStats<S> {
    pub counts: Vec<u64>,
    pub sums: Vec<S>,
    pub sum_squares: Vec<S>,
}

impl<S: Scalar> ArmStats<S> {
    pub fn new(arms: usize) -> Self {
        Self {
            counts: vec![0; arms],
            sums: vec![S::zero(); arms],
            sum_squares: vec![S::zero(); arms],
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn mean(&self, arm: usize) -> S {
        self.sums[arm] / S::from_count(self.counts[arm])
    }

    /// Empirical (biased, divide-by-n) variance.
    pub fn variance(&self, arm: usize) -> S {
        let n = S::from_count(self.counts[arm]);
        let m = self.sums[arm] / n;
        (self.sum_squares[arm] / n - m * m).max(S::zero())
    }

    fn record(&mut self, arm: usize, reward: S) -> Result<()> {
        check_arm(arm, self.counts.len())?;
        if !reward.is_finite() {
            return Err(Error::RewardOutOfSupport {
                reward: reward.as_f64(),
                family: "index policy",
            });
        }
        self.counts[arm] += 1;
        self.sums[arm] += reward;
        self.sum_squares[arm] += reward * reward;
        Ok(())
    }

    fn check_warm(&self) -> Result<()> {
        match self.counts.iter().position(|&c| c == 0) {
            Some(arm) => Err(Error::NotWarmStarted { arm, count: 0 }),
            None => Ok(()),
        }
    }

    fn scores(&self, index: impl Fn(usize) -> S) -> Result<ArmChoice<S>> {
        self.check_warm()?;
        Ok(ArmChoice::from_scores((0..self.counts.len()).map(index).collect()))
    }
}

/// `mean + √(2 ln t / n)`.
pub fn ucb1_index<S: Scalar>(mean: S, n: u64, t: S) -> S {
    mean + (S::lit(2.0) * t.ln() / S::from_count(n)).sqrt()
}

/// `mean + √(c_var · V · ln t / n) + c_bias · ln t / n`.
pub fn ucbv_index<S: Scalar>(mean: S, variance: S, n: u64, t: S, variance_coef: S, bias_coef: S) -> S {
    let n = S::from_count(n);
    let lt = t.ln();
    mean + (variance_coef * variance * lt / n).sqrt() + bias_coef * lt / n
}

/// `mean + √(max(ln(T / (K n)), 0) / n)`.
pub fn moss_index<S: Scalar>(mean: S, n: u64, horizon: u64, arms: usize) -> S {
    let n_s = S::from_count(n);
    let ratio = S::from_count(horizon) / (S::from_count(arms as u64) * n_s);
    mean + (ratio.ln().max(S::zero()) / n_s).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ucb1<S> {
    pub stats: ArmStats<S>,
}

impl<S: Scalar> Ucb1<S> {
    pub fn new(arms: usize) -> Self {
        Self { stats: ArmStats::new(arms) }
    }
}

impl<S: Scalar> BanditPolicy<S> for Ucb1<S> {
    fn num_arms(&self) -> usize {
        self.stats.counts.len()
    }

    fn choose_arm<R: Rng + ?Sized>(&self, _rng: &mut R) -> Result<ArmChoice<S>> {
        let t = S::from_count(self.stats.total());
        self.stats.scores(|k| ucb1_index(self.stats.mean(k), self.stats.counts[k], t))
    }

    fn record_reward(mut self, arm: usize, reward: S) -> Result<Self> {
        self.stats.record(arm, reward)?;
        Ok(self)
    }
}

/// UCB-V: empirical-Bernstein index with exploration function `ln t`.
#[derive(Debug, Clone, PartialEq)]
pub struct UcbV<S> {
    pub stats: ArmStats<S>,
    pub variance_coef: S,
    pub bias_coef: S,
}

impl<S: Scalar> UcbV<S> {
    /// Defaults to the constants `(2, 3)` of the Bernstein-form index.
    pub fn new(arms: usize) -> Self {
        Self::with_constants(arms, S::lit(2.0), S::lit(3.0))
    }

    pub fn with_constants(arms: usize, variance_coef: S, bias_coef: S) -> Self {
        Self {
            stats: ArmStats::new(arms),
            variance_coef,
            bias_coef,
        }
    }
}

impl<S: Scalar> BanditPolicy<S> for UcbV<S> {
    fn num_arms(&self) -> usize {
        self.stats.counts.len()
    }

    fn choose_arm<R: Rng + ?Sized>(&self, _rng: &mut R) -> Result<ArmChoice<S>> {
        let t = S::from_count(self.stats.total());
        self.stats.scores(|k| {
            ucbv_index(
                self.stats.mean(k),
                self.stats.variance(k),
                self.stats.counts[k],
                t,
                self.variance_coef,
                self.bias_coef,
            )
        })
    }

    fn record_reward(mut self, arm: usize, reward: S) -> Result<Self> {
        self.stats.record(arm, reward)?;
        Ok(self)
    }
}

/// MOSS; the index depends on the horizon fixed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Moss<S> {
    pub stats: ArmStats<S>,
    pub horizon: u64,
}

impl<S: Scalar> Moss<S> {
    pub fn new(arms: usize, horizon: u64) -> Self {
        Self {
            stats: ArmStats::new(arms),
            horizon,
        }
    }
}

impl<S: Scalar> BanditPolicy<S> for Moss<S> {
    fn num_arms(&self) -> usize {
        self.stats.counts.len()
    }

    fn choose_arm<R: Rng + ?Sized>(&self, _rng: &mut R) -> Result<ArmChoice<S>> {
        let arms = self.num_arms();
        self.stats
            .scores(|k| moss_index(self.stats.mean(k), self.stats.counts[k], self.horizon, arms))
    }

    fn record_reward(mut self, arm: usize, reward: S) -> Result<Self> {
        self.stats.record(arm, reward)?;
        Ok(self)
    }
}

/// Any of the supported policies.
#[derive(Debug, Clone, PartialEq)]
pub enum Policy<S> {
    AlphaTs(AlphaTs<S>),
    Ucb1(Ucb1<S>),
    UcbV(UcbV<S>),
    Moss(Moss<S>),
}

impl<S: Scalar> Policy<S> {
    /// Number of rewards recorded so far.
    pub fn t(&self) -> u64 {
        match self {
            Policy::AlphaTs(p) => p.t(),
            Policy::Ucb1(p) => p.stats.total(),
            Policy::UcbV(p) => p.stats.total(),
            Policy::Moss(p) => p.stats.total(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Policy::AlphaTs(_) => "alpha-ts",
            Policy::Ucb1(_) => "ucb1",
            Policy::UcbV(_) => "ucbv",
            Policy::Moss(_) => "moss",
        }
    }
}

impl<S: Scalar> BanditPolicy<S> for Policy<S> {
    fn num_arms(&self) -> usize {
        match self {
            Policy::AlphaTs(p) => p.num_arms(),
            Policy::Ucb1(p) => p.num_arms(),
            Policy::UcbV(p) => p.num_arms(),
            Policy::Moss(p) => p.num_arms(),
        }
    }

    fn choose_arm<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ArmChoice<S>> {
        match self {
            Policy::AlphaTs(p) => p.choose_arm(rng),
            Policy::Ucb1(p) => p.choose_arm(rng),
            Policy::UcbV(p) => p.choose_arm(rng),
            Policy::Moss(p) => p.choose_arm(rng),
        }
    }

    fn record_reward(self, arm: usize, reward: S) -> Result<Self> {
        Ok(match self {
            Policy::AlphaTs(p) => Policy::AlphaTs(p.record_reward(arm, reward)?),
            Policy::Ucb1(p) => Policy::Ucb1(p.record_reward(arm, reward)?),
            Policy::UcbV(p) => Policy::UcbV(p.record_reward(arm, reward)?),
            Policy::Moss(p) => Policy::Moss(p.record_reward(arm, reward)?),
        })
    }
}
