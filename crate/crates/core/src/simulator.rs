//! Bandit environment, the interaction loop, replicates and aggregation.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::policy::{AlphaTs, BanditPolicy, Moss, Policy, Ucb1, UcbV};
use crate::posterior::PriorSpec;
use crate::reward::RewardModel;
use crate::rng::{derive_seed, stream_from_seed};
use crate::scalar::{param_tolerance, Scalar};
use crate::stats::percentile_nearest_rank;

/// True reward models of the arms plus the derived means, best arm and gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditInstance<S> {
    arms: Vec<RewardModel<S>>,
    means: Vec<S>,
    best_arm: usize,
    gaps: Vec<S>,
}

impl<S: Scalar> BanditInstance<S> {
    /// Requires at least two arms of one family and a unique best mean
    /// (no other mean within `1e-12` of it).
    pub fn new(arms: Vec<RewardModel<S>>) -> Result<Self> {
        Self::build(arms, false)
    }

    /// Like [`new`](Self::new) but tolerates tied best arms; the lowest
    /// index among them is reported as best and tied arms have zero gap.
    pub fn with_ties(arms: Vec<RewardModel<S>>) -> Result<Self> {
        Self::build(arms, true)
    }

    fn build(arms: Vec<RewardModel<S>>, allow_ties: bool) -> Result<Self> {
        if arms.len() < 2 {
            return Err(Error::InvalidInstance(format!("need at least 2 arms, got {}", arms.len())));
        }
        if arms.iter().any(|a| !a.same_family(&arms[0])) {
            return Err(Error::InvalidInstance("all arms must share one reward family".into()));
        }
        let means: Vec<S> = arms.iter().map(RewardModel::mean).collect();
        let best = means.iter().copied().fold(S::neg_infinity(), S::max);
        let tol = param_tolerance::<S>();
        let tied: Vec<usize> = (0..means.len()).filter(|&k| best - means[k] <= tol).collect();
        if tied.len() > 1 && !allow_ties {
            return Err(Error::InvalidInstance(format!(
                "best mean {best} is shared by arms {tied:?}; a unique optimal arm is required"
            )));
        }
        let best_arm = tied[0];
        let gaps = means
            .iter()
            .map(|&m| if best - m <= tol { S::zero() } else { best - m })
            .collect();
        Ok(Self {
            arms,
            means,
            best_arm,
            gaps,
        })
    }

    pub fn arms(&self) -> &[RewardModel<S>] {
        &self.arms
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn means(&self) -> &[S] {
        &self.means
    }

    pub fn best_arm(&self) -> usize {
        self.best_arm
    }

    pub fn gaps(&self) -> &[S] {
        &self.gaps
    }

    pub fn max_gap(&self) -> S {
        self.gaps.iter().copied().fold(S::zero(), S::max)
    }
}

/// Which policy to run, with its settings.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicySpec<S> {
    /// α-TS; `prior: None` uses [`PriorSpec::default_for`] on every arm.
    AlphaTs { alpha: S, prior: Option<PriorSpec<S>> },
    Ucb1,
    UcbV { variance_coef: S, bias_coef: S },
    Moss,
}

impl<S: Scalar> PolicySpec<S> {
    pub fn alpha_ts(alpha: S) -> Self {
        Self::AlphaTs { alpha, prior: None }
    }

    pub fn ucbv() -> Self {
        Self::UcbV {
            variance_coef: S::lit(2.0),
            bias_coef: S::lit(3.0),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::AlphaTs { .. } => "alpha-ts",
            Self::Ucb1 => "ucb1",
            Self::UcbV { .. } => "ucbv",
            Self::Moss => "moss",
        }
    }

    pub fn alpha(&self) -> Option<S> {
        match self {
            Self::AlphaTs { alpha, .. } => Some(*alpha),
            _ => None,
        }
    }

    /// Fresh policy state for `instance`.
    pub fn build(&self, instance: &BanditInstance<S>, horizon: usize) -> Result<Policy<S>> {
        let k = instance.num_arms();
        Ok(match self {
            Self::AlphaTs { alpha, prior } => {
                let priors = instance
                    .arms()
                    .iter()
                    .map(|arm| match prior {
                        Some(p) if p.matches(arm) => Ok(p.clone()),
                        Some(_) => Err(Error::InvalidConfig(format!(
                            "prior does not match the {} reward family",
                            arm.family_name()
                        ))),
                        None => Ok(PriorSpec::default_for(arm)),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Policy::AlphaTs(AlphaTs::new(priors, *alpha)?)
            }
            Self::Ucb1 => Policy::Ucb1(Ucb1::new(k)),
            Self::UcbV {
                variance_coef,
                bias_coef,
            } => Policy::UcbV(UcbV::with_constants(k, *variance_coef, *bias_coef)),
            Self::Moss => Policy::Moss(Moss::new(k, horizon as u64)),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig<S> {
    pub instance: BanditInstance<S>,
    pub horizon: usize,
    pub replicates: usize,
    /// Forced pulls of every arm before the policy takes over.
    pub init_pulls: u64,
    pub policies: Vec<PolicySpec<S>>,
    pub base_seed: u64,
    /// Start `cum_regret` at the warm-start regret instead of zero.
    pub include_warm_start_regret: bool,
}

impl<S: Scalar> ExperimentConfig<S> {
    pub fn new(instance: BanditInstance<S>, horizon: usize, replicates: usize, policies: Vec<PolicySpec<S>>) -> Self {
        Self {
            instance,
            horizon,
            replicates,
            init_pulls: 1,
            policies,
            base_seed: 0,
            include_warm_start_regret: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be at least 1".into()));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidConfig("replicates must be at least 1".into()));
        }
        if self.init_pulls == 0 {
            return Err(Error::InvalidConfig("init_pulls must be at least 1".into()));
        }
        if self.policies.is_empty() {
            return Err(Error::InvalidConfig("at least one policy is required".into()));
        }
        for spec in &self.policies {
            spec.build(&self.instance, self.horizon)?;
        }
        Ok(())
    }

    /// Stream seed for one (policy, replicate) cell.
    pub fn replicate_seed(&self, policy_index: usize, replicate_id: usize) -> u64 {
        derive_seed(self.base_seed, &[policy_index as u64, replicate_id as u64])
    }
}

/// Pseudo-regret path of one replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace<S> {
    pub replicate_id: usize,
    pub algorithm_label: String,
    pub alpha: Option<S>,
    /// `cum_regret[t]` is the summed gap of the arms played in main rounds `0..=t`.
    pub cum_regret: Vec<S>,
    /// Pulls per arm, warm start included.
    pub pulls: Vec<u64>,
    pub seed: u64,
    pub warm_start_regret: S,
    /// Arm played in each main round.
    pub arms_played: Vec<u32>,
}

impl<S: Scalar> RegretTrace<S> {
    pub fn horizon(&self) -> usize {
        self.cum_regret.len()
    }

    pub fn final_regret(&self) -> S {
        self.cum_regret.last().copied().unwrap_or_else(S::zero)
    }
}

/// Output of [`play`].
#[derive(Debug, Clone, PartialEq)]
pub struct PlayOutcome<S> {
    pub cum_regret: Vec<S>,
    pub pulls: Vec<u64>,
    pub warm_start_regret: S,
    pub arms_played: Vec<u32>,
}

/// Runs the interaction loop for any policy.
///
/// Every arm is pulled `init_pulls` times (round robin) and the rewards are
/// fed to the policy. Then, for `horizon` rounds: the policy chooses, the
/// environment samples the chosen arm from the same stream, and the policy
/// records the reward. Regret is the gap of the chosen arm, not the
/// realised reward shortfall.
pub fn play<S, P, R>(
    instance: &BanditInstance<S>,
    mut policy: P,
    horizon: usize,
    init_pulls: u64,
    include_warm_start_regret: bool,
    rng: &mut R,
) -> Result<PlayOutcome<S>>
where
    S: Scalar,
    P: BanditPolicy<S>,
    R: Rng + ?Sized,
{
    let k = instance.num_arms();
    if policy.num_arms() != k {
        return Err(Error::InvalidConfig(format!(
            "policy has {} arms, instance has {k}",
            policy.num_arms()
        )));
    }
    let gaps = instance.gaps();
    let mut pulls = vec![0u64; k];
    let mut warm = S::zero();
    for _ in 0..init_pulls {
        for arm in 0..k {
            let reward = instance.arms()[arm].sample(rng);
            policy = policy.record_reward(arm, reward)?;
            pulls[arm] += 1;
            warm += gaps[arm];
        }
    }

    let mut cum = if include_warm_start_regret { warm } else { S::zero() };
    let mut cum_regret = Vec::with_capacity(horizon);
    let mut arms_played = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let arm = policy.choose_arm(rng)?.arm;
        let reward = instance.arms()[arm].sample(rng);
        policy = policy.record_reward(arm, reward)?;
        pulls[arm] += 1;
        cum += gaps[arm];
        cum_regret.push(cum);
        arms_played.push(arm as u32);
    }
    Ok(PlayOutcome {
        cum_regret,
        pulls,
        warm_start_regret: warm,
        arms_played,
    })
}

/// One replicate of policy `policy_index` with its derived seed.
pub fn run_replicate<S: Scalar>(
    config: &ExperimentConfig<S>,
    policy_index: usize,
    replicate_id: usize,
) -> Result<RegretTrace<S>> {
    let spec = config
        .policies
        .get(policy_index)
        .ok_or_else(|| Error::InvalidConfig(format!("no policy at index {policy_index}")))?;
    let policy = spec.build(&config.instance, config.horizon)?;
    let seed = config.replicate_seed(policy_index, replicate_id);
    let mut rng = stream_from_seed(seed);
    let out = play(
        &config.instance,
        policy,
        config.horizon,
        config.init_pulls,
        config.include_warm_start_regret,
        &mut rng,
    )?;
    Ok(RegretTrace {
        replicate_id,
        algorithm_label: spec.label().to_string(),
        alpha: spec.alpha(),
        cum_regret: out.cum_regret,
        pulls: out.pulls,
        seed,
        warm_start_regret: out.warm_start_regret,
        arms_played: out.arms_played,
    })
}

/// All replicates of all policies, ordered by (policy, replicate).
///
/// Replicates run on the current rayon pool. Each one owns its stream,
/// seeded from `(base_seed, policy, replicate)`, so the output does not
/// depend on the number of threads.
pub fn run_experiment<S: Scalar>(config: &ExperimentConfig<S>) -> Result<Vec<RegretTrace<S>>> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = (0..config.policies.len())
        .flat_map(|p| (0..config.replicates).map(move |r| (p, r)))
        .collect();
    jobs.into_par_iter()
        .map(|(p, r)| run_replicate(config, p, r))
        .collect()
}

/// [`run_experiment`] on a dedicated pool; `None` uses rayon's default size.
pub fn run_experiment_with_threads<S: Scalar>(
    config: &ExperimentConfig<S>,
    threads: Option<usize>,
) -> Result<Vec<RegretTrace<S>>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot build thread pool: {e}")))?;
    pool.install(|| run_experiment(config))
}

/// Percentile curves for one (algorithm, α) group.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryGroup<S> {
    pub algorithm: String,
    pub alpha: Option<S>,
    pub replicates: usize,
    /// Requested percentiles in `[0, 100]`.
    pub percentiles: Vec<S>,
    /// `curves[i][t]` is the `percentiles[i]`-th percentile of `cum_regret[t]`.
    pub curves: Vec<Vec<S>>,
}

impl<S: Scalar> SummaryGroup<S> {
    pub fn horizon(&self) -> usize {
        self.curves.first().map_or(0, Vec::len)
    }
}

/// Nearest-rank percentile curves per (algorithm, α), groups in order of
/// first appearance.
pub fn aggregate<S: Scalar>(traces: &[RegretTrace<S>], percentiles: &[S]) -> Result<Vec<SummaryGroup<S>>> {
    if let Some(first) = traces.first() {
        if let Some(bad) = traces.iter().find(|t| t.horizon() != first.horizon()) {
            return Err(Error::MixedHorizons(first.horizon(), bad.horizon()));
        }
    }
    if percentiles.iter().any(|&p| !(p >= S::zero() && p <= S::lit(100.0))) {
        return Err(Error::InvalidConfig("percentiles must lie in [0, 100]".into()));
    }
    let mut keys: Vec<(String, Option<S>)> = Vec::new();
    for t in traces {
        let key = (t.algorithm_label.clone(), t.alpha);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let mut groups = Vec::with_capacity(keys.len());
    for (algorithm, alpha) in keys {
        let members: Vec<&RegretTrace<S>> = traces
            .iter()
            .filter(|t| t.algorithm_label == algorithm && t.alpha == alpha)
            .collect();
        let horizon = members[0].horizon();
        let mut curves = vec![Vec::with_capacity(horizon); percentiles.len()];
        let mut column = vec![S::zero(); members.len()];
        for t in 0..horizon {
            for (slot, m) in column.iter_mut().zip(&members) {
                *slot = m.cum_regret[t];
            }
            column.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
            for (curve, &p) in curves.iter_mut().zip(percentiles) {
                curve.push(percentile_nearest_rank(&column, p));
            }
        }
        groups.push(SummaryGroup {
            algorithm,
            alpha,
            replicates: members.len(),
            percentiles: percentiles.to_vec(),
            curves,
        });
    }
    Ok(groups)
}
