//! Tempered (α-) conjugate posteriors.
//!
//! Raising the likelihood to the power `α` keeps every conjugate pair in its
//! family; the only change is that each observation's sufficient statistic
//! enters with weight `α`. The posterior therefore stores the prior, the
//! tempering factor and the raw (unweighted) sufficient statistics, and
//! derives the current hyperparameters on demand:
//!
//! | prior          | update per observation `x`                         |
//! |----------------|----------------------------------------------------|
//! | Beta(a, b)     | `a += α·x`, `b += α·(1 − x)`                        |
//! | Dirichlet(a)   | `a[x] += α`                                        |
//! | Normal(m, τ)   | `τ += α/σ²`, `m = (τ_old·m_old + α·x/σ²)/τ`         |
//! | Gamma(k, r)    | `k += α·x`, `r += α`                               |
//!
//! The selection-probability factors that appear in the α-posterior of the
//! sampling algorithm cancel between numerator and normaliser, so they are
//! not carried.

use rand::Rng;

use crate::error::{Error, Result};
use crate::reward::{RewardFamily, RewardModel};
use crate::scalar::Scalar;

/// Prior hyperparameters, one variant per conjugate pair.
#[derive(Debug, Clone, PartialEq)]
pub enum PriorSpec<S> {
    Beta { a: S, b: S },
    /// Dirichlet concentration over the categories; `support` holds the
    /// reward value of each category (default `0..d-1`).
    Dirichlet { conc: Vec<S>, support: Vec<S> },
    /// Normal prior on the mean, parameterised by precision, with a known
    /// likelihood variance.
    Gaussian { mean: S, precision: S, likelihood_var: S },
    /// Gamma prior on a Poisson rate (shape, rate parameterisation).
    Gamma { shape: S, rate: S },
}

fn positive<S: Scalar>(x: S, what: &str) -> Result<()> {
    if x > S::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} must be positive and finite, got {x}")))
    }
}

impl<S: Scalar> PriorSpec<S> {
    pub fn beta(a: S, b: S) -> Result<Self> {
        positive(a, "beta a")?;
        positive(b, "beta b")?;
        Ok(Self::Beta { a, b })
    }

    pub fn dirichlet(conc: Vec<S>) -> Result<Self> {
        let support = (0..conc.len() as u64).map(S::from_count).collect();
        Self::dirichlet_with_support(conc, support)
    }

    pub fn dirichlet_with_support(conc: Vec<S>, support: Vec<S>) -> Result<Self> {
        if conc.len() < 2 {
            return Err(Error::InvalidParameter("dirichlet needs at least two categories".into()));
        }
        if conc.len() != support.len() {
            return Err(Error::InvalidParameter(format!(
                "dirichlet has {} concentrations but {} support values",
                conc.len(),
                support.len()
            )));
        }
        for &c in &conc {
            positive(c, "dirichlet concentration")?;
        }
        Ok(Self::Dirichlet { conc, support })
    }

    pub fn gaussian(mean: S, precision: S, likelihood_var: S) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::InvalidParameter("gaussian prior mean must be finite".into()));
        }
        positive(precision, "gaussian prior precision")?;
        positive(likelihood_var, "gaussian likelihood variance")?;
        Ok(Self::Gaussian {
            mean,
            precision,
            likelihood_var,
        })
    }

    pub fn gamma(shape: S, rate: S) -> Result<Self> {
        positive(shape, "gamma shape")?;
        positive(rate, "gamma rate")?;
        Ok(Self::Gamma { shape, rate })
    }

    /// Flat-ish default prior matched to a reward model: Beta(1,1),
    /// Dirichlet(1,…,1) on the model's support, N(0, precision 1) with the
    /// model's variance as likelihood variance, Gamma(1,1).
    pub fn default_for(model: &RewardModel<S>) -> Self {
        let one = S::one();
        match model.family() {
            RewardFamily::Bernoulli { .. } => Self::Beta { a: one, b: one },
            RewardFamily::Categorical { support, .. } => Self::Dirichlet {
                conc: vec![one; support.len()],
                support: support.clone(),
            },
            RewardFamily::GaussianKnownVar { var, .. } => Self::Gaussian {
                mean: S::zero(),
                precision: one,
                likelihood_var: *var,
            },
            RewardFamily::Poisson { .. } => Self::Gamma { shape: one, rate: one },
        }
    }

    /// Whether this prior is conjugate to `model`'s family.
    pub fn matches(&self, model: &RewardModel<S>) -> bool {
        match (self, model.family()) {
            (Self::Beta { .. }, RewardFamily::Bernoulli { .. })
            | (Self::Gaussian { .. }, RewardFamily::GaussianKnownVar { .. })
            | (Self::Gamma { .. }, RewardFamily::Poisson { .. }) => true,
            (Self::Dirichlet { support: a, .. }, RewardFamily::Categorical { support: b, .. }) => a == b,
            _ => false,
        }
    }
}

/// Unweighted sufficient statistics accumulated so far.
#[derive(Debug, Clone, PartialEq)]
enum SufficientStats<S> {
    Binary { successes: u64, failures: u64 },
    Counts(Vec<u64>),
    Sum(S),
}

/// Current hyperparameters of a tempered posterior.
#[derive(Debug, Clone, PartialEq)]
pub enum PosteriorParams<S> {
    BetaBernoulli { a: S, b: S },
    DirichletCategorical { conc: Vec<S>, support: Vec<S> },
    GaussianGaussian { post_mean: S, post_precision: S, likelihood_var: S },
    GammaPoisson { shape: S, rate: S },
}

/// α-posterior of one arm.
#[derive(Debug, Clone, PartialEq)]
pub struct TemperedPosterior<S> {
    prior: PriorSpec<S>,
    alpha: S,
    stats: SufficientStats<S>,
    n_obs: u64,
}

/// Validates a tempering factor `α ∈ (0, 1]`.
pub fn check_tempering_alpha<S: Scalar>(alpha: S) -> Result<()> {
    if alpha > S::zero() && alpha <= S::one() {
        Ok(())
    } else {
        Err(Error::InvalidAlpha {
            alpha: alpha.as_f64(),
            expected: "tempering factor must lie in (0, 1]",
        })
    }
}

impl<S: Scalar> TemperedPosterior<S> {
    pub fn new(prior: PriorSpec<S>, alpha: S) -> Result<Self> {
        check_tempering_alpha(alpha)?;
        let stats = match &prior {
            PriorSpec::Beta { .. } => SufficientStats::Binary {
                successes: 0,
                failures: 0,
            },
            PriorSpec::Dirichlet { conc, .. } => SufficientStats::Counts(vec![0; conc.len()]),
            PriorSpec::Gaussian { .. } | PriorSpec::Gamma { .. } => SufficientStats::Sum(S::zero()),
        };
        Ok(Self {
            prior,
            alpha,
            stats,
            n_obs: 0,
        })
    }

    pub fn prior(&self) -> &PriorSpec<S> {
        &self.prior
    }

    pub fn alpha(&self) -> S {
        self.alpha
    }

    pub fn n_obs(&self) -> u64 {
        self.n_obs
    }

    fn family_name(&self) -> &'static str {
        match self.prior {
            PriorSpec::Beta { .. } => "beta-bernoulli",
            PriorSpec::Dirichlet { .. } => "dirichlet-categorical",
            PriorSpec::Gaussian { .. } => "gaussian-gaussian",
            PriorSpec::Gamma { .. } => "gamma-poisson",
        }
    }

    fn out_of_support(&self, reward: S) -> Error {
        Error::RewardOutOfSupport {
            reward: reward.as_f64(),
            family: self.family_name(),
        }
    }

    /// Posterior after one more observation. `self` is left untouched.
    pub fn update(&self, reward: S) -> Result<Self> {
        let mut next = self.clone();
        next.absorb(reward)?;
        Ok(next)
    }

    /// Folds [`update`](Self::update) over `rewards`, failing at the first
    /// reward outside the support.
    pub fn batch_update(&self, rewards: &[S]) -> Result<Self> {
        let mut next = self.clone();
        for &r in rewards {
            next.absorb(r)?;
        }
        Ok(next)
    }

    pub(crate) fn absorb(&mut self, reward: S) -> Result<()> {
        if !reward.is_finite() {
            return Err(self.out_of_support(reward));
        }
        match (&self.prior, &mut self.stats) {
            (PriorSpec::Beta { .. }, SufficientStats::Binary { successes, failures }) => {
                if reward == S::one() {
                    *successes += 1;
                } else if reward == S::zero() {
                    *failures += 1;
                } else {
                    return Err(self.out_of_support(reward));
                }
            }
            (PriorSpec::Dirichlet { support, .. }, SufficientStats::Counts(counts)) => {
                match support.iter().position(|&v| v == reward) {
                    Some(i) => counts[i] += 1,
                    None => return Err(self.out_of_support(reward)),
                }
            }
            (PriorSpec::Gaussian { .. }, SufficientStats::Sum(sum)) => *sum += reward,
            (PriorSpec::Gamma { .. }, SufficientStats::Sum(sum)) => {
                if reward < S::zero() || reward.fract() != S::zero() {
                    return Err(self.out_of_support(reward));
                }
                *sum += reward;
            }
            _ => unreachable!("statistics always match the prior family"),
        }
        self.n_obs += 1;
        Ok(())
    }

    /// Current hyperparameters.
    pub fn params(&self) -> PosteriorParams<S> {
        let alpha = self.alpha;
        let n = S::from_count(self.n_obs);
        match (&self.prior, &self.stats) {
            (PriorSpec::Beta { a, b }, SufficientStats::Binary { successes, failures }) => PosteriorParams::BetaBernoulli {
                a: *a + alpha * S::from_count(*successes),
                b: *b + alpha * S::from_count(*failures),
            },
            (PriorSpec::Dirichlet { conc, support }, SufficientStats::Counts(counts)) => {
                PosteriorParams::DirichletCategorical {
                    conc: conc
                        .iter()
                        .zip(counts)
                        .map(|(&c, &k)| c + alpha * S::from_count(k))
                        .collect(),
                    support: support.clone(),
                }
            }
            (
                PriorSpec::Gaussian {
                    mean,
                    precision,
                    likelihood_var,
                },
                SufficientStats::Sum(sum),
            ) => {
                let post_precision = *precision + alpha * n / *likelihood_var;
                PosteriorParams::GaussianGaussian {
                    post_mean: (*precision * *mean + alpha * *sum / *likelihood_var) / post_precision,
                    post_precision,
                    likelihood_var: *likelihood_var,
                }
            }
            (PriorSpec::Gamma { shape, rate }, SufficientStats::Sum(sum)) => PosteriorParams::GammaPoisson {
                shape: *shape + alpha * *sum,
                rate: *rate + alpha * n,
            },
            _ => unreachable!("statistics always match the prior family"),
        }
    }

    /// Draws `θ` from the posterior and returns the reward mean it implies.
    pub fn sample_mean<R: Rng + ?Sized>(&self, rng: &mut R) -> S {
        match self.params() {
            PosteriorParams::BetaBernoulli { a, b } => S::sample_beta(a, b, rng),
            PosteriorParams::DirichletCategorical { conc, support } => {
                let draws: Vec<S> = conc.iter().map(|&c| S::sample_gamma(c, rng)).collect();
                let total = draws.iter().fold(S::zero(), |acc, &g| acc + g);
                draws
                    .iter()
                    .zip(&support)
                    .fold(S::zero(), |acc, (&g, &v)| acc + g / total * v)
            }
            PosteriorParams::GaussianGaussian {
                post_mean,
                post_precision,
                ..
            } => post_mean + S::sample_standard_normal(rng) / post_precision.sqrt(),
            PosteriorParams::GammaPoisson { shape, rate } => S::sample_gamma(shape, rng) / rate,
        }
    }

    /// Posterior expectation of the reward mean.
    pub fn posterior_mean(&self) -> S {
        match self.params() {
            PosteriorParams::BetaBernoulli { a, b } => a / (a + b),
            PosteriorParams::DirichletCategorical { conc, support } => {
                let total = conc.iter().fold(S::zero(), |acc, &c| acc + c);
                conc.iter().zip(&support).fold(S::zero(), |acc, (&c, &v)| acc + c / total * v)
            }
            PosteriorParams::GaussianGaussian { post_mean, .. } => post_mean,
            PosteriorParams::GammaPoisson { shape, rate } => shape / rate,
        }
    }

    /// Posterior variance of the reward mean.
    pub fn posterior_variance(&self) -> S {
        let one = S::one();
        match self.params() {
            PosteriorParams::BetaBernoulli { a, b } => a * b / ((a + b) * (a + b) * (a + b + one)),
            PosteriorParams::DirichletCategorical { conc, support } => {
                let total = conc.iter().fold(S::zero(), |acc, &c| acc + c);
                let m1 = conc.iter().zip(&support).fold(S::zero(), |acc, (&c, &v)| acc + c / total * v);
                let m2 = conc
                    .iter()
                    .zip(&support)
                    .fold(S::zero(), |acc, (&c, &v)| acc + c / total * v * v);
                (m2 - m1 * m1) / (total + one)
            }
            PosteriorParams::GaussianGaussian { post_precision, .. } => one / post_precision,
            PosteriorParams::GammaPoisson { shape, rate } => shape / (rate * rate),
        }
    }
}
