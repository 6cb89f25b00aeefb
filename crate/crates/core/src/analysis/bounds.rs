use serde::Serialize;

use crate::divergence::kl_divergence;
use crate::error::{Error, Result};
use crate::reward::{RewardFamily, RewardModel};
use crate::scalar::Scalar;
use crate::simulator::BanditInstance;

/// Printed next to every bound that depends on `r0`.
pub const R0_CAVEAT: &str = "r0 is a configured constant: the regret upper bounds depend on it, \
and it is only defined implicitly through a posterior tail condition, so these values are \
illustrative rather than certified";

/// `C(α) = D (1 − α) min(2α, 1 − α) / 16` for `α ∈ (0, 1)`, `D > 0`.
pub fn c_alpha<S: Scalar>(alpha: S, d: S) -> Result<S> {
    if !(alpha > S::zero() && alpha < S::one()) {
        return Err(Error::InvalidAlpha {
            alpha: alpha.as_f64(),
            expected: "C(alpha) needs alpha in (0, 1)",
        });
    }
    if !(d > S::zero()) || !d.is_finite() {
        return Err(Error::InvalidParameter(format!("reward-family constant D = {d} must be positive")));
    }
    let one = S::one();
    Ok(d * (one - alpha) * (S::lit(2.0) * alpha).min(one - alpha) / S::lit(16.0))
}

/// Instance description for the regret bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundInputs<S> {
    /// Gaps of the suboptimal arms, each in `(0, 1]`.
    pub gaps: Vec<S>,
    /// Total number of arms `K` (at least `gaps.len() + 1`).
    pub arms: usize,
    pub horizon: u64,
    pub alpha: S,
    /// Reward-family constant: 1 for sub-Gaussian rewards, `m / C_g²` for
    /// exponential families.
    pub d: S,
    pub r0: S,
}

impl<S: Scalar> BoundInputs<S> {
    /// `K = gaps.len() + 1`, `D = 1`, `r0 = 1`.
    pub fn new(gaps: Vec<S>, horizon: u64, alpha: S) -> Result<Self> {
        let arms = gaps.len() + 1;
        let inputs = Self {
            gaps,
            arms,
            horizon,
            alpha,
            d: S::one(),
            r0: S::one(),
        };
        inputs.validate()?;
        Ok(inputs)
    }

    /// Suboptimal gaps of `instance`; `K` is the instance's arm count.
    pub fn from_instance(instance: &BanditInstance<S>, horizon: u64, alpha: S) -> Result<Self> {
        let gaps = instance.gaps().iter().copied().filter(|&g| g > S::zero()).collect();
        Self::new(gaps, horizon, alpha)?.with_arms(instance.num_arms())
    }

    pub fn with_arms(mut self, arms: usize) -> Result<Self> {
        self.arms = arms;
        self.validate()?;
        Ok(self)
    }

    pub fn with_d(mut self, d: S) -> Result<Self> {
        self.d = d;
        self.validate()?;
        Ok(self)
    }

    pub fn with_r0(mut self, r0: S) -> Result<Self> {
        self.r0 = r0;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        c_alpha(self.alpha, self.d)?;
        if self.gaps.is_empty() {
            return Err(Error::InvalidParameter("at least one suboptimal gap is required".into()));
        }
        if let Some(g) = self.gaps.iter().find(|&&g| !(g > S::zero() && g <= S::one())) {
            return Err(Error::InvalidParameter(format!("gap {g} outside (0, 1]")));
        }
        if self.arms < self.gaps.len() + 1 {
            return Err(Error::InvalidParameter(format!(
                "{} arms cannot have {} suboptimal gaps",
                self.arms,
                self.gaps.len()
            )));
        }
        if self.horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be at least 1".into()));
        }
        if !(self.r0 >= S::zero()) || !self.r0.is_finite() {
            return Err(Error::InvalidParameter(format!("r0 = {} must be nonnegative", self.r0)));
        }
        Ok(())
    }

    fn c(&self) -> S {
        c_alpha(self.alpha, self.d).expect("validated inputs")
    }
}

/// Per-arm breakdown of the gap-dependent bound with `ln(T C(α) Δ² / 9)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thm1Term<S> {
    pub gap: S,
    pub log_argument: S,
    pub log_term: S,
    pub r0_term: S,
    pub tail_term: S,
    /// The logarithm was nonpositive, so its term was dropped.
    pub log_dropped: bool,
    pub total: S,
}

/// `9(r0+1) ln(T C Δ²/9) / (C Δ) + r0 Δ + 27 / (2 C Δ)` per suboptimal arm.
///
/// When the logarithm is nonpositive the log term is dropped; the `r0 Δ`
/// term is kept.
pub fn thm1_terms<S: Scalar>(inputs: &BoundInputs<S>) -> Result<Vec<Thm1Term<S>>> {
    inputs.validate()?;
    let c = inputs.c();
    let t = S::from_count(inputs.horizon);
    let nine = S::lit(9.0);
    Ok(inputs
        .gaps
        .iter()
        .map(|&gap| {
            let log_argument = t * c * gap * gap / nine;
            let ln = log_argument.ln();
            let log_dropped = ln <= S::zero();
            let log_term = if log_dropped {
                S::zero()
            } else {
                nine * (inputs.r0 + S::one()) * ln / (c * gap)
            };
            let r0_term = inputs.r0 * gap;
            let tail_term = S::lit(27.0) / (S::lit(2.0) * c * gap);
            Thm1Term {
                gap,
                log_argument,
                log_term,
                r0_term,
                tail_term,
                log_dropped,
                total: log_term + r0_term + tail_term,
            }
        })
        .collect())
}

pub fn thm1_instance_bound<S: Scalar>(inputs: &BoundInputs<S>) -> Result<S> {
    Ok(thm1_terms(inputs)?.iter().fold(S::zero(), |acc, t| acc + t.total))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thm3Term<S> {
    pub gap: S,
    pub log_term: S,
    pub constant_term: S,
    pub total: S,
}

/// `Δ (9(r0+1) ln T / (C Δ²) + (2 r0 + 3)/2)` per suboptimal arm.
pub fn thm3_terms<S: Scalar>(inputs: &BoundInputs<S>) -> Result<Vec<Thm3Term<S>>> {
    inputs.validate()?;
    let c = inputs.c();
    let ln_t = S::from_count(inputs.horizon).ln();
    let two = S::lit(2.0);
    Ok(inputs
        .gaps
        .iter()
        .map(|&gap| {
            let log_term = gap * S::lit(9.0) * (inputs.r0 + S::one()) * ln_t / (c * gap * gap);
            let constant_term = gap * (two * inputs.r0 + S::lit(3.0)) / two;
            Thm3Term {
                gap,
                log_term,
                constant_term,
                total: log_term + constant_term,
            }
        })
        .collect())
}

pub fn thm3_instance_bound<S: Scalar>(inputs: &BoundInputs<S>) -> Result<S> {
    Ok(thm3_terms(inputs)?.iter().fold(S::zero(), |acc, t| acc + t.total))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thm2Term<S> {
    pub gap: S,
    /// `Δ ≤ e √(K ln K) / √(T C)`: the arm is charged `e √(T K ln K / C)`.
    pub small_gap: bool,
    pub value: S,
}

/// Gap-free bound: the explicit case split plus the `K + √(K T ln K / C)` envelope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thm2Report<S> {
    /// Case-split threshold `e √(K ln K) / √(T C)`.
    pub threshold: S,
    pub bound: S,
    /// `√(K T ln K / C)`.
    pub envelope_sqrt_term: S,
    /// `K + √(K T ln K / C)`.
    pub envelope: S,
    pub terms: Vec<Thm2Term<S>>,
}

/// Arms with `Δ` at or below the threshold are charged `e √(T K ln K / C)`
/// (their regret is at most `Δ T`); the rest are charged
/// `19 (r0+1) √(T ln K / (C K)) + r0`.
pub fn thm2_independent_bound<S: Scalar>(inputs: &BoundInputs<S>) -> Result<Thm2Report<S>> {
    inputs.validate()?;
    if inputs.arms < 2 {
        return Err(Error::InvalidParameter("instance-independent bound needs K >= 2".into()));
    }
    let c = inputs.c();
    let k = S::from_count(inputs.arms as u64);
    let t = S::from_count(inputs.horizon);
    let ln_k = k.ln();
    let e = S::E();
    let threshold = e * (k * ln_k).sqrt() / (t * c).sqrt();
    let small_charge = e * (t * k * ln_k / c).sqrt();
    let large_charge = S::lit(19.0) * (inputs.r0 + S::one()) * (t * ln_k / (c * k)).sqrt() + inputs.r0;
    let terms: Vec<Thm2Term<S>> = inputs
        .gaps
        .iter()
        .map(|&gap| {
            let small_gap = gap <= threshold;
            Thm2Term {
                gap,
                small_gap,
                value: if small_gap { small_charge } else { large_charge },
            }
        })
        .collect();
    let envelope_sqrt_term = (k * t * ln_k / c).sqrt();
    Ok(Thm2Report {
        threshold,
        bound: terms.iter().fold(S::zero(), |acc, t| acc + t.value),
        envelope_sqrt_term,
        envelope: k + envelope_sqrt_term,
        terms,
    })
}

/// Coefficient of `ln T` in the asymptotic lower bound:
/// `Σ_{k ≠ i*} Δ_k / inf { KL(P_k ‖ P_θ) : mean(θ) > μ* }`.
///
/// KL is increasing in the alternative's mean beyond `μ_k`, so the infimum
/// is attained at mean `μ*`: `kl(μ_k, μ*)` for Bernoulli, `Δ²/(2σ²)` for
/// Gaussian, the Poisson KL at rate `μ*`. An infinite infimum (a Bernoulli
/// best arm with mean 1) contributes zero.
pub fn asymptotic_lower_bound<S: Scalar>(instance: &BanditInstance<S>) -> Result<S> {
    let best = instance.best_arm();
    let best_mean = instance.means()[best];
    let mut total = S::zero();
    for (k, arm) in instance.arms().iter().enumerate() {
        let gap = instance.gaps()[k];
        if k == best {
            continue;
        }
        if gap <= S::zero() {
            return Err(Error::InvalidInstance("lower bound needs a unique best arm".into()));
        }
        let closest = match arm.family() {
            RewardFamily::Bernoulli { .. } => RewardModel::bernoulli(best_mean)?,
            RewardFamily::GaussianKnownVar { var, .. } => RewardModel::gaussian(best_mean, *var)?,
            RewardFamily::Poisson { .. } => RewardModel::poisson(best_mean)?,
            RewardFamily::Categorical { .. } => {
                return Err(Error::UnsupportedFamily {
                    operation: "asymptotic lower bound",
                    family: "categorical",
                })
            }
        };
        match kl_divergence(arm, &closest) {
            Ok(kl) if kl > S::zero() => total += gap / kl,
            Err(Error::DivergenceInfinite) => {}
            Ok(_) => return Err(Error::InvalidInstance("zero divergence to the best arm".into())),
            Err(e) => return Err(e),
        }
    }
    Ok(total)
}

/// Every bound for one set of inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport<S> {
    pub inputs: BoundInputs<S>,
    pub c_alpha: S,
    pub thm1_bound: S,
    pub thm2_bound: S,
    pub thm2_envelope: S,
    pub thm2_envelope_sqrt_term: S,
    pub thm3_bound: S,
    /// Present when an instance with a supported family was supplied.
    pub lb_coefficient: Option<S>,
    pub thm1_terms: Vec<Thm1Term<S>>,
    pub thm2_terms: Vec<Thm2Term<S>>,
    pub thm3_terms: Vec<Thm3Term<S>>,
    pub r0_caveat: &'static str,
}

pub fn bound_report<S: Scalar>(inputs: &BoundInputs<S>, instance: Option<&BanditInstance<S>>) -> Result<BoundReport<S>> {
    let thm1_terms = thm1_terms(inputs)?;
    let thm3_terms = thm3_terms(inputs)?;
    let thm2 = thm2_independent_bound(inputs)?;
    let lb_coefficient = match instance {
        Some(inst) => match asymptotic_lower_bound(inst) {
            Ok(v) => Some(v),
            Err(Error::UnsupportedFamily { .. }) => None,
            Err(e) => return Err(e),
        },
        None => None,
    };
    let sum = |xs: &mut dyn Iterator<Item = S>| xs.fold(S::zero(), |a, b| a + b);
    Ok(BoundReport {
        inputs: inputs.clone(),
        c_alpha: inputs.c(),
        thm1_bound: sum(&mut thm1_terms.iter().map(|t| t.total)),
        thm2_bound: thm2.bound,
        thm2_envelope: thm2.envelope,
        thm2_envelope_sqrt_term: thm2.envelope_sqrt_term,
        thm3_bound: sum(&mut thm3_terms.iter().map(|t| t.total)),
        lb_coefficient,
        thm1_terms,
        thm2_terms: thm2.terms,
        thm3_terms,
        r0_caveat: R0_CAVEAT,
    })
}
