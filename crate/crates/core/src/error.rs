use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid alpha {alpha}: {expected}")]
    InvalidAlpha { alpha: f64, expected: &'static str },
    #[error("divergence between different reward families")]
    MixedFamilies,
    #[error("divergence is infinite (support mismatch)")]
    DivergenceInfinite,
    #[error("quadrature did not converge: {reason}")]
    QuadratureDidNotConverge { reason: String },
    #[error("reward {reward} is outside the support of the {family} model")]
    RewardOutOfSupport { reward: f64, family: &'static str },
    #[error("arm {arm} has {count} pulls; every arm needs at least one before index policies can choose")]
    NotWarmStarted { arm: usize, count: u64 },
    #[error("arm {arm} out of range for {arms} arms")]
    ArmOutOfRange { arm: usize, arms: usize },
    #[error("traces have different horizons ({0} vs {1})")]
    MixedHorizons(usize, usize),
    #[error("unsupported family for {operation}: {family}")]
    UnsupportedFamily {
        operation: &'static str,
        family: &'static str,
    },
    #[error("could not bracket the divergence ball boundary: {0}")]
    BallUnresolvable(String),
    #[error("invalid bandit instance: {0}")]
    InvalidInstance(String),
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
}
