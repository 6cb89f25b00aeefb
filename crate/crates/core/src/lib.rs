pub mod divergence;
pub mod error;
pub mod posterior;
pub mod quadrature;
pub mod reward;
pub mod rng;
pub mod scalar;
pub mod special;
pub mod policy;
pub mod simulator;
pub mod stats;
pub mod analysis;

pub use analysis::{
    asymptotic_lower_bound, bound_report, c_alpha, check_prior_mass_b1, thm1_instance_bound, thm2_independent_bound,
    thm3_instance_bound, verify_concentration, BoundInputs, BoundReport, ConcentrationReport, ConcentrationSettings,
    PriorMassReport,
};
pub use divergence::{kl_divergence, renyi_divergence, renyi_quadrature_oracle, DivergenceOrder};
pub use error::{Error, Result};
pub use policy::{AlphaTs, ArmChoice, BanditPolicy, Moss, Policy, Ucb1, UcbV};
pub use posterior::{PosteriorParams, PriorSpec, TemperedPosterior};
pub use reward::{RewardFamily, RewardModel};
pub use rng::{derive_seed, stream_from_seed, RandomStream};
pub use scalar::Scalar;
pub use simulator::{
    aggregate, run_experiment, run_experiment_with_threads, BanditInstance, ExperimentConfig, PolicySpec,
    RegretTrace, SummaryGroup,
};

pub type RewardModelF64 = RewardModel<f64>;
pub type RewardModelF32 = RewardModel<f32>;
pub type PriorSpecF64 = PriorSpec<f64>;
pub type PriorSpecF32 = PriorSpec<f32>;
pub type TemperedPosteriorF64 = TemperedPosterior<f64>;
pub type TemperedPosteriorF32 = TemperedPosterior<f32>;
pub type BanditInstanceF64 = BanditInstance<f64>;
pub type BanditInstanceF32 = BanditInstance<f32>;
pub type ExperimentConfigF64 = ExperimentConfig<f64>;
pub type ExperimentConfigF32 = ExperimentConfig<f32>;
pub type RegretTraceF64 = RegretTrace<f64>;
pub type RegretTraceF32 = RegretTrace<f32>;
pub type PolicyF64 = Policy<f64>;
pub type PolicyF32 = Policy<f32>;
