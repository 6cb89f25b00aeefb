//! Calculators for the theoretical quantities attached to α-TS: the
//! concentration constant `C(α)`, instance-dependent and instance-independent
//! regret upper bounds, the asymptotic lower-bound coefficient, the prior
//! mass condition and an empirical check of posterior concentration.
//!
//! All logarithms are natural.

mod bounds;
mod concentration;
mod prior_mass;

pub use bounds::{
    asymptotic_lower_bound, bound_report, c_alpha, thm1_instance_bound, thm1_terms, thm2_independent_bound,
    thm3_instance_bound, thm3_terms, BoundInputs, BoundReport, Thm1Term, Thm2Report, Thm2Term, Thm3Term,
    R0_CAVEAT,
};
pub use concentration::{concentration_bound, verify_concentration, ConcentrationReport, ConcentrationSettings};
pub use prior_mass::{check_prior_mass_b1, prior_log_density, PriorMassReport};
