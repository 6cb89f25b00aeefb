use serde::Serialize;

use crate::divergence::{renyi_divergence, DivergenceOrder};
use crate::error::{Error, Result};
use crate::posterior::{check_tempering_alpha, PriorSpec};
use crate::quadrature::{integrate, QuadratureSettings};
use crate::reward::{RewardFamily, RewardModel};
use crate::scalar::Scalar;
use crate::special::{ln_beta, ln_gamma};

const MAX_DOUBLINGS: usize = 2000;
const BISECTION_STEPS: usize = 400;

/// Outcome of the prior-mass check `Π(D₂(θ₀, θ) ≤ ε²) ≥ 4^{1+α} e^{−n ε²}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PriorMassReport<S> {
    pub holds: bool,
    /// Prior mass of the `D₂` ball.
    pub lhs: S,
    pub rhs: S,
    pub ball_lower: S,
    pub ball_upper: S,
}

/// Log density of a one-parameter prior at `theta`.
pub fn prior_log_density<S: Scalar>(prior: &PriorSpec<S>, theta: S) -> Result<S> {
    let one = S::one();
    Ok(match prior {
        PriorSpec::Beta { a, b } => {
            if !(theta > S::zero() && theta < one) {
                return Ok(S::neg_infinity());
            }
            (*a - one) * theta.ln() + (*b - one) * (one - theta).ln() - ln_beta(*a, *b)
        }
        PriorSpec::Gaussian { mean, precision, .. } => {
            let d = theta - *mean;
            S::lit(0.5) * (*precision / (S::lit(2.0) * S::PI())).ln() - S::lit(0.5) * *precision * d * d
        }
        PriorSpec::Gamma { shape, rate } => {
            if !(theta > S::zero()) {
                return Ok(S::neg_infinity());
            }
            *shape * rate.ln() - ln_gamma(*shape) + (*shape - one) * theta.ln() - *rate * theta
        }
        PriorSpec::Dirichlet { .. } => {
            return Err(Error::UnsupportedFamily {
                operation: "prior-mass check",
                family: "categorical",
            })
        }
    })
}

fn family_model<S: Scalar>(prior: &PriorSpec<S>, theta: S) -> Result<RewardModel<S>> {
    match prior {
        PriorSpec::Beta { .. } => RewardModel::bernoulli(theta),
        PriorSpec::Gaussian { likelihood_var, .. } => RewardModel::gaussian(theta, *likelihood_var),
        PriorSpec::Gamma { .. } => RewardModel::poisson(theta),
        PriorSpec::Dirichlet { .. } => Err(Error::UnsupportedFamily {
            operation: "prior-mass check",
            family: "categorical",
        }),
    }
}

fn true_parameter<S: Scalar>(prior: &PriorSpec<S>, theta0: &RewardModel<S>) -> Result<S> {
    if !prior.matches(theta0) {
        return Err(Error::MixedFamilies);
    }
    match theta0.family() {
        RewardFamily::Bernoulli { p } => Ok(*p),
        RewardFamily::GaussianKnownVar { mean, .. } => Ok(*mean),
        RewardFamily::Poisson { rate } => Ok(*rate),
        RewardFamily::Categorical { .. } => Err(Error::UnsupportedFamily {
            operation: "prior-mass check",
            family: "categorical",
        }),
    }
}

/// Finds where `D₂(θ₀, θ) = ε²` moving from `theta0` towards `limit`
/// (`None` for an unbounded direction with sign `dir`).
fn ball_endpoint<S: Scalar>(
    inside: &dyn Fn(S) -> bool,
    theta0: S,
    dir: S,
    limit: Option<S>,
) -> Result<S> {
    let outer = match limit {
        Some(l) => {
            if inside(l) {
                return Ok(l);
            }
            l
        }
        None => {
            let mut step = theta0.abs().max(S::one());
            let mut probe = theta0 + dir * step;
            let mut doublings = 0;
            while inside(probe) {
                doublings += 1;
                if doublings > MAX_DOUBLINGS || !probe.is_finite() {
                    return Err(Error::BallUnresolvable("D2 ball does not close in an unbounded direction".into()));
                }
                step = step + step;
                probe = theta0 + dir * step;
            }
            probe
        }
    };
    let (mut near, mut far) = (theta0, outer);
    for _ in 0..BISECTION_STEPS {
        let mid = S::lit(0.5) * (near + far);
        if mid == near || mid == far {
            break;
        }
        if inside(mid) {
            near = mid;
        } else {
            far = mid;
        }
    }
    Ok(near)
}

/// Checks the prior-mass condition for a one-parameter family.
///
/// The ball `{θ : D₂(θ₀, θ) ≤ ε²}` is an interval around `θ₀`; its ends
/// are found by bisection (expanding by doubling in unbounded directions)
/// and the prior density is integrated over it by adaptive quadrature.
pub fn check_prior_mass_b1<S: Scalar>(
    prior: &PriorSpec<S>,
    theta0: &RewardModel<S>,
    alpha: S,
    eps: S,
    n: u64,
) -> Result<PriorMassReport<S>> {
    check_tempering_alpha(alpha)?;
    if !(eps > S::zero()) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("ball radius {eps} must be positive")));
    }
    let t0 = true_parameter(prior, theta0)?;
    let eps_sq = eps * eps;
    let order = DivergenceOrder::two();
    let inside = |theta: S| -> bool {
        match family_model(prior, theta).and_then(|m| renyi_divergence(theta0, &m, order)) {
            Ok(d) => d.is_finite() && d <= eps_sq,
            Err(_) => false,
        }
    };
    let (lower_limit, upper_limit) = match prior {
        PriorSpec::Beta { .. } => (Some(S::zero()), Some(S::one())),
        PriorSpec::Gamma { .. } => (Some(S::zero()), None),
        _ => (None, None),
    };
    let ball_lower = ball_endpoint(&inside, t0, -S::one(), lower_limit)?;
    let ball_upper = ball_endpoint(&inside, t0, S::one(), upper_limit)?;
    let settings = QuadratureSettings {
        abs_tol: 1e-12,
        rel_tol: 1e-12,
        max_intervals: 8192,
    };
    let density = |theta: S| prior_log_density(prior, theta).map(|l| l.exp()).unwrap_or(S::zero());
    let lhs = integrate(density, ball_lower, ball_upper, settings)?.value;
    let rhs = S::lit(4.0).powf(S::one() + alpha) * (-S::from_count(n) * eps_sq).exp();
    Ok(PriorMassReport {
        holds: lhs >= rhs,
        lhs,
        rhs,
        ball_lower,
        ball_upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use statrs::distribution::{ContinuousCDF, Normal};

    #[test]
    fn gaussian_ball_matches_closed_form() {
        // D₂ between N(μ, 1) and N(θ, 1) is (μ − θ)², so the ball is μ ± ε.
        let prior = PriorSpec::gaussian(0.0, 1.0, 1.0).unwrap();
        let theta0 = RewardModel::gaussian(0.0, 1.0).unwrap();
        let r = check_prior_mass_b1(&prior, &theta0, 0.5, 0.1, 10).unwrap();
        assert_relative_eq!(r.ball_lower, -0.1, max_relative = 1e-10);
        assert_relative_eq!(r.ball_upper, 0.1, max_relative = 1e-10);
        let n = Normal::new(0.0, 1.0).unwrap();
        assert_relative_eq!(r.lhs, n.cdf(0.1) - n.cdf(-0.1), epsilon = 1e-9);
        assert_relative_eq!(r.lhs, 0.079_655_674_554_057_98, epsilon = 1e-9);
        assert_relative_eq!(r.rhs, 4f64.powf(1.5) * (-0.1f64).exp(), max_relative = 1e-14);
        assert!(!r.holds);
    }

    #[test]
    fn bernoulli_whole_interval() {
        let prior = PriorSpec::beta(1.0, 1.0).unwrap();
        let theta0 = RewardModel::bernoulli(0.5).unwrap();
        let r = check_prior_mass_b1(&prior, &theta0, 0.5, 10.0, 0).unwrap();
        assert!(r.lhs > 0.999_999 && r.lhs <= 1.0 + 1e-9);
    }

    #[test]
    fn bernoulli_ball_endpoints() {
        // D₂(0.5 ‖ θ) = ln(0.25/θ + 0.25/(1 − θ))
        let prior = PriorSpec::beta(2.0, 2.0).unwrap();
        let theta0 = RewardModel::bernoulli(0.5).unwrap();
        let eps = 0.3f64;
        let r = check_prior_mass_b1(&prior, &theta0, 0.5, eps, 5).unwrap();
        let d2 = |t: f64| (0.25 / t + 0.25 / (1.0 - t)).ln();
        assert_relative_eq!(d2(r.ball_lower), eps * eps, max_relative = 1e-9);
        assert_relative_eq!(d2(r.ball_upper), eps * eps, max_relative = 1e-9);
        assert_relative_eq!(r.ball_lower + r.ball_upper, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn poisson_mass_is_probability() {
        let prior = PriorSpec::gamma(2.0, 1.0).unwrap();
        let theta0 = RewardModel::poisson(2.0).unwrap();
        let r = check_prior_mass_b1(&prior, &theta0, 0.5, 0.5, 1).unwrap();
        assert!(r.ball_lower < 2.0 && r.ball_upper > 2.0 && r.ball_lower > 0.0);
        assert!(r.lhs > 0.0 && r.lhs < 1.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let prior = PriorSpec::beta(1.0, 1.0).unwrap();
        let g = RewardModel::gaussian(0.0, 1.0).unwrap();
        assert!(check_prior_mass_b1(&prior, &g, 0.5, 0.1, 1).is_err());
        let b = RewardModel::bernoulli(0.5).unwrap();
        assert!(check_prior_mass_b1(&prior, &b, 0.5, 0.0, 1).is_err());
        assert!(check_prior_mass_b1(&prior, &b, 1.5, 0.1, 1).is_err());
    }
}
