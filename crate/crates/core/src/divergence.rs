//! Rényi and Kullback–Leibler divergences between reward models.
//!
//! Closed forms are used throughout: finite sums for discrete families, the
//! log-partition identity for Poisson (natural parameter `ln λ`, `A(θ) = e^θ`)
//! and the Gaussian formula for known variances. [`renyi_quadrature_oracle`]
//! integrates the defining integral directly and serves as an independent check.

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureSettings};
use crate::reward::{RewardFamily, RewardModel};
use crate::scalar::Scalar;

/// Order of a Rényi divergence: `α ∈ (0, 1]`, or exactly `2`.
///
/// Order 1 is the Kullback–Leibler limit. Order 2 is only used by the
/// prior-mass condition, which is phrased with a `D₂` neighbourhood.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DivergenceOrder<S>(S);

impl<S: Scalar> DivergenceOrder<S> {
    pub fn new(alpha: S) -> Result<Self> {
        let two = S::lit(2.0);
        if (alpha > S::zero() && alpha <= S::one()) || alpha == two {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidAlpha {
                alpha: alpha.as_f64(),
                expected: "divergence order must lie in (0, 1] or equal 2",
            })
        }
    }

    pub fn two() -> Self {
        Self(S::lit(2.0))
    }

    pub fn value(self) -> S {
        self.0
    }
}

fn check_same_family<S: Scalar>(a: &RewardModel<S>, b: &RewardModel<S>) -> Result<()> {
    if a.same_family(b) {
        Ok(())
    } else {
        Err(Error::MixedFamilies)
    }
}

/// `KL(a ‖ b)` in nats.
///
/// Models whose parameters agree within `1e-12` have divergence exactly zero.
pub fn kl_divergence<S: Scalar>(a: &RewardModel<S>, b: &RewardModel<S>) -> Result<S> {
    check_same_family(a, b)?;
    if a.approx_eq(b) {
        return Ok(S::zero());
    }
    match (a.family(), b.family()) {
        (RewardFamily::GaussianKnownVar { mean: ma, var: va }, RewardFamily::GaussianKnownVar { mean: mb, var: vb }) => {
            let d = *ma - *mb;
            let half = S::lit(0.5);
            if va == vb {
                return Ok(d * d / (S::lit(2.0) * *va));
            }
            Ok(half * (*vb / *va).ln() + (*va + d * d) / (S::lit(2.0) * *vb) - half)
        }
        (RewardFamily::Poisson { rate: la }, RewardFamily::Poisson { rate: lb }) => {
            Ok((*la * (*la / *lb).ln() - *la + *lb).max(S::zero()))
        }
        _ => {
            let (p, _) = a.finite_pmf().expect("discrete family");
            let (q, _) = b.finite_pmf().expect("discrete family");
            let mut total = S::zero();
            for (&pi, &qi) in p.iter().zip(&q) {
                if pi == S::zero() {
                    continue;
                }
                if qi == S::zero() {
                    return Err(Error::DivergenceInfinite);
                }
                total += pi * (pi / qi).ln();
            }
            Ok(total.max(S::zero()))
        }
    }
}

/// `D_α(a ‖ b) = 1/(α-1) · ln ∫ p_a^α p_b^{1-α}`.
pub fn renyi_divergence<S: Scalar>(a: &RewardModel<S>, b: &RewardModel<S>, order: DivergenceOrder<S>) -> Result<S> {
    check_same_family(a, b)?;
    let alpha = order.value();
    if alpha == S::one() {
        return kl_divergence(a, b);
    }
    if a.approx_eq(b) {
        return Ok(S::zero());
    }
    let one = S::one();
    match (a.family(), b.family()) {
        (RewardFamily::GaussianKnownVar { mean: ma, var: va }, RewardFamily::GaussianKnownVar { mean: mb, var: vb }) => {
            let d = *ma - *mb;
            let two = S::lit(2.0);
            if va == vb {
                return Ok(alpha * d * d / (two * *va));
            }
            let mixed_var = alpha * *vb + (one - alpha) * *va;
            if !(mixed_var > S::zero()) {
                return Err(Error::DivergenceInfinite);
            }
            let value = S::lit(0.5) * (*vb / *va).ln() + (*vb / mixed_var).ln() / (two * (alpha - one))
                + alpha * d * d / (two * mixed_var);
            Ok(value.max(S::zero()))
        }
        (RewardFamily::Poisson { rate: la }, RewardFamily::Poisson { rate: lb }) => {
            // A(θ) = e^θ with θ = ln λ.
            let (ta, tb) = (la.ln(), lb.ln());
            let mixed = (alpha * ta + (one - alpha) * tb).exp();
            let value = (alpha * *la + (one - alpha) * *lb - mixed) / (one - alpha);
            Ok(value.max(S::zero()))
        }
        _ => {
            let (p, _) = a.finite_pmf().expect("discrete family");
            let (q, _) = b.finite_pmf().expect("discrete family");
            let mut total = S::zero();
            for (&pi, &qi) in p.iter().zip(&q) {
                if pi == S::zero() {
                    continue;
                }
                if qi == S::zero() {
                    if alpha > one {
                        return Err(Error::DivergenceInfinite);
                    }
                    continue;
                }
                total += pi.powf(alpha) * qi.powf(one - alpha);
            }
            if total == S::zero() {
                return Err(Error::DivergenceInfinite);
            }
            Ok((total.ln() / (alpha - one)).max(S::zero()))
        }
    }
}

/// Numeric evaluation of the defining Rényi integral for Gaussian models.
///
/// The integration window spans twelve standard deviations around both
/// means and around the centre of the tilted density `p_a^α p_b^{1-α}`,
/// so the truncated tail mass is below `1e-12`.
pub fn renyi_quadrature_oracle<S: Scalar>(
    a: &RewardModel<S>,
    b: &RewardModel<S>,
    order: DivergenceOrder<S>,
) -> Result<S> {
    check_same_family(a, b)?;
    let alpha = order.value();
    if alpha == S::one() {
        return Err(Error::InvalidAlpha {
            alpha: 1.0,
            expected: "quadrature oracle needs α in (0, 1) or α = 2",
        });
    }
    let (ma, va, mb, vb) = match (a.family(), b.family()) {
        (RewardFamily::GaussianKnownVar { mean: ma, var: va }, RewardFamily::GaussianKnownVar { mean: mb, var: vb }) => {
            (*ma, *va, *mb, *vb)
        }
        _ => {
            return Err(Error::UnsupportedFamily {
                operation: "renyi quadrature oracle",
                family: a.family_name(),
            })
        }
    };
    let one = S::one();
    let two = S::lit(2.0);
    let tilted_precision = alpha / va + (one - alpha) / vb;
    if !(tilted_precision > S::zero()) {
        return Err(Error::DivergenceInfinite);
    }
    let tilted_mean = (alpha * ma / va + (one - alpha) * mb / vb) / tilted_precision;
    let spread = va.sqrt().max(vb.sqrt()).max((one / tilted_precision).sqrt()) * S::lit(12.0);
    let lo = ma.min(mb).min(tilted_mean) - spread;
    let hi = ma.max(mb).max(tilted_mean) + spread;

    let ln_norm = S::lit(0.5) * (two * S::PI()).ln();
    let log_pdf = move |x: S, m: S, v: S| -(x - m) * (x - m) / (two * v) - S::lit(0.5) * v.ln() - ln_norm;
    let log_tilted = |x: S| alpha * log_pdf(x, ma, va) + (one - alpha) * log_pdf(x, mb, vb);
    // Factor out the peak so the integrand is O(1) and the absolute
    // tolerance stays meaningful for far-apart models.
    let log_peak = log_tilted(tilted_mean);
    let integrand = |x: S| (log_tilted(x) - log_peak).exp();
    let settings = QuadratureSettings {
        abs_tol: 1e-10,
        rel_tol: 1e-13,
        max_intervals: 8192,
    };
    let integral = integrate(integrand, lo, hi, settings)?.value;
    if !(integral > S::zero()) {
        return Err(Error::QuadratureDidNotConverge {
            reason: "integral underflowed to zero".into(),
        });
    }
    Ok((integral.ln() + log_peak) / (alpha - one))
}

/// Mean-gap bound for sub-Gaussian measures with parameters `sigma_mu`, `sigma_nu`:
/// `|E_ν X − E_μ X| ≤ √(σ_μ²α + σ_ν²(1−α)) · √(2/α · D_α(ν‖μ))`.
pub fn subgaussian_mean_gap_bound<S: Scalar>(sigma_mu: S, sigma_nu: S, alpha: S, divergence: S) -> S {
    let one = S::one();
    (sigma_mu * sigma_mu * alpha + sigma_nu * sigma_nu * (one - alpha)).sqrt()
        * (S::lit(2.0) / alpha * divergence).sqrt()
}

/// Mean-gap bound for a one-dimensional exponential family whose link is
/// `c_g`-Lipschitz and whose log-partition is `m`-strongly convex:
/// `|E_θ r − E_θ₀ r| ≤ c_g/√m · √(2/α · D_α(θ, θ₀))`.
pub fn exp_family_mean_gap_bound<S: Scalar>(c_g: S, m: S, alpha: S, divergence: S) -> S {
    c_g / m.sqrt() * (S::lit(2.0) / alpha * divergence).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn order(a: f64) -> DivergenceOrder<f64> {
        DivergenceOrder::new(a).unwrap()
    }

    #[test]
    fn order_validation() {
        assert!(DivergenceOrder::new(0.0).is_err());
        assert!(DivergenceOrder::new(1.5).is_err());
        assert!(DivergenceOrder::new(-0.2).is_err());
        assert!(DivergenceOrder::new(1.0).is_ok());
        assert_eq!(DivergenceOrder::<f64>::two().value(), 2.0);
    }

    #[test]
    fn renyi_worked_values() {
        let b3 = RewardModel::bernoulli(0.3).unwrap();
        assert_eq!(renyi_divergence(&b3, &b3, order(0.5)).unwrap(), 0.0);

        let g1 = RewardModel::gaussian(1.0, 1.0).unwrap();
        let g0 = RewardModel::gaussian(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(renyi_divergence(&g1, &g0, order(0.5)).unwrap(), 0.25, epsilon = 1e-15);

        let b6 = RewardModel::bernoulli(0.6).unwrap();
        let b5 = RewardModel::bernoulli(0.5).unwrap();
        let d2 = renyi_divergence(&b6, &b5, DivergenceOrder::two()).unwrap();
        assert_abs_diff_eq!(d2, (0.36_f64 / 0.5 + 0.16 / 0.5).ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(d2, 0.039_221, epsilon = 5e-7);
    }

    #[test]
    fn kl_worked_values() {
        let b5 = RewardModel::bernoulli(0.5).unwrap();
        let b6 = RewardModel::bernoulli(0.6).unwrap();
        assert_eq!(kl_divergence(&b5, &b5).unwrap(), 0.0);
        assert_abs_diff_eq!(kl_divergence(&b5, &b6).unwrap(), 0.020_411, epsilon = 5e-7);
        let g9 = RewardModel::gaussian(0.9, 1.0).unwrap();
        let g6 = RewardModel::gaussian(0.6, 1.0).unwrap();
        assert_abs_diff_eq!(kl_divergence(&g9, &g6).unwrap(), 0.045, epsilon = 1e-15);
        let p2 = RewardModel::poisson(2.0).unwrap();
        let p3 = RewardModel::poisson(3.0).unwrap();
        assert_abs_diff_eq!(
            kl_divergence(&p2, &p3).unwrap(),
            2.0 * (2.0_f64 / 3.0).ln() - 2.0 + 3.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn renyi_order_one_is_kl() {
        let p2 = RewardModel::poisson(2.0).unwrap();
        let p3 = RewardModel::poisson(3.0).unwrap();
        assert_eq!(
            renyi_divergence(&p2, &p3, order(1.0)).unwrap(),
            kl_divergence(&p2, &p3).unwrap()
        );
        // and the Poisson closed form tends to KL as α → 1
        let near = renyi_divergence(&p2, &p3, order(1.0 - 1e-6)).unwrap();
        assert_abs_diff_eq!(near, kl_divergence(&p2, &p3).unwrap(), epsilon = 1e-6);
    }

    #[test]
    fn mixed_families_rejected() {
        let b = RewardModel::bernoulli(0.5).unwrap();
        let g = RewardModel::gaussian(0.5, 1.0).unwrap();
        assert_eq!(renyi_divergence(&b, &g, order(0.5)), Err(Error::MixedFamilies));
        assert_eq!(kl_divergence(&b, &g), Err(Error::MixedFamilies));
        let c3 = RewardModel::categorical(vec![0.2, 0.3, 0.5]).unwrap();
        let c2 = RewardModel::categorical(vec![0.5, 0.5]).unwrap();
        assert_eq!(kl_divergence(&c3, &c2), Err(Error::MixedFamilies));
    }

    #[test]
    fn support_violations() {
        let a = RewardModel::bernoulli(0.5).unwrap();
        let b = RewardModel::bernoulli(1.0).unwrap();
        assert_eq!(renyi_divergence(&a, &b, DivergenceOrder::two()), Err(Error::DivergenceInfinite));
        assert_eq!(kl_divergence(&a, &b), Err(Error::DivergenceInfinite));
        // α < 1 stays finite
        assert!(renyi_divergence(&a, &b, order(0.5)).unwrap().is_finite());
        // disjoint supports are infinite at every order
        let z = RewardModel::bernoulli(0.0).unwrap();
        assert_eq!(renyi_divergence(&z, &b, order(0.5)), Err(Error::DivergenceInfinite));
    }

    #[test]
    fn quadrature_oracle_examples() {
        let g1 = RewardModel::gaussian(1.0, 1.0).unwrap();
        let g0 = RewardModel::gaussian(0.0, 1.0).unwrap();
        let g2 = RewardModel::gaussian(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(renyi_quadrature_oracle(&g1, &g0, order(0.5)).unwrap(), 0.25, epsilon = 1e-6);
        assert_abs_diff_eq!(renyi_quadrature_oracle(&g0, &g0, order(0.7)).unwrap(), 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(renyi_quadrature_oracle(&g2, &g0, order(0.25)).unwrap(), 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(
            renyi_quadrature_oracle(&g2, &g0, DivergenceOrder::two()).unwrap(),
            4.0,
            epsilon = 1e-6
        );
    }

    #[test]
    fn quadrature_oracle_rejects_discrete_and_order_one() {
        let b = RewardModel::bernoulli(0.5).unwrap();
        assert!(matches!(
            renyi_quadrature_oracle(&b, &b, order(0.5)),
            Err(Error::UnsupportedFamily { .. })
        ));
        let g = RewardModel::gaussian(0.0, 1.0).unwrap();
        assert!(renyi_quadrature_oracle(&g, &g, order(1.0)).is_err());
    }

    #[test]
    fn unequal_variance_gaussian_matches_quadrature() {
        let a = RewardModel::gaussian(0.4, 2.0).unwrap();
        let b = RewardModel::gaussian(-1.0, 0.7).unwrap();
        for &alpha in &[0.1, 0.5, 0.9] {
            let closed = renyi_divergence(&a, &b, order(alpha)).unwrap();
            let numeric = renyi_quadrature_oracle(&a, &b, order(alpha)).unwrap();
            assert_abs_diff_eq!(closed, numeric, epsilon = 1e-9);
        }
        // α = 2 with σ_b² < σ_a²/2 diverges
        let wide = RewardModel::gaussian(0.0, 4.0).unwrap();
        let narrow = RewardModel::gaussian(0.0, 1.0).unwrap();
        assert_eq!(
            renyi_divergence(&wide, &narrow, DivergenceOrder::two()),
            Err(Error::DivergenceInfinite)
        );
    }

    #[test]
    fn gaussian_mean_gap_is_tight() {
        let a = RewardModel::gaussian(1.7, 2.5).unwrap();
        let b = RewardModel::gaussian(-0.3, 2.5).unwrap();
        let alpha = 0.35;
        let d = renyi_divergence(&a, &b, order(alpha)).unwrap();
        let sigma = 2.5_f64.sqrt();
        assert_abs_diff_eq!(subgaussian_mean_gap_bound(sigma, sigma, alpha, d), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn single_precision_divergences() {
        let a = RewardModel::<f32>::gaussian(1.0, 1.0).unwrap();
        let b = RewardModel::<f32>::gaussian(0.0, 1.0).unwrap();
        let d = renyi_divergence(&a, &b, DivergenceOrder::new(0.5_f32).unwrap()).unwrap();
        assert!((d - 0.25).abs() < 1e-6);
    }
}
