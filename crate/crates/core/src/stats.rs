//! Small order-statistic and regression helpers used for reporting.

use rand::Rng;

use crate::scalar::Scalar;

/// Nearest-rank percentile of an ascending slice; `p` in `[0, 100]`.
///
/// Rank is `⌈p/100 · n⌉` clamped to `[1, n]`. Panics on an empty slice.
pub fn percentile_nearest_rank<S: Scalar>(sorted: &[S], p: S) -> S {
    assert!(!sorted.is_empty(), "percentile of an empty sample");
    let n = sorted.len();
    let rank = (p / S::lit(100.0) * S::from_count(n as u64)).ceil();
    let rank = rank.to_usize().unwrap_or(1).clamp(1, n);
    sorted[rank - 1]
}

pub fn sorted_copy<S: Scalar>(values: &[S]) -> Vec<S> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    v
}

/// Nearest-rank median.
pub fn median<S: Scalar>(values: &[S]) -> S {
    percentile_nearest_rank(&sorted_copy(values), S::lit(50.0))
}

pub fn mean<S: Scalar>(values: &[S]) -> S {
    values.iter().fold(S::zero(), |a, &b| a + b) / S::from_count(values.len() as u64)
}

/// Percentile-bootstrap interval for `median(b) − median(a)`, resampling
/// each sample independently `resamples` times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapInterval<S> {
    pub estimate: S,
    pub lower: S,
    pub upper: S,
}

impl<S: Scalar> BootstrapInterval<S> {
    pub fn half_width(&self) -> S {
        (self.upper - self.lower) / S::lit(2.0)
    }
}

pub fn bootstrap_median_difference<S: Scalar, R: Rng + ?Sized>(
    a: &[S],
    b: &[S],
    confidence: S,
    resamples: usize,
    rng: &mut R,
) -> BootstrapInterval<S> {
    let mut diffs = Vec::with_capacity(resamples);
    let mut buf_a = vec![S::zero(); a.len()];
    let mut buf_b = vec![S::zero(); b.len()];
    for _ in 0..resamples {
        for slot in buf_a.iter_mut() {
            *slot = a[rng.random_range(0..a.len())];
        }
        for slot in buf_b.iter_mut() {
            *slot = b[rng.random_range(0..b.len())];
        }
        diffs.push(median(&buf_b) - median(&buf_a));
    }
    let diffs = sorted_copy(&diffs);
    let tail = (S::one() - confidence) / S::lit(2.0) * S::lit(100.0);
    BootstrapInterval {
        estimate: median(b) - median(a),
        lower: percentile_nearest_rank(&diffs, tail),
        upper: percentile_nearest_rank(&diffs, S::lit(100.0) - tail),
    }
}

/// Least-squares fit `y ≈ intercept + slope · ln x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFit<S> {
    pub intercept: S,
    pub slope: S,
    pub r_squared: S,
}

pub fn fit_log<S: Scalar>(xs: &[S], ys: &[S]) -> LogFit<S> {
    let lx: Vec<S> = xs.iter().map(|x| x.ln()).collect();
    let mx = mean(&lx);
    let my = mean(ys);
    let (mut sxy, mut sxx, mut syy) = (S::zero(), S::zero(), S::zero());
    for (&x, &y) in lx.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == S::zero() { S::one() } else { sxy * sxy / (sxx * syy) };
    LogFit {
        intercept,
        slope,
        r_squared,
    }
}
