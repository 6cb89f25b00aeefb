//! Special functions needed for prior densities.

use crate::scalar::Scalar;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma<S: Scalar>(x: S) -> S {
    let half = S::lit(0.5);
    if x < half {
        // Reflection keeps the series in its accurate range.
        let pi = S::PI();
        return (pi / (pi * x).sin()).ln() - ln_gamma(S::one() - x);
    }
    let x = x - S::one();
    let mut acc = S::lit(LANCZOS_COEF[0]);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += S::lit(c) / (x + S::from_count(i as u64));
    }
    let t = x + S::lit(LANCZOS_G) + half;
    half * (S::lit(2.0) * S::PI()).ln() + (x + half) * t.ln() - t + acc.ln()
}

pub fn ln_beta<S: Scalar>(a: S, b: S) -> S {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}
