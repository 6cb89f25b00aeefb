//! Adaptive Gauss–Kronrod (7/15) quadrature.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_3,
    0.949_107_912_342_758_524_526_189_684_047_9,
    0.864_864_423_359_769_072_789_712_788_640_9,
    0.741_531_185_599_394_439_863_864_773_280_8,
    0.586_087_235_467_691_130_294_144_845_693_0,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_24,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_2,
    0.104_790_010_322_250_183_839_876_322_541_5,
    0.140_653_259_715_525_918_745_189_590_510_2,
    0.169_004_726_639_267_902_826_583_426_598_6,
    0.190_350_578_064_785_409_913_256_402_421_0,
    0.204_432_940_075_298_892_414_161_999_234_6,
    0.209_482_141_084_727_828_012_999_174_891_7,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_1,
    0.279_705_391_489_276_667_901_467_771_423_8,
    0.381_830_050_505_118_944_950_369_775_488_98,
    0.417_959_183_673_469_387_755_102_040_816_3,
];

/// Convergence settings for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-8,
            rel_tol: 1e-12,
            max_intervals: 4096,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult<S> {
    pub value: S,
    pub error_estimate: S,
    pub intervals: usize,
}

struct Segment<S> {
    lo: S,
    hi: S,
    value: S,
    error: S,
}

fn kronrod_segment<S: Scalar, F: Fn(S) -> S>(f: &F, lo: S, hi: S) -> Segment<S> {
    let half = S::lit(0.5);
    let centre = half * (lo + hi);
    let half_len = half * (hi - lo);
    let f_centre = f(centre);
    let mut kronrod = f_centre * S::lit(WGK[7]);
    let mut gauss = f_centre * S::lit(WG[3]);
    for j in 0..7 {
        let dx = half_len * S::lit(XGK[j]);
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += S::lit(WGK[j]) * pair;
        if j % 2 == 1 {
            gauss += S::lit(WG[j / 2]) * pair;
        }
    }
    Segment {
        lo,
        hi,
        value: kronrod * half_len,
        error: ((kronrod - gauss) * half_len).abs(),
    }
}

/// Integrates `f` over `[lo, hi]`, bisecting the worst segment until the
/// summed error estimate is at most `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<S, F>(f: F, lo: S, hi: S, settings: QuadratureSettings) -> Result<QuadratureResult<S>>
where
    S: Scalar,
    F: Fn(S) -> S,
{
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::QuadratureDidNotConverge {
            reason: "integration limits must be finite".into(),
        });
    }
    if lo == hi {
        return Ok(QuadratureResult {
            value: S::zero(),
            error_estimate: S::zero(),
            intervals: 0,
        });
    }
    let (lo, hi, sign) = if lo < hi { (lo, hi, S::one()) } else { (hi, lo, -S::one()) };
    let abs_tol = S::lit(settings.abs_tol);
    let rel_tol = S::lit(settings.rel_tol);

    let mut segments = vec![kronrod_segment(&f, lo, hi)];
    loop {
        let value = segments.iter().fold(S::zero(), |acc, s| acc + s.value);
        let error = segments.iter().fold(S::zero(), |acc, s| acc + s.error);
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::QuadratureDidNotConverge {
                reason: "integrand produced a non-finite value".into(),
            });
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(QuadratureResult {
                value: sign * value,
                error_estimate: error,
                intervals: segments.len(),
            });
        }
        if segments.len() >= settings.max_intervals {
            return Err(Error::QuadratureDidNotConverge {
                reason: format!(
                    "error estimate {:e} above tolerance after {} intervals",
                    error.as_f64(),
                    segments.len()
                ),
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.partial_cmp(&b.1.error).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
            .expect("at least one segment");
        let seg = segments.swap_remove(worst);
        let mid = S::lit(0.5) * (seg.lo + seg.hi);
        if mid <= seg.lo || mid >= seg.hi {
            return Err(Error::QuadratureDidNotConverge {
                reason: "segment width reached machine precision".into(),
            });
        }
        segments.push(kronrod_segment(&f, seg.lo, mid));
        segments.push(kronrod_segment(&f, mid, seg.hi));
    }
}
