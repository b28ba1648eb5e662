//! Globally adaptive Gauss–Kronrod quadrature (21-point Kronrod extension of
//! the 10-point Gauss rule), in the style of QUADPACK's `qag`.
//!
//! The interval with the largest error estimate is bisected until the summed
//! error estimate drops below `max(abs_tol, rel_tol * |integral|)`. Integrable
//! endpoint singularities are handled by repeated bisection; interior
//! discontinuities should be passed as break points to
//! [`integrate_with_breaks`].

// Nodes and weights keep their published digits.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_300_212,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the nodes XGK[1], XGK[3], .., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and limits for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Scalar> Default for QuadratureOptions<T> {
    /// `eps^(3/4)` for both tolerances: about `1.8e-12` in `f64` and `6.5e-6`
    /// in `f32`.
    fn default() -> Self {
        let tol = T::epsilon().powf(T::lit(0.75));
        Self {
            abs_tol: tol,
            rel_tol: tol,
            max_intervals: 4000,
        }
    }
}

/// Result of a converged integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error: T,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    lo: T,
    hi: T,
    value: T,
    error: T,
    splittable: bool,
}

fn kronrod21<T, F>(f: &F, lo: T, hi: T) -> Segment<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let half = T::lit(0.5);
    let center = half * (lo + hi);
    let half_len = half * (hi - lo);
    let abs_half_len = half_len.abs();

    let fc = f(center);
    let mut res_gauss = T::zero();
    let mut res_kronrod = T::lit(WGK[10]) * fc;
    let mut res_abs = res_kronrod.abs();
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];

    for j in 0..10 {
        let dx = half_len * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let wk = T::lit(WGK[j]);
        res_kronrod = res_kronrod + wk * (f1 + f2);
        res_abs = res_abs + wk * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss = res_gauss + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }

    let mean = res_kronrod * half;
    let mut res_asc = T::lit(WGK[10]) * (fc - mean).abs();
    for j in 0..10 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_kronrod * half_len;
    res_abs = res_abs * abs_half_len;
    res_asc = res_asc * abs_half_len;
    let mut error = ((res_kronrod - res_gauss) * half_len).abs();
    if res_asc != T::zero() && error != T::zero() {
        let scaled = (T::lit(200.0) * error / res_asc).powf(T::lit(1.5));
        error = res_asc * scaled.min(T::one());
    }
    let roundoff = T::lit(50.0) * T::epsilon() * res_abs;
    if res_abs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) {
        error = error.max(roundoff);
    }

    // Stop splitting once the midpoint no longer separates the endpoints.
    let splittable = center > lo && center < hi;
    Segment {
        lo,
        hi,
        value,
        error,
        splittable,
    }
}

/// Integrates `f` over `[a, b]`. Reversed bounds give the negated integral.
pub fn integrate<T, F>(f: F, a: T, b: T, opts: &QuadratureOptions<T>) -> Result<Integral<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    integrate_with_breaks(f, &[a, b], opts)
}

/// Integrates `f` over `[points[0], points[last]]`, starting from the
/// partition given by `points`. Points must be monotone (either direction).
pub fn integrate_with_breaks<T, F>(
    f: F,
    points: &[T],
    opts: &QuadratureOptions<T>,
) -> Result<Integral<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if points.len() < 2 {
        return Err(Error::Precondition(
            "quadrature needs at least two points".into(),
        ));
    }
    let (first, last) = (points[0], points[points.len() - 1]);
    if first == last {
        return Ok(Integral {
            value: T::zero(),
            error: T::zero(),
            intervals: 0,
        });
    }
    let sign = if last < first { -T::one() } else { T::one() };

    let mut segments: Vec<Segment<T>> = Vec::with_capacity(points.len() + 16);
    let mut prev = if sign > T::zero() { first } else { last };
    let mut ordered: Vec<T> = points.to_vec();
    if sign < T::zero() {
        ordered.reverse();
    }
    for &p in &ordered[1..] {
        if p > prev {
            segments.push(kronrod21(&f, prev, p));
            prev = p;
        } else if p < prev {
            return Err(Error::Precondition(
                "quadrature break points must be monotone".into(),
            ));
        }
    }

    loop {
        let (mut value, mut error) = (T::zero(), T::zero());
        for s in &segments {
            value = value + s.value;
            error = error + s.error;
        }
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Quadrature {
                estimate: value.as_f64(),
                error: error.as_f64(),
            });
        }
        let tolerance = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= tolerance {
            return Ok(Integral {
                value: sign * value,
                error,
                intervals: segments.len(),
            });
        }

        let worst = segments
            .iter()
            .enumerate()
            .filter(|(_, s)| s.splittable)
            .max_by(|(_, a), (_, b)| a.error.partial_cmp(&b.error).unwrap())
            .map(|(i, _)| i);
        let Some(worst) = worst.filter(|_| segments.len() < opts.max_intervals) else {
            return Err(Error::Quadrature {
                estimate: (sign * value).as_f64(),
                error: error.as_f64(),
            });
        };

        let s = segments.swap_remove(worst);
        let mid = T::lit(0.5) * (s.lo + s.hi);
        segments.push(kronrod21(&f, s.lo, mid));
        segments.push(kronrod21(&f, mid, s.hi));
    }
}
