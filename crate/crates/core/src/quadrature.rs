//! Globally adaptive 21-point Gauss–Kronrod quadrature on finite intervals.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use crate::scalar::Real;

// Kronrod abscissae on [-1, 1], positive half; XGK[1], XGK[3], ... are the
// 10-point Gauss nodes.
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
    0.123_491_976_262_065_851_077_208_292_357_146,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Stopping rule: accept when `error <= max(abs, rel * |estimate|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<T> {
    pub abs: T,
    pub rel: T,
    pub max_intervals: usize,
}

impl<T: Real> Default for Tolerance<T> {
    /// `abs = 1e-12`, `rel = 1e-10`, floored at a small multiple of the
    /// scalar's machine epsilon so `f32` callers get an attainable target.
    fn default() -> Self {
        let floor = T::epsilon() * T::lit(50.0);
        Self {
            abs: T::lit(1e-12).max(floor),
            rel: T::lit(1e-10).max(floor),
            max_intervals: 500,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
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
}

fn gauss_kronrod_21<T: Real, F: Fn(T) -> T>(f: &F, lo: T, hi: T) -> Segment<T> {
    let half = T::lit(0.5);
    let center = half * (lo + hi);
    let half_len = half * (hi - lo);
    let f_center = f(center);
    let mut kronrod = f_center * T::lit(WGK[10]);
    let mut gauss = T::zero();
    for j in 0..10 {
        let dx = half_len * T::lit(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + T::lit(WGK[j]) * pair;
        if j % 2 == 1 {
            gauss = gauss + T::lit(WG[j / 2]) * pair;
        }
    }
    Segment {
        lo,
        hi,
        value: kronrod * half_len,
        error: ((kronrod - gauss) * half_len).abs(),
    }
}

/// Integrates `f` over `[points[0], points[last]]`, using every interior
/// point as an initial breakpoint.
///
/// Segments are bisected largest-error first until the summed error meets
/// `tol`. Breakpoints must be finite and nondecreasing; empty pieces are
/// skipped.
pub fn integrate<T, F>(f: F, points: &[T], tol: Tolerance<T>) -> Result<Estimate<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    if points.len() < 2 {
        return Err(Error::argument("need at least two breakpoints"));
    }
    if points.iter().any(|p| !p.is_finite()) || points.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain(
            "breakpoints must be finite and nondecreasing",
        ));
    }

    let mut segments: Vec<Segment<T>> = points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gauss_kronrod_21(&f, w[0], w[1]))
        .collect();
    if segments.is_empty() {
        return Ok(Estimate {
            value: T::zero(),
            error: T::zero(),
            intervals: 0,
        });
    }

    loop {
        // Fixed summation order keeps results bit-reproducible.
        let (value, error) = segments.iter().fold((T::zero(), T::zero()), |(v, e), s| {
            (v + s.value, e + s.error)
        });
        let target = tol.abs.max(tol.rel * value.abs());
        if error <= target {
            return Ok(Estimate {
                value,
                error,
                intervals: segments.len(),
            });
        }
        if segments.len() >= tol.max_intervals || !value.is_finite() {
            return Err(Error::Quadrature {
                estimate: value.to_f64().unwrap_or(f64::NAN),
                error: error.to_f64().unwrap_or(f64::NAN),
                intervals: segments.len(),
            });
        }

        let worst = segments.iter().enumerate().fold(0, |best, (i, s)| {
            if s.error > segments[best].error {
                i
            } else {
                best
            }
        });
        let Segment { lo, hi, .. } = segments[worst];
        let mid = T::lit(0.5) * (lo + hi);
        if !(mid > lo && mid < hi) {
            // Interval cannot be split further in this precision; accept what we have.
            return Ok(Estimate {
                value,
                error,
                intervals: segments.len(),
            });
        }
        segments[worst] = gauss_kronrod_21(&f, lo, mid);
        segments.push(gauss_kronrod_21(&f, mid, hi));
    }
}
