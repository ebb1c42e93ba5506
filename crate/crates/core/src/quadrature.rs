//! Globally adaptive 21-point Gauss–Kronrod quadrature on finite intervals.
//!
//! The interval with the largest error estimate is bisected until the summed
//! error estimate drops below the requested tolerance. Error estimates follow
//! the QUADPACK `qk21` rescaling.

use alloc::vec::Vec;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
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

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_758_846_578,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss 10-point weights, paired with the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subintervals: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_subintervals: 2000,
        }
    }
}

impl QuadratureOptions {
    pub fn with_abs_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub subintervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod_21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut kronrod = f_center * WGK[10];
    let mut gauss = 0.0;
    let mut abs_sum = kronrod.abs();
    let mut samples = [0.0f64; 21];
    samples[10] = f_center;
    for (j, (&x, &w)) in XGK[..10].iter().zip(&WGK[..10]).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        samples[j] = f1;
        samples[20 - j] = f2;
        kronrod += w * (f1 + f2);
        abs_sum += w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((samples[j] - mean).abs() + (samples[20 - j] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        let scale = libm::pow(200.0 * error / res_asc, 1.5);
        error = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let floor = 50.0 * f64::EPSILON * res_abs;
        if floor > error {
            error = floor;
        }
    }
    Segment { a, b, value, error }
}

/// Integrates `f` over `[a, b]` (any order of the limits).
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    options: QuadratureOptions,
) -> Result<Quadrature> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite("integration limits"));
    }
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
            subintervals: 0,
        });
    }
    let first = gauss_kronrod_21(&f, a, b);
    let mut segments: Vec<Segment> = Vec::with_capacity(64);
    segments.push(first);
    let mut value = first.value;
    let mut error = first.error;

    loop {
        if !value.is_finite() {
            return Err(Error::NonFinite("integrand"));
        }
        let tol = options.abs_tol.max(options.rel_tol * value.abs());
        if error <= tol {
            break;
        }
        if segments.len() >= options.max_subintervals {
            return Err(Error::Quadrature {
                lower: a,
                upper: b,
                estimate: value,
                error,
            });
        }
        let (idx, worst) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, s)| (i, *s))
            .expect("segments are never empty");
        let mid = 0.5 * (worst.a + worst.b);
        // Interval no longer resolvable in floating point.
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            return Err(Error::Quadrature {
                lower: a,
                upper: b,
                estimate: value,
                error,
            });
        }
        let left = gauss_kronrod_21(&f, worst.a, mid);
        let right = gauss_kronrod_21(&f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        segments[idx] = left;
        segments.push(right);
        // Resum to keep the running totals free of cancellation drift.
        if segments.len().is_multiple_of(64) {
            value = segments.iter().map(|s| s.value).sum();
            error = segments.iter().map(|s| s.error).sum();
        }
    }
    Ok(Quadrature {
        value: segments.iter().map(|s| s.value).sum(),
        error,
        subintervals: segments.len(),
    })
}

/// Integrates over consecutive breakpoints `points[0] .. points[last]`,
/// summing the pieces. Useful when the integrand has a known steep region.
pub fn integrate_pieces<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    options: QuadratureOptions,
) -> Result<Quadrature> {
    let pieces = points.len().saturating_sub(1).max(1);
    let piece_options = QuadratureOptions {
        abs_tol: options.abs_tol / pieces as f64,
        ..options
    };
    let mut total = Quadrature {
        value: 0.0,
        error: 0.0,
        subintervals: 0,
    };
    for w in points.windows(2) {
        let q = integrate(&f, w[0], w[1], piece_options)?;
        total.value += q.value;
        total.error += q.error;
        total.subintervals += q.subintervals;
    }
    Ok(total)
}
