//! Globally adaptive Gauss–Kronrod quadrature.
//!
//! The 21-point Kronrod rule with its embedded 10-point Gauss rule is applied
//! on a set of subintervals; the interval with the largest error estimate is
//! bisected until the summed error estimate meets the tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

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
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Tolerances for [`integrate`]. Converged when the error estimate is below
/// `max(abs_tol, rel_tol * |I|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_intervals: 2000,
        }
    }
}

impl QuadConfig {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        QuadConfig {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    /// Integral of |f|, useful as a cancellation indicator.
    pub abs_value: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[10];
    let mut resg = 0.0;
    let mut resabs = fc.abs() * WGK[10];
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Segment {
        a,
        b,
        value,
        error,
        abs_value: resabs,
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    integrate_with_breaks(f, &[a, b], cfg)
}

/// Integrates `f` over `[points[0], points[last]]`, seeding the partition with
/// the given breakpoints (which must be increasing).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    if points.len() < 2 {
        return Err(Error::invalid("quadrature needs at least two points"));
    }
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        if !(w[1] >= w[0]) {
            return Err(Error::invalid("quadrature breakpoints must be increasing"));
        }
        if w[1] > w[0] {
            heap.push(gk21(&f, w[0], w[1]));
        }
    }
    let totals = |heap: &BinaryHeap<Segment>| {
        heap.iter().fold((0.0, 0.0, 0.0), |acc, s| {
            (acc.0 + s.value, acc.1 + s.error, acc.2 + s.abs_value)
        })
    };
    loop {
        let (value, error, abs_value) = totals(&heap);
        if !value.is_finite() {
            return Err(Error::no_convergence(
                "adaptive quadrature (non-finite integrand)",
                f64::NAN,
            ));
        }
        let tol = cfg.abs_tol.max(cfg.rel_tol * value.abs());
        if error <= tol || heap.is_empty() {
            return Ok(QuadResult {
                value,
                abs_error: error,
                abs_value,
                intervals: heap.len(),
            });
        }
        if heap.len() >= cfg.max_intervals {
            return Err(Error::no_convergence("adaptive quadrature", error));
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in double precision.
            let (value, error, abs_value) = totals(&heap);
            let value = value + worst.value;
            let error = error + worst.error;
            if error <= 10.0 * tol {
                return Ok(QuadResult {
                    value,
                    abs_error: error,
                    abs_value: abs_value + worst.abs_value,
                    intervals: heap.len() + 1,
                });
            }
            return Err(Error::no_convergence(
                "adaptive quadrature (roundoff)",
                error,
            ));
        }
        heap.push(gk21(&f, worst.a, mid));
        heap.push(gk21(&f, mid, worst.b));
    }
}

/// Integrates `f` over `[a, ∞)` through the map `x = a + t/(1-t)`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let g = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let one_minus = 1.0 - t;
        let x = a + t / one_minus;
        let v = f(x) / (one_minus * one_minus);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate_with_breaks(g, &[0.0, 0.5, 0.9, 0.99, 1.0], cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x, 0.0, 3.0, &QuadConfig::default()).unwrap();
        assert!((r.value - (81.0 / 4.0 - 9.0)).abs() < 1e-12);
    }

    #[test]
    fn oscillatory() {
        let r = integrate(
            |x| (50.0 * x).sin(),
            0.0,
            std::f64::consts::PI,
            &QuadConfig::default(),
        )
        .unwrap();
        // (1 - cos(50 pi)) / 50 = 0
        assert!(r.value.abs() < 1e-10);
    }

    #[test]
    fn endpoint_singularity() {
        let cfg = QuadConfig::new(1e-10, 1e-10);
        let r = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, &cfg).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn gaussian_tail() {
        let r = integrate_semi_infinite(|x| (-x * x).exp(), 0.0, &QuadConfig::default()).unwrap();
        assert!((r.value - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-10);
    }

    #[test]
    fn bad_breakpoints() {
        assert!(integrate_with_breaks(|x| x, &[1.0, 0.0], &QuadConfig::default()).is_err());
    }
}
