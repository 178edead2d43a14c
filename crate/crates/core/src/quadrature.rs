//! Globally adaptive Gauss-Kronrod (10/21 point) integration on a finite
//! interval, with caller-supplied initial breakpoints.

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

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub epsabs: f64,
    pub epsrel: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            epsabs: 1e-14,
            epsrel: 1e-12,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
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

/// One 21-point Kronrod evaluation with the QUADPACK error heuristic.
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[10];
    let mut resg = 0.0;
    let mut resabs = fc.abs() * WGK[10];
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
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
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (value, err)
}

/// Integrates `f` over the partition given by `breaks` (sorted, at least two
/// points), bisecting the worst segment until the summed error estimate meets
/// `max(epsabs, epsrel * |value|)`.
///
/// If the interval budget runs out the best estimate is still returned as long
/// as its error is within 1000x of the target; beyond that the call fails.
pub fn integrate<F>(f: F, breaks: &[f64], opts: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    assert!(breaks.len() >= 2, "need at least one segment");
    let mut heap = BinaryHeap::with_capacity(opts.max_intervals + breaks.len());
    let mut value = 0.0;
    let mut error = 0.0;
    for w in breaks.windows(2) {
        let (v, e) = gk21(&f, w[0], w[1]);
        value += v;
        error += e;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }
    let target = |v: f64| opts.epsabs.max(opts.epsrel * v.abs());
    while error > target(value) && heap.len() < opts.max_intervals {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // cannot split further; keep it and stop refining
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk21(&f, worst.a, mid);
        let (v2, e2) = gk21(&f, mid, worst.b);
        value += v1 + v2 - worst.value;
        error += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // re-sum to shed accumulated cancellation in the running totals
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    if !value.is_finite() {
        return Err(Error::QuadratureNonConvergence {
            achieved: f64::INFINITY,
            target: target(0.0),
        });
    }
    if error > 1e3 * target(value) {
        return Err(Error::QuadratureNonConvergence {
            achieved: error,
            target: target(value),
        });
    }
    Ok(QuadResult {
        value,
        error,
        intervals: heap.len(),
    })
}

/// Limit of a sequence of partial sums by Wynn's epsilon algorithm, using at
/// most the last `WYNN_DEPTH` terms. Returns the estimate and the change from
/// the estimate one term earlier.
pub fn wynn_epsilon(sums: &[f64]) -> Option<(f64, f64)> {
    if sums.len() < 3 {
        return None;
    }
    let best = |s: &[f64]| -> f64 {
        // prev holds column k−1, cur column k
        let mut prev = vec![0.0; s.len() + 1];
        let mut cur = s.to_vec();
        let mut estimate = s[s.len() - 1];
        let mut k = 0;
        while cur.len() > 1 {
            let next: Vec<f64> = (0..cur.len() - 1)
                .map(|n| {
                    let d = cur[n + 1] - cur[n];
                    if d == 0.0 {
                        f64::INFINITY
                    } else {
                        prev[n + 1] + 1.0 / d
                    }
                })
                .collect();
            if next.iter().any(|v| !v.is_finite()) {
                break;
            }
            k += 1;
            prev = cur;
            cur = next;
            if k % 2 == 0 {
                estimate = cur[cur.len() - 1];
            }
        }
        estimate
    };
    let n = sums.len();
    let tail = &sums[n.saturating_sub(WYNN_DEPTH)..];
    let shorter = &sums[(n - 1).saturating_sub(WYNN_DEPTH)..n - 1];
    let e = best(tail);
    Some((e, (e - best(shorter)).abs()))
}

/// Partial sums fed to [`wynn_epsilon`].
pub const WYNN_DEPTH: usize = 24;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_is_exact_on_polynomials() {
        for deg in 0..=30u32 {
            let r = integrate(|x| x.powi(deg as i32), &[0.0, 1.0], &QuadOptions::default()).unwrap();
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!((r.value - exact).abs() < 1e-14, "degree {deg}: {}", r.value);
        }
    }

    #[test]
    fn oscillatory_integrand() {
        // ∫_0^50 cos(7u) e^{-u/10} du
        let f = |u: f64| (7.0 * u).cos() * (-u / 10.0).exp();
        let exact = {
            let a = 0.1f64;
            let w = 7.0f64;
            let e = (-a * 50.0f64).exp();
            (a - e * (a * (w * 50.0).cos() - w * (w * 50.0).sin())) / (a * a + w * w)
        };
        let r = integrate(f, &[0.0, 50.0], &QuadOptions::default()).unwrap();
        assert!((r.value - exact).abs() < 1e-13, "{} vs {exact}", r.value);
        assert!(r.error < 1e-12);
    }

    #[test]
    fn endpoint_singularity_converges() {
        let r = integrate(|x| x.sqrt().recip(), &[0.0, 1.0], &QuadOptions {
            epsabs: 1e-10,
            epsrel: 1e-10,
            max_intervals: 2000,
        })
        .unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // 1 − 1/2 + 1/3 − ... = ln 2
        let mut sums = Vec::new();
        let mut s = 0.0;
        for j in 1..=20 {
            s += if j % 2 == 1 { 1.0 } else { -1.0 } / j as f64;
            sums.push(s);
        }
        let (e, d) = wynn_epsilon(&sums).unwrap();
        assert!((e - std::f64::consts::LN_2).abs() < 1e-12, "{e}");
        assert!(d < 1e-10);
        assert!(wynn_epsilon(&sums[..2]).is_none());
    }
}
