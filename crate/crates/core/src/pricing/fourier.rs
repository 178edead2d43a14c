//! Damped Fourier representations of call/put prices and tail probabilities
//! in terms of the mgf along a vertical line inside the strip.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{ModelCgf, Reflected};
use crate::quadrature::{integrate, wynn_epsilon, QuadOptions, QuadResult};
use crate::roots::solve_bracketed;

/// Choice of the real part of the integration line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Damping {
    /// `α = min(0.75(r*−1), 0.5(r*−1) + 0.25)` for calls, `a = r*/2` for
    /// tails (mirrored for puts).
    Standard,
    /// The larger of the standard choice and the saddle point of the
    /// integrand, capped short of the strip endpoint. Keeps relative accuracy
    /// in deep wings and tails.
    Auto,
    /// Explicit `α` (pricing) or `a` (tails).
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PricingOptions {
    pub damping: Damping,
    /// Absolute tolerance relative to the integrand magnitude at `u = 0`.
    pub scaled_epsabs: f64,
    pub epsrel: f64,
    pub max_intervals: usize,
    /// Truncation: stop at `U` with `|integrand envelope|·min(U, 4/|x|)`
    /// below this fraction of the integrand at zero.
    pub truncation: f64,
}

impl Default for PricingOptions {
    fn default() -> Self {
        Self {
            damping: Damping::Auto,
            scaled_epsabs: 1e-13,
            epsrel: 1e-12,
            max_intervals: 8000,
            truncation: 1e-15,
        }
    }
}

const MARTINGALE_TOL: f64 = 1e-9;
const U_CAP: f64 = 1048576.0;
/// Tail inversions with a worse relative error estimate are rejected.
const MAX_TAIL_REL_ERROR: f64 = 1e-6;
/// Auto damping never goes closer than this fraction of the distance to the
/// strip endpoint.
const EDGE_MARGIN: f64 = 1e-3;

fn check_martingale<M: ModelCgf + ?Sized>(model: &M) -> Result<()> {
    let strip = model.strip();
    if !(strip.upper > 1.0) {
        return Err(Error::NotApplicable(format!(
            "{}: r* = {} <= 1, E[e^X] is infinite and calls cannot be priced",
            model.name(),
            strip.upper
        )));
    }
    let k1 = model.cgf_real(1.0)?;
    if k1.abs() > MARTINGALE_TOL {
        return Err(Error::NotApplicable(format!(
            "{}: model is not martingale-normalized (K(1) = {k1:e})",
            model.name()
        )));
    }
    Ok(())
}

/// Solves `K'(a) = x` for `a` in `(0, upper)`; `None` when `x <= K'(0)`.
fn saddle<M: ModelCgf + ?Sized>(model: &M, x: f64, upper: f64) -> Option<f64> {
    let d = |a: f64| model.cgf_deriv(1, a).map(|k| k - x).unwrap_or(f64::NAN);
    let start = 1e-9 * upper.min(1.0);
    if !(d(start) < 0.0) {
        return None;
    }
    let hi = if upper.is_finite() {
        let mut gap = 0.5 * upper;
        loop {
            let a = upper - gap;
            if d(a) > 0.0 {
                break a;
            }
            if gap < 1e-12 * upper {
                return Some(upper - gap);
            }
            gap *= 0.5;
        }
    } else {
        let mut a = 1.0;
        while !(d(a) > 0.0) {
            a *= 2.0;
            if a > 1e8 {
                return None;
            }
        }
        a
    };
    solve_bracketed("saddle point", d, start, hi, 1e-12).ok()
}

/// Real part of the integration line for the upper tail `P(X > x)`.
fn tail_line<M: ModelCgf + ?Sized>(model: &M, x: f64, damping: Damping) -> Result<f64> {
    let r = model.strip().upper;
    let standard = if r.is_finite() { 0.5 * r } else { 1.0 };
    let a = match damping {
        Damping::Fixed(a) => a,
        Damping::Standard => standard,
        Damping::Auto => {
            let cap = if r.is_finite() { r * (1.0 - EDGE_MARGIN) } else { f64::INFINITY };
            match saddle(model, x, r) {
                Some(s) => s.max(standard).min(cap),
                None => standard,
            }
        }
    };
    if !(a > 0.0 && a < r) {
        return Err(Error::StripViolation {
            re: a,
            lower: 0.0,
            upper: r,
        });
    }
    Ok(a)
}

/// Absolute tolerances for one line integral.
struct LineTol {
    epsabs: f64,
    epsrel: f64,
    truncation: f64,
    max_intervals: usize,
}

/// Period breaks beyond this count are not placed.
const MAX_PERIODS: usize = 100_000;
/// Oscillatory integrals needing more half periods than this are summed
/// zero to zero and extrapolated.
const SERIES_PERIODS: f64 = 2000.0;
const SERIES_MAX_TERMS: usize = 2000;
const SERIES_PROBES: usize = 40;

fn integrate_line<F>(f: F, scale_width: f64, x: f64, tol: LineTol) -> Result<QuadResult>
where
    F: Fn(f64) -> (f64, f64),
{
    // remainder beyond U: envelope·U in general, envelope·4/|x| once the
    // phase e^{−iux} dominates (integration by parts)
    let reach = |u: f64| if x != 0.0 { u.min(4.0 / x.abs()) } else { u };
    let mut u_max = 1.0;
    loop {
        let ok = |u: f64| f(u).1 * reach(u) < tol.truncation;
        if ok(u_max) && ok(2.0 * u_max) {
            break;
        }
        if u_max >= U_CAP {
            log::debug!("truncation cap reached at U = {u_max}");
            break;
        }
        u_max *= 2.0;
    }
    if x != 0.0 && u_max * x.abs() / PI > SERIES_PERIODS {
        let half = PI / x.abs();
        let env0 = f(0.0).1;
        let mut u0 = 64.0 * half;
        while u0 < u_max && f(u0).1 > 1e-3 * env0 {
            u0 *= 2.0;
        }
        match oscillatory_tail(&f, u0.min(u_max), half, &tol) {
            Some((z0, tail)) => {
                let head = integrate_direct(&f, scale_width, x, z0, &tol)?;
                return Ok(QuadResult {
                    value: head.value + tail.value,
                    error: head.error + tail.error,
                    intervals: head.intervals + tail.intervals,
                });
            }
            None => log::debug!("zero-to-zero series did not settle; integrating to U = {u_max}"),
        }
    }
    integrate_direct(&f, scale_width, x, u_max, &tol)
}

/// Adaptive integral over `[0, u_max]`.
fn integrate_direct<F>(f: &F, scale_width: f64, x: f64, u_max: f64, tol: &LineTol) -> Result<QuadResult>
where
    F: Fn(f64) -> (f64, f64),
{
    // geometric breaks resolve any peak near zero; period breaks the
    // oscillation of e^{−iux}
    let mut breaks = vec![0.0];
    let mut b = u_max;
    let finest = 0.01 * scale_width.min(1.0);
    while b > finest {
        breaks.push(b);
        b *= 0.5;
    }
    if x != 0.0 {
        let period = PI / x.abs();
        let n = ((u_max / period) as usize).min(MAX_PERIODS);
        breaks.extend((1..=n).map(|j| j as f64 * period));
    }
    breaks.sort_by(|a, b| a.total_cmp(b));
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    breaks.retain(|&b| b <= u_max);
    integrate(
        |u| f(u).0,
        &breaks,
        &QuadOptions {
            epsabs: tol.epsabs,
            epsrel: tol.epsrel,
            max_intervals: tol.max_intervals.max(4 * breaks.len()),
        },
    )
}

/// Next sign change of `g` after `z`, probing in quarter steps of `d`.
fn next_zero<G: Fn(f64) -> f64>(g: &G, z: f64, d: f64) -> Option<f64> {
    let step = 0.25 * d;
    let mut lo = z + step;
    let s = g(lo);
    if !s.is_finite() {
        return None;
    }
    for i in 2..=SERIES_PROBES {
        let hi = z + i as f64 * step;
        let v = g(hi);
        if !v.is_finite() {
            return None;
        }
        if v == 0.0 {
            return Some(hi);
        }
        if (v > 0.0) != (s > 0.0) {
            return solve_bracketed("integrand zero", g, lo, hi, 0.0).ok();
        }
        lo = hi;
    }
    None
}

/// `∫_{z₀}^∞` as a series of integrals between consecutive zeros of the
/// integrand, extrapolated with Wynn's epsilon. `z₀` is the first zero past
/// `u0`.
fn oscillatory_tail<F>(f: &F, u0: f64, half: f64, tol: &LineTol) -> Option<(f64, QuadResult)>
where
    F: Fn(f64) -> (f64, f64),
{
    let g = |u: f64| f(u).0;
    let z0 = next_zero(&g, u0 - 0.25 * half, half)?;
    let opts = QuadOptions {
        epsabs: 1e-3 * tol.epsabs,
        epsrel: 1e-14,
        max_intervals: 64,
    };
    let mut sums: Vec<f64> = Vec::new();
    let mut total = 0.0;
    let mut chunk_error = 0.0;
    let mut intervals = 0;
    let (mut z, mut d) = (z0, half);
    let mut settled = 0;
    let mut last = f64::NAN;
    while sums.len() < SERIES_MAX_TERMS {
        let zn = next_zero(&g, z, d)?;
        let q = integrate(g, &[z, zn], &opts).ok()?;
        total += q.value;
        chunk_error += q.error;
        intervals += q.intervals;
        sums.push(total);
        d = zn - z;
        z = zn;
        let Some((est, change)) = wynn_epsilon(&sums) else { continue };
        let target = tol.epsabs.max(tol.epsrel * est.abs());
        settled = if sums.len() >= 8 && change <= target && (est - last).abs() <= target {
            settled + 1
        } else {
            0
        };
        last = est;
        if settled >= 2 {
            return Some((
                z0,
                QuadResult {
                    value: est,
                    error: change + chunk_error,
                    intervals,
                },
            ));
        }
    }
    None
}

fn price_tol(f0: f64, opts: &PricingOptions) -> LineTol {
    let scale = f0.abs().max(f64::MIN_POSITIVE);
    LineTol {
        epsabs: opts.scaled_epsabs * scale,
        epsrel: opts.epsrel,
        truncation: opts.truncation * scale,
        max_intervals: opts.max_intervals,
    }
}

/// `log P(X > x)` by inversion along `Re u = a`:
/// `F̄(x) = e^{−ax}/π ∫₀^∞ Re[e^{−iux} M(a+iu)/(a+iu)] du`.
///
/// The integrand is scaled by `e^{−(K(a) − ax)}`, so the result stays
/// meaningful far below the smallest positive double.
pub fn log_survival_with<M: ModelCgf + ?Sized>(model: &M, x: f64, opts: &PricingOptions) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("survival", format!("x must be finite, got {x}")));
    }
    let a = tail_line(model, x, opts.damping)?;
    let dist = a.min(model.strip().upper - a);
    let shift = model.cgf_real(a)? - a * x;
    let f = |u: f64| -> (f64, f64) {
        let z = Complex64::new(a, u);
        match model.cgf(z) {
            Ok(k) => {
                let num = (k - z * x - shift).exp();
                let val = num / z;
                (val.re / PI, num.norm() / z.norm() / PI)
            }
            Err(_) => (f64::NAN, f64::NAN),
        }
    };
    // the integral is of order f(0)·min(dist, 1); tolerances follow it
    let size = f(0.0).0.abs().max(f64::MIN_POSITIVE) * dist.min(1.0);
    let tol = LineTol {
        epsabs: opts.scaled_epsabs * size,
        epsrel: opts.epsrel.max(1e-10),
        truncation: 10.0 * opts.scaled_epsabs * size,
        max_intervals: opts.max_intervals,
    };
    let q = integrate_line(f, dist, x, tol)?;
    if !(q.value > 0.0) || q.error > MAX_TAIL_REL_ERROR * q.value {
        return Err(Error::QuadratureNonConvergence {
            achieved: q.error / q.value.abs(),
            target: MAX_TAIL_REL_ERROR,
        });
    }
    Ok(shift + q.value.ln())
}

pub fn survival_with<M: ModelCgf + ?Sized>(model: &M, x: f64, opts: &PricingOptions) -> Result<f64> {
    // below the mean the complement is the small, well-conditioned side
    if opts.damping == Damping::Auto && model.strip().lower < 0.0 && x < model.cgf_deriv(1, 0.0)? {
        return Ok(1.0 - survival_line(&Reflected(model), -x, opts)?);
    }
    survival_line(model, x, opts)
}

fn survival_line<M: ModelCgf + ?Sized>(model: &M, x: f64, opts: &PricingOptions) -> Result<f64> {
    // shallow tails may legitimately be close to 1 or carry cancellation;
    // evaluate in linear scale there
    let a = tail_line(model, x, opts.damping)?;
    let shift = model.cgf_real(a)? - a * x;
    if shift < -600.0 {
        return Ok(log_survival_with(model, x, opts)?.exp());
    }
    let f = |u: f64| -> (f64, f64) {
        let z = Complex64::new(a, u);
        match model.cgf(z) {
            Ok(k) => {
                let num = (k - z * x).exp();
                let val = num / z;
                (val.re / PI, num.norm() / z.norm() / PI)
            }
            Err(_) => (f64::NAN, f64::NAN),
        }
    };
    let dist = a.min(model.strip().upper - a);
    let tol = price_tol(f(0.0).0, opts);
    Ok(integrate_line(f, dist, x, tol)?.value)
}

pub fn survival<M: ModelCgf + ?Sized>(model: &M, x: f64) -> Result<f64> {
    survival_with(model, x, &PricingOptions::default())
}

/// `P(X < −x)` via the reflected law.
pub fn distribution<M: ModelCgf + ?Sized>(model: &M, neg_x: f64) -> Result<f64> {
    survival_with(&Reflected(model), -neg_x, &PricingOptions::default())
}

pub fn distribution_with<M: ModelCgf + ?Sized>(model: &M, neg_x: f64, opts: &PricingOptions) -> Result<f64> {
    survival_with(&Reflected(model), -neg_x, opts)
}

/// `log P(X < −x)`.
pub fn log_distribution_with<M: ModelCgf + ?Sized>(model: &M, neg_x: f64, opts: &PricingOptions) -> Result<f64> {
    log_survival_with(&Reflected(model), -neg_x, opts)
}

/// Standard call damping inside `(0, r*−1)`.
pub fn default_alpha(r_star: f64) -> f64 {
    if r_star.is_finite() {
        let w = r_star - 1.0;
        (0.75 * w).min(0.5 * w + 0.25)
    } else {
        1.0
    }
}

/// Damped Fourier price with line `Re u = 1 + α`. For `α > 0` this is the
/// call, for `α < −1` the put.
fn carr_madan<M: ModelCgf + ?Sized>(model: &M, k: f64, alpha: f64, opts: &PricingOptions) -> Result<f64> {
    let a = 1.0 + alpha;
    let strip = model.strip();
    strip.check(a)?;
    let dist = strip.distance(a).min(alpha.abs()).min(a.abs());
    let f = |u: f64| -> (f64, f64) {
        let z = Complex64::new(a, u);
        match model.cgf(z) {
            Ok(kz) => {
                let num = (kz - z * k + k).exp();
                let den = Complex64::new(alpha, u) * z;
                let val = num / den;
                (val.re / PI, num.norm() / den.norm() / PI)
            }
            Err(_) => (f64::NAN, f64::NAN),
        }
    };
    let tol = price_tol(f(0.0).0, opts);
    Ok(integrate_line(f, dist, k, tol)?.value)
}

fn call_alpha<M: ModelCgf + ?Sized>(model: &M, k: f64, damping: Damping) -> f64 {
    let r = model.strip().upper;
    let standard = default_alpha(r);
    match damping {
        Damping::Fixed(a) => a,
        Damping::Standard => standard,
        Damping::Auto => {
            let cap = if r.is_finite() { (r - 1.0) * (1.0 - EDGE_MARGIN) } else { f64::INFINITY };
            match saddle(model, k, r) {
                Some(s) => (s - 1.0).max(standard).min(cap),
                None => standard,
            }
        }
    }
}

fn put_alpha<M: ModelCgf + ?Sized>(model: &M, k: f64, damping: Damping) -> f64 {
    let q = model.strip().q_star();
    let standard = -1.0 - if q.is_finite() { (0.75 * q).min(0.5 * q + 0.25) } else { 1.0 };
    match damping {
        Damping::Fixed(a) => a,
        Damping::Standard => standard,
        Damping::Auto => {
            let refl = Reflected(model);
            let cap = if q.is_finite() { -1.0 - q * (1.0 - EDGE_MARGIN) } else { f64::NEG_INFINITY };
            match saddle(&refl, -k, q) {
                Some(s) => (-1.0 - s).min(standard).max(cap),
                None => standard,
            }
        }
    }
}

/// Normalized call price `E[(e^X − e^k)^+]`.
pub fn call_price_with<M: ModelCgf + ?Sized>(model: &M, k: f64, opts: &PricingOptions) -> Result<f64> {
    check_martingale(model)?;
    if !k.is_finite() {
        return Err(Error::domain("call_price", format!("k must be finite, got {k}")));
    }
    // in the money: put-call parity keeps the integral small
    if opts.damping == Damping::Auto && k < 0.0 && model.strip().lower < 0.0 {
        return Ok(checked_put(model, k, opts)? - k.exp_m1());
    }
    let alpha = call_alpha(model, k, opts.damping);
    let r = model.strip().upper;
    if !(alpha > 0.0 && alpha < r - 1.0) {
        return Err(Error::StripViolation {
            re: 1.0 + alpha,
            lower: 1.0,
            upper: r,
        });
    }
    carr_madan(model, k, alpha, opts)
}

pub fn call_price<M: ModelCgf + ?Sized>(model: &M, k: f64) -> Result<f64> {
    call_price_with(model, k, &PricingOptions::default())
}

/// Normalized put price `E[(e^k − e^X)^+]`.
pub fn put_price_with<M: ModelCgf + ?Sized>(model: &M, k: f64, opts: &PricingOptions) -> Result<f64> {
    check_martingale(model)?;
    if !k.is_finite() {
        return Err(Error::domain("put_price", format!("k must be finite, got {k}")));
    }
    if opts.damping == Damping::Auto && k > 0.0 {
        let alpha = call_alpha(model, k, opts.damping);
        return Ok(carr_madan(model, k, alpha, opts)? + k.exp_m1());
    }
    checked_put(model, k, opts)
}

fn checked_put<M: ModelCgf + ?Sized>(model: &M, k: f64, opts: &PricingOptions) -> Result<f64> {
    let alpha = put_alpha(model, k, opts.damping);
    let q = model.strip().q_star();
    if !(alpha < -1.0 && alpha > -1.0 - q) {
        return Err(Error::StripViolation {
            re: 1.0 + alpha,
            lower: -q,
            upper: 0.0,
        });
    }
    carr_madan(model, k, alpha, opts)
}

pub fn put_price<M: ModelCgf + ?Sized>(model: &M, k: f64) -> Result<f64> {
    put_price_with(model, k, &PricingOptions::default())
}

/// Out-of-the-money price: call for `k >= 0`, put for `k < 0`.
pub fn otm_price_with<M: ModelCgf + ?Sized>(model: &M, k: f64, opts: &PricingOptions) -> Result<f64> {
    if k >= 0.0 {
        call_price_with(model, k, opts)
    } else {
        put_price_with(model, k, opts)
    }
}

pub fn otm_price<M: ModelCgf + ?Sized>(model: &M, k: f64) -> Result<f64> {
    otm_price_with(model, k, &PricingOptions::default())
}
