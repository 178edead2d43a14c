//! Bracketed scalar root finding.
//!
//! Everything here is bisection-based with an optional secant acceleration
//! (Illinois variant). The functions we solve are monotone on their bracket
//! but can be extremely steep near a blow-up, where Newton-type steps
//! overshoot the strip, so we never leave the bracket.

use crate::error::{Error, Result};

const MAX_ITER: usize = 400;

/// Finds a root of `f` on `[lo, hi]` where `f(lo)` and `f(hi)` have opposite
/// signs. Iterates until the bracket collapses to adjacent floats or its width
/// falls below `xtol`; returns the endpoint with the smaller residual.
pub fn solve_bracketed<F>(what: &str, mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::RootBracketing {
            what: what.to_string(),
            lo,
            hi,
        });
    }
    // Illinois false position, falling back to bisection when the secant
    // point is unusable (infinite residuals near a pole).
    let mut side = 0i8;
    for _ in 0..MAX_ITER {
        let width = (b - a).abs();
        let mid = 0.5 * (a + b);
        if width <= xtol || mid == a || mid == b {
            return Ok(if fa.abs() <= fb.abs() { a } else { b });
        }
        let mut c = if fa.is_finite() && fb.is_finite() {
            (a * fb - b * fa) / (fb - fa)
        } else {
            mid
        };
        // keep a guaranteed fraction of bisection progress
        let lo_c = a.min(b) + 0.01 * width;
        let hi_c = a.max(b) - 0.01 * width;
        if !c.is_finite() || c <= lo_c || c >= hi_c {
            c = mid;
        }
        let fc = f(c);
        if fc == 0.0 {
            return Ok(c);
        }
        if fc.is_nan() {
            return Err(Error::RootNonConvergence {
                what: format!("{what} (NaN residual at {c})"),
                iterations: 0,
            });
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::RootNonConvergence {
        what: what.to_string(),
        iterations: MAX_ITER,
    })
}

/// Plain bisection to adjacent floats. Used where the function has a pole
/// inside the search interval boundary and false position stalls.
pub fn bisect<F>(what: &str, mut f: F, lo: f64, hi: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let fa = f(a);
    let fb = f(b);
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::RootBracketing {
            what: what.to_string(),
            lo,
            hi,
        });
    }
    let sa = fa.signum();
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == sa {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}
