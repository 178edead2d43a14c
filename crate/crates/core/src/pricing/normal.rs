//! Normalized Black-Scholes prices in total-volatility terms and their
//! inversion.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

/// Low part of `1/√2 − FRAC_1_SQRT_2`.
const FRAC_1_SQRT_2_LO: f64 = -4.833646656726457e-17;

/// `Φ(z)` from the complementary error function, accurate in both tails.
///
/// The argument `−z/√2` is carried as a double-double: in the far lower tail
/// the rounding error of the product alone would cost ~`2x²·ε` relative.
pub fn norm_cdf(z: f64) -> f64 {
    let x = -z * FRAC_1_SQRT_2;
    let e = libm::erfc(x);
    if x < 1.0 {
        return 0.5 * e;
    }
    let lo = (-z).mul_add(FRAC_1_SQRT_2, -x) - z * FRAC_1_SQRT_2_LO;
    // erfc(x + δ) ≈ erfc(x) − δ·2e^{−x²}/√π
    let d = lo * 2.0 * (-x * x).exp() / PI.sqrt();
    0.5 * (e - d)
}

pub fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

fn check_inputs(op: &'static str, k: f64, v: f64) -> Result<()> {
    if !k.is_finite() || !(v >= 0.0) || v.is_nan() {
        return Err(Error::domain(op, format!("need finite k and V >= 0, got k = {k}, V = {v}")));
    }
    Ok(())
}

/// Out-of-the-money price: the call `Φ(d₁) − e^k Φ(d₂)` for `k >= 0`, the put
/// `e^k Φ(−d₂) − Φ(−d₁)` for `k < 0`, with `d₁,₂ = −k/V ± V/2`.
pub fn bs_otm(k: f64, v: f64) -> Result<f64> {
    check_inputs("bs_otm", k, v)?;
    if v == 0.0 {
        return Ok(0.0);
    }
    if v.is_infinite() {
        return Ok(if k >= 0.0 { 1.0 } else { k.exp() });
    }
    let d1 = -k / v + 0.5 * v;
    let d2 = d1 - v;
    let p = if k >= 0.0 {
        norm_cdf(d1) - k.exp() * norm_cdf(d2)
    } else {
        k.exp() * norm_cdf(-d2) - norm_cdf(-d1)
    };
    Ok(p.max(0.0))
}

/// Normalized call `E[(e^X − e^k)^+]` under Black-Scholes with total
/// volatility `V`.
pub fn bs_call(k: f64, v: f64) -> Result<f64> {
    let otm = bs_otm(k, v)?;
    Ok(if k >= 0.0 { otm } else { -k.exp_m1() + otm })
}

/// `∂c/∂V = φ(d₁)`, the same for calls and puts.
pub fn bs_vega(k: f64, v: f64) -> f64 {
    norm_pdf(-k / v + 0.5 * v)
}

/// Inverts an out-of-the-money price (call for `k >= 0`, put for `k < 0`).
pub fn implied_total_vol_otm(k: f64, price: f64) -> Result<f64> {
    if !k.is_finite() || !price.is_finite() {
        return Err(Error::domain("implied_total_vol", format!("non-finite input k = {k}, price = {price}")));
    }
    let upper = if k >= 0.0 { 1.0 } else { k.exp() };
    if !(price > 0.0) {
        return Err(Error::ArbitrageBound {
            k,
            price,
            bound: "lower (intrinsic)",
            value: 0.0,
        });
    }
    if !(price < upper) {
        return Err(Error::ArbitrageBound {
            k,
            price,
            bound: "upper",
            value: upper,
        });
    }
    let target = price.ln();
    let g = |v: f64| bs_otm(k, v).map(|p| p.ln() - target).unwrap_or(f64::NAN);
    // bracket [lo, hi] with g(lo) < 0 < g(hi)
    let mut lo = 0.0;
    let mut hi = 1.0;
    while g(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::RootBracketing {
                what: "implied_total_vol".into(),
                lo,
                hi,
            });
        }
    }
    // the log price is concave in V beyond √(2|k|); start there
    let mut v = (2.0 * k.abs()).sqrt();
    if k == 0.0 {
        v = price * (2.0 * PI).sqrt();
    }
    if !(v > lo && v < hi) {
        v = 0.5 * (lo + hi);
    }
    for _ in 0..200 {
        let p = bs_otm(k, v)?;
        let r = if p > 0.0 { p.ln() - target } else { f64::NEG_INFINITY };
        if r == 0.0 {
            return Ok(v);
        }
        if r < 0.0 {
            lo = v;
        } else {
            hi = v;
        }
        let slope = if p > 0.0 { bs_vega(k, v) / p } else { 0.0 };
        let mut next = if r.is_finite() && slope > 0.0 && slope.is_finite() {
            v - r / slope
        } else {
            f64::NAN
        };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - v).abs() <= 2.0 * f64::EPSILON * v || hi - lo <= 2.0 * f64::EPSILON * hi {
            return Ok(next);
        }
        v = next;
    }
    Err(Error::RootNonConvergence {
        what: format!("implied_total_vol at k = {k}"),
        iterations: 200,
    })
}

/// Inverts a call price `c` with `(1 − e^k)^+ < c < 1`.
pub fn implied_total_vol(k: f64, price: f64) -> Result<f64> {
    if !k.is_finite() || !price.is_finite() {
        return Err(Error::domain("implied_total_vol", format!("non-finite input k = {k}, price = {price}")));
    }
    let intrinsic = (-k.exp_m1()).max(0.0);
    if !(price > intrinsic) {
        return Err(Error::ArbitrageBound {
            k,
            price,
            bound: "lower (intrinsic)",
            value: intrinsic,
        });
    }
    if !(price < 1.0) {
        return Err(Error::ArbitrageBound {
            k,
            price,
            bound: "upper",
            value: 1.0,
        });
    }
    let otm = if k >= 0.0 { price } else { price + k.exp_m1() };
    implied_total_vol_otm(k, otm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_reference_values() {
        let refs = [
            (-37.0, 5.7255712225245768227e-300),
            (-30.0, 4.9067139271481870595e-198),
            (-20.0, 2.7536241186062336951e-89),
            (-10.0, 7.619853024160526066e-24),
            (-5.0, 2.8665157187919391167e-7),
            (-1.0, 0.15865525393145705141),
            (0.5, 0.69146246127401310364),
            (3.0, 0.99865010196836990547),
            (8.0, 0.9999999999999993779),
        ];
        for (z, want) in refs {
            let got = norm_cdf(z);
            assert!(((got - want) / want).abs() < 1e-15, "Phi({z}) = {got}, want {want}");
        }
    }

    #[test]
    fn call_reference_values() {
        assert!((bs_call(0.0, 0.2).unwrap() - 0.079655674554057962931).abs() < 1e-16);
        assert!((bs_call(1.0, 0.7).unwrap() - 0.038032439297332145987).abs() < 1e-16);
    }

    #[test]
    fn limits() {
        for k in [-2.0f64, -0.1, 0.0, 0.3, 4.0] {
            let intrinsic = (1.0 - k.exp()).max(0.0);
            assert!((bs_call(k, 0.0).unwrap() - intrinsic).abs() < 1e-16);
        }
        assert!((bs_call(0.0, 80.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(bs_call(0.0, -1.0).is_err());
        assert!(bs_call(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn round_trip_at_wing_strike() {
        let v = implied_total_vol(1.0, bs_call(1.0, 0.7).unwrap()).unwrap();
        assert!((v - 0.7).abs() < 1e-12);
        let v = implied_total_vol(0.0, bs_call(0.0, 0.2).unwrap()).unwrap();
        assert!((v - 0.2).abs() < 1e-14);
    }

    #[test]
    fn otm_round_trip_grid() {
        for i in 0..60 {
            let k = -5.0 + 10.0 * i as f64 / 59.0;
            for j in 0..60 {
                let v = 0.01 + 4.99 * j as f64 / 59.0;
                let p = bs_otm(k, v).unwrap();
                if p < f64::MIN_POSITIVE {
                    continue;
                }
                let back = implied_total_vol_otm(k, p).unwrap();
                assert!((back - v).abs() < 1e-10, "k={k} V={v}: {back}");
            }
        }
    }

    #[test]
    fn arbitrage_bounds_are_named() {
        match implied_total_vol(-1.0, 0.5) {
            Err(Error::ArbitrageBound { bound, .. }) => assert!(bound.starts_with("lower")),
            other => panic!("{other:?}"),
        }
        match implied_total_vol(0.5, 1.0) {
            Err(Error::ArbitrageBound { bound, .. }) => assert_eq!(bound, "upper"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn vanishing_price_gives_vanishing_vol() {
        let mut prev = f64::INFINITY;
        for e in [1e-2, 1e-4, 1e-8, 1e-16, 1e-32] {
            let v = implied_total_vol_otm(0.5, e).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < 0.1);
    }
}
