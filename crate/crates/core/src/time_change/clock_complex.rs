//! Analytic continuation of the clock cgfs to complex arguments with
//! `Re v < p_T`.

use num_complex::Complex64;

use crate::clocks::{ClockCgf, CirParams, GammaOuParams};
use crate::error::{Error, Result};

pub(crate) fn clock_cgf_complex(clock: &ClockCgf, t: f64, pt: f64, v: Complex64) -> Result<Complex64> {
    if !(v.re < pt) {
        return Err(Error::Explosion {
            v: v.re,
            explosion: pt,
        });
    }
    if v.im == 0.0 {
        return clock.eval(t, v.re).map(|k| Complex64::new(k, 0.0));
    }
    Ok(match clock {
        ClockCgf::GammaOu(p) => gamma_ou(p, t, v),
        ClockCgf::Cir(p) => cir(p, t, v),
        ClockCgf::Deterministic { rate } => v * (rate * t),
    })
}

fn gamma_ou(p: &GammaOuParams, t: f64, v: Complex64) -> Complex64 {
    let c = p.c(t);
    let z = v - p.lambda * p.b;
    // Re(1 − vc/b) > 0 whenever Re v < p_T, so the principal log is the
    // continuous branch
    let ratio = if z.norm() < p.series_radius() {
        let [c1, c2, c3, c4] = p.series_coefficients(t);
        c1 + z * (c2 + z * (c3 + z * c4))
    } else {
        (-p.b * (1.0 - v * (c / p.b)).ln() - v * t) / z
    };
    v * (p.y0 * c) + p.lambda * p.a * ratio
}

/// `cosh(√x)` and `sinh(√x)/√x` as power series, for small `|x|`.
pub(crate) fn cosh_sinhc_series(x: Complex64) -> (Complex64, Complex64) {
    let mut c = Complex64::new(0.0, 0.0);
    let mut s = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    for j in 0..30 {
        let n = 2 * j;
        if j > 0 {
            term *= x / ((n - 1) as f64 * n as f64);
        }
        c += term;
        s += term / (n + 1) as f64;
        if term.norm() < 1e-18 {
            break;
        }
    }
    (c, s)
}

fn cir(p: &CirParams, t: f64, v: Complex64) -> Complex64 {
    let k = p.kappa;
    let l2 = p.lambda * p.lambda;
    let g2 = k * k - 2.0 * l2 * v;
    let gamma = g2.sqrt();
    let (log_d, b) = if (gamma * t).norm() < 0.5 {
        let (cx, sx) = cosh_sinhc_series(0.25 * g2 * t * t);
        let d = cx + 0.5 * k * t * sx;
        // Re D > 0 on this disc
        (d.ln(), v * t * sx / d)
    } else {
        // Off the real axis Re γ > 0, so every Log below has its argument in
        // the right half plane (|ξ| < 1 for κ > 0).
        let e = (-gamma * t).exp();
        let xi = (gamma - k) / (gamma + k) * e;
        let log_d = 0.5 * gamma * t + (gamma + k).ln() - (2.0 * gamma).ln() + (1.0 + xi).ln();
        let den = (gamma + k) + (gamma - k) * e;
        (log_d, 2.0 * v * (1.0 - e) / den)
    };
    k * k * p.eta * t / l2 - 2.0 * k * p.eta / l2 * log_d + p.y0 * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clocks::{make_cir, make_gamma_ou};

    #[test]
    fn agrees_with_real_evaluation_off_axis() {
        let clocks = [
            make_gamma_ou(GammaOuParams {
                lambda: 1.68,
                a: 0.51,
                b: 11.6,
                y0: 1.0,
            })
            .unwrap(),
            make_cir(CirParams {
                kappa: 1.2101,
                eta: 0.5507,
                lambda: 1.7864,
                y0: 1.0,
            })
            .unwrap(),
            make_cir(CirParams {
                kappa: 0.0,
                eta: 0.5,
                lambda: 0.8,
                y0: 0.3,
            })
            .unwrap(),
        ];
        for c in clocks {
            let t = 1.0;
            let pt = c.explosion_point(t).unwrap();
            for frac in [-3.0, -0.2, 0.1, 0.5, 0.9, 0.999] {
                let v = frac * pt;
                let real = c.eval(t, v).unwrap();
                let z = clock_cgf_complex(&c, t, pt, Complex64::new(v, 1e-9)).unwrap();
                assert!((z.re - real).abs() < 1e-8 * (1.0 + real.abs()), "{} {v}", c.name());
                // Im K(v + iε)/ε ≈ K'(v) > 0 for v > 0
                if v > 0.0 {
                    assert!(z.im > 0.0);
                }
            }
        }
    }

    #[test]
    fn characteristic_function_modulus_bounded() {
        let c = make_cir(CirParams {
            kappa: 0.5,
            eta: 0.4,
            lambda: 1.1,
            y0: 0.2,
        })
        .unwrap();
        let t = 3.0;
        let pt = c.explosion_point(t).unwrap();
        for re in [0.0, 0.5 * pt, 0.95 * pt] {
            let bound = c.eval(t, re).unwrap();
            for im in [0.1, 1.0, 10.0, 100.0, 1e4] {
                let k = clock_cgf_complex(&c, t, pt, Complex64::new(re, im)).unwrap();
                assert!(k.re <= bound + 1e-12, "{re} {im}");
            }
        }
    }

    #[test]
    fn continuous_along_vertical_lines() {
        let c = make_cir(CirParams {
            kappa: 0.3,
            eta: 0.4,
            lambda: 1.5,
            y0: 0.2,
        })
        .unwrap();
        let t = 10.0;
        let pt = c.explosion_point(t).unwrap();
        let re = 0.7 * pt;
        let mut prev = clock_cgf_complex(&c, t, pt, Complex64::new(re, 1e-6)).unwrap();
        for i in 1..20000 {
            let y = i as f64 * 1e-3;
            let k = clock_cgf_complex(&c, t, pt, Complex64::new(re, y)).unwrap();
            assert!((k - prev).norm() < 0.05, "jump at y = {y}: {prev} -> {k}");
            prev = k;
        }
    }
}
