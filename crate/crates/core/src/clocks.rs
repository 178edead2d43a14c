//! Integrated-activity clocks `T_t = ∫_0^t y_s ds` for a Gamma-OU or CIR
//! activity rate `y`, plus a deterministic clock used as a fixture.
//!
//! Evaluation here is for real arguments only. The complex continuation used
//! by pricing lives in `time_change`.

use crate::error::{Error, Result};
use crate::model::CriterionClass;
use crate::roots::bisect;

/// `dy = −λ y dt + dZ_{λt}`, `Z` compound Poisson with rate `a` and
/// exponential jumps of mean `1/b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaOuParams {
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
    pub y0: f64,
}

/// `dy = κ(η − y) dt + λ √y dW`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirParams {
    pub kappa: f64,
    pub eta: f64,
    pub lambda: f64,
    pub y0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClockCgf {
    GammaOu(GammaOuParams),
    Cir(CirParams),
    /// `T_t = rate · t`.
    Deterministic { rate: f64 },
}

fn positive(model: &'static str, name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::param(model, format!("{name} must be finite and > 0, got {x}")))
    }
}

pub fn make_gamma_ou(p: GammaOuParams) -> Result<ClockCgf> {
    positive("Gamma-OU", "lambda", p.lambda)?;
    positive("Gamma-OU", "a", p.a)?;
    positive("Gamma-OU", "b", p.b)?;
    positive("Gamma-OU", "y0", p.y0)?;
    Ok(ClockCgf::GammaOu(p))
}

/// `kappa = 0` is accepted (driftless activity).
pub fn make_cir(p: CirParams) -> Result<ClockCgf> {
    if !(p.kappa.is_finite() && p.kappa >= 0.0) {
        return Err(Error::param("CIR", format!("kappa must be >= 0, got {}", p.kappa)));
    }
    positive("CIR", "eta", p.eta)?;
    positive("CIR", "lambda", p.lambda)?;
    positive("CIR", "y0", p.y0)?;
    Ok(ClockCgf::Cir(p))
}

pub fn make_deterministic(rate: f64) -> Result<ClockCgf> {
    positive("deterministic clock", "rate", rate)?;
    Ok(ClockCgf::Deterministic { rate })
}

fn check_t(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::domain("clock", format!("horizon t must be > 0, got {t}")))
    }
}

impl GammaOuParams {
    /// `(1 − e^{−λt})/λ`.
    pub fn c(&self, t: f64) -> f64 {
        -(-self.lambda * t).exp_m1() / self.lambda
    }

    pub fn explosion(&self, t: f64) -> f64 {
        self.b / self.c(t)
    }

    /// Below this distance from `v = λb` the log term is replaced by its
    /// Taylor polynomial.
    pub(crate) fn series_radius(&self) -> f64 {
        1e-4 * self.lambda * self.b
    }

    /// Taylor coefficients of `g(v)/(v − λb)` about `λb`, where
    /// `g(v) = −b log(1 − vc/b) − vt` vanishes at `λb`.
    pub(crate) fn series_coefficients(&self, t: f64) -> [f64; 4] {
        let ce = self.c(t) * (self.lambda * t).exp();
        let b = self.b;
        [
            ce - t,
            ce * ce / b / 2.0,
            2.0 * ce.powi(3) / (b * b) / 6.0,
            6.0 * ce.powi(4) / b.powi(3) / 24.0,
        ]
    }
}

impl CirParams {
    pub fn explosion(&self, t: f64) -> Result<f64> {
        // γ = i s with s t/2 = θ: κ + s cot θ = 0 ⇔ κt/2 + θ cot θ = 0
        let kt2 = 0.5 * self.kappa * t;
        let f = |th: f64| kt2 + th / th.tan();
        let lo = 0.5 * std::f64::consts::PI * 1e-6;
        let hi = std::f64::consts::PI - 1e-9;
        let theta = bisect("CIR explosion point", f, lo, hi)?;
        let s = 2.0 * theta / t;
        Ok((s * s + self.kappa * self.kappa) / (2.0 * self.lambda * self.lambda))
    }

    /// `I(v) = κ + γ coth(γt/2)` continued to `v > κ²/(2λ²)` as `κ + s cot(st/2)`.
    pub fn explosion_residual(&self, v: f64, t: f64) -> f64 {
        let g2 = self.kappa * self.kappa - 2.0 * self.lambda * self.lambda * v;
        if g2 >= 0.0 {
            let g = g2.sqrt();
            self.kappa + g / (0.5 * g * t).tanh()
        } else {
            let s = (-g2).sqrt();
            self.kappa + s / (0.5 * s * t).tan()
        }
    }

    /// `(log D, B)` at real `v` with `D = cosh(γt/2) + κ sinh(γt/2)/γ` and
    /// `B = 2v sinh(γt/2)/(γ D)`.
    fn log_d_and_b(&self, v: f64, t: f64) -> Result<(f64, f64)> {
        let k = self.kappa;
        let g2 = k * k - 2.0 * self.lambda * self.lambda * v;
        let x = 0.25 * g2 * t * t;
        if x.abs() < 0.25 {
            // cosh(√x) and sinh(√x)/√x as power series in x
            let (mut cx, mut sx) = (0.0, 0.0);
            let mut term = 1.0;
            for j in 0..30 {
                let n = 2 * j;
                if j > 0 {
                    term *= x / ((n - 1) as f64 * n as f64);
                }
                cx += term;
                sx += term / (n + 1) as f64;
                if term.abs() < 1e-18 {
                    break;
                }
            }
            let d = cx + 0.5 * k * t * sx;
            return Ok((d.ln(), v * t * sx / d));
        }
        if x > 0.0 {
            let g = g2.sqrt();
            let e = (-g * t).exp();
            let den = (g + k) + (g - k) * e;
            Ok((0.5 * g * t + (den / (2.0 * g)).ln(), -2.0 * v * (-g * t).exp_m1() / den))
        } else {
            let th = (-x).sqrt();
            let sx = th.sin() / th;
            let d = th.cos() + 0.5 * k * t * sx;
            if !(d > 0.0) {
                return Err(Error::Explosion {
                    v,
                    explosion: self.explosion(t).unwrap_or(f64::NAN),
                });
            }
            Ok((d.ln(), v * t * sx / d))
        }
    }
}

impl ClockCgf {
    pub fn name(&self) -> String {
        match self {
            ClockCgf::GammaOu(p) => format!(
                "Gamma-OU(lambda={}, a={}, b={}, y0={})",
                p.lambda, p.a, p.b, p.y0
            ),
            ClockCgf::Cir(p) => format!(
                "CIR(kappa={}, eta={}, lambda={}, y0={})",
                p.kappa, p.eta, p.lambda, p.y0
            ),
            ClockCgf::Deterministic { rate } => format!("deterministic(rate={rate})"),
        }
    }

    /// `p_T(t)`: the point where `E[e^{v T_t}]` becomes infinite.
    pub fn explosion_point(&self, t: f64) -> Result<f64> {
        check_t(t)?;
        match self {
            ClockCgf::GammaOu(p) => Ok(p.explosion(t)),
            ClockCgf::Cir(p) => p.explosion(t),
            ClockCgf::Deterministic { .. } => Ok(f64::INFINITY),
        }
    }

    /// `K_T(v; t)` for real `v < p_T(t)`.
    pub fn eval(&self, t: f64, v: f64) -> Result<f64> {
        check_t(t)?;
        if v.is_nan() {
            return Err(Error::domain("clock_cgf_eval", "v is NaN"));
        }
        let pt = self.explosion_point(t)?;
        if !(v < pt) {
            return Err(Error::Explosion { v, explosion: pt });
        }
        match *self {
            ClockCgf::GammaOu(p) => {
                let c = p.c(t);
                let z = v - p.lambda * p.b;
                let ratio = if z.abs() < p.series_radius() {
                    let [c1, c2, c3, c4] = p.series_coefficients(t);
                    c1 + z * (c2 + z * (c3 + z * c4))
                } else {
                    (-p.b * (-v * c / p.b).ln_1p() - v * t) / z
                };
                Ok(v * p.y0 * c + p.lambda * p.a * ratio)
            }
            ClockCgf::Cir(p) => {
                let (log_d, b) = p.log_d_and_b(v, t)?;
                let l2 = p.lambda * p.lambda;
                Ok(p.kappa * p.kappa * p.eta * t / l2 - 2.0 * p.kappa * p.eta / l2 * log_d
                    + p.y0 * b)
            }
            ClockCgf::Deterministic { rate } => Ok(v * rate * t),
        }
    }

    /// Blow-up class of `M_T` at `p_T(t)`.
    pub fn criterion(&self, t: f64) -> Result<CriterionClass> {
        Ok(match self {
            ClockCgf::GammaOu(p) => {
                let pt = self.explosion_point(t)?;
                CriterionClass::TypeI {
                    n: 0,
                    rho: p.lambda * p.a * p.b / (pt - p.lambda * p.b),
                }
            }
            ClockCgf::Cir(_) => CriterionClass::TypeII { rho: 1.0 },
            ClockCgf::Deterministic { .. } => CriterionClass::NoBlowup,
        })
    }
}

pub fn clock_cgf_eval(clock: &ClockCgf, t: f64, v: f64) -> Result<f64> {
    clock.eval(t, v)
}

pub fn explosion_point(clock: &ClockCgf, t: f64) -> Result<f64> {
    clock.explosion_point(t)
}

pub fn clock_criterion(clock: &ClockCgf, t: f64) -> Result<CriterionClass> {
    clock.criterion(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::{estimate_rv_index, geometric_grid};

    fn gou() -> ClockCgf {
        make_gamma_ou(GammaOuParams {
            lambda: 1.68,
            a: 0.51,
            b: 11.6,
            y0: 1.0,
        })
        .unwrap()
    }

    fn cir() -> ClockCgf {
        make_cir(CirParams {
            kappa: 1.2101,
            eta: 0.5507,
            lambda: 1.7864,
            y0: 1.0,
        })
        .unwrap()
    }

    #[test]
    fn gamma_ou_explosion_reference() {
        // 1.68·11.6/(1 − e^{−1.68})
        let pt = gou().explosion_point(1.0).unwrap();
        assert!((pt - 23.952036225606211614).abs() < 1e-12);
    }

    #[test]
    fn cir_explosion_references() {
        let pt = cir().explosion_point(1.0).unwrap();
        assert!((pt - 2.4489221049870646029).abs() < 1e-12, "{pt}");
        let flat = make_cir(CirParams {
            kappa: 0.0,
            eta: 1.0,
            lambda: 0.8,
            y0: 1.0,
        })
        .unwrap();
        let pt0 = flat.explosion_point(1.5).unwrap();
        assert!((pt0 - 3.4269459726004717427).abs() < 1e-12, "{pt0}");
        let fast = CirParams {
            kappa: 2.0,
            eta: 0.3,
            lambda: 0.5,
            y0: 0.2,
        };
        assert!((fast.explosion(0.4).unwrap() - 168.30868670808488273).abs() < 1e-9);
    }

    #[test]
    fn cir_explosion_residual_small() {
        for (k, l, t) in [(1.2101, 1.7864, 1.0), (0.3, 0.4, 5.0), (8.0, 2.0, 0.1), (0.0, 1.0, 2.0)] {
            let p = CirParams {
                kappa: k,
                eta: 0.5,
                lambda: l,
                y0: 0.1,
            };
            let pt = p.explosion(t).unwrap();
            assert!(p.explosion_residual(pt, t).abs() < 1e-10 * (k + 1.0), "{k} {l} {t}");
        }
    }

    #[test]
    fn deterministic_clock_is_linear() {
        let c = make_deterministic(1.0).unwrap();
        assert_eq!(c.explosion_point(2.0).unwrap(), f64::INFINITY);
        assert_eq!(c.eval(2.0, 3.5).unwrap(), 7.0);
        assert_eq!(c.criterion(1.0).unwrap(), CriterionClass::NoBlowup);
    }

    #[test]
    fn vanishes_at_zero() {
        for c in [gou(), cir(), make_deterministic(0.7).unwrap()] {
            assert!(c.eval(0.8, 0.0).unwrap().abs() < 1e-15, "{}", c.name());
        }
    }

    #[test]
    fn gamma_ou_removable_singularity() {
        let c = gou();
        let ClockCgf::GammaOu(p) = c else { unreachable!() };
        let v0 = p.lambda * p.b;
        let at = c.eval(1.0, v0).unwrap();
        let above = c.eval(1.0, v0 + 1e-7).unwrap();
        let below = c.eval(1.0, v0 - 1e-7).unwrap();
        assert!((at - above).abs() < 1e-5 && (at - below).abs() < 1e-5);
        // the series and the closed form agree across the switch
        let r = p.series_radius();
        let inside = c.eval(1.0, v0 + 0.999 * r).unwrap();
        let outside = c.eval(1.0, v0 + 1.001 * r).unwrap();
        let slope = (c.eval(1.0, v0 + 2.0 * r).unwrap() - c.eval(1.0, v0 + 1.5 * r).unwrap())
            / (0.5 * r);
        assert!((outside - inside - slope * 0.002 * r).abs() < 1e-10 * (1.0 + at.abs()));
    }

    #[test]
    fn cir_regimes_are_continuous() {
        let ClockCgf::Cir(p) = cir() else { unreachable!() };
        let t = 1.0;
        // x = γ²t²/4 crosses ±0.25 and 0 at these v
        let l2 = 2.0 * p.lambda * p.lambda;
        for x in [0.25, -0.25, 0.0] {
            let v = (p.kappa * p.kappa - 4.0 * x / (t * t)) / l2;
            let k = |v: f64| cir().eval(t, v).unwrap();
            let h = 1e-9;
            let jump = (k(v + h) - k(v)) - (k(v) - k(v - h));
            assert!(jump.abs() < 1e-12, "x={x}: {jump}");
        }
    }

    #[test]
    fn explodes_beyond_pt() {
        for c in [gou(), cir()] {
            let pt = c.explosion_point(1.0).unwrap();
            assert!(matches!(c.eval(1.0, pt), Err(Error::Explosion { .. })));
            assert!(c.eval(1.0, pt * (1.0 - 1e-9)).unwrap() > 10.0);
        }
    }

    #[test]
    fn convex_and_increasing() {
        for c in [gou(), cir()] {
            let pt = c.explosion_point(0.9).unwrap();
            let h = pt / 101.0;
            let k: Vec<f64> = (0..=101).map(|i| c.eval(0.9, i as f64 * h * 0.999).unwrap()).collect();
            for w in k.windows(3) {
                assert!(w[1] > w[0]);
                assert!(w[2] - 2.0 * w[1] + w[0] >= -1e-12 * w[1].abs());
            }
        }
    }

    #[test]
    fn gamma_ou_explosion_decreases_in_t() {
        let c = gou();
        let pts: Vec<f64> = [0.1, 0.4, 0.9, 1.3, 2.0, 5.0]
            .iter()
            .map(|&t| c.explosion_point(t).unwrap())
            .collect();
        assert!(pts.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn regular_variation_indices() {
        let t = 1.0;
        let c = gou();
        let pt = c.explosion_point(t).unwrap();
        let CriterionClass::TypeI { rho, .. } = c.criterion(t).unwrap() else { panic!() };
        let samples: Vec<(f64, f64)> = geometric_grid(1e-4 * pt, 16)
            .into_iter()
            .map(|s| (s, c.eval(t, pt - s).unwrap().exp()))
            .collect();
        let est = estimate_rv_index(&samples).unwrap();
        assert!((est.rho / rho - 1.0).abs() < 0.05, "{} vs {rho}", est.rho);

        let c = cir();
        let pt = c.explosion_point(t).unwrap();
        let samples: Vec<(f64, f64)> = geometric_grid(1e-4 * pt, 16)
            .into_iter()
            .map(|s| (s, c.eval(t, pt - s).unwrap()))
            .collect();
        let est = estimate_rv_index(&samples).unwrap();
        assert!((est.rho - 1.0).abs() < 0.05, "{}", est.rho);
    }
}
