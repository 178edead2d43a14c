//! Heston stochastic volatility: `dv = κ(η − v) dt + θ √v dW²`,
//! `d log S = −v/2 dt + √v dW¹`, `d⟨W¹, W²⟩ = ρ dt`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::clock_complex::cosh_sinhc_series;
use crate::error::{Error, Result};
use crate::model::{AnalyticStrip, CriterionClass, ModelCgf, Side};
use crate::roots::bisect;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HestonParams {
    pub kappa: f64,
    pub eta: f64,
    pub theta: f64,
    pub rho: f64,
    pub v0: f64,
}

impl HestonParams {
    pub fn validate(&self) -> Result<()> {
        for (name, x) in [
            ("kappa", self.kappa),
            ("eta", self.eta),
            ("theta", self.theta),
            ("v0", self.v0),
        ] {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::param("Heston", format!("{name} must be > 0, got {x}")));
            }
        }
        if !(-1.0..=1.0).contains(&self.rho) {
            return Err(Error::param("Heston", format!("rho must lie in [-1, 1], got {}", self.rho)));
        }
        Ok(())
    }

    /// `D(v) = e^z f` at real `v`, returned as `(z, f)` so that the sign of
    /// `D` is available without overflow.
    fn real_d(&self, v: f64, t: f64) -> (f64, f64) {
        let b = self.kappa - self.rho * self.theta * v;
        let d2 = b * b - self.theta * self.theta * (v * v - v);
        let x = 0.25 * d2 * t * t;
        if x.abs() < 0.25 {
            let (c, s) = cosh_sinhc_series(Complex64::new(x, 0.0));
            (0.0, c.re + 0.5 * b * t * s.re)
        } else if x > 0.0 {
            let d = d2.sqrt();
            let e = (-d * t).exp();
            (0.5 * d * t, ((d + b) + (d - b) * e) / (2.0 * d))
        } else {
            let th = (-x).sqrt();
            (0.0, th.cos() + 0.5 * b * t * th.sin() / th)
        }
    }

    /// Positive root of `θ²(v² − v) − (κ − ρθv)² = (2π/t)²` on the chosen
    /// side, where `D = cos π = −1`. Beyond it `D` must already have changed
    /// sign.
    fn half_turn(&self, t: f64, side: Side) -> Option<f64> {
        let th = self.theta;
        let a = th * th * (1.0 - self.rho * self.rho);
        let b = 2.0 * self.kappa * self.rho * th - th * th;
        let c = -(self.kappa * self.kappa + 4.0 * PI * PI / (t * t));
        let sign = match side {
            Side::Right => 1.0,
            Side::Left => -1.0,
        };
        let root = if a > 1e-14 * th * th {
            let disc = (b * b - 4.0 * a * c).sqrt();
            (-b + sign * disc) / (2.0 * a)
        } else {
            -c / b
        };
        (root.is_finite() && sign * root > 0.0).then_some(root)
    }

    /// Moment explosion of `S_t` on the given side: the first `v` beyond
    /// `[0, 1]` at which `D(v) = 0`, i.e. `b + s cot(st/2) = 0` with
    /// `s² = θ²(v² − v) − b²`. `+∞` if the moment never explodes.
    pub fn critical_moment(&self, t: f64, side: Side) -> Result<f64> {
        self.validate()?;
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::domain("heston_critical_moment", format!("t must be > 0, got {t}")));
        }
        let (start, sign) = match side {
            Side::Right => (1.0, 1.0),
            Side::Left => (0.0, -1.0),
        };
        let f = |v: f64| self.real_d(v, t).1;
        let scan = |end: f64, n: usize| -> Option<(f64, f64)> {
            let mut prev = start;
            for i in 1..=n {
                let v = start + (end - start) * i as f64 / n as f64;
                if f(v) <= 0.0 {
                    return Some((prev, v));
                }
                prev = v;
            }
            None
        };
        let bracket = match self.half_turn(t, side) {
            Some(end) => scan(end, 4000),
            None => {
                let mut found = None;
                let mut end = start + sign;
                for _ in 0..40 {
                    if let Some(br) = scan(end, 400) {
                        found = Some(br);
                        break;
                    }
                    end = start + 2.0 * (end - start);
                }
                found
            }
        };
        let Some((a, b)) = bracket else {
            return Ok(f64::INFINITY);
        };
        bisect("Heston critical moment", f, a, b).map(|v| v.abs())
    }

    /// `(log D, w · sinh(dt/2)/(d D))` at complex `u` inside the strip, with
    /// `log D` continued along the vertical segment from `Re u`.
    fn log_d_and_b(&self, u: Complex64, t: f64) -> (Complex64, Complex64) {
        if u.im < 0.0 {
            let (l, b) = self.log_d_and_b(u.conj(), t);
            return (l.conj(), b.conj());
        }
        let x = u.re;
        let (z0, f0) = self.real_d(x, t);
        let log_d0 = z0 + f0.ln();
        if u.im == 0.0 {
            let w = x * x - x;
            let (_, bterm) = self.terms(Complex64::new(x, 0.0), t, None);
            return (Complex64::new(log_d0, 0.0), w * bterm);
        }
        // d²(s) = A + s²θ²(1−ρ²) + i s K along u = x + is: Im d² never
        // vanishes for s > 0, so the principal root is continuous there.
        let th = self.theta;
        let beta0 = self.kappa - self.rho * th * x;
        let d2_0 = beta0 * beta0 - th * th * (x * x - x);
        let kim = -2.0 * beta0 * self.rho * th - th * th * (2.0 * x - 1.0);
        let d_at_0 = if d2_0 >= 0.0 {
            Complex64::new(d2_0.sqrt(), 0.0)
        } else if kim < 0.0 {
            Complex64::new(0.0, -(-d2_0).sqrt())
        } else {
            Complex64::new(0.0, (-d2_0).sqrt())
        };
        // log S tracked, where D = e^{dt/2} S
        let mut log_s = Complex64::new(log_d0, 0.0) - 0.5 * d_at_0 * t;
        let y = u.im;
        let osc = 0.5 / (th * t).max(1e-12);
        let mut s = 0.0;
        let mut h = osc.min(y);
        while s < y {
            let s_next = (s + h).min(y);
            let un = Complex64::new(x, s_next);
            let (sn, _) = self.terms(un, t, None);
            let cand = sn.ln();
            let mut delta = cand.im - log_s.im;
            delta -= 2.0 * PI * (delta / (2.0 * PI)).round();
            if delta.abs() > 0.25 * PI && h > 1e-9 * (1.0 + y) {
                h *= 0.5;
                continue;
            }
            log_s = Complex64::new(cand.re, log_s.im + delta);
            s = s_next;
            // the oscillating part decays once Re(d) t is large
            let d = self.d_principal(un);
            let damp = (-d.re * t).exp();
            let cap = if damp < 0.1 { 0.25 * (1.0 + un.norm()) } else { osc };
            if delta.abs() < PI / 32.0 {
                h = (2.0 * h).min(cap);
            } else {
                h = h.min(cap);
            }
        }
        let (_, bterm) = self.terms(u, t, None);
        let d = self.d_principal(u);
        (0.5 * d * t + log_s, (u * u - u) * bterm)
    }

    fn d_principal(&self, u: Complex64) -> Complex64 {
        let b = self.kappa - self.rho * self.theta * u;
        (b * b - self.theta * self.theta * (u * u - u)).sqrt()
    }

    /// `S = D e^{−dt/2}` and `sinh(dt/2)/(d D)` for the given root `d`
    /// (principal when `None`).
    fn terms(&self, u: Complex64, t: f64, d: Option<Complex64>) -> (Complex64, Complex64) {
        let b = self.kappa - self.rho * self.theta * u;
        let d2 = b * b - self.theta * self.theta * (u * u - u);
        let d = d.unwrap_or_else(|| d2.sqrt());
        if (d * t).norm() < 0.5 {
            let (c, sx) = cosh_sinhc_series(0.25 * d2 * t * t);
            let dd = c + 0.5 * b * t * sx;
            ((dd * (-0.5 * d * t).exp()), 0.5 * t * sx / dd)
        } else {
            let e = (-d * t).exp();
            let den = (d + b) + (d - b) * e;
            (den / (2.0 * d), (1.0 - e) / den)
        }
    }
}

/// Heston log-price law at a fixed horizon, with its moment strip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HestonModel {
    pub params: HestonParams,
    pub t: f64,
    strip: AnalyticStrip,
}

impl HestonModel {
    pub fn new(params: HestonParams, t: f64) -> Result<Self> {
        let upper = params.critical_moment(t, Side::Right)?;
        let lower = -params.critical_moment(t, Side::Left)?;
        Ok(Self {
            params,
            t,
            strip: AnalyticStrip { lower, upper },
        })
    }
}

impl ModelCgf for HestonModel {
    fn name(&self) -> String {
        let p = &self.params;
        format!(
            "Heston(kappa={}, eta={}, theta={}, rho={}, v0={}) at t={}",
            p.kappa, p.eta, p.theta, p.rho, p.v0, self.t
        )
    }

    fn strip(&self) -> AnalyticStrip {
        self.strip
    }

    fn cgf(&self, u: Complex64) -> Result<Complex64> {
        self.strip.check(u.re)?;
        let p = &self.params;
        let (log_d, b) = p.log_d_and_b(u, self.t);
        let th2 = p.theta * p.theta;
        let bu = p.kappa - p.rho * p.theta * u;
        Ok(p.kappa * p.eta / th2 * bu * self.t - 2.0 * p.kappa * p.eta / th2 * log_d + p.v0 * b)
    }

    fn criterion(&self, side: Side) -> CriterionClass {
        if self.strip.endpoint(side).is_finite() {
            CriterionClass::TypeII { rho: 1.0 }
        } else {
            CriterionClass::NoBlowup
        }
    }
}

pub fn heston_cgf(params: HestonParams, t: f64, u: Complex64) -> Result<Complex64> {
    HestonModel::new(params, t)?.cgf(u)
}

pub fn heston_critical_moment(params: HestonParams, t: f64) -> Result<f64> {
    params.critical_moment(t, Side::Right)
}
