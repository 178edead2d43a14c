//! The central abstraction: a cumulant generating function `K = log M` of a
//! log-return law, analytic on a vertical strip `lower < Re(u) < upper`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::time_change::TcltCase;

/// Which tail / which end of the strip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Right,
    Left,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Right => Side::Left,
            Side::Left => Side::Right,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Right => "right",
            Side::Left => "left",
        })
    }
}

/// Open interval `(lower, upper) = (−q*, r*)` on which the mgf is finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticStrip {
    pub lower: f64,
    pub upper: f64,
}

impl AnalyticStrip {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower < 0.0 && upper > 0.0) {
            return Err(Error::domain(
                "AnalyticStrip",
                format!("need lower < 0 < upper, got ({lower}, {upper})"),
            ));
        }
        Ok(Self { lower, upper })
    }

    /// Right critical exponent r*.
    pub fn r_star(&self) -> f64 {
        self.upper
    }

    /// Left critical exponent q*.
    pub fn q_star(&self) -> f64 {
        -self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lower && x < self.upper
    }

    pub fn check(&self, re: f64) -> Result<()> {
        if self.contains(re) {
            Ok(())
        } else {
            Err(Error::StripViolation {
                re,
                lower: self.lower,
                upper: self.upper,
            })
        }
    }

    /// Distance from `x` to the nearer endpoint.
    pub fn distance(&self, x: f64) -> f64 {
        (x - self.lower).min(self.upper - x)
    }

    pub fn endpoint(&self, side: Side) -> f64 {
        match side {
            Side::Right => self.upper,
            Side::Left => self.lower,
        }
    }
}

/// How the mgf blows up at a critical exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriterionClass {
    /// `M^(n)(r* − s) ∼ s^{−ρ} ℓ(1/s)`.
    TypeI { n: u32, rho: f64 },
    /// `log M(r* − s) ∼ s^{−ρ} ℓ(1/s)`.
    TypeII { rho: f64 },
    /// The strip is unbounded on this side.
    NoBlowup,
    Unclassified,
}

impl CriterionClass {
    pub fn label(&self) -> String {
        match self {
            CriterionClass::TypeI { n, rho } => format!("I(n={n},rho={rho})"),
            CriterionClass::TypeII { rho } => format!("II(rho={rho})"),
            CriterionClass::NoBlowup => "none".to_string(),
            CriterionClass::Unclassified => "unclassified".to_string(),
        }
    }

    pub fn satisfies_a_criterion(&self) -> bool {
        matches!(self, CriterionClass::TypeI { .. } | CriterionClass::TypeII { .. })
    }
}

impl fmt::Display for CriterionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Cumulant generating function of a log-return law with its strip and
/// blow-up classification.
pub trait ModelCgf: Send + Sync {
    fn name(&self) -> String;

    fn strip(&self) -> AnalyticStrip;

    /// `K(u)` for `Re(u)` strictly inside the strip.
    fn cgf(&self, u: Complex64) -> Result<Complex64>;

    fn criterion(&self, side: Side) -> CriterionClass;

    /// `lim K(v)` as `v` approaches the given endpoint along the real axis.
    /// `+∞` when the mgf blows up there.
    fn boundary_cgf(&self, _side: Side) -> f64 {
        f64::INFINITY
    }

    fn cgf_real(&self, v: f64) -> Result<f64> {
        self.cgf(Complex64::new(v, 0.0)).map(|z| z.re)
    }

    /// `d^n K / dv^n` at a real `v` inside the strip, `1 <= n <= 4`.
    fn cgf_deriv(&self, order: u32, v: f64) -> Result<f64> {
        numeric_deriv(self, order, v)
    }

    /// Case analysis behind the critical moment, for time-changed models.
    fn tclt_case(&self, _side: Side) -> Option<TcltCase> {
        None
    }
}

impl<T: ModelCgf + ?Sized> ModelCgf for Arc<T> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn strip(&self) -> AnalyticStrip {
        (**self).strip()
    }
    fn cgf(&self, u: Complex64) -> Result<Complex64> {
        (**self).cgf(u)
    }
    fn criterion(&self, side: Side) -> CriterionClass {
        (**self).criterion(side)
    }
    fn boundary_cgf(&self, side: Side) -> f64 {
        (**self).boundary_cgf(side)
    }
    fn cgf_real(&self, v: f64) -> Result<f64> {
        (**self).cgf_real(v)
    }
    fn cgf_deriv(&self, order: u32, v: f64) -> Result<f64> {
        (**self).cgf_deriv(order, v)
    }
    fn tclt_case(&self, side: Side) -> Option<TcltCase> {
        (**self).tclt_case(side)
    }
}

impl<T: ModelCgf + ?Sized> ModelCgf for &T {
    fn name(&self) -> String {
        (**self).name()
    }
    fn strip(&self) -> AnalyticStrip {
        (**self).strip()
    }
    fn cgf(&self, u: Complex64) -> Result<Complex64> {
        (**self).cgf(u)
    }
    fn criterion(&self, side: Side) -> CriterionClass {
        (**self).criterion(side)
    }
    fn boundary_cgf(&self, side: Side) -> f64 {
        (**self).boundary_cgf(side)
    }
    fn cgf_real(&self, v: f64) -> Result<f64> {
        (**self).cgf_real(v)
    }
    fn cgf_deriv(&self, order: u32, v: f64) -> Result<f64> {
        (**self).cgf_deriv(order, v)
    }
    fn tclt_case(&self, side: Side) -> Option<TcltCase> {
        (**self).tclt_case(side)
    }
}

pub(crate) fn check_order(order: u32) -> Result<()> {
    if (1..=4).contains(&order) {
        Ok(())
    } else {
        Err(Error::domain("cgf_deriv", format!("order must be in [1, 4], got {order}")))
    }
}

/// Derivative of an analytic cgf without a coded closed form.
///
/// Order 1 uses the complex step `Im K(v + ih)/h`. Higher orders use the
/// Cauchy integral on a circle of half the distance to the strip boundary,
/// discretised with the trapezoid rule (geometrically convergent for analytic
/// integrands).
pub fn numeric_deriv<M: ModelCgf + ?Sized>(model: &M, order: u32, v: f64) -> Result<f64> {
    check_order(order)?;
    let strip = model.strip();
    strip.check(v)?;
    let dist = strip.distance(v).min(1.0 + v.abs());
    if order == 1 {
        let h = 1e-6 * dist;
        let k = model.cgf(Complex64::new(v, h))?;
        return Ok(k.im / h);
    }
    const N: usize = 64;
    let r = 0.5 * dist;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..N {
        let theta = 2.0 * PI * (j as f64 + 0.5) / N as f64;
        let w = Complex64::from_polar(1.0, theta);
        let k = model.cgf(Complex64::new(v, 0.0) + r * w)?;
        acc += k * w.powi(-(order as i32));
    }
    let factorial = (1..=order).product::<u32>() as f64;
    Ok((acc / N as f64).re * factorial / r.powi(order as i32))
}

/// A law shifted by the deterministic drift `ω = −K(1)` so that `E[e^X] = 1`.
/// The strip and blow-up behaviour are unchanged.
#[derive(Clone)]
pub struct Normalized<M> {
    inner: M,
    drift: f64,
}

impl<M: ModelCgf> Normalized<M> {
    pub fn new(inner: M) -> Result<Self> {
        let strip = inner.strip();
        if !(strip.upper > 1.0) {
            return Err(Error::NotApplicable(format!(
                "{}: E[e^X] is infinite (r* = {} <= 1), cannot normalize",
                inner.name(),
                strip.upper
            )));
        }
        let drift = -inner.cgf_real(1.0)?;
        Ok(Self { inner, drift })
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn inner(&self) -> &M {
        &self.inner
    }
}

impl<M: ModelCgf> ModelCgf for Normalized<M> {
    fn name(&self) -> String {
        format!("{} (martingale-normalized)", self.inner.name())
    }
    fn strip(&self) -> AnalyticStrip {
        self.inner.strip()
    }
    fn cgf(&self, u: Complex64) -> Result<Complex64> {
        Ok(self.inner.cgf(u)? + u * self.drift)
    }
    fn criterion(&self, side: Side) -> CriterionClass {
        self.inner.criterion(side)
    }
    fn boundary_cgf(&self, side: Side) -> f64 {
        let k = self.inner.boundary_cgf(side);
        if k.is_infinite() {
            return k;
        }
        k + self.drift * self.inner.strip().endpoint(side)
    }
    fn cgf_real(&self, v: f64) -> Result<f64> {
        Ok(self.inner.cgf_real(v)? + self.drift * v)
    }
    fn cgf_deriv(&self, order: u32, v: f64) -> Result<f64> {
        let d = self.inner.cgf_deriv(order, v)?;
        Ok(if order == 1 { d + self.drift } else { d })
    }
    fn tclt_case(&self, side: Side) -> Option<TcltCase> {
        self.inner.tclt_case(side)
    }
}

/// The law of `−X`: `K_refl(u) = K(−u)`. Turns left-tail questions into
/// right-tail ones.
#[derive(Clone)]
pub struct Reflected<M>(pub M);

impl<M: ModelCgf> ModelCgf for Reflected<M> {
    fn name(&self) -> String {
        format!("reflected {}", self.0.name())
    }
    fn strip(&self) -> AnalyticStrip {
        let s = self.0.strip();
        AnalyticStrip {
            lower: -s.upper,
            upper: -s.lower,
        }
    }
    fn cgf(&self, u: Complex64) -> Result<Complex64> {
        self.0.cgf(-u)
    }
    fn criterion(&self, side: Side) -> CriterionClass {
        self.0.criterion(side.opposite())
    }
    fn boundary_cgf(&self, side: Side) -> f64 {
        self.0.boundary_cgf(side.opposite())
    }
    fn cgf_real(&self, v: f64) -> Result<f64> {
        self.0.cgf_real(-v)
    }
    fn cgf_deriv(&self, order: u32, v: f64) -> Result<f64> {
        let d = self.0.cgf_deriv(order, -v)?;
        Ok(if order % 2 == 1 { -d } else { d })
    }
    fn tclt_case(&self, side: Side) -> Option<TcltCase> {
        self.0.tclt_case(side.opposite())
    }
}

/// Object-safe shared handle used by pricing and the CLI.
pub type SharedCgf = Arc<dyn ModelCgf>;
