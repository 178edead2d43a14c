//! Time-changed Lévy models `X_t = L(T_t)` with an independent clock, whose
//! mgf composes as `exp K_T(K_L(v); t)`, and the Heston model.

mod clock_complex;
mod heston;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::asymptotics::{psi, right_slope};
use crate::clocks::{ClockCgf, GammaOuParams};
use crate::error::{Error, Result};
use crate::levy::VgParams;
use crate::model::{AnalyticStrip, CriterionClass, ModelCgf, Reflected, SharedCgf, Side};
use crate::roots::solve_bracketed;

pub use heston::{heston_cgf, heston_critical_moment, HestonModel, HestonParams};

/// Where the critical moment of a time-changed law comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TcltCase {
    /// `K_L(p) = p_T` at an interior point of the base strip.
    InteriorRoot { p: f64 },
    /// `K_L(p_L) = p_T` at the endpoint itself.
    BoundaryRoot { p: f64 },
    /// `K_L < p_T` on the whole base strip; the base endpoint wins.
    LevyDominates { p: f64 },
}

impl TcltCase {
    pub fn p(&self) -> f64 {
        match *self {
            TcltCase::InteriorRoot { p } | TcltCase::BoundaryRoot { p } | TcltCase::LevyDominates { p } => p,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            TcltCase::InteriorRoot { .. } => "interior_root",
            TcltCase::BoundaryRoot { .. } => "boundary_root",
            TcltCase::LevyDominates { .. } => "levy_dominates",
        }
    }

    pub fn clock_driven(&self) -> bool {
        !matches!(self, TcltCase::LevyDominates { .. })
    }
}

impl fmt::Display for TcltCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(p={})", self.label(), self.p())
    }
}

/// Relative tolerance on `|K_L(p_L) − p_T|` for the boundary case.
const BOUNDARY_TOL: f64 = 1e-8;
/// Closest approach to a blow-up endpoint of the base strip.
const ENDPOINT_CAP: f64 = 1e-12;
/// Upper search cap when the base strip is unbounded.
const UNBOUNDED_CAP: f64 = 1e12;

/// Case analysis for `K_L(p) = p_T` on `[0, p_L)` with `p_L` the base's right
/// endpoint.
fn critical_moment_right<M: ModelCgf + ?Sized>(base: &M, pt: f64) -> Result<TcltCase> {
    let pl = base.strip().upper;
    if !(pl > 0.0 && pt > 0.0) {
        return Err(Error::domain(
            "critical_moment",
            format!("need p_L > 0 and p_T > 0, got p_L = {pl}, p_T = {pt}"),
        ));
    }
    if pt.is_infinite() {
        return Ok(TcltCase::LevyDominates { p: pl });
    }
    let f = |x: f64| base.cgf_real(x).map(|k| k - pt).unwrap_or(f64::NAN);
    let hi = if pl.is_finite() {
        let kb = base.boundary_cgf(Side::Right);
        if kb.is_finite() {
            if (kb - pt).abs() < BOUNDARY_TOL * pt {
                return Ok(TcltCase::BoundaryRoot { p: pl });
            }
            if kb < pt {
                return Ok(TcltCase::LevyDominates { p: pl });
            }
        }
        // walk towards the endpoint until K_L exceeds p_T
        let mut gap = 0.5 * pl;
        loop {
            let x = pl - gap;
            if f(x) > 0.0 {
                break x;
            }
            if gap <= ENDPOINT_CAP * pl.max(1.0) {
                if kb.is_finite() {
                    // K_L(p_L) > p_T + tol but the crossing is closer than the
                    // cap: the root is the endpoint to working precision
                    return Ok(TcltCase::BoundaryRoot { p: pl });
                }
                // K_L → ∞ too slowly: the crossing is not resolvable in
                // double precision and coincides with the endpoint
                log::warn!(
                    "{}: K_L stays below p_T = {pt} up to {ENDPOINT_CAP:e} of p_L = {pl}; root taken at the endpoint",
                    base.name()
                );
                return Ok(TcltCase::InteriorRoot { p: pl });
            }
            gap *= 0.5;
        }
    } else {
        let mut x = 1.0;
        loop {
            if f(x) > 0.0 {
                break x;
            }
            if x >= UNBOUNDED_CAP {
                return Err(Error::RootBracketing {
                    what: format!("K_L(p) = p_T = {pt}: no crossing below the search cap"),
                    lo: 0.0,
                    hi: x,
                });
            }
            x *= 2.0;
        }
    };
    // K_L is convex with K_L(0) = 0 < p_T, so the crossing on [0, hi] is unique
    let p = solve_bracketed("critical moment K_L(p) = p_T", f, 0.0, hi, 0.0)?;
    Ok(TcltCase::InteriorRoot { p })
}

/// Right critical moment of `L(T_t)`.
pub fn right_critical_moment<M: ModelCgf + ?Sized>(base: &M, clock: &ClockCgf, t: f64) -> Result<TcltCase> {
    critical_moment_right(base, clock.explosion_point(t)?)
}

/// Left critical moment: the same analysis on `K_L(−q)`.
pub fn left_critical_moment<M: ModelCgf + ?Sized>(base: &M, clock: &ClockCgf, t: f64) -> Result<TcltCase> {
    critical_moment_right(&Reflected(base), clock.explosion_point(t)?)
}

/// Closed-form critical moments `(p, q)` of VG ∘ Gamma-OU.
pub fn vg_gamma_ou_critical_moments(vg: VgParams, clock: GammaOuParams, t: f64) -> (f64, f64) {
    let pt = clock.explosion(t);
    let level = 1.0 - (-pt / vg.c).exp();
    let root = |m: f64, g: f64| {
        let d = m - g;
        0.5 * (d + (d * d + 4.0 * g * m * level).sqrt())
    };
    (root(vg.m, vg.g), root(vg.g, vg.m))
}

/// `L(T_t)` for a Lévy base and an independent clock.
#[derive(Clone)]
pub struct ComposedModel {
    base: SharedCgf,
    clock: ClockCgf,
    t: f64,
    pt: f64,
    right: TcltCase,
    left: TcltCase,
}

impl fmt::Debug for ComposedModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComposedModel")
            .field("base", &self.base.name())
            .field("clock", &self.clock)
            .field("t", &self.t)
            .field("right", &self.right)
            .field("left", &self.left)
            .finish()
    }
}

pub fn compose(base: SharedCgf, clock: ClockCgf, t: f64) -> Result<ComposedModel> {
    ComposedModel::new(base, clock, t)
}

impl ComposedModel {
    pub fn new(base: SharedCgf, clock: ClockCgf, t: f64) -> Result<Self> {
        let pt = clock.explosion_point(t)?;
        let right = critical_moment_right(&base, pt)?;
        let left = critical_moment_right(&Reflected(&base), pt)?;
        Ok(Self {
            base,
            clock,
            t,
            pt,
            right,
            left,
        })
    }

    pub fn base(&self) -> &SharedCgf {
        &self.base
    }

    pub fn clock(&self) -> &ClockCgf {
        &self.clock
    }

    pub fn horizon(&self) -> f64 {
        self.t
    }

    pub fn explosion_point(&self) -> f64 {
        self.pt
    }

    pub fn case(&self, side: Side) -> TcltCase {
        match side {
            Side::Right => self.right,
            Side::Left => self.left,
        }
    }

    pub fn into_shared(self) -> SharedCgf {
        Arc::new(self)
    }
}

impl ModelCgf for ComposedModel {
    fn name(&self) -> String {
        format!("{} o {} at t={}", self.base.name(), self.clock.name(), self.t)
    }

    fn strip(&self) -> AnalyticStrip {
        AnalyticStrip {
            lower: -self.left.p(),
            upper: self.right.p(),
        }
    }

    fn cgf(&self, u: Complex64) -> Result<Complex64> {
        self.strip().check(u.re)?;
        let v = self.base.cgf(u)?;
        clock_complex::clock_cgf_complex(&self.clock, self.t, self.pt, v)
    }

    fn criterion(&self, side: Side) -> CriterionClass {
        match self.case(side) {
            TcltCase::LevyDominates { .. } => self.base.criterion(side),
            _ => self.clock.criterion(self.t).unwrap_or(CriterionClass::Unclassified),
        }
    }

    fn boundary_cgf(&self, side: Side) -> f64 {
        match self.case(side) {
            TcltCase::LevyDominates { .. } => {
                let kl = self.base.boundary_cgf(side);
                if kl.is_finite() {
                    self.clock.eval(self.t, kl).unwrap_or(f64::INFINITY)
                } else {
                    f64::INFINITY
                }
            }
            _ => f64::INFINITY,
        }
    }

    fn cgf_real(&self, v: f64) -> Result<f64> {
        self.strip().check(v)?;
        self.clock.eval(self.t, self.base.cgf_real(v)?)
    }

    fn tclt_case(&self, side: Side) -> Option<TcltCase> {
        Some(self.case(side))
    }
}

/// One wing of a [`WingReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct WingSide {
    /// Critical exponent `r*` (right) or `q*` (left).
    pub critical: f64,
    pub criterion: CriterionClass,
    pub case: Option<TcltCase>,
    /// `ψ(r* − 1)` on the right, `ψ(q*)` on the left; `None` when the right
    /// wing is not applicable (`r* <= 1`).
    pub slope: Option<f64>,
    /// The blow-up satisfies a criterion, so the slope is a genuine limit
    /// rather than a lim sup.
    pub applicable: bool,
    pub note: Option<String>,
}

/// Predicted wing slopes of `V(k)²/|k|` on both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct WingReport {
    pub model: String,
    pub right: WingSide,
    pub left: WingSide,
}

impl WingReport {
    pub fn r_star(&self) -> f64 {
        self.right.critical
    }

    pub fn q_star(&self) -> f64 {
        self.left.critical
    }
}

pub fn wing_report<M: ModelCgf + ?Sized>(model: &M) -> WingReport {
    let strip = model.strip();
    let r = strip.r_star();
    let q = strip.q_star();
    let right_criterion = model.criterion(Side::Right);
    let (slope, note) = if r > 1.0 {
        (right_slope(r).ok().map(|s| s.value()), None)
    } else {
        (None, Some(format!("right wing not applicable: r* = {r} <= 1")))
    };
    let right = WingSide {
        critical: r,
        criterion: right_criterion,
        case: model.tclt_case(Side::Right),
        slope,
        applicable: slope.is_some() && right_criterion.satisfies_a_criterion(),
        note,
    };
    let left_criterion = model.criterion(Side::Left);
    let left_slope = if q.is_finite() {
        psi(q).ok().map(|s| s.value())
    } else {
        Some(0.0)
    };
    let left = WingSide {
        critical: q,
        criterion: left_criterion,
        case: model.tclt_case(Side::Left),
        slope: left_slope,
        applicable: left_slope.is_some() && left_criterion.satisfies_a_criterion(),
        note: None,
    };
    WingReport {
        model: model.name(),
        right,
        left,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clocks::{make_cir, make_deterministic, make_gamma_ou, CirParams};
    use crate::levy::{make_bm_drift, make_de, make_nig, make_vg, DeParams, LevyModel, NigParams};

    fn shared(m: LevyModel) -> SharedCgf {
        Arc::new(m)
    }

    const VG: VgParams = VgParams {
        m: 16.026,
        g: 9.6443,
        c: 6.161,
    };
    const GOU: GammaOuParams = GammaOuParams {
        lambda: 1.679,
        a: 0.3484,
        b: 0.7664,
        y0: 1.0,
    };

    #[test]
    fn deterministic_clock_scales_base() {
        let base = shared(make_vg(VG).unwrap());
        let m = compose(base.clone(), make_deterministic(1.0).unwrap(), 0.7).unwrap();
        for u in [Complex64::new(0.3, 2.0), Complex64::new(-2.0, 0.0), Complex64::new(5.0, -40.0)] {
            let a = m.cgf(u).unwrap();
            let b = 0.7 * base.cgf(u).unwrap();
            assert!((a - b).norm() < 1e-13 * (1.0 + b.norm()));
        }
        assert_eq!(m.strip(), base.strip());
    }

    #[test]
    fn vg_gamma_ou_matches_closed_form() {
        let base = shared(make_vg(VG).unwrap());
        let clock = make_gamma_ou(GOU).unwrap();
        for t in [0.4, 0.9, 1.3] {
            let m = compose(base.clone(), clock, t).unwrap();
            let (p, q) = vg_gamma_ou_critical_moments(VG, GOU, t);
            assert!(matches!(m.case(Side::Right), TcltCase::InteriorRoot { .. }));
            assert!((m.case(Side::Right).p() - p).abs() < 1e-10 * p);
            assert!((m.case(Side::Left).p() - q).abs() < 1e-10 * q);
        }
    }

    #[test]
    fn bm_cir_quadratic_roots() {
        let c = CirParams {
            kappa: 1.2101,
            eta: 0.5507,
            lambda: 1.7864,
            y0: 1.0,
        };
        let clock = make_cir(c).unwrap();
        let m = compose(shared(make_bm_drift()), clock, 1.0).unwrap();
        let pt = c.explosion(1.0).unwrap();
        let p = 0.5 * (1.0 + (1.0 + 8.0 * pt).sqrt());
        let q = 0.5 * (-1.0 + (1.0 + 8.0 * pt).sqrt());
        assert!((m.case(Side::Right).p() - p).abs() < 1e-12 * p);
        assert!((m.case(Side::Left).p() - q).abs() < 1e-12 * q);
        assert!((p - 2.768886116572211124).abs() < 1e-12);
    }

    #[test]
    fn nig_cir_levy_dominates_with_small_delta() {
        let nig = NigParams {
            alpha: 16.1975,
            beta: -3.1804,
            mu: 0.0,
            delta: 0.1,
        };
        let clock = make_cir(CirParams {
            kappa: 1.2101,
            eta: 0.5507,
            lambda: 1.7864,
            y0: 1.0,
        })
        .unwrap();
        let m = compose(shared(make_nig(nig).unwrap()), clock, 1.0).unwrap();
        assert_eq!(m.case(Side::Right), TcltCase::LevyDominates { p: nig.alpha - nig.beta });
        assert_eq!(m.criterion(Side::Right), CriterionClass::TypeI { n: 1, rho: 0.5 });
        // with a large delta the clock explodes first
        let big = NigParams { delta: 1.0867, ..nig };
        let m = compose(shared(make_nig(big).unwrap()), clock, 1.0).unwrap();
        assert!(matches!(m.case(Side::Right), TcltCase::InteriorRoot { .. }));
        assert_eq!(m.criterion(Side::Right), CriterionClass::TypeII { rho: 1.0 });
    }

    #[test]
    fn symmetric_base_gives_symmetric_moments() {
        let nig = NigParams {
            alpha: 10.0,
            beta: 0.0,
            mu: 0.0,
            delta: 2.0,
        };
        let clock = make_gamma_ou(GOU).unwrap();
        let m = compose(shared(make_nig(nig).unwrap()), clock, 1.0).unwrap();
        assert!((m.case(Side::Right).p() - m.case(Side::Left).p()).abs() < 1e-13);
    }

    #[test]
    fn de_wing_report() {
        let de = make_de(DeParams {
            sigma: 0.2,
            mu: 0.0,
            lambda: 1.0,
            p: 0.4,
            eta1: 10.0,
            eta2: 5.0,
        })
        .unwrap();
        let r = wing_report(&de);
        assert_eq!(r.right.slope, Some(psi(9.0).unwrap().value()));
        assert_eq!(r.left.slope, Some(psi(5.0).unwrap().value()));
        assert!(r.right.applicable && r.left.applicable);
    }

    #[test]
    fn right_wing_not_applicable_below_one() {
        let vg = make_vg(VgParams { m: 0.8, g: 3.0, c: 1.0 }).unwrap();
        let r = wing_report(&vg);
        assert!(r.right.slope.is_none() && !r.right.applicable);
        assert!(r.right.note.as_deref().unwrap().contains("not applicable"));
    }

    #[test]
    fn composed_real_and_complex_agree() {
        let m = compose(shared(make_vg(VG).unwrap()), make_gamma_ou(GOU).unwrap(), 0.9).unwrap();
        let s = m.strip();
        for x in [0.5 * s.lower, 0.0, 1.0, 0.99 * s.upper] {
            let a = m.cgf(Complex64::new(x, 0.0)).unwrap().re;
            let b = m.cgf_real(x).unwrap();
            assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()));
        }
    }
}
