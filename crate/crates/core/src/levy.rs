//! Closed-form Lévy cgfs at unit time: Variance Gamma, Normal Inverse
//! Gaussian, double-exponential jump diffusion and Brownian motion with
//! drift −1/2.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{check_order, AnalyticStrip, CriterionClass, ModelCgf, Side};

/// `VG(m, g, C)`: `M(s) = (gm / ((m − s)(s + g)))^C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VgParams {
    pub m: f64,
    pub g: f64,
    pub c: f64,
}

/// `NIG(α, β, μ, δ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NigParams {
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub delta: f64,
}

/// Double-exponential jump diffusion `DE(σ, μ, λ, p, q = 1 − p, η₁, η₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeParams {
    pub sigma: f64,
    pub mu: f64,
    pub lambda: f64,
    pub p: f64,
    pub eta1: f64,
    pub eta2: f64,
}

impl DeParams {
    pub fn q(&self) -> f64 {
        1.0 - self.p
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevyModel {
    Vg(VgParams),
    Nig(NigParams),
    De(DeParams),
    /// Brownian motion with drift −1/2: `K(v) = (v² − v)/2`.
    BmDrift,
}

fn positive(model: &'static str, name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::param(model, format!("{name} must be finite and > 0, got {x}")))
    }
}

pub fn make_vg(p: VgParams) -> Result<LevyModel> {
    positive("VG", "m", p.m)?;
    positive("VG", "g", p.g)?;
    positive("VG", "C", p.c)?;
    Ok(LevyModel::Vg(p))
}

pub fn make_nig(p: NigParams) -> Result<LevyModel> {
    positive("NIG", "alpha", p.alpha)?;
    positive("NIG", "delta", p.delta)?;
    if !(p.beta.is_finite() && p.beta.abs() < p.alpha) {
        return Err(Error::param(
            "NIG",
            format!("|beta| < alpha required, got beta = {}, alpha = {}", p.beta, p.alpha),
        ));
    }
    if !p.mu.is_finite() {
        return Err(Error::param("NIG", "mu must be finite"));
    }
    Ok(LevyModel::Nig(p))
}

pub fn make_de(p: DeParams) -> Result<LevyModel> {
    if !(p.sigma.is_finite() && p.sigma >= 0.0) {
        return Err(Error::param("DE", format!("sigma must be >= 0, got {}", p.sigma)));
    }
    if !p.mu.is_finite() {
        return Err(Error::param("DE", "mu must be finite"));
    }
    positive("DE", "lambda", p.lambda)?;
    if !(0.0..=1.0).contains(&p.p) {
        return Err(Error::param("DE", format!("p must lie in [0, 1], got {}", p.p)));
    }
    if !(p.eta1.is_finite() && p.eta1 > 1.0) {
        return Err(Error::param(
            "DE",
            format!("eta1 > 1 required so that E[e^X] is finite, got {}", p.eta1),
        ));
    }
    positive("DE", "eta2", p.eta2)?;
    Ok(LevyModel::De(p))
}

pub fn make_bm_drift() -> LevyModel {
    LevyModel::BmDrift
}

impl LevyModel {
    fn eval_unchecked(&self, u: Complex64) -> Complex64 {
        match *self {
            LevyModel::Vg(VgParams { m, g, c }) => {
                // sum of principal logs: each factor has positive real part in the strip
                c * ((g * m).ln() - (m - u).ln() - (u + g).ln())
            }
            LevyModel::Nig(NigParams {
                alpha,
                beta,
                mu,
                delta,
            }) => {
                // α² − (β+u)² = (α − β − u)(α + β + u), both factors in the right half plane
                let root = (alpha - beta - u).sqrt() * (alpha + beta + u).sqrt();
                delta * ((alpha * alpha - beta * beta).sqrt() - root) + mu * u
            }
            LevyModel::De(p) => {
                let jumps = p.p * p.eta1 / (p.eta1 - u) + p.q() * p.eta2 / (p.eta2 + u) - 1.0;
                0.5 * p.sigma * p.sigma * u * u + p.mu * u + p.lambda * jumps
            }
            LevyModel::BmDrift => 0.5 * (u * u - u),
        }
    }
}

impl ModelCgf for LevyModel {
    fn name(&self) -> String {
        match self {
            LevyModel::Vg(p) => format!("VG(m={}, g={}, C={})", p.m, p.g, p.c),
            LevyModel::Nig(p) => format!(
                "NIG(alpha={}, beta={}, mu={}, delta={})",
                p.alpha, p.beta, p.mu, p.delta
            ),
            LevyModel::De(p) => format!(
                "DE(sigma={}, mu={}, lambda={}, p={}, eta1={}, eta2={})",
                p.sigma, p.mu, p.lambda, p.p, p.eta1, p.eta2
            ),
            LevyModel::BmDrift => "BM(drift=-1/2)".to_string(),
        }
    }

    fn strip(&self) -> AnalyticStrip {
        match *self {
            LevyModel::Vg(p) => AnalyticStrip {
                lower: -p.g,
                upper: p.m,
            },
            LevyModel::Nig(p) => AnalyticStrip {
                lower: -(p.alpha + p.beta),
                upper: p.alpha - p.beta,
            },
            LevyModel::De(p) => AnalyticStrip {
                lower: if p.q() > 0.0 { -p.eta2 } else { f64::NEG_INFINITY },
                upper: if p.p > 0.0 { p.eta1 } else { f64::INFINITY },
            },
            LevyModel::BmDrift => AnalyticStrip {
                lower: f64::NEG_INFINITY,
                upper: f64::INFINITY,
            },
        }
    }

    fn cgf(&self, u: Complex64) -> Result<Complex64> {
        self.strip().check(u.re)?;
        Ok(self.eval_unchecked(u))
    }

    fn criterion(&self, side: Side) -> CriterionClass {
        match (*self, side) {
            (LevyModel::Vg(p), _) => CriterionClass::TypeI { n: 0, rho: p.c },
            (LevyModel::Nig(_), _) => CriterionClass::TypeI { n: 1, rho: 0.5 },
            (LevyModel::De(p), Side::Right) if p.p > 0.0 => CriterionClass::TypeII { rho: 1.0 },
            (LevyModel::De(p), Side::Left) if p.q() > 0.0 => CriterionClass::TypeII { rho: 1.0 },
            (LevyModel::De(_), _) | (LevyModel::BmDrift, _) => CriterionClass::NoBlowup,
        }
    }

    fn boundary_cgf(&self, side: Side) -> f64 {
        match *self {
            LevyModel::Nig(p) => delta_sqrt(p) + p.mu * self.strip().endpoint(side),
            _ => f64::INFINITY,
        }
    }

    fn cgf_real(&self, v: f64) -> Result<f64> {
        self.strip().check(v)?;
        Ok(match *self {
            LevyModel::Vg(VgParams { m, g, c }) => c * ((g * m) / ((m - v) * (v + g))).ln(),
            LevyModel::Nig(p) => {
                let w = p.beta + v;
                p.delta * ((p.alpha * p.alpha - p.beta * p.beta).sqrt()
                    - ((p.alpha - w) * (p.alpha + w)).sqrt())
                    + p.mu * v
            }
            _ => self.eval_unchecked(Complex64::new(v, 0.0)).re,
        })
    }

    fn cgf_deriv(&self, order: u32, v: f64) -> Result<f64> {
        check_order(order)?;
        self.strip().check(v)?;
        let n = order as i32;
        let fact = |k: i32| (1..=k).product::<i32>() as f64;
        Ok(match *self {
            LevyModel::Vg(VgParams { m, g, c }) => {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                c * fact(n - 1) * ((m - v).powi(-n) + sign * (v + g).powi(-n))
            }
            LevyModel::Nig(p) => {
                let w = p.beta + v;
                let a2 = p.alpha * p.alpha;
                let r = (p.alpha - w) * (p.alpha + w);
                let d = p.delta;
                match n {
                    1 => d * w / r.sqrt() + p.mu,
                    2 => d * a2 / r.powf(1.5),
                    3 => 3.0 * d * a2 * w / r.powf(2.5),
                    _ => 3.0 * d * a2 * (a2 + 4.0 * w * w) / r.powf(3.5),
                }
            }
            LevyModel::De(p) => {
                let jump = fact(n)
                    * p.lambda
                    * (p.p * p.eta1 * (p.eta1 - v).powi(-(n + 1))
                        + if n % 2 == 0 { 1.0 } else { -1.0 }
                            * p.q()
                            * p.eta2
                            * (p.eta2 + v).powi(-(n + 1)));
                match n {
                    1 => p.sigma * p.sigma * v + p.mu + jump,
                    2 => p.sigma * p.sigma + jump,
                    _ => jump,
                }
            }
            LevyModel::BmDrift => match n {
                1 => v - 0.5,
                2 => 1.0,
                _ => 0.0,
            },
        })
    }
}

fn delta_sqrt(p: NigParams) -> f64 {
    p.delta * (p.alpha * p.alpha - p.beta * p.beta).sqrt()
}

/// The law of `L_t`: `K_t(u) = t K_L(u)`. Same strip; a Type I constant for
/// VG scales with `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevyMarginal {
    pub levy: LevyModel,
    pub t: f64,
}

impl LevyMarginal {
    pub fn new(levy: LevyModel, t: f64) -> Result<Self> {
        positive("Levy marginal", "t", t)?;
        Ok(Self { levy, t })
    }
}

impl ModelCgf for LevyMarginal {
    fn name(&self) -> String {
        format!("{} at t={}", self.levy.name(), self.t)
    }
    fn strip(&self) -> AnalyticStrip {
        self.levy.strip()
    }
    fn cgf(&self, u: Complex64) -> Result<Complex64> {
        Ok(self.levy.cgf(u)? * self.t)
    }
    fn criterion(&self, side: Side) -> CriterionClass {
        match self.levy.criterion(side) {
            CriterionClass::TypeI { n: 0, rho } => CriterionClass::TypeI {
                n: 0,
                rho: rho * self.t,
            },
            c => c,
        }
    }
    fn boundary_cgf(&self, side: Side) -> f64 {
        self.levy.boundary_cgf(side) * self.t
    }
    fn cgf_real(&self, v: f64) -> Result<f64> {
        Ok(self.levy.cgf_real(v)? * self.t)
    }
    fn cgf_deriv(&self, order: u32, v: f64) -> Result<f64> {
        Ok(self.levy.cgf_deriv(order, v)? * self.t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::numeric_deriv;

    fn vg() -> LevyModel {
        make_vg(VgParams {
            m: 10.0,
            g: 8.0,
            c: 1.5,
        })
        .unwrap()
    }

    fn nig() -> LevyModel {
        make_nig(NigParams {
            alpha: 16.1975,
            beta: -3.1804,
            mu: 0.05,
            delta: 1.0867,
        })
        .unwrap()
    }

    fn de() -> LevyModel {
        make_de(DeParams {
            sigma: 0.2,
            mu: 0.0,
            lambda: 1.0,
            p: 0.4,
            eta1: 10.0,
            eta2: 5.0,
        })
        .unwrap()
    }

    #[test]
    fn vg_reference_values() {
        let m = vg();
        // K'(0) = C(1/m − 1/g) and K(2) = C log(80 / (8·10)) = 0
        assert!((m.cgf_deriv(1, 0.0).unwrap() + 0.0375).abs() < 1e-16);
        assert!(m.cgf_real(2.0).unwrap().abs() < 1e-15);
        assert_eq!(m.strip(), AnalyticStrip { lower: -8.0, upper: 10.0 });
    }

    #[test]
    fn cgf_vanishes_at_zero() {
        for m in [vg(), nig(), de(), make_bm_drift()] {
            assert!(m.cgf(Complex64::new(0.0, 0.0)).unwrap().norm() < 1e-13, "{}", m.name());
        }
    }

    #[test]
    fn closed_form_derivatives_match_numeric() {
        for m in [vg(), nig(), de(), make_bm_drift()] {
            let s = m.strip();
            let pts = [
                0.0,
                0.5 * s.upper.min(3.0),
                0.5 * s.lower.max(-3.0),
            ];
            for &v in &pts {
                for order in 1..=4 {
                    let a = m.cgf_deriv(order, v).unwrap();
                    let b = numeric_deriv(&m, order, v).unwrap();
                    let scale = 1.0 + a.abs();
                    assert!(
                        (a - b).abs() < 1e-8 * scale,
                        "{} order {order} at {v}: {a} vs {b}",
                        m.name()
                    );
                }
            }
        }
    }

    #[test]
    fn complex_and_real_paths_agree() {
        for m in [vg(), nig(), de()] {
            for v in [-1.5, 0.3, 2.5] {
                let a = m.cgf(Complex64::new(v, 0.0)).unwrap().re;
                let b = m.cgf_real(v).unwrap();
                assert!((a - b).abs() < 1e-13 * (1.0 + b.abs()));
            }
        }
    }

    #[test]
    fn characteristic_function_is_bounded_by_mgf() {
        // |M(v + iy)| <= M(v)
        for m in [vg(), nig(), de()] {
            for y in [0.5, 3.0, 40.0, 900.0] {
                let k = m.cgf(Complex64::new(1.2, y)).unwrap();
                assert!(k.re <= m.cgf_real(1.2).unwrap() + 1e-12, "{} y={y}", m.name());
            }
        }
    }

    #[test]
    fn nig_boundary_value_is_finite() {
        let m = nig();
        let NigParams { alpha, beta, mu, delta } = match m {
            LevyModel::Nig(p) => p,
            _ => unreachable!(),
        };
        let edge = alpha - beta;
        let expect = delta * (alpha * alpha - beta * beta).sqrt() + mu * edge;
        assert!((m.boundary_cgf(Side::Right) - expect).abs() < 1e-14);
        let near = m.cgf_real(edge * (1.0 - 1e-14)).unwrap();
        assert!((near - expect).abs() < 1e-5);
    }

    #[test]
    fn de_one_sided_strip() {
        let m = make_de(DeParams {
            sigma: 0.1,
            mu: 0.0,
            lambda: 2.0,
            p: 1.0,
            eta1: 4.0,
            eta2: 3.0,
        })
        .unwrap();
        assert_eq!(m.strip().lower, f64::NEG_INFINITY);
        assert_eq!(m.criterion(Side::Left), CriterionClass::NoBlowup);
        assert_eq!(m.criterion(Side::Right), CriterionClass::TypeII { rho: 1.0 });
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(make_vg(VgParams { m: -1.0, g: 1.0, c: 1.0 }).is_err());
        assert!(make_nig(NigParams { alpha: 1.0, beta: 1.0, mu: 0.0, delta: 1.0 }).is_err());
        assert!(make_de(DeParams {
            sigma: 0.1,
            mu: 0.0,
            lambda: 1.0,
            p: 0.5,
            eta1: 0.9,
            eta2: 2.0
        })
        .is_err());
        assert!(vg().cgf(Complex64::new(10.0, 0.0)).is_err());
    }

    #[test]
    fn marginal_scales_vg_constant() {
        let m = LevyMarginal::new(vg(), 0.25).unwrap();
        assert_eq!(m.criterion(Side::Right), CriterionClass::TypeI { n: 0, rho: 0.375 });
        assert!((m.cgf_real(1.0).unwrap() - 0.25 * vg().cgf_real(1.0).unwrap()).abs() < 1e-16);
    }
}
