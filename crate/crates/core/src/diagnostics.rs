//! Numerical checks of blow-up classifications and critical-moment roots.

use crate::asymptotics::{estimate_rv_index, geometric_grid, RvIndexEstimate};
use crate::clocks::ClockCgf;
use crate::error::{Error, Result};
use crate::model::{CriterionClass, ModelCgf, Reflected, Side};

const SAMPLES: usize = 16;

/// Measured against predicted index of the blow-up named by the model's
/// criterion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexCheck {
    pub criterion: CriterionClass,
    pub estimate: RvIndexEstimate,
    pub predicted: f64,
}

impl IndexCheck {
    pub fn relative_error(&self) -> f64 {
        (self.estimate.rho - self.predicted).abs() / self.predicted.abs().max(f64::MIN_POSITIVE)
    }
}

fn right_index<M: ModelCgf + ?Sized>(model: &M) -> Result<IndexCheck> {
    let criterion = model.criterion(Side::Right);
    let e = model.strip().upper;
    if !e.is_finite() {
        return Err(Error::NotApplicable(format!("{}: no finite critical exponent", model.name())));
    }
    let s0 = 1e-4 * e.abs().max(1e-3);
    let sample = |v: f64| -> Result<f64> {
        match criterion {
            CriterionClass::TypeI { n: 0, .. } => Ok(model.cgf_real(v)?.exp()),
            CriterionClass::TypeI { n: 1, .. } => Ok(model.cgf_deriv(1, v)? * model.cgf_real(v)?.exp()),
            CriterionClass::TypeI { n: 2, .. } => {
                let k1 = model.cgf_deriv(1, v)?;
                Ok((model.cgf_deriv(2, v)? + k1 * k1) * model.cgf_real(v)?.exp())
            }
            CriterionClass::TypeII { .. } => model.cgf_real(v),
            other => Err(Error::NotApplicable(format!(
                "{}: no regularly varying blow-up to measure ({other})",
                model.name()
            ))),
        }
    };
    let predicted = match criterion {
        CriterionClass::TypeI { n, rho } if n <= 2 => rho,
        CriterionClass::TypeII { rho } => rho,
        other => {
            return Err(Error::NotApplicable(format!(
                "{}: cannot sample blow-up of class {other}",
                model.name()
            )))
        }
    };
    let samples = geometric_grid(s0, SAMPLES)
        .into_iter()
        .map(|s| sample(e - s).map(|y| (s, y)))
        .collect::<Result<Vec<_>>>()?;
    Ok(IndexCheck {
        criterion,
        estimate: estimate_rv_index(&samples)?,
        predicted,
    })
}

/// Estimates the regular-variation index of `M^(n)` or `log M` at the
/// critical exponent from mgf samples alone.
pub fn blowup_index<M: ModelCgf + ?Sized>(model: &M, side: Side) -> Result<IndexCheck> {
    match side {
        Side::Right => right_index(model),
        Side::Left => right_index(&Reflected(model)),
    }
}

/// Same for a clock at horizon `t`, sampled below its explosion point.
pub fn clock_blowup_index(clock: &ClockCgf, t: f64) -> Result<IndexCheck> {
    let criterion = clock.criterion(t)?;
    let pt = clock.explosion_point(t)?;
    if !pt.is_finite() {
        return Err(Error::NotApplicable(format!("{}: clock does not explode", clock.name())));
    }
    let (f, predicted): (Box<dyn Fn(f64) -> Result<f64>>, f64) = match criterion {
        CriterionClass::TypeI { n: 0, rho } => (Box::new(|v| clock.eval(t, v).map(f64::exp)), rho),
        CriterionClass::TypeII { rho } => (Box::new(|v| clock.eval(t, v)), rho),
        other => {
            return Err(Error::NotApplicable(format!(
                "{}: cannot sample blow-up of class {other}",
                clock.name()
            )))
        }
    };
    let samples = geometric_grid(1e-4 * pt, SAMPLES)
        .into_iter()
        .map(|s| f(pt - s).map(|y| (s, y)))
        .collect::<Result<Vec<_>>>()?;
    Ok(IndexCheck {
        criterion,
        estimate: estimate_rv_index(&samples)?,
        predicted,
    })
}

/// Number of sign changes of `K_L(v) − p_T` on a scan of `(0, e)` with `n`
/// uniform points plus a geometric refinement near `e`, the base endpoint on
/// `side` (capped at `cap` when infinite).
pub fn sign_changes<M: ModelCgf + ?Sized>(base: &M, pt: f64, side: Side, n: usize, cap: f64) -> Result<usize> {
    let e = base.strip().endpoint(side).abs().min(cap);
    let sgn = |s: f64| -> Result<f64> {
        let v = match side {
            Side::Right => s,
            Side::Left => -s,
        };
        Ok(base.cgf_real(v)? - pt)
    };
    // uniform scan, refined geometrically towards the endpoint
    let mut pts: Vec<f64> = (1..n).map(|i| e * i as f64 / n as f64).collect();
    let last = e / n as f64;
    pts.extend((1..=52).map(|j| e - last * 0.5f64.powi(j)).filter(|&s| s < e));
    let mut changes = 0;
    let mut prev = sgn(0.0)?;
    for s in pts {
        let cur = sgn(s)?;
        // exact zeros carry no sign; compare against the last nonzero value
        if cur == 0.0 {
            continue;
        }
        if prev != 0.0 && (cur > 0.0) != (prev > 0.0) {
            changes += 1;
        }
        prev = cur;
    }
    Ok(changes)
}
