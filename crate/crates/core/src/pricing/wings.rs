//! Predicted against empirical wing slopes for one side of a smile.

use super::curves::{smile_wing_fit, SmileCurve, WingFit};
use super::fourier::{log_distribution_with, log_survival_with, PricingOptions};
use crate::asymptotics::{tail_to_wing_left, tail_to_wing_right};
use crate::error::{Error, Result};
use crate::model::{ModelCgf, Side};
use crate::time_change::wing_report;

#[derive(Debug, Clone, PartialEq)]
pub struct WingComparison {
    pub side: Side,
    /// `ψ(r* − 1)` or `ψ(q*)`.
    pub predicted: Option<f64>,
    pub fit: Result<WingFit>,
    /// Largest usable `|k|` on this side.
    pub k_max: Option<f64>,
    /// Tail-to-wing transfer of the inverted log-tail at `k_max`.
    pub transferred: Result<f64>,
}

impl WingComparison {
    /// `|fitted/predicted − 1|`.
    pub fn fit_error(&self) -> Option<f64> {
        match (&self.fit, self.predicted) {
            (Ok(f), Some(p)) if p > 0.0 => Some((f.fitted_slope / p - 1.0).abs()),
            _ => None,
        }
    }

    /// `|fitted/transferred − 1|`.
    pub fn coherence_error(&self) -> Option<f64> {
        match (&self.fit, &self.transferred) {
            (Ok(f), Ok(t)) if *t > 0.0 => Some((f.fitted_slope / t - 1.0).abs()),
            _ => None,
        }
    }
}

/// Fits the top `fraction` of one wing of `smile` and compares it with the
/// predicted slope and with the tail-to-wing transfer at the largest usable
/// strike.
pub fn compare_wing<M: ModelCgf + ?Sized>(
    model: &M,
    smile: &SmileCurve,
    side: Side,
    fraction: f64,
    opts: &PricingOptions,
) -> WingComparison {
    let report = wing_report(model);
    let predicted = match side {
        Side::Right => report.right.slope,
        Side::Left => report.left.slope,
    };
    let k_max = smile
        .points
        .iter()
        .filter(|p| match side {
            Side::Right => p.k > 0.0,
            Side::Left => p.k < 0.0,
        })
        .map(|p| p.k.abs())
        .fold(None, |m: Option<f64>, k| Some(m.map_or(k, |m| m.max(k))));
    let transferred = match k_max {
        None => Err(Error::InsufficientSamples {
            op: "compare_wing",
            needed: 1,
            got: 0,
        }),
        Some(k) => match side {
            Side::Right => log_survival_with(model, k, opts).and_then(|l| tail_to_wing_right(k, -l)),
            Side::Left => log_distribution_with(model, -k, opts).and_then(|l| tail_to_wing_left(k, -l)),
        }
        .map(|s| s.value()),
    };
    WingComparison {
        side,
        predicted,
        fit: smile_wing_fit(smile, side, fraction),
        k_max,
        transferred,
    }
}
