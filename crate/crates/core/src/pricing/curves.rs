//! Smile and tail curves on grids, and least-squares wing fits.

use rayon::prelude::*;

use super::fourier::{log_distribution_with, log_survival_with, otm_price_with, PricingOptions};
use super::normal::implied_total_vol_otm;
use crate::asymptotics::ols;
use crate::error::{Error, Result};
use crate::model::{ModelCgf, Side};

/// A price at or beyond this distance from its bounds is not inverted.
pub const PRICE_FRONTIER: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmilePoint {
    pub k: f64,
    pub total_variance: f64,
}

/// A grid point left out of a curve, with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct Dropped {
    pub at: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmileCurve {
    pub t: f64,
    pub points: Vec<SmilePoint>,
    pub dropped: Vec<Dropped>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailPoint {
    pub x: f64,
    /// `−log P(X > x)/x` (right) or `−log P(X < −x)/x` (left).
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailCurve {
    pub t: f64,
    pub side: Side,
    pub points: Vec<TailPoint>,
    pub dropped: Vec<Dropped>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WingFit {
    pub fitted_slope: f64,
    pub intercept: f64,
    pub window: (f64, f64),
    pub rms_residual: f64,
}

fn check_grid(op: &'static str, grid: &[f64], positive: bool) -> Result<()> {
    if grid.iter().any(|x| !x.is_finite()) || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain(op, "grid must be finite and strictly increasing"));
    }
    if positive && grid.first().is_some_and(|&x| !(x > 0.0)) {
        return Err(Error::domain(op, "grid must be positive"));
    }
    Ok(())
}

fn smile_point<M: ModelCgf + ?Sized>(model: &M, k: f64, opts: &PricingOptions) -> std::result::Result<SmilePoint, String> {
    let price = otm_price_with(model, k, opts).map_err(|e| format!("pricing failed: {e}"))?;
    let upper = if k >= 0.0 { 1.0 } else { k.exp() };
    if !(price >= PRICE_FRONTIER) {
        return Err(format!("price {price:e} below the {PRICE_FRONTIER:e} frontier"));
    }
    if !(upper - price > PRICE_FRONTIER) {
        return Err(format!("price {price:e} within {PRICE_FRONTIER:e} of its upper bound"));
    }
    let v = implied_total_vol_otm(k, price).map_err(|e| format!("inversion failed: {e}"))?;
    Ok(SmilePoint {
        k,
        total_variance: v * v,
    })
}

/// Total implied variance `V²(k)` on `k_grid`. Grid points are priced in
/// parallel; unrecoverable points are dropped and listed.
pub fn smile_curve_with<M: ModelCgf + ?Sized>(model: &M, t: f64, k_grid: &[f64], opts: &PricingOptions) -> Result<SmileCurve> {
    check_grid("smile_curve", k_grid, false)?;
    let results: Vec<_> = k_grid.par_iter().map(|&k| (k, smile_point(model, k, opts))).collect();
    let mut curve = SmileCurve {
        t,
        points: Vec::new(),
        dropped: Vec::new(),
    };
    for (k, r) in results {
        match r {
            Ok(p) => curve.points.push(p),
            Err(reason) => {
                log::debug!("smile point k = {k} dropped: {reason}");
                curve.dropped.push(Dropped { at: k, reason });
            }
        }
    }
    Ok(curve)
}

pub fn smile_curve<M: ModelCgf + ?Sized>(model: &M, t: f64, k_grid: &[f64]) -> Result<SmileCurve> {
    smile_curve_with(model, t, k_grid, &PricingOptions::default())
}

fn tail_point<M: ModelCgf + ?Sized>(model: &M, x: f64, side: Side, opts: &PricingOptions) -> std::result::Result<TailPoint, String> {
    let log_p = match side {
        Side::Right => log_survival_with(model, x, opts),
        Side::Left => log_distribution_with(model, -x, opts),
    }
    .map_err(|e| format!("inversion failed: {e}"))?;
    if !(log_p < 0.0) {
        return Err(format!("tail probability e^{log_p} is not below 1"));
    }
    Ok(TailPoint { x, ratio: -log_p / x })
}

/// `−log` tail probability over `x` on a positive grid.
pub fn tail_slope_curve_with<M: ModelCgf + ?Sized>(
    model: &M,
    t: f64,
    x_grid: &[f64],
    side: Side,
    opts: &PricingOptions,
) -> Result<TailCurve> {
    check_grid("tail_slope_curve", x_grid, true)?;
    let results: Vec<_> = x_grid.par_iter().map(|&x| (x, tail_point(model, x, side, opts))).collect();
    let mut curve = TailCurve {
        t,
        side,
        points: Vec::new(),
        dropped: Vec::new(),
    };
    for (x, r) in results {
        match r {
            Ok(p) => curve.points.push(p),
            Err(reason) => {
                log::debug!("tail point x = {x} dropped: {reason}");
                curve.dropped.push(Dropped { at: x, reason });
            }
        }
    }
    Ok(curve)
}

pub fn tail_slope_curve<M: ModelCgf + ?Sized>(model: &M, t: f64, x_grid: &[f64], side: Side) -> Result<TailCurve> {
    tail_slope_curve_with(model, t, x_grid, side, &PricingOptions::default())
}

/// Least-squares line through the points whose abscissa lies in the top
/// `fraction` of the abscissa range.
pub fn wing_fit(points: &[(f64, f64)], fraction: f64) -> Result<WingFit> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::domain("wing_fit", format!("fraction must lie in (0, 1), got {fraction}")));
    }
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let cut = hi - fraction * (hi - lo);
    let sel: Vec<(f64, f64)> = points.iter().copied().filter(|p| p.0 >= cut).collect();
    if sel.len() < 4 {
        return Err(Error::InsufficientSamples {
            op: "wing_fit",
            needed: 4,
            got: sel.len(),
        });
    }
    let xs: Vec<f64> = sel.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = sel.iter().map(|p| p.1).collect();
    let (slope, intercept, _) = ols(&xs, &ys);
    let rss: f64 = sel.iter().map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(WingFit {
        fitted_slope: slope,
        intercept,
        window: (xs[0].min(xs[xs.len() - 1]), xs[0].max(xs[xs.len() - 1])),
        rms_residual: (rss / sel.len() as f64).sqrt(),
    })
}

/// Wing fit of `V²` against `|k|` on one side of the smile.
pub fn smile_wing_fit(curve: &SmileCurve, side: Side, fraction: f64) -> Result<WingFit> {
    let pts: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter_map(|p| match side {
            Side::Right if p.k > 0.0 => Some((p.k, p.total_variance)),
            Side::Left if p.k < 0.0 => Some((-p.k, p.total_variance)),
            _ => None,
        })
        .collect();
    wing_fit(&pts, fraction)
}

/// Wing fit of `−log` tail probability against `x`; the slope estimates the
/// critical exponent.
pub fn tail_wing_fit(curve: &TailCurve, fraction: f64) -> Result<WingFit> {
    let pts: Vec<(f64, f64)> = curve.points.iter().map(|p| (p.x, p.ratio * p.x)).collect();
    wing_fit(&pts, fraction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{make_bm_drift, LevyMarginal};

    #[test]
    fn exact_line() {
        let pts: Vec<(f64, f64)> = (0..20).map(|i| (i as f64, 0.3 + 0.7 * i as f64)).collect();
        let f = wing_fit(&pts, 0.5).unwrap();
        assert!((f.fitted_slope - 0.7).abs() < 1e-14);
        assert!(f.rms_residual < 1e-13);
        assert_eq!(f.window, (9.5f64.ceil(), 19.0));
    }

    #[test]
    fn hyperbolic_perturbation_bound() {
        let (a, b, c) = (0.1, 0.25, 0.05);
        let pts: Vec<(f64, f64)> = (1..=40).map(|i| {
            let k = 0.25 * i as f64;
            (k, a + b * k + c / k)
        }).collect();
        let f = wing_fit(&pts, 0.2).unwrap();
        assert!((f.fitted_slope - b).abs() <= c / f.window.0);
    }

    #[test]
    fn too_few_points() {
        let pts = [(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)];
        assert!(matches!(wing_fit(&pts, 0.5), Err(Error::InsufficientSamples { .. })));
    }

    #[test]
    fn flat_black_scholes_smile() {
        let t = 0.9;
        let m = LevyMarginal::new(make_bm_drift(), t).unwrap();
        let grid: Vec<f64> = (0..=24).map(|i| -3.0 + 0.25 * i as f64).collect();
        let c = smile_curve(&m, t, &grid).unwrap();
        assert!(c.dropped.is_empty(), "{:?}", c.dropped);
        for p in &c.points {
            assert!((p.total_variance - t).abs() < 1e-9, "k={}: {}", p.k, p.total_variance);
        }
    }

    #[test]
    fn gaussian_tail_ratio_grows() {
        let m = LevyMarginal::new(make_bm_drift(), 1.0).unwrap();
        let c = tail_slope_curve(&m, 1.0, &[5.0, 10.0], Side::Right).unwrap();
        assert_eq!(c.points.len(), 2);
        assert!(c.points[1].ratio > c.points[0].ratio);
    }
}
