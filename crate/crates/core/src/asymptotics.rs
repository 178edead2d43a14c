//! The slope map ψ, the moment-formula wing slopes, the linear-tail transfer
//! from log-tails to implied-variance wings, and a log-log regression
//! estimator for regular-variation indices.

use crate::error::{Error, Result};

/// Asymptotic slope of total implied variance against log-strike, in `[0, 2]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SlopeValue(f64);

impl SlopeValue {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<SlopeValue> for f64 {
    fn from(s: SlopeValue) -> f64 {
        s.0
    }
}

impl std::fmt::Display for SlopeValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// ψ(x) = 2 − 4(√(x²+x) − x).
///
/// Evaluated in the algebraically equivalent form `2 / (√(x+1) + √x)²`,
/// which has no cancellation anywhere on `[0, ∞)` and gives ψ(0) = 2 exactly.
pub fn psi(x: f64) -> Result<SlopeValue> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain("psi", format!("argument must be finite and >= 0, got {x}")));
    }
    let s = (x + 1.0).sqrt() + x.sqrt();
    Ok(SlopeValue(2.0 / (s * s)))
}

/// Right-wing slope ψ(r* − 1) for a right critical exponent r* > 1.
pub fn right_slope(r_star: f64) -> Result<SlopeValue> {
    if r_star.is_nan() || r_star <= 1.0 {
        return Err(Error::domain(
            "right_slope",
            format!("needs r* > 1 (p* = r* - 1 > 0), got r* = {r_star}"),
        ));
    }
    if r_star.is_infinite() {
        return Ok(SlopeValue(0.0));
    }
    psi(r_star - 1.0)
}

/// Left-wing slope ψ(q*) for a left critical exponent q* > 0.
pub fn left_slope(q_star: f64) -> Result<SlopeValue> {
    if q_star.is_nan() || q_star <= 0.0 {
        return Err(Error::domain("left_slope", format!("needs q* > 0, got {q_star}")));
    }
    if q_star.is_infinite() {
        return Ok(SlopeValue(0.0));
    }
    psi(q_star)
}

/// Finite-k transfer `V²(k)/k ≈ ψ(−1 − log F̄(k)/k)` for the right wing,
/// given `neg_log_tail = −log F̄(k)`.
pub fn tail_to_wing_right(k: f64, neg_log_tail: f64) -> Result<SlopeValue> {
    if !(k > 0.0) || !neg_log_tail.is_finite() {
        return Err(Error::domain(
            "tail_to_wing_right",
            format!("needs k > 0 and finite tail, got k = {k}, -log tail = {neg_log_tail}"),
        ));
    }
    let x = neg_log_tail / k - 1.0;
    if !(x > 0.0) {
        return Err(Error::domain(
            "tail_to_wing_right",
            format!("-log F(k)/k = {} must exceed 1", neg_log_tail / k),
        ));
    }
    psi(x)
}

/// Left-wing analogue `V²(−k)/k ≈ ψ(−log F(−k)/k)`.
pub fn tail_to_wing_left(k: f64, neg_log_tail: f64) -> Result<SlopeValue> {
    if !(k > 0.0) || !neg_log_tail.is_finite() || !(neg_log_tail > 0.0) {
        return Err(Error::domain(
            "tail_to_wing_left",
            format!("needs k > 0 and -log F(-k) > 0, got k = {k}, {neg_log_tail}"),
        ));
    }
    psi(neg_log_tail / k)
}

/// Output of [`estimate_rv_index`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RvIndexEstimate {
    pub rho: f64,
    pub stderr: f64,
    /// Range of `s` covered by the samples, `(min, max)`.
    pub window: (f64, f64),
}

/// Geometric sample grid `s_i = s0 · 2^{−i}`, `i = 0..n`.
pub fn geometric_grid(s0: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| s0 * 0.5f64.powi(i as i32)).collect()
}

/// Estimates ρ in `y(s) ∼ s^{−ρ} ℓ(1/s)` as `s → 0+` by ordinary least
/// squares of `log y` on `log(1/s)`. Slowly varying corrections show up in
/// the standard error instead of being modelled.
pub fn estimate_rv_index(samples: &[(f64, f64)]) -> Result<RvIndexEstimate> {
    const MIN: usize = 8;
    if samples.len() < MIN {
        return Err(Error::InsufficientSamples {
            op: "estimate_rv_index",
            needed: MIN,
            got: samples.len(),
        });
    }
    for w in samples.windows(2) {
        if !(w[1].0 < w[0].0) {
            return Err(Error::domain(
                "estimate_rv_index",
                "s values must be strictly decreasing",
            ));
        }
    }
    if let Some(&(s, y)) = samples
        .iter()
        .find(|(s, y)| !(*s > 0.0 && *y > 0.0 && s.is_finite() && y.is_finite()))
    {
        return Err(Error::domain(
            "estimate_rv_index",
            format!("samples must be positive and finite, got (s, y) = ({s}, {y})"),
        ));
    }
    let xs: Vec<f64> = samples.iter().map(|(s, _)| -s.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|(_, y)| y.ln()).collect();
    let (slope, _intercept, stderr) = ols(&xs, &ys);
    if !(slope > 0.0) {
        return Err(Error::domain(
            "estimate_rv_index",
            format!("fitted index {slope} is not positive; samples do not blow up"),
        ));
    }
    let last = samples.len() - 1;
    Ok(RvIndexEstimate {
        rho: slope,
        stderr,
        window: (samples[last].0, samples[0].0),
    })
}

/// Simple linear regression; returns (slope, intercept, stderr of slope).
pub(crate) fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let dof = (xs.len() as f64 - 2.0).max(1.0);
    let stderr = (sse / dof / sxx).sqrt();
    (slope, intercept, stderr)
}
