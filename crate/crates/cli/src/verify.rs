//! `verify`: the invariant suite on the configured model.

use std::fmt::{self, Write as _};

use smilewing_core::{
    bs_otm, call_price_with, default_alpha, implied_total_vol_otm, otm_price_with, sign_changes, survival_with,
    vg_gamma_ou_critical_moments, ClockCgf, Damping, LevyModel, ModelCgf, PricingOptions, Reflected, Side,
    TcltCase, PRICE_FRONTIER,
};

use crate::commands::{Outcome, Run};
use crate::error::CliResult;

/// Strikes for the damping-independence check, clipped to the `k` grid.
const ALPHA_STRIKES: [f64; 7] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];
/// Uniform points in the root-uniqueness scan.
const SCAN_POINTS: usize = 2000;
const SCAN_CAP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub t: f64,
    pub status: Status,
    pub detail: String,
}

fn judge(name: &'static str, t: f64, worst: f64, tol: f64, what: &str) -> Check {
    Check {
        name,
        t,
        status: if worst <= tol { Status::Pass } else { Status::Fail },
        detail: format!("{what} {worst:.3e} (tolerance {tol:.1e})"),
    }
}

fn failed(name: &'static str, t: f64, detail: impl Into<String>) -> Check {
    Check {
        name,
        t,
        status: Status::Fail,
        detail: detail.into(),
    }
}

fn skipped(name: &'static str, t: f64, detail: impl Into<String>) -> Check {
    Check {
        name,
        t,
        status: Status::Skip,
        detail: detail.into(),
    }
}

fn martingale(model: &dyn ModelCgf, t: f64, tol: f64) -> Check {
    match model.cgf_real(1.0) {
        Ok(k1) => judge("martingale", t, k1.abs(), tol, "|K(1)|"),
        Err(e) => failed("martingale", t, e.to_string()),
    }
}

fn alpha_independence(model: &dyn ModelCgf, t: f64, strikes: &[f64], opts: &PricingOptions, tol: f64) -> Check {
    const NAME: &str = "alpha_independence";
    let r = model.strip().r_star();
    if !(r > 1.0) {
        return skipped(NAME, t, format!("r* = {r} <= 1"));
    }
    // keep e^{α|k|} cancellation in ITM strikes small
    let kmax = strikes.iter().fold(1.0f64, |m, k| m.max(k.abs()));
    let a1 = default_alpha(r).min(4.0 / kmax);
    let dampings = [Damping::Auto, Damping::Fixed(a1), Damping::Fixed(0.5 * a1)];
    let mut worst = 0.0f64;
    for &k in strikes {
        let mut prices = Vec::new();
        for d in dampings {
            match call_price_with(model, k, &PricingOptions { damping: d, ..*opts }) {
                Ok(p) => prices.push(p),
                Err(e) => return failed(NAME, t, format!("k={k}, damping {d:?}: {e}")),
            }
        }
        let lo = prices.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = prices.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(hi - lo);
    }
    judge(NAME, t, worst, tol, "max call spread over damping lines")
}

fn round_trip(model: &dyn ModelCgf, t: f64, grid: &[f64], opts: &PricingOptions, tol: f64) -> Check {
    const NAME: &str = "round_trip";
    let mut worst = 0.0f64;
    let mut used = 0;
    for &k in grid {
        let price = match otm_price_with(model, k, opts) {
            Ok(p) => p,
            Err(e) => return failed(NAME, t, format!("pricing at k={k}: {e}")),
        };
        let upper = if k >= 0.0 { 1.0 } else { k.exp() };
        if !(price >= PRICE_FRONTIER && upper - price > PRICE_FRONTIER) {
            continue;
        }
        let back = implied_total_vol_otm(k, price)
            .and_then(|v| bs_otm(k, v).and_then(|p| implied_total_vol_otm(k, p)).map(|w| (w - v).abs()));
        match back {
            Ok(err) => worst = worst.max(err),
            Err(e) => return failed(NAME, t, format!("inversion at k={k}: {e}")),
        }
        used += 1;
    }
    let mut c = judge(NAME, t, worst, tol, "max |V - V(bs(V))|");
    c.detail.push_str(&format!(" over {used} strikes"));
    c
}

fn chebyshev(model: &dyn ModelCgf, t: f64, grid: &[f64], opts: &PricingOptions, slack: f64) -> Check {
    const NAME: &str = "chebyshev";
    let r = model.strip().r_star();
    let a = if r.is_finite() { 0.9 * r } else { 4.0 };
    let m = match model.cgf_real(a) {
        Ok(k) => k.exp(),
        Err(e) => return failed(NAME, t, e.to_string()),
    };
    let mut worst = f64::NEG_INFINITY;
    for &x in grid {
        match survival_with(model, x, opts) {
            Ok(s) => worst = worst.max(s - m * (-a * x).exp()),
            Err(e) => return failed(NAME, t, format!("survival at x={x}: {e}")),
        }
    }
    judge(NAME, t, worst.max(0.0), slack, &format!("max excess over M({a:.4})e^(-{a:.4}x)"))
}

fn monotonicity(model: &dyn ModelCgf, t: f64, k_grid: &[f64], x_grid: &[f64], opts: &PricingOptions, slack: f64) -> Check {
    const NAME: &str = "monotonicity";
    let calls: Result<Vec<f64>, _> = k_grid.iter().map(|&k| call_price_with(model, k, opts)).collect();
    let tails: Result<Vec<f64>, _> = x_grid.iter().map(|&x| survival_with(model, x, opts)).collect();
    match (calls, tails) {
        (Ok(c), Ok(s)) => {
            let rise = |v: &[f64]| v.windows(2).map(|w| w[1] - w[0]).fold(0.0f64, f64::max);
            judge(NAME, t, rise(&c).max(rise(&s)), slack, "max increase of calls in k / tails in x")
        }
        (Err(e), _) | (_, Err(e)) => failed(NAME, t, e.to_string()),
    }
}

/// Root of `K_L(±p) = p_T` solved to the residual tolerance or pinned
/// between adjacent doubles.
fn root_ok(base: &LevyModel, side: Side, p: f64, pt: f64, tol: f64) -> Result<(bool, f64), String> {
    let f = |s: f64| -> Result<f64, String> {
        let v = if side == Side::Right { s } else { -s };
        base.cgf_real(v).map(|k| k - pt).map_err(|e| e.to_string())
    };
    let res = f(p)?.abs() / pt;
    if res <= tol {
        return Ok((true, res));
    }
    let lo = f(p.next_down())?;
    let hi = f(p.next_up()).unwrap_or(f64::INFINITY);
    Ok((lo <= 0.0 && hi >= 0.0, res))
}

fn composed_checks(run: &Run, model: &dyn ModelCgf, t: f64) -> Vec<Check> {
    let tol = &run.cfg.tolerances;
    let (Some(base), Some(clock)) = (run.spec.levy(), run.spec.clock) else {
        return vec![
            skipped("uniqueness", t, "no clock"),
            skipped("root_residual", t, "no clock"),
            skipped("closed_form", t, "no clock"),
        ];
    };
    let pt = match clock.explosion_point(t) {
        Ok(p) => p,
        Err(e) => return vec![failed("uniqueness", t, e.to_string())],
    };
    let mut out = Vec::new();
    let mut uniq = Vec::new();
    let mut resid = Vec::new();
    let mut bad_u = false;
    let mut bad_r = false;
    for side in [Side::Right, Side::Left] {
        let Some(case) = model.tclt_case(side) else {
            uniq.push(format!("{side:?}: no case"));
            bad_u = true;
            continue;
        };
        let expected = usize::from(matches!(case, TcltCase::InteriorRoot { p } if p < base.strip().endpoint(side).abs()));
        match sign_changes(&base, pt, side, SCAN_POINTS, SCAN_CAP) {
            Ok(n) => {
                bad_u |= n != expected;
                uniq.push(format!("{side:?}: {n} sign change(s), expected {expected} for {case}"));
            }
            Err(e) => {
                bad_u = true;
                uniq.push(format!("{side:?}: {e}"));
            }
        }
        if let TcltCase::InteriorRoot { p } = case {
            match root_ok(&base, side, p, pt, tol.root_residual) {
                Ok((ok, res)) => {
                    bad_r |= !ok;
                    resid.push(format!("{side:?}: relative residual {res:.3e}"));
                }
                Err(e) => {
                    bad_r = true;
                    resid.push(format!("{side:?}: {e}"));
                }
            }
        }
    }
    let status = |bad: bool| if bad { Status::Fail } else { Status::Pass };
    out.push(Check {
        name: "uniqueness",
        t,
        status: status(bad_u),
        detail: uniq.join("; "),
    });
    out.push(if resid.is_empty() {
        skipped("root_residual", t, "no interior root")
    } else {
        Check {
            name: "root_residual",
            t,
            status: status(bad_r),
            detail: format!("{} (tolerance {:.1e})", resid.join("; "), tol.root_residual),
        }
    });
    out.push(match (base, clock) {
        (LevyModel::Vg(vg), ClockCgf::GammaOu(gou)) => {
            let (p, q) = vg_gamma_ou_critical_moments(vg, gou, t);
            let err = |side: Side, want: f64| {
                model.tclt_case(side).map_or(f64::INFINITY, |c| (c.p() - want).abs() / want)
            };
            judge("closed_form", t, err(Side::Right, p).max(err(Side::Left, q)), tol.closed_form, "relative error of p, q")
        }
        _ => skipped("closed_form", t, "no closed form for this pair"),
    });
    out
}

pub fn run_checks(run: &Run) -> CliResult<Vec<Check>> {
    let tol = run.cfg.tolerances;
    let opts = run.pricing();
    let k_grid = run.cfg.grids.k.points();
    let x_grid = run.cfg.grids.x.points();
    let (kmin, kmax) = (k_grid[0], k_grid[k_grid.len() - 1]);
    let strikes: Vec<f64> = ALPHA_STRIKES.iter().copied().filter(|k| (kmin..=kmax).contains(k)).collect();
    let per = run.per_maturity(|t| {
        let model = run.spec.build(t)?;
        let m: &dyn ModelCgf = &model;
        let mut checks = vec![
            martingale(m, t, tol.martingale),
            alpha_independence(m, t, &strikes, &opts, tol.alpha_independence),
            round_trip(m, t, &k_grid, &opts, tol.round_trip),
            chebyshev(m, t, &x_grid, &opts, tol.chebyshev_slack),
            chebyshev_left(m, t, &x_grid, &opts, tol.chebyshev_slack),
            monotonicity(m, t, &k_grid, &x_grid, &opts, tol.monotonicity_slack),
        ];
        checks.extend(composed_checks(run, m, t));
        Ok(checks)
    })?;
    Ok(per.into_iter().flatten().collect())
}

fn chebyshev_left(model: &dyn ModelCgf, t: f64, grid: &[f64], opts: &PricingOptions, slack: f64) -> Check {
    let mut c = chebyshev(&Reflected(model), t, grid, opts, slack);
    c.name = "chebyshev_left";
    c
}

pub fn cmd_verify(run: &Run) -> CliResult<(Vec<Check>, Outcome)> {
    let checks = run_checks(run)?;
    let mut text = String::new();
    let _ = writeln!(text, "verify {} ({})", run.spec.label, run.spec.parameters);
    for c in &checks {
        let _ = writeln!(text, "{} {:<18} t={:<6} {}", c.status, c.name, c.t, c.detail);
    }
    let failures = checks.iter().filter(|c| c.status == Status::Fail).count();
    let _ = writeln!(text, "{} checks, {failures} failed", checks.len());
    Ok((
        checks,
        Outcome {
            files: Vec::new(),
            text,
            passed: failures == 0,
        },
    ))
}
