use smilewing_core::*;

fn k_grid() -> Vec<f64> {
    (0..=120).map(|i| -6.0 + 0.1 * i as f64).collect()
}

fn check_right_wing<M: ModelCgf>(model: &M, t: f64) -> WingComparison {
    let smile = smile_curve(model, t, &k_grid()).unwrap();
    let c = compare_wing(model, &smile, Side::Right, 0.2, &PricingOptions::default());
    let fit = c.fit_error().unwrap();
    let coherence = c.coherence_error().unwrap();
    println!(
        "{}: predicted {:?} fitted {:?} transferred {:?} k_max {:?}",
        model.name(),
        c.predicted,
        c.fit.as_ref().map(|f| f.fitted_slope),
        c.transferred,
        c.k_max
    );
    assert!(fit < 0.10, "{}: fit error {fit}", model.name());
    assert!(coherence < 0.15, "{}: coherence error {coherence}", model.name());
    c
}

#[test]
fn vg_right_wing() {
    let m = desk::vg(1.0).unwrap();
    let c = check_right_wing(&m, 1.0);
    assert_eq!(c.predicted, Some(psi(9.0).unwrap().value()));
}

#[test]
fn de_right_wing() {
    check_right_wing(&desk::de(1.0).unwrap(), 1.0);
}

#[test]
fn vg_gamma_ou_right_wing() {
    check_right_wing(&desk::vg_gamma_ou(1.0).unwrap(), 1.0);
}

#[test]
fn vg_left_wing_matches_psi_g() {
    let m = desk::vg(1.0).unwrap();
    let smile = smile_curve(&m, 1.0, &k_grid()).unwrap();
    let c = compare_wing(&m, &smile, Side::Left, 0.2, &PricingOptions::default());
    assert_eq!(c.predicted, Some(psi(8.0).unwrap().value()));
    assert!(c.fit_error().unwrap() < 0.10, "{c:?}");
}

#[test]
fn smiles_finite_on_central_strikes() {
    let grid: Vec<f64> = (0..=24).map(|i| -3.0 + 0.25 * i as f64).collect();
    let models: Vec<SharedCgf> = vec![
        std::sync::Arc::new(desk::vg(1.0).unwrap()),
        std::sync::Arc::new(desk::de(1.0).unwrap()),
        std::sync::Arc::new(desk::nig(1.0).unwrap()),
        std::sync::Arc::new(desk::vg_gamma_ou(1.0).unwrap()),
        std::sync::Arc::new(desk::nig_cir(1.0).unwrap()),
    ];
    for m in models {
        let s = smile_curve(&m, 1.0, &grid).unwrap();
        assert!(s.dropped.is_empty(), "{}: {:?}", m.name(), s.dropped);
        assert!(s.points.iter().all(|p| p.total_variance.is_finite() && p.total_variance > 0.0));
    }
}

#[test]
fn de_log_tail_ratio_reaches_jump_rates() {
    let m = desk::de(1.0).unwrap();
    let grid: Vec<f64> = (0..=10).map(|i| 2f64.powi(i)).collect();
    for (side, rate) in [(Side::Right, desk::DE.eta1), (Side::Left, desk::DE.eta2)] {
        let c = tail_slope_curve(&m, 1.0, &grid, side).unwrap();
        assert!(c.dropped.is_empty(), "{:?}", c.dropped);
        let last = c.points.last().unwrap().ratio;
        assert!((last / rate - 1.0).abs() < 0.03, "{side:?}: {last}");
    }
}

#[test]
fn log_tail_agrees_across_lines() {
    let m = desk::de(1.0).unwrap();
    let r = m.strip().r_star();
    for x in [50.0, 400.0] {
        let auto = log_survival_with(&m, x, &PricingOptions::default()).unwrap();
        // saddle K'(a) = x by bisection, then a line further inside
        let (mut lo, mut hi) = (0.5 * r, r * (1.0 - 1e-12));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if m.cgf_deriv(1, mid).unwrap() < x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let a = lo - 0.3 * (r - lo);
        let fixed = log_survival_with(
            &m,
            x,
            &PricingOptions {
                damping: Damping::Fixed(a),
                ..Default::default()
            },
        )
        .unwrap();
        assert!((auto - fixed).abs() < 1e-8 * auto.abs(), "x={x}: {auto} vs {fixed}");
    }
}

#[test]
fn vg_gamma_ou_tail_ratio_reaches_critical_moment() {
    for t in desk::MATURITIES {
        let m = desk::vg_gamma_ou(t).unwrap();
        let p = m.strip().r_star();
        let grid: Vec<f64> = (1..=12).map(|i| 25.0 * i as f64).collect();
        let c = tail_slope_curve(&m, t, &grid, Side::Right).unwrap();
        assert!(c.dropped.is_empty(), "{:?}", c.dropped);
        let last = c.points.last().unwrap().ratio;
        assert!((last / p - 1.0).abs() < 0.03, "t={t}: {last} vs {p}");
    }
}

#[test]
fn vg_left_tail_ratio_reaches_g() {
    let m = desk::vg(1.0).unwrap();
    let grid: Vec<f64> = (1..=12).map(|i| 25.0 * i as f64).collect();
    let c = tail_slope_curve(&m, 1.0, &grid, Side::Left).unwrap();
    let last = c.points.last().unwrap().ratio;
    assert!((last / desk::VG.g - 1.0).abs() < 0.03, "{last}");
}

#[test]
fn vg_gamma_ou_term_structure() {
    let mut ps = Vec::new();
    let mut slopes = Vec::new();
    for t in desk::MATURITIES {
        let m = desk::vg_gamma_ou(t).unwrap();
        ps.push(m.strip().r_star());
        let smile = smile_curve(&m, t, &k_grid()).unwrap();
        slopes.push(smile_wing_fit(&smile, Side::Right, 0.2).unwrap().fitted_slope);
    }
    assert!(ps.windows(2).all(|w| w[1] < w[0]), "{ps:?}");
    assert!(slopes.windows(2).all(|w| w[1] > w[0]), "{slopes:?}");
}
