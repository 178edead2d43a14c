use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal};
use rayon::prelude::*;
use smilewing_core::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn black_scholes_calls_from_bm_drift() {
    for t in desk::MATURITIES {
        let m = desk::levy_at(make_bm_drift(), t).unwrap();
        for i in 0..=40 {
            let k = -2.0 + 0.1 * i as f64;
            let got = call_price(&m, k).unwrap();
            let want = bs_call(k, t.sqrt()).unwrap();
            assert!((got - want).abs() < 1e-8, "t={t} k={k}: {got} vs {want}");
        }
    }
}

#[test]
fn gaussian_tail_from_bm_drift() {
    for t in desk::MATURITIES {
        let m = desk::levy_at(make_bm_drift(), t).unwrap();
        for i in 0..=40 {
            let x = 8.0 * t.sqrt() * i as f64 / 40.0;
            let got = survival(&m, x).unwrap();
            let want = norm_cdf((-x - 0.5 * t) / t.sqrt());
            assert!((got - want).abs() < 1e-8, "t={t} x={x}: {got} vs {want}");
        }
    }
}

// Reference values from the gamma-mixture representation of the VG law,
// integrated in 30-digit arithmetic.
#[test]
fn vg_tail_and_call_references() {
    let m = desk::vg(1.0).unwrap();
    for (x, want) in [
        (0.6, 0.0027531523108991704188),
        (1.5, 5.0243873180949454019e-7),
        (3.0, 2.1201236494124757792e-13),
    ] {
        let got = survival(&m, x).unwrap();
        assert!(rel(got, want) < 1e-9, "F({x}) = {got}, want {want}");
    }
    for (x, want) in [(0.6, 0.008492063971154481776), (2.0, 1.9111006992582779364e-7)] {
        let got = distribution(&m, -x).unwrap();
        assert!(rel(got, want) < 1e-9, "F(-{x}) = {got}, want {want}");
    }
    for (k, want) in [
        (0.0, 0.071080519893184067845),
        (0.5, 0.0013777115242314258591),
        (2.0, 3.249816625092931139e-9),
    ] {
        let got = call_price(&m, k).unwrap();
        assert!(rel(got, want) < 1e-9, "c({k}) = {got}, want {want}");
    }
}

#[test]
fn vg_tail_monte_carlo() {
    let p = desk::VG;
    let t = 1.0;
    let m = desk::vg(t).unwrap();
    let x = 0.6;
    let inverted = survival(&m, x).unwrap();

    // X = θΓ + σW(Γ) with Γ ~ Gamma(Ct, 1), then the martingale drift
    let sigma = (2.0 / (p.g * p.m)).sqrt();
    let theta = 1.0 / p.m - 1.0 / p.g;
    let drift = m.drift();
    let chunks = 16u64;
    let per_chunk = 625_000u64;
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed + seed);
            let gamma = Gamma::new(p.c * t, 1.0).unwrap();
            let normal = Normal::new(0.0, 1.0).unwrap();
            (0..per_chunk)
                .filter(|_| {
                    let g: f64 = gamma.sample(&mut rng);
                    let z: f64 = normal.sample(&mut rng);
                    theta * g + sigma * g.sqrt() * z + drift > x
                })
                .count() as u64
        })
        .sum();
    let n = (chunks * per_chunk) as f64;
    let est = hits as f64 / n;
    let se = (est * (1.0 - est) / n).sqrt();
    assert!(
        (est - inverted).abs() < 3.0 * se,
        "Monte Carlo {est} ± {se}, inverted {inverted}"
    );
}

#[test]
fn heston_at_zero_correlation_is_bm_over_cir() {
    for c in desk::CIR_SETS {
        let h = HestonParams {
            kappa: c.kappa,
            eta: c.eta,
            theta: c.lambda,
            rho: 0.0,
            v0: c.y0,
        };
        let clock = make_cir(c).unwrap();
        for t in desk::MATURITIES {
            let p_h = heston_critical_moment(h, t).unwrap();
            let p_c = right_critical_moment(&make_bm_drift(), &clock, t).unwrap().p();
            assert!((p_h - p_c).abs() < 1e-8 * p_c.max(1.0), "{c:?} t={t}: {p_h} vs {p_c}");

            let comp = compose(std::sync::Arc::new(make_bm_drift()), clock, t).unwrap();
            let strip = comp.strip();
            for j in 0..50 {
                let re = strip.lower + (strip.upper - strip.lower) * (0.02 + 0.96 * ((j * 7) % 50) as f64 / 49.0);
                let im = -40.0 + 80.0 * j as f64 / 49.0;
                let u = Complex64::new(re, im);
                let a = heston_cgf(h, t, u).unwrap();
                let b = comp.cgf(u).unwrap();
                assert!((a - b).norm() < 1e-9 * (1.0 + b.norm()), "u={u}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn vg_gamma_ou_solver_matches_closed_form() {
    let mut n = 0;
    for m in [8.0, 16.026] {
        for g in [5.0, 9.6443] {
            for c in [1.0, 6.161] {
                for lambda in [0.5, 1.679] {
                    for b in [0.7664, 3.0] {
                        for t in [0.4, 1.3] {
                            let vg = VgParams { m, g, c };
                            let gou = GammaOuParams {
                                lambda,
                                a: 0.3484,
                                b,
                                y0: 1.0,
                            };
                            let (p, q) = vg_gamma_ou_critical_moments(vg, gou, t);
                            let clock = make_gamma_ou(gou).unwrap();
                            let base = make_vg(vg).unwrap();
                            let r = right_critical_moment(&base, &clock, t).unwrap().p();
                            let l = left_critical_moment(&base, &clock, t).unwrap().p();
                            assert!((r - p).abs() < 1e-10 * p.max(1.0), "{vg:?} {gou:?} t={t}: {r} vs {p}");
                            assert!((l - q).abs() < 1e-10 * q.max(1.0), "{vg:?} {gou:?} t={t}: {l} vs {q}");
                            n += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(n >= 64);
}
