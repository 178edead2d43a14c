use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use smilewing_core::*;

fn slopes(c: &mut Criterion) {
    c.bench_function("psi", |b| b.iter(|| psi(black_box(8.5)).unwrap()));
    c.bench_function("implied_total_vol_otm", |b| {
        let p = bs_otm(1.5, 0.4).unwrap();
        b.iter(|| implied_total_vol_otm(black_box(1.5), black_box(p)).unwrap())
    });
}

fn cgf(c: &mut Criterion) {
    let u = Complex64::new(0.5, 12.0);
    let vg = desk::vg(1.0).unwrap();
    let composed = desk::vg_gamma_ou(1.0).unwrap();
    let heston = HestonModel::new(desk::HESTON, 1.0).unwrap();
    c.bench_function("cgf/vg", |b| b.iter(|| vg.cgf(black_box(u)).unwrap()));
    c.bench_function("cgf/vg_gamma_ou", |b| b.iter(|| composed.cgf(black_box(u)).unwrap()));
    c.bench_function("cgf/heston", |b| b.iter(|| heston.cgf(black_box(u)).unwrap()));
}

fn pricing(c: &mut Criterion) {
    let vg = desk::vg(1.0).unwrap();
    let de = desk::de(1.0).unwrap();
    c.bench_function("call_price/vg_atm", |b| b.iter(|| call_price(&vg, black_box(0.0)).unwrap()));
    c.bench_function("call_price/vg_wing", |b| b.iter(|| call_price(&vg, black_box(3.0)).unwrap()));
    c.bench_function("log_survival/de_deep", |b| {
        let opts = PricingOptions::default();
        b.iter(|| log_survival_with(&de, black_box(1024.0), &opts).unwrap())
    });
    let grid: Vec<f64> = (0..=60).map(|i| -3.0 + 0.1 * i as f64).collect();
    let mut g = c.benchmark_group("smile_curve");
    g.sample_size(20);
    g.bench_function("vg_61_strikes", |b| b.iter(|| smile_curve(&vg, 1.0, black_box(&grid)).unwrap()));
    g.finish();
}

criterion_group!(benches, slopes, cgf, pricing);
criterion_main!(benches);
