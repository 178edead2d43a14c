//! Desk-scale parameter sets used by tests, benchmarks and example configs.

use std::sync::Arc;

use crate::clocks::{make_cir, make_gamma_ou, CirParams, GammaOuParams};
use crate::error::Result;
use crate::levy::{make_de, make_nig, make_vg, DeParams, LevyMarginal, NigParams, VgParams};
use crate::model::{Normalized, SharedCgf};
use crate::time_change::{compose, ComposedModel, HestonParams};

pub const MATURITIES: [f64; 3] = [0.4, 0.9, 1.3];

pub const VG: VgParams = VgParams { m: 10.0, g: 8.0, c: 1.5 };

pub const DE: DeParams = DeParams {
    sigma: 0.2,
    mu: 0.0,
    lambda: 1.0,
    p: 0.4,
    eta1: 10.0,
    eta2: 5.0,
};

pub const NIG: NigParams = NigParams {
    alpha: 8.0,
    beta: -3.0,
    mu: 0.0,
    delta: 0.8,
};

/// NIG base for the CIR time change; the clock explodes first.
pub const NIG_BASE: NigParams = NigParams {
    alpha: 16.1975,
    beta: -3.1804,
    mu: 0.0,
    delta: 1.0867,
};

/// VG base for the Gamma-OU time change.
pub const VG_BASE: VgParams = VgParams {
    m: 16.026,
    g: 9.6443,
    c: 6.161,
};

pub const GAMMA_OU: GammaOuParams = GammaOuParams {
    lambda: 1.679,
    a: 0.3484,
    b: 0.7664,
    y0: 1.0,
};

pub const CIR: CirParams = CirParams {
    kappa: 1.2101,
    eta: 0.5507,
    lambda: 1.7864,
    y0: 1.0,
};

/// Further CIR sets, slow and fast mean reversion.
pub const CIR_SETS: [CirParams; 3] = [
    CIR,
    CirParams {
        kappa: 0.3,
        eta: 0.09,
        lambda: 0.5,
        y0: 0.04,
    },
    CirParams {
        kappa: 4.0,
        eta: 0.04,
        lambda: 0.8,
        y0: 0.06,
    },
];

pub const HESTON: HestonParams = HestonParams {
    kappa: 0.6067,
    eta: 0.0707,
    theta: 0.2928,
    rho: -0.7571,
    v0: 0.0654,
};

/// Martingale-normalized Lévy marginal at horizon `t`.
pub fn levy_at(levy: crate::levy::LevyModel, t: f64) -> Result<Normalized<LevyMarginal>> {
    Normalized::new(LevyMarginal::new(levy, t)?)
}

pub fn vg(t: f64) -> Result<Normalized<LevyMarginal>> {
    levy_at(make_vg(VG)?, t)
}

pub fn de(t: f64) -> Result<Normalized<LevyMarginal>> {
    levy_at(make_de(DE)?, t)
}

pub fn nig(t: f64) -> Result<Normalized<LevyMarginal>> {
    levy_at(make_nig(NIG)?, t)
}

pub fn vg_gamma_ou(t: f64) -> Result<Normalized<ComposedModel>> {
    let base: SharedCgf = Arc::new(make_vg(VG_BASE)?);
    Normalized::new(compose(base, make_gamma_ou(GAMMA_OU)?, t)?)
}

pub fn nig_cir(t: f64) -> Result<Normalized<ComposedModel>> {
    let base: SharedCgf = Arc::new(make_nig(NIG_BASE)?);
    Normalized::new(compose(base, make_cir(CIR)?, t)?)
}
