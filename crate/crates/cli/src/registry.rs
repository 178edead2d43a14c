//! Names accepted in `[model]` and `[clock]`, and construction of the
//! normalized model at each maturity.

use std::collections::BTreeMap;
use std::sync::Arc;

use smilewing_core::{
    compose, make_bm_drift, make_cir, make_de, make_deterministic, make_gamma_ou, make_nig, make_vg, CirParams, ClockCgf,
    DeParams, GammaOuParams, HestonModel, HestonParams, LevyMarginal, LevyModel, ModelCgf, NigParams, Normalized, SharedCgf,
    VgParams,
};

use crate::config::{NamedParams, RunConfig};
use crate::error::{CliError, CliResult};

/// Model names with their parameter names.
pub const MODELS: &[(&str, &[&str])] = &[
    ("bm", &[]),
    ("vg", &["m", "g", "c"]),
    ("nig", &["alpha", "beta", "mu", "delta"]),
    ("de", &["sigma", "mu", "lambda", "p", "eta1", "eta2"]),
    ("heston", &["kappa", "eta", "theta", "rho", "v0"]),
];

pub const CLOCKS: &[(&str, &[&str])] = &[
    ("gamma_ou", &["lambda", "a", "b", "y0"]),
    ("cir", &["kappa", "eta", "lambda", "y0"]),
    ("deterministic", &["rate"]),
];

fn registry_listing(reg: &[(&str, &[&str])]) -> String {
    reg.iter()
        .map(|(n, p)| format!("{n}({})", p.join(", ")))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Parameters in registry order, rejecting missing and unknown names.
fn take<const N: usize>(section: &str, spec: &NamedParams, reg: &[(&str, &[&str])]) -> CliResult<[f64; N]> {
    let Some((_, names)) = reg.iter().find(|(n, _)| *n == spec.name) else {
        return Err(CliError::config(format!(
            "unknown {section} '{}'; registry: {}",
            spec.name,
            registry_listing(reg)
        )));
    };
    if let Some(extra) = spec.params.keys().find(|k| !names.contains(&k.as_str())) {
        return Err(CliError::config(format!(
            "{section} '{}' has no parameter '{extra}'; expected {}",
            spec.name,
            names.join(", ")
        )));
    }
    let mut out = [0.0; N];
    for (slot, name) in out.iter_mut().zip(names.iter()) {
        *slot = *spec.params.get(*name).ok_or_else(|| {
            CliError::config(format!("{section} '{}' is missing parameter '{name}'", spec.name))
        })?;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseSpec {
    Levy(LevyModel),
    Heston(HestonParams),
}

/// Validated model description.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub base: BaseSpec,
    pub clock: Option<ClockCgf>,
    /// `name` of the model, joined with the clock's.
    pub label: String,
    /// `key=value` pairs of all parameters, sorted.
    pub parameters: String,
}

fn invalid(e: smilewing_core::Error) -> CliError {
    CliError::config(e.to_string())
}

fn parameters(spec: &NamedParams, prefix: &str, out: &mut Vec<String>) {
    let sorted: BTreeMap<_, _> = spec.params.iter().collect();
    for (k, v) in sorted {
        out.push(format!("{prefix}{k}={v:.16e}"));
    }
}

impl ModelSpec {
    pub fn from_config(cfg: &RunConfig) -> CliResult<Self> {
        let m = &cfg.model;
        let base = match m.name.as_str() {
            "bm" => {
                take::<0>("model", m, MODELS)?;
                BaseSpec::Levy(make_bm_drift())
            }
            "vg" => {
                let [m_, g, c] = take("model", m, MODELS)?;
                BaseSpec::Levy(make_vg(VgParams { m: m_, g, c }).map_err(invalid)?)
            }
            "nig" => {
                let [alpha, beta, mu, delta] = take("model", m, MODELS)?;
                BaseSpec::Levy(make_nig(NigParams { alpha, beta, mu, delta }).map_err(invalid)?)
            }
            "de" => {
                let [sigma, mu, lambda, p, eta1, eta2] = take("model", m, MODELS)?;
                BaseSpec::Levy(
                    make_de(DeParams {
                        sigma,
                        mu,
                        lambda,
                        p,
                        eta1,
                        eta2,
                    })
                    .map_err(invalid)?,
                )
            }
            "heston" => {
                let [kappa, eta, theta, rho, v0] = take("model", m, MODELS)?;
                let p = HestonParams {
                    kappa,
                    eta,
                    theta,
                    rho,
                    v0,
                };
                p.validate().map_err(invalid)?;
                BaseSpec::Heston(p)
            }
            _ => {
                take::<0>("model", m, MODELS)?;
                unreachable!("registry lookup rejects unknown names")
            }
        };
        let clock = match &cfg.clock {
            None => None,
            Some(c) => Some(match c.name.as_str() {
                "gamma_ou" => {
                    let [lambda, a, b, y0] = take("clock", c, CLOCKS)?;
                    make_gamma_ou(GammaOuParams { lambda, a, b, y0 }).map_err(invalid)?
                }
                "cir" => {
                    let [kappa, eta, lambda, y0] = take("clock", c, CLOCKS)?;
                    make_cir(CirParams { kappa, eta, lambda, y0 }).map_err(invalid)?
                }
                "deterministic" => {
                    let [rate] = take("clock", c, CLOCKS)?;
                    make_deterministic(rate).map_err(invalid)?
                }
                _ => {
                    take::<0>("clock", c, CLOCKS)?;
                    unreachable!("registry lookup rejects unknown names")
                }
            }),
        };
        if let BaseSpec::Levy(l) = base {
            let r = l.strip().upper;
            if !(r > 1.0) {
                return Err(CliError::config(format!(
                    "{}: r* = {r} <= 1, E[e^X] is infinite and the model cannot be martingale-normalized",
                    m.name
                )));
            }
        }
        if matches!(base, BaseSpec::Heston(_)) && clock.is_some() {
            return Err(CliError::config("heston carries its own variance clock; remove [clock]"));
        }
        let mut label = m.name.clone();
        let mut params = Vec::new();
        parameters(m, "", &mut params);
        if let Some(c) = &cfg.clock {
            label = format!("{label} o {}", c.name);
            parameters(c, "clock.", &mut params);
        }
        Ok(ModelSpec {
            base,
            clock,
            label,
            parameters: params.join(" "),
        })
    }

    pub fn levy(&self) -> Option<LevyModel> {
        match self.base {
            BaseSpec::Levy(l) => Some(l),
            BaseSpec::Heston(_) => None,
        }
    }

    /// Martingale-normalized law of the log-return at horizon `t`.
    pub fn build(&self, t: f64) -> CliResult<SharedCgf> {
        let op = format!("model construction at t={t}");
        let model: SharedCgf = match (self.base, self.clock) {
            (BaseSpec::Heston(p), _) => Arc::new(HestonModel::new(p, t).map_err(|e| CliError::numerical(&op, e))?),
            (BaseSpec::Levy(l), None) => Arc::new(
                Normalized::new(LevyMarginal::new(l, t).map_err(|e| CliError::numerical(&op, e))?)
                    .map_err(|e| CliError::numerical(&op, e))?,
            ),
            (BaseSpec::Levy(l), Some(c)) => Arc::new(
                Normalized::new(compose(Arc::new(l), c, t).map_err(|e| CliError::numerical(&op, e))?)
                    .map_err(|e| CliError::numerical(&op, e))?,
            ),
        };
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> CliResult<RunConfig> {
        RunConfig::from_toml(text)
    }

    #[test]
    fn unknown_model_lists_registry() {
        let e = cfg("maturities = [1.0]\n[model]\nname = \"cgmy\"\n").unwrap_err();
        let msg = e.to_string();
        assert_eq!(e.exit_code(), 2);
        for (name, _) in MODELS {
            assert!(msg.contains(name), "{msg}");
        }
    }

    #[test]
    fn missing_and_extra_parameters() {
        let e = cfg("maturities = [1.0]\n[model]\nname = \"vg\"\nparams = { m = 10.0, g = 8.0 }\n").unwrap_err();
        assert!(e.to_string().contains("'c'"));
        let e = cfg("maturities = [1.0]\n[model]\nname = \"vg\"\nparams = { m = 10.0, g = 8.0, c = 1.0, d = 2.0 }\n")
            .unwrap_err();
        assert!(e.to_string().contains("'d'"));
    }

    #[test]
    fn invalid_values_are_config_errors() {
        let e = cfg("maturities = [1.0]\n[model]\nname = \"vg\"\nparams = { m = -1.0, g = 8.0, c = 1.0 }\n").unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = cfg("maturities = [1.0]\n[model]\nname = \"vg\"\nparams = { m = 1.0, g = 8.0, c = 1.0 }\n").unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("r* = 1"), "{e}");
    }

    #[test]
    fn heston_rejects_clock() {
        let text = "maturities = [1.0]\n[model]\nname = \"heston\"\nparams = { kappa = 1.0, eta = 0.04, theta = 0.3, rho = -0.5, v0 = 0.04 }\n[clock]\nname = \"deterministic\"\nparams = { rate = 1.0 }\n";
        assert!(cfg(text).is_err());
    }

    #[test]
    fn label_and_parameters() {
        let c = cfg("maturities = [1.0]\n[model]\nname = \"vg\"\nparams = { m = 10.0, g = 8.0, c = 1.5 }\n[clock]\nname = \"deterministic\"\nparams = { rate = 2.0 }\n").unwrap();
        let s = ModelSpec::from_config(&c).unwrap();
        assert_eq!(s.label, "vg o deterministic");
        assert_eq!(
            s.parameters,
            "c=1.5000000000000000e0 g=8.0000000000000000e0 m=1.0000000000000000e1 clock.rate=2.0000000000000000e0"
        );
    }
}
