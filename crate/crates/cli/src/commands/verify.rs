use chaoslab::kernels::{
    verify_g1, verify_g2, verify_g4, DiscretizedFamily, G1Report, G2Report, G4Report, KernelFamily, ZeroKernel,
};
use serde::Serialize;

use super::write_summary;
use crate::config::{Condition, ExperimentConfig, Kernel, KernelConfig};
use crate::output::{num, OutDir};
use crate::Failure;

#[derive(Serialize)]
struct KernelResult {
    kernel: KernelConfig,
    label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    g1: Option<G1Report>,
    #[serde(skip_serializing_if = "Option::is_none")]
    g2: Option<G2Report>,
    #[serde(skip_serializing_if = "Option::is_none")]
    g4: Option<G4Report>,
    pass: bool,
}

pub fn run(cfg: &ExperimentConfig, out: &mut OutDir) -> Result<bool, Failure> {
    let c = &cfg.verify;
    if c.kernels.is_empty() {
        return Err(Failure::Config("verify needs at least one kernel".into()));
    }
    c.grid.validate()?;
    let wants = |k| c.conditions.contains(&k);
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for kc in &c.kernels {
        let kernel = kc.resolve()?;
        let family: Box<dyn KernelFamily> = match &kernel {
            Kernel::Spec(spec) => Box::new(DiscretizedFamily::new(spec, &c.grid)?),
            Kernel::Zero { alpha, horizon } => Box::new(ZeroKernel {
                alpha: *alpha,
                horizon: *horizon,
                m: c.grid.m,
            }),
        };
        let label = family.label();
        let g1 = wants(Condition::G1).then(|| verify_g1(family.as_ref(), &c.sweep)).transpose()?;
        let g2 = wants(Condition::G2).then(|| verify_g2(family.as_ref(), &c.sweep)).transpose()?;
        // F vanishes for the zero kernel, so there is nothing to fit
        let g4 = match &kernel {
            Kernel::Spec(spec) if wants(Condition::G4) => Some(verify_g4(spec, &c.g4)?),
            _ => None,
        };
        if let Some(r) = &g1 {
            rows.push(vec![label.clone(), "g1".into(), "kappa".into(), num(r.kappa), num(r.drift), r.pass.to_string()]);
        }
        if let Some(r) = &g2 {
            rows.push(vec![
                label.clone(),
                "g2".into(),
                "kappa_prime".into(),
                num(r.kappa_prime),
                num(r.drift),
                r.pass.to_string(),
            ]);
        }
        if let Some(r) = &g4 {
            rows.push(vec![label.clone(), "g4".into(), "epsilon".into(), num(r.epsilon), String::new(), r.pass.to_string()]);
        }
        let pass = g1.as_ref().is_none_or(|r| r.pass)
            && g2.as_ref().is_none_or(|r| r.pass)
            && g4.as_ref().is_none_or(|r| r.pass);
        results.push(KernelResult {
            kernel: *kc,
            label,
            g1,
            g2,
            g4,
            pass,
        });
    }
    let pass = results.iter().all(|r| r.pass);
    out.csv("verify.csv", &["kernel", "condition", "statistic", "value", "drift", "pass"], &rows)?;
    write_summary(out, "verify", cfg, pass, results)?;
    Ok(pass)
}
