use std::path::Path;

use chaoslab::kernels::Simulator;
use chaoslab::regularity::{
    dyadic_besov_seminorm, increment_lp_norm, modulus_refinement, moment_growth_check, theta_slope_fit, IncrementNorm,
    MomentGrowthReport, OrliczFunction, PathSample, RefinementStudy, SlopeFit, QUANTILES,
};
use serde::Serialize;

use super::write_summary;
use crate::config::{ExperimentConfig, PathSource};
use crate::output::{num, OutDir};
use crate::Failure;

#[derive(Serialize)]
struct SlopeResult {
    fit: SlopeFit,
    target: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct BesovSummary {
    s: f64,
    norm: IncrementNorm,
    mean_value: f64,
    mean_growth_slope: f64,
}

#[derive(Serialize)]
struct ModulusResult {
    log_exponent: f64,
    study: RefinementStudy,
    max_growth: f64,
    pass: bool,
}

#[derive(Serialize)]
struct Results {
    paths: usize,
    steps: usize,
    alpha: f64,
    n: usize,
    slope: SlopeResult,
    besov: BesovSummary,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    growth: Vec<MomentGrowthReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    modulus: Option<ModulusResult>,
}

fn read_path(file: &Path) -> Result<PathSample, Failure> {
    let bad = |m: String| Failure::Config(format!("{}: {m}", file.display()));
    let mut r = csv::Reader::from_path(file).map_err(|e| bad(e.to_string()))?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let field = |i: usize| -> Result<f64, Failure> {
            rec.get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| bad(format!("malformed row {rec:?}")))
        };
        times.push(field(0)?);
        values.push(field(1)?);
    }
    let m = times.len().saturating_sub(1);
    let horizon = times.last().copied().unwrap_or(0.0);
    let uniform = m > 0
        && times[0].abs() <= 1e-12 * horizon
        && times.iter().enumerate().all(|(k, t)| (t - horizon * k as f64 / m as f64).abs() <= 1e-9 * horizon);
    if !uniform {
        return Err(bad("times must start at 0 and be equally spaced".into()));
    }
    PathSample::new(horizon, values).map_err(|e| bad(e.to_string()))
}

/// Paths, target exponent and chaos order.
fn load(cfg: &ExperimentConfig) -> Result<(Vec<PathSample>, f64, usize), Failure> {
    let c = &cfg.report;
    let (paths, alpha, n) = match &c.source {
        PathSource::Simulate { kernel, grid, paths } => {
            if *paths == 0 {
                return Err(Failure::Config("report needs at least one path".into()));
            }
            let spec = kernel.spec()?;
            grid.validate()?;
            let sim = Simulator::new(&spec, grid)?;
            (sim.paths(cfg.seed, 0, *paths)?, Some(spec.alpha()), spec.n())
        }
        PathSource::Files { files } => {
            if files.is_empty() {
                return Err(Failure::Config("report needs at least one path file".into()));
            }
            (files.iter().map(|f| read_path(f)).collect::<Result<_, _>>()?, None, 1)
        }
        PathSource::Linear { m, horizon } => (vec![PathSample::from_fn(*horizon, *m, |t| t)?], Some(1.0), 1),
    };
    let alpha = c
        .alpha
        .or(alpha)
        .ok_or_else(|| Failure::Config("report.alpha is required for loaded paths".into()))?;
    if paths.iter().any(|p| p.steps() != paths[0].steps() || p.horizon() != paths[0].horizon()) {
        return Err(Failure::Config("all paths must share one grid".into()));
    }
    Ok((paths, alpha, n))
}

pub fn run(cfg: &ExperimentConfig, out: &mut OutDir) -> Result<bool, Failure> {
    let c = &cfg.report;
    let (paths, alpha, n) = load(cfg)?;
    let horizon = paths[0].horizon();

    let fit = theta_slope_fit(&paths, c.p, c.levels.map(|(a, b)| a..=b))?;
    let rows: Vec<Vec<String>> = fit.slopes.iter().enumerate().map(|(i, s)| vec![i.to_string(), num(*s)]).collect();
    out.csv("slopes.csv", &["path", "slope"], &rows)?;
    let mut level_rows = Vec::new();
    for &j in &fit.levels {
        let delta = horizon * 0.5f64.powi(j as i32);
        let mut mean = 0.0;
        for p in &paths {
            mean += increment_lp_norm(p, delta, c.p)?;
        }
        level_rows.push(vec![j.to_string(), num(delta), num(mean / paths.len() as f64)]);
    }
    out.csv("levels.csv", &["j", "delta", "mean_norm"], &level_rows)?;
    let slope_pass = (fit.mean - alpha).abs() <= c.slope_tolerance;
    let slope = SlopeResult {
        fit,
        target: alpha,
        tolerance: c.slope_tolerance,
        pass: slope_pass,
    };

    let s = c.besov_s.unwrap_or(alpha).min(1.0 - 1e-9);
    let norm = c.besov_norm.unwrap_or(IncrementNorm::Orlicz {
        beta: OrliczFunction::for_chaos(n).beta,
    });
    let mut besov_rows = Vec::new();
    let (mut value, mut growth_slope) = (0.0, 0.0);
    for (i, p) in paths.iter().enumerate() {
        let r = dyadic_besov_seminorm(p, s, norm)?;
        value += r.value;
        growth_slope += r.growth_slope();
        for l in &r.levels {
            besov_rows.push(vec![i.to_string(), l.j.to_string(), num(l.delta), num(l.norm), num(l.weighted)]);
        }
    }
    out.csv("besov.csv", &["path", "j", "delta", "norm", "weighted"], &besov_rows)?;
    let besov = BesovSummary {
        s,
        norm,
        mean_value: value / paths.len() as f64,
        mean_growth_slope: growth_slope / paths.len() as f64,
    };

    let mut growth = Vec::new();
    if let Some(g) = &c.growth {
        let deltas: Vec<f64> = g.levels.iter().map(|&j| horizon * 0.5f64.powi(j as i32)).collect();
        let mut q_rows = Vec::new();
        for &e in &g.ell_exponents {
            let r = moment_growth_check(&paths, &deltas, &g.ells, alpha, e)?;
            for cell in &r.cells {
                let mut row = vec![num(e), num(cell.ell), num(cell.delta)];
                row.extend(cell.quantiles.iter().map(|q| num(*q)));
                q_rows.push(row);
            }
            growth.push(r);
        }
        let names: Vec<String> = QUANTILES.iter().map(|q| format!("q{}", (q * 100.0).round())).collect();
        let mut header = vec!["ell_exponent", "ell", "delta"];
        header.extend(names.iter().map(String::as_str));
        out.csv("quantiles.csv", &header, &q_rows)?;
    }

    let modulus = match &c.modulus {
        Some(m) => {
            let e = m.log_exponent.unwrap_or(n as f64 / 2.0);
            let study = modulus_refinement(&paths, alpha, e, m.levels)?;
            let rows: Vec<Vec<String>> = study
                .steps
                .iter()
                .zip(&study.means)
                .map(|(s, v)| vec![s.to_string(), num(*v)])
                .collect();
            out.csv("modulus.csv", &["steps", "mean_statistic"], &rows)?;
            let pass = study.stable(m.max_growth);
            Some(ModulusResult {
                log_exponent: e,
                study,
                max_growth: m.max_growth,
                pass,
            })
        }
        None => None,
    };

    let pass = slope_pass && modulus.as_ref().is_none_or(|m| m.pass);
    let results = Results {
        paths: paths.len(),
        steps: paths[0].steps(),
        alpha,
        n,
        slope,
        besov,
        growth,
        modulus,
    };
    write_summary(out, "report", cfg, pass, results)?;
    Ok(pass)
}
