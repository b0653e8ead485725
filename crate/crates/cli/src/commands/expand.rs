use chaoslab::chaos::{expand_product, moment_oracle, wick_eval_at, ORACLE_MAX_DEGREE};
use chaoslab::rng::{gaussian_vec, stream};
use chaoslab::Tensor;
use serde::Serialize;

use super::write_summary;
use crate::config::{ExpandFixture, ExperimentConfig};
use crate::output::OutDir;
use crate::Failure;

#[derive(Serialize)]
struct PairStats {
    /// `E[XY] / √(E X² E Y²)`.
    correlation: f64,
    /// `E[(X² − E X²)(Y² − E Y²)]`.
    square_covariance: f64,
}

#[derive(Serialize)]
struct Results {
    orders: Vec<usize>,
    dim: usize,
    degrees: Vec<usize>,
    mean: f64,
    oracle_mean: f64,
    mean_residual: f64,
    points: usize,
    pointwise_residual: f64,
    tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pair: Option<PairStats>,
}

fn counterexample() -> chaoslab::Result<Vec<Tensor>> {
    let e1 = [1.0, 0.0];
    let e2 = [0.0, 1.0];
    Ok(vec![
        Tensor::elementary(&[&e1, &e1])?.scaled(1.0 / 2f64.sqrt()),
        Tensor::elementary(&[&e1, &e2])?.symmetrize(),
    ])
}

fn load(cfg: &ExperimentConfig) -> Result<Vec<Tensor>, Failure> {
    let c = &cfg.expand;
    let sources = c.fixture.is_some() as usize + c.tensors_file.is_some() as usize + !c.tensors.is_empty() as usize;
    if sources != 1 {
        return Err(Failure::Config(
            "expand needs exactly one of fixture, tensors_file or tensors".into(),
        ));
    }
    if let Some(ExpandFixture::Counterexample) = c.fixture {
        return Ok(counterexample()?);
    }
    if let Some(p) = &c.tensors_file {
        let text = std::fs::read_to_string(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?;
        return serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", p.display())));
    }
    Ok(c.tensors.clone())
}

fn pair_stats(x: &Tensor, y: &Tensor) -> chaoslab::Result<Option<PairStats>> {
    if 2 * (x.order() + y.order()) > ORACLE_MAX_DEGREE {
        return Ok(None);
    }
    let xx = moment_oracle(&[x, x])?;
    let yy = moment_oracle(&[y, y])?;
    let xy = moment_oracle(&[x, y])?;
    let xxyy = moment_oracle(&[x, x, y, y])?;
    Ok(Some(PairStats {
        correlation: if xx > 0.0 && yy > 0.0 { xy / (xx * yy).sqrt() } else { 0.0 },
        square_covariance: xxyy - xx * yy,
    }))
}

pub fn run(cfg: &ExperimentConfig, out: &mut OutDir) -> Result<bool, Failure> {
    let c = &cfg.expand;
    let tensors = load(cfg)?;
    let refs: Vec<&Tensor> = tensors.iter().collect();
    let expansion = expand_product(&refs, c.cap)?;
    let oracle = moment_oracle(&refs)?;
    let mean_residual = (expansion.mean() - oracle).abs() / oracle.abs().max(1.0);
    let mut pointwise = 0.0f64;
    for i in 0..c.points {
        let xi = gaussian_vec(&mut stream(cfg.seed, i as u64), expansion.dim);
        let lhs = refs.iter().map(|t| wick_eval_at(t, &xi)).product::<chaoslab::Result<f64>>()?;
        let rhs = expansion.eval(&xi)?;
        pointwise = pointwise.max((lhs - rhs).abs() / lhs.abs().max(1.0));
    }
    let pair = match tensors.as_slice() {
        [x, y] => pair_stats(x, y)?,
        _ => None,
    };
    let pass = mean_residual <= c.tolerance && pointwise <= c.tolerance;
    out.json("expansion.json", &expansion)?;
    let results = Results {
        orders: expansion.lengths.clone(),
        dim: expansion.dim,
        degrees: expansion.terms.keys().copied().collect(),
        mean: expansion.mean(),
        oracle_mean: oracle,
        mean_residual,
        points: c.points,
        pointwise_residual: pointwise,
        tolerance: c.tolerance,
        pair,
    };
    write_summary(out, "expand", cfg, pass, results)?;
    Ok(pass)
}
