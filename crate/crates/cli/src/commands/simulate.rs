use chaoslab::kernels::Simulator;
use chaoslab::regularity::PathSample;
use serde::Serialize;

use super::write_summary;
use crate::config::ExperimentConfig;
use crate::output::{num, OutDir};
use crate::Failure;

#[derive(Serialize)]
struct PathFile {
    file: String,
    seed: u64,
    stream: u64,
    terminal: f64,
}

#[derive(Serialize)]
struct Results {
    source: String,
    alpha: f64,
    n: usize,
    steps: usize,
    paths: Vec<PathFile>,
}

pub fn path_rows(path: &PathSample) -> Vec<Vec<String>> {
    path.times().into_iter().zip(path.values()).map(|(t, v)| vec![num(t), num(*v)]).collect()
}

pub fn run(cfg: &ExperimentConfig, out: &mut OutDir) -> Result<bool, Failure> {
    let c = &cfg.simulate;
    if c.paths == 0 {
        return Err(Failure::Config("simulate needs at least one path".into()));
    }
    let spec = c.kernel.spec()?;
    c.grid.validate()?;
    let sim = Simulator::new(&spec, &c.grid)?;
    let paths = sim.paths(cfg.seed, c.first_stream, c.paths)?;
    let mut files = Vec::with_capacity(paths.len());
    for p in &paths {
        let name = format!("paths/path_{:05}.csv", p.provenance.stream);
        out.csv(&name, &["t", "value"], &path_rows(p))?;
        files.push(PathFile {
            file: name,
            seed: p.provenance.seed,
            stream: p.provenance.stream,
            terminal: *p.values().last().expect("nonempty path"),
        });
    }
    let results = Results {
        source: sim.source().to_string(),
        alpha: spec.alpha(),
        n: spec.n(),
        steps: c.grid.m,
        paths: files,
    };
    write_summary(out, "simulate", cfg, true, results)?;
    Ok(true)
}
