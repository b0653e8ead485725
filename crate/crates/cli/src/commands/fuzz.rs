use chaoslab::fuzz::{
    fuzz_cardinality, fuzz_composition, fuzz_covariance, fuzz_expansion_mean, fuzz_expansion_pointwise,
    fuzz_inner_bound, fuzz_norm_bound, fuzz_permutation, FuzzSummary,
};

use super::write_summary;
use crate::config::ExperimentConfig;
use crate::output::OutDir;
use crate::Failure;

pub fn run(cfg: &ExperimentConfig, out: &mut OutDir) -> Result<bool, Failure> {
    let c = &cfg.fuzz;
    let lim = &c.limits;
    let seed = |k: u64| cfg.seed.wrapping_add(k);
    let summaries = vec![
        fuzz_expansion_mean(seed(0), c.expansion_instances, lim, c.identity_tolerance)?,
        fuzz_expansion_pointwise(seed(1), c.expansion_instances, c.points, lim, c.identity_tolerance)?,
        fuzz_norm_bound(seed(2), c.bound_instances, lim, c.slack_tolerance)?,
        fuzz_inner_bound(seed(3), c.bound_instances, lim, c.slack_tolerance)?,
        fuzz_composition(seed(4), c.relation_instances, lim, c.relation_tolerance)?,
        fuzz_permutation(seed(5), c.relation_instances, lim, c.relation_tolerance)?,
        fuzz_covariance(seed(6), c.covariance_instances, lim, c.relation_tolerance)?,
        fuzz_cardinality(seed(7), c.cardinality_unit_max, c.cardinality_instances, c.cardinality_max_total)?,
    ];
    let header: Vec<&str> = FuzzSummary::CSV_HEADER.split(',').collect();
    let rows: Vec<Vec<String>> = summaries
        .iter()
        .map(|s| s.csv_row().split(',').map(String::from).collect())
        .collect();
    out.csv("fuzz.csv", &header, &rows)?;
    let pass = summaries.iter().all(|s| s.pass);
    write_summary(out, "fuzz", cfg, pass, &summaries)?;
    Ok(pass)
}
