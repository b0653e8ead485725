pub mod expand;
pub mod fuzz;
pub mod report;
pub mod simulate;
pub mod verify;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::output::OutDir;
use crate::Failure;

/// Top-level JSON of a run: the resolved config next to the results.
#[derive(Serialize)]
struct Summary<'a, R: Serialize> {
    command: &'static str,
    pass: bool,
    config: &'a ExperimentConfig,
    results: R,
}

fn write_summary<R: Serialize>(
    out: &mut OutDir,
    command: &'static str,
    cfg: &ExperimentConfig,
    pass: bool,
    results: R,
) -> Result<(), Failure> {
    out.json(
        &format!("{command}.json"),
        &Summary {
            command,
            pass,
            config: cfg,
            results,
        },
    )
}
