use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Map};

use crate::config::ExperimentConfig;
use crate::emit::format_number;
use crate::manifest::{write_artifact, RunManifest, FORMAT_VERSION};
use crate::run::{run_experiment, RunOutcome, EXIT_NOT_CONVERGED};
use crate::RunError;

pub const INDEX_FILE: &str = "index.csv";

pub fn run_dir_name(id: usize) -> String {
    format!("run_{id:03}")
}

/// Runs every combination into its own `run_NNN` directory and writes an
/// index mapping run ids to parameter values.
pub fn run_sweep(config: &ExperimentConfig, out: &Path) -> Result<RunOutcome, RunError> {
    let start = Instant::now();
    let combos = config.combinations();
    let outcomes: Vec<RunOutcome> = combos
        .par_iter()
        .enumerate()
        .map(|(id, c)| run_experiment(c, &out.join(run_dir_name(id))))
        .collect::<Result<_, _>>()?;

    let axes: Vec<_> = config.sweep_axes.iter().map(|(a, _)| *a).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["run".to_string(), "dir".to_string()];
    header.extend(axes.iter().map(|a| a.key().to_string()));
    header.extend(["converged".to_string(), "exit_code".to_string()]);
    w.write_record(&header).expect("in-memory write");
    for (id, (c, o)) in combos.iter().zip(&outcomes).enumerate() {
        let mut row = vec![id.to_string(), run_dir_name(id)];
        row.extend(axes.iter().map(|&a| format_number(c.axis_value(a))));
        row.extend([o.converged.to_string(), o.exit_code.to_string()]);
        w.write_record(&row).expect("in-memory write");
    }
    let index = write_artifact(out, INDEX_FILE, &w.into_inner().expect("in-memory write"))?;

    let converged = outcomes.iter().all(|o| o.converged);
    let exit_code = if converged { 0 } else { EXIT_NOT_CONVERGED };
    let mut diagnostics = Map::new();
    diagnostics.insert("runs".into(), outcomes.len().into());
    diagnostics.insert(
        "not_converged".into(),
        outcomes
            .iter()
            .enumerate()
            .filter(|(_, o)| !o.converged)
            .map(|(id, _)| json!(run_dir_name(id)))
            .collect::<Vec<_>>()
            .into(),
    );
    diagnostics.insert("converged".into(), converged.into());
    diagnostics.insert("wall_time_s".into(), start.elapsed().as_secs_f64().into());
    RunManifest {
        format_version: FORMAT_VERSION,
        experiment: config.experiment.name().into(),
        config: config.echo(),
        diagnostics,
        artifacts: vec![index],
        exit_code,
    }
    .write(out)?;
    Ok(RunOutcome {
        dir: out.to_path_buf(),
        converged,
        exit_code,
    })
}
