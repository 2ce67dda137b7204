use std::path::Path;

use super::{figure, RunOptions, RunSummary};
use crate::checks::{self, CheckResult};
use crate::config::ExperimentConfig;
use crate::output::RunWriter;

pub fn run(config: &ExperimentConfig, root: &Path, opts: RunOptions) -> anyhow::Result<RunSummary> {
    let mut w = RunWriter::create(root, config, figure(config.kind))?;
    let seed = config.seed;
    let mut results: Vec<CheckResult> = Vec::new();
    let mut push = |r: CheckResult| {
        eprintln!("{r}");
        results.push(r);
    };
    for r in checks::verify_suite(seed)? {
        push(r);
    }
    if opts.full {
        push(checks::density_predictions(config.samples.max(1), seed)?);
        let mut nn =
            crate::config::ExperimentConfig::preset(crate::config::ExperimentKind::Train2d).nn;
        nn.seeds = 1;
        push(checks::memorization_vs_interpolation(
            config.samples.max(1),
            &nn,
            seed,
        )?);
        let (rows, seconds) = checks::run_smoothing_sweep(seed)?;
        push(checks::smoothing_trend(&rows, seconds));
        push(checks::gradient_correctness(seed)?);
        push(checks::circle_interpolation(seed)?);
        results.sort_by_key(|r| r.id);
    }
    let text: String = results.iter().map(|r| format!("{r}\n")).collect();
    w.write_text("report.txt", &text, "one line per check")?;
    let report = w.write_json(
        "report.json",
        &serde_json::json!({ "checks": results }),
        "every check with its metrics",
    )?;
    let failures = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("criterion {} ({})", r.id, r.title))
        .collect();
    Ok(RunSummary {
        dir: w.finish()?,
        failures,
        report: Some(report),
    })
}
