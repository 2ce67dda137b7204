//! The ten acceptance criteria, one test each. Every test writes its
//! `[PASS]`/`[FAIL]` line straight to stderr so it shows up without
//! `--nocapture`.

use std::io::Write;

use scoresmooth_lab::checks::{self, CheckResult};
use scoresmooth_lab::config::{ExperimentConfig, ExperimentKind};

const SEED: u64 = 0;

fn report(result: anyhow::Result<CheckResult>) {
    let r = result.expect("check could not run");
    let _ = writeln!(std::io::stderr(), "{r}");
    assert!(r.passed, "{r}");
}

#[test]
fn criterion_01_f_function() {
    report(checks::f_function());
}

#[test]
fn criterion_02_loss_limit() {
    report(checks::loss_limit());
}

#[test]
fn criterion_03_optimality_certificate() {
    report(checks::optimality());
}

#[test]
fn criterion_04_flow_map_oracle() {
    report(checks::flow_oracle(SEED));
}

#[test]
fn criterion_05_density_predictions() {
    report(checks::density_predictions(200_000, SEED));
}

#[test]
fn criterion_06_memorization_vs_interpolation() {
    let nn = ExperimentConfig::preset(ExperimentKind::DenoiseCompare).nn;
    report(checks::memorization_vs_interpolation(200_000, &nn, SEED));
}

#[test]
fn criterion_07_kl_diagnostics() {
    report(checks::kl_diagnostics());
}

#[test]
fn criterion_08_smoothing_trend() {
    report(
        checks::run_smoothing_sweep(SEED)
            .map(|(rows, seconds)| checks::smoothing_trend(&rows, seconds)),
    );
}

#[test]
fn criterion_09_gradient_correctness() {
    report(checks::gradient_correctness(SEED));
}

#[test]
fn criterion_10_circle_interpolation() {
    report(checks::circle_interpolation(SEED));
}
