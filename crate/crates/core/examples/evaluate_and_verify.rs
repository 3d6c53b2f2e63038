//! The file-based workflow: run A-Q into a directory, pick the best stored
//! path for realized scenarios, and check the stored set against
//! independently computed optima.

use mprs::cli::{cmd_evaluate, cmd_run, cmd_verify, OmegaChoice, RunConfig, VerifyOptions};
use mprs::generators::{apply_partition, gen_sp, OmegaParams, PartitionScheme, SchemeKind, SpParams};
use mprs::io::write_instance;
use mprs::{Scenario, SolverContext};

fn main() -> mprs::Result<()> {
    let solver = SolverContext::default();
    let dir = std::env::temp_dir().join("mprs-evaluate-and-verify");
    let inst = apply_partition(
        &gen_sp(SpParams { nodes: 10, seed: 2 })?,
        PartitionScheme { kind: SchemeKind::P, k: 3, seed: 0 },
    )?;
    let instance_path = dir.join("sp.json");
    write_instance(&instance_path, &inst)?;

    let omega = OmegaChoice::Generated(OmegaParams::interval(0.5));
    let record = cmd_run(&RunConfig::new(&instance_path, omega, dir.join("run")), &solver)?;
    println!(
        "{}: {} iterations, {} distinct paths -> {}",
        record.instance_label,
        record.summary.iterations,
        record.summary.distinct_solutions,
        dir.join("run").display()
    );

    let omega = &record.result.omega;
    for alpha in [0.0, 0.5, 1.0] {
        let gamma: Vec<f64> = omega.upper().iter().map(|u| alpha * u).collect();
        let best = cmd_evaluate(&record, &inst, &Scenario::Gamma(gamma.clone()))?;
        println!("gamma={gamma:.2?}: entry {} worst case {:.3}", best.index, best.value);
    }

    let report = cmd_verify(&record, &inst, &VerifyOptions { uniform: 50, ..VerifyOptions::default() }, &solver)?;
    println!(
        "verify: passed={} over {} points, max gap {:.2e} (eps {:.2e})",
        report.passed, report.points, report.max_gap, report.epsilon
    );
    Ok(())
}
