//! Mean number of distinct robust solutions over ten random shortest-path
//! instances as the interval Ω moves away from zero.
//!
//! Usage: `delta_trend [nodes] [base_seed]`.

use mprs::engine::{run_aq, AqOptions, Epsilon};
use mprs::generators::{apply_partition, build_omega, gen_sp, OmegaParams, PartitionScheme, SchemeKind, SpParams};
use mprs::{RobustMode, SolverContext};

fn main() -> mprs::Result<()> {
    let solver = SolverContext::default();
    let nodes: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(15);
    let base_seed: u64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(0);
    for kind in [SchemeKind::R, SchemeKind::P, SchemeKind::D] {
        for delta in [0.0, 0.25, 0.5, 1.0] {
            let mut counts = Vec::new();
            for seed in base_seed..base_seed + 10 {
                let inst = apply_partition(&gen_sp(SpParams { nodes, seed })?, PartitionScheme { kind, k: 3, seed })?;
                let omega = build_omega(&inst, OmegaParams::interval(delta))?;
                let opts = AqOptions {
                    epsilon: Epsilon::RelativePercent(1.0),
                    mode: RobustMode::TuRelaxed,
                    ..AqOptions::default()
                };
                counts.push(run_aq(&inst, &omega, &opts, &solver)?.distinct_x.len());
            }
            let mean = counts.iter().sum::<usize>() as f64 / 10.0;
            println!("{kind} delta={delta}: mean {mean:.1} {counts:?}");
        }
    }
    Ok(())
}
