//! A-Q on a random shortest-path instance with an interval Ω, for each
//! partition scheme and solve mode.

use mprs::engine::{run_aq, AqOptions, Epsilon};
use mprs::generators::{apply_partition, build_omega, gen_sp, OmegaParams, PartitionScheme, SchemeKind, SpParams};
use mprs::{RobustMode, SolverContext};

fn main() -> mprs::Result<()> {
    let nodes = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(15);
    let solver = SolverContext::default();
    let base = gen_sp(SpParams { nodes, seed: 1 })?;
    println!("{} arcs", base.n());
    for kind in [SchemeKind::R, SchemeKind::P, SchemeKind::D] {
        let inst = apply_partition(&base, PartitionScheme { kind, k: 3, seed: 1 })?;
        for delta in [0.0, 1.0] {
            let omega = build_omega(&inst, OmegaParams::interval(delta))?;
            for mode in [RobustMode::TuRelaxed, RobustMode::Standard] {
                let opts = AqOptions { epsilon: Epsilon::RelativePercent(1.0), mode, ..AqOptions::default() };
                let res = run_aq(&inst, &omega, &opts, &solver)?;
                println!(
                    "{kind} delta={delta} {mode}: r={} s={} first bound={:.1}% t={:.2}s",
                    res.iterations(),
                    res.distinct_x.len(),
                    res.first_bound_percent().unwrap_or(0.0),
                    res.timing.total_seconds
                );
            }
        }
    }
    Ok(())
}
