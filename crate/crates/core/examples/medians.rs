//! A-Q on a random (l, p)-medians instance under interval, segment and
//! budgeted Ω, for both location partitions.
//!
//! Usage: `medians [l] [p]`.

use mprs::engine::{run_aq, AqOptions, Epsilon};
use mprs::generators::{apply_partition, build_omega, gen_plm, OmegaParams, PartitionScheme, PlmParams, SchemeKind};
use mprs::SolverContext;

fn main() -> mprs::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<usize>().ok());
    let l = args.next().flatten().unwrap_or(6);
    let p = args.next().flatten().unwrap_or(2);
    let solver = SolverContext::default();
    let base = gen_plm(PlmParams { l, p, seed: 1 })?;
    let opts = AqOptions { epsilon: Epsilon::RelativePercent(1.0), ..AqOptions::default() };
    let omegas = [
        ("interval delta=0", OmegaParams::interval(0.0)),
        ("interval delta=1", OmegaParams::interval(1.0)),
        ("segment", OmegaParams::segment()),
        ("budgeted", OmegaParams::budgeted(0.5, 1.0, 0.5)),
    ];
    for kind in [SchemeKind::Lo, SchemeKind::G] {
        let inst = apply_partition(&base, PartitionScheme { kind, k: 2, seed: 1 })?;
        for (name, params) in &omegas {
            let omega = build_omega(&inst, *params)?;
            let res = run_aq(&inst, &omega, &opts, &solver)?;
            println!(
                "{kind} K={} {name}: r={} distinct median sets={} first bound={:.1}% t={:.2}s",
                inst.num_groups(),
                res.iterations(),
                res.distinct_solutions.len(),
                res.first_bound_percent().unwrap_or(0.0),
                res.timing.total_seconds
            );
        }
    }
    Ok(())
}
