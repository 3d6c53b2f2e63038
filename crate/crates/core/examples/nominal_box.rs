//! Multiparametric analysis of the nominal shortest-path problem when each
//! arc cost ranges over `[c̲_j, c̲_j + d_j]`.

use mprs::engine::{run_multiparametric_nominal, Budget, Epsilon, NominalMaster, NominalProblem};
use mprs::generators::{gen_sp, SpParams};
use mprs::SolverContext;

fn main() -> mprs::Result<()> {
    let solver = SolverContext::default();
    let inst = gen_sp(SpParams { nodes: 10, seed: 4 })?;
    let n = inst.n();
    let problem = NominalProblem::new(inst.nominal_model(&vec![0.0; n])?, (0..n).collect())?;
    let lower = inst.c_lower().to_vec();
    let upper: Vec<f64> = lower.iter().zip(inst.deviations()).map(|(c, d)| c + d).collect();
    for master in [NominalMaster::Interval, NominalMaster::General] {
        for eps in [5.0, 1.0, 0.0] {
            let res = run_multiparametric_nominal(
                &problem,
                &lower,
                &upper,
                Epsilon::RelativePercent(eps),
                master,
                Budget::default(),
                &solver,
            )?;
            println!(
                "{master:?} eps={eps}%: {} iterations, {} distinct paths, {:?}",
                res.q_values.len(),
                res.distinct_supports.len(),
                res.stop_reason
            );
        }
    }
    Ok(())
}
