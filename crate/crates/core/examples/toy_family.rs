//! The one-hot toy family: one robust solution covers the high box, while
//! the low box needs every unit path. Then picks the best stored solution
//! once a budget vector is realized.

use mprs::engine::{pick_best, run_aq, AqOptions, Epsilon, Scenario};
use mprs::oracle::toy_instance;
use mprs::{RobustMode, SolverContext};

fn main() -> mprs::Result<()> {
    let solver = SolverContext::default();
    let exact = AqOptions { epsilon: Epsilon::Absolute(0.0), ..AqOptions::default() };
    for n in 2..=5 {
        let (inst, high, low) = toy_instance(n)?;
        let s_high = run_aq(&inst, &high, &exact, &solver)?.distinct_x.len();
        let s_low = run_aq(&inst, &low, &exact, &solver)?.distinct_x.len();
        let variant = AqOptions { mode: RobustMode::Variant, ..exact };
        let s_var = run_aq(&inst, &low, &variant, &solver)?.distinct_x.len();
        println!("n={n}: high box s={s_high}, low box s={s_low}, low box (variant) s={s_var}");
    }

    let (inst, _, low) = toy_instance(2)?;
    let result = run_aq(&inst, &low, &exact, &solver)?;
    for gamma in [[0.2, 0.8, 0.0], [0.9, 0.1, 0.0], [1.0, 1.0, 0.0]] {
        let (index, value) = pick_best(&result, &inst, &Scenario::Gamma(gamma.to_vec()))?;
        println!("gamma={gamma:?}: x={:?} worst case {value}", result.history[index].solution.x);
    }
    Ok(())
}
