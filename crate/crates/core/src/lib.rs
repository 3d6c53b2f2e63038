pub mod cli;
pub mod engine;
pub mod error;
pub mod generators;
pub mod instance;
pub mod io;
pub mod oracle;
pub mod rng;
pub mod robust;
pub mod solver;
pub mod uncertainty;

pub use engine::{pick_best, run_aq, AqOptions, Epsilon, MprsResult, QFormulation, Scenario, StopReason};
pub use error::{Error, Result};
pub use instance::{Instance, InstanceKind, Metadata};
pub use robust::{solve_robust, Certificate, RobustMode, RobustSolution};
pub use solver::SolverContext;
pub use uncertainty::{
    robustness_value, robustness_value_variant, worst_case_cost_vector, GammaVector, OmegaSpec, SampleMode,
};
