//! Mixed 0-1 linear programming: a small model type, a bundled exact solver
//! (dense bounded simplex plus best-first branch-and-bound) behind the
//! [`MilpSolver`] trait, and fixed-format MPS export.

mod bnb;
mod error;
pub mod model;
pub mod mps;
mod simplex;
mod solver;

pub use error::{ModelError, SolverError};
pub use model::{Constraint, MilpModel, Relation, Sense, VarKind};
pub use mps::{to_mps_string, write_mps};
pub use solver::{
    backend, backend_from_env, solve_lp, solve_milp, BundledSolver, MilpSolution, MilpSolver, SolveStatus,
    SolverConfig, BACKEND_ENV, BUNDLED_BACKEND,
};
