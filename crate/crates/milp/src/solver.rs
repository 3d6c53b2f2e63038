use std::time::Duration;

use crate::bnb;
use crate::error::SolverError;
use crate::model::MilpModel;
use crate::simplex::{self, LpOutcome};

/// Environment variable naming the default backend (see [`backend_from_env`]).
pub const BACKEND_ENV: &str = "MPRS_SOLVER";

/// Id of the bundled simplex + branch-and-bound backend.
pub const BUNDLED_BACKEND: &str = "bundled";

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Row feasibility tolerance (relative to the row norm when `|rhs| > 1`).
    pub feasibility_tol: f64,
    /// Distance from {0, 1} under which a binary counts as integral.
    pub integrality_tol: f64,
    /// Smallest pivot magnitude accepted by the ratio test.
    pub pivot_tol: f64,
    /// Absolute pruning gap of the branch-and-bound search.
    pub gap_tol: f64,
    pub node_limit: usize,
    pub time_limit: Option<Duration>,
    /// Floor on the per-LP simplex iteration cap.
    pub max_simplex_iterations: usize,
    pub backend: String,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            feasibility_tol: 1e-7,
            integrality_tol: 1e-6,
            pivot_tol: 1e-9,
            gap_tol: 1e-9,
            node_limit: 1_000_000,
            time_limit: None,
            max_simplex_iterations: 100_000,
            backend: BUNDLED_BACKEND.to_string(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let tols = [
            ("feasibility_tol", self.feasibility_tol),
            ("integrality_tol", self.integrality_tol),
            ("pivot_tol", self.pivot_tol),
            ("gap_tol", self.gap_tol),
        ];
        for (name, v) in tols {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SolverError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if self.integrality_tol >= 0.5 {
            return Err(SolverError::InvalidConfig("integrality_tol must be below 0.5".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Node or time limit hit; `values` holds the incumbent if one was found.
    LimitReached,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution {
    pub status: SolveStatus,
    /// Empty unless a feasible point is available.
    pub values: Vec<f64>,
    /// Objective at `values` in the model's own sense (NaN when no point).
    pub objective: f64,
    /// Proven bound on the optimum in the model's sense, when known.
    pub best_bound: Option<f64>,
    pub nodes: usize,
}

impl MilpSolution {
    pub(crate) fn without_point(status: SolveStatus, nodes: usize) -> Self {
        Self { status, values: Vec::new(), objective: f64::NAN, best_bound: None, nodes }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn has_incumbent(&self) -> bool {
        !self.values.is_empty()
    }
}

/// A backend able to solve mixed 0-1 linear models.
///
/// Backends must report binaries exactly in {0, 1} whenever they are within
/// `integrality_tol` of an integer.
pub trait MilpSolver: Send + Sync {
    fn id(&self) -> &str;
    fn solve(&self, model: &MilpModel, config: &SolverConfig) -> Result<MilpSolution, SolverError>;
}

/// Dense simplex with best-first branch-and-bound on the binaries.
#[derive(Debug, Default, Clone, Copy)]
pub struct BundledSolver;

impl MilpSolver for BundledSolver {
    fn id(&self) -> &str {
        BUNDLED_BACKEND
    }

    fn solve(&self, model: &MilpModel, config: &SolverConfig) -> Result<MilpSolution, SolverError> {
        solve_milp(model, config)
    }
}

/// Resolves a backend by id.
pub fn backend(id: &str) -> Result<Box<dyn MilpSolver>, SolverError> {
    match id {
        BUNDLED_BACKEND => Ok(Box::new(BundledSolver)),
        other => Err(SolverError::UnknownBackend(other.to_string())),
    }
}

/// Resolves the backend named by `MPRS_SOLVER`, defaulting to the bundled one.
pub fn backend_from_env() -> Result<Box<dyn MilpSolver>, SolverError> {
    match std::env::var(BACKEND_ENV) {
        Ok(id) if !id.trim().is_empty() => backend(id.trim()),
        _ => backend(BUNDLED_BACKEND),
    }
}

/// Solves the continuous relaxation of `model` (binaries relaxed to `[0, 1]`).
pub fn solve_lp(model: &MilpModel, config: &SolverConfig) -> Result<MilpSolution, SolverError> {
    config.validate()?;
    let (lo, hi): (Vec<f64>, Vec<f64>) = model.var_kinds().iter().map(|k| k.bounds()).unzip();
    Ok(match simplex::solve_lp_with_bounds(model, &lo, &hi, config)? {
        LpOutcome::Optimal { values, objective } => {
            MilpSolution { status: SolveStatus::Optimal, values, objective, best_bound: Some(objective), nodes: 1 }
        }
        LpOutcome::Infeasible => MilpSolution::without_point(SolveStatus::Infeasible, 1),
        LpOutcome::Unbounded => MilpSolution::without_point(SolveStatus::Unbounded, 1),
    })
}

/// Solves `model` exactly by best-first branch-and-bound over its binaries.
pub fn solve_milp(model: &MilpModel, config: &SolverConfig) -> Result<MilpSolution, SolverError> {
    config.validate()?;
    bnb::branch_and_bound(model, config)
}
