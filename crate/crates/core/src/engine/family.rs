//! The generic iteration shared by every multiparametric run: solve at a
//! starting parameter, then alternate master problem and append until the
//! master's gap drops to ε.

use std::time::{Duration, Instant};

use mprs_milp::{MilpModel, SolveStatus};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::SolverContext;

/// Stop test slack absorbing solver tolerance.
pub const STOP_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "value", rename_all = "snake_case")]
pub enum Epsilon {
    Absolute(f64),
    /// Percentage of the starting optimum: `ε = (q / 100) · v(start)`.
    RelativePercent(f64),
}

impl Epsilon {
    pub fn resolve(self, start_value: f64) -> Result<f64> {
        let eps = match self {
            Epsilon::Absolute(e) => e,
            Epsilon::RelativePercent(q) => q / 100.0 * start_value,
        };
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon must be finite and >= 0, got {eps}")));
        }
        Ok(eps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    EpsilonMet,
    BudgetExceeded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub max_iterations: usize,
    pub time_limit: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Self { max_iterations: 500, time_limit: Some(Duration::from_secs(3600)) }
    }
}

/// A parameterized 0-1 problem whose parameters multiply binaries only.
pub trait ParametricFamily {
    type Param: Clone;
    type Entry: Clone;
    type Master;

    /// An optimal entry at `param`.
    fn solve_at(&self, param: &Self::Param, solver: &SolverContext) -> Result<Self::Entry>;
    fn build_master(&self, history: &[Self::Entry]) -> Result<Self::Master>;
    fn master_model<'m>(&self, master: &'m Self::Master) -> &'m MilpModel;
    /// Parameter and new entry at a master solution.
    fn decode(&self, master: &Self::Master, values: &[f64]) -> Result<(Self::Param, Self::Entry)>;
    /// Certified objective bound of `entry` at `param`.
    fn stored_value(&self, entry: &Self::Entry, param: &Self::Param) -> f64;
}

/// Progress after one master solve.
#[derive(Debug, Clone)]
pub struct Step<'a, P, E> {
    /// Number of stored entries when the master was solved.
    pub r: usize,
    pub q_value: f64,
    pub param: &'a P,
    pub entries: &'a [E],
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct EngineRun<P, E> {
    /// `params[i]` generated `entries[i]`.
    pub params: Vec<P>,
    pub entries: Vec<E>,
    pub q_values: Vec<f64>,
    pub start_value: f64,
    pub epsilon: f64,
    pub stop_reason: StopReason,
    /// Wall time at which each master solve finished.
    pub step_times: Vec<Duration>,
    pub elapsed: Duration,
}

pub fn run_engine<F: ParametricFamily>(
    family: &F,
    start: F::Param,
    epsilon: Epsilon,
    budget: Budget,
    solver: &SolverContext,
    mut observe: impl FnMut(&Step<'_, F::Param, F::Entry>),
) -> Result<EngineRun<F::Param, F::Entry>> {
    let clock = Instant::now();
    let first = family.solve_at(&start, solver)?;
    let start_value = family.stored_value(&first, &start);
    let epsilon = epsilon.resolve(start_value)?;
    let mut run = EngineRun {
        params: vec![start],
        entries: vec![first],
        q_values: Vec::new(),
        start_value,
        epsilon,
        stop_reason: StopReason::BudgetExceeded,
        step_times: Vec::new(),
        elapsed: Duration::ZERO,
    };
    loop {
        let out_of_time = budget.time_limit.is_some_and(|t| clock.elapsed() >= t);
        if run.q_values.len() >= budget.max_iterations || out_of_time {
            break;
        }
        let master = family.build_master(&run.entries)?;
        let model = family.master_model(&master);
        let sol = solver.backend().solve(model, solver.config())?;
        match sol.status {
            SolveStatus::Optimal => {}
            SolveStatus::LimitReached => break,
            status => return Err(Error::UnexpectedStatus { context: "master problem", status }),
        }
        let (param, entry) = family.decode(&master, &sol.values)?;
        let best_stored = run.entries.iter().map(|e| family.stored_value(e, &param)).fold(f64::INFINITY, f64::min);
        let q = best_stored - family.stored_value(&entry, &param);
        let scale = best_stored.abs().max(1.0);
        if (q - sol.objective).abs() > 1e-5 * scale {
            return Err(Error::Invariant(format!(
                "master objective {} disagrees with the replayed gap {q}",
                sol.objective
            )));
        }
        run.q_values.push(q);
        run.step_times.push(clock.elapsed());
        observe(&Step {
            r: run.entries.len(),
            q_value: q,
            param: &param,
            entries: &run.entries,
            elapsed: clock.elapsed(),
        });
        if q <= epsilon + STOP_SLACK {
            run.stop_reason = StopReason::EpsilonMet;
            break;
        }
        run.params.push(param);
        run.entries.push(entry);
    }
    run.elapsed = clock.elapsed();
    Ok(run)
}
