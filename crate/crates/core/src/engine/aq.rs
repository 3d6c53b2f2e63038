use std::time::Duration;

use mprs_milp::MilpModel;
use serde::{Deserialize, Serialize};

use super::family::{run_engine, Budget, Epsilon, ParametricFamily, StopReason};
use super::master::{build_q, QFormulation, QModel};
use crate::error::{check_len, Error, Result};
use crate::instance::Instance;
use crate::robust::{solve_robust, RobustMode, RobustSolution};
use crate::solver::SolverContext;
use crate::uncertainty::{linear_cost, robustness_value, robustness_value_variant, GammaVector, OmegaSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AqOptions {
    pub epsilon: Epsilon,
    pub mode: RobustMode,
    pub formulation: QFormulation,
    pub budget: Budget,
}

impl Default for AqOptions {
    fn default() -> Self {
        Self {
            epsilon: Epsilon::Absolute(0.0),
            mode: RobustMode::Standard,
            formulation: QFormulation::Specialized,
            budget: Budget::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    /// Budget vector the solution was computed for.
    pub gamma: GammaVector,
    pub solution: RobustSolution,
    /// Master value of the iteration that found this entry; `None` for the start.
    pub q_value_at_discovery: Option<f64>,
}

/// One line of the iteration trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub r: usize,
    pub q_value: f64,
    pub gamma: Vec<f64>,
    pub distinct_x: usize,
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub iteration_seconds: Vec<f64>,
}

/// An ε,Ω solution set with its full iteration record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MprsResult {
    pub mode: RobustMode,
    pub formulation: QFormulation,
    pub omega: OmegaSpec,
    pub epsilon: f64,
    /// `v(R(Γ_init))`.
    pub initial_value: f64,
    pub history: Vec<HistoryEntry>,
    pub q_values: Vec<f64>,
    /// `q_values[i] / initial_value`; infinite when the denominator is zero.
    #[serde(with = "crate::io::float_vec")]
    pub relative_error_bounds: Vec<f64>,
    /// History indices of the first occurrence of each distinct `x`.
    pub distinct_x: Vec<usize>,
    /// Like `distinct_x` but keyed by the reported solution identity
    /// (open medians for medians instances).
    pub distinct_solutions: Vec<usize>,
    pub stop_reason: StopReason,
    pub timing: Timing,
}

impl MprsResult {
    pub fn iterations(&self) -> usize {
        self.q_values.len()
    }

    pub fn solutions(&self) -> impl Iterator<Item = &[u8]> {
        self.history.iter().map(|h| h.solution.x.as_slice())
    }

    pub fn distinct_x_vectors(&self) -> Vec<&[u8]> {
        self.distinct_x.iter().map(|&i| self.history[i].solution.x.as_slice()).collect()
    }

    /// `100 · v(Q¹) / v(R(Γ_init))`, the first-iteration error bound in percent.
    pub fn first_bound_percent(&self) -> Option<f64> {
        self.relative_error_bounds.first().map(|b| 100.0 * b)
    }
}

pub(crate) fn first_occurrences<K: PartialEq>(keys: impl IntoIterator<Item = K>) -> Vec<usize> {
    let mut seen: Vec<K> = Vec::new();
    let mut out = Vec::new();
    for (i, key) in keys.into_iter().enumerate() {
        if !seen.contains(&key) {
            seen.push(key);
            out.push(i);
        }
    }
    out
}

struct RobustFamily<'a> {
    inst: &'a Instance,
    omega: &'a OmegaSpec,
    mode: RobustMode,
    formulation: QFormulation,
}

impl ParametricFamily for RobustFamily<'_> {
    type Param = GammaVector;
    type Entry = RobustSolution;
    type Master = QModel;

    fn solve_at(&self, gamma: &GammaVector, solver: &SolverContext) -> Result<RobustSolution> {
        solve_robust(self.inst, gamma, self.mode, solver)
    }

    fn build_master(&self, history: &[RobustSolution]) -> Result<QModel> {
        build_q(self.inst, self.omega, history, self.mode, self.formulation)
    }

    fn master_model<'m>(&self, master: &'m QModel) -> &'m MilpModel {
        &master.model
    }

    fn decode(&self, master: &QModel, values: &[f64]) -> Result<(GammaVector, RobustSolution)> {
        let gamma = master.decode_gamma(values);
        let sol = master.decode_solution(self.inst, values, self.mode)?;
        Ok((gamma, sol))
    }

    fn stored_value(&self, entry: &RobustSolution, gamma: &GammaVector) -> f64 {
        entry.stored_value(self.inst, gamma)
    }
}

/// Runs A-Q from the smallest point of Ω.
pub fn run_aq(inst: &Instance, omega: &OmegaSpec, options: &AqOptions, solver: &SolverContext) -> Result<MprsResult> {
    run_aq_traced(inst, omega, options, solver, |_| {})
}

/// [`run_aq`] reporting a [`TraceRecord`] after every master solve.
pub fn run_aq_traced(
    inst: &Instance,
    omega: &OmegaSpec,
    options: &AqOptions,
    solver: &SolverContext,
    mut on_iteration: impl FnMut(&TraceRecord),
) -> Result<MprsResult> {
    omega.validate()?;
    check_len("parameter domain", inst.num_groups(), omega.dim())?;
    if options.mode == RobustMode::TuRelaxed && !inst.is_totally_unimodular() {
        return Err(Error::Unsupported(format!(
            "tu_relaxed mode needs a totally unimodular instance ({})",
            inst.kind()
        )));
    }
    let family = RobustFamily { inst, omega, mode: options.mode, formulation: options.formulation };
    let run = run_engine(&family, omega.initial_gamma(), options.epsilon, options.budget, solver, |step| {
        let distinct_x = first_occurrences(step.entries.iter().map(|e| &e.x)).len();
        on_iteration(&TraceRecord {
            r: step.r,
            q_value: step.q_value,
            gamma: step.param.to_vec(),
            distinct_x,
            elapsed_seconds: step.elapsed.as_secs_f64(),
        })
    })?;

    let history: Vec<HistoryEntry> = run
        .params
        .into_iter()
        .zip(run.entries)
        .enumerate()
        .map(|(i, (gamma, solution))| HistoryEntry {
            gamma,
            solution,
            q_value_at_discovery: i.checked_sub(1).map(|p| run.q_values[p]),
        })
        .collect();
    let relative_error_bounds = run
        .q_values
        .iter()
        .map(|&q| if run.start_value == 0.0 { f64::INFINITY } else { q / run.start_value })
        .collect();
    let distinct_x = first_occurrences(history.iter().map(|h| &h.solution.x));
    let distinct_solutions = first_occurrences(history.iter().map(|h| inst.solution_key(&h.solution.x)));
    let secs = |d: Duration| d.as_secs_f64();
    Ok(MprsResult {
        mode: options.mode,
        formulation: options.formulation,
        omega: omega.clone(),
        epsilon: run.epsilon,
        initial_value: run.start_value,
        history,
        q_values: run.q_values,
        relative_error_bounds,
        distinct_x,
        distinct_solutions,
        stop_reason: run.stop_reason,
        timing: Timing {
            total_seconds: secs(run.elapsed),
            iteration_seconds: run.step_times.into_iter().map(secs).collect(),
        },
    })
}

/// A realized scenario: a budget vector or a full cost vector.
#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    Gamma(Vec<f64>),
    Cost(Vec<f64>),
}

/// Stored solution with the smallest worst case (Γ) or cost (c); ties go to
/// the smallest history index.
pub fn pick_best(result: &MprsResult, inst: &Instance, scenario: &Scenario) -> Result<(usize, f64)> {
    if result.history.is_empty() {
        return Err(Error::EmptyHistory);
    }
    let mut best = (0, f64::INFINITY);
    for (i, h) in result.history.iter().enumerate() {
        let x = &h.solution.x;
        let v = match scenario {
            Scenario::Gamma(g) if result.mode == RobustMode::Variant => robustness_value_variant(inst, x, g)?,
            Scenario::Gamma(g) => robustness_value(inst, x, g)?,
            Scenario::Cost(c) => {
                check_len("cost vector", inst.n(), c.len())?;
                linear_cost(c, x)
            }
        };
        if v < best.1 {
            best = (i, v);
        }
    }
    Ok(best)
}
