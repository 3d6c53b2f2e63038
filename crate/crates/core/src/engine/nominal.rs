//! Multiparametric analysis of a 0-1 model whose objective coefficients on a
//! set of binaries range over a box `[ℒ, 𝒰]`.

use mprs_milp::{MilpModel, Relation, Sense};
use serde::{Deserialize, Serialize};

use super::aq::first_occurrences;
use super::family::{run_engine, Budget, Epsilon, ParametricFamily, StopReason};
use crate::error::{check_len, Error, Result};
use crate::instance::round_binary;
use crate::solver::SolverContext;

/// A minimization model with parameterized objective coefficients on `params`.
#[derive(Debug, Clone)]
pub struct NominalProblem {
    model: MilpModel,
    params: Vec<usize>,
}

impl NominalProblem {
    /// `params` must name distinct binary variables of a minimization model.
    pub fn new(model: MilpModel, params: Vec<usize>) -> Result<Self> {
        if model.sense() != Sense::Minimize {
            return Err(Error::InvalidArgument("the nominal model must be a minimization".into()));
        }
        for (i, &j) in params.iter().enumerate() {
            if j >= model.num_vars() {
                return Err(Error::InvalidArgument(format!("parameter {i} names variable {j} out of range")));
            }
            if !model.var_kind(j).is_binary() {
                return Err(Error::Unsupported(format!(
                    "parameter {i} multiplies continuous variable {j}; parameters must sit on 0-1 variables"
                )));
            }
            if params[..i].contains(&j) {
                return Err(Error::InvalidArgument(format!("variable {j} is parameterized twice")));
            }
        }
        Ok(Self { model, params })
    }

    pub fn model(&self) -> &MilpModel {
        &self.model
    }

    pub fn params(&self) -> &[usize] {
        &self.params
    }

    /// Objective of `values` without the parameterized terms.
    fn rest_cost(&self, values: &[f64]) -> f64 {
        let obj = self.model.objective();
        let skip: f64 = self.params.iter().map(|&j| obj[j] * values[j]).sum();
        self.model.evaluate_objective(values) - skip
    }

    /// Copy of the model in maximization form with the parameterized
    /// coefficients removed and the remaining objective negated.
    fn master_base(&self) -> Result<MilpModel> {
        let mut m = MilpModel::new(Sense::Maximize);
        for j in 0..self.model.num_vars() {
            let name = self.model.var_name(j).map(str::to_string);
            let kind = self.model.var_kind(j);
            if kind.is_binary() {
                m.add_binary(name);
            } else {
                let (lo, hi) = kind.bounds();
                m.add_continuous(name, lo, hi)?;
            }
        }
        for c in self.model.constraints() {
            m.add_constraint(c.coeffs.iter().copied(), c.relation, c.rhs)?;
        }
        for (j, &c) in self.model.objective().iter().enumerate() {
            if !self.params.contains(&j) {
                m.set_objective_coeff(j, -c)?;
            }
        }
        m.set_objective_offset(-self.model.objective_offset());
        Ok(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NominalMaster {
    /// Box-specialized master: `c⁺(x)_j = ℒ_j x_j + 𝒰_j (1 − x_j)`.
    #[default]
    Interval,
    /// Continuous `c` with `w_j = c_j x_j` linearized.
    General,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NominalEntry {
    pub values: Vec<f64>,
    /// Values of the parameterized binaries.
    pub support: Vec<u8>,
    /// Objective contribution of the unparameterized part.
    pub rest: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NominalResult {
    /// `costs[i]` generated `entries[i]`.
    pub costs: Vec<Vec<f64>>,
    pub entries: Vec<NominalEntry>,
    pub q_values: Vec<f64>,
    pub epsilon: f64,
    pub initial_value: f64,
    pub distinct_supports: Vec<usize>,
    pub stop_reason: StopReason,
}

struct NominalFamily<'a> {
    problem: &'a NominalProblem,
    lower: &'a [f64],
    upper: &'a [f64],
    master: NominalMaster,
}

struct NominalQ {
    model: MilpModel,
    cost_vars: Option<usize>,
}

impl NominalFamily<'_> {
    fn entry_from(&self, values: &[f64]) -> NominalEntry {
        let mut values = values.to_vec();
        for j in self.problem.model.binary_indices() {
            values[j] = values[j].round();
        }
        let raw: Vec<f64> = self.problem.params.iter().map(|&j| values[j]).collect();
        NominalEntry { support: round_binary(&raw), rest: self.problem.rest_cost(&values), values }
    }
}

impl ParametricFamily for NominalFamily<'_> {
    type Param = Vec<f64>;
    type Entry = NominalEntry;
    type Master = NominalQ;

    fn solve_at(&self, c: &Vec<f64>, solver: &SolverContext) -> Result<NominalEntry> {
        let mut model = self.problem.model.clone();
        for (&j, &cj) in self.problem.params.iter().zip(c) {
            model.set_objective_coeff(j, cj)?;
        }
        let sol = solver.solve_optimal(&model, "nominal problem")?;
        Ok(self.entry_from(&sol.values))
    }

    fn build_master(&self, history: &[NominalEntry]) -> Result<NominalQ> {
        if history.is_empty() {
            return Err(Error::EmptyHistory);
        }
        let params = &self.problem.params;
        let mut model = self.problem.master_base()?;
        let sigma = model.add_continuous("sigma".to_string(), f64::NEG_INFINITY, f64::INFINITY)?;
        model.set_objective_coeff(sigma, 1.0)?;
        match self.master {
            NominalMaster::Interval => {
                for (&j, &l) in params.iter().zip(self.lower) {
                    model.set_objective_coeff(j, -l)?;
                }
                for h in history {
                    let mut coeffs = vec![(sigma, 1.0)];
                    let mut rhs = h.rest;
                    for (p, &j) in params.iter().enumerate() {
                        let s = f64::from(h.support[p]);
                        coeffs.push((j, (self.upper[p] - self.lower[p]) * s));
                        rhs += self.upper[p] * s;
                    }
                    model.add_constraint(coeffs, Relation::Le, rhs)?;
                }
                Ok(NominalQ { model, cost_vars: None })
            }
            NominalMaster::General => {
                let c0 = model.num_vars();
                for p in 0..params.len() {
                    model.add_continuous(format!("c{p}"), self.lower[p], self.upper[p])?;
                }
                for (p, &j) in params.iter().enumerate() {
                    let u = self.upper[p];
                    let w = model.add_continuous(format!("w{p}"), 0.0, u)?;
                    model.set_objective_coeff(w, -1.0)?;
                    model.add_constraint([(w, 1.0), (c0 + p, -1.0), (j, -u)], Relation::Ge, -u)?;
                }
                for h in history {
                    let mut coeffs = vec![(sigma, 1.0)];
                    coeffs.extend((0..params.len()).map(|p| (c0 + p, -f64::from(h.support[p]))));
                    model.add_constraint(coeffs, Relation::Le, h.rest)?;
                }
                Ok(NominalQ { model, cost_vars: Some(c0) })
            }
        }
    }

    fn master_model<'m>(&self, master: &'m NominalQ) -> &'m MilpModel {
        &master.model
    }

    fn decode(&self, master: &NominalQ, values: &[f64]) -> Result<(Vec<f64>, NominalEntry)> {
        let entry = self.entry_from(&values[..self.problem.model.num_vars()]);
        let c = match master.cost_vars {
            None => (0..self.lower.len())
                .map(|p| if entry.support[p] == 1 { self.lower[p] } else { self.upper[p] })
                .collect(),
            Some(c0) => (0..self.lower.len()).map(|p| values[c0 + p].clamp(self.lower[p], self.upper[p])).collect(),
        };
        Ok((c, entry))
    }

    fn stored_value(&self, entry: &NominalEntry, c: &Vec<f64>) -> f64 {
        entry.rest + entry.support.iter().zip(c).filter(|(&s, _)| s == 1).map(|(_, c)| c).sum::<f64>()
    }
}

/// Finds solutions such that for every cost vector in `[lower, upper]` one of
/// them is within ε of optimal.
pub fn run_multiparametric_nominal(
    problem: &NominalProblem,
    lower: &[f64],
    upper: &[f64],
    epsilon: Epsilon,
    master: NominalMaster,
    budget: Budget,
    solver: &SolverContext,
) -> Result<NominalResult> {
    check_len("lower cost bound", problem.params.len(), lower.len())?;
    check_len("upper cost bound", problem.params.len(), upper.len())?;
    if let Some(p) = (0..lower.len()).find(|&p| !(lower[p].is_finite() && upper[p].is_finite() && lower[p] <= upper[p]))
    {
        return Err(Error::InvalidOmega(format!("cost box is empty or unbounded in coordinate {p}")));
    }
    let family = NominalFamily { problem, lower, upper, master };
    let run = run_engine(&family, lower.to_vec(), epsilon, budget, solver, |_| {})?;
    let distinct_supports = first_occurrences(run.entries.iter().map(|e| &e.support));
    Ok(NominalResult {
        costs: run.params,
        entries: run.entries,
        q_values: run.q_values,
        epsilon: run.epsilon,
        initial_value: run.start_value,
        distinct_supports,
        stop_reason: run.stop_reason,
    })
}
