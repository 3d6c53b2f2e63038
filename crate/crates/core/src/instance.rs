//! Problem instances: the nominal feasible set X, nominal costs, deviations
//! and the partition of the decision indices into uncertainty groups.

use std::fmt;

use mprs_milp::{Constraint, MilpModel, Relation, Sense};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::solver::SolverContext;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InstanceKind {
    #[serde(rename = "SP")]
    ShortestPath,
    #[serde(rename = "PLM")]
    Medians,
    #[serde(rename = "TOY")]
    Toy,
    #[serde(rename = "CUSTOM")]
    Custom,
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InstanceKind::ShortestPath => "SP",
            InstanceKind::Medians => "PLM",
            InstanceKind::Toy => "TOY",
            InstanceKind::Custom => "CUSTOM",
        })
    }
}

/// Graph data kept with shortest-path instances. Arc `e` is `arcs[e]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpGraph {
    pub seed: u64,
    pub points: Vec<[f64; 2]>,
    pub arcs: Vec<[usize; 2]>,
    pub source: usize,
    pub target: usize,
}

/// Layout of a medians instance: `x_ij` sits at `i * l + j`, `y_i` at `l * l + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediansLayout {
    pub seed: u64,
    pub l: usize,
    pub p: usize,
    pub locations: Vec<[f64; 2]>,
    pub demands: Vec<f64>,
}

impl MediansLayout {
    pub fn assign(&self, i: usize, j: usize) -> usize {
        i * self.l + j
    }

    pub fn open(&self, i: usize) -> usize {
        self.l * self.l + i
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    /// The constraint matrix of X is totally unimodular.
    #[serde(default)]
    pub totally_unimodular: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition_scheme: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<SpGraph>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub medians: Option<MediansLayout>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toy_n: Option<usize>,
}

/// A 0-1 problem `min c^t x, x in X` with locally budgeted cost uncertainty.
///
/// X is described by linear rows over `x` only; every `x_j` is binary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceFile", into = "InstanceFile")]
pub struct Instance {
    kind: InstanceKind,
    c_lower: Vec<f64>,
    deviations: Vec<f64>,
    partition: Vec<Vec<usize>>,
    group_of: Vec<usize>,
    rows: Vec<Constraint>,
    metadata: Metadata,
}

impl Instance {
    /// Validates dimensions, signs and the partition. Groups are stored sorted.
    pub fn new(
        kind: InstanceKind,
        c_lower: Vec<f64>,
        deviations: Vec<f64>,
        partition: Vec<Vec<usize>>,
        rows: Vec<Constraint>,
        metadata: Metadata,
    ) -> Result<Self> {
        let n = c_lower.len();
        check_len("deviations", n, deviations.len())?;
        if n == 0 {
            return Err(Error::InvalidInstance("no decision variables".into()));
        }
        for (j, (&c, &d)) in c_lower.iter().zip(&deviations).enumerate() {
            if !(c.is_finite() && c >= 0.0 && d.is_finite() && d >= 0.0) {
                return Err(Error::InvalidInstance(format!(
                    "cost data of variable {j} must be finite and nonnegative (c = {c}, d = {d})"
                )));
            }
        }
        let (partition, group_of) = normalize_partition(partition, n)?;
        let mut clean = Vec::with_capacity(rows.len());
        for (r, row) in rows.into_iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(Error::InvalidInstance(format!("row {r} has a non-finite rhs")));
            }
            for &(j, a) in &row.coeffs {
                if j >= n {
                    return Err(Error::InvalidInstance(format!("row {r} references variable {j} but n = {n}")));
                }
                if !a.is_finite() {
                    return Err(Error::InvalidInstance(format!("row {r} has a non-finite coefficient")));
                }
            }
            clean.push(row);
        }
        Ok(Self { kind, c_lower, deviations, partition, group_of, rows: clean, metadata })
    }

    /// Same data with a different partition.
    pub fn with_partition(&self, partition: Vec<Vec<usize>>) -> Result<Self> {
        let (partition, group_of) = normalize_partition(partition, self.n())?;
        Ok(Self { partition, group_of, ..self.clone() })
    }

    pub fn with_metadata(mut self, metadata: Metadata) -> Self {
        self.metadata = metadata;
        self
    }

    pub fn kind(&self) -> InstanceKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.c_lower.len()
    }

    /// Number of groups K.
    pub fn num_groups(&self) -> usize {
        self.partition.len()
    }

    pub fn c_lower(&self) -> &[f64] {
        &self.c_lower
    }

    pub fn deviations(&self) -> &[f64] {
        &self.deviations
    }

    pub fn partition(&self) -> &[Vec<usize>] {
        &self.partition
    }

    /// Group index k with `j` in `P_k`.
    pub fn group_of(&self, j: usize) -> usize {
        self.group_of[j]
    }

    pub fn rows(&self) -> &[Constraint] {
        &self.rows
    }

    pub fn metadata(&self) -> &Metadata {
        &self.metadata
    }

    pub fn is_totally_unimodular(&self) -> bool {
        self.metadata.totally_unimodular
    }

    /// Largest deviation inside each group.
    pub fn group_max_deviation(&self) -> Vec<f64> {
        self.partition.iter().map(|g| g.iter().map(|&j| self.deviations[j]).fold(0.0, f64::max)).collect()
    }

    pub fn nominal_cost(&self, x: &[u8]) -> f64 {
        dot01(&self.c_lower, x)
    }

    /// `x` satisfies every row of X (within 1e-9).
    pub fn is_feasible(&self, x: &[u8]) -> bool {
        if x.len() != self.n() || x.iter().any(|&v| v > 1) {
            return false;
        }
        let values: Vec<f64> = x.iter().map(|&v| f64::from(v)).collect();
        self.rows.iter().all(|row| row.scaled_violation(&values) <= 1e-9)
    }

    /// Appends `n` binaries for `x` (or `[0, 1]` continuous when `relaxed`)
    /// and the rows of X; returns the index of `x_0`.
    pub(crate) fn append_x(&self, model: &mut MilpModel, relaxed: bool) -> Result<usize> {
        let start = model.num_vars();
        for j in 0..self.n() {
            let name = Some(format!("x{j}"));
            if relaxed {
                model.add_continuous(name, 0.0, 1.0)?;
            } else {
                model.add_binary(name);
            }
        }
        for row in &self.rows {
            let coeffs: Vec<_> = row.coeffs.iter().map(|&(j, a)| (start + j, a)).collect();
            model.add_constraint(coeffs, row.relation, row.rhs)?;
        }
        Ok(start)
    }

    /// The nominal problem `min cost^t x, x in X` as a model over `x` alone.
    pub fn nominal_model(&self, cost: &[f64]) -> Result<MilpModel> {
        check_len("cost vector", self.n(), cost.len())?;
        let mut model = MilpModel::new(Sense::Minimize);
        let x0 = self.append_x(&mut model, false)?;
        for (j, &c) in cost.iter().enumerate() {
            model.set_objective_coeff(x0 + j, c)?;
        }
        Ok(model)
    }

    /// Solves the nominal problem; returns the value and a minimizer.
    pub fn solve_nominal(&self, cost: &[f64], solver: &SolverContext) -> Result<(f64, Vec<u8>)> {
        let model = self.nominal_model(cost)?;
        let sol = solver.solve_optimal(&model, "nominal problem")?;
        let x = round_binary(&sol.values[..self.n()]);
        Ok((dot01(cost, &x), x))
    }

    /// Fails unless X is nonempty.
    pub fn check_feasible(&self, solver: &SolverContext) -> Result<()> {
        let model = self.nominal_model(&vec![0.0; self.n()])?;
        match solver.backend().solve(&model, solver.config())? {
            sol if sol.has_incumbent() => Ok(()),
            _ => Err(Error::InvalidInstance("the feasible set X is empty".into())),
        }
    }

    /// Key identifying a solution for reporting: the open medians for
    /// medians instances, the whole vector otherwise.
    pub fn solution_key(&self, x: &[u8]) -> Vec<u8> {
        match &self.metadata.medians {
            Some(m) if x.len() == m.l * (m.l + 1) => x[m.l * m.l..].to_vec(),
            _ => x.to_vec(),
        }
    }
}

fn normalize_partition(mut partition: Vec<Vec<usize>>, n: usize) -> Result<(Vec<Vec<usize>>, Vec<usize>)> {
    if partition.is_empty() {
        return Err(Error::InvalidInstance("partition has no groups".into()));
    }
    let mut group_of = vec![usize::MAX; n];
    for (k, group) in partition.iter_mut().enumerate() {
        if group.is_empty() {
            return Err(Error::InvalidInstance(format!("group {k} is empty")));
        }
        group.sort_unstable();
        for &j in group.iter() {
            if j >= n {
                return Err(Error::InvalidInstance(format!("group {k} references index {j} but n = {n}")));
            }
            if group_of[j] != usize::MAX {
                return Err(Error::InvalidInstance(format!("index {j} appears in more than one group")));
            }
            group_of[j] = k;
        }
    }
    if let Some(j) = group_of.iter().position(|&k| k == usize::MAX) {
        return Err(Error::InvalidInstance(format!("index {j} is not covered by the partition")));
    }
    Ok((partition, group_of))
}

pub(crate) fn dot01(c: &[f64], x: &[u8]) -> f64 {
    c.iter().zip(x).filter(|(_, &v)| v != 0).map(|(c, _)| c).sum()
}

/// Rounds solver output to exact 0/1.
pub(crate) fn round_binary(values: &[f64]) -> Vec<u8> {
    values.iter().map(|&v| u8::from(v >= 0.5)).collect()
}

#[derive(Serialize, Deserialize)]
struct ConstraintsFile {
    rows: Vec<Vec<(usize, f64)>>,
    senses: Vec<String>,
    rhs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    kind: InstanceKind,
    n: usize,
    #[serde(rename = "K")]
    k: usize,
    c_lower: Vec<f64>,
    deviations: Vec<f64>,
    partition: Vec<Vec<usize>>,
    constraints: ConstraintsFile,
    #[serde(default)]
    metadata: Metadata,
}

impl TryFrom<InstanceFile> for Instance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        check_len("c_lower", file.n, file.c_lower.len())?;
        check_len("partition", file.k, file.partition.len())?;
        let c = &file.constraints;
        check_len("constraint senses", c.rows.len(), c.senses.len())?;
        check_len("constraint rhs", c.rows.len(), c.rhs.len())?;
        let mut rows = Vec::with_capacity(c.rows.len());
        for ((coeffs, sense), &rhs) in c.rows.iter().zip(&c.senses).zip(&c.rhs) {
            let relation = match sense.as_str() {
                "<=" => Relation::Le,
                "=" => Relation::Eq,
                ">=" => Relation::Ge,
                other => return Err(Error::InvalidInstance(format!("unknown constraint sense {other:?}"))),
            };
            rows.push(Constraint { coeffs: coeffs.clone(), relation, rhs });
        }
        Instance::new(file.kind, file.c_lower, file.deviations, file.partition, rows, file.metadata)
    }
}

impl From<Instance> for InstanceFile {
    fn from(inst: Instance) -> Self {
        let constraints = ConstraintsFile {
            rows: inst.rows.iter().map(|r| r.coeffs.clone()).collect(),
            senses: inst.rows.iter().map(|r| r.relation.to_string()).collect(),
            rhs: inst.rows.iter().map(|r| r.rhs).collect(),
        };
        InstanceFile {
            kind: inst.kind,
            n: inst.c_lower.len(),
            k: inst.partition.len(),
            c_lower: inst.c_lower,
            deviations: inst.deviations,
            partition: inst.partition,
            constraints,
            metadata: inst.metadata,
        }
    }
}
