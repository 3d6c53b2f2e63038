//! Mixed 0-1 linear model representation.

use std::fmt;

use crate::error::ModelError;

/// Domain of a single variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarKind {
    /// 0-1 variable; implied bounds `[0, 1]`.
    Binary,
    /// Continuous variable with (possibly infinite) bounds.
    Continuous { lo: f64, hi: f64 },
}

impl VarKind {
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            VarKind::Binary => (0.0, 1.0),
            VarKind::Continuous { lo, hi } => (lo, hi),
        }
    }

    pub fn is_binary(&self) -> bool {
        matches!(self, VarKind::Binary)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// A sparse linear row `coeffs · x  (relation)  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * values[j]).sum()
    }

    /// Violation of the row at `values`, scaled by the row norm when `|rhs| > 1`.
    pub fn scaled_violation(&self, values: &[f64]) -> f64 {
        let act = self.activity(values);
        let raw = match self.relation {
            Relation::Le => (act - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - act).max(0.0),
            Relation::Eq => (act - self.rhs).abs(),
        };
        if self.rhs.abs() > 1.0 {
            let norm = self.coeffs.iter().map(|&(_, a)| a * a).sum::<f64>().sqrt();
            if norm > 0.0 {
                return raw / norm;
            }
        }
        raw
    }
}

/// A mixed 0-1 linear program.
///
/// Models are built incrementally and are treated as immutable once handed
/// to a solver.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpModel {
    var_kinds: Vec<VarKind>,
    var_names: Vec<Option<String>>,
    constraints: Vec<Constraint>,
    objective: Vec<f64>,
    objective_offset: f64,
    sense: Sense,
}

impl Default for MilpModel {
    fn default() -> Self {
        Self::new(Sense::Minimize)
    }
}

impl MilpModel {
    pub fn new(sense: Sense) -> Self {
        Self {
            var_kinds: Vec::new(),
            var_names: Vec::new(),
            constraints: Vec::new(),
            objective: Vec::new(),
            objective_offset: 0.0,
            sense,
        }
    }

    pub fn add_binary(&mut self, name: impl Into<Option<String>>) -> usize {
        self.push_var(VarKind::Binary, name.into())
    }

    /// Adds a continuous variable. `lo` may be `-inf` and `hi` may be `+inf`.
    pub fn add_continuous(&mut self, name: impl Into<Option<String>>, lo: f64, hi: f64) -> Result<usize, ModelError> {
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(ModelError::InvalidBounds { var: self.var_kinds.len(), lo, hi });
        }
        Ok(self.push_var(VarKind::Continuous { lo, hi }, name.into()))
    }

    fn push_var(&mut self, kind: VarKind, name: Option<String>) -> usize {
        self.var_kinds.push(kind);
        self.var_names.push(name);
        self.objective.push(0.0);
        self.var_kinds.len() - 1
    }

    /// Appends a constraint; duplicate indices are merged and zero
    /// coefficients dropped.
    pub fn add_constraint(
        &mut self,
        coeffs: impl IntoIterator<Item = (usize, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> Result<usize, ModelError> {
        let row = self.constraints.len();
        let mut merged: Vec<(usize, f64)> = Vec::new();
        for (j, a) in coeffs {
            if j >= self.var_kinds.len() {
                return Err(ModelError::IndexOutOfRange { index: j, num_vars: self.var_kinds.len() });
            }
            if !a.is_finite() {
                return Err(ModelError::NonFinite { what: format!("coefficient of var {j} in row {row}") });
            }
            match merged.iter_mut().find(|(k, _)| *k == j) {
                Some(entry) => entry.1 += a,
                None => merged.push((j, a)),
            }
        }
        if !rhs.is_finite() {
            return Err(ModelError::NonFinite { what: format!("rhs of row {row}") });
        }
        merged.retain(|&(_, a)| a != 0.0);
        merged.sort_by_key(|&(j, _)| j);
        self.constraints.push(Constraint { coeffs: merged, relation, rhs });
        Ok(row)
    }

    pub fn set_objective_coeff(&mut self, var: usize, coeff: f64) -> Result<(), ModelError> {
        let n = self.var_kinds.len();
        let slot = self.objective.get_mut(var).ok_or(ModelError::IndexOutOfRange { index: var, num_vars: n })?;
        *slot = coeff;
        Ok(())
    }

    pub fn set_objective_offset(&mut self, offset: f64) {
        self.objective_offset = offset;
    }

    pub fn set_sense(&mut self, sense: Sense) {
        self.sense = sense;
    }

    pub fn num_vars(&self) -> usize {
        self.var_kinds.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn var_kinds(&self) -> &[VarKind] {
        &self.var_kinds
    }

    pub fn var_kind(&self, var: usize) -> VarKind {
        self.var_kinds[var]
    }

    pub fn var_name(&self, var: usize) -> Option<&str> {
        self.var_names[var].as_deref()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn objective_offset(&self) -> f64 {
        self.objective_offset
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn binary_indices(&self) -> Vec<usize> {
        (0..self.num_vars()).filter(|&j| self.var_kinds[j].is_binary()).collect()
    }

    pub fn num_binaries(&self) -> usize {
        self.var_kinds.iter().filter(|k| k.is_binary()).count()
    }

    pub fn evaluate_objective(&self, values: &[f64]) -> f64 {
        self.objective_offset + self.objective.iter().zip(values).map(|(c, v)| c * v).sum::<f64>()
    }

    /// Largest scaled row or bound violation of `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let rows = self.constraints.iter().map(|c| c.scaled_violation(values));
        let bounds = self.var_kinds.iter().zip(values).map(|(k, &v)| {
            let (lo, hi) = k.bounds();
            (lo - v).max(v - hi).max(0.0)
        });
        rows.chain(bounds).fold(0.0, f64::max)
    }

    /// Returns a copy in which every variable of `subset` becomes continuous
    /// on `[0, 1]`.
    pub fn relax_binaries(&self, subset: &[usize]) -> Result<MilpModel, ModelError> {
        let mut relaxed = self.clone();
        for &j in subset {
            match self.var_kinds.get(j) {
                None => return Err(ModelError::IndexOutOfRange { index: j, num_vars: self.num_vars() }),
                Some(VarKind::Continuous { .. }) => return Err(ModelError::NotBinary { var: j }),
                Some(VarKind::Binary) => relaxed.var_kinds[j] = VarKind::Continuous { lo: 0.0, hi: 1.0 },
            }
        }
        Ok(relaxed)
    }

    /// Relaxes all binaries.
    pub fn linear_relaxation(&self) -> MilpModel {
        self.relax_binaries(&self.binary_indices()).expect("binary indices are valid")
    }
}
