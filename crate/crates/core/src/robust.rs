//! The robust counterpart R(Γ) as a mixed 0-1 model, in the standard
//! dualized form, its relaxed form for totally unimodular X, and the
//! breakpoint form of the fractional variant.

use std::fmt;
use std::ops::Range;

use mprs_milp::{MilpModel, Relation, Sense};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::instance::{dot01, round_binary, Instance};
use crate::solver::SolverContext;

/// Largest distance from {0, 1} accepted for `x` in relaxed solves.
pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RobustMode {
    Standard,
    /// `ρ` and `x` relaxed to `[0, 1]`; only valid for totally unimodular X.
    TuRelaxed,
    /// The fractional variant of the uncertainty set.
    Variant,
}

impl fmt::Display for RobustMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RobustMode::Standard => "standard",
            RobustMode::TuRelaxed => "tu_relaxed",
            RobustMode::Variant => "variant",
        })
    }
}

impl std::str::FromStr for RobustMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(RobustMode::Standard),
            "tu_relaxed" | "tu-relaxed" => Ok(RobustMode::TuRelaxed),
            "variant" => Ok(RobustMode::Variant),
            other => Err(Error::InvalidArgument(format!("unknown solve mode {other:?}"))),
        }
    }
}

/// Column ranges of `(π, ρ, x)` inside a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardVars {
    pub pi: Range<usize>,
    pub rho: Range<usize>,
    pub x: Range<usize>,
}

/// Column ranges of `(w, α, ρ, x)` inside a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariantVars {
    pub w: Range<usize>,
    pub alpha: Range<usize>,
    pub rho: Range<usize>,
    pub x: Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RobustLayout {
    Standard(StandardVars),
    Variant(VariantVars),
}

/// A built robust model with the location of its variables.
#[derive(Debug, Clone)]
pub struct RobustModel {
    pub model: MilpModel,
    pub layout: RobustLayout,
}

/// Adds `π ∈ {0,1}^K`, `ρ`, `x` and the rows `π_k + ρ_j − x_j ≥ 0`.
pub(crate) fn add_standard_core(model: &mut MilpModel, inst: &Instance, relaxed: bool) -> Result<StandardVars> {
    let (k, n) = (inst.num_groups(), inst.n());
    let pi0 = model.num_vars();
    for g in 0..k {
        model.add_binary(format!("pi{g}"));
    }
    let rho0 = model.num_vars();
    for j in 0..n {
        if relaxed {
            model.add_continuous(format!("rho{j}"), 0.0, 1.0)?;
        } else {
            model.add_binary(format!("rho{j}"));
        }
    }
    let x0 = inst.append_x(model, relaxed)?;
    for j in 0..n {
        let coeffs = [(pi0 + inst.group_of(j), 1.0), (rho0 + j, 1.0), (x0 + j, -1.0)];
        model.add_constraint(coeffs, Relation::Ge, 0.0)?;
    }
    Ok(StandardVars { pi: pi0..pi0 + k, rho: rho0..rho0 + n, x: x0..x0 + n })
}

/// Adds the breakpoint variables `(w, α, ρ, x)` and their rows.
pub(crate) fn add_variant_core(model: &mut MilpModel, inst: &Instance) -> Result<VariantVars> {
    let n = inst.n();
    let d = inst.deviations();
    let w0 = model.num_vars();
    for j in 0..n {
        model.add_binary(format!("w{j}"));
    }
    let a0 = model.num_vars();
    for j in 0..n {
        model.add_binary(format!("alpha{j}"));
    }
    let rho0 = model.num_vars();
    for j in 0..n {
        // An optimal ρ_j = max(0, d_j x_j − π_k) never exceeds d_j.
        model.add_continuous(format!("rho{j}"), 0.0, d[j])?;
    }
    let x0 = inst.append_x(model, false)?;
    for j in 0..n {
        let group = &inst.partition()[inst.group_of(j)];
        let mut coeffs: Vec<(usize, f64)> = group.iter().map(|&s| (w0 + s, d[s])).collect();
        coeffs.push((rho0 + j, 1.0));
        coeffs.push((x0 + j, -d[j]));
        model.add_constraint(coeffs, Relation::Ge, 0.0)?;
    }
    for group in inst.partition() {
        model.add_constraint(group.iter().map(|&s| (a0 + s, 1.0)), Relation::Le, 1.0)?;
    }
    for j in 0..n {
        model.add_constraint([(w0 + j, 1.0), (a0 + j, -1.0), (x0 + j, -1.0)], Relation::Ge, -1.0)?;
    }
    Ok(VariantVars { w: w0..w0 + n, alpha: a0..a0 + n, rho: rho0..rho0 + n, x: x0..x0 + n })
}

fn build_standard(inst: &Instance, gamma: &[f64], relaxed: bool) -> Result<RobustModel> {
    check_len("budget vector", inst.num_groups(), gamma.len())?;
    let mut model = MilpModel::new(Sense::Minimize);
    let vars = add_standard_core(&mut model, inst, relaxed)?;
    for (k, &g) in gamma.iter().enumerate() {
        model.set_objective_coeff(vars.pi.start + k, g)?;
    }
    for j in 0..inst.n() {
        model.set_objective_coeff(vars.rho.start + j, inst.deviations()[j])?;
        model.set_objective_coeff(vars.x.start + j, inst.c_lower()[j])?;
    }
    Ok(RobustModel { model, layout: RobustLayout::Standard(vars) })
}

/// `min Γᵗπ + dᵗρ + c̲ᵗx` over binaries `π, ρ` and `x ∈ X`.
pub fn build_robust_milp(inst: &Instance, gamma: &[f64]) -> Result<RobustModel> {
    build_standard(inst, gamma, false)
}

/// [`build_robust_milp`] with `ρ` and `x` relaxed to `[0, 1]`.
pub fn build_robust_tu_relaxed(inst: &Instance, gamma: &[f64]) -> Result<RobustModel> {
    build_standard(inst, gamma, true)
}

/// Breakpoint model of the variant: the group multiplier is `Σ_{s∈P_k} d_s w_s`.
pub fn build_robust_variant_milp(inst: &Instance, gamma: &[f64]) -> Result<RobustModel> {
    check_len("budget vector", inst.num_groups(), gamma.len())?;
    let mut model = MilpModel::new(Sense::Minimize);
    let vars = add_variant_core(&mut model, inst)?;
    let d = inst.deviations();
    for j in 0..inst.n() {
        model.set_objective_coeff(vars.w.start + j, gamma[inst.group_of(j)] * d[j])?;
        model.set_objective_coeff(vars.rho.start + j, 1.0)?;
        model.set_objective_coeff(vars.x.start + j, inst.c_lower()[j])?;
    }
    Ok(RobustModel { model, layout: RobustLayout::Variant(vars) })
}

/// The dual certificate stored with a robust solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum Certificate {
    Standard { pi: Vec<u8>, rho: Vec<u8> },
    Variant { w: Vec<u8>, alpha: Vec<u8>, rho: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustSolution {
    pub x: Vec<u8>,
    pub certificate: Certificate,
    /// Objective of the robust model at the budget it was solved for.
    pub value: f64,
    pub mode: RobustMode,
}

impl RobustSolution {
    /// Coefficient of each `Γ_k` in the certified value: `π_k`, or
    /// `Σ_{s∈P_k} d_s w_s` for the variant.
    pub fn gamma_coefficients(&self, inst: &Instance) -> Vec<f64> {
        match &self.certificate {
            Certificate::Standard { pi, .. } => pi.iter().map(|&p| f64::from(p)).collect(),
            Certificate::Variant { w, .. } => variant_multipliers(inst, w),
        }
    }

    /// Part of the certified value that does not depend on Γ.
    pub fn fixed_cost(&self, inst: &Instance) -> f64 {
        let rho_cost = match &self.certificate {
            Certificate::Standard { rho, .. } => dot01(inst.deviations(), rho),
            Certificate::Variant { rho, .. } => rho.iter().sum(),
        };
        rho_cost + inst.nominal_cost(&self.x)
    }

    /// Certified upper bound on the robustness of `x` at `gamma`.
    pub fn stored_value(&self, inst: &Instance, gamma: &[f64]) -> f64 {
        let coeffs = self.gamma_coefficients(inst);
        coeffs.iter().zip(gamma).map(|(c, g)| c * g).sum::<f64>() + self.fixed_cost(inst)
    }

    /// Replays the coupling rows of the certificate.
    pub fn check_certificate(&self, inst: &Instance) -> Result<()> {
        check_len("solution vector", inst.n(), self.x.len())?;
        let ok = match &self.certificate {
            Certificate::Standard { pi, rho } => (0..inst.n()).all(|j| pi[inst.group_of(j)] + rho[j] >= self.x[j]),
            Certificate::Variant { w, alpha, rho } => {
                let mult = variant_multipliers(inst, w);
                let d = inst.deviations();
                let rows =
                    (0..inst.n()).all(|j| mult[inst.group_of(j)] + rho[j] - d[j] * f64::from(self.x[j]) >= -1e-9);
                let links = (0..inst.n()).all(|j| w[j] + 1 >= alpha[j] + self.x[j]);
                let picks = inst.partition().iter().all(|g| g.iter().map(|&s| alpha[s] as usize).sum::<usize>() <= 1);
                rows && links && picks
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Invariant("robust certificate violates a coupling row".into()))
        }
    }
}

fn variant_multipliers(inst: &Instance, w: &[u8]) -> Vec<f64> {
    let d = inst.deviations();
    inst.partition().iter().map(|g| g.iter().filter(|&&s| w[s] != 0).map(|&s| d[s]).sum()).collect()
}

/// Reads `(π, ρ, x)` from solver values; relaxed solves must return integral `x`
/// and get `ρ_j = (1 − π_k) x_j`.
pub(crate) fn extract_standard(
    inst: &Instance,
    vars: &StandardVars,
    values: &[f64],
    relaxed: bool,
) -> Result<(Vec<u8>, Certificate)> {
    let raw_x = &values[vars.x.clone()];
    if relaxed {
        let dev = raw_x.iter().fold(0.0f64, |m, v| m.max((v - v.round()).abs()));
        if dev > INTEGRALITY_TOL {
            return Err(Error::Invariant(format!(
                "relaxed solve on a totally unimodular instance returned fractional x (deviation {dev:.3e})"
            )));
        }
    }
    let pi = round_binary(&values[vars.pi.clone()]);
    let x = round_binary(raw_x);
    let rho = if relaxed {
        (0..inst.n()).map(|j| (1 - pi[inst.group_of(j)]) * x[j]).collect()
    } else {
        round_binary(&values[vars.rho.clone()])
    };
    Ok((x, Certificate::Standard { pi, rho }))
}

/// Reads `(w, α, x)`; `ρ` is recomputed as its optimal completion.
pub(crate) fn extract_variant(inst: &Instance, vars: &VariantVars, values: &[f64]) -> (Vec<u8>, Certificate) {
    let w = round_binary(&values[vars.w.clone()]);
    let alpha = round_binary(&values[vars.alpha.clone()]);
    let x = round_binary(&values[vars.x.clone()]);
    let mult = variant_multipliers(inst, &w);
    let d = inst.deviations();
    let rho = (0..inst.n()).map(|j| (d[j] * f64::from(x[j]) - mult[inst.group_of(j)]).max(0.0)).collect();
    (x, Certificate::Variant { w, alpha, rho })
}

/// Solves R(Γ) in the requested formulation.
pub fn solve_robust(
    inst: &Instance,
    gamma: &[f64],
    mode: RobustMode,
    solver: &SolverContext,
) -> Result<RobustSolution> {
    if mode == RobustMode::TuRelaxed && !inst.is_totally_unimodular() {
        return Err(Error::Unsupported(format!(
            "tu_relaxed mode needs an instance declared totally unimodular ({} is not)",
            inst.kind()
        )));
    }
    let built = match mode {
        RobustMode::Standard => build_robust_milp(inst, gamma)?,
        RobustMode::TuRelaxed => build_robust_tu_relaxed(inst, gamma)?,
        RobustMode::Variant => build_robust_variant_milp(inst, gamma)?,
    };
    let sol = solver.solve_optimal(&built.model, "robust counterpart")?;
    let (x, certificate) = match &built.layout {
        RobustLayout::Standard(vars) => extract_standard(inst, vars, &sol.values, mode == RobustMode::TuRelaxed)?,
        RobustLayout::Variant(vars) => extract_variant(inst, vars, &sol.values),
    };
    let mut out = RobustSolution { x, certificate, value: 0.0, mode };
    out.value = out.stored_value(inst, gamma);
    Ok(out)
}

/// `c(π)_j = c̲_j` when `π_k = 1`, else `c̲_j + d_j`, for `j ∈ P_k`.
pub fn cost_for_pi(inst: &Instance, pi: &[u8]) -> Result<Vec<f64>> {
    check_len("group indicator", inst.num_groups(), pi.len())?;
    Ok((0..inst.n())
        .map(|j| {
            let c = inst.c_lower()[j];
            if pi[inst.group_of(j)] != 0 {
                c
            } else {
                c + inst.deviations()[j]
            }
        })
        .collect())
}
