//! Master problems Q: over Γ ∈ Ω and a fresh robust triple, maximize the gap
//! between the best stored certificate and the new one.

use std::ops::Range;

use mprs_milp::{MilpModel, Relation, Sense};

use crate::error::{check_len, Error, Result};
use crate::instance::Instance;
use crate::robust::{
    add_standard_core, add_variant_core, extract_standard, extract_variant, Certificate, RobustMode, RobustSolution,
    StandardVars, VariantVars,
};
use crate::uncertainty::{GammaVector, OmegaSpec};

/// Which Q model a run solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QFormulation {
    /// The model tailored to the kind of Ω.
    #[default]
    Specialized,
    /// Γ as continuous variables constrained by the linear description of Ω.
    General,
}

#[derive(Debug, Clone)]
enum GammaSource {
    /// Γ_k = ℒ_k π_k + 𝒰_k (1 − π_k).
    FromPi {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Box {
        vars: Range<usize>,
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Alpha {
        var: usize,
        direction: Vec<f64>,
        lo: f64,
        hi: f64,
    },
    Beta {
        vars: Range<usize>,
        base: Vec<f64>,
        spread: Vec<f64>,
    },
}

#[derive(Debug, Clone)]
pub enum QCore {
    Standard { vars: StandardVars, relaxed: bool },
    Variant(VariantVars),
}

/// A built master problem and how to read its solution.
#[derive(Debug, Clone)]
pub struct QModel {
    pub model: MilpModel,
    pub core: QCore,
    pub sigma: usize,
    source: GammaSource,
}

impl QModel {
    /// Γ at a solution; components are clamped into Ω's defining bounds.
    pub fn decode_gamma(&self, values: &[f64]) -> GammaVector {
        let g: Vec<f64> = match &self.source {
            GammaSource::FromPi { lower, upper } => {
                let QCore::Standard { vars, .. } = &self.core else { unreachable!("interval Q has a standard core") };
                (0..lower.len()).map(|k| if values[vars.pi.start + k] >= 0.5 { lower[k] } else { upper[k] }).collect()
            }
            GammaSource::Box { vars, lower, upper } => {
                vars.clone().enumerate().map(|(k, v)| values[v].clamp(lower[k], upper[k])).collect()
            }
            GammaSource::Alpha { var, direction, lo, hi } => {
                let a = values[*var].clamp(*lo, *hi);
                direction.iter().map(|g| a * g).collect()
            }
            GammaSource::Beta { vars, base, spread } => {
                vars.clone().enumerate().map(|(k, v)| base[k] + values[v].clamp(0.0, spread[k])).collect()
            }
        };
        GammaVector::from_solver(g)
    }

    /// The new robust triple proposed at a solution.
    pub fn decode_solution(&self, inst: &Instance, values: &[f64], mode: RobustMode) -> Result<RobustSolution> {
        let (x, certificate) = match &self.core {
            QCore::Standard { vars, relaxed } => extract_standard(inst, vars, values, *relaxed)?,
            QCore::Variant(vars) => extract_variant(inst, vars, values),
        };
        let gamma = self.decode_gamma(values);
        let mut sol = RobustSolution { x, certificate, value: 0.0, mode };
        sol.value = sol.stored_value(inst, &gamma);
        Ok(sol)
    }
}

fn check_inputs(inst: &Instance, omega: &OmegaSpec, history: &[RobustSolution], variant: bool) -> Result<()> {
    if history.is_empty() {
        return Err(Error::EmptyHistory);
    }
    omega.validate()?;
    check_len("parameter domain", inst.num_groups(), omega.dim())?;
    for h in history {
        check_len("stored solution", inst.n(), h.x.len())?;
        let is_variant = matches!(h.certificate, Certificate::Variant { .. });
        if is_variant != variant {
            return Err(Error::InvalidArgument(format!(
                "history holds {} certificates but the master problem expects {} ones",
                if is_variant { "variant" } else { "standard" },
                if variant { "variant" } else { "standard" },
            )));
        }
    }
    Ok(())
}

fn add_sigma(model: &mut MilpModel) -> Result<usize> {
    let sigma = model.add_continuous("sigma".to_string(), f64::NEG_INFINITY, f64::INFINITY)?;
    model.set_objective_coeff(sigma, 1.0)?;
    Ok(sigma)
}

/// Objective `− dᵗρ − c̲ᵗx` (standard) or `− Σρ − c̲ᵗx` (variant).
fn charge_core(
    model: &mut MilpModel,
    inst: &Instance,
    rho: &Range<usize>,
    x: &Range<usize>,
    unit_rho: bool,
) -> Result<()> {
    for j in 0..inst.n() {
        let rc = if unit_rho { 1.0 } else { inst.deviations()[j] };
        model.set_objective_coeff(rho.start + j, -rc)?;
        model.set_objective_coeff(x.start + j, -inst.c_lower()[j])?;
    }
    Ok(())
}

/// Γ variables bounded by 𝒰 plus the linear description of Ω.
fn embed_omega(model: &mut MilpModel, omega: &OmegaSpec) -> Result<(Range<usize>, GammaSource)> {
    let upper = omega.upper();
    let k = omega.dim();
    let g0 = model.num_vars();
    let lower = match omega {
        OmegaSpec::Interval { lower, .. } => lower.clone(),
        OmegaSpec::Budgeted { base, .. } => base.clone(),
        OmegaSpec::Segment { .. } => vec![0.0; k],
    };
    for i in 0..k {
        model.add_continuous(format!("gamma{i}"), lower[i], upper[i])?;
    }
    let gamma = g0..g0 + k;
    let source = match omega {
        OmegaSpec::Interval { lower, upper } => {
            GammaSource::Box { vars: gamma.clone(), lower: lower.clone(), upper: upper.clone() }
        }
        OmegaSpec::Segment { direction, alpha_min, alpha_max } => {
            let a = model.add_continuous("alpha".to_string(), *alpha_min, *alpha_max)?;
            for i in 0..k {
                model.add_constraint([(g0 + i, 1.0), (a, -direction[i])], Relation::Eq, 0.0)?;
            }
            GammaSource::Alpha { var: a, direction: direction.clone(), lo: *alpha_min, hi: *alpha_max }
        }
        OmegaSpec::Budgeted { base, spread, budget } => {
            let b0 = model.num_vars();
            for i in 0..k {
                model.add_continuous(format!("beta{i}"), 0.0, spread[i])?;
            }
            for i in 0..k {
                model.add_constraint([(g0 + i, 1.0), (b0 + i, -1.0)], Relation::Eq, base[i])?;
            }
            model.add_constraint((0..k).map(|i| (b0 + i, 1.0)), Relation::Le, *budget)?;
            GammaSource::Beta { vars: b0..b0 + k, base: base.clone(), spread: spread.clone() }
        }
    };
    Ok((gamma, source))
}

/// Ω embedded through continuous Γ; `w_k = Γ_k π_k` via `w_k − Γ_k − 𝒰_k π_k ≥ −𝒰_k`.
pub fn build_q_general(
    inst: &Instance,
    omega: &OmegaSpec,
    history: &[RobustSolution],
    relaxed: bool,
) -> Result<QModel> {
    check_inputs(inst, omega, history, false)?;
    let mut model = MilpModel::new(Sense::Maximize);
    let vars = add_standard_core(&mut model, inst, relaxed)?;
    charge_core(&mut model, inst, &vars.rho, &vars.x, false)?;
    let (gamma, source) = embed_omega(&mut model, omega)?;
    let upper = omega.upper();
    for k in 0..inst.num_groups() {
        let w = model.add_continuous(format!("w{k}"), 0.0, upper[k])?;
        model.set_objective_coeff(w, -1.0)?;
        model.add_constraint(
            [(w, 1.0), (gamma.start + k, -1.0), (vars.pi.start + k, -upper[k])],
            Relation::Ge,
            -upper[k],
        )?;
    }
    let sigma = add_sigma(&mut model)?;
    for h in history {
        let pi = h.gamma_coefficients(inst);
        let mut coeffs = vec![(sigma, 1.0)];
        coeffs.extend(pi.iter().enumerate().map(|(k, &p)| (gamma.start + k, -p)));
        model.add_constraint(coeffs, Relation::Le, h.fixed_cost(inst))?;
    }
    Ok(QModel { model, core: QCore::Standard { vars, relaxed }, sigma, source })
}

/// Box Ω without Γ variables: Γ is read off π as ℒ where `π_k = 1`, else 𝒰.
pub fn build_q_interval(
    inst: &Instance,
    omega: &OmegaSpec,
    history: &[RobustSolution],
    relaxed: bool,
) -> Result<QModel> {
    let OmegaSpec::Interval { lower, upper } = omega else {
        return Err(Error::InvalidArgument(format!(
            "interval master needs an interval domain, got {}",
            omega.kind_name()
        )));
    };
    check_inputs(inst, omega, history, false)?;
    let mut model = MilpModel::new(Sense::Maximize);
    let vars = add_standard_core(&mut model, inst, relaxed)?;
    charge_core(&mut model, inst, &vars.rho, &vars.x, false)?;
    for k in 0..inst.num_groups() {
        model.set_objective_coeff(vars.pi.start + k, -lower[k])?;
    }
    let sigma = add_sigma(&mut model)?;
    for h in history {
        let pi = h.gamma_coefficients(inst);
        let mut coeffs = vec![(sigma, 1.0)];
        coeffs.extend(pi.iter().enumerate().map(|(k, &p)| (vars.pi.start + k, (upper[k] - lower[k]) * p)));
        let rhs = h.fixed_cost(inst) + pi.iter().zip(upper).map(|(p, u)| p * u).sum::<f64>();
        model.add_constraint(coeffs, Relation::Le, rhs)?;
    }
    let source = GammaSource::FromPi { lower: lower.clone(), upper: upper.clone() };
    Ok(QModel { model, core: QCore::Standard { vars, relaxed }, sigma, source })
}

/// Segment Ω through the scalar α.
pub fn build_q_segment(
    inst: &Instance,
    omega: &OmegaSpec,
    history: &[RobustSolution],
    relaxed: bool,
) -> Result<QModel> {
    let OmegaSpec::Segment { direction, alpha_min, alpha_max } = omega else {
        return Err(Error::InvalidArgument(format!(
            "segment master needs a segment domain, got {}",
            omega.kind_name()
        )));
    };
    check_inputs(inst, omega, history, false)?;
    let mut model = MilpModel::new(Sense::Maximize);
    let vars = add_standard_core(&mut model, inst, relaxed)?;
    charge_core(&mut model, inst, &vars.rho, &vars.x, false)?;
    let a = model.add_continuous("alpha".to_string(), *alpha_min, *alpha_max)?;
    for k in 0..inst.num_groups() {
        let top = alpha_max * direction[k];
        let w = model.add_continuous(format!("w{k}"), 0.0, top)?;
        model.set_objective_coeff(w, -1.0)?;
        model.add_constraint([(w, 1.0), (a, -direction[k]), (vars.pi.start + k, -top)], Relation::Ge, -top)?;
    }
    let sigma = add_sigma(&mut model)?;
    for h in history {
        let pi = h.gamma_coefficients(inst);
        let slope: f64 = pi.iter().zip(direction).map(|(p, g)| p * g).sum();
        model.add_constraint([(sigma, 1.0), (a, -slope)], Relation::Le, h.fixed_cost(inst))?;
    }
    let source = GammaSource::Alpha { var: a, direction: direction.clone(), lo: *alpha_min, hi: *alpha_max };
    Ok(QModel { model, core: QCore::Standard { vars, relaxed }, sigma, source })
}

/// Budgeted Ω through the offsets β.
pub fn build_q_budgeted(
    inst: &Instance,
    omega: &OmegaSpec,
    history: &[RobustSolution],
    relaxed: bool,
) -> Result<QModel> {
    let OmegaSpec::Budgeted { base, spread, budget } = omega else {
        return Err(Error::InvalidArgument(format!(
            "budgeted master needs a budgeted domain, got {}",
            omega.kind_name()
        )));
    };
    check_inputs(inst, omega, history, false)?;
    let k_count = inst.num_groups();
    let mut model = MilpModel::new(Sense::Maximize);
    let vars = add_standard_core(&mut model, inst, relaxed)?;
    charge_core(&mut model, inst, &vars.rho, &vars.x, false)?;
    let b0 = model.num_vars();
    for k in 0..k_count {
        model.add_continuous(format!("beta{k}"), 0.0, spread[k])?;
    }
    model.add_constraint((0..k_count).map(|k| (b0 + k, 1.0)), Relation::Le, *budget)?;
    for k in 0..k_count {
        let top = base[k] + spread[k];
        let w = model.add_continuous(format!("w{k}"), 0.0, top)?;
        model.set_objective_coeff(w, -1.0)?;
        model.add_constraint([(w, 1.0), (b0 + k, -1.0), (vars.pi.start + k, -top)], Relation::Ge, -spread[k])?;
    }
    let sigma = add_sigma(&mut model)?;
    for h in history {
        let pi = h.gamma_coefficients(inst);
        let mut coeffs = vec![(sigma, 1.0)];
        coeffs.extend(pi.iter().enumerate().map(|(k, &p)| (b0 + k, -p)));
        let rhs = h.fixed_cost(inst) + pi.iter().zip(base).map(|(p, g)| p * g).sum::<f64>();
        model.add_constraint(coeffs, Relation::Le, rhs)?;
    }
    let source = GammaSource::Beta { vars: b0..b0 + k_count, base: base.clone(), spread: spread.clone() };
    Ok(QModel { model, core: QCore::Standard { vars, relaxed }, sigma, source })
}

/// Master problem of the fractional variant. The products `Γ_k w_s` of the
/// new candidate are linearized as `z_s ≥ Γ_k − 𝒰_k (1 − w_s)`, `z_s ≥ 0`.
pub fn build_q_variant(inst: &Instance, omega: &OmegaSpec, history: &[RobustSolution]) -> Result<QModel> {
    check_inputs(inst, omega, history, true)?;
    let mut model = MilpModel::new(Sense::Maximize);
    let vars = add_variant_core(&mut model, inst)?;
    charge_core(&mut model, inst, &vars.rho, &vars.x, true)?;
    let (gamma, source) = embed_omega(&mut model, omega)?;
    let upper = omega.upper();
    let d = inst.deviations();
    for s in 0..inst.n() {
        let k = inst.group_of(s);
        let z = model.add_continuous(format!("z{s}"), 0.0, upper[k])?;
        model.set_objective_coeff(z, -d[s])?;
        model.add_constraint(
            [(z, 1.0), (gamma.start + k, -1.0), (vars.w.start + s, -upper[k])],
            Relation::Ge,
            -upper[k],
        )?;
    }
    let sigma = add_sigma(&mut model)?;
    for h in history {
        let mult = h.gamma_coefficients(inst);
        let mut coeffs = vec![(sigma, 1.0)];
        coeffs.extend(mult.iter().enumerate().map(|(k, &m)| (gamma.start + k, -m)));
        model.add_constraint(coeffs, Relation::Le, h.fixed_cost(inst))?;
    }
    Ok(QModel { model, core: QCore::Variant(vars), sigma, source })
}

/// Dispatches to the builder matching the mode, Ω and formulation.
pub fn build_q(
    inst: &Instance,
    omega: &OmegaSpec,
    history: &[RobustSolution],
    mode: RobustMode,
    formulation: QFormulation,
) -> Result<QModel> {
    let relaxed = mode == RobustMode::TuRelaxed;
    match (mode, formulation, omega) {
        (RobustMode::Variant, _, _) => build_q_variant(inst, omega, history),
        (_, QFormulation::General, _) => build_q_general(inst, omega, history, relaxed),
        (_, QFormulation::Specialized, OmegaSpec::Interval { .. }) => build_q_interval(inst, omega, history, relaxed),
        (_, QFormulation::Specialized, OmegaSpec::Segment { .. }) => build_q_segment(inst, omega, history, relaxed),
        (_, QFormulation::Specialized, OmegaSpec::Budgeted { .. }) => build_q_budgeted(inst, omega, history, relaxed),
    }
}
