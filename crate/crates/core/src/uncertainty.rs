//! Locally budgeted uncertainty sets, the fractional variant, and the
//! parameter domains Ω over the group budgets Γ.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::instance::{dot01, Instance};
use crate::rng::UnitRng;

/// Tolerance for membership tests and for equalities such as Γ = αΓ⁰.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Largest K for which vertex enumeration is allowed.
pub const MAX_VERTEX_DIM: usize = 20;

const MAX_GRID_POINTS: usize = 1_000_000;

/// A vector of nonnegative group budgets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct GammaVector(Vec<f64>);

impl GammaVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidArgument(format!("budget entries must be finite and >= 0, got {v}")));
        }
        Ok(Self(values))
    }

    pub fn zeros(k: usize) -> Self {
        Self(vec![0.0; k])
    }

    /// Clamps tiny negative round-off to zero.
    pub(crate) fn from_solver(values: Vec<f64>) -> Self {
        Self(values.into_iter().map(|v| v.max(0.0)).collect())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for GammaVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for GammaVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<GammaVector> for Vec<f64> {
    fn from(g: GammaVector) -> Self {
        g.0
    }
}

/// The domain Ω of admissible budget vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OmegaSpec {
    /// `lower <= Γ <= upper`.
    Interval { lower: Vec<f64>, upper: Vec<f64> },
    /// `Γ = α Γ⁰` with `α` in `[alpha_min, alpha_max]`.
    Segment { direction: Vec<f64>, alpha_min: f64, alpha_max: f64 },
    /// `Γ = base + β`, `0 <= β <= spread`, `Σ β <= budget`.
    Budgeted { base: Vec<f64>, spread: Vec<f64>, budget: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    /// `m` evenly spaced values per free coordinate, endpoints included.
    Grid(usize),
    Uniform {
        seed: u64,
        count: usize,
    },
    Vertices,
}

fn nonneg(what: &str, v: &[f64]) -> Result<()> {
    match v.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        Some(x) => Err(Error::InvalidOmega(format!("{what} must be finite and >= 0, got {x}"))),
        None => Ok(()),
    }
}

impl OmegaSpec {
    pub fn interval(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let omega = OmegaSpec::Interval { lower, upper };
        omega.validate()?;
        Ok(omega)
    }

    pub fn segment(direction: Vec<f64>, alpha_min: f64, alpha_max: f64) -> Result<Self> {
        let omega = OmegaSpec::Segment { direction, alpha_min, alpha_max };
        omega.validate()?;
        Ok(omega)
    }

    pub fn budgeted(base: Vec<f64>, spread: Vec<f64>, budget: f64) -> Result<Self> {
        let omega = OmegaSpec::Budgeted { base, spread, budget };
        omega.validate()?;
        Ok(omega)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            OmegaSpec::Interval { lower, upper } => {
                check_len("interval upper bound", lower.len(), upper.len())?;
                nonneg("interval lower bound", lower)?;
                nonneg("interval upper bound", upper)?;
                if let Some(k) = (0..lower.len()).find(|&k| lower[k] > upper[k]) {
                    return Err(Error::InvalidOmega(format!(
                        "interval lower bound exceeds upper bound in coordinate {k}"
                    )));
                }
            }
            OmegaSpec::Segment { direction, alpha_min, alpha_max } => {
                nonneg("segment direction", direction)?;
                if !(0.0 <= *alpha_min && alpha_min <= alpha_max && *alpha_max <= 1.0) {
                    return Err(Error::InvalidOmega(format!(
                        "segment needs 0 <= alpha_min <= alpha_max <= 1, got [{alpha_min}, {alpha_max}]"
                    )));
                }
            }
            OmegaSpec::Budgeted { base, spread, budget } => {
                check_len("budgeted spread", base.len(), spread.len())?;
                nonneg("budgeted base", base)?;
                nonneg("budgeted spread", spread)?;
                nonneg("budgeted total", &[*budget])?;
            }
        }
        if self.dim() == 0 {
            return Err(Error::InvalidOmega("parameter domain has dimension 0".into()));
        }
        Ok(())
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            OmegaSpec::Interval { .. } => "interval",
            OmegaSpec::Segment { .. } => "segment",
            OmegaSpec::Budgeted { .. } => "budgeted",
        }
    }

    /// Dimension K.
    pub fn dim(&self) -> usize {
        match self {
            OmegaSpec::Interval { lower, .. } => lower.len(),
            OmegaSpec::Segment { direction, .. } => direction.len(),
            OmegaSpec::Budgeted { base, .. } => base.len(),
        }
    }

    /// Componentwise upper bound 𝒰 of Ω.
    pub fn upper(&self) -> Vec<f64> {
        match self {
            OmegaSpec::Interval { upper, .. } => upper.clone(),
            OmegaSpec::Segment { direction, alpha_max, .. } => direction.iter().map(|g| alpha_max * g).collect(),
            OmegaSpec::Budgeted { base, spread, .. } => base.iter().zip(spread).map(|(b, s)| b + s).collect(),
        }
    }

    /// Componentwise smallest point of Ω, where the run starts.
    pub fn initial_gamma(&self) -> GammaVector {
        GammaVector(match self {
            OmegaSpec::Interval { lower, .. } => lower.clone(),
            OmegaSpec::Segment { direction, alpha_min, .. } => direction.iter().map(|g| alpha_min * g).collect(),
            OmegaSpec::Budgeted { base, .. } => base.clone(),
        })
    }

    pub fn contains(&self, gamma: &[f64]) -> bool {
        if gamma.len() != self.dim() || gamma.iter().any(|g| !g.is_finite() || *g < -MEMBERSHIP_TOL) {
            return false;
        }
        let tol = MEMBERSHIP_TOL;
        match self {
            OmegaSpec::Interval { lower, upper } => {
                (0..gamma.len()).all(|k| gamma[k] >= lower[k] - tol && gamma[k] <= upper[k] + tol)
            }
            OmegaSpec::Segment { direction, alpha_min, alpha_max } => {
                let Some(anchor) = (0..direction.len()).max_by(|&a, &b| direction[a].total_cmp(&direction[b])) else {
                    return false;
                };
                if direction[anchor] == 0.0 {
                    return gamma.iter().all(|g| g.abs() <= tol);
                }
                let alpha = gamma[anchor] / direction[anchor];
                if alpha < alpha_min - tol || alpha > alpha_max + tol {
                    return false;
                }
                (0..gamma.len()).all(|k| (gamma[k] - alpha * direction[k]).abs() <= tol * direction[k].max(1.0))
            }
            OmegaSpec::Budgeted { base, spread, budget } => {
                let mut total = 0.0;
                for k in 0..gamma.len() {
                    let beta = gamma[k] - base[k];
                    if beta < -tol || beta > spread[k] + tol {
                        return false;
                    }
                    total += beta.max(0.0);
                }
                total <= budget + tol * budget.max(1.0)
            }
        }
    }

    /// Points of Ω for checks and reports; every point passes [`OmegaSpec::contains`].
    pub fn sample(&self, mode: SampleMode) -> Result<Vec<GammaVector>> {
        self.validate()?;
        let k = self.dim();
        let points: Vec<Vec<f64>> = match (self, mode) {
            (_, SampleMode::Grid(m)) if m < 2 => {
                return Err(Error::InvalidArgument(format!("grid sampling needs m >= 2, got {m}")))
            }
            (OmegaSpec::Segment { direction, alpha_min, alpha_max }, SampleMode::Grid(m)) => (0..m)
                .map(|i| {
                    let alpha = lerp(*alpha_min, *alpha_max, i, m);
                    direction.iter().map(|g| alpha * g).collect()
                })
                .collect(),
            (OmegaSpec::Interval { lower, upper }, SampleMode::Grid(m)) => {
                grid_guard(m, k)?;
                box_grid(lower, upper, m)
            }
            (OmegaSpec::Budgeted { base, spread, budget }, SampleMode::Grid(m)) => {
                grid_guard(m, k)?;
                let zero = vec![0.0; k];
                box_grid(&zero, spread, m)
                    .into_iter()
                    .filter(|beta| beta.iter().sum::<f64>() <= budget + MEMBERSHIP_TOL * budget.max(1.0))
                    .map(|beta| beta.iter().zip(base).map(|(b, g)| g + b).collect())
                    .collect()
            }
            (_, SampleMode::Uniform { seed, count }) => {
                let mut rng = UnitRng::new(seed);
                (0..count).map(|_| self.uniform_point(&mut rng)).collect()
            }
            (OmegaSpec::Segment { .. }, SampleMode::Vertices) => {
                return Err(Error::Unsupported("vertex sampling applies to interval and budgeted domains".into()))
            }
            (_, SampleMode::Vertices) if k > MAX_VERTEX_DIM => {
                return Err(Error::TooLarge {
                    what: format!("vertex enumeration in dimension {k}"),
                    limit: MAX_VERTEX_DIM,
                })
            }
            (OmegaSpec::Interval { lower, upper }, SampleMode::Vertices) => box_grid(lower, upper, 2),
            (OmegaSpec::Budgeted { base, spread, budget }, SampleMode::Vertices) => {
                let mut out = vec![base.clone()];
                for i in 0..k {
                    let mut g = base.clone();
                    g[i] += budget.min(spread[i]);
                    out.push(g);
                }
                out
            }
        };
        Ok(points.into_iter().map(GammaVector).collect())
    }

    fn uniform_point(&self, rng: &mut UnitRng) -> Vec<f64> {
        match self {
            OmegaSpec::Interval { lower, upper } => lower.iter().zip(upper).map(|(&l, &u)| rng.uniform(l, u)).collect(),
            OmegaSpec::Segment { direction, alpha_min, alpha_max } => {
                let alpha = rng.uniform(*alpha_min, *alpha_max);
                direction.iter().map(|g| alpha * g).collect()
            }
            OmegaSpec::Budgeted { base, spread, budget } => {
                let mut beta: Vec<f64> = spread.iter().map(|&s| rng.uniform(0.0, s)).collect();
                let total: f64 = beta.iter().sum();
                if total > *budget {
                    let scale = budget / total;
                    beta.iter_mut().for_each(|b| *b *= scale);
                }
                base.iter().zip(&beta).map(|(g, b)| g + b).collect()
            }
        }
    }
}

fn lerp(lo: f64, hi: f64, i: usize, m: usize) -> f64 {
    if i + 1 == m {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (m - 1) as f64
    }
}

fn grid_guard(m: usize, k: usize) -> Result<()> {
    let total = (m as f64).powi(k as i32);
    if total > MAX_GRID_POINTS as f64 {
        return Err(Error::TooLarge { what: format!("grid of {m}^{k} points"), limit: MAX_GRID_POINTS });
    }
    Ok(())
}

/// Cartesian grid with the last coordinate varying fastest.
fn box_grid(lower: &[f64], upper: &[f64], m: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::with_capacity(lower.len())];
    for (&l, &u) in lower.iter().zip(upper) {
        let levels: Vec<f64> = if l == u { vec![l] } else { (0..m).map(|i| lerp(l, u, i, m)).collect() };
        out = out
            .into_iter()
            .flat_map(|prefix| {
                levels.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

fn check_args(inst: &Instance, x: &[u8], gamma: &[f64]) -> Result<()> {
    check_len("solution vector", inst.n(), x.len())?;
    check_len("budget vector", inst.num_groups(), gamma.len())
}

/// Worst-case cost `max_{c in Λ(Γ)} c^t x`, in closed form.
pub fn robustness_value(inst: &Instance, x: &[u8], gamma: &[f64]) -> Result<f64> {
    check_args(inst, x, gamma)?;
    let d = inst.deviations();
    let extra: f64 = inst
        .partition()
        .iter()
        .zip(gamma)
        .map(|(group, &g)| {
            let room: f64 = group.iter().filter(|&&j| x[j] != 0).map(|&j| d[j]).sum();
            g.min(room)
        })
        .sum();
    Ok(inst.nominal_cost(x) + extra)
}

/// Active deviations of a group, largest first (ties by index).
fn sorted_active(group: &[usize], x: &[u8], d: &[f64]) -> Vec<usize> {
    let mut active: Vec<usize> = group.iter().copied().filter(|&j| x[j] != 0).collect();
    active.sort_by(|&a, &b| d[b].total_cmp(&d[a]).then(a.cmp(&b)));
    active
}

/// Fractions `λ_j` of the fractional-knapsack worst case of the variant set.
fn variant_fractions(inst: &Instance, x: &[u8], gamma: &[f64]) -> Vec<f64> {
    let d = inst.deviations();
    let mut lambda = vec![0.0; inst.n()];
    for (group, &g) in inst.partition().iter().zip(gamma) {
        let mut left = g;
        for j in sorted_active(group, x, d) {
            if left <= 0.0 {
                break;
            }
            let take = left.min(1.0);
            lambda[j] = take;
            left -= take;
        }
    }
    lambda
}

/// Worst-case cost over the variant set where `λ_j` in `[0, 1]` scales `d_j`.
pub fn robustness_value_variant(inst: &Instance, x: &[u8], gamma: &[f64]) -> Result<f64> {
    check_args(inst, x, gamma)?;
    let lambda = variant_fractions(inst, x, gamma);
    let extra: f64 = (0..inst.n()).filter(|&j| x[j] != 0).map(|j| lambda[j] * inst.deviations()[j]).sum();
    Ok(inst.nominal_cost(x) + extra)
}

/// A cost vector attaining the worst case for `x`.
pub fn worst_case_cost_vector(inst: &Instance, x: &[u8], gamma: &[f64], variant: bool) -> Result<Vec<f64>> {
    check_args(inst, x, gamma)?;
    let d = inst.deviations();
    let mut c = inst.c_lower().to_vec();
    if variant {
        for (j, l) in variant_fractions(inst, x, gamma).into_iter().enumerate() {
            c[j] += l * d[j];
        }
    } else {
        for (group, &g) in inst.partition().iter().zip(gamma) {
            let mut left = g;
            for &j in group.iter().filter(|&&j| x[j] != 0) {
                let take = left.min(d[j]);
                c[j] += take;
                left -= take;
            }
        }
    }
    Ok(c)
}

/// `c^t x` for a 0-1 vector.
pub fn linear_cost(c: &[f64], x: &[u8]) -> f64 {
    dot01(c, x)
}
