//! Dense bounded-variable primal simplex (two phases).
//!
//! Every column is shifted to a lower bound of zero; upper bounds are handled
//! by bound flips instead of explicit rows. Entering columns follow Dantzig's
//! rule and switch to Bland's rule after a run of degenerate pivots.

use crate::error::SolverError;
use crate::model::{MilpModel, Relation, Sense};
use crate::solver::SolverConfig;

const DEGENERATE_RUN_BEFORE_BLAND: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    /// Values are in the original variable space; objective includes the offset.
    Optimal {
        values: Vec<f64>,
        objective: f64,
    },
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy)]
enum ColumnMap {
    /// `x = offset + col`
    Shifted { col: usize, offset: f64 },
    /// `x = offset - col`
    Mirrored { col: usize, offset: f64 },
    /// `x = pos - neg`
    Split { pos: usize, neg: usize },
}

struct Tableau {
    rows: usize,
    cols: usize,
    t: Vec<f64>,
    beta: Vec<f64>,
    basis: Vec<usize>,
    basic_row: Vec<Option<usize>>,
    upper: Vec<f64>,
    at_upper: Vec<bool>,
    blocked: Vec<bool>,
    reduced: Vec<f64>,
    pivot_tol: f64,
    iterations: usize,
    max_iterations: usize,
}

enum PhaseResult {
    Optimal,
    Unbounded,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.cols + j]
    }

    fn value_of(&self, col: usize) -> f64 {
        match self.basic_row[col] {
            Some(r) => self.beta[r],
            None if self.at_upper[col] => self.upper[col],
            None => 0.0,
        }
    }

    fn price(&mut self, cost: &[f64]) {
        self.reduced = cost.to_vec();
        for i in 0..self.rows {
            let cb = cost[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            let row = &self.t[i * self.cols..(i + 1) * self.cols];
            for (d, a) in self.reduced.iter_mut().zip(row) {
                *d -= cb * a;
            }
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let cols = self.cols;
        let p = self.t[r * cols + j];
        {
            let row = &mut self.t[r * cols..(r + 1) * cols];
            for a in row.iter_mut() {
                *a /= p;
            }
            row[j] = 1.0;
        }
        let pivot_row: Vec<f64> = self.t[r * cols..(r + 1) * cols].to_vec();
        let nonzero: Vec<usize> = (0..cols).filter(|&k| pivot_row[k] != 0.0).collect();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * cols + j];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * cols..(i + 1) * cols];
            for &k in &nonzero {
                row[k] -= f * pivot_row[k];
            }
            row[j] = 0.0;
        }
        let f = self.reduced[j];
        if f != 0.0 {
            for &k in &nonzero {
                self.reduced[k] -= f * pivot_row[k];
            }
            self.reduced[j] = 0.0;
        }
    }

    fn run(&mut self, opt_tol: f64) -> Result<PhaseResult, SolverError> {
        let mut degenerate_run = 0usize;
        loop {
            if self.iterations >= self.max_iterations {
                return Err(SolverError::Numerical(format!("simplex iteration limit {} reached", self.max_iterations)));
            }
            let bland = degenerate_run >= DEGENERATE_RUN_BEFORE_BLAND;
            let mut entering = None;
            let mut best = 0.0;
            for j in 0..self.cols {
                if self.basic_row[j].is_some() || self.blocked[j] || self.upper[j] <= 0.0 {
                    continue;
                }
                let d = self.reduced[j];
                let gain = if self.at_upper[j] { d } else { -d };
                if gain <= opt_tol {
                    continue;
                }
                if bland {
                    entering = Some(j);
                    break;
                }
                if gain > best {
                    best = gain;
                    entering = Some(j);
                }
            }
            let Some(j) = entering else {
                return Ok(PhaseResult::Optimal);
            };
            let dir = if self.at_upper[j] { -1.0 } else { 1.0 };

            // Ratio test; `None` leaving row means a bound flip of the entering column.
            let mut step = self.upper[j];
            let mut leaving: Option<(usize, bool, f64)> = None;
            for i in 0..self.rows {
                let alpha = dir * self.at(i, j);
                let (ratio, to_upper) = if alpha > self.pivot_tol {
                    (self.beta[i].max(0.0) / alpha, false)
                } else if alpha < -self.pivot_tol && self.upper[self.basis[i]].is_finite() {
                    ((self.upper[self.basis[i]] - self.beta[i]).max(0.0) / -alpha, true)
                } else {
                    continue;
                };
                let tie = 1e-12 * ratio.max(1.0);
                let take = if ratio < step - tie {
                    true
                } else if ratio <= step + tie {
                    // Ties with a bound flip keep the flip.
                    match leaving {
                        None => false,
                        Some((r, _, _)) if bland => self.basis[i] < self.basis[r],
                        Some((_, _, a)) => alpha.abs() > a.abs(),
                    }
                } else {
                    false
                };
                if take {
                    step = step.min(ratio);
                    leaving = Some((i, to_upper, alpha));
                }
            }
            if step.is_infinite() {
                return Ok(PhaseResult::Unbounded);
            }
            self.iterations += 1;
            if step <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            if step != 0.0 {
                for i in 0..self.rows {
                    let a = self.at(i, j);
                    if a != 0.0 {
                        self.beta[i] -= dir * step * a;
                    }
                }
            }
            match leaving {
                None => {
                    self.at_upper[j] = !self.at_upper[j];
                }
                Some((r, to_upper, _)) => {
                    let start = if self.at_upper[j] { self.upper[j] } else { 0.0 };
                    let leaving_col = self.basis[r];
                    self.pivot(r, j);
                    self.beta[r] = start + dir * step;
                    self.basic_row[leaving_col] = None;
                    self.at_upper[leaving_col] = to_upper;
                    self.basis[r] = j;
                    self.basic_row[j] = Some(r);
                    self.at_upper[j] = false;
                }
            }
        }
    }
}

/// Solves the LP relaxation of `model` with variable bounds overridden by
/// `lo`/`hi` (binaries are treated as continuous inside these bounds).
pub(crate) fn solve_lp_with_bounds(
    model: &MilpModel,
    lo: &[f64],
    hi: &[f64],
    config: &SolverConfig,
) -> Result<LpOutcome, SolverError> {
    let n = model.num_vars();
    debug_assert_eq!(lo.len(), n);
    debug_assert_eq!(hi.len(), n);

    // Column mapping.
    let mut maps = Vec::with_capacity(n);
    let mut col_upper: Vec<f64> = Vec::new();
    for j in 0..n {
        let (l, h) = (lo[j], hi[j]);
        if l > h + config.feasibility_tol {
            return Ok(LpOutcome::Infeasible);
        }
        let h = h.max(l);
        if l.is_finite() {
            maps.push(ColumnMap::Shifted { col: col_upper.len(), offset: l });
            col_upper.push(h - l);
        } else if h.is_finite() {
            maps.push(ColumnMap::Mirrored { col: col_upper.len(), offset: h });
            col_upper.push(f64::INFINITY);
        } else {
            let pos = col_upper.len();
            maps.push(ColumnMap::Split { pos, neg: pos + 1 });
            col_upper.push(f64::INFINITY);
            col_upper.push(f64::INFINITY);
        }
    }
    let structural = col_upper.len();

    // Transformed rows: dense coefficient vectors over structural columns.
    struct Row {
        coeffs: Vec<(usize, f64)>,
        relation: Relation,
        rhs: f64,
    }
    let mut rows: Vec<Row> = Vec::with_capacity(model.num_constraints());
    for con in model.constraints() {
        let mut rhs = con.rhs;
        let mut coeffs = Vec::with_capacity(con.coeffs.len() + 1);
        for &(j, a) in &con.coeffs {
            match maps[j] {
                ColumnMap::Shifted { col, offset } => {
                    rhs -= a * offset;
                    coeffs.push((col, a));
                }
                ColumnMap::Mirrored { col, offset } => {
                    rhs -= a * offset;
                    coeffs.push((col, -a));
                }
                ColumnMap::Split { pos, neg } => {
                    coeffs.push((pos, a));
                    coeffs.push((neg, -a));
                }
            }
        }
        let scale = coeffs.iter().fold(0.0f64, |m, &(_, a)| m.max(a.abs()));
        if scale == 0.0 {
            let ok = match con.relation {
                Relation::Le => rhs >= -config.feasibility_tol,
                Relation::Ge => rhs <= config.feasibility_tol,
                Relation::Eq => rhs.abs() <= config.feasibility_tol,
            };
            if !ok {
                return Ok(LpOutcome::Infeasible);
            }
            continue;
        }
        for c in coeffs.iter_mut() {
            c.1 /= scale;
        }
        rows.push(Row { coeffs, relation: con.relation, rhs: rhs / scale });
    }

    let m = rows.len();
    let slack_count = rows.iter().filter(|r| r.relation != Relation::Eq).count();
    // Sign of each row after making rhs nonnegative and whether its slack can start basic.
    let mut flips = Vec::with_capacity(m);
    let mut needs_artificial = Vec::with_capacity(m);
    for r in &rows {
        let flip = r.rhs < 0.0;
        let slack_sign = match (r.relation, flip) {
            (Relation::Le, false) | (Relation::Ge, true) => 1.0,
            (Relation::Le, true) | (Relation::Ge, false) => -1.0,
            (Relation::Eq, _) => 0.0,
        };
        flips.push(flip);
        needs_artificial.push(slack_sign <= 0.0);
    }
    let artificial_count = needs_artificial.iter().filter(|&&b| b).count();
    let cols = structural + slack_count + artificial_count;

    let mut t = vec![0.0; m * cols];
    let mut beta = vec![0.0; m];
    let mut basis = vec![0usize; m];
    let mut upper = col_upper;
    upper.resize(cols, f64::INFINITY);
    let mut blocked = vec![false; cols];
    let mut is_artificial = vec![false; cols];
    let mut next_slack = structural;
    let mut next_art = structural + slack_count;
    for (i, r) in rows.iter().enumerate() {
        let sign = if flips[i] { -1.0 } else { 1.0 };
        for &(c, a) in &r.coeffs {
            t[i * cols + c] += sign * a;
        }
        beta[i] = sign * r.rhs;
        if r.relation != Relation::Eq {
            let s = if r.relation == Relation::Le { 1.0 } else { -1.0 } * sign;
            t[i * cols + next_slack] = s;
            if !needs_artificial[i] {
                basis[i] = next_slack;
            }
            next_slack += 1;
        }
        if needs_artificial[i] {
            t[i * cols + next_art] = 1.0;
            basis[i] = next_art;
            is_artificial[next_art] = true;
            next_art += 1;
        }
    }
    let mut basic_row = vec![None; cols];
    for (i, &b) in basis.iter().enumerate() {
        basic_row[b] = Some(i);
    }

    let mut tab = Tableau {
        rows: m,
        cols,
        t,
        beta,
        basis,
        basic_row,
        upper,
        at_upper: vec![false; cols],
        blocked: vec![false; cols],
        reduced: Vec::new(),
        pivot_tol: config.pivot_tol,
        iterations: 0,
        max_iterations: config.max_simplex_iterations.max(50 * (m + cols)),
    };

    // Phase 1.
    if artificial_count > 0 {
        let phase1_cost: Vec<f64> = is_artificial.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect();
        tab.price(&phase1_cost);
        match tab.run(1e-11)? {
            PhaseResult::Unbounded => {
                return Err(SolverError::Numerical("phase one reported unbounded".into()));
            }
            PhaseResult::Optimal => {}
        }
        let infeasibility: f64 = (0..cols).filter(|&c| is_artificial[c]).map(|c| tab.value_of(c)).sum();
        let rhs_scale = rows.iter().fold(1.0f64, |s, r| s.max(r.rhs.abs()));
        if infeasibility > config.feasibility_tol * rhs_scale {
            return Ok(LpOutcome::Infeasible);
        }
        for c in 0..cols {
            if is_artificial[c] {
                tab.upper[c] = 0.0;
                tab.at_upper[c] = false;
                if let Some(r) = tab.basic_row[c] {
                    tab.beta[r] = 0.0;
                }
            }
        }
        blocked.copy_from_slice(&is_artificial);
        tab.blocked = blocked;
    }

    // Phase 2.
    let flip_obj = if model.sense() == Sense::Maximize { -1.0 } else { 1.0 };
    let mut cost = vec![0.0; cols];
    for (j, &c) in model.objective().iter().enumerate() {
        let c = flip_obj * c;
        match maps[j] {
            ColumnMap::Shifted { col, .. } => cost[col] += c,
            ColumnMap::Mirrored { col, .. } => cost[col] -= c,
            ColumnMap::Split { pos, neg } => {
                cost[pos] += c;
                cost[neg] -= c;
            }
        }
    }
    let cscale = cost.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if cscale > 0.0 {
        for c in cost.iter_mut() {
            *c /= cscale;
        }
    }
    tab.price(&cost);
    if let PhaseResult::Unbounded = tab.run(1e-9)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut values = vec![0.0; n];
    for j in 0..n {
        values[j] = match maps[j] {
            ColumnMap::Shifted { col, offset } => offset + tab.value_of(col),
            ColumnMap::Mirrored { col, offset } => offset - tab.value_of(col),
            ColumnMap::Split { pos, neg } => tab.value_of(pos) - tab.value_of(neg),
        };
        // Clamp drift back inside the bounds.
        if lo[j].is_finite() {
            values[j] = values[j].max(lo[j]);
        }
        if hi[j].is_finite() {
            values[j] = values[j].min(hi[j]);
        }
    }
    let violation = model.max_violation(&values);
    if violation > 1e3 * config.feasibility_tol {
        return Err(SolverError::Numerical(format!("LP solution violates a constraint by {violation:.3e}")));
    }
    let objective = model.evaluate_objective(&values);
    Ok(LpOutcome::Optimal { values, objective })
}
