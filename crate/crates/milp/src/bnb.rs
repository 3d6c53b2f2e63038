//! Best-first branch-and-bound over binary variables.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::error::SolverError;
use crate::model::{MilpModel, Sense};
use crate::simplex::{solve_lp_with_bounds, LpOutcome};
use crate::solver::{MilpSolution, SolveStatus, SolverConfig};

struct Node {
    /// Relaxation bound in minimisation form.
    bound: f64,
    seq: u64,
    lo: Vec<f64>,
    hi: Vec<f64>,
    values: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap is a max-heap: smallest bound first, then oldest node.
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Incumbent {
    key: f64,
    values: Vec<f64>,
}

struct Search<'a> {
    model: &'a MilpModel,
    config: &'a SolverConfig,
    binaries: Vec<usize>,
    sign: f64,
    incumbent: Option<Incumbent>,
    seq: u64,
    nodes: usize,
}

enum Relaxation {
    Integral(Vec<f64>),
    Fractional { bound: f64, values: Vec<f64> },
    Pruned,
}

impl<'a> Search<'a> {
    fn key_of(&self, objective: f64) -> f64 {
        self.sign * objective
    }

    fn prune_threshold(&self) -> f64 {
        match &self.incumbent {
            Some(inc) => inc.key - self.config.gap_tol.max(1e-9 * inc.key.abs()),
            None => f64::INFINITY,
        }
    }

    fn relax(&mut self, lo: &[f64], hi: &[f64]) -> Result<Option<Relaxation>, SolverError> {
        self.nodes += 1;
        match solve_lp_with_bounds(self.model, lo, hi, self.config)? {
            LpOutcome::Infeasible => Ok(Some(Relaxation::Pruned)),
            LpOutcome::Unbounded => Ok(None),
            LpOutcome::Optimal { values, objective } => {
                let bound = self.key_of(objective);
                if bound >= self.prune_threshold() {
                    return Ok(Some(Relaxation::Pruned));
                }
                let tol = self.config.integrality_tol;
                let integral = self.binaries.iter().all(|&j| (values[j] - values[j].round()).abs() <= tol);
                if integral {
                    Ok(Some(Relaxation::Integral(values)))
                } else {
                    Ok(Some(Relaxation::Fractional { bound, values }))
                }
            }
        }
    }

    fn offer(&mut self, mut values: Vec<f64>) {
        for &j in &self.binaries {
            values[j] = values[j].round();
        }
        let key = self.key_of(self.model.evaluate_objective(&values));
        let replace = match &self.incumbent {
            None => true,
            Some(inc) => {
                let tie = self.config.gap_tol.max(1e-9 * inc.key.abs());
                if key < inc.key - tie {
                    true
                } else if key <= inc.key + tie {
                    // Lexicographically smallest binary vector wins ties.
                    let ours = self.binaries.iter().map(|&j| values[j]);
                    let theirs = self.binaries.iter().map(|&j| inc.values[j]);
                    ours.partial_cmp(theirs) == Some(Ordering::Less)
                } else {
                    false
                }
            }
        };
        if replace {
            self.incumbent = Some(Incumbent { key, values });
        }
    }

    fn branching_var(&self, values: &[f64]) -> usize {
        let mut best = None;
        let mut best_frac = -1.0;
        for &j in &self.binaries {
            let f = values[j] - values[j].floor();
            let frac = f.min(1.0 - f);
            if frac > self.config.integrality_tol && frac > best_frac + 1e-12 {
                best_frac = frac;
                best = Some(j);
            }
        }
        best.expect("fractional node has a fractional binary")
    }
}

pub(crate) fn branch_and_bound(model: &MilpModel, config: &SolverConfig) -> Result<MilpSolution, SolverError> {
    let start = Instant::now();
    let sign = if model.sense() == Sense::Maximize { -1.0 } else { 1.0 };
    let (lo, hi): (Vec<f64>, Vec<f64>) = model.var_kinds().iter().map(|k| k.bounds()).unzip();
    let mut search =
        Search { model, config, binaries: model.binary_indices(), sign, incumbent: None, seq: 0, nodes: 0 };

    let mut heap = BinaryHeap::new();
    match search.relax(&lo, &hi)? {
        None => return Ok(MilpSolution::without_point(SolveStatus::Unbounded, search.nodes)),
        Some(Relaxation::Pruned) => {
            return Ok(MilpSolution::without_point(SolveStatus::Infeasible, search.nodes));
        }
        Some(Relaxation::Integral(values)) => search.offer(values),
        Some(Relaxation::Fractional { bound, values }) => {
            heap.push(Node { bound, seq: 0, lo, hi, values });
        }
    }

    let mut limit_hit = false;
    while let Some(node) = heap.pop() {
        if node.bound >= search.prune_threshold() {
            continue;
        }
        let out_of_time = config.time_limit.is_some_and(|t| start.elapsed() >= t);
        if search.nodes >= config.node_limit || out_of_time {
            heap.push(node);
            limit_hit = true;
            break;
        }
        let j = search.branching_var(&node.values);
        // Down branch first so equal-bound children keep a stable order.
        for fix in [0.0, 1.0] {
            let mut lo = node.lo.clone();
            let mut hi = node.hi.clone();
            lo[j] = fix;
            hi[j] = fix;
            match search.relax(&lo, &hi)? {
                None => return Err(SolverError::Numerical("relaxation became unbounded below a bounded root".into())),
                Some(Relaxation::Pruned) => {}
                Some(Relaxation::Integral(values)) => search.offer(values),
                Some(Relaxation::Fractional { bound, values }) => {
                    search.seq += 1;
                    heap.push(Node { bound, seq: search.seq, lo, hi, values });
                }
            }
        }
    }

    let nodes = search.nodes;
    let threshold = search.prune_threshold();
    let open_bound = heap.iter().filter(|n| n.bound < threshold).map(|n| n.bound).fold(f64::INFINITY, f64::min);
    match search.incumbent {
        Some(inc) => {
            let objective = model.evaluate_objective(&inc.values);
            if limit_hit && open_bound.is_finite() {
                Ok(MilpSolution {
                    status: SolveStatus::LimitReached,
                    values: inc.values,
                    objective,
                    best_bound: Some(sign * open_bound.min(inc.key)),
                    nodes,
                })
            } else {
                Ok(MilpSolution {
                    status: SolveStatus::Optimal,
                    values: inc.values,
                    objective,
                    best_bound: Some(objective),
                    nodes,
                })
            }
        }
        None if limit_hit => Ok(MilpSolution {
            status: SolveStatus::LimitReached,
            values: Vec::new(),
            objective: f64::NAN,
            best_bound: open_bound.is_finite().then_some(sign * open_bound),
            nodes,
        }),
        None => Ok(MilpSolution::without_point(SolveStatus::Infeasible, nodes)),
    }
}
