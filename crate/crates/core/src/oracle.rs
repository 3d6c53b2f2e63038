//! Brute-force ground truth for small instances.

use mprs_milp::{Constraint, Relation};

use crate::error::{check_len, Error, Result};
use crate::instance::{Instance, InstanceKind, MediansLayout, Metadata, SpGraph};
use crate::robust::cost_for_pi;
use crate::solver::SolverContext;
use crate::uncertainty::{linear_cost, robustness_value, robustness_value_variant, OmegaSpec};

/// Simple-path enumeration is refused above this many nodes.
pub const MAX_PATH_NODES: usize = 12;
/// Generic enumeration over `{0,1}^n` is refused above this `n`.
pub const MAX_GENERIC_VARS: usize = 24;
/// Medians enumeration is refused above this many `(subset, assignment)` pairs.
pub const MAX_MEDIANS_SOLUTIONS: usize = 2_000_000;
/// π-enumeration is refused above this many groups.
pub const MAX_PI_GROUPS: usize = 16;

/// The one-hot family with `n + 1` variables: `c̲ = (10, …, 10, 11.5)`,
/// `d = (2, …, 2, 0)` and singleton groups. Returns the instance with the
/// boxes `[2, 3]^{n+1}` and `[0, 1]^{n+1}`.
pub fn toy_instance(n: usize) -> Result<(Instance, OmegaSpec, OmegaSpec)> {
    if n == 0 {
        return Err(Error::InvalidArgument("toy family needs n >= 1".into()));
    }
    let m = n + 1;
    let mut c_lower = vec![10.0; m];
    c_lower[n] = 11.5;
    let mut deviations = vec![2.0; m];
    deviations[n] = 0.0;
    let one_hot = Constraint { coeffs: (0..m).map(|j| (j, 1.0)).collect(), relation: Relation::Eq, rhs: 1.0 };
    let metadata = Metadata { toy_n: Some(n), ..Metadata::default() };
    let inst = Instance::new(
        InstanceKind::Toy,
        c_lower,
        deviations,
        (0..m).map(|j| vec![j]).collect(),
        vec![one_hot],
        metadata,
    )?;
    let high = OmegaSpec::interval(vec![2.0; m], vec![3.0; m])?;
    let low = OmegaSpec::interval(vec![0.0; m], vec![1.0; m])?;
    Ok((inst, high, low))
}

fn unit(n: usize, j: usize) -> Vec<u8> {
    let mut x = vec![0; n];
    x[j] = 1;
    x
}

/// All feasible solutions of small instances.
///
/// Shortest-path instances yield their simple source-target paths; adding a
/// cycle to a path never lowers any cost considered here, so minima over
/// paths equal minima over X.
pub fn enumerate_x(inst: &Instance) -> Result<Vec<Vec<u8>>> {
    let meta = inst.metadata();
    match (inst.kind(), &meta.graph, &meta.medians) {
        (InstanceKind::Toy, _, _) => {
            Ok((0..inst.n()).map(|j| unit(inst.n(), j)).filter(|x| inst.is_feasible(x)).collect())
        }
        (InstanceKind::ShortestPath, Some(graph), _) => simple_paths(graph, inst.n()),
        (InstanceKind::Medians, _, Some(layout)) => medians_solutions(layout),
        _ => generic_solutions(inst),
    }
}

fn simple_paths(graph: &SpGraph, n: usize) -> Result<Vec<Vec<u8>>> {
    let nodes = graph.points.len();
    if nodes > MAX_PATH_NODES {
        return Err(Error::TooLarge {
            what: format!("simple-path enumeration on {nodes} nodes"),
            limit: MAX_PATH_NODES,
        });
    }
    check_len("arc list", n, graph.arcs.len())?;
    let mut out_arcs = vec![Vec::new(); nodes];
    for (e, &[u, _]) in graph.arcs.iter().enumerate() {
        out_arcs[u].push(e);
    }
    let mut paths = Vec::new();
    let mut on_path = vec![false; nodes];
    let mut x = vec![0u8; n];
    fn dfs(
        v: usize,
        graph: &SpGraph,
        out_arcs: &[Vec<usize>],
        on_path: &mut [bool],
        x: &mut [u8],
        paths: &mut Vec<Vec<u8>>,
    ) {
        if v == graph.target {
            paths.push(x.to_vec());
            return;
        }
        on_path[v] = true;
        for &e in &out_arcs[v] {
            let w = graph.arcs[e][1];
            if !on_path[w] {
                x[e] = 1;
                dfs(w, graph, out_arcs, on_path, x, paths);
                x[e] = 0;
            }
        }
        on_path[v] = false;
    }
    dfs(graph.source, graph, &out_arcs, &mut on_path, &mut x, &mut paths);
    Ok(paths)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// All `p`-subsets of `0..l` in lexicographic order.
fn subsets(l: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(p);
    fn rec(start: usize, l: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..l {
            if l - i < p - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, l, p, cur, out);
            cur.pop();
        }
    }
    rec(0, l, p, &mut cur, &mut out);
    out
}

fn medians_solutions(layout: &MediansLayout) -> Result<Vec<Vec<u8>>> {
    let (l, p) = (layout.l, layout.p);
    let count = binomial(l, p) * (p as f64).powi(l as i32);
    if count > MAX_MEDIANS_SOLUTIONS as f64 {
        return Err(Error::TooLarge {
            what: format!("medians enumeration with l = {l}, p = {p}"),
            limit: MAX_MEDIANS_SOLUTIONS,
        });
    }
    let n = l * (l + 1);
    let mut out = Vec::with_capacity(count as usize);
    for open in subsets(l, p) {
        // Odometer over the choice of median for each location.
        let mut choice = vec![0usize; l];
        loop {
            let mut x = vec![0u8; n];
            for &i in &open {
                x[layout.open(i)] = 1;
            }
            for j in 0..l {
                x[layout.assign(open[choice[j]], j)] = 1;
            }
            out.push(x);
            let mut pos = 0;
            while pos < l {
                choice[pos] += 1;
                if choice[pos] < p {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
            if pos == l {
                break;
            }
        }
    }
    Ok(out)
}

fn generic_solutions(inst: &Instance) -> Result<Vec<Vec<u8>>> {
    let n = inst.n();
    if n > MAX_GENERIC_VARS {
        return Err(Error::TooLarge { what: format!("enumeration over 2^{n} vectors"), limit: MAX_GENERIC_VARS });
    }
    Ok((0u64..1 << n)
        .map(|mask| (0..n).map(|j| ((mask >> j) & 1) as u8).collect::<Vec<u8>>())
        .filter(|x| inst.is_feasible(x))
        .collect())
}

/// Exhaustive evaluation over an enumerated X.
#[derive(Debug, Clone)]
pub struct BruteForce<'a> {
    inst: &'a Instance,
    solutions: Vec<Vec<u8>>,
}

impl<'a> BruteForce<'a> {
    pub fn new(inst: &'a Instance) -> Result<Self> {
        let solutions = enumerate_x(inst)?;
        if solutions.is_empty() {
            return Err(Error::InvalidInstance("the feasible set X is empty".into()));
        }
        Ok(Self { inst, solutions })
    }

    pub fn solutions(&self) -> &[Vec<u8>] {
        &self.solutions
    }

    fn argmin(&self, mut f: impl FnMut(&[u8]) -> Result<f64>) -> Result<(f64, Vec<u8>)> {
        let mut best: Option<(f64, &Vec<u8>)> = None;
        for x in &self.solutions {
            let v = f(x)?;
            if best.is_none_or(|(b, _)| v < b) {
                best = Some((v, x));
            }
        }
        let (v, x) = best.expect("nonempty enumeration");
        Ok((v, x.clone()))
    }

    /// `v(R(Γ))` and a minimizer.
    pub fn robust(&self, gamma: &[f64], variant: bool) -> Result<(f64, Vec<u8>)> {
        if variant {
            self.argmin(|x| robustness_value_variant(self.inst, x, gamma))
        } else {
            self.argmin(|x| robustness_value(self.inst, x, gamma))
        }
    }

    /// `v(P(c))` and a minimizer.
    pub fn nominal(&self, cost: &[f64]) -> Result<(f64, Vec<u8>)> {
        check_len("cost vector", self.inst.n(), cost.len())?;
        self.argmin(|x| Ok(linear_cost(cost, x)))
    }
}

/// `min_{x ∈ X} W(x, Γ)` by enumeration, with a minimizer.
pub fn brute_robust(inst: &Instance, gamma: &[f64], variant: bool) -> Result<(f64, Vec<u8>)> {
    BruteForce::new(inst)?.robust(gamma, variant)
}

/// The solution set `{argmin P(c(π)) : π ∈ {0,1}^K}`, without repeats. It
/// attains `v(R(Γ))` exactly for every Γ.
pub fn exact_mprs_by_pi_enumeration(inst: &Instance, solver: &SolverContext) -> Result<Vec<Vec<u8>>> {
    let k = inst.num_groups();
    if k > MAX_PI_GROUPS {
        return Err(Error::TooLarge { what: format!("π-enumeration over 2^{k} patterns"), limit: MAX_PI_GROUPS });
    }
    let mut out: Vec<Vec<u8>> = Vec::new();
    for mask in 0u32..1 << k {
        let pi: Vec<u8> = (0..k).map(|g| ((mask >> g) & 1) as u8).collect();
        let (_, x) = inst.solve_nominal(&cost_for_pi(inst, &pi)?, solver)?;
        if !out.contains(&x) {
            out.push(x);
        }
    }
    Ok(out)
}

/// `f(π) = γπ + Σ_j u_j max(0, v_j − π)`.
pub fn piecewise_f(gamma: f64, u: &[usize], v: &[f64], pi: f64) -> f64 {
    gamma * pi + u.iter().zip(v).map(|(&uj, &vj)| uj as f64 * (vj - pi).max(0.0)).sum::<f64>()
}

/// `{0} ∪ {v_j}`, ascending without repeats.
pub fn breakpoints(v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0];
    out.extend_from_slice(v);
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Smallest breakpoint minimizing `f` over `[0, ∞)`.
pub fn minimizing_breakpoint(gamma: f64, u: &[usize], v: &[f64]) -> f64 {
    let mut best = (f64::INFINITY, 0.0);
    for b in breakpoints(v) {
        let f = piecewise_f(gamma, u, v, b);
        if f < best.0 {
            best = (f, b);
        }
    }
    best.1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_enumeration() {
        let (inst, high, low) = toy_instance(2).unwrap();
        assert_eq!(enumerate_x(&inst).unwrap(), vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(high.upper(), vec![3.0; 3]);
        assert_eq!(low.upper(), vec![1.0; 3]);
    }

    #[test]
    fn toy_brute_force() {
        let (inst, _, _) = toy_instance(2).unwrap();
        assert_eq!(brute_robust(&inst, &[2.0; 3], false).unwrap(), (11.5, vec![0, 0, 1]));
        assert_eq!(brute_robust(&inst, &[0.0; 3], false).unwrap(), (10.0, vec![1, 0, 0]));
        let (v, x) = brute_robust(&inst, &[0.9, 0.1, 0.0], false).unwrap();
        assert_eq!(x, vec![0, 1, 0]);
        assert!((v - 10.1).abs() < 1e-12);
    }

    #[test]
    fn generic_enumeration_filters() {
        let inst = Instance::new(
            InstanceKind::Custom,
            vec![1.0; 4],
            vec![0.0; 4],
            vec![vec![0, 1, 2, 3]],
            vec![Constraint { coeffs: (0..4).map(|j| (j, 1.0)).collect(), relation: Relation::Eq, rhs: 2.0 }],
            Metadata::default(),
        )
        .unwrap();
        assert_eq!(enumerate_x(&inst).unwrap().len(), 6);
    }

    #[test]
    fn subsets_are_lexicographic() {
        assert_eq!(subsets(4, 2), vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(binomial(8, 2), 28.0);
    }

    #[test]
    fn piecewise_example() {
        assert_eq!(piecewise_f(1.0, &[2], &[3.0], 0.0), 6.0);
        assert_eq!(piecewise_f(1.0, &[2], &[3.0], 3.0), 3.0);
        assert_eq!(minimizing_breakpoint(1.0, &[2], &[3.0]), 3.0);
        assert_eq!(minimizing_breakpoint(5.0, &[2, 3], &[3.0, 1.0]), 0.0);
        assert_eq!(breakpoints(&[3.0, 1.0, 3.0]), vec![0.0, 1.0, 3.0]);
    }

    #[test]
    fn pi_enumeration_on_toy() {
        let (inst, _, _) = toy_instance(2).unwrap();
        let set = exact_mprs_by_pi_enumeration(&inst, &SolverContext::default()).unwrap();
        assert!(set.contains(&vec![0, 0, 1]));
        assert!(set.len() <= 3);
    }
}
