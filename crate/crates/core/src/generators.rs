//! Random shortest-path and (l,p)-medians instances, their uncertainty
//! partitions and the matching parameter domains Ω.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use mprs_milp::{Constraint, Relation};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, InstanceKind, MediansLayout, Metadata, SpGraph};
use crate::rng::UnitRng;
use crate::uncertainty::OmegaSpec;

/// Share of the complete digraph's arcs removed, longest first.
pub const REMOVAL_FRACTION: f64 = 0.7;
/// `d = DEVIATION_RATIO · c̲` for every generated instance.
pub const DEVIATION_RATIO: f64 = 0.5;
/// Seeds tried after the requested one when the target is unreachable.
pub const MAX_SP_RETRIES: u64 = 1000;

const SP_SIDE: f64 = 10.0;
const PLM_SIDE: f64 = 100.0;
const PLM_MAX_DEMAND: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpParams {
    pub nodes: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlmParams {
    pub l: usize,
    pub p: usize,
    pub seed: u64,
}

impl PlmParams {
    /// `p = max(1, l / 10)`.
    pub fn with_default_p(l: usize, seed: u64) -> Self {
        Self { l, p: (l / 10).max(1), seed }
    }
}

fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn random_points(rng: &mut UnitRng, count: usize, side: f64) -> Vec<[f64; 2]> {
    (0..count).map(|_| [rng.uniform(0.0, side), rng.uniform(0.0, side)]).collect()
}

/// The pair with the largest distance, lowest indices on ties.
fn farthest_pair(points: &[[f64; 2]]) -> (usize, usize) {
    let mut best = (0, 1, f64::NEG_INFINITY);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = distance(points[i], points[j]);
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    (best.0, best.1)
}

/// Arcs kept after dropping the longest share; sorted by (tail, head).
fn shortest_arcs(points: &[[f64; 2]]) -> Vec<[usize; 2]> {
    let n = points.len();
    let mut all: Vec<[usize; 2]> = (0..n).flat_map(|v| (0..n).filter(move |&w| w != v).map(move |w| [v, w])).collect();
    all.sort_by(|a, b| {
        distance(points[a[0]], points[a[1]]).total_cmp(&distance(points[b[0]], points[b[1]])).then(a.cmp(b))
    });
    let keep = ((1.0 - REMOVAL_FRACTION) * all.len() as f64).round() as usize;
    all.truncate(keep);
    all.sort();
    all
}

fn reaches(nodes: usize, arcs: &[[usize; 2]], from: usize, to: usize) -> bool {
    let mut seen = vec![false; nodes];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(v) = stack.pop() {
        for a in arcs.iter().filter(|a| a[0] == v) {
            if !seen[a[1]] {
                seen[a[1]] = true;
                stack.push(a[1]);
            }
        }
    }
    seen[to]
}

/// Random Euclidean shortest-path instance with a single group.
///
/// Seeds `seed, seed + 1, …` are tried until the target is reachable; the
/// seed used is recorded in the metadata.
pub fn gen_sp(params: SpParams) -> Result<Instance> {
    if params.nodes < 2 {
        return Err(Error::InvalidArgument(format!("a graph needs at least 2 nodes, got {}", params.nodes)));
    }
    for attempt in 0..=MAX_SP_RETRIES {
        let seed = params.seed.wrapping_add(attempt);
        let points = random_points(&mut UnitRng::new(seed), params.nodes, SP_SIDE);
        let (source, target) = farthest_pair(&points);
        let arcs = shortest_arcs(&points);
        if !arcs.is_empty() && reaches(params.nodes, &arcs, source, target) {
            return sp_instance(SpGraph { seed, points, arcs, source, target });
        }
    }
    Err(Error::InvalidArgument(format!(
        "no connected graph with {} nodes in {} seeds from {}",
        params.nodes,
        MAX_SP_RETRIES + 1,
        params.seed
    )))
}

/// Flow-conservation instance over `graph` with Euclidean arc costs.
pub fn sp_instance(graph: SpGraph) -> Result<Instance> {
    let c_lower: Vec<f64> = graph.arcs.iter().map(|a| distance(graph.points[a[0]], graph.points[a[1]])).collect();
    let deviations = c_lower.iter().map(|c| DEVIATION_RATIO * c).collect();
    let rows = (0..graph.points.len())
        .map(|v| {
            let coeffs = graph
                .arcs
                .iter()
                .enumerate()
                .filter_map(|(e, a)| match (a[0] == v, a[1] == v) {
                    (true, _) => Some((e, 1.0)),
                    (_, true) => Some((e, -1.0)),
                    _ => None,
                })
                .collect();
            let rhs = if v == graph.source {
                1.0
            } else if v == graph.target {
                -1.0
            } else {
                0.0
            };
            Constraint { coeffs, relation: Relation::Eq, rhs }
        })
        .collect();
    let n = c_lower.len();
    let metadata = Metadata { totally_unimodular: true, graph: Some(graph), ..Metadata::default() };
    Instance::new(InstanceKind::ShortestPath, c_lower, deviations, vec![(0..n).collect()], rows, metadata)
}

/// Random (l,p)-medians instance with a single group. Variables are the
/// `l²` assignments followed by the `l` opening decisions, whose cost and
/// deviation are zero.
pub fn gen_plm(params: PlmParams) -> Result<Instance> {
    let PlmParams { l, p, seed } = params;
    if l == 0 || p == 0 || p > l {
        return Err(Error::InvalidArgument(format!("medians need 1 <= p <= l, got l = {l}, p = {p}")));
    }
    let mut rng = UnitRng::new(seed);
    let locations = random_points(&mut rng, l, PLM_SIDE);
    let demands: Vec<f64> = (0..l).map(|_| rng.uniform(0.0, PLM_MAX_DEMAND)).collect();
    let layout = MediansLayout { seed, l, p, locations, demands };

    let n = l * l + l;
    let mut c_lower = vec![0.0; n];
    for i in 0..l {
        for j in 0..l {
            c_lower[layout.assign(i, j)] = distance(layout.locations[i], layout.locations[j]) * layout.demands[j];
        }
    }
    let deviations = c_lower.iter().map(|c| DEVIATION_RATIO * c).collect();

    let mut rows = Vec::with_capacity(l * l + l + 1);
    for i in 0..l {
        for j in 0..l {
            rows.push(Constraint {
                coeffs: vec![(layout.assign(i, j), 1.0), (layout.open(i), -1.0)],
                relation: Relation::Le,
                rhs: 0.0,
            });
        }
    }
    rows.push(Constraint {
        coeffs: (0..l).map(|i| (layout.open(i), 1.0)).collect(),
        relation: Relation::Eq,
        rhs: p as f64,
    });
    for j in 0..l {
        rows.push(Constraint {
            coeffs: (0..l).map(|i| (layout.assign(i, j), 1.0)).collect(),
            relation: Relation::Eq,
            rhs: 1.0,
        });
    }
    let metadata = Metadata { medians: Some(layout), ..Metadata::default() };
    Instance::new(InstanceKind::Medians, c_lower, deviations, vec![(0..n).collect()], rows, metadata)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    /// Shortest path: uniform random group per arc.
    R,
    /// Shortest path: arcs bucketed by their tail's shortest-path cost to the target.
    P,
    /// Shortest path: arcs bucketed by their tail's distance to the target.
    D,
    /// Medians: uniform random group per location row.
    Lo,
    /// Medians: rows bucketed by their deviation sum.
    G,
}

impl SchemeKind {
    fn for_kind(self) -> InstanceKind {
        match self {
            SchemeKind::R | SchemeKind::P | SchemeKind::D => InstanceKind::ShortestPath,
            SchemeKind::Lo | SchemeKind::G => InstanceKind::Medians,
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::R => "r",
            SchemeKind::P => "p",
            SchemeKind::D => "d",
            SchemeKind::Lo => "lo",
            SchemeKind::G => "g",
        })
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "r" => Ok(SchemeKind::R),
            "p" => Ok(SchemeKind::P),
            "d" => Ok(SchemeKind::D),
            "lo" => Ok(SchemeKind::Lo),
            "g" => Ok(SchemeKind::G),
            other => Err(Error::InvalidArgument(format!("unknown partition scheme {other:?} (r, p, d, lo, g)"))),
        }
    }
}

/// How to split an instance into `k` groups. `seed` drives the random schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionScheme {
    pub kind: SchemeKind,
    pub k: usize,
    pub seed: u64,
}

impl fmt::Display for PartitionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SchemeKind::R | SchemeKind::Lo => write!(f, "{}:K={}:seed={}", self.kind, self.k, self.seed),
            _ => write!(f, "{}:K={}", self.kind, self.k),
        }
    }
}

impl FromStr for PartitionScheme {
    type Err = Error;

    /// Parses the [`Display`](fmt::Display) form, e.g. `r:K=3:seed=1` or `g:K=2`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad partition scheme {s:?}"));
        let mut parts = s.split(':');
        let kind = parts.next().ok_or_else(bad)?.parse()?;
        let mut scheme = PartitionScheme { kind, k: 0, seed: 0 };
        for part in parts {
            match part.split_once('=') {
                Some(("K", v)) => scheme.k = v.parse().map_err(|_| bad())?,
                Some(("seed", v)) => scheme.seed = v.parse().map_err(|_| bad())?,
                _ => return Err(bad()),
            }
        }
        if scheme.k == 0 {
            return Err(bad());
        }
        Ok(scheme)
    }
}

/// Bucket of `value` among `k` half-open slices of `[0, max]`, the last
/// one closed. Values outside go to the last bucket.
fn bucket(value: f64, max: f64, k: usize) -> usize {
    if !(value.is_finite() && max > 0.0) {
        return if value.is_finite() { 0 } else { k - 1 };
    }
    let lambda = max / k as f64;
    ((value / lambda).floor().max(0.0) as usize).min(k - 1)
}

fn buckets(values: &[f64], k: usize) -> Vec<usize> {
    let max = values.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
    values.iter().map(|&v| bucket(v, max, k)).collect()
}

/// Shortest-path cost from every node to `target` (infinite when unreachable).
pub fn costs_to(graph: &SpGraph, target: usize) -> Vec<f64> {
    #[derive(PartialEq)]
    struct Item(f64, usize);
    impl Eq for Item {}
    impl PartialOrd for Item {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Item {
        fn cmp(&self, other: &Self) -> Ordering {
            other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
        }
    }

    let n = graph.points.len();
    let mut incoming: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for a in &graph.arcs {
        incoming[a[1]].push((a[0], distance(graph.points[a[0]], graph.points[a[1]])));
    }
    let mut dist = vec![f64::INFINITY; n];
    dist[target] = 0.0;
    let mut heap = BinaryHeap::from([Item(0.0, target)]);
    while let Some(Item(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(u, w) in &incoming[v] {
            if d + w < dist[u] {
                dist[u] = d + w;
                heap.push(Item(d + w, u));
            }
        }
    }
    dist
}

/// Group label per variable under `scheme`, before empty groups are dropped.
fn labels(inst: &Instance, scheme: PartitionScheme) -> Result<Vec<usize>> {
    let k = scheme.k;
    let mut rng = UnitRng::new(scheme.seed);
    match scheme.kind {
        SchemeKind::R | SchemeKind::P | SchemeKind::D => {
            let graph = inst.metadata().graph.as_ref().expect("checked by partition");
            let node_group = match scheme.kind {
                SchemeKind::R => return Ok((0..inst.n()).map(|_| rng.index(k)).collect()),
                SchemeKind::P => buckets(&costs_to(graph, graph.target), k),
                _ => {
                    let t = graph.points[graph.target];
                    let dist: Vec<f64> = graph.points.iter().map(|&p| distance(p, t)).collect();
                    buckets(&dist, k)
                }
            };
            Ok(graph.arcs.iter().map(|a| node_group[a[0]]).collect())
        }
        SchemeKind::Lo | SchemeKind::G => {
            let layout = inst.metadata().medians.as_ref().expect("checked by partition");
            let l = layout.l;
            let row_group = if scheme.kind == SchemeKind::Lo {
                (0..l).map(|_| rng.index(k)).collect()
            } else {
                let d = inst.deviations();
                let sums: Vec<f64> = (0..l).map(|i| (0..l).map(|j| d[layout.assign(i, j)]).sum()).collect();
                buckets(&sums, k)
            };
            let mut out = vec![0; inst.n()];
            for i in 0..l {
                for j in 0..l {
                    out[layout.assign(i, j)] = row_group[i];
                }
                out[layout.open(i)] = row_group[i];
            }
            Ok(out)
        }
    }
}

/// Groups `P_1, …, P_K` under `scheme`; empty groups are dropped, so fewer
/// than `scheme.k` groups may come back. Medians opening variables join the
/// group of their location.
pub fn partition(inst: &Instance, scheme: PartitionScheme) -> Result<Vec<Vec<usize>>> {
    if scheme.k == 0 {
        return Err(Error::InvalidArgument("a partition needs K >= 1".into()));
    }
    let meta = inst.metadata();
    let has_data = match scheme.kind.for_kind() {
        InstanceKind::ShortestPath => meta.graph.is_some(),
        _ => meta.medians.is_some(),
    };
    if inst.kind() != scheme.kind.for_kind() || !has_data {
        return Err(Error::InvalidArgument(format!(
            "scheme {} does not apply to {} instances",
            scheme.kind,
            inst.kind()
        )));
    }
    let labels = labels(inst, scheme)?;
    let mut groups = vec![Vec::new(); scheme.k];
    for (j, &g) in labels.iter().enumerate() {
        groups[g].push(j);
    }
    groups.retain(|g| !g.is_empty());
    Ok(groups)
}

/// `inst` regrouped under `scheme`, with the scheme recorded in the metadata.
pub fn apply_partition(inst: &Instance, scheme: PartitionScheme) -> Result<Instance> {
    let groups = partition(inst, scheme)?;
    let mut meta = inst.metadata().clone();
    meta.partition_scheme = Some(scheme.to_string());
    Ok(inst.with_partition(groups)?.with_metadata(meta))
}

/// Parameters of the generated Ω families. Every construction scales with
/// the largest deviation `m_k` of each group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OmegaParams {
    /// `[δ m_k, (δ + 1) m_k]`.
    Interval { delta: f64 },
    /// Direction `scale · m_k`; `scale` defaults to 1 for shortest paths and
    /// `l²` for medians.
    Segment { alpha_min: f64, alpha_max: f64, scale: Option<f64> },
    /// `Γ̲ = β₁ m`, `𝒟 = β₂ Γ̲`, `Δ = δ max_k 𝒟_k`.
    Budgeted { beta1: f64, beta2: f64, delta: f64 },
}

impl OmegaParams {
    pub fn interval(delta: f64) -> Self {
        OmegaParams::Interval { delta }
    }

    pub fn segment() -> Self {
        OmegaParams::Segment { alpha_min: 0.0, alpha_max: 1.0, scale: None }
    }

    pub fn budgeted(beta1: f64, beta2: f64, delta: f64) -> Self {
        OmegaParams::Budgeted { beta1, beta2, delta }
    }
}

fn check_nonnegative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidOmega(format!("{name} must be finite and >= 0, got {v}")))
    }
}

/// Ω over the groups of `inst`.
pub fn build_omega(inst: &Instance, params: OmegaParams) -> Result<OmegaSpec> {
    let m = inst.group_max_deviation();
    match params {
        OmegaParams::Interval { delta } => {
            check_nonnegative("delta", delta)?;
            OmegaSpec::interval(m.iter().map(|v| delta * v).collect(), m.iter().map(|v| (delta + 1.0) * v).collect())
        }
        OmegaParams::Segment { alpha_min, alpha_max, scale } => {
            let scale = scale.unwrap_or_else(|| match &inst.metadata().medians {
                Some(layout) => (layout.l * layout.l) as f64,
                None => 1.0,
            });
            check_nonnegative("scale", scale)?;
            OmegaSpec::segment(m.iter().map(|v| scale * v).collect(), alpha_min, alpha_max)
        }
        OmegaParams::Budgeted { beta1, beta2, delta } => {
            check_nonnegative("beta1", beta1)?;
            check_nonnegative("beta2", beta2)?;
            check_nonnegative("delta", delta)?;
            let base: Vec<f64> = m.iter().map(|v| beta1 * v).collect();
            let spread: Vec<f64> = base.iter().map(|v| beta2 * v).collect();
            let budget = delta * spread.iter().copied().fold(0.0, f64::max);
            OmegaSpec::budgeted(base, spread, budget)
        }
    }
}
