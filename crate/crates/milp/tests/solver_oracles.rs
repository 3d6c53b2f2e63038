//! Bundled solver checked against independent oracles: vertex enumeration,
//! explicit LP duals and exhaustive enumeration of binary assignments.

use mprs_milp::{solve_lp, solve_milp, MilpModel, Relation, Sense, SolveStatus, SolverConfig, VarKind};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for k in col..n {
                        a[r][k] -= f * a[col][k];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Minimum of `c·x` over `{A x <= b, lo <= x <= hi}` by enumerating every
/// choice of `n` tight constraints.
fn vertex_enumeration_min(c: &[f64], a: &[Vec<f64>], b: &[f64], lo: &[f64], hi: &[f64]) -> Option<f64> {
    let n = c.len();
    let mut planes: Vec<(Vec<f64>, f64)> = a.iter().cloned().zip(b.iter().copied()).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e.clone(), lo[j]));
        planes.push((e, hi[j]));
    }
    let m = planes.len();
    let mut best: Option<f64> = None;
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let sys: Vec<Vec<f64>> = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let rhs: Vec<f64> = idx.iter().map(|&i| planes[i].1).collect();
        if let Some(x) = solve_dense(sys, rhs) {
            let feasible =
                a.iter().zip(b).all(|(row, &bi)| row.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= bi + 1e-8)
                    && (0..n).all(|j| x[j] >= lo[j] - 1e-8 && x[j] <= hi[j] + 1e-8);
            if feasible {
                let v: f64 = c.iter().zip(&x).map(|(p, q)| p * q).sum();
                best = Some(best.map_or(v, |b: f64| b.min(v)));
            }
        }
        // next combination
        let mut k = n;
        loop {
            if k == 0 {
                return best;
            }
            k -= 1;
            if idx[k] < m - n + k {
                idx[k] += 1;
                for t in k + 1..n {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
    }
}

#[test]
fn single_active_bound() {
    let mut m = MilpModel::new(Sense::Minimize);
    let x = m.add_continuous(Some("x1".into()), 0.0, 10.0).unwrap();
    m.set_objective_coeff(x, 1.0).unwrap();
    m.add_constraint([(x, 1.0)], Relation::Ge, 3.0).unwrap();
    let sol = solve_lp(&m, &cfg()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!((sol.objective - 3.0).abs() < 1e-12);
}

#[test]
fn infeasible_and_unbounded_are_reported() {
    let mut m = MilpModel::new(Sense::Minimize);
    let x = m.add_continuous(None, 0.0, 1.0).unwrap();
    m.add_constraint([(x, 1.0)], Relation::Ge, 2.0).unwrap();
    assert_eq!(solve_lp(&m, &cfg()).unwrap().status, SolveStatus::Infeasible);
    assert_eq!(solve_milp(&m, &cfg()).unwrap().status, SolveStatus::Infeasible);

    let mut m = MilpModel::new(Sense::Maximize);
    let x = m.add_continuous(None, f64::NEG_INFINITY, f64::INFINITY).unwrap();
    let y = m.add_binary(None);
    m.set_objective_coeff(x, 1.0).unwrap();
    m.add_constraint([(x, 1.0), (y, -1.0)], Relation::Ge, 0.0).unwrap();
    assert_eq!(solve_lp(&m, &cfg()).unwrap().status, SolveStatus::Unbounded);
    assert_eq!(solve_milp(&m, &cfg()).unwrap().status, SolveStatus::Unbounded);
}

#[test]
fn free_and_mirrored_variables() {
    // max s  s.t.  s <= 4 - 2y,  s <= 1 + 5y,  z <= -3 (z free below), min adds z
    let mut m = MilpModel::new(Sense::Maximize);
    let s = m.add_continuous(None, f64::NEG_INFINITY, f64::INFINITY).unwrap();
    let y = m.add_binary(None);
    let z = m.add_continuous(None, f64::NEG_INFINITY, -3.0).unwrap();
    m.set_objective_coeff(s, 1.0).unwrap();
    m.set_objective_coeff(z, 1.0).unwrap();
    m.add_constraint([(s, 1.0), (y, 2.0)], Relation::Le, 4.0).unwrap();
    m.add_constraint([(s, 1.0), (y, -5.0)], Relation::Le, 1.0).unwrap();
    let lp = solve_lp(&m, &cfg()).unwrap();
    // LP: s = 4 - 2y = 1 + 5y -> y = 3/7, s = 22/7
    assert!((lp.objective - (22.0 / 7.0 - 3.0)).abs() < 1e-9, "{}", lp.objective);
    let ip = solve_milp(&m, &cfg()).unwrap();
    assert_eq!(ip.status, SolveStatus::Optimal);
    assert!((ip.objective - (2.0 - 3.0)).abs() < 1e-9);
    assert_eq!(ip.values[y], 1.0);
}

#[test]
fn lone_binary() {
    let mut m = MilpModel::new(Sense::Minimize);
    let y = m.add_binary(None);
    m.set_objective_coeff(y, 1.0).unwrap();
    let sol = solve_milp(&m, &cfg()).unwrap();
    assert_eq!(sol.objective, 0.0);
    assert_eq!(sol.values, vec![0.0]);
}

#[test]
fn relaxing_nothing_is_identity_and_relaxing_lowers_the_bound() {
    // max y1 + y2 s.t. 2 y1 + 2 y2 <= 3 -> MILP 1, relaxing y2 gives 1.5
    let mut m = MilpModel::new(Sense::Maximize);
    let y1 = m.add_binary(None);
    let y2 = m.add_binary(None);
    m.set_objective_coeff(y1, 1.0).unwrap();
    m.set_objective_coeff(y2, 1.0).unwrap();
    m.add_constraint([(y1, 2.0), (y2, 2.0)], Relation::Le, 3.0).unwrap();
    assert_eq!(m.relax_binaries(&[]).unwrap(), m);
    let milp = solve_milp(&m, &cfg()).unwrap().objective;
    let relaxed = m.relax_binaries(&[y2]).unwrap();
    assert_eq!(relaxed.var_kind(y2), VarKind::Continuous { lo: 0.0, hi: 1.0 });
    let rel = solve_milp(&relaxed, &cfg()).unwrap().objective;
    assert!((milp - 1.0).abs() < 1e-9);
    assert!((rel - 1.5).abs() < 1e-9);
    // In minimisation form the relaxed optimum of -obj is strictly below.
    assert!(-rel < -milp);
    assert!(m.relax_binaries(&[7]).is_err());
}

#[test]
fn node_limit_reports_incumbent_only() {
    // A knapsack whose LP relaxation is fractional at the root.
    let mut m = MilpModel::new(Sense::Maximize);
    let w = [5.0, 4.0, 3.0, 7.0, 6.0, 2.0, 9.0, 8.0];
    let p = [8.0, 5.0, 4.0, 11.0, 9.0, 3.0, 14.0, 12.0];
    let vars: Vec<usize> = (0..w.len()).map(|_| m.add_binary(None)).collect();
    for (k, &v) in vars.iter().enumerate() {
        m.set_objective_coeff(v, p[k]).unwrap();
    }
    m.add_constraint(vars.iter().zip(w).map(|(&v, a)| (v, a)), Relation::Le, 20.5).unwrap();
    let full = solve_milp(&m, &cfg()).unwrap();
    assert_eq!(full.status, SolveStatus::Optimal);
    let limited = solve_milp(&m, &SolverConfig { node_limit: 2, ..cfg() }).unwrap();
    assert_eq!(limited.status, SolveStatus::LimitReached);
    let bound = limited.best_bound.unwrap();
    assert!(bound >= full.objective - 1e-9);
    if limited.has_incumbent() {
        assert!(limited.objective <= full.objective + 1e-9);
    }
}

/// `(c, A, b, lower, upper)` of `min cᵗx, Ax <= b, lower <= x <= upper`.
type BoxLp = (Vec<f64>, Vec<Vec<f64>>, Vec<f64>, Vec<f64>, Vec<f64>);

fn random_bounded_lp(rng: &mut ChaCha8Rng, n: usize, rows: usize) -> BoxLp {
    let c: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
    let lo: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..0.0)).collect();
    let hi: Vec<f64> = lo.iter().map(|l| l + rng.random_range(0.5..4.0)).collect();
    let x0: Vec<f64> = (0..n).map(|j| rng.random_range(lo[j]..hi[j])).collect();
    let a: Vec<Vec<f64>> = (0..rows).map(|_| (0..n).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
    let b: Vec<f64> =
        a.iter().map(|row| row.iter().zip(&x0).map(|(p, q)| p * q).sum::<f64>() + rng.random_range(0.0..1.0)).collect();
    (c, a, b, lo, hi)
}

#[test]
fn random_lps_match_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let (c, a, b, lo, hi) = random_bounded_lp(&mut rng, 5, 4);
        let mut m = MilpModel::new(Sense::Minimize);
        for j in 0..5 {
            m.add_continuous(None, lo[j], hi[j]).unwrap();
            m.set_objective_coeff(j, c[j]).unwrap();
        }
        for (row, &bi) in a.iter().zip(&b) {
            m.add_constraint(row.iter().copied().enumerate(), Relation::Le, bi).unwrap();
        }
        let sol = solve_lp(&m, &cfg()).unwrap();
        let oracle = vertex_enumeration_min(&c, &a, &b, &lo, &hi).expect("feasible by construction");
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective - oracle).abs() < 1e-6, "{} vs {}", sol.objective, oracle);
        assert!(m.max_violation(&sol.values) < 1e-7);
    }
}

/// min c x s.t. A x >= b, x >= 0 and its dual max b y s.t. A^T y <= c, y >= 0,
/// both feasible by construction.
fn primal_dual_pair(rng: &mut ChaCha8Rng) -> (MilpModel, MilpModel) {
    let n = rng.random_range(2..7);
    let m = rng.random_range(1..6);
    let a: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
    let x0: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0)).collect();
    let y0: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..2.0)).collect();
    let b: Vec<f64> =
        (0..m).map(|i| (0..n).map(|j| a[i][j] * x0[j]).sum::<f64>() - rng.random_range(0.0..1.0)).collect();
    let c: Vec<f64> =
        (0..n).map(|j| (0..m).map(|i| a[i][j] * y0[i]).sum::<f64>() + rng.random_range(0.0..1.0)).collect();

    let mut primal = MilpModel::new(Sense::Minimize);
    for j in 0..n {
        primal.add_continuous(None, 0.0, f64::INFINITY).unwrap();
        primal.set_objective_coeff(j, c[j]).unwrap();
    }
    for i in 0..m {
        primal.add_constraint((0..n).map(|j| (j, a[i][j])), Relation::Ge, b[i]).unwrap();
    }
    let mut dual = MilpModel::new(Sense::Maximize);
    for i in 0..m {
        dual.add_continuous(None, 0.0, f64::INFINITY).unwrap();
        dual.set_objective_coeff(i, b[i]).unwrap();
    }
    for j in 0..n {
        dual.add_constraint((0..m).map(|i| (i, a[i][j])), Relation::Le, c[j]).unwrap();
    }
    (primal, dual)
}

#[test]
fn strong_duality_on_random_lps() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let (p, d) = primal_dual_pair(&mut rng);
        let ps = solve_lp(&p, &cfg()).unwrap();
        let ds = solve_lp(&d, &cfg()).unwrap();
        assert_eq!(ps.status, SolveStatus::Optimal);
        assert_eq!(ds.status, SolveStatus::Optimal);
        let scale = ps.objective.abs().max(1.0);
        assert!((ps.objective - ds.objective).abs() < 1e-6 * scale, "{} vs {}", ps.objective, ds.objective);
    }
}

/// Random mixed model that is feasible by construction.
fn random_mixed_model(rng: &mut ChaCha8Rng, bins: usize, conts: usize) -> MilpModel {
    let sense = if rng.random_bool(0.5) { Sense::Minimize } else { Sense::Maximize };
    let mut m = MilpModel::new(sense);
    let mut point = Vec::new();
    for _ in 0..bins {
        m.add_binary(None);
        point.push(if rng.random_bool(0.5) { 1.0 } else { 0.0 });
    }
    for _ in 0..conts {
        let lo = rng.random_range(-4.0..0.0);
        let hi = lo + rng.random_range(1.0..6.0);
        m.add_continuous(None, lo, hi).unwrap();
        point.push(rng.random_range(lo..hi));
    }
    let n = bins + conts;
    for j in 0..n {
        m.set_objective_coeff(j, rng.random_range(-10.0..10.0)).unwrap();
    }
    let rows = rng.random_range(1..=bins.max(2));
    for _ in 0..rows {
        let mut coeffs: Vec<(usize, f64)> = Vec::new();
        for j in 0..n {
            if rng.random_bool(0.6) {
                coeffs.push((j, rng.random_range(-5.0..5.0)));
            }
        }
        let act: f64 = coeffs.iter().map(|&(j, a)| a * point[j]).sum();
        match rng.random_range(0..3) {
            0 => m.add_constraint(coeffs, Relation::Le, act + rng.random_range(0.0..2.0)).unwrap(),
            1 => m.add_constraint(coeffs, Relation::Ge, act - rng.random_range(0.0..2.0)).unwrap(),
            _ => m.add_constraint(coeffs, Relation::Eq, act).unwrap(),
        };
    }
    m
}

/// Enumerates all binary assignments, completing each with an LP.
fn brute_force(model: &MilpModel) -> Option<f64> {
    let bins = model.binary_indices();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << bins.len()) {
        let mut fixed = model.linear_relaxation();
        for (k, &j) in bins.iter().enumerate() {
            let v = f64::from((mask >> k) & 1);
            fixed.add_constraint([(j, 1.0)], Relation::Eq, v).unwrap();
        }
        let sol = solve_lp(&fixed, &cfg()).unwrap();
        if sol.status == SolveStatus::Optimal {
            let v = sol.objective;
            best = Some(match (best, model.sense()) {
                (None, _) => v,
                (Some(b), Sense::Minimize) => b.min(v),
                (Some(b), Sense::Maximize) => b.max(v),
            });
        }
    }
    best
}

#[test]
fn random_milps_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..60 {
        let bins = rng.random_range(1..=8);
        let conts = rng.random_range(0..=4);
        let model = random_mixed_model(&mut rng, bins, conts);
        let sol = solve_milp(&model, &cfg()).unwrap();
        let oracle = brute_force(&model).expect("feasible by construction");
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective - oracle).abs() < 1e-6, "{} vs {}", sol.objective, oracle);
        for &j in &model.binary_indices() {
            assert!(sol.values[j] == 0.0 || sol.values[j] == 1.0);
        }
        assert!(model.max_violation(&sol.values) < 1e-6);
    }
}

#[test]
fn solves_are_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..10 {
        let model = random_mixed_model(&mut rng, 10, 3);
        let a = solve_milp(&model, &cfg()).unwrap();
        let b = solve_milp(&model, &cfg()).unwrap();
        assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn milp_with_up_to_twelve_binaries_matches_enumeration(seed in any::<u64>(), bins in 1usize..=12, conts in 0usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = random_mixed_model(&mut rng, bins, conts);
        let sol = solve_milp(&model, &cfg()).unwrap();
        let oracle = brute_force(&model).unwrap();
        prop_assert!((sol.objective - oracle).abs() < 1e-6);
    }
}
