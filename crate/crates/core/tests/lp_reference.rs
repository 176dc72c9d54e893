//! Random-LP cross-check against an independent dense reference solver.
//!
//! The reference implementation below shares no code with the production
//! simplex: bounds become explicit rows, lower bounds are shifted out, and
//! a single-phase Big-M tableau with Dantzig pricing does the pivoting.
//! Disagreement beyond 1e-7 flags a correctness bug in either side.

use hsc_core::model::{MilpInstance, Sense};
use hsc_core::solver::{solve_lp, LpStatus, SolverTolerances};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Textbook Big-M tableau simplex for `min c'x` over `Ax {<=,=,>=} b`,
/// `0 <= x <= u`. Upper bounds turn into rows; all data stays dense.
mod reference {
    pub enum RefStatus {
        Optimal(f64),
        Infeasible,
        Unbounded,
    }

    pub struct RefRow {
        pub coeffs: Vec<f64>,
        pub sense: i8, // -1 le, 0 eq, 1 ge
        pub rhs: f64,
    }

    pub fn solve(n: usize, c: &[f64], rows: &[RefRow]) -> RefStatus {
        // normalize to rhs >= 0
        let mut data: Vec<(Vec<f64>, i8, f64)> = rows
            .iter()
            .map(|r| {
                if r.rhs < 0.0 {
                    (r.coeffs.iter().map(|v| -v).collect(), -r.sense, -r.rhs)
                } else {
                    (r.coeffs.clone(), r.sense, r.rhs)
                }
            })
            .collect();
        data.sort_by(|a, b| a.1.cmp(&b.1));
        let m = data.len();

        // columns: x (n), slacks/surplus, artificials
        let mut n_slack = 0;
        for (_, sense, _) in &data {
            if *sense != 0 {
                n_slack += 1;
            }
        }
        let mut n_art = 0;
        for (_, sense, _) in &data {
            if *sense >= 0 {
                n_art += 1;
            }
        }
        let total = n + n_slack + n_art;
        let big_m = 1e7 * (1.0 + c.iter().fold(0.0f64, |a, &v| a.max(v.abs())));

        let mut tab = vec![vec![0.0f64; total + 1]; m];
        let mut cost = vec![0.0f64; total];
        cost[..n].copy_from_slice(c);
        let mut basis = vec![0usize; m];
        let mut s_at = n;
        let mut a_at = n + n_slack;
        for (i, (coeffs, sense, rhs)) in data.iter().enumerate() {
            tab[i][..n].copy_from_slice(coeffs);
            tab[i][total] = *rhs;
            match sense {
                -1 => {
                    tab[i][s_at] = 1.0;
                    basis[i] = s_at;
                    s_at += 1;
                }
                0 => {
                    tab[i][a_at] = 1.0;
                    cost[a_at] = big_m;
                    basis[i] = a_at;
                    a_at += 1;
                }
                _ => {
                    tab[i][s_at] = -1.0;
                    s_at += 1;
                    tab[i][a_at] = 1.0;
                    cost[a_at] = big_m;
                    basis[i] = a_at;
                    a_at += 1;
                }
            }
        }

        let max_iters = 200 * (m + total) + 5000;
        for _ in 0..max_iters {
            // reduced costs
            let mut entering = None;
            let mut best = -1e-9;
            for j in 0..total {
                if basis.contains(&j) {
                    continue;
                }
                let mut d = cost[j];
                for i in 0..m {
                    d -= cost[basis[i]] * tab[i][j];
                }
                if d < best {
                    best = d;
                    entering = Some(j);
                }
            }
            let Some(j) = entering else {
                // check artificials
                let mut obj = 0.0;
                for i in 0..m {
                    if basis[i] >= n + n_slack && tab[i][total] > 1e-6 {
                        return RefStatus::Infeasible;
                    }
                    if basis[i] < n {
                        obj += c[basis[i]] * tab[i][total];
                    }
                }
                return RefStatus::Optimal(obj);
            };
            // ratio test
            let mut leave = None;
            let mut best_ratio = f64::INFINITY;
            for i in 0..m {
                if tab[i][j] > 1e-9 {
                    let r = tab[i][total] / tab[i][j];
                    if r < best_ratio - 1e-12 || (r < best_ratio + 1e-12 && leave.map(|l: usize| basis[i] < basis[l]).unwrap_or(false)) {
                        best_ratio = r;
                        leave = Some(i);
                    }
                }
            }
            let Some(r) = leave else {
                return RefStatus::Unbounded;
            };
            // pivot
            let p = tab[r][j];
            for v in tab[r].iter_mut() {
                *v /= p;
            }
            for i in 0..m {
                if i != r {
                    let f = tab[i][j];
                    if f != 0.0 {
                        for k in 0..=total {
                            tab[i][k] -= f * tab[r][k];
                        }
                    }
                }
            }
            basis[r] = j;
        }
        RefStatus::Unbounded // iteration blow-up counts as disagreement
    }
}

fn random_instance(rng: &mut StdRng, n: usize, m: usize) -> MilpInstance {
    let mut inst = MilpInstance::new();
    for j in 0..n {
        inst.push_var(format!("x{j}"), 0.0, rng.random_range(2.0..12.0), false);
    }
    for j in 0..n {
        inst.objective[j] = rng.random_range(-5.0..5.0);
    }
    // mixture of senses; a known-feasible point keeps eq/ge rows satisfiable
    let x0: Vec<f64> = (0..n).map(|j| rng.random_range(0.0..inst.upper[j] * 0.5)).collect();
    for i in 0..m {
        let coeffs: Vec<(u32, f64)> = (0..n)
            .filter_map(|j| {
                if rng.random_range(0.0..1.0) < 0.6 {
                    Some((j as u32, rng.random_range(-4.0..4.0)))
                } else {
                    None
                }
            })
            .collect();
        if coeffs.is_empty() {
            continue;
        }
        let act: f64 = coeffs.iter().map(|&(j, a)| a * x0[j as usize]).sum();
        let (sense, rhs) = match rng.random_range(0..10) {
            0 => (Sense::Eq, act),
            1 | 2 => (Sense::Ge, act - rng.random_range(0.0..3.0)),
            _ => (Sense::Le, act + rng.random_range(0.0..5.0)),
        };
        inst.add_row(format!("r{i}"), coeffs, sense, rhs).unwrap();
    }
    inst
}

fn to_reference(inst: &MilpInstance) -> (usize, Vec<f64>, Vec<reference::RefRow>) {
    let n = inst.n_vars();
    let mut rows: Vec<reference::RefRow> = inst
        .rows
        .iter()
        .map(|r| {
            let mut dense = vec![0.0; n];
            for &(j, a) in &r.coeffs {
                dense[j as usize] = a;
            }
            reference::RefRow {
                coeffs: dense,
                sense: match r.sense {
                    Sense::Le => -1,
                    Sense::Eq => 0,
                    Sense::Ge => 1,
                },
                rhs: r.rhs,
            }
        })
        .collect();
    // upper bounds as explicit rows (lower bounds are all zero here)
    for j in 0..n {
        if inst.upper[j].is_finite() {
            let mut dense = vec![0.0; n];
            dense[j] = 1.0;
            rows.push(reference::RefRow { coeffs: dense, sense: -1, rhs: inst.upper[j] });
        }
    }
    (n, inst.objective.clone(), rows)
}

#[test]
fn hundred_random_lps_match_the_dense_reference() {
    let mut rng = StdRng::seed_from_u64(20_250_801);
    let mut optimal = 0;
    for case in 0..100 {
        let n = rng.random_range(8..30);
        let m = rng.random_range(5..20);
        let inst = random_instance(&mut rng, n, m);
        let mine = solve_lp(&inst, &SolverTolerances::default()).expect("no numerical failure expected");
        let (rn, rc, rrows) = to_reference(&inst);
        let them = reference::solve(rn, &rc, &rrows);
        match (mine.status, them) {
            (LpStatus::Optimal, reference::RefStatus::Optimal(obj)) => {
                optimal += 1;
                let diff = (mine.objective - obj).abs();
                assert!(
                    diff <= 1e-7 * (1.0 + obj.abs()),
                    "case {case}: objective mismatch mine={} reference={obj}",
                    mine.objective
                );
            }
            (LpStatus::Infeasible, reference::RefStatus::Infeasible) => {}
            (LpStatus::Unbounded, reference::RefStatus::Unbounded) => {}
            (a, _) => panic!("case {case}: status disagreement (mine: {a:?})"),
        }
    }
    assert!(optimal >= 80, "generator should produce mostly solvable cases, got {optimal}");
}

#[test]
fn weak_duality_spot_check() {
    // min 3x + 2y st x + y >= 4, x + 3y >= 6, x,y >= 0
    // dual-feasible y = (2, 1/3) gives the bound 4*2 + 6/3 = 10
    let mut inst = MilpInstance::new();
    let x = inst.push_var("x".into(), 0.0, f64::INFINITY, false) as u32;
    let y = inst.push_var("y".into(), 0.0, f64::INFINITY, false) as u32;
    inst.objective = vec![3.0, 2.0];
    inst.add_row("r1".into(), vec![(x, 1.0), (y, 1.0)], Sense::Ge, 4.0).unwrap();
    inst.add_row("r2".into(), vec![(x, 1.0), (y, 3.0)], Sense::Ge, 6.0).unwrap();
    let sol = solve_lp(&inst, &SolverTolerances::default()).unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    // any feasible dual point bounds the primal from below
    for dual in [[2.0, 1.0 / 3.0], [0.0, 2.0 / 3.0], [3.0, 0.0]] {
        let feasible = dual[0] + dual[1] <= 3.0 + 1e-12 && dual[0] + 3.0 * dual[1] <= 2.0 + 1e-12;
        if feasible {
            let bound = 4.0 * dual[0] + 6.0 * dual[1];
            assert!(sol.objective >= bound - 1e-9, "duality violated: {} < {bound}", sol.objective);
        }
    }
}
