//! Brute-force LP oracle shared by the integration suites.
//!
//! Enumerates every basic solution of a program with nonnegative variables
//! (all candidate systems here carry a normalization row, so the feasible
//! region is a bounded polytope and vertex enumeration is complete) and
//! takes the best feasible vertex. Entirely independent of the simplex
//! code path.

#![allow(dead_code)]

use std::collections::HashMap;

use coherence_core::{rat, LinearProgram, LpOutcome, Rational, Sense, SolvedProgram};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    Optimal(Rational),
    Infeasible,
}

fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    let zero = rat(0, 1);
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r][col] != zero)?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col].clone();
        for r in 0..n {
            if r == col || a[r][col] == zero {
                continue;
            }
            let f = &a[r][col] / &p;
            for c in col..n {
                let s = &f * &a[col][c];
                a[r][c] = &a[r][c] - &s;
            }
            let s = &f * &b[col];
            b[r] = &b[r] - &s;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

fn for_each_combination(pool: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, pool: usize, left: usize, current: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if left == 0 {
            f(current);
            return;
        }
        let mut i = start;
        while i + left <= pool {
            current.push(i);
            rec(i + 1, pool, left - 1, current, f);
            current.pop();
            i += 1;
        }
    }
    rec(0, pool, k, &mut Vec::new(), f);
}

/// Every vertex of the program's feasible region (with duplicates).
pub fn oracle_vertices(lp: &LinearProgram) -> Vec<Vec<Rational>> {
    assert!(
        lp.nonneg.iter().all(|&b| b),
        "oracle expects nonnegative variables"
    );
    let n = lp.num_vars;
    let zero = rat(0, 1);
    let mut rows: Vec<(Vec<Rational>, Rational)> = lp
        .constraints
        .iter()
        .map(|c| (c.coeffs.clone(), c.rhs.clone()))
        .collect();
    for i in 0..n {
        let mut unit = vec![zero.clone(); n];
        unit[i] = rat(1, 1);
        rows.push((unit, zero.clone()));
    }
    let mut vertices = Vec::new();
    for_each_combination(rows.len(), n, &mut |pick| {
        let a: Vec<Vec<Rational>> = pick.iter().map(|&r| rows[r].0.clone()).collect();
        let b: Vec<Rational> = pick.iter().map(|&r| rows[r].1.clone()).collect();
        if let Some(x) = solve_square(a, b) {
            if lp.satisfied_by(&x) {
                vertices.push(x);
            }
        }
    });
    vertices
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut acc = rat(0, 1);
    for (x, y) in a.iter().zip(b) {
        acc = &acc + &(x * y);
    }
    acc
}

fn best_over(lp: &LinearProgram, vertices: &[Vec<Rational>]) -> OracleOutcome {
    let mut best: Option<Rational> = None;
    for v in vertices {
        let value = dot(&lp.objective, v);
        best = Some(match best.take() {
            None => value,
            Some(old) => match lp.sense {
                Sense::Min => {
                    if value < old {
                        value
                    } else {
                        old
                    }
                }
                Sense::Max => {
                    if value > old {
                        value
                    } else {
                        old
                    }
                }
            },
        });
    }
    match best {
        Some(value) => OracleOutcome::Optimal(value),
        None => OracleOutcome::Infeasible,
    }
}

pub fn oracle_solve(lp: &LinearProgram) -> OracleOutcome {
    best_over(lp, &oracle_vertices(lp))
}

/// Replays recorded programs against the oracle; exact agreement required.
/// Programs sharing a feasible region share one vertex enumeration. Returns
/// how many programs were checked.
pub fn assert_oracle_agrees(programs: &[SolvedProgram]) -> usize {
    let mut vertex_cache: HashMap<String, Vec<Vec<Rational>>> = HashMap::new();
    let mut checked = 0;
    for sp in programs {
        if sp.lp.num_vars > 8 {
            continue;
        }
        let key = format!("{:?}|{:?}", sp.lp.constraints, sp.lp.nonneg);
        let vertices = vertex_cache
            .entry(key)
            .or_insert_with(|| oracle_vertices(&sp.lp));
        let oracle = best_over(&sp.lp, vertices);
        match (&sp.outcome, &oracle) {
            (LpOutcome::Optimal { value, witness }, OracleOutcome::Optimal(v)) => {
                assert_eq!(value, v, "optimum mismatch on {}", sp.label);
                assert!(
                    sp.lp.satisfied_by(witness),
                    "witness violates constraints on {}",
                    sp.label
                );
            }
            (LpOutcome::Infeasible, OracleOutcome::Infeasible) => {}
            (got, want) => panic!(
                "solver and oracle disagree on {}: solver {:?}, oracle {:?}",
                sp.label, got, want
            ),
        }
        checked += 1;
    }
    checked
}
