//! Exact linear programming over rationals.
//!
//! Two-phase primal simplex with Bland's rule on a dense tableau. Every
//! entry is a [`Rational`]; the case splits downstream hinge on knife-edge
//! equalities that floating point would misclassify, so no numeric
//! tolerance exists anywhere. Bland's rule makes cycling impossible, hence
//! termination is unconditional.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

/// Linear program over `num_vars` variables. Variables are non-negative by
/// default; clearing a `nonneg` flag makes that variable free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub nonneg: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpError {
    NoVariables,
    NoConstraints,
    DimensionMismatch {
        row: Option<usize>,
        expected: usize,
        got: usize,
    },
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::NoVariables => write!(f, "program has no variables"),
            LpError::NoConstraints => write!(f, "program has no constraints"),
            LpError::DimensionMismatch { row, expected, got } => match row {
                Some(r) => write!(f, "constraint {r}: {got} coefficients, expected {expected}"),
                None => write!(f, "{got} coefficients, expected {expected}"),
            },
        }
    }
}

impl core::error::Error for LpError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, witness: Vec<Rational> },
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible,
}

/// A solved program kept for replay: the exact input and the outcome the
/// solver reported. Feasibility probes are stored with an all-zero
/// objective, so a feasible probe records as `Optimal` with value 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolvedProgram {
    pub label: String,
    pub lp: LinearProgram,
    pub outcome: LpOutcome,
}

impl LinearProgram {
    pub fn minimize(objective: Vec<Rational>) -> LinearProgram {
        let n = objective.len();
        LinearProgram {
            num_vars: n,
            sense: Sense::Min,
            objective,
            constraints: Vec::new(),
            nonneg: vec![true; n],
        }
    }

    pub fn maximize(objective: Vec<Rational>) -> LinearProgram {
        let mut lp = LinearProgram::minimize(objective);
        lp.sense = Sense::Max;
        lp
    }

    /// Pure feasibility problem: zero objective.
    pub fn feasibility(num_vars: usize) -> LinearProgram {
        LinearProgram::minimize(vec![Rational::zero(); num_vars])
    }

    pub fn push_eq(&mut self, coeffs: Vec<Rational>, rhs: Rational) {
        self.constraints.push(Constraint {
            coeffs,
            relation: Relation::Eq,
            rhs,
        });
    }

    pub fn push_le(&mut self, coeffs: Vec<Rational>, rhs: Rational) {
        self.constraints.push(Constraint {
            coeffs,
            relation: Relation::Le,
            rhs,
        });
    }

    pub fn push_ge(&mut self, coeffs: Vec<Rational>, rhs: Rational) {
        self.constraints.push(Constraint {
            coeffs,
            relation: Relation::Ge,
            rhs,
        });
    }

    pub fn validate(&self) -> Result<(), LpError> {
        if self.num_vars == 0 {
            return Err(LpError::NoVariables);
        }
        if self.constraints.is_empty() {
            return Err(LpError::NoConstraints);
        }
        if self.objective.len() != self.num_vars {
            return Err(LpError::DimensionMismatch {
                row: None,
                expected: self.num_vars,
                got: self.objective.len(),
            });
        }
        if self.nonneg.len() != self.num_vars {
            return Err(LpError::DimensionMismatch {
                row: None,
                expected: self.num_vars,
                got: self.nonneg.len(),
            });
        }
        for (r, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != self.num_vars {
                return Err(LpError::DimensionMismatch {
                    row: Some(r),
                    expected: self.num_vars,
                    got: c.coeffs.len(),
                });
            }
        }
        Ok(())
    }

    /// Exact evaluation of all constraints at a point.
    pub fn satisfied_by(&self, point: &[Rational]) -> bool {
        if point.len() != self.num_vars {
            return false;
        }
        for (j, flag) in self.nonneg.iter().enumerate() {
            if *flag && point[j] < Rational::zero() {
                return false;
            }
        }
        self.constraints.iter().all(|c| {
            let lhs: Rational = c
                .coeffs
                .iter()
                .zip(point)
                .map(|(a, x)| a * x)
                .fold(Rational::zero(), |acc, t| acc + t);
            match c.relation {
                Relation::Eq => lhs == c.rhs,
                Relation::Le => lhs <= c.rhs,
                Relation::Ge => lhs >= c.rhs,
            }
        })
    }
}

// Dense tableau in standard form. Column layout: structural columns for the
// original variables (free variables split into a positive and a negative
// part), then slack columns, then artificial columns. rows[r][width] holds
// the right-hand side, which stays non-negative throughout.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    width: usize,
    art_start: usize,
    // structural column of each variable; free variables also own a negative
    // column at neg[j]
    pos_col: Vec<usize>,
    neg_col: Vec<Option<usize>>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let n = lp.num_vars;
        let pos_col: Vec<usize> = (0..n).collect();
        let mut neg_col = vec![None; n];
        let mut next = n;
        for j in 0..n {
            if !lp.nonneg[j] {
                neg_col[j] = Some(next);
                next += 1;
            }
        }
        let structural = next;
        let m = lp.constraints.len();

        // orient rows so the right-hand side is non-negative
        let mut oriented: Vec<(Vec<Rational>, Relation, Rational)> = Vec::with_capacity(m);
        for c in &lp.constraints {
            let mut coeffs = c.coeffs.clone();
            let mut rel = c.relation;
            let mut rhs = c.rhs.clone();
            if rhs < Rational::zero() {
                for a in &mut coeffs {
                    *a = -a.clone();
                }
                rhs = -rhs;
                rel = match rel {
                    Relation::Eq => Relation::Eq,
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                };
            }
            oriented.push((coeffs, rel, rhs));
        }

        let slacks = oriented
            .iter()
            .filter(|(_, rel, _)| !matches!(rel, Relation::Eq))
            .count();
        let artificials = oriented
            .iter()
            .filter(|(_, rel, _)| !matches!(rel, Relation::Le))
            .count();
        let art_start = structural + slacks;
        let width = art_start + artificials;

        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut slack_cursor = structural;
        let mut art_cursor = art_start;
        for (coeffs, rel, rhs) in oriented {
            let mut row = vec![Rational::zero(); width + 1];
            for (j, a) in coeffs.into_iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                row[pos_col[j]] = a.clone();
                if let Some(nc) = neg_col[j] {
                    row[nc] = -a;
                }
            }
            row[width] = rhs;
            match rel {
                Relation::Le => {
                    row[slack_cursor] = Rational::one();
                    basis.push(slack_cursor);
                    slack_cursor += 1;
                }
                Relation::Ge => {
                    row[slack_cursor] = -Rational::one();
                    slack_cursor += 1;
                    row[art_cursor] = Rational::one();
                    basis.push(art_cursor);
                    art_cursor += 1;
                }
                Relation::Eq => {
                    row[art_cursor] = Rational::one();
                    basis.push(art_cursor);
                    art_cursor += 1;
                }
            }
            rows.push(row);
        }

        Tableau {
            rows,
            basis,
            width,
            art_start,
            pos_col,
            neg_col,
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let factor = self.rows[r][j].clone();
        debug_assert!(!factor.is_zero());
        for a in &mut self.rows[r] {
            *a = a.clone() / factor.clone();
        }
        for r2 in 0..self.rows.len() {
            if r2 == r {
                continue;
            }
            let scale = self.rows[r2][j].clone();
            if scale.is_zero() {
                continue;
            }
            for col in 0..=self.width {
                let delta = &scale * &self.rows[r][col];
                self.rows[r2][col] = &self.rows[r2][col] - delta;
            }
        }
        self.basis[r] = j;
    }

    // Reduced-cost row for `cost` priced out against the current basis; the
    // last slot carries the negated objective value.
    fn priced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut red: Vec<Rational> = cost.to_vec();
        red.push(Rational::zero());
        for (r, row) in self.rows.iter().enumerate() {
            let cb = red[self.basis[r]].clone();
            if cb.is_zero() {
                continue;
            }
            for col in 0..=self.width {
                let delta = &cb * &row[col];
                red[col] = &red[col] - delta;
            }
        }
        red
    }

    // Bland's rule minimization over columns below `col_limit`. Returns
    // false when an improving column has no positive pivot entry.
    fn run(&mut self, red: &mut Vec<Rational>, col_limit: usize) -> bool {
        loop {
            let entering = (0..col_limit).find(|j| red[*j] < Rational::zero());
            let Some(j) = entering else {
                return true;
            };
            let mut leaving: Option<usize> = None;
            let mut best: Option<Rational> = None;
            for r in 0..self.rows.len() {
                if self.rows[r][j] <= Rational::zero() {
                    continue;
                }
                let ratio = &self.rows[r][self.width] / &self.rows[r][j];
                let better = match &best {
                    None => true,
                    Some(b) => {
                        ratio < *b || (ratio == *b && self.basis[r] < self.basis[leaving.unwrap()])
                    }
                };
                if better {
                    best = Some(ratio);
                    leaving = Some(r);
                }
            }
            let Some(r) = leaving else {
                return false;
            };
            self.pivot(r, j);
            let scale = red[j].clone();
            if !scale.is_zero() {
                for col in 0..=self.width {
                    let delta = &scale * &self.rows[r][col];
                    red[col] = &red[col] - delta;
                }
            }
        }
    }

    // Phase one: minimize the sum of artificial variables. Returns false on
    // infeasibility; otherwise artificials are out of the basis and
    // redundant rows are dropped.
    fn phase_one(&mut self) -> bool {
        if self.art_start == self.width {
            return true;
        }
        let mut cost = vec![Rational::zero(); self.width];
        for c in &mut cost[self.art_start..self.width] {
            *c = Rational::one();
        }
        let mut red = self.priced_costs(&cost);
        let finished = self.run(&mut red, self.width);
        debug_assert!(finished, "artificial objective is bounded below by zero");
        let value = -red[self.width].clone();
        if value > Rational::zero() {
            return false;
        }
        // drive leftover artificials out of the degenerate basis
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] < self.art_start {
                r += 1;
                continue;
            }
            match (0..self.art_start).find(|j| !self.rows[r][*j].is_zero()) {
                Some(j) => {
                    self.pivot(r, j);
                    r += 1;
                }
                None => {
                    // row is a linear combination of the others
                    self.rows.remove(r);
                    self.basis.remove(r);
                }
            }
        }
        true
    }

    fn witness(&self, num_vars: usize) -> Vec<Rational> {
        let col_value = |c: usize| -> Rational {
            for (r, b) in self.basis.iter().enumerate() {
                if *b == c {
                    return self.rows[r][self.width].clone();
                }
            }
            Rational::zero()
        };
        (0..num_vars)
            .map(|j| {
                let mut v = col_value(self.pos_col[j]);
                if let Some(nc) = self.neg_col[j] {
                    v = v - col_value(nc);
                }
                v
            })
            .collect()
    }
}

/// Exact optimum with a witness attaining it, or the infeasible/unbounded
/// verdict.
pub fn lp_solve(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    let mut t = Tableau::build(lp);
    if !t.phase_one() {
        return Ok(LpOutcome::Infeasible);
    }
    let mut cost = vec![Rational::zero(); t.width];
    for j in 0..lp.num_vars {
        let c = match lp.sense {
            Sense::Min => lp.objective[j].clone(),
            Sense::Max => -lp.objective[j].clone(),
        };
        if c.is_zero() {
            continue;
        }
        cost[t.pos_col[j]] = c.clone();
        if let Some(nc) = t.neg_col[j] {
            cost[nc] = -c;
        }
    }
    let mut red = t.priced_costs(&cost);
    if !t.run(&mut red, t.art_start) {
        return Ok(LpOutcome::Unbounded);
    }
    let minimized = -red[t.width].clone();
    let value = match lp.sense {
        Sense::Min => minimized,
        Sense::Max => -minimized,
    };
    Ok(LpOutcome::Optimal {
        value,
        witness: t.witness(lp.num_vars),
    })
}

/// Phase-one only: an exact feasible point, or infeasibility.
pub fn feasible(lp: &LinearProgram) -> Result<Feasibility, LpError> {
    lp.validate()?;
    let mut t = Tableau::build(lp);
    if t.phase_one() {
        Ok(Feasibility::Feasible(t.witness(lp.num_vars)))
    } else {
        Ok(Feasibility::Infeasible)
    }
}
