//! Dense bounded-variable primal simplex for equality-constrained
//! feasibility problems.
//!
//! Phase one minimizes the sum of one artificial variable per equality row,
//! with Bland's smallest-index rule for both entering and leaving choices.
//! Artificial columns are kept implicit: once an artificial leaves the basis
//! it is never priced again. Phase two has no objective; it pivots any
//! zero-level artificial still in the basis out against a structural column
//! so the witness is a basic solution of the original system.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::{LpOutcome, LpProblem, LpStatus};

const PIVOT_TOL: f64 = 1e-9;
const PRICE_TOL: f64 = 1e-11;
const TIE_TOL: f64 = 1e-12;
const ZERO_ROW_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Status {
    Basic,
    AtLower,
    AtUpper,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Slot {
    Artificial,
    Structural(usize),
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// `rows × cols`, row-major, current `B^{-1} A`.
    tab: Vec<f64>,
    /// Values of the basic variables, one per row.
    beta: Vec<f64>,
    basis: Vec<Slot>,
    /// Phase-one reduced costs of the structural columns.
    cost: Vec<f64>,
    upper: Vec<f64>,
    status: Vec<Status>,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.tab[i * self.cols + j]
    }

    fn bland_index(&self, slot: Slot, row: usize) -> usize {
        match slot {
            Slot::Structural(j) => j,
            Slot::Artificial => self.cols + row,
        }
    }

    fn basic_upper(&self, row: usize) -> f64 {
        match self.basis[row] {
            Slot::Structural(j) => self.upper[j],
            Slot::Artificial => f64::INFINITY,
        }
    }

    fn objective(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.beta)
            .filter(|(s, _)| **s == Slot::Artificial)
            .map(|(_, b)| *b)
            .sum()
    }

    fn value(&self, j: usize) -> f64 {
        match self.status[j] {
            Status::AtLower => 0.0,
            Status::AtUpper => self.upper[j],
            Status::Basic => {
                let r = self
                    .basis
                    .iter()
                    .position(|s| *s == Slot::Structural(j))
                    .expect("basic variable has a row");
                self.beta[r]
            }
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let n = self.cols;
        let piv = self.at(r, j);
        for k in 0..n {
            self.tab[r * n + k] /= piv;
        }
        let (before, rest) = self.tab.split_at_mut(r * n);
        let (prow, after) = rest.split_at_mut(n);
        for row in before.chunks_exact_mut(n).chain(after.chunks_exact_mut(n)) {
            let f = row[j];
            if f != 0.0 {
                for (x, p) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * p;
                }
            }
        }
        let f = self.cost[j];
        if f != 0.0 {
            for (c, p) in self.cost.iter_mut().zip(prow.iter()) {
                *c -= f * p;
            }
        }
    }

    /// Runs phase one to optimality. Returns the number of iterations.
    fn phase_one(&mut self, max_iter: usize) -> Result<usize> {
        for iter in 0..max_iter {
            let entering = (0..self.cols).find(|&j| match self.status[j] {
                Status::AtLower => self.upper[j] > 0.0 && self.cost[j] < -PRICE_TOL,
                Status::AtUpper => self.cost[j] > PRICE_TOL,
                Status::Basic => false,
            });
            let Some(j) = entering else {
                return Ok(iter);
            };
            let dir = if self.status[j] == Status::AtLower { 1.0 } else { -1.0 };

            // (step, bland index, leaving row or None for a bound flip, hits upper)
            let mut best: (f64, usize, Option<usize>, bool) = (self.upper[j], j, None, false);
            for i in 0..self.rows {
                let a = self.at(i, j) * dir;
                let (theta, hits_upper) = if a > PIVOT_TOL {
                    (self.beta[i] / a, false)
                } else if a < -PIVOT_TOL {
                    let ub = self.basic_upper(i);
                    if !ub.is_finite() {
                        continue;
                    }
                    ((ub - self.beta[i]) / -a, true)
                } else {
                    continue;
                };
                let theta = theta.max(0.0);
                let idx = self.bland_index(self.basis[i], i);
                if theta < best.0 - TIE_TOL || ((theta - best.0).abs() <= TIE_TOL && idx < best.1) {
                    best = (theta, idx, Some(i), hits_upper);
                }
            }
            let (theta, _, leave, hits_upper) = best;
            if !theta.is_finite() {
                return Err(Error::ToleranceViolation(
                    "phase one reported an unbounded ray".into(),
                ));
            }
            for i in 0..self.rows {
                self.beta[i] -= theta * dir * self.at(i, j);
            }
            let entering_value = if dir > 0.0 { theta } else { self.upper[j] - theta };
            match leave {
                None => {
                    self.status[j] = if dir > 0.0 { Status::AtUpper } else { Status::AtLower };
                }
                Some(r) => {
                    if let Slot::Structural(q) = self.basis[r] {
                        self.status[q] = if hits_upper { Status::AtUpper } else { Status::AtLower };
                    }
                    self.pivot(r, j);
                    self.beta[r] = entering_value;
                    self.basis[r] = Slot::Structural(j);
                    self.status[j] = Status::Basic;
                }
            }
        }
        Err(Error::ToleranceViolation(format!(
            "simplex exceeded {max_iter} iterations"
        )))
    }

    /// Pivots zero-level artificials out of the basis where possible.
    fn drive_out_artificials(&mut self, tol: f64) {
        for r in 0..self.rows {
            if self.basis[r] != Slot::Artificial || self.beta[r].abs() > tol {
                continue;
            }
            let candidate = (0..self.cols)
                .filter(|&j| self.status[j] != Status::Basic)
                .find(|&j| self.at(r, j).abs() > 1e-7);
            if let Some(j) = candidate {
                let v = self.value(j);
                self.pivot(r, j);
                self.beta[r] = v;
                self.basis[r] = Slot::Structural(j);
                self.status[j] = Status::Basic;
            }
        }
    }
}

/// Decides feasibility of `problem` with threshold `tol`.
pub fn solve(problem: &LpProblem, tol: f64) -> Result<LpOutcome> {
    let n = problem.num_vars;
    let lo: Vec<f64> = problem.bounds.iter().map(|b| b.0).collect();
    let upper: Vec<f64> = problem.bounds.iter().map(|b| b.1 - b.0).collect();

    // Shift to y = x - lo, drop empty rows, make every rhs nonnegative.
    let mut fixed_residual = 0.0;
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for (coef, rhs) in &problem.constraints {
        let shifted = rhs - coef.iter().zip(&lo).map(|(a, l)| a * l).sum::<f64>();
        if coef.iter().all(|a| a.abs() <= ZERO_ROW_TOL) {
            fixed_residual += shifted.abs();
            continue;
        }
        if shifted < 0.0 {
            rows.push((coef.iter().map(|a| -a).collect(), -shifted));
        } else {
            rows.push((coef.clone(), shifted));
        }
    }
    let m = rows.len();
    let mut tab = Vec::with_capacity(m * n);
    for (coef, _) in &rows {
        tab.extend_from_slice(coef);
    }
    let mut cost = vec![0.0; n];
    for (coef, _) in &rows {
        for (c, a) in cost.iter_mut().zip(coef) {
            *c -= a;
        }
    }
    let mut t = Tableau {
        rows: m,
        cols: n,
        tab,
        beta: rows.iter().map(|r| r.1).collect(),
        basis: vec![Slot::Artificial; m],
        cost,
        upper,
        status: vec![Status::AtLower; n],
    };
    let max_iter = 200 * (m + n) + 1000;
    t.phase_one(max_iter)?;
    let objective = t.objective() + fixed_residual;
    if objective > tol {
        return Ok(LpOutcome {
            status: LpStatus::Infeasible,
            witness: None,
            infeasibility_gap: Some(objective),
            phase_one_objective: objective,
        });
    }
    t.drive_out_artificials(tol);

    let mut witness: Vec<f64> = (0..n).map(|j| lo[j] + t.value(j)).collect();
    if problem.max_violation(&witness) > tol {
        witness = refresh(&t, &rows, &lo)?;
    }
    let violation = problem.max_violation(&witness);
    if violation > tol {
        return Err(Error::ToleranceViolation(format!(
            "feasible basis reproduces constraints only to {violation:.3e}"
        )));
    }
    Ok(LpOutcome {
        status: LpStatus::Feasible,
        witness: Some(witness),
        infeasibility_gap: None,
        phase_one_objective: objective,
    })
}

/// Recomputes the basic values from the original rows for the final basis.
fn refresh(t: &Tableau, rows: &[(Vec<f64>, f64)], lo: &[f64]) -> Result<Vec<f64>> {
    let m = t.rows;
    let mut b = DMatrix::<f64>::zeros(m, m);
    let mut rhs = DVector::<f64>::zeros(m);
    for (i, (coef, r)) in rows.iter().enumerate() {
        let mut v = *r;
        for j in 0..t.cols {
            if t.status[j] != Status::Basic {
                v -= coef[j] * t.value(j);
            }
        }
        rhs[i] = v;
    }
    for (r, slot) in t.basis.iter().enumerate() {
        match slot {
            Slot::Structural(j) => {
                for (i, (coef, _)) in rows.iter().enumerate() {
                    b[(i, r)] = coef[*j];
                }
            }
            Slot::Artificial => b[(r, r)] = 1.0,
        }
    }
    let sol = b
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::ToleranceViolation("final basis is singular".into()))?;
    let mut out: Vec<f64> = (0..t.cols).map(|j| lo[j] + t.value(j)).collect();
    for (r, slot) in t.basis.iter().enumerate() {
        if let Slot::Structural(j) = slot {
            out[*j] = lo[*j] + sol[r];
        }
    }
    Ok(out)
}
