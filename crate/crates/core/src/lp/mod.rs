//! Feasibility of the post-processing equations `F_k = Σ_j ν_jk E_j`.
//!
//! # Index convention
//!
//! A [`StochasticKernel`] `ν` that certifies "F is a fuzzy version of E" has
//! one **row per outcome of E** and one **column per outcome of F**; entry
//! `ν[j][k]` is the probability that E-outcome `j` is reported as F-outcome
//! `k`. Rows sum to one. This is the transpose of the column-stochastic
//! convention common in Markov-chain code.
//!
//! With that convention, if `ν1` certifies `F1 ≼ F2` and `ν2` certifies
//! `F2 ≼ F3`, then [`compose_kernels`]`(ν1, ν2) = ν2 · ν1` certifies
//! `F1 ≼ F3`: first the F3-outcome is smeared into an F2-outcome by `ν2`,
//! then into an F1-outcome by `ν1`.

mod simplex;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::HermitianOperator;
use crate::operator::{DiscreteObservable, Effect, ProbabilityVector};
use crate::tolerance;

/// Row-stochastic matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticKernel {
    nu: DMatrix<f64>,
}

impl StochasticKernel {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::domain("kernel needs at least one row"));
        }
        let c = rows[0].len();
        for row in rows {
            Error::check_dim(c, row.len())?;
        }
        Self::from_matrix(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
    }

    pub fn from_matrix(nu: DMatrix<f64>) -> Result<Self> {
        Self::from_matrix_with_tol(nu, tolerance::LP)
    }

    pub(crate) fn from_matrix_with_tol(nu: DMatrix<f64>, tol: f64) -> Result<Self> {
        if nu.nrows() == 0 || nu.ncols() == 0 {
            return Err(Error::domain("kernel must be nonempty"));
        }
        for i in 0..nu.nrows() {
            let row = nu.row(i);
            if let Some(v) = row.iter().find(|&&v| !(v >= -tol && v <= 1.0 + tol)) {
                return Err(Error::domain(format!("kernel entry {v} in row {i} outside [0, 1]")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > tol {
                return Err(Error::domain(format!("kernel row {i} sums to {s:.12}")));
            }
        }
        Ok(Self { nu })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nu: DMatrix::identity(n, n),
        }
    }

    /// Every row equal to `m`: the kernel that produces a trivial observable.
    pub fn constant(rows: usize, m: &ProbabilityVector) -> Self {
        Self {
            nu: DMatrix::from_fn(rows, m.len(), |_, k| m.as_slice()[k]),
        }
    }

    pub fn rows(&self) -> usize {
        self.nu.nrows()
    }

    pub fn cols(&self) -> usize {
        self.nu.ncols()
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.nu[(j, k)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.nu
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows())
            .map(|i| self.nu.row(i).iter().copied().collect())
            .collect()
    }

    /// Pushes `e` through the kernel: `F_k = Σ_j ν_jk E_j`.
    pub fn apply(&self, e: &DiscreteObservable) -> Result<DiscreteObservable> {
        Error::check_dim(self.rows(), e.outcomes())?;
        let effects = (0..self.cols())
            .map(|k| Effect::new(self.column_combination(e, k)))
            .collect::<Result<Vec<_>>>()?;
        DiscreteObservable::new(effects)
    }

    fn column_combination(&self, e: &DiscreteObservable, k: usize) -> HermitianOperator {
        e.effects()
            .iter()
            .enumerate()
            .fold(HermitianOperator::zero(e.dim()), |acc, (j, ej)| {
                acc.axpy(self.nu[(j, k)], ej.op())
            })
    }

    /// Max entrywise residual of `F_k - Σ_j ν_jk E_j` over all `k`.
    pub fn reproduction_residual(&self, f: &DiscreteObservable, e: &DiscreteObservable) -> Result<f64> {
        Error::check_dim(f.dim(), e.dim())?;
        Error::check_dim(self.rows(), e.outcomes())?;
        Error::check_dim(self.cols(), f.outcomes())?;
        Ok((0..self.cols())
            .map(|k| self.column_combination(e, k).max_abs_diff(f.effect(k).op()))
            .fold(0.0, f64::max))
    }

    pub fn max_abs_diff(&self, other: &StochasticKernel) -> f64 {
        if self.nu.shape() != other.nu.shape() {
            return f64::INFINITY;
        }
        (&self.nu - &other.nu).amax()
    }
}

/// Linear equality system with box bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub num_vars: usize,
    pub constraints: Vec<(Vec<f64>, f64)>,
    pub bounds: Vec<(f64, f64)>,
}

impl LpProblem {
    pub fn new(num_vars: usize, constraints: Vec<(Vec<f64>, f64)>, bounds: Vec<(f64, f64)>) -> Result<Self> {
        let p = Self {
            num_vars,
            constraints,
            bounds,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_vars == 0 {
            return Err(Error::Format("problem has no variables".into()));
        }
        if self.bounds.len() != self.num_vars {
            return Err(Error::Format(format!(
                "{} bounds for {} variables",
                self.bounds.len(),
                self.num_vars
            )));
        }
        for (i, (lo, hi)) in self.bounds.iter().enumerate() {
            if !lo.is_finite() || hi.is_nan() || lo > hi {
                return Err(Error::Format(format!("variable {i} has invalid bounds [{lo}, {hi}]")));
            }
        }
        for (i, (coef, rhs)) in self.constraints.iter().enumerate() {
            if coef.len() != self.num_vars {
                return Err(Error::Format(format!(
                    "constraint {i} has {} coefficients, expected {}",
                    coef.len(),
                    self.num_vars
                )));
            }
            if !rhs.is_finite() || coef.iter().any(|a| !a.is_finite()) {
                return Err(Error::Format(format!("constraint {i} has non-finite data")));
            }
        }
        Ok(())
    }

    /// Largest violation of any equality or bound by `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let eq = self
            .constraints
            .iter()
            .map(|(coef, rhs)| (coef.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - rhs).abs())
            .fold(0.0, f64::max);
        let bd = self
            .bounds
            .iter()
            .zip(x)
            .map(|(&(lo, hi), &v)| (lo - v).max(v - hi).max(0.0))
            .fold(0.0, f64::max);
        eq.max(bd)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Feasible,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub witness: Option<Vec<f64>>,
    /// Minimized sum of absolute residuals, present when infeasible.
    pub infeasibility_gap: Option<f64>,
    pub phase_one_objective: f64,
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        self.status == LpStatus::Feasible
    }
}

/// Two-phase bounded simplex with Bland's rule at the default threshold.
pub fn solve_feasibility(problem: &LpProblem) -> Result<LpOutcome> {
    solve_feasibility_with(problem, tolerance::LP)
}

pub fn solve_feasibility_with(problem: &LpProblem, tol: f64) -> Result<LpOutcome> {
    problem.validate()?;
    simplex::solve(problem, tol)
}

/// Variable index of `ν_jk` in an encoded fuzzy instance.
pub fn fuzzy_var(j: usize, k: usize, f_outcomes: usize) -> usize {
    j * f_outcomes + k
}

/// Encodes "exists row-stochastic ν with `F_k = Σ_j ν_jk E_j`".
///
/// Row sums come first, then for each `k` the `d²` real equations: real
/// parts of the upper triangle including the diagonal, then imaginary parts
/// of the strict upper triangle.
pub fn encode_fuzzy_instance(f: &DiscreteObservable, e: &DiscreteObservable) -> Result<LpProblem> {
    Error::check_dim(e.dim(), f.dim())?;
    let (ne, nf, d) = (e.outcomes(), f.outcomes(), e.dim());
    let nvars = ne * nf;
    let mut constraints = Vec::with_capacity(ne + nf * d * d);
    for j in 0..ne {
        let mut coef = vec![0.0; nvars];
        for k in 0..nf {
            coef[fuzzy_var(j, k, nf)] = 1.0;
        }
        constraints.push((coef, 1.0));
    }
    for k in 0..nf {
        let fk = f.effect(k).op().matrix();
        for part in [0, 1] {
            for a in 0..d {
                let start = if part == 0 { a } else { a + 1 };
                for b in start..d {
                    let mut coef = vec![0.0; nvars];
                    for (j, ej) in e.effects().iter().enumerate() {
                        let z = ej.op().matrix()[(a, b)];
                        coef[fuzzy_var(j, k, nf)] = if part == 0 { z.re } else { z.im };
                    }
                    let rhs = if part == 0 { fk[(a, b)].re } else { fk[(a, b)].im };
                    constraints.push((coef, rhs));
                }
            }
        }
    }
    LpProblem::new(nvars, constraints, vec![(0.0, 1.0); nvars])
}

/// Reads a witness of [`encode_fuzzy_instance`] back as a kernel.
pub fn kernel_from_witness(witness: &[f64], e_outcomes: usize, f_outcomes: usize) -> Result<StochasticKernel> {
    Error::check_dim(e_outcomes * f_outcomes, witness.len())?;
    StochasticKernel::from_matrix(DMatrix::from_fn(e_outcomes, f_outcomes, |j, k| {
        witness[fuzzy_var(j, k, f_outcomes)]
    }))
}

/// Composite certificate `ν2 · ν1` (see the module docs for the order).
pub fn compose_kernels(nu1: &StochasticKernel, nu2: &StochasticKernel) -> Result<StochasticKernel> {
    Error::check_dim(nu1.rows(), nu2.cols())?;
    StochasticKernel::from_matrix_with_tol(&nu2.nu * &nu1.nu, 2.0 * tolerance::LP)
}
