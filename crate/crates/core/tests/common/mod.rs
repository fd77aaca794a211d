//! Reference computations written without the library's numerical routines.
#![allow(dead_code)]

use nalgebra::{Cholesky, DMatrix};
use num_complex::Complex64;
use povm_order::{DensityState, DiscreteObservable, HermitianOperator};

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `C(n, k) p^k (1-p)^(n-k)` from factorials.
pub fn binomial_pmf(n: usize, k: usize, p: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    factorial(n) / (factorial(k) * factorial(n - k)) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

/// `Re tr(A B)` as a double loop.
pub fn trace_product(a: &HermitianOperator, b: &HermitianOperator) -> f64 {
    let (a, b) = (a.matrix(), b.matrix());
    let d = a.nrows();
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    s.re
}

pub fn naive_stats(e: &DiscreteObservable, t: &DensityState) -> Vec<f64> {
    e.effects().iter().map(|x| trace_product(x.op(), t.op())).collect()
}

pub fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Max entrywise `|F_k - Σ_j ν[j][k] E_j|` by explicit loops.
pub fn kernel_residual(nu: &[Vec<f64>], f: &DiscreteObservable, e: &DiscreteObservable) -> f64 {
    let d = f.dim();
    let mut worst = 0.0f64;
    for k in 0..f.outcomes() {
        for r in 0..d {
            for c in 0..d {
                let mut s = Complex64::new(0.0, 0.0);
                for (j, row) in nu.iter().enumerate() {
                    s += e.effect(j).op().matrix()[(r, c)] * row[k];
                }
                worst = worst.max((s - f.effect(k).op().matrix()[(r, c)]).norm());
            }
        }
    }
    worst
}

/// Rows non-negative and summing to one within `tol`.
pub fn is_stochastic(nu: &[Vec<f64>], tol: f64) -> bool {
    nu.iter()
        .all(|row| row.iter().all(|&x| x >= -tol) && (row.iter().sum::<f64>() - 1.0).abs() <= tol)
}

/// Positive semidefiniteness up to `slack`, tested by a Cholesky factorization
/// of `A + slack I`.
pub fn is_psd(a: &HermitianOperator, slack: f64) -> bool {
    let d = a.dim();
    let shifted: DMatrix<Complex64> = a.matrix() + DMatrix::<Complex64>::identity(d, d) * Complex64::new(slack, 0.0);
    Cholesky::new(shifted).is_some()
}

/// Density matrix checks independent of the library's validation.
pub fn is_valid_state(t: &HermitianOperator, tol: f64) -> bool {
    let m = t.matrix();
    let d = t.dim();
    let trace: f64 = (0..d).map(|i| m[(i, i)].re).sum();
    let herm = (0..d).all(|i| (0..d).all(|j| (m[(i, j)] - m[(j, i)].conj()).norm() <= tol));
    herm && (trace - 1.0).abs() <= tol && is_psd(t, tol)
}

/// Frobenius distance.
pub fn frobenius(a: &HermitianOperator, b: &HermitianOperator) -> f64 {
    (a.matrix() - b.matrix()).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
