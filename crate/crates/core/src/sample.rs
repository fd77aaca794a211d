//! Random generators for operators, states, observables and kernels.
//! Used by property tests, acceptance checks and the witness search.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::lp::StochasticKernel;
use crate::linalg::{ComplexMatrix, HermitianOperator, C64};
use crate::operator::{DensityState, DiscreteObservable, Effect, ProbabilityVector};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// `(G + G^*)/2` for a complex Gaussian `G`.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianOperator {
    let g = ginibre(rng, dim, dim);
    HermitianOperator::from_matrix_unchecked((&g + g.adjoint()).scale(0.5))
}

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DVector<C64> {
    let v = DVector::from_fn(dim, |_, _| gaussian(rng));
    let n = v.norm();
    v / C64::new(n, 0.0)
}

pub fn unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    hermitian(rng, dim).eigen().vectors
}

pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityState {
    DensityState::pure(&unit_vector(rng, dim)).expect("unit vector gives a valid state")
}

/// Full-rank state `G G^* / tr(G G^*)`.
pub fn mixed_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityState {
    let g = ginibre(rng, dim, dim);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityState::new(HermitianOperator::from_matrix_unchecked(m.scale(1.0 / tr)))
        .expect("Wishart matrix is a valid state")
}

/// `U diag(u) U^*` with eigenvalues `u` uniform in `[0, 1]`.
pub fn effect<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Effect {
    let eig: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    effect_with_spectrum(rng, &eig)
}

pub fn effect_with_spectrum<R: Rng + ?Sized>(rng: &mut R, eig: &[f64]) -> Effect {
    let u = unitary(rng, eig.len());
    let d = HermitianOperator::from_real_diagonal(eig).expect("diagonal is Hermitian");
    Effect::new(d.conjugate_by(&u)).expect("spectrum lies in [0, 1]")
}

/// Generic rank-one-ish POVM: `E_j = S^{-1/2} G_j G_j^* S^{-1/2}` with
/// `S = Σ_j G_j G_j^*`, each `G_j` of shape `dim × rank`.
pub fn observable_with_rank<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    outcomes: usize,
    rank: usize,
) -> DiscreteObservable {
    let parts: Vec<ComplexMatrix> = (0..outcomes)
        .map(|_| {
            let g = ginibre(rng, dim, rank);
            &g * g.adjoint()
        })
        .collect();
    let total = parts
        .iter()
        .fold(ComplexMatrix::zeros(dim, dim), |acc, p| acc + p);
    let spec = HermitianOperator::from_matrix_unchecked((&total + total.adjoint()).scale(0.5)).eigen();
    let inv_sqrt = {
        let d = ComplexMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                C64::new(1.0 / spec.values[i].sqrt(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        &spec.vectors * d * spec.vectors.adjoint()
    };
    let effects = parts
        .iter()
        .map(|p| {
            let m = &inv_sqrt * p * &inv_sqrt;
            Effect::new(HermitianOperator::from_matrix_unchecked((&m + m.adjoint()).scale(0.5)))
                .expect("normalized positive part is an effect")
        })
        .collect();
    DiscreteObservable::new(effects).expect("normalized parts sum to the identity")
}

pub fn observable<R: Rng + ?Sized>(rng: &mut R, dim: usize, outcomes: usize) -> DiscreteObservable {
    observable_with_rank(rng, dim, outcomes, 1)
}

pub fn probability<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ProbabilityVector {
    let w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = w.iter().sum();
    ProbabilityVector::new(w.iter().map(|x| x / total).collect()).expect("normalized weights")
}

pub fn stochastic_kernel<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> StochasticKernel {
    let data: Vec<Vec<f64>> = (0..rows)
        .map(|_| probability(rng, cols).as_slice().to_vec())
        .collect();
    StochasticKernel::from_rows(&data).expect("rows are distributions")
}
