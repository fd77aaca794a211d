//! Effects, states, discrete observables and the statistics map `T ↦ (tr T E_j)_j`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{null_space, HermitianOperator, C64};
use crate::tolerance;

/// A Hermitian operator `A` with `0 <= A <= I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect {
    op: HermitianOperator,
}

impl Effect {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let ev = op.eigenvalues();
        let (lo, hi) = (ev[0], ev[ev.len() - 1]);
        if lo < -tolerance::PSD {
            return Err(Error::domain(format!(
                "effect is not positive (min eigenvalue {lo:.3e})"
            )));
        }
        if hi > 1.0 + tolerance::PSD {
            return Err(Error::domain(format!(
                "effect exceeds identity (max eigenvalue {hi:.12})"
            )));
        }
        Ok(Self { op })
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::from_real_diagonal(diag)?)
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// `I - A`.
    pub fn complement(&self) -> Effect {
        Effect {
            op: HermitianOperator::identity(self.dim()).sub(&self.op),
        }
    }
}

/// A positive operator with unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    op: HermitianOperator,
}

impl DensityState {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > tolerance::TRACE {
            return Err(Error::domain(format!("state trace is {tr:.12}, expected 1")));
        }
        let lo = op.min_eigenvalue();
        if lo < -tolerance::PSD {
            return Err(Error::domain(format!(
                "state is not positive (min eigenvalue {lo:.3e})"
            )));
        }
        Ok(Self { op })
    }

    /// `|ψ><ψ| / <ψ|ψ>`.
    pub fn pure(psi: &DVector<C64>) -> Result<Self> {
        let n = psi.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::domain("pure state vector must be nonzero"));
        }
        Self::new(HermitianOperator::outer(&(psi / C64::new(n, 0.0))))
    }

    /// The basis projection `|k><k|` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::domain(format!("basis index {k} out of range for dimension {dim}")));
        }
        let mut diag = vec![0.0; dim];
        diag[k] = 1.0;
        Self::new(HermitianOperator::from_real_diagonal(&diag)?)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: HermitianOperator::scaled_identity(dim, 1.0 / dim as f64),
        }
    }

    /// `λ T1 + (1 - λ) T2`.
    pub fn mixture(lambda: f64, t1: &DensityState, t2: &DensityState) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::domain(format!("mixing weight {lambda} outside [0, 1]")));
        }
        Error::check_dim(t1.dim(), t2.dim())?;
        Self::new(t1.op.scale(lambda).axpy(1.0 - lambda, &t2.op))
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }
}

/// Outcome distribution of a finite observable.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    p: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::domain("probability vector must be nonempty"));
        }
        if let Some(bad) = p.iter().find(|&&x| !(x >= -tolerance::PROB) || x > 1.0 + tolerance::PROB) {
            return Err(Error::domain(format!("probability {bad} outside [0, 1]")));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > tolerance::PROB {
            return Err(Error::domain(format!("probabilities sum to {total:.12}")));
        }
        Ok(Self { p })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// Sup-norm distance.
    pub fn linf_distance(&self, other: &ProbabilityVector) -> f64 {
        self.p
            .iter()
            .zip(&other.p)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// A POVM on outcomes `0..n`: effects summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteObservable {
    dim: usize,
    effects: Vec<Effect>,
    labels: Option<Vec<String>>,
}

impl DiscreteObservable {
    pub fn new(effects: Vec<Effect>) -> Result<Self> {
        Self::with_labels(effects, None)
    }

    pub fn with_labels(effects: Vec<Effect>, labels: Option<Vec<String>>) -> Result<Self> {
        let first = effects
            .first()
            .ok_or_else(|| Error::domain("observable needs at least one outcome"))?;
        let dim = first.dim();
        for e in &effects {
            Error::check_dim(dim, e.dim())?;
        }
        if let Some(l) = &labels {
            Error::check_dim(effects.len(), l.len())?;
        }
        let residual = normalization_residual(&effects);
        if residual > tolerance::SUM {
            return Err(Error::domain(format!(
                "effects do not sum to the identity (max entry residual {residual:.3e})"
            )));
        }
        Ok(Self { dim, effects, labels })
    }

    /// Builds an observable from diagonal effect data `diag[j][m] = <m|E_j|m>`.
    pub fn from_diagonals(diags: &[Vec<f64>]) -> Result<Self> {
        Self::new(
            diags
                .iter()
                .map(|d| Effect::from_diagonal(d))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn effect(&self, j: usize) -> &Effect {
        &self.effects[j]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Outcome `j` relabelled by `perm`: the returned observable has effect
    /// `self[perm[k]]` at position `k`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        Error::check_dim(self.outcomes(), perm.len())?;
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if p >= perm.len() || seen[p] {
                return Err(Error::domain("not a permutation"));
            }
            seen[p] = true;
        }
        Ok(Self {
            dim: self.dim,
            effects: perm.iter().map(|&p| self.effects[p].clone()).collect(),
            labels: None,
        })
    }

    /// Every effect is an orthogonal projection.
    pub fn is_sharp(&self, tol: f64) -> bool {
        self.effects.iter().all(|e| e.op().is_projection(tol))
    }
}

fn normalization_residual(effects: &[Effect]) -> f64 {
    let dim = effects[0].dim();
    let total = effects
        .iter()
        .fold(HermitianOperator::zero(dim), |acc, e| acc.add(e.op()));
    total.max_abs_diff(&HermitianOperator::identity(dim))
}

/// The `(n+1) × d²` real matrix of `H ↦ (tr(H E_0), …, tr(H E_{n-1}), tr H)`
/// in Hilbert-Schmidt coordinates.
pub(crate) fn statistics_rows(e: &DiscreteObservable) -> DMatrix<f64> {
    let d = e.dim();
    let mut m = DMatrix::<f64>::zeros(e.outcomes() + 1, d * d);
    for (j, eff) in e.effects().iter().enumerate() {
        m.set_row(j, &eff.op().coords().transpose());
    }
    m.set_row(e.outcomes(), &HermitianOperator::identity(d).coords().transpose());
    m
}

/// Orthonormal coordinates (columns) of `{H = H^*: tr H = 0, tr(H E_j) = 0 ∀j}`.
pub(crate) fn statistics_kernel_coords(e: &DiscreteObservable, threshold: f64) -> DMatrix<f64> {
    null_space(&statistics_rows(e), threshold)
}

/// `p_j = tr(T E_j)`.
pub fn statistics_map(e: &DiscreteObservable, t: &DensityState) -> Result<ProbabilityVector> {
    Error::check_dim(e.dim(), t.dim())?;
    let tm = t.op().matrix();
    let mut p = Vec::with_capacity(e.outcomes());
    for eff in e.effects() {
        let tr = (tm * eff.op().matrix()).trace();
        if tr.im.abs() > tolerance::HERM {
            return Err(Error::ToleranceViolation(format!(
                "trace has imaginary residue {:.3e}",
                tr.im
            )));
        }
        p.push(tr.re);
    }
    ProbabilityVector::new(p).map_err(|e| Error::ToleranceViolation(e.to_string()))
}

/// Checks `Φ(λT1 + (1-λ)T2) = λΦ(T1) + (1-λ)Φ(T2)` within `tolerance::PROB`.
pub fn affinity_check(
    e: &DiscreteObservable,
    t1: &DensityState,
    t2: &DensityState,
    lambda: f64,
) -> Result<bool> {
    Error::check_dim(e.dim(), t1.dim())?;
    Error::check_dim(e.dim(), t2.dim())?;
    affinity_check_with(|t| statistics_map(e, t).map(|p| p.as_slice().to_vec()), t1, t2, lambda)
}

/// [`affinity_check`] for an arbitrary state-to-distribution map.
pub fn affinity_check_with<F>(map: F, t1: &DensityState, t2: &DensityState, lambda: f64) -> Result<bool>
where
    F: Fn(&DensityState) -> Result<Vec<f64>>,
{
    let mix = DensityState::mixture(lambda, t1, t2)?;
    let lhs = map(&mix)?;
    let p1 = map(t1)?;
    let p2 = map(t2)?;
    if lhs.len() != p1.len() || p1.len() != p2.len() {
        return Ok(false);
    }
    Ok(lhs
        .iter()
        .zip(p1.iter().zip(&p2))
        .all(|(l, (a, b))| (l - (lambda * a + (1.0 - lambda) * b)).abs() <= tolerance::PROB))
}
