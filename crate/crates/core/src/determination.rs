//! Whether a state is the only one with its outcome statistics.
//!
//! A state `T` is determined by `E` when no other state `T'` has
//! `Φ_E(T') = Φ_E(T)`, i.e. when no nonzero `H` in the statistics kernel of
//! `E` keeps `T + H` positive. The checks run in this order:
//!
//! 1. zero kernel: every state is determined (exact);
//! 2. projection-valued `E`: determined iff `T` is a rank-one effect of `E`,
//!    otherwise an explicit witness is built (exact);
//! 3. general `E`: an exact witness from kernel directions supported on the
//!    range of `T`; an exact certificate for a rank-one diagonal `T` under a
//!    diagonal `E` with injective diagonal data; otherwise line searches along
//!    kernel directions, boundary directions and seeded random combinations.
//!    A witness found there is still an exact refutation; failing to find one
//!    yields a heuristic verdict.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{null_space, ComplexMatrix, HermitianOperator, C64};
use crate::operator::{statistics_kernel_coords, statistics_map, DensityState, DiscreteObservable};
use crate::settings::Settings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum DeterminationStatus {
    Determined,
    NotDetermined,
    ProbablyDetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Certification {
    Exact,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeterminationVerdict {
    pub status: DeterminationStatus,
    pub certification: Certification,
    /// A different state with the same statistics, when not determined.
    pub witness: Option<DensityState>,
    pub method: String,
}

impl DeterminationVerdict {
    /// Membership in the determined set, counting heuristic verdicts as members.
    pub fn is_member(&self) -> bool {
        self.status != DeterminationStatus::NotDetermined
    }

    fn exact(status: DeterminationStatus, method: impl Into<String>) -> Self {
        Self {
            status,
            certification: Certification::Exact,
            witness: None,
            method: method.into(),
        }
    }

    fn refuted(witness: DensityState, method: impl Into<String>) -> Self {
        Self {
            status: DeterminationStatus::NotDetermined,
            certification: Certification::Exact,
            witness: Some(witness),
            method: method.into(),
        }
    }
}

/// Accepts `candidate` as a witness for `t` if it is a valid state, has the
/// same statistics within `tol.prob` and differs by more than `tol.state`.
pub fn validate_witness(
    e: &DiscreteObservable,
    t: &DensityState,
    candidate: &HermitianOperator,
    settings: &Settings,
) -> Option<DensityState> {
    let w = DensityState::new(candidate.clone()).ok()?;
    let pw = statistics_map(e, &w).ok()?;
    let pt = statistics_map(e, t).ok()?;
    if pw.linf_distance(&pt) > settings.tol.prob {
        return None;
    }
    if w.op().sub(t.op()).operator_norm() <= settings.tol.state {
        return None;
    }
    Some(w)
}

pub fn is_determined(t: &DensityState, e: &DiscreteObservable) -> Result<DeterminationVerdict> {
    is_determined_with(t, e, &Settings::default())
}

pub fn is_determined_with(
    t: &DensityState,
    e: &DiscreteObservable,
    settings: &Settings,
) -> Result<DeterminationVerdict> {
    Error::check_dim(e.dim(), t.dim())?;
    let kernel = statistics_kernel_coords(e, settings.tol.ker);
    if kernel.ncols() == 0 {
        return Ok(DeterminationVerdict::exact(
            DeterminationStatus::Determined,
            "informationally complete: statistics kernel is zero",
        ));
    }
    if e.is_sharp(settings.tol.sum) {
        if let Some(v) = sharp_verdict(t, e, settings) {
            return Ok(v);
        }
    }
    Ok(general_search(t, e, &kernel, settings))
}

/// Elementwise [`is_determined_with`].
pub fn determined_probes_report(
    e: &DiscreteObservable,
    probes: &[DensityState],
    settings: &Settings,
) -> Result<Vec<DeterminationVerdict>> {
    probes.iter().map(|t| is_determined_with(t, e, settings)).collect()
}

fn sharp_verdict(t: &DensityState, e: &DiscreteObservable, s: &Settings) -> Option<DeterminationVerdict> {
    let d = e.dim();
    let tol = s.tol.state;
    for (j, eff) in e.effects().iter().enumerate() {
        if (eff.op().trace() - 1.0).abs() <= 1e-6 && eff.op().max_abs_diff(t.op()) <= tol {
            return Some(DeterminationVerdict::exact(
                DeterminationStatus::Determined,
                format!("sharp observable: state is the rank-one spectral projection of outcome {j}"),
            ));
        }
    }

    // Off-diagonal blocks between spectral subspaces are invisible: pinch them away.
    let pinched = e
        .effects()
        .iter()
        .fold(HermitianOperator::zero(d), |acc, p| acc.add(&t.op().conjugate_by(p.op().matrix())));
    if let Some(w) = validate_witness(e, t, &pinched, s) {
        return Some(DeterminationVerdict::refuted(w, "sharp observable: pinched state"));
    }

    let weights: Vec<f64> = e.effects().iter().map(|p| p.op().hs_inner(t.op())).collect();
    let ranks: Vec<usize> = e.effects().iter().map(|p| p.op().trace().round() as usize).collect();

    // A supported block of rank >= 2 can be replaced by another state of the same weight.
    for (j, p) in e.effects().iter().enumerate() {
        if weights[j] <= 2.0 * tol || ranks[j] < 2 {
            continue;
        }
        let block = t.op().conjugate_by(p.op().matrix());
        let mixed = p.op().scale(weights[j] / ranks[j] as f64);
        let replacement = if block.max_abs_diff(&mixed) > tol {
            mixed
        } else {
            let spec = p.op().eigen();
            HermitianOperator::outer(&spec.vector(d - 1)).scale(weights[j])
        };
        if let Some(w) = validate_witness(e, t, &t.op().sub(&block).add(&replacement), s) {
            return Some(DeterminationVerdict::refuted(
                w,
                format!("sharp observable: block {j} replaced by another state of equal weight"),
            ));
        }
    }

    // Two supported rank-one blocks admit a coherence between them.
    let mut supported: Vec<usize> = (0..e.outcomes()).filter(|&j| weights[j] > tol).collect();
    supported.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    if supported.len() >= 2 {
        let (i, j) = (supported[0], supported[1]);
        let u = e.effect(i).op().eigen().vector(d - 1);
        let v = e.effect(j).op().eigen().vector(d - 1);
        let uv = &u * v.adjoint();
        let h = HermitianOperator::from_matrix_unchecked(&uv + uv.adjoint());
        let c = 0.4 * (weights[i] * weights[j]).sqrt();
        if let Some(w) = validate_witness(e, t, &t.op().axpy(c, &h), s) {
            return Some(DeterminationVerdict::refuted(
                w,
                format!("sharp observable: coherence added between outcomes {i} and {j}"),
            ));
        }
    }
    None
}

/// Eigenpairs of `t` split at `thresh` into (support vectors, support
/// eigenvalues, null vectors).
fn support_split(t: &DensityState, thresh: f64) -> (Vec<DVector<C64>>, Vec<f64>, Vec<DVector<C64>>) {
    let spec = t.op().eigen();
    let mut sup = Vec::new();
    let mut vals = Vec::new();
    let mut null = Vec::new();
    for (k, &lam) in spec.values.iter().enumerate() {
        if lam > thresh {
            sup.push(spec.vector(k));
            vals.push(lam);
        } else {
            null.push(spec.vector(k));
        }
    }
    (sup, vals, null)
}

/// Kernel directions supported on the range of `t`: perturbing inside the
/// face keeps positivity for small steps.
fn face_witness(t: &DensityState, e: &DiscreteObservable, s: &Settings) -> Option<DensityState> {
    let (sup, vals, _) = support_split(t, s.tol.psd);
    let r = sup.len();
    if r < 2 {
        return None;
    }
    let v = ComplexMatrix::from_columns(&sup);
    let mut rows = DMatrix::<f64>::zeros(e.outcomes() + 1, r * r);
    for (j, eff) in e.effects().iter().enumerate() {
        let compressed = HermitianOperator::from_matrix_unchecked(v.adjoint() * eff.op().matrix() * &v);
        rows.set_row(j, &compressed.coords().transpose());
    }
    rows.set_row(e.outcomes(), &HermitianOperator::identity(r).coords().transpose());
    let ns = null_space(&rows, s.tol.ker);
    for col in 0..ns.ncols() {
        let k = HermitianOperator::from_coords(r, ns.column(col).as_slice());
        let h = HermitianOperator::from_matrix_unchecked(&v * k.matrix() * v.adjoint());
        let lam_min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let step = 0.5 * lam_min / k.operator_norm();
        if let Some(w) = validate_witness(e, t, &t.op().axpy(step, &h), s) {
            return Some(w);
        }
    }
    None
}

/// `T = |n><n|` under a diagonal `E` whose diagonal data map is injective:
/// any kernel element has zero diagonal, and a positive matrix with zero
/// diagonal outside `n` vanishes outside `n`.
fn rank_one_diagonal_certificate(t: &DensityState, e: &DiscreteObservable, s: &Settings) -> Option<usize> {
    let d = e.dim();
    if !t.op().is_diagonal(s.tol.state) || !e.effects().iter().all(|x| x.op().is_diagonal(s.tol.sum)) {
        return None;
    }
    let diag = t.op().diagonal();
    let n = (0..d).find(|&m| (diag[m] - 1.0).abs() <= s.tol.state)?;
    let data = DMatrix::from_fn(e.outcomes(), d, |j, m| e.effect(j).op().diagonal()[m]);
    if null_space(&data, s.tol.ker).ncols() == 0 {
        Some(n)
    } else {
        None
    }
}

/// Largest `λ <= λ_hi` with `t + λ h` positive, by bisection on the minimum
/// eigenvalue; `None` when even a step of `tol_step` leaves the cone.
fn max_step(t: &HermitianOperator, h: &HermitianOperator, tol_step: f64) -> Option<f64> {
    let hn = h.operator_norm();
    if hn == 0.0 {
        return None;
    }
    let psd = |lam: f64| t.axpy(lam, h).min_eigenvalue() >= -1e-13;
    let hi0 = 2.0 / hn;
    if psd(hi0) {
        return Some(hi0);
    }
    let small = tol_step / hn;
    if !psd(small) {
        return None;
    }
    let (mut lo, mut hi) = (small, hi0);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if psd(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

fn project_onto_kernel(kernel: &DMatrix<f64>, dim: usize, x: &HermitianOperator) -> HermitianOperator {
    let c = x.coords();
    let proj = kernel * (kernel.transpose() * c);
    HermitianOperator::from_coords(dim, proj.as_slice())
}

fn general_search(t: &DensityState, e: &DiscreteObservable, kernel: &DMatrix<f64>, s: &Settings) -> DeterminationVerdict {
    let d = e.dim();
    if let Some(w) = face_witness(t, e, s) {
        return DeterminationVerdict::refuted(w, "kernel direction supported on the range of the state");
    }
    if let Some(n) = rank_one_diagonal_certificate(t, e, s) {
        return DeterminationVerdict::exact(
            DeterminationStatus::Determined,
            format!(
                "basis projection |{n}><{n}| under a diagonal observable with injective diagonal data: \
                 kernel elements have zero diagonal"
            ),
        );
    }

    let mut directions: Vec<(HermitianOperator, &'static str)> = Vec::new();
    let (_, _, null) = support_split(t, s.tol.psd);
    for w in &null {
        let target = HermitianOperator::outer(w).sub(t.op());
        directions.push((project_onto_kernel(kernel, d, &target), "boundary direction towards a null vector"));
    }
    let mixed = HermitianOperator::scaled_identity(d, 1.0 / d as f64);
    directions.push((project_onto_kernel(kernel, d, &mixed.sub(t.op())), "direction towards the maximally mixed state"));
    for col in 0..kernel.ncols() {
        let h = HermitianOperator::from_coords(d, kernel.column(col).as_slice());
        directions.push((h.scale(-1.0), "kernel basis direction"));
        directions.push((h, "kernel basis direction"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    for _ in 0..s.random_directions {
        let coeffs = DVector::<f64>::from_fn(kernel.ncols(), |_, _| StandardNormal.sample(&mut rng));
        let n = coeffs.norm();
        if n == 0.0 {
            continue;
        }
        let c = kernel * (coeffs / n);
        directions.push((HermitianOperator::from_coords(d, c.as_slice()), "random kernel direction"));
    }

    for (h, label) in directions {
        if h.hs_norm() <= 1e-12 {
            continue;
        }
        let Some(lam) = max_step(t.op(), &h, s.tol.state * 2.0) else {
            continue;
        };
        if let Some(w) = validate_witness(e, t, &t.op().axpy(lam, &h), s) {
            return DeterminationVerdict::refuted(w, format!("line search along {label}"));
        }
    }
    DeterminationVerdict {
        status: DeterminationStatus::ProbablyDetermined,
        certification: Certification::Heuristic,
        witness: None,
        method: format!(
            "no witness after {} kernel, boundary and {} random directions",
            2 * kernel.ncols() + null.len() + 1,
            s.random_directions
        ),
    }
}

/// Rank-one eigenprojections of every effect of every observable (deduplicated)
/// followed by the maximally mixed state.
pub fn default_probes(observables: &[DiscreteObservable]) -> Result<Vec<DensityState>> {
    let dim = observables
        .first()
        .ok_or_else(|| Error::domain("no observables to derive probes from"))?
        .dim();
    let mut probes: Vec<DensityState> = Vec::new();
    for obs in observables {
        Error::check_dim(dim, obs.dim())?;
        for eff in obs.effects() {
            let spec = eff.op().eigen();
            for k in 0..dim {
                let p = DensityState::pure(&spec.vector(k))?;
                if !probes.iter().any(|q| q.op().max_abs_diff(p.op()) <= 1e-9) {
                    probes.push(p);
                }
            }
        }
    }
    probes.push(DensityState::maximally_mixed(dim));
    Ok(probes)
}
