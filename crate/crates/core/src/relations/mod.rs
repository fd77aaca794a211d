//! The four preorders on observables and their certificates.
//!
//! For observables `F`, `E` on the same Hilbert space:
//!
//! * `Fuzzy`: `F_k = Σ_j ν_jk E_j` for a row-stochastic `ν`;
//! * `CoarseGraining`: `Φ_F = Ψ ∘ Φ_E` for an affine `Ψ`; on finite outcome
//!   sets this coincides with `Fuzzy`;
//! * `Informational`: every pair of states separated by `F` is separated by
//!   `E`, decided as inclusion of statistics kernels `ker Φ_E ⊆ ker Φ_F`;
//! * `Determination`: every state determined by `F` is determined by `E`,
//!   decided on a finite probe set.
//!
//! On every pair the implications Fuzzy ⇒ CoarseGraining ⇒ Informational ⇒
//! Determination hold; [`Comparator::check_hierarchy`] reports a violation
//! flag that must never be set.

mod poset;

pub use poset::PosetReport;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::determination::{
    determined_probes_report, Certification, DeterminationStatus, DeterminationVerdict,
};
use crate::error::{Error, Result};
use crate::linalg::HermitianOperator;
use crate::lp::{encode_fuzzy_instance, kernel_from_witness, solve_feasibility_with, StochasticKernel};
use crate::operator::{
    statistics_kernel_coords, statistics_map, statistics_rows, DensityState, DiscreteObservable,
    ProbabilityVector,
};
use crate::settings::Settings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RelationKind {
    Fuzzy,
    CoarseGraining,
    Informational,
    Determination,
}

impl RelationKind {
    pub const ALL: [RelationKind; 4] = [
        RelationKind::Fuzzy,
        RelationKind::CoarseGraining,
        RelationKind::Informational,
        RelationKind::Determination,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationKind::Fuzzy => "fuzzy",
            RelationKind::CoarseGraining => "coarse",
            RelationKind::Informational => "info",
            RelationKind::Determination => "det",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// Two states that `E` cannot tell apart but `F` can.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessStates {
    pub t1: DensityState,
    pub t2: DensityState,
    pub distinguishing_outcome: usize,
}

impl WitnessStates {
    /// `(|p^F_1 - p^F_2| at the distinguishing outcome, ‖p^E_1 - p^E_2‖_∞)`.
    pub fn gaps(&self, f: &DiscreteObservable, e: &DiscreteObservable) -> Result<(f64, f64)> {
        let pf1 = statistics_map(f, &self.t1)?;
        let pf2 = statistics_map(f, &self.t2)?;
        let k = self.distinguishing_outcome;
        let f_gap = (pf1.as_slice()[k] - pf2.as_slice()[k]).abs();
        let e_gap = statistics_map(e, &self.t1)?.linf_distance(&statistics_map(e, &self.t2)?);
        Ok((f_gap, e_gap))
    }
}

/// Null space of the statistics map of `E` and, for a pairwise query, how
/// far it is from lying inside the null space of `F`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelBasisReport {
    pub dim_kernel_e: usize,
    pub dim_kernel_f: Option<usize>,
    /// Traceless Hermitian operators, orthonormal in the Hilbert-Schmidt inner product.
    pub basis_e: Vec<HermitianOperator>,
    pub inclusion_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    Kernel(StochasticKernel),
    Witness(WitnessStates),
    KernelBasis(KernelBasisReport),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationVerdict {
    pub kind: RelationKind,
    pub holds: bool,
    pub certificate: Option<Certificate>,
    /// Phase-one residual when a fuzzy query is infeasible.
    pub infeasibility_gap: Option<f64>,
    pub note: String,
}

impl RelationVerdict {
    pub fn kernel(&self) -> Option<&StochasticKernel> {
        match &self.certificate {
            Some(Certificate::Kernel(k)) => Some(k),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&WitnessStates> {
        match &self.certificate {
            Some(Certificate::Witness(w)) => Some(w),
            _ => None,
        }
    }
}

/// The four implications evaluated on one pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HierarchyReport {
    pub fuzzy: bool,
    pub coarse: bool,
    pub informational: bool,
    pub determination: bool,
    pub violation: bool,
}

/// Decision procedures parameterized by [`Settings`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Comparator {
    pub settings: Settings,
}

impl Comparator {
    pub fn new(settings: Settings) -> Self {
        Self { settings }
    }

    pub fn statistics_kernel_basis(&self, e: &DiscreteObservable) -> KernelBasisReport {
        let k = statistics_kernel_coords(e, self.settings.tol.ker);
        KernelBasisReport {
            dim_kernel_e: k.ncols(),
            dim_kernel_f: None,
            basis_e: (0..k.ncols())
                .map(|c| HermitianOperator::from_coords(e.dim(), k.column(c).as_slice()))
                .collect(),
            inclusion_residual: None,
        }
    }

    pub fn is_informationally_complete(&self, e: &DiscreteObservable) -> bool {
        statistics_kernel_coords(e, self.settings.tol.ker).ncols() == 0
    }

    /// `‖Φ_E(T1) - Φ_E(T2)‖_∞ > tol.prob`.
    pub fn distinguishes(&self, e: &DiscreteObservable, t1: &DensityState, t2: &DensityState) -> Result<bool> {
        let p1 = statistics_map(e, t1)?;
        let p2 = statistics_map(e, t2)?;
        Ok(p1.linf_distance(&p2) > self.settings.tol.prob)
    }

    /// `m` with `E_j = m_j I`, if `E` is trivial.
    pub fn is_trivial(&self, e: &DiscreteObservable) -> Option<ProbabilityVector> {
        let d = e.dim();
        let mut m = Vec::with_capacity(e.outcomes());
        for eff in e.effects() {
            let mj = eff.op().trace() / d as f64;
            if eff.op().max_abs_diff(&HermitianOperator::scaled_identity(d, mj)) > self.settings.tol.sum {
                return None;
            }
            m.push(mj.max(0.0));
        }
        ProbabilityVector::new(m).ok()
    }

    pub fn leq_fuzzy(&self, f: &DiscreteObservable, e: &DiscreteObservable) -> Result<RelationVerdict> {
        let tol = self.settings.tol.lp;
        let problem = encode_fuzzy_instance(f, e)?;
        let outcome = solve_feasibility_with(&problem, tol)?;
        if let Some(w) = &outcome.witness {
            let kernel = kernel_from_witness(w, e.outcomes(), f.outcomes())?;
            let residual = kernel.reproduction_residual(f, e)?;
            if residual > tol {
                return Err(Error::ToleranceViolation(format!(
                    "kernel certificate reproduces F only to {residual:.3e}"
                )));
            }
            Ok(RelationVerdict {
                kind: RelationKind::Fuzzy,
                holds: true,
                certificate: Some(Certificate::Kernel(kernel)),
                infeasibility_gap: None,
                note: format!("row-stochastic kernel found; operator residual {residual:.3e}"),
            })
        } else {
            let gap = outcome.infeasibility_gap.unwrap_or(outcome.phase_one_objective);
            Ok(RelationVerdict {
                kind: RelationKind::Fuzzy,
                holds: false,
                certificate: None,
                infeasibility_gap: Some(gap),
                note: format!("no row-stochastic kernel; minimized phase-one residual {gap:.6e}"),
            })
        }
    }

    pub fn leq_coarse(&self, f: &DiscreteObservable, e: &DiscreteObservable) -> Result<RelationVerdict> {
        let mut v = self.leq_fuzzy(f, e)?;
        v.kind = RelationKind::CoarseGraining;
        v.note = format!(
            "{}; on a finite outcome set every affine map of distributions is a stochastic matrix, \
             so coarse-graining coincides with the fuzzy relation",
            v.note
        );
        Ok(v)
    }

    pub fn leq_informational(&self, f: &DiscreteObservable, e: &DiscreteObservable) -> Result<RelationVerdict> {
        Error::check_dim(e.dim(), f.dim())?;
        let d = e.dim();
        let ke = statistics_kernel_coords(e, self.settings.tol.ker);
        let kf = statistics_kernel_coords(f, self.settings.tol.ker);
        let residual = inclusion_residual(&ke, &kf);
        let mut report = KernelBasisReport {
            dim_kernel_e: ke.ncols(),
            dim_kernel_f: Some(kf.ncols()),
            basis_e: (0..ke.ncols())
                .map(|c| HermitianOperator::from_coords(d, ke.column(c).as_slice()))
                .collect(),
            inclusion_residual: Some(residual),
        };
        let note = format!(
            "kernel dims: E {}, F {}; inclusion residual {residual:.3e}",
            ke.ncols(),
            kf.ncols()
        );
        if residual <= self.settings.tol.ker {
            return Ok(RelationVerdict {
                kind: RelationKind::Informational,
                holds: true,
                certificate: Some(Certificate::KernelBasis(report)),
                infeasibility_gap: None,
                note,
            });
        }
        match self.informational_witness(f, e, &ke)? {
            Some(w) => Ok(RelationVerdict {
                kind: RelationKind::Informational,
                holds: false,
                certificate: Some(Certificate::Witness(w)),
                infeasibility_gap: None,
                note,
            }),
            None => {
                report.inclusion_residual = Some(residual);
                Ok(RelationVerdict {
                    kind: RelationKind::Informational,
                    holds: true,
                    certificate: Some(Certificate::KernelBasis(report)),
                    infeasibility_gap: None,
                    note: format!(
                        "{note}; the excess kernel direction changes F-statistics by at most the \
                         probability tolerance, so no distinguishable witness exists"
                    ),
                })
            }
        }
    }

    /// `T_{1,2} = I/d ± cH` along the kernel(E) direction that moves
    /// F-statistics the most, `c = 0.9 / (d ‖H‖)`.
    fn informational_witness(
        &self,
        f: &DiscreteObservable,
        e: &DiscreteObservable,
        ke: &DMatrix<f64>,
    ) -> Result<Option<WitnessStates>> {
        let d = e.dim();
        let action = statistics_rows(f) * ke;
        let svd = action.clone().svd(false, true);
        let v_t = svd.v_t.expect("requested right singular vectors");
        let top = (0..svd.singular_values.len())
            .max_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
            .expect("kernel of E is nonempty");
        let dir: DVector<f64> = ke * v_t.row(top).transpose();
        let h = HermitianOperator::from_coords(d, dir.as_slice());
        let c = 0.9 / (d as f64 * h.operator_norm());
        let mixed = HermitianOperator::scaled_identity(d, 1.0 / d as f64);
        let t1 = DensityState::new(mixed.axpy(c, &h))?;
        let t2 = DensityState::new(mixed.axpy(-c, &h))?;
        let pf1 = statistics_map(f, &t1)?;
        let pf2 = statistics_map(f, &t2)?;
        let k = (0..f.outcomes())
            .max_by(|&a, &b| {
                let ga = (pf1.as_slice()[a] - pf2.as_slice()[a]).abs();
                let gb = (pf1.as_slice()[b] - pf2.as_slice()[b]).abs();
                ga.total_cmp(&gb).then(b.cmp(&a))
            })
            .expect("observable has outcomes");
        let w = WitnessStates {
            t1,
            t2,
            distinguishing_outcome: k,
        };
        let (f_gap, e_gap) = w.gaps(f, e)?;
        if f_gap > self.settings.tol.prob && e_gap <= self.settings.tol.prob {
            Ok(Some(w))
        } else {
            Ok(None)
        }
    }

    pub fn leq_determination(
        &self,
        f: &DiscreteObservable,
        e: &DiscreteObservable,
        probes: &[DensityState],
    ) -> Result<RelationVerdict> {
        Error::check_dim(e.dim(), f.dim())?;
        if probes.is_empty() {
            return Err(Error::EmptyProbeSet);
        }
        let vf = determined_probes_report(f, probes, &self.settings)?;
        let ve = determined_probes_report(e, probes, &self.settings)?;
        self.determination_from_verdicts(f, probes, &vf, &ve)
    }

    /// Compares membership verdicts already computed for `F` and `E`.
    ///
    /// A probe counts as determined by `F` unless refuted. When `E` refutes a
    /// probe with witness `W`, `W` is re-checked against `F`: if `F` cannot
    /// separate `W` from the probe either, the probe is not in `D_F` after all.
    pub(crate) fn determination_from_verdicts(
        &self,
        f: &DiscreteObservable,
        probes: &[DensityState],
        vf: &[DeterminationVerdict],
        ve: &[DeterminationVerdict],
    ) -> Result<RelationVerdict> {
        let mut lines = vec![
            "decided on the probe set only: D_F ∩ probes ⊆ D_E ∩ probes".to_string(),
        ];
        let mut in_f = 0usize;
        for (i, t) in probes.iter().enumerate() {
            let (a, b) = (&vf[i], &ve[i]);
            lines.push(format!(
                "probe {i}: F {} ({}), E {} ({})",
                status_name(a.status),
                cert_name(a.certification),
                status_name(b.status),
                cert_name(b.certification)
            ));
            if !a.is_member() {
                continue;
            }
            if b.is_member() {
                in_f += 1;
                continue;
            }
            let w = b.witness.as_ref().expect("refuted verdicts carry a witness");
            let pf_t = statistics_map(f, t)?;
            let pf_w = statistics_map(f, w)?;
            let gap = pf_t.linf_distance(&pf_w);
            if gap <= self.settings.tol.prob {
                lines.push(format!("probe {i}: E's witness also has the same F-statistics; not in D_F"));
                continue;
            }
            let k = (0..f.outcomes())
                .max_by(|&x, &y| {
                    (pf_t.as_slice()[x] - pf_w.as_slice()[x])
                        .abs()
                        .total_cmp(&(pf_t.as_slice()[y] - pf_w.as_slice()[y]).abs())
                        .then(y.cmp(&x))
                })
                .expect("observable has outcomes");
            lines.push(format!("probe {i} is in D_F but not in D_E"));
            return Ok(RelationVerdict {
                kind: RelationKind::Determination,
                holds: false,
                certificate: Some(Certificate::Witness(WitnessStates {
                    t1: t.clone(),
                    t2: w.clone(),
                    distinguishing_outcome: k,
                })),
                infeasibility_gap: None,
                note: lines.join("\n"),
            });
        }
        if in_f == 0 {
            lines.push("no probe is determined by F: holds vacuously".into());
        }
        Ok(RelationVerdict {
            kind: RelationKind::Determination,
            holds: true,
            certificate: None,
            infeasibility_gap: None,
            note: lines.join("\n"),
        })
    }

    /// `F ≼ E` for the given kind; `probes` is required for `Determination`.
    pub fn leq(
        &self,
        f: &DiscreteObservable,
        e: &DiscreteObservable,
        kind: RelationKind,
        probes: Option<&[DensityState]>,
    ) -> Result<RelationVerdict> {
        match kind {
            RelationKind::Fuzzy => self.leq_fuzzy(f, e),
            RelationKind::CoarseGraining => self.leq_coarse(f, e),
            RelationKind::Informational => self.leq_informational(f, e),
            RelationKind::Determination => self.leq_determination(f, e, probes.unwrap_or(&[])),
        }
    }

    pub fn equivalence(
        &self,
        f: &DiscreteObservable,
        e: &DiscreteObservable,
        kind: RelationKind,
        probes: Option<&[DensityState]>,
    ) -> Result<bool> {
        Ok(self.leq(f, e, kind, probes)?.holds && self.leq(e, f, kind, probes)?.holds)
    }

    pub fn check_hierarchy(
        &self,
        f: &DiscreteObservable,
        e: &DiscreteObservable,
        probes: &[DensityState],
    ) -> Result<HierarchyReport> {
        let fuzzy = self.leq_fuzzy(f, e)?.holds;
        let coarse = self.leq_coarse(f, e)?.holds;
        let informational = self.leq_informational(f, e)?.holds;
        let determination = self.leq_determination(f, e, probes)?.holds;
        let violation =
            (fuzzy && !coarse) || (coarse && !informational) || (informational && !determination);
        Ok(HierarchyReport {
            fuzzy,
            coarse,
            informational,
            determination,
            violation,
        })
    }

    pub fn build_poset(
        &self,
        catalog: &[DiscreteObservable],
        labels: &[String],
        kind: RelationKind,
        probes: Option<&[DensityState]>,
    ) -> Result<PosetReport> {
        poset::build(self, catalog, labels, kind, probes)
    }
}

/// Largest distance from a unit vector of `span(ke)` to `span(kf)`, measured
/// on the orthonormal basis columns of `ke`.
fn inclusion_residual(ke: &DMatrix<f64>, kf: &DMatrix<f64>) -> f64 {
    (0..ke.ncols())
        .map(|c| {
            let h = ke.column(c);
            let proj = kf * (kf.transpose() * h);
            (h - proj).norm()
        })
        .fold(0.0, f64::max)
}

fn status_name(s: DeterminationStatus) -> &'static str {
    match s {
        DeterminationStatus::Determined => "determined",
        DeterminationStatus::NotDetermined => "not determined",
        DeterminationStatus::ProbablyDetermined => "probably determined",
    }
}

fn cert_name(c: Certification) -> &'static str {
    match c {
        Certification::Exact => "exact",
        Certification::Heuristic => "heuristic",
    }
}

pub fn distinguishes(e: &DiscreteObservable, t1: &DensityState, t2: &DensityState) -> Result<bool> {
    Comparator::default().distinguishes(e, t1, t2)
}

pub fn statistics_kernel_basis(e: &DiscreteObservable) -> KernelBasisReport {
    Comparator::default().statistics_kernel_basis(e)
}

pub fn is_trivial(e: &DiscreteObservable) -> Option<ProbabilityVector> {
    Comparator::default().is_trivial(e)
}

pub fn is_informationally_complete(e: &DiscreteObservable) -> bool {
    Comparator::default().is_informationally_complete(e)
}

pub fn leq_fuzzy(f: &DiscreteObservable, e: &DiscreteObservable) -> Result<RelationVerdict> {
    Comparator::default().leq_fuzzy(f, e)
}

pub fn leq_coarse(f: &DiscreteObservable, e: &DiscreteObservable) -> Result<RelationVerdict> {
    Comparator::default().leq_coarse(f, e)
}

pub fn leq_informational(f: &DiscreteObservable, e: &DiscreteObservable) -> Result<RelationVerdict> {
    Comparator::default().leq_informational(f, e)
}

pub fn leq_determination(
    f: &DiscreteObservable,
    e: &DiscreteObservable,
    probes: &[DensityState],
) -> Result<RelationVerdict> {
    Comparator::default().leq_determination(f, e, probes)
}

pub fn equivalence(
    f: &DiscreteObservable,
    e: &DiscreteObservable,
    kind: RelationKind,
    probes: Option<&[DensityState]>,
) -> Result<bool> {
    Comparator::default().equivalence(f, e, kind, probes)
}

pub fn check_hierarchy(
    f: &DiscreteObservable,
    e: &DiscreteObservable,
    probes: &[DensityState],
) -> Result<HierarchyReport> {
    Comparator::default().check_hierarchy(f, e, probes)
}

pub fn build_poset(
    catalog: &[DiscreteObservable],
    labels: &[String],
    kind: RelationKind,
    probes: Option<&[DensityState]>,
) -> Result<PosetReport> {
    Comparator::default().build_poset(catalog, labels, kind, probes)
}
