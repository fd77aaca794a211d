use crate::determination::{determined_probes_report, DeterminationVerdict};
use crate::error::{Error, Result};
use crate::lp::StochasticKernel;
use crate::operator::{DensityState, DiscreteObservable};
use crate::relations::{Comparator, RelationVerdict};

/// Default Fock truncation.
pub const DEFAULT_TRUNCATION: usize = 12;

/// Photon counting with efficiency `eps` on `span{|0>, ..., |dim-1>}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonCountingObservable {
    pub eps: f64,
    pub dim: usize,
    pub observable: DiscreteObservable,
}

/// `C(n, k)` by iterative multiplication.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `C(m, n) p^n (1-p)^(m-n)`, zero for `n > m`.
fn binomial_weight(m: usize, n: usize, p: f64) -> f64 {
    if n > m {
        return 0.0;
    }
    binomial(m, n) * p.powi(n as i32) * (1.0 - p).powi((m - n) as i32)
}

fn check_eps(eps: f64, allow_zero: bool) -> Result<()> {
    let ok = eps.is_finite() && eps <= 1.0 && if allow_zero { eps >= 0.0 } else { eps > 0.0 };
    if ok {
        Ok(())
    } else {
        Err(Error::domain(format!("efficiency {eps} out of range")))
    }
}

pub fn make_photon_counting(eps: f64, dim: usize) -> Result<PhotonCountingObservable> {
    check_eps(eps, true)?;
    if dim == 0 {
        return Err(Error::domain("truncation dimension must be positive"));
    }
    let diags: Vec<Vec<f64>> = (0..dim)
        .map(|n| (0..dim).map(|m| binomial_weight(m, n, eps)).collect())
        .collect();
    let observable = DiscreteObservable::from_diagonals(&diags)?;
    let labels = (0..dim).map(|n| n.to_string()).collect();
    let observable = DiscreteObservable::with_labels(observable.effects().to_vec(), Some(labels))?;
    Ok(PhotonCountingObservable { eps, dim, observable })
}

/// Projections onto the Fock states.
pub fn make_number_observable(dim: usize) -> Result<DiscreteObservable> {
    Ok(make_photon_counting(1.0, dim)?.observable)
}

/// `ν_kn = C(k, n) r^n (1-r)^(k-n)` with `r = eps1 / eps2`; maps `F^eps2` to `F^eps1`.
pub fn binomial_efficiency_kernel(eps1: f64, eps2: f64, dim: usize) -> Result<StochasticKernel> {
    check_eps(eps2, false)?;
    check_eps(eps1, true)?;
    if eps1 > eps2 {
        return Err(Error::domain(format!(
            "no stochastic kernel lowers efficiency {eps2} to {eps1}: would need eps1 <= eps2"
        )));
    }
    let r = eps1 / eps2;
    let rows: Vec<Vec<f64>> = (0..dim)
        .map(|k| (0..dim).map(|n| binomial_weight(k, n, r)).collect())
        .collect();
    StochasticKernel::from_rows(&rows)
}

/// Outcome of one fuzzy query.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionResult {
    pub holds: bool,
    pub kernel_residual: Option<f64>,
    pub infeasibility_gap: Option<f64>,
}

impl DirectionResult {
    fn from_verdict(v: &RelationVerdict, f: &DiscreteObservable, e: &DiscreteObservable) -> Result<Self> {
        let kernel_residual = match v.kernel() {
            Some(k) => Some(k.reproduction_residual(f, e)?),
            None => None,
        };
        Ok(Self {
            holds: v.holds,
            kernel_residual,
            infeasibility_gap: v.infeasibility_gap,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyOrderingReport {
    pub eps1: f64,
    pub eps2: f64,
    pub dim: usize,
    /// `F^eps1 ≼_f F^eps2`.
    pub forward: DirectionResult,
    /// `F^eps2 ≼_f F^eps1`.
    pub reverse: DirectionResult,
    /// Diagonal entry `ν_mm = (hi/lo)^m` at `m = dim - 1` that an infeasible
    /// direction would need; above one, so no stochastic kernel exists.
    pub obstruction: Option<f64>,
    /// Both directions match `holds iff lower efficiency <= higher efficiency`.
    pub consistent: bool,
}

pub fn verify_efficiency_ordering(eps1: f64, eps2: f64, dim: usize) -> Result<EfficiencyOrderingReport> {
    verify_efficiency_ordering_with(&Comparator::default(), eps1, eps2, dim)
}

pub fn verify_efficiency_ordering_with(
    cmp: &Comparator,
    eps1: f64,
    eps2: f64,
    dim: usize,
) -> Result<EfficiencyOrderingReport> {
    check_eps(eps1, false)?;
    check_eps(eps2, false)?;
    let f1 = make_photon_counting(eps1, dim)?.observable;
    let f2 = make_photon_counting(eps2, dim)?.observable;
    let forward = DirectionResult::from_verdict(&cmp.leq_fuzzy(&f1, &f2)?, &f1, &f2)?;
    let reverse = DirectionResult::from_verdict(&cmp.leq_fuzzy(&f2, &f1)?, &f2, &f1)?;
    // With one basis state every observable is trivial and all directions hold.
    let expect_forward = eps1 <= eps2 || dim == 1;
    let expect_reverse = eps2 <= eps1 || dim == 1;
    let obstruction = (eps1 != eps2 && dim > 1).then(|| {
        let (lo, hi) = (eps1.min(eps2), eps1.max(eps2));
        (hi / lo).powi(dim as i32 - 1)
    });
    Ok(EfficiencyOrderingReport {
        eps1,
        eps2,
        dim,
        consistent: forward.holds == expect_forward && reverse.holds == expect_reverse,
        forward,
        reverse,
        obstruction,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhotonInfoReport {
    pub eps: f64,
    pub dim: usize,
    pub dim_kernel_photon: usize,
    pub dim_kernel_number: usize,
    /// `ker F^eps` measured against `ker E^N`.
    pub residual_photon_in_number: f64,
    pub residual_number_in_photon: f64,
    pub equivalent: bool,
    /// Both kernels have dimension `d^2 - d`, the off-diagonal directions.
    pub expected_dim: usize,
    /// The diagonal data map of `F^eps` is triangular with diagonal `eps^n`,
    /// so its invertibility is decided without rank thresholds.
    pub structural_exact: bool,
    pub note: String,
}

pub fn verify_photon_info_equivalence(eps: f64, dim: usize) -> Result<PhotonInfoReport> {
    verify_photon_info_equivalence_with(&Comparator::default(), eps, dim)
}

pub fn verify_photon_info_equivalence_with(cmp: &Comparator, eps: f64, dim: usize) -> Result<PhotonInfoReport> {
    check_eps(eps, false)?;
    let f = make_photon_counting(eps, dim)?.observable;
    let n = make_number_observable(dim)?;
    let a = cmp.leq_informational(&f, &n)?;
    let b = cmp.leq_informational(&n, &f)?;
    let (dim_kernel_photon, residual_photon_in_number) = kernel_info(&a);
    let (dim_kernel_number, residual_number_in_photon) = kernel_info(&b);
    let smallest_pivot = eps.powi(dim as i32 - 1);
    let structural_exact = smallest_pivot > 0.0;
    let mut note = format!("smallest triangular pivot eps^(d-1) = {smallest_pivot:.3e}");
    if smallest_pivot < 1e-8 {
        note.push_str("; below the rank threshold, equality relies on row normalization before the SVD");
    }
    Ok(PhotonInfoReport {
        eps,
        dim,
        dim_kernel_photon,
        dim_kernel_number,
        residual_photon_in_number,
        residual_number_in_photon,
        equivalent: a.holds && b.holds,
        expected_dim: dim * dim - dim,
        structural_exact,
        note,
    })
}

fn kernel_info(v: &RelationVerdict) -> (usize, f64) {
    match &v.certificate {
        Some(crate::relations::Certificate::KernelBasis(r)) => {
            (r.dim_kernel_e, r.inclusion_residual.unwrap_or(f64::INFINITY))
        }
        _ => (usize::MAX, f64::INFINITY),
    }
}

/// Membership of each probe in the set of states determined by `F^eps`.
pub fn photon_determined_states(eps: f64, dim: usize, probes: &[DensityState]) -> Result<Vec<DeterminationVerdict>> {
    photon_determined_states_with(&Comparator::default(), eps, dim, probes)
}

pub fn photon_determined_states_with(
    cmp: &Comparator,
    eps: f64,
    dim: usize,
    probes: &[DensityState],
) -> Result<Vec<DeterminationVerdict>> {
    check_eps(eps, false)?;
    let f = make_photon_counting(eps, dim)?.observable;
    determined_probes_report(&f, probes, &cmp.settings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::determination::DeterminationStatus;
    use crate::relations::is_trivial;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert_eq!(binomial(0, 0), 1.0);
    }

    #[test]
    fn photon_entries() {
        let f = make_photon_counting(0.5, 3).unwrap().observable;
        assert!((f.effect(1).op().diagonal()[2] - 0.5).abs() < 1e-15);
        let n = make_number_observable(4).unwrap();
        for k in 0..4 {
            let dk = n.effect(k).op().diagonal();
            for (m, x) in dk.iter().enumerate() {
                assert_eq!(*x, if m == k { 1.0 } else { 0.0 });
            }
        }
        let f0 = make_photon_counting(0.0, 4).unwrap().observable;
        assert_eq!(is_trivial(&f0).unwrap().as_slice(), &[1.0, 0.0, 0.0, 0.0]);
        assert!(make_photon_counting(1.5, 3).is_err());
    }

    #[test]
    fn kernel_edges() {
        let k = binomial_efficiency_kernel(0.4, 0.4, 5).unwrap();
        assert!(k.max_abs_diff(&StochasticKernel::identity(5)) < 1e-15);
        let k0 = binomial_efficiency_kernel(0.0, 0.7, 4).unwrap();
        for j in 0..4 {
            assert_eq!(k0.get(j, 0), 1.0);
        }
        assert!(binomial_efficiency_kernel(0.8, 0.3, 4).is_err());
    }

    #[test]
    fn kernel_identity() {
        let k = binomial_efficiency_kernel(0.3, 0.6, 8).unwrap();
        let f1 = make_photon_counting(0.3, 8).unwrap().observable;
        let f2 = make_photon_counting(0.6, 8).unwrap().observable;
        assert!(k.reproduction_residual(&f1, &f2).unwrap() < 1e-12);
    }

    #[test]
    fn ordering() {
        let r = verify_efficiency_ordering(0.3, 0.7, 10).unwrap();
        assert!(r.consistent && r.forward.holds && !r.reverse.holds);
        assert!(r.obstruction.unwrap() > 1.0);
        let eq = verify_efficiency_ordering(0.5, 0.5, 6).unwrap();
        assert!(eq.forward.holds && eq.reverse.holds && eq.obstruction.is_none());
    }

    #[test]
    fn info_equivalence() {
        let r = verify_photon_info_equivalence(0.5, 6).unwrap();
        assert!(r.equivalent);
        assert_eq!((r.dim_kernel_photon, r.dim_kernel_number), (30, 30));
        let stress = verify_photon_info_equivalence(1e-3, 8).unwrap();
        assert!(stress.equivalent, "{}", stress.note);
    }

    #[test]
    fn determined_fock_states() {
        let probes = [DensityState::basis(5, 2).unwrap(), DensityState::maximally_mixed(5)];
        let v = photon_determined_states(0.7, 5, &probes).unwrap();
        assert_eq!(v[0].status, DeterminationStatus::Determined);
        assert_eq!(v[1].status, DeterminationStatus::NotDetermined);
    }
}
