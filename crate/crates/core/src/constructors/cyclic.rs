//! Localization on the cyclic group `Z_L`: a finite analog of covariant
//! position measurements, with cyclic shifts in place of translations and
//! diagonal character unitaries in place of boosts.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator, C64};
use crate::lp::StochasticKernel;
use crate::operator::{DiscreteObservable, Effect, ProbabilityVector};
use crate::relations::Comparator;
use crate::tolerance;

#[derive(Debug, Clone, PartialEq)]
pub struct CyclicLocalizationObservable {
    pub period: usize,
    pub observable: DiscreteObservable,
    /// `S F_x S* = F_{x+1}` within the sum tolerance.
    pub covariant: bool,
}

/// `S |x> = |x + 1 mod L>`.
pub fn shift_unitary(period: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(period, period);
    for x in 0..period {
        s[((x + 1) % period, x)] = C64::new(1.0, 0.0);
    }
    s
}

/// `max_x ‖S F_x S* - F_{x+1}‖`, entrywise.
pub fn covariance_residual(obs: &DiscreteObservable) -> f64 {
    let l = obs.outcomes();
    let s = shift_unitary(obs.dim());
    (0..l)
        .map(|x| obs.effect(x).op().conjugate_by(&s).max_abs_diff(obs.effect((x + 1) % l).op()))
        .fold(0.0, f64::max)
}

fn position_labels(period: usize) -> Option<Vec<String>> {
    Some((0..period).map(|x| x.to_string()).collect())
}

pub fn make_cyclic_position(period: usize) -> Result<CyclicLocalizationObservable> {
    if period < 2 {
        return Err(Error::domain("period must be at least 2"));
    }
    let diags: Vec<Vec<f64>> = (0..period)
        .map(|x| (0..period).map(|y| if x == y { 1.0 } else { 0.0 }).collect())
        .collect();
    let effects = DiscreteObservable::from_diagonals(&diags)?.effects().to_vec();
    Ok(CyclicLocalizationObservable {
        period,
        observable: DiscreteObservable::with_labels(effects, position_labels(period))?,
        covariant: true,
    })
}

/// `F_x = S^x |φ><φ| S^-x` with `φ` of flat Fourier magnitude `1/√L` and the
/// given Fourier phases. Off-diagonal unless the phases are linear in `k`.
pub fn covariant_rank_one(period: usize, phases: &[f64]) -> Result<CyclicLocalizationObservable> {
    if period < 2 {
        return Err(Error::domain("period must be at least 2"));
    }
    Error::check_dim(period, phases.len())?;
    let l = period as f64;
    let phi = DVector::from_fn(period, |x, _| {
        phases
            .iter()
            .enumerate()
            .map(|(k, &th)| C64::from_polar(1.0, th + 2.0 * std::f64::consts::PI * (k * x) as f64 / l))
            .sum::<C64>()
            / l
    });
    let fiducial = HermitianOperator::outer(&phi);
    let s = shift_unitary(period);
    let mut effects = Vec::with_capacity(period);
    let mut sx = ComplexMatrix::identity(period, period);
    for _ in 0..period {
        effects.push(Effect::new(fiducial.conjugate_by(&sx))?);
        sx = &s * sx;
    }
    from_observable(DiscreteObservable::with_labels(effects, position_labels(period))?)
}

/// Wraps an observable with `L` outcomes on `C^L`.
pub fn from_observable(observable: DiscreteObservable) -> Result<CyclicLocalizationObservable> {
    Error::check_dim(observable.dim(), observable.outcomes())?;
    let covariant = covariance_residual(&observable) <= tolerance::SUM;
    Ok(CyclicLocalizationObservable {
        period: observable.dim(),
        observable,
        covariant,
    })
}

/// `ν_{y,x} = ρ_{x - y mod L}`.
pub fn circulant_kernel(rho: &ProbabilityVector) -> Result<StochasticKernel> {
    let l = rho.len();
    let rows: Vec<Vec<f64>> = (0..l)
        .map(|y| (0..l).map(|x| rho.as_slice()[(x + l - y) % l]).collect())
        .collect();
    StochasticKernel::from_rows(&rows)
}

/// `(a ⊛ b)_x = Σ_y a_y b_{x - y mod L}`.
pub fn cyclic_convolve(a: &ProbabilityVector, b: &ProbabilityVector) -> Result<ProbabilityVector> {
    Error::check_dim(a.len(), b.len())?;
    let l = a.len();
    let v = (0..l)
        .map(|x| (0..l).map(|y| a.as_slice()[y] * b.as_slice()[(x + l - y) % l]).sum())
        .collect();
    ProbabilityVector::new(v)
}

/// `F_x = Σ_y ρ_{x - y mod L} E_y`.
pub fn smear_cyclic(e: &CyclicLocalizationObservable, rho: &ProbabilityVector) -> Result<CyclicLocalizationObservable> {
    Error::check_dim(e.period, rho.len())?;
    let smeared = circulant_kernel(rho)?.apply(&e.observable)?;
    let labels = e.observable.labels().map(|l| l.to_vec());
    from_observable(DiscreteObservable::with_labels(smeared.effects().to_vec(), labels)?)
}

/// Every effect commutes with the diagonal characters `V_p = diag(ω^{px})`,
/// which for `L` distinct characters means every effect is diagonal.
pub fn check_boost_invariance(f: &CyclicLocalizationObservable) -> bool {
    f.observable.effects().iter().all(|e| e.op().is_diagonal(tolerance::SUM))
}

/// The four equivalent characterizations of a smeared position observable.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationReport {
    pub period: usize,
    /// `F ≼_i E^Q`.
    pub informational: bool,
    /// `F ≼_f E^Q`.
    pub fuzzy: bool,
    pub boost_invariant: bool,
    /// `F = smear_cyclic(E^Q, ρ)` for `ρ_x = <0|F_x|0>`.
    pub smeared: bool,
    pub rho: ProbabilityVector,
    /// `max_x ‖F_x - (smear_cyclic(E^Q, ρ))_x‖`.
    pub smearing_residual: f64,
    pub consistent: bool,
    pub note: String,
}

pub fn localization_structure_report(f: &CyclicLocalizationObservable) -> Result<LocalizationReport> {
    localization_structure_report_with(&Comparator::default(), f)
}

pub fn localization_structure_report_with(
    cmp: &Comparator,
    f: &CyclicLocalizationObservable,
) -> Result<LocalizationReport> {
    if !f.covariant || covariance_residual(&f.observable) > tolerance::SUM {
        return Err(Error::domain("observable is not shift covariant"));
    }
    let l = f.period;
    let q = make_cyclic_position(l)?;
    let informational = cmp.leq_informational(&f.observable, &q.observable)?.holds;
    let fuzzy = cmp.leq_fuzzy(&f.observable, &q.observable)?.holds;
    let boost_invariant = check_boost_invariance(f);
    let rho_raw: Vec<f64> = (0..l).map(|x| f.observable.effect(x).op().matrix()[(0, 0)].re.max(0.0)).collect();
    let total: f64 = rho_raw.iter().sum();
    let rho = ProbabilityVector::new(rho_raw.iter().map(|r| r / total).collect())?;
    let rebuilt = smear_cyclic(&q, &rho)?;
    let smearing_residual = (0..l)
        .map(|x| rebuilt.observable.effect(x).op().max_abs_diff(f.observable.effect(x).op()))
        .fold(0.0, f64::max);
    let smeared = smearing_residual <= tolerance::SUM;
    let consistent = informational == fuzzy && fuzzy == boost_invariant && boost_invariant == smeared;
    Ok(LocalizationReport {
        period: l,
        informational,
        fuzzy,
        boost_invariant,
        smeared,
        rho,
        smearing_residual,
        consistent,
        note: "finite cyclic analog on Z_L: shifts stand in for translations and diagonal characters \
               for boosts; findings here do not transfer to the continuum position observable"
            .into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{statistics_map, DensityState};
    use crate::relations::is_trivial;

    #[test]
    fn position_is_covariant() {
        let q = make_cyclic_position(5).unwrap();
        assert!(covariance_residual(&q.observable) < 1e-12);
        assert!(check_boost_invariance(&q));
        assert!(make_cyclic_position(1).is_err());
    }

    #[test]
    fn shifted_state_shifts_statistics() {
        let q = make_cyclic_position(3).unwrap();
        let t = DensityState::basis(3, 0).unwrap();
        let st = DensityState::new(t.op().conjugate_by(&shift_unitary(3))).unwrap();
        assert_eq!(statistics_map(&q.observable, &st).unwrap().as_slice(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn smearing() {
        let q = make_cyclic_position(6).unwrap();
        let delta = ProbabilityVector::new(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(smear_cyclic(&q, &delta).unwrap().observable, q.observable);
        let uniform = ProbabilityVector::new(vec![1.0 / 6.0; 6]).unwrap();
        assert!(is_trivial(&smear_cyclic(&q, &uniform).unwrap().observable).is_some());
        let rho = ProbabilityVector::new(vec![0.8, 0.1, 0.0, 0.0, 0.0, 0.1]).unwrap();
        let f = smear_cyclic(&q, &rho).unwrap();
        assert!(f.covariant);
        let v = Comparator::default().leq_fuzzy(&f.observable, &q.observable).unwrap();
        assert!(v.holds);
        let report = localization_structure_report(&f).unwrap();
        assert!(report.consistent && report.smeared && report.boost_invariant);
        assert!(report.rho.linf_distance(&rho) < 1e-12);
    }

    #[test]
    fn off_diagonal_covariant() {
        let f = covariant_rank_one(4, &[0.0, 1.3, -0.4, 2.2]).unwrap();
        assert!(f.covariant);
        assert!(!check_boost_invariance(&f));
        let r = localization_structure_report(&f).unwrap();
        assert!(r.consistent);
        assert!(!r.informational && !r.fuzzy && !r.smeared);
    }

    #[test]
    fn convolution_composes() {
        let q = make_cyclic_position(4).unwrap();
        let a = ProbabilityVector::new(vec![0.5, 0.25, 0.0, 0.25]).unwrap();
        let b = ProbabilityVector::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let twice = smear_cyclic(&smear_cyclic(&q, &a).unwrap(), &b).unwrap();
        let once = smear_cyclic(&q, &cyclic_convolve(&a, &b).unwrap()).unwrap();
        for x in 0..4 {
            assert!(twice.observable.effect(x).op().max_abs_diff(once.observable.effect(x).op()) < 1e-12);
        }
    }
}
