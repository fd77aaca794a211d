//! Families of observables with closed-form order properties.

mod cyclic;
mod photon;
mod yes_no;

pub use cyclic::{
    check_boost_invariance, circulant_kernel, covariance_residual, covariant_rank_one, cyclic_convolve,
    from_observable, localization_structure_report, localization_structure_report_with, make_cyclic_position,
    shift_unitary, smear_cyclic, CyclicLocalizationObservable, LocalizationReport,
};
pub use photon::{
    binomial, binomial_efficiency_kernel, make_number_observable, make_photon_counting, photon_determined_states,
    photon_determined_states_with, verify_efficiency_ordering, verify_efficiency_ordering_with,
    verify_photon_info_equivalence, verify_photon_info_equivalence_with, DirectionResult, EfficiencyOrderingReport,
    PhotonCountingObservable, PhotonInfoReport, DEFAULT_TRUNCATION,
};
pub use yes_no::{
    approximately_actualizable, make_yes_no, yes_no_dominating_effect, yes_no_fuzzy_parameters,
    yes_no_is_fuzzy_optimal, YesNoObservable,
};

use crate::error::{Error, Result};
use crate::linalg::HermitianOperator;
use crate::operator::{DiscreteObservable, Effect, ProbabilityVector};

/// `E_j = m_j I` on a `dim`-dimensional space.
pub fn make_trivial(m: &ProbabilityVector, dim: usize) -> Result<DiscreteObservable> {
    if dim == 0 {
        return Err(Error::domain("dimension must be positive"));
    }
    let effects = m
        .as_slice()
        .iter()
        .map(|&mj| Effect::new(HermitianOperator::scaled_identity(dim, mj)))
        .collect::<Result<Vec<_>>>()?;
    DiscreteObservable::new(effects)
}
