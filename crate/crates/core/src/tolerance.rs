//! Numerical thresholds shared by every check in the crate.
//!
//! The constants are the values used for eager type validation. Decision
//! procedures read their thresholds from a [`Tolerances`] value so that a
//! caller can select a stricter or looser profile.

/// Hermiticity residual, max entry.
pub const HERM: f64 = 1e-10;
/// Eigenvalue slack for positivity and `A <= I`.
pub const PSD: f64 = 1e-9;
/// Trace-one slack for states.
pub const TRACE: f64 = 1e-10;
/// Entrywise slack for `sum_j E_j = I` and scalar-effect tests.
pub const SUM: f64 = 1e-9;
/// Probability vector slack, also the distinguishability threshold.
pub const PROB: f64 = 1e-9;
/// Eigenvalue accuracy target.
pub const EIG: f64 = 1e-10;
/// Feasibility classification threshold for the simplex solver.
pub const LP: f64 = 1e-8;
/// Singular-value threshold for null-space membership.
pub const KER: f64 = 1e-8;
/// Minimum operator-norm distance for two states to count as distinct.
pub const STATE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub sum: f64,
    pub prob: f64,
    pub psd: f64,
    pub lp: f64,
    pub ker: f64,
    pub state: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            sum: SUM,
            prob: PROB,
            psd: PSD,
            lp: LP,
            ker: KER,
            state: STATE,
        }
    }
}

impl Tolerances {
    /// Looks up a named profile: `default`, `strict` or `loose`.
    pub fn profile(name: &str) -> Option<Self> {
        let base = Self::default();
        match name {
            "default" => Some(base),
            "strict" => Some(Self {
                lp: 1e-10,
                ker: 1e-10,
                ..base
            }),
            "loose" => Some(Self {
                lp: 1e-6,
                ker: 1e-6,
                state: 1e-5,
                ..base
            }),
            _ => None,
        }
    }
}
