use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::linalg::HermitianOperator;
use crate::operator::{DensityState, DiscreteObservable, Effect};
use crate::tolerance;

/// Two-outcome observable with effect `A` at outcome 1 and `I - A` at outcome 0.
#[derive(Debug, Clone, PartialEq)]
pub struct YesNoObservable {
    pub a: Effect,
    pub observable: DiscreteObservable,
}

pub fn make_yes_no(a: &Effect) -> Result<YesNoObservable> {
    let observable = DiscreteObservable::with_labels(
        vec![a.complement(), a.clone()],
        Some(vec!["0".into(), "1".into()]),
    )?;
    Ok(YesNoObservable {
        a: a.clone(),
        observable,
    })
}

/// `(t, s)` in the unit square with `A = tB + s(I - B)`, if any.
///
/// With `B` non-scalar, `I` and `B` are linearly independent and the least
/// squares solution over the Hilbert-Schmidt coordinates is the only
/// candidate. With `B = bI` the relation reduces to `A` being scalar.
pub fn yes_no_fuzzy_parameters(a: &Effect, b: &Effect) -> Result<Option<(f64, f64)>> {
    Error::check_dim(b.dim(), a.dim())?;
    let d = a.dim();
    let id = HermitianOperator::identity(d);
    let bop = b.op();
    let b_mean = bop.trace() / d as f64;
    let scalar_b = bop.max_abs_diff(&HermitianOperator::scaled_identity(d, b_mean)) <= tolerance::SUM;

    let (t, s) = if scalar_b {
        let a_mean = a.op().trace() / d as f64;
        (a_mean, a_mean)
    } else {
        // A = s I + (t - s) B: solve for (s, u = t - s).
        let g = Matrix2::new(id.hs_inner(&id), id.hs_inner(bop), bop.hs_inner(&id), bop.hs_inner(bop));
        let rhs = Vector2::new(id.hs_inner(a.op()), bop.hs_inner(a.op()));
        let Some(sol) = g.lu().solve(&rhs) else {
            return Ok(None);
        };
        (sol[0] + sol[1], sol[0])
    };
    let slack = tolerance::SUM;
    if !(-slack..=1.0 + slack).contains(&t) || !(-slack..=1.0 + slack).contains(&s) {
        return Ok(None);
    }
    let (t, s) = (t.clamp(0.0, 1.0), s.clamp(0.0, 1.0));
    let rebuilt = bop.scale(t).add(&b.complement().op().scale(s));
    if rebuilt.max_abs_diff(a.op()) <= tolerance::SUM {
        Ok(Some((t, s)))
    } else {
        Ok(None)
    }
}

/// Both `A` and `I - A` have norm one.
pub fn yes_no_is_fuzzy_optimal(a: &Effect) -> bool {
    let (lo, hi) = extreme_eigenvalues(a);
    hi >= 1.0 - tolerance::PSD && 1.0 - lo >= 1.0 - tolerance::PSD
}

fn extreme_eigenvalues(a: &Effect) -> (f64, f64) {
    let ev = a.op().eigenvalues();
    (ev[0], ev[ev.len() - 1])
}

/// An effect `B` whose 1-0 observable strictly dominates that of `A`.
///
/// With `α = ‖A‖` and `β = ‖I - A‖`, `B = (A + (β - 1) I) / (α + β - 1)`
/// satisfies `A = αB + (1 - β)(I - B)`. Absent when `A` is already optimal or
/// when `α + β = 1`, which forces `A` to be scalar.
pub fn yes_no_dominating_effect(a: &Effect) -> Option<Effect> {
    if yes_no_is_fuzzy_optimal(a) {
        return None;
    }
    let (lo, hi) = extreme_eigenvalues(a);
    let alpha = hi;
    let beta = 1.0 - lo;
    let denom = alpha + beta - 1.0;
    if denom <= tolerance::PSD {
        return None;
    }
    let d = a.dim();
    let b = a
        .op()
        .add(&HermitianOperator::scaled_identity(d, beta - 1.0))
        .scale(1.0 / denom);
    Effect::new(b).ok()
}

/// States on which `A` and `I - A` are each nearly certain.
pub fn approximately_actualizable(a: &Effect, delta: f64) -> Result<(DensityState, DensityState)> {
    if !(delta > 0.0) {
        return Err(Error::domain("delta must be positive"));
    }
    if !yes_no_is_fuzzy_optimal(a) {
        return Err(Error::domain("effect is not optimal: ‖A‖ or ‖I - A‖ is below one"));
    }
    let spec = a.op().eigen();
    let t1 = DensityState::pure(&spec.vector(a.dim() - 1))?;
    let t2 = DensityState::pure(&spec.vector(0))?;
    let p1 = t1.op().hs_inner(a.op());
    let p2 = t2.op().hs_inner(a.complement().op());
    if p1 < 1.0 - delta || p2 < 1.0 - delta {
        return Err(Error::ToleranceViolation(format!(
            "eigenstates reach only {p1:.3e} and {p2:.3e}"
        )));
    }
    Ok((t1, t2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> Effect {
        Effect::from_diagonal(v).unwrap()
    }

    #[test]
    fn identity_effect_gives_trivial_observable() {
        let y = make_yes_no(&diag(&[1.0, 1.0])).unwrap();
        assert_eq!(y.observable.effect(0).op().diagonal(), vec![0.0, 0.0]);
        assert_eq!(y.observable.effect(1).op().diagonal(), vec![1.0, 1.0]);
    }

    #[test]
    fn parameters() {
        let b = diag(&[1.0, 0.0]);
        assert_eq!(yes_no_fuzzy_parameters(&b, &b).unwrap(), Some((1.0, 0.0)));
        assert_eq!(yes_no_fuzzy_parameters(&b.complement(), &b).unwrap(), Some((0.0, 1.0)));
        let (t, s) = yes_no_fuzzy_parameters(&diag(&[0.7, 0.2]), &b).unwrap().unwrap();
        assert!((t - 0.7).abs() < 1e-14 && (s - 0.2).abs() < 1e-14);
        // not of the form sI + uB with s, t in range
        assert_eq!(yes_no_fuzzy_parameters(&diag(&[0.5, 0.6, 0.1]), &diag(&[1.0, 0.0, 0.0])).unwrap(), None);
    }

    #[test]
    fn scalar_b() {
        let b = diag(&[0.3, 0.3]);
        assert_eq!(yes_no_fuzzy_parameters(&diag(&[0.6, 0.6]), &b).unwrap(), Some((0.6, 0.6)));
        assert_eq!(yes_no_fuzzy_parameters(&diag(&[1.0, 0.0]), &b).unwrap(), None);
    }

    #[test]
    fn optimality() {
        assert!(yes_no_is_fuzzy_optimal(&diag(&[1.0, 0.0])));
        assert!(yes_no_is_fuzzy_optimal(&diag(&[1.0, 0.6, 0.0])));
        assert!(!yes_no_is_fuzzy_optimal(&diag(&[0.5, 0.5])));
        assert!(!yes_no_is_fuzzy_optimal(&diag(&[1.0, 1.0])));
    }

    #[test]
    fn dominating_effect() {
        let b = yes_no_dominating_effect(&diag(&[0.8, 0.1])).unwrap();
        let bd = b.op().diagonal();
        assert!((bd[0] - 1.0).abs() < 1e-14 && bd[1].abs() < 1e-14);
        assert!(yes_no_dominating_effect(&diag(&[1.0, 0.0])).is_none());
        assert!(yes_no_dominating_effect(&diag(&[0.3, 0.3])).is_none());
    }

    #[test]
    fn actualizable() {
        let (t1, t2) = approximately_actualizable(&diag(&[1.0, 0.5, 0.0]), 0.1).unwrap();
        assert!((t1.op().diagonal()[0] - 1.0).abs() < 1e-12);
        assert!((t2.op().diagonal()[2] - 1.0).abs() < 1e-12);
        assert!(approximately_actualizable(&diag(&[0.5, 0.5]), 0.1).is_err());
    }
}
