//! Finite-dimensional observables (POVMs) and the preorders that compare them.
//!
//! An observable is a finite list of effects summing to the identity. This
//! crate decides, with certificates, whether one observable is a fuzzy
//! version (classical post-processing) of another, whether it distinguishes
//! fewer pairs of states, and whether it determines fewer states; builds the
//! resulting posets over catalogs; and constructs the standard families used
//! to exercise these orders (1-0 observables, photon counting with finite
//! efficiency, localization on a cyclic group).
//!
//! ```
//! use povm_order::constructors::make_photon_counting;
//! use povm_order::relations::leq_fuzzy;
//!
//! let low = make_photon_counting(0.3, 6).unwrap().observable;
//! let high = make_photon_counting(0.7, 6).unwrap().observable;
//! assert!(leq_fuzzy(&low, &high).unwrap().holds);
//! assert!(!leq_fuzzy(&high, &low).unwrap().holds);
//! ```

pub mod catalog;
pub mod cli;
pub mod constructors;
pub mod determination;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod operator;
pub mod relations;
pub mod sample;
pub mod settings;
pub mod tolerance;

pub use error::{Error, Result};
pub use linalg::{HermitianOperator, C64};
pub use lp::StochasticKernel;
pub use operator::{statistics_map, DensityState, DiscreteObservable, Effect, ProbabilityVector};
pub use relations::{Comparator, RelationKind, RelationVerdict};
pub use settings::Settings;
