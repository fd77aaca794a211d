use crate::tolerance::Tolerances;

/// Seed used by the determination witness search unless overridden.
pub const DEFAULT_SEED: u64 = 0x5eed_0f_0b5e_7ab1e;

/// Number of random kernel directions tried by the witness search.
pub const DEFAULT_RANDOM_DIRECTIONS: usize = 200;

/// Thresholds and search parameters for the decision procedures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub tol: Tolerances,
    pub seed: u64,
    pub random_directions: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            seed: DEFAULT_SEED,
            random_directions: DEFAULT_RANDOM_DIRECTIONS,
        }
    }
}

impl Settings {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}
