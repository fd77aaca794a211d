//! JSON catalogs of named observables and probe states.
//!
//! ```json
//! {
//!   "version": "povm-order/1",
//!   "hilbert_dim": 2,
//!   "observables": [
//!     { "name": "z", "labels": ["up", "down"],
//!       "effects": [[1.0, 0.0], [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]] }
//!   ],
//!   "probes": [ { "name": "mixed", "state": [0.5, 0.5] } ]
//! }
//! ```
//!
//! An operator is either a list of reals (the diagonal) or a row-major matrix
//! whose entries are `[re, im]` pairs. Numbers are written in the shortest
//! form that parses back to the same double.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{hermiticity_residual, ComplexMatrix, HermitianOperator, C64};
use crate::operator::{DensityState, DiscreteObservable, Effect};
use crate::tolerance;

pub const FORMAT_VERSION: &str = "povm-order/1";

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("{item}: {invariant}{}", residual.map(|r| format!(" (residual {r:.3e})")).unwrap_or_default())]
    Invariant {
        item: String,
        invariant: String,
        residual: Option<f64>,
    },
}

impl CatalogError {
    fn invariant(item: impl Into<String>, invariant: impl Into<String>, residual: Option<f64>) -> Self {
        CatalogError::Invariant {
            item: item.into(),
            invariant: invariant.into(),
            residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorJson {
    Diagonal(Vec<f64>),
    Dense(Vec<Vec<[f64; 2]>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableJson {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub effects: Vec<OperatorJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeJson {
    pub name: String,
    pub state: OperatorJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogJson {
    pub version: String,
    pub hilbert_dim: usize,
    pub observables: Vec<ObservableJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub probes: Vec<ProbeJson>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub observable: DiscreteObservable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedState {
    pub name: String,
    pub state: DensityState,
}

/// A validated catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    pub hilbert_dim: usize,
    pub entries: Vec<CatalogEntry>,
    pub probes: Vec<NamedState>,
}

impl Catalog {
    pub fn new(hilbert_dim: usize) -> Self {
        Self {
            hilbert_dim,
            entries: Vec::new(),
            probes: Vec::new(),
        }
    }

    pub fn get(&self, name: &str) -> Option<&DiscreteObservable> {
        self.entries.iter().find(|e| e.name == name).map(|e| &e.observable)
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.name.clone()).collect()
    }

    pub fn observables(&self) -> Vec<DiscreteObservable> {
        self.entries.iter().map(|e| e.observable.clone()).collect()
    }

    pub fn probe_states(&self) -> Vec<DensityState> {
        self.probes.iter().map(|p| p.state.clone()).collect()
    }

    /// Inserts or replaces the entry called `name`.
    pub fn upsert(&mut self, name: &str, observable: DiscreteObservable) -> Result<(), CatalogError> {
        if observable.dim() != self.hilbert_dim {
            return Err(CatalogError::invariant(
                format!("observable '{name}'"),
                format!("dimension {} differs from hilbert_dim {}", observable.dim(), self.hilbert_dim),
                None,
            ));
        }
        match self.entries.iter_mut().find(|e| e.name == name) {
            Some(e) => e.observable = observable,
            None => self.entries.push(CatalogEntry {
                name: name.to_string(),
                observable,
            }),
        }
        Ok(())
    }

    pub fn to_json(&self) -> CatalogJson {
        CatalogJson {
            version: FORMAT_VERSION.to_string(),
            hilbert_dim: self.hilbert_dim,
            observables: self
                .entries
                .iter()
                .map(|e| ObservableJson {
                    name: e.name.clone(),
                    labels: e.observable.labels().map(|l| l.to_vec()),
                    effects: e.observable.effects().iter().map(|x| operator_to_json(x.op())).collect(),
                })
                .collect(),
            probes: self
                .probes
                .iter()
                .map(|p| ProbeJson {
                    name: p.name.clone(),
                    state: operator_to_json(p.state.op()),
                })
                .collect(),
        }
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("catalog serializes");
        s.push('\n');
        s
    }
}

fn operator_to_json(op: &HermitianOperator) -> OperatorJson {
    let m = op.matrix();
    let d = op.dim();
    let off_diagonal_zero = (0..d).all(|i| (0..d).all(|j| i == j || m[(i, j)] == C64::new(0.0, 0.0)));
    let real_diagonal = (0..d).all(|i| m[(i, i)].im == 0.0);
    if off_diagonal_zero && real_diagonal {
        OperatorJson::Diagonal((0..d).map(|i| m[(i, i)].re).collect())
    } else {
        OperatorJson::Dense((0..d).map(|i| (0..d).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect())
    }
}

fn operator_from_json(item: &str, op: &OperatorJson, dim: usize) -> Result<HermitianOperator, CatalogError> {
    let matrix = match op {
        OperatorJson::Diagonal(v) => {
            if v.len() != dim {
                return Err(CatalogError::invariant(
                    item,
                    format!("diagonal has {} entries, expected {dim}", v.len()),
                    None,
                ));
            }
            let mut m = ComplexMatrix::zeros(dim, dim);
            for (i, &x) in v.iter().enumerate() {
                m[(i, i)] = C64::new(x, 0.0);
            }
            m
        }
        OperatorJson::Dense(rows) => {
            if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                return Err(CatalogError::invariant(item, format!("matrix is not {dim}x{dim}"), None));
            }
            DMatrix::from_fn(dim, dim, |i, j| C64::new(rows[i][j][0], rows[i][j][1]))
        }
    };
    if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(CatalogError::invariant(item, "non-finite entry", None));
    }
    let herm = hermiticity_residual(&matrix);
    if herm > tolerance::HERM {
        return Err(CatalogError::invariant(item, "operator is not Hermitian", Some(herm)));
    }
    HermitianOperator::new(matrix).map_err(|e| CatalogError::invariant(item, e.to_string(), None))
}

fn effect_from_json(item: &str, op: &OperatorJson, dim: usize) -> Result<Effect, CatalogError> {
    let h = operator_from_json(item, op, dim)?;
    let ev = h.eigenvalues();
    let (lo, hi) = (ev[0], ev[ev.len() - 1]);
    if lo < -tolerance::PSD {
        return Err(CatalogError::invariant(item, "effect is not positive", Some(-lo)));
    }
    if hi > 1.0 + tolerance::PSD {
        return Err(CatalogError::invariant(item, "effect exceeds the identity", Some(hi - 1.0)));
    }
    Effect::new(h).map_err(|e| CatalogError::invariant(item, e.to_string(), None))
}

impl CatalogJson {
    /// Checks every invariant and stops at the first violation.
    pub fn validate(&self) -> Result<Catalog, CatalogError> {
        if self.version != FORMAT_VERSION {
            return Err(CatalogError::Schema(format!(
                "unsupported version '{}', expected '{FORMAT_VERSION}'",
                self.version
            )));
        }
        let d = self.hilbert_dim;
        if d == 0 {
            return Err(CatalogError::invariant("catalog", "hilbert_dim must be positive", None));
        }
        let mut seen = BTreeSet::new();
        let mut catalog = Catalog::new(d);
        for obs in &self.observables {
            let item = format!("observable '{}'", obs.name);
            if !seen.insert(obs.name.as_str()) {
                return Err(CatalogError::invariant(item, "duplicate name", None));
            }
            if obs.effects.is_empty() {
                return Err(CatalogError::invariant(item, "no effects", None));
            }
            if let Some(l) = &obs.labels {
                if l.len() != obs.effects.len() {
                    return Err(CatalogError::invariant(
                        item,
                        format!("{} labels for {} effects", l.len(), obs.effects.len()),
                        None,
                    ));
                }
            }
            let effects = obs
                .effects
                .iter()
                .enumerate()
                .map(|(j, op)| effect_from_json(&format!("{item}, effect {j}"), op, d))
                .collect::<Result<Vec<_>, _>>()?;
            let mut sum = ComplexMatrix::zeros(d, d);
            for e in &effects {
                sum += e.op().matrix();
            }
            let norm_residual = (sum - ComplexMatrix::identity(d, d)).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if norm_residual > tolerance::SUM {
                return Err(CatalogError::invariant(
                    item,
                    "effects do not sum to the identity",
                    Some(norm_residual),
                ));
            }
            let observable = DiscreteObservable::with_labels(effects, obs.labels.clone())
                .map_err(|e| CatalogError::invariant(&item, e.to_string(), None))?;
            catalog.entries.push(CatalogEntry {
                name: obs.name.clone(),
                observable,
            });
        }
        let mut seen = BTreeSet::new();
        for p in &self.probes {
            let item = format!("probe '{}'", p.name);
            if !seen.insert(p.name.as_str()) {
                return Err(CatalogError::invariant(item, "duplicate name", None));
            }
            let h = operator_from_json(&item, &p.state, d)?;
            let tr = (h.trace() - 1.0).abs();
            if tr > tolerance::TRACE {
                return Err(CatalogError::invariant(item, "trace is not one", Some(tr)));
            }
            let lo = h.min_eigenvalue();
            if lo < -tolerance::PSD {
                return Err(CatalogError::invariant(item, "state is not positive", Some(-lo)));
            }
            let state = DensityState::new(h).map_err(|e| CatalogError::invariant(&item, e.to_string(), None))?;
            catalog.probes.push(NamedState {
                name: p.name.clone(),
                state,
            });
        }
        Ok(catalog)
    }
}

pub fn parse_catalog_str(text: &str) -> Result<Catalog, CatalogError> {
    let raw: CatalogJson = serde_json::from_str(text).map_err(|e| CatalogError::Schema(e.to_string()))?;
    raw.validate()
}

pub fn parse_catalog(path: &Path) -> Result<Catalog, CatalogError> {
    let text = std::fs::read_to_string(path).map_err(|source| CatalogError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_catalog_str(&text)
}

pub fn write_catalog(path: &Path, catalog: &Catalog) -> Result<(), CatalogError> {
    std::fs::write(path, catalog.to_json_string()).map_err(|source| CatalogError::Io {
        path: path.to_path_buf(),
        source,
    })
}
