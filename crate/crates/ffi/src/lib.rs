//! C ABI over `povm-order`.
//!
//! Observables and states are opaque heap handles created by the
//! constructors below and released with the matching `*_free`. Every
//! fallible call returns a status code; on failure the message is kept per
//! thread and can be copied out with [`povm_last_error`].
//!
//! Matrices cross the boundary as separate real and imaginary arrays in
//! row-major order.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use povm_order::catalog::{parse_catalog, CatalogError};
use povm_order::constructors::make_photon_counting;
use povm_order::determination::{is_determined, DeterminationStatus};
use povm_order::linalg::ComplexMatrix;
use povm_order::{
    statistics_map, Comparator, DensityState, DiscreteObservable, Effect, Error, HermitianOperator, RelationKind,
    C64,
};

pub const POVM_OK: i32 = 0;
pub const POVM_ERR_NULL: i32 = 1;
pub const POVM_ERR_DIMENSION: i32 = 2;
pub const POVM_ERR_DOMAIN: i32 = 3;
pub const POVM_ERR_FORMAT: i32 = 4;
pub const POVM_ERR_TOLERANCE: i32 = 5;
pub const POVM_ERR_EMPTY_PROBES: i32 = 6;
pub const POVM_ERR_BUFFER: i32 = 7;
pub const POVM_ERR_CATALOG: i32 = 8;
pub const POVM_ERR_PANIC: i32 = 9;

pub const POVM_RELATION_FUZZY: i32 = 0;
pub const POVM_RELATION_COARSE: i32 = 1;
pub const POVM_RELATION_INFORMATIONAL: i32 = 2;
pub const POVM_RELATION_DETERMINATION: i32 = 3;

pub const POVM_DETERMINED: i32 = 0;
pub const POVM_NOT_DETERMINED: i32 = 1;
pub const POVM_PROBABLY_DETERMINED: i32 = 2;

/// Opaque observable handle.
pub struct PovmObservable(DiscreteObservable);

/// Opaque density-state handle.
pub struct PovmState(DensityState);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Dimension { .. } => POVM_ERR_DIMENSION,
            Error::Domain(_) => POVM_ERR_DOMAIN,
            Error::Format(_) => POVM_ERR_FORMAT,
            Error::ToleranceViolation(_) => POVM_ERR_TOLERANCE,
            Error::EmptyProbeSet => POVM_ERR_EMPTY_PROBES,
        };
        Failure(code, e.to_string())
    }
}

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Self {
        Failure(POVM_ERR_CATALOG, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(POVM_ERR_NULL, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            POVM_OK
        }
        Ok(Err(Failure(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic".into());
            POVM_ERR_PANIC
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn complex_matrix(re: &[f64], im: &[f64], dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |i, j| {
        C64::new(re[i * dim + j], im.get(i * dim + j).copied().unwrap_or(0.0))
    })
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes.
#[no_mangle]
pub unsafe extern "C" fn povm_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn povm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Observable with diagonal effects; `diagonals` holds `outcomes * dim`
/// values, effect by effect.
#[no_mangle]
pub unsafe extern "C" fn povm_observable_from_diagonals(
    diagonals: *const f64,
    outcomes: usize,
    dim: usize,
    out: *mut *mut PovmObservable,
) -> i32 {
    guard(|| {
        let data = slice(diagonals, outcomes * dim, "diagonals")?;
        let diags: Vec<Vec<f64>> = data.chunks(dim.max(1)).map(<[f64]>::to_vec).collect();
        store(out, PovmObservable(DiscreteObservable::from_diagonals(&diags)?))
    })
}

/// Observable from dense effects; `re` and `im` hold `outcomes * dim * dim`
/// values, effect by effect, each row-major. `im` may be null for real effects.
#[no_mangle]
pub unsafe extern "C" fn povm_observable_from_matrices(
    re: *const f64,
    im: *const f64,
    outcomes: usize,
    dim: usize,
    out: *mut *mut PovmObservable,
) -> i32 {
    guard(|| {
        let n = dim * dim;
        let re = slice(re, outcomes * n, "re")?;
        let im = if im.is_null() { &[][..] } else { slice(im, outcomes * n, "im")? };
        let effects = (0..outcomes)
            .map(|k| {
                let im_k = if im.is_empty() { &[][..] } else { &im[k * n..(k + 1) * n] };
                Effect::new(HermitianOperator::new(complex_matrix(&re[k * n..(k + 1) * n], im_k, dim))?)
            })
            .collect::<povm_order::Result<Vec<_>>>()?;
        store(out, PovmObservable(DiscreteObservable::new(effects)?))
    })
}

/// Photon counting with efficiency `eps`, truncated to `dim` Fock states.
#[no_mangle]
pub unsafe extern "C" fn povm_photon_counting(eps: f64, dim: usize, out: *mut *mut PovmObservable) -> i32 {
    guard(|| store(out, PovmObservable(make_photon_counting(eps, dim)?.observable)))
}

/// Loads observable `name` from a catalog file.
#[no_mangle]
pub unsafe extern "C" fn povm_catalog_observable(
    path: *const c_char,
    name: *const c_char,
    out: *mut *mut PovmObservable,
) -> i32 {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        if name.is_null() {
            return Err(null("name"));
        }
        let path = CStr::from_ptr(path).to_string_lossy().into_owned();
        let name = CStr::from_ptr(name).to_string_lossy().into_owned();
        let catalog = parse_catalog(std::path::Path::new(&path))?;
        let obs = catalog
            .get(&name)
            .ok_or_else(|| Failure(POVM_ERR_CATALOG, format!("no observable named '{name}'")))?;
        store(out, PovmObservable(obs.clone()))
    })
}

#[no_mangle]
pub unsafe extern "C" fn povm_observable_free(obs: *mut PovmObservable) {
    if !obs.is_null() {
        drop(Box::from_raw(obs));
    }
}

/// Hilbert space dimension, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn povm_observable_dim(obs: *const PovmObservable) -> usize {
    obs.as_ref().map_or(0, |o| o.0.dim())
}

/// Number of outcomes, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn povm_observable_outcomes(obs: *const PovmObservable) -> usize {
    obs.as_ref().map_or(0, |o| o.0.outcomes())
}

/// Density state from a dense matrix; `im` may be null.
#[no_mangle]
pub unsafe extern "C" fn povm_state_from_matrix(
    re: *const f64,
    im: *const f64,
    dim: usize,
    out: *mut *mut PovmState,
) -> i32 {
    guard(|| {
        let re = slice(re, dim * dim, "re")?;
        let im = if im.is_null() { &[][..] } else { slice(im, dim * dim, "im")? };
        let op = HermitianOperator::new(complex_matrix(re, im, dim))?;
        store(out, PovmState(DensityState::new(op)?))
    })
}

/// `|k><k|` in dimension `dim`.
#[no_mangle]
pub unsafe extern "C" fn povm_state_basis(dim: usize, k: usize, out: *mut *mut PovmState) -> i32 {
    guard(|| store(out, PovmState(DensityState::basis(dim, k)?)))
}

/// `I / dim`.
#[no_mangle]
pub unsafe extern "C" fn povm_state_maximally_mixed(dim: usize, out: *mut *mut PovmState) -> i32 {
    guard(|| {
        if dim == 0 {
            return Err(Failure(POVM_ERR_DOMAIN, "dimension must be positive".into()));
        }
        store(out, PovmState(DensityState::maximally_mixed(dim)))
    })
}

#[no_mangle]
pub unsafe extern "C" fn povm_state_free(state: *mut PovmState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Writes the outcome distribution into `probs` (`len` must equal the
/// number of outcomes).
#[no_mangle]
pub unsafe extern "C" fn povm_statistics(
    obs: *const PovmObservable,
    state: *const PovmState,
    probs: *mut f64,
    len: usize,
) -> i32 {
    guard(|| {
        let obs = handle(obs, "observable")?;
        let state = handle(state, "state")?;
        if len != obs.0.outcomes() {
            return Err(Failure(
                POVM_ERR_BUFFER,
                format!("buffer holds {len} values, observable has {} outcomes", obs.0.outcomes()),
            ));
        }
        let p = statistics_map(&obs.0, &state.0)?;
        slice_mut(probs, len, "probs")?.copy_from_slice(p.as_slice());
        Ok(())
    })
}

fn relation_kind(kind: i32) -> Result<RelationKind, Failure> {
    match kind {
        POVM_RELATION_FUZZY => Ok(RelationKind::Fuzzy),
        POVM_RELATION_COARSE => Ok(RelationKind::CoarseGraining),
        POVM_RELATION_INFORMATIONAL => Ok(RelationKind::Informational),
        POVM_RELATION_DETERMINATION => Ok(RelationKind::Determination),
        other => Err(Failure(POVM_ERR_DOMAIN, format!("unknown relation {other}"))),
    }
}

/// Decides `F ≼ E`. `probes` (length `num_probes`) is required for the
/// determination relation and ignored otherwise.
#[no_mangle]
pub unsafe extern "C" fn povm_leq(
    f: *const PovmObservable,
    e: *const PovmObservable,
    kind: i32,
    probes: *const *const PovmState,
    num_probes: usize,
    holds: *mut bool,
) -> i32 {
    guard(|| {
        let f = handle(f, "F")?;
        let e = handle(e, "E")?;
        let kind = relation_kind(kind)?;
        let probe_states = slice(probes, num_probes, "probes")?
            .iter()
            .map(|&p| handle(p, "probe").map(|s| s.0.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        if holds.is_null() {
            return Err(null("holds"));
        }
        let v = Comparator::default().leq(&f.0, &e.0, kind, Some(&probe_states))?;
        *holds = v.holds;
        Ok(())
    })
}

/// Fuzzy relation with its kernel: when it holds, `kernel` (length
/// `outcomes(E) * outcomes(F)`, row-major, rows indexed by outcomes of `E`)
/// receives the stochastic matrix. When it fails, `gap` receives the
/// phase-one residual. Either output pointer may be null.
#[no_mangle]
pub unsafe extern "C" fn povm_leq_fuzzy_certificate(
    f: *const PovmObservable,
    e: *const PovmObservable,
    holds: *mut bool,
    kernel: *mut f64,
    kernel_len: usize,
    gap: *mut f64,
) -> i32 {
    guard(|| {
        let f = handle(f, "F")?;
        let e = handle(e, "E")?;
        if holds.is_null() {
            return Err(null("holds"));
        }
        let v = Comparator::default().leq_fuzzy(&f.0, &e.0)?;
        *holds = v.holds;
        if let (Some(k), false) = (v.kernel(), kernel.is_null()) {
            let need = k.rows() * k.cols();
            if kernel_len != need {
                return Err(Failure(POVM_ERR_BUFFER, format!("kernel buffer needs {need} values")));
            }
            let out = slice_mut(kernel, kernel_len, "kernel")?;
            for (i, row) in k.to_rows().iter().enumerate() {
                out[i * k.cols()..(i + 1) * k.cols()].copy_from_slice(row);
            }
        }
        if let (Some(g), false) = (v.infeasibility_gap, gap.is_null()) {
            *gap = g;
        }
        Ok(())
    })
}

/// Whether `state` is the only state with its statistics under `obs`;
/// `status` receives one of the `POVM_*DETERMINED` codes.
#[no_mangle]
pub unsafe extern "C" fn povm_is_determined(
    state: *const PovmState,
    obs: *const PovmObservable,
    status: *mut i32,
) -> i32 {
    guard(|| {
        let state = handle(state, "state")?;
        let obs = handle(obs, "observable")?;
        if status.is_null() {
            return Err(null("status"));
        }
        *status = match is_determined(&state.0, &obs.0)?.status {
            DeterminationStatus::Determined => POVM_DETERMINED,
            DeterminationStatus::NotDetermined => POVM_NOT_DETERMINED,
            DeterminationStatus::ProbablyDetermined => POVM_PROBABLY_DETERMINED,
        };
        Ok(())
    })
}
