use std::ffi::{CStr, CString};
use std::ptr;

use povm_order_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0u8; 256];
    let n = unsafe { povm_last_error(buf.as_mut_ptr().cast(), buf.len()) };
    assert!(n > 0);
    CStr::from_bytes_until_nul(&buf).unwrap().to_string_lossy().into_owned()
}

fn diagonal(diags: &[f64], outcomes: usize, dim: usize) -> *mut PovmObservable {
    let mut out = ptr::null_mut();
    let rc = unsafe { povm_observable_from_diagonals(diags.as_ptr(), outcomes, dim, &mut out) };
    assert_eq!(rc, POVM_OK);
    out
}

fn basis(dim: usize, k: usize) -> *mut PovmState {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { povm_state_basis(dim, k, &mut out) }, POVM_OK);
    out
}

#[test]
fn handles_and_statistics() {
    let z = diagonal(&[1.0, 0.0, 0.0, 1.0], 2, 2);
    let mut mixed = ptr::null_mut();
    unsafe {
        assert_eq!(povm_observable_dim(z), 2);
        assert_eq!(povm_observable_outcomes(z), 2);
        assert_eq!(povm_state_maximally_mixed(2, &mut mixed), POVM_OK);
        let mut p = [0.0; 2];
        assert_eq!(povm_statistics(z, mixed, p.as_mut_ptr(), 2), POVM_OK);
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
        assert_eq!(povm_statistics(z, mixed, p.as_mut_ptr(), 3), POVM_ERR_BUFFER);
        povm_state_free(mixed);
        povm_observable_free(z);
    }
}

#[test]
fn dense_constructors() {
    // |+><+| as a state, and the X observable.
    let re = [0.5, 0.5, 0.5, 0.5];
    let mut plus = ptr::null_mut();
    let effects_re = [0.5, 0.5, 0.5, 0.5, 0.5, -0.5, -0.5, 0.5];
    let mut x = ptr::null_mut();
    unsafe {
        assert_eq!(povm_state_from_matrix(re.as_ptr(), ptr::null(), 2, &mut plus), POVM_OK);
        assert_eq!(povm_observable_from_matrices(effects_re.as_ptr(), ptr::null(), 2, 2, &mut x), POVM_OK);
        let mut p = [0.0; 2];
        assert_eq!(povm_statistics(x, plus, p.as_mut_ptr(), 2), POVM_OK);
        assert!((p[0] - 1.0).abs() < 1e-12);
        let mut status = -1;
        assert_eq!(povm_is_determined(plus, x, &mut status), POVM_OK);
        assert_eq!(status, POVM_DETERMINED);
        povm_state_free(plus);
        povm_observable_free(x);
    }
}

#[test]
fn relations_and_certificate() {
    let z = diagonal(&[1.0, 0.0, 0.0, 1.0], 2, 2);
    let noisy = diagonal(&[0.9, 0.2, 0.1, 0.8], 2, 2);
    unsafe {
        let mut holds = false;
        let mut kernel = [0.0; 4];
        let mut gap = -1.0;
        assert_eq!(
            povm_leq_fuzzy_certificate(noisy, z, &mut holds, kernel.as_mut_ptr(), 4, &mut gap),
            POVM_OK
        );
        assert!(holds);
        for (got, want) in kernel.iter().zip([0.9, 0.1, 0.2, 0.8]) {
            assert!((got - want).abs() < 1e-9);
        }
        assert_eq!(gap, -1.0);

        assert_eq!(povm_leq_fuzzy_certificate(z, noisy, &mut holds, ptr::null_mut(), 0, &mut gap), POVM_OK);
        assert!(!holds);
        assert!(gap > 1e-8);

        for kind in [POVM_RELATION_FUZZY, POVM_RELATION_COARSE, POVM_RELATION_INFORMATIONAL] {
            assert_eq!(povm_leq(noisy, z, kind, ptr::null(), 0, &mut holds), POVM_OK);
            assert!(holds, "kind {kind}");
        }
        // |0><0| is determined by z and by the noisy diagonal observable, not by a coin.
        let coin = diagonal(&[0.5, 0.5, 0.5, 0.5], 2, 2);
        let probe = basis(2, 0) as *const PovmState;
        assert_eq!(povm_leq(z, noisy, POVM_RELATION_DETERMINATION, &probe, 1, &mut holds), POVM_OK);
        assert!(holds);
        assert_eq!(povm_leq(z, coin, POVM_RELATION_DETERMINATION, &probe, 1, &mut holds), POVM_OK);
        assert!(!holds);
        povm_observable_free(coin);
        assert_eq!(povm_leq(z, noisy, POVM_RELATION_DETERMINATION, ptr::null(), 0, &mut holds), POVM_ERR_EMPTY_PROBES);
        assert_eq!(povm_leq(z, noisy, 17, ptr::null(), 0, &mut holds), POVM_ERR_DOMAIN);
        povm_state_free(probe as *mut _);
        povm_observable_free(z);
        povm_observable_free(noisy);
    }
}

#[test]
fn photon_counting_states() {
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(povm_photon_counting(0.5, 4, &mut f), POVM_OK);
        for n in 0..4 {
            let t = basis(4, n);
            let mut status = -1;
            assert_eq!(povm_is_determined(t, f, &mut status), POVM_OK);
            assert_eq!(status, POVM_DETERMINED);
            povm_state_free(t);
        }
        let mut mixed = ptr::null_mut();
        assert_eq!(povm_state_maximally_mixed(4, &mut mixed), POVM_OK);
        let mut status = -1;
        assert_eq!(povm_is_determined(mixed, f, &mut status), POVM_OK);
        assert_eq!(status, POVM_NOT_DETERMINED);
        povm_state_free(mixed);
        povm_observable_free(f);
        assert_eq!(povm_photon_counting(1.5, 4, &mut f), POVM_ERR_DOMAIN);
    }
}

#[test]
fn error_reporting() {
    unsafe {
        let mut out = ptr::null_mut();
        // Effects summing to 0.99 I.
        let rc = povm_observable_from_diagonals([0.99, 0.99].as_ptr(), 1, 2, &mut out);
        assert_ne!(rc, POVM_OK);
        assert!(out.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(povm_observable_from_diagonals(ptr::null(), 1, 2, &mut out), POVM_ERR_NULL);
        assert!(last_error().contains("null"));
        assert_eq!(povm_observable_dim(ptr::null()), 0);
        povm_observable_free(ptr::null_mut());
        povm_state_free(ptr::null_mut());

        let z = diagonal(&[1.0, 0.0, 0.0, 1.0], 2, 2);
        let t = basis(3, 0);
        let mut p = [0.0; 2];
        assert_eq!(povm_statistics(z, t, p.as_mut_ptr(), 2), POVM_ERR_DIMENSION);

        // Truncating copy still reports the full length.
        let mut small = [0u8; 4];
        let n = povm_last_error(small.as_mut_ptr().cast(), small.len());
        assert!(n > 3);
        assert_eq!(small[3], 0);
        povm_state_free(t);
        povm_observable_free(z);

        let v = CStr::from_ptr(povm_version()).to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}

#[test]
fn catalog_lookup() {
    let dir = tempfile::TempDir::new().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(
        &path,
        r#"{"version": "povm-order/1", "hilbert_dim": 2,
            "observables": [{"name": "z", "effects": [[1, 0], [0, 1]]}]}"#,
    )
    .unwrap();
    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(povm_catalog_observable(cpath.as_ptr(), c"z".as_ptr(), &mut out), POVM_OK);
        assert_eq!(povm_observable_outcomes(out), 2);
        povm_observable_free(out);
        assert_eq!(povm_catalog_observable(cpath.as_ptr(), c"w".as_ptr(), &mut out), POVM_ERR_CATALOG);
        let missing = CString::new(dir.path().join("nope.json").to_str().unwrap()).unwrap();
        assert_eq!(povm_catalog_observable(missing.as_ptr(), c"z".as_ptr(), &mut out), POVM_ERR_CATALOG);
    }
}

#[test]
fn header_declares_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/povm_order.h")).unwrap();
    assert!(header.contains("#ifndef POVM_ORDER_H"));
    assert!(header.contains("typedef struct PovmObservable PovmObservable;"));
    for sym in [
        "povm_last_error",
        "povm_version",
        "povm_observable_from_diagonals",
        "povm_observable_from_matrices",
        "povm_photon_counting",
        "povm_catalog_observable",
        "povm_observable_free",
        "povm_state_from_matrix",
        "povm_state_free",
        "povm_statistics",
        "povm_leq",
        "povm_leq_fuzzy_certificate",
        "povm_is_determined",
        "POVM_ERR_TOLERANCE",
        "POVM_PROBABLY_DETERMINED",
    ] {
        assert!(header.contains(sym), "{sym} missing from header");
    }
}
