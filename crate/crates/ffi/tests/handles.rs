use std::ffi::{CStr, CString};
use std::ptr;

use hopfo_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { hopfo_string_free(s) };
    out
}

#[test]
fn hopf_round_trip() {
    let spec = CString::new("p_dg:3").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { hopfo_hopf_builtin(spec.as_ptr(), &mut h) }, HopfoStatus::Ok);
    assert_eq!(unsafe { hopfo_hopf_dim(h) }, 3);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { hopfo_hopf_integral(h, &mut s) }, HopfoStatus::Ok);
    assert_eq!(take(s), "∂^2");
    assert_eq!(unsafe { hopfo_k0_ring(h, &mut s) }, HopfoStatus::Ok);
    assert_eq!(take(s), "Z[q,q^-1]/(1+q+q^2)");

    let name = CString::new("trivial").unwrap();
    let mut k = ptr::null_mut();
    assert_eq!(unsafe { hopfo_module_named(h, name.as_ptr(), &mut k) }, HopfoStatus::Ok);
    assert_eq!(unsafe { hopfo_module_is_projective(k) }, HopfoStatus::False);
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { hopfo_module_shift(k, 1, &mut t) }, HopfoStatus::Ok);
    assert_eq!(unsafe { hopfo_module_dim(t) }, 2);
    assert_eq!(unsafe { hopfo_module_k0_class(t, &mut s) }, HopfoStatus::Ok);
    assert_eq!(take(s), "-1");
    let mut dim = 0usize;
    assert_eq!(unsafe { hopfo_module_stable_invariants_dim(t, &mut dim) }, HopfoStatus::Ok);
    assert_eq!(dim, 1);

    assert_eq!(unsafe { hopfo_module_serialize(t, &mut s) }, HopfoStatus::Ok);
    let text = CString::new(take(s)).unwrap();
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { hopfo_module_parse(text.as_ptr(), &mut back) }, HopfoStatus::Ok);
    let mut kt = ptr::null_mut();
    assert_eq!(unsafe { hopfo_module_tensor(k, back, &mut kt) }, HopfoStatus::Ok);
    assert_eq!(unsafe { hopfo_module_dim(kt) }, 2);

    unsafe {
        hopfo_module_free(kt);
        hopfo_module_free(back);
        hopfo_module_free(t);
        hopfo_module_free(k);
        hopfo_hopf_free(h);
    }
}

#[test]
fn errors_are_reported() {
    let bad = CString::new("nope:1").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { hopfo_hopf_builtin(bad.as_ptr(), &mut h) }, HopfoStatus::Invalid);
    assert!(h.is_null());
    let msg = unsafe { CStr::from_ptr(hopfo_last_error()) }.to_str().unwrap();
    assert!(!msg.is_empty());
    assert_eq!(unsafe { hopfo_hopf_builtin(ptr::null(), &mut h) }, HopfoStatus::NullArgument);
    assert_eq!(unsafe { hopfo_module_is_projective(ptr::null()) }, HopfoStatus::NullArgument);
    let junk = CString::new("{").unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { hopfo_module_parse(junk.as_ptr(), &mut m) }, HopfoStatus::Invalid);
    unsafe { hopfo_hopf_free(ptr::null_mut()) };
}

#[test]
fn contractible_algebra() {
    let spec = CString::new("poly_pdg:3").unwrap();
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { hopfo_algebra_builtin(spec.as_ptr(), &mut a) }, HopfoStatus::Ok);
    assert_eq!(unsafe { hopfo_algebra_dim(a) }, 3);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { hopfo_algebra_contractible(a, &mut s) }, HopfoStatus::Ok);
    assert_eq!(take(s), "-x^2");
    unsafe { hopfo_algebra_free(a) };
    let spec = CString::new("dg_square_zero").unwrap();
    assert_eq!(unsafe { hopfo_algebra_builtin(spec.as_ptr(), &mut a) }, HopfoStatus::Ok);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { hopfo_algebra_contractible(a, &mut s) }, HopfoStatus::False);
    assert!(s.is_null());
    unsafe { hopfo_algebra_free(a) };
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/hopfo.h")).unwrap();
    for f in ["hopfo_hopf_builtin", "hopfo_hopf_free", "hopfo_module_free", "hopfo_string_free", "HopfoStatus"] {
        assert!(h.contains(f), "{f}");
    }
}
