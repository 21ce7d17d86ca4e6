//! C ABI over the hopfo library. Every object is an opaque handle released by its matching
//! `*_free`; strings returned through out-parameters are released with `hopfo_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use hopfo::cli::doc::{self, Entity};
use hopfo::hmod::{self, HModule};
use hopfo::hopf::{self, format_combination, HopfAlgebra};
use hopfo::hopfomod;
use hopfo::kzero;
use hopfo::modalg::{self, ModuleAlgebra};

/// Result codes. `False` is a successful call whose answer is negative.
///
/// cbindgen:prefix-with-name
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HopfoStatus {
    Ok = 0,
    False = 1,
    NullArgument = 2,
    InvalidUtf8 = 3,
    Invalid = 4,
    Unsupported = 5,
    Panic = 6,
}

pub struct HopfoHopf(Arc<HopfAlgebra>);
pub struct HopfoModule(HModule);
pub struct HopfoAlgebra(ModuleAlgebra);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

/// Message of the last failing call on this thread, or NULL. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn hopfo_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

type Res<T> = Result<T, (HopfoStatus, String)>;

fn guard(f: impl FnOnce() -> Res<HopfoStatus>) -> HopfoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err((s, m))) => {
            set_error(m);
            s
        }
        Err(_) => {
            set_error("internal panic");
            HopfoStatus::Panic
        }
    }
}

fn invalid<E: ToString>(e: E) -> (HopfoStatus, String) {
    (HopfoStatus::Invalid, e.to_string())
}

unsafe fn read_str<'a>(s: *const c_char) -> Res<&'a str> {
    if s.is_null() {
        return Err((HopfoStatus::NullArgument, "null string".into()));
    }
    CStr::from_ptr(s).to_str().map_err(|_| (HopfoStatus::InvalidUtf8, "string is not UTF-8".into()))
}

unsafe fn deref<'a, T>(p: *const T) -> Res<&'a T> {
    p.as_ref().ok_or((HopfoStatus::NullArgument, "null handle".into()))
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Res<HopfoStatus> {
    if out.is_null() {
        return Err((HopfoStatus::NullArgument, "null out-parameter".into()));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(HopfoStatus::Ok)
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Res<HopfoStatus> {
    if out.is_null() {
        return Err((HopfoStatus::NullArgument, "null out-parameter".into()));
    }
    *out = CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw();
    Ok(HopfoStatus::Ok)
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hopfo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a builtin Hopf algebra from a spec such as "p_dg:3" or "taft:3".
///
/// # Safety
/// `spec` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hopfo_hopf_builtin(spec: *const c_char, out: *mut *mut HopfoHopf) -> HopfoStatus {
    guard(|| {
        let spec = read_str(spec)?;
        let h = hopf::builtin_from_spec(spec).map_err(invalid)?;
        put(out, HopfoHopf(Arc::new(h)))
    })
}

/// # Safety
/// `h` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hopfo_hopf_free(h: *mut HopfoHopf) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Dimension of the Hopf algebra (0 for NULL).
///
/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hopfo_hopf_dim(h: *const HopfoHopf) -> usize {
    h.as_ref().map_or(0, |h| h.0.dim())
}

/// The normalized integral, rendered in the basis labels.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hopfo_hopf_integral(h: *const HopfoHopf, out: *mut *mut c_char) -> HopfoStatus {
    guard(|| {
        let h = &deref(h)?.0;
        put_string(out, h.format_element(&h.preferred_integral()))
    })
}

/// The Grothendieck ring of the stable category, e.g. "Z[q]/(1+q+q^2)".
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hopfo_k0_ring(h: *const HopfoHopf, out: *mut *mut c_char) -> HopfoStatus {
    guard(|| {
        let h = &deref(h)?.0;
        let r = kzero::k0_ring(h).map_err(|e| (HopfoStatus::Unsupported, e.to_string()))?;
        put_string(out, r.to_string())
    })
}

/// A named module over `h`: "trivial", "regular", "shift", "unshift", "augmentation", "zero".
///
/// # Safety
/// `h` must be a live handle, `name` a valid C string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hopfo_module_named(
    h: *const HopfoHopf,
    name: *const c_char,
    out: *mut *mut HopfoModule,
) -> HopfoStatus {
    guard(|| {
        let h = &deref(h)?.0;
        let triv = HModule::trivial(h, 0);
        let m = match read_str(name)? {
            "trivial" => triv,
            "regular" => HModule::regular(h, 0),
            "shift" => hmod::shift(&triv, 1).map_err(invalid)?,
            "unshift" => hmod::shift(&triv, -1).map_err(invalid)?,
            "augmentation" => hmod::augmentation_ideal(h).0,
            "zero" => HModule::zero(h),
            other => return Err((HopfoStatus::Invalid, format!("unknown module name {other}"))),
        };
        put(out, HopfoModule(m))
    })
}

/// Parses an H-module document.
///
/// # Safety
/// `text` must be a valid C string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hopfo_module_parse(text: *const c_char, out: *mut *mut HopfoModule) -> HopfoStatus {
    guard(|| {
        match doc::parse(read_str(text)?).map_err(invalid)? {
            Entity::HModule(m) => put(out, HopfoModule(m)),
            other => Err((HopfoStatus::Invalid, format!("expected an hmodule document, found {}", other.kind()))),
        }
    })
}

/// Serializes an H-module as a document.
///
/// # Safety
/// `m` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hopfo_module_serialize(m: *const HopfoModule, out: *mut *mut c_char) -> HopfoStatus {
    guard(|| {
        let m = &deref(m)?.0;
        put_string(out, doc::serialize(&Entity::HModule(m.clone())))
    })
}

/// # Safety
/// `m` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hopfo_module_free(m: *mut HopfoModule) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hopfo_module_dim(m: *const HopfoModule) -> usize {
    m.as_ref().map_or(0, |m| m.0.dim())
}

/// M ⊗ N.
///
/// # Safety
/// `a`, `b` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hopfo_module_tensor(
    a: *const HopfoModule,
    b: *const HopfoModule,
    out: *mut *mut HopfoModule,
) -> HopfoStatus {
    guard(|| {
        let t = hmod::tensor(&deref(a)?.0, &deref(b)?.0).map_err(invalid)?;
        put(out, HopfoModule(t))
    })
}

/// T(M) for `direction` = 1, T⁻¹(M) for −1.
///
/// # Safety
/// `m` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hopfo_module_shift(m: *const HopfoModule, direction: i32, out: *mut *mut HopfoModule) -> HopfoStatus {
    guard(|| {
        if direction != 1 && direction != -1 {
            return Err((HopfoStatus::Invalid, "direction must be 1 or -1".into()));
        }
        let t = hmod::shift(&deref(m)?.0, direction).map_err(invalid)?;
        put(out, HopfoModule(t))
    })
}

/// `Ok` when M is projective (stably zero), `False` otherwise.
///
/// # Safety
/// `m` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hopfo_module_is_projective(m: *const HopfoModule) -> HopfoStatus {
    guard(|| Ok(if hmod::is_projective(&deref(m)?.0) { HopfoStatus::Ok } else { HopfoStatus::False }))
}

/// Dimension of the stable invariants.
///
/// # Safety
/// `m` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hopfo_module_stable_invariants_dim(m: *const HopfoModule, out: *mut usize) -> HopfoStatus {
    guard(|| {
        let s = hmod::stable_invariants(&deref(m)?.0);
        if out.is_null() {
            return Err((HopfoStatus::NullArgument, "null out-parameter".into()));
        }
        *out = s.dim;
        Ok(HopfoStatus::Ok)
    })
}

/// The class of M in the Grothendieck ring, as a reduced polynomial.
///
/// # Safety
/// `m` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hopfo_module_k0_class(m: *const HopfoModule, out: *mut *mut c_char) -> HopfoStatus {
    guard(|| {
        let c = kzero::k0_class(&deref(m)?.0).map_err(|e| (HopfoStatus::Unsupported, e.to_string()))?;
        put_string(out, c.to_string())
    })
}

/// A catalog module algebra, e.g. "poly_pdg:3" or "path_a2@p_dg:3".
///
/// # Safety
/// `spec` must be a valid C string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hopfo_algebra_builtin(spec: *const c_char, out: *mut *mut HopfoAlgebra) -> HopfoStatus {
    guard(|| {
        let a = modalg::make_builtin_algebra(read_str(spec)?).map_err(invalid)?;
        put(out, HopfoAlgebra(a))
    })
}

/// # Safety
/// `a` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hopfo_algebra_free(a: *mut HopfoAlgebra) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// # Safety
/// `a` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hopfo_algebra_dim(a: *const HopfoAlgebra) -> usize {
    a.as_ref().map_or(0, |a| a.0.dim())
}

/// An element x with Λ·x = 1 when A is contractible (`Ok`); `False` and no string otherwise.
///
/// # Safety
/// `a` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hopfo_algebra_contractible(a: *const HopfoAlgebra, out: *mut *mut c_char) -> HopfoStatus {
    guard(|| {
        let a = &deref(a)?.0;
        match hopfomod::contractible_certificate(a) {
            Some(x) => put_string(out, format_combination(a.field(), a.algebra().labels(), &x)),
            None => Ok(HopfoStatus::False),
        }
    })
}
