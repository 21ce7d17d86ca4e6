//! Seeded random generators for modules and maps, used by property batteries and the CLI.

use rand::rngs::StdRng;
use rand::Rng;

use crate::exactla::{Field, Mat, Scalar};
use crate::hmod::{self, HModule};
use crate::hopfomod::{self, BModule};
use crate::modalg::ModuleAlgebra;
use crate::hopf::{BuiltinKind, HopfRef};

/// A small random field element (integers in −2..=2, plus ζ-multiples over cyclotomic fields).
pub fn scalar(f: &Field, rng: &mut StdRng) -> Scalar {
    let a = f.from_i64(rng.gen_range(-2..=2));
    match f.zeta() {
        Ok(z) if f.cyclotomic_modulus().len() > 2 && rng.gen_bool(0.3) => {
            let k = rng.gen_range(0..4u64);
            f.mul(&a, &f.pow(&z, k))
        }
        _ => a,
    }
}

pub fn nonzero_scalar(f: &Field, rng: &mut StdRng) -> Scalar {
    loop {
        let s = scalar(f, rng);
        if !f.is_zero(&s) {
            return s;
        }
    }
}

pub fn matrix(f: &Field, rows: usize, cols: usize, rng: &mut StdRng) -> Mat {
    Mat::from_fn(f, rows, cols, |_, _| scalar(f, rng))
}

/// Random invertible matrix preserving the given grading (block diagonal on degree pieces).
pub fn graded_automorphism(h: &HopfRef, grading: &[i64], rng: &mut StdRng) -> Mat {
    let f = h.field();
    let d = grading.len();
    let mut p = Mat::identity(f, d);
    for idx in hmod::degree_pieces(h, grading).values() {
        let k = idx.len();
        let blk = loop {
            let m = matrix(f, k, k, rng);
            if m.rank() == k {
                break m;
            }
        };
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                p.set(i, j, blk.get(a, b).clone());
            }
        }
    }
    p
}

/// Random homogeneous element of H.
pub fn homogeneous_element(h: &HopfRef, rng: &mut StdRng) -> Vec<Scalar> {
    let f = h.field();
    let pieces = hmod::degree_pieces(h, h.grading());
    let keys: Vec<&Vec<usize>> = pieces.values().collect();
    let idx = keys[rng.gen_range(0..keys.len())];
    let mut v = vec![f.zero(); h.dim()];
    for &i in idx {
        v[i] = scalar(f, rng);
    }
    v
}

/// A random indecomposable-ish building block.
fn piece(h: &HopfRef, rng: &mut StdRng) -> HModule {
    let f = h.field();
    let t = rng.gen_range(-2..=2);
    match rng.gen_range(0..5) {
        0 => HModule::trivial(h, t),
        1 => HModule::regular(h, t),
        2 | 3 if h.nilpotent_generator().is_some() => {
            let (_, n) = h.nilpotent_generator().expect("checked");
            let len = rng.gen_range(1..=n as usize);
            let w = rng.gen_range(0..n.max(1));
            hmod::chain_module(h, &[(len, t, w)]).expect("chain")
        }
        _ => {
            let x = homogeneous_element(h, rng);
            let reg = HModule::regular(h, t);
            let imgs = Mat::from_columns(f, h.dim(), &(0..h.dim()).map(|i| h.left_mult(i).apply(&x)).collect::<Vec<_>>());
            let piv = imgs.pivot_columns();
            if piv.is_empty() {
                return HModule::trivial(h, t);
            }
            let basis = imgs.select_columns(&piv);
            if rng.gen_bool(0.5) {
                let grading = (0..basis.cols())
                    .map(|c| {
                        let col = basis.column(c);
                        let i = col.iter().position(|s| !f.is_zero(s)).expect("nonzero");
                        reg.grading()[i]
                    })
                    .collect();
                reg.submodule(&basis, grading).expect("left ideal")
            } else {
                reg.quotient(&basis).expect("left ideal").0
            }
        }
    }
}

/// Random module of dimension at most `max_dim` (at least one block), randomly re-based.
pub fn module(h: &HopfRef, max_dim: usize, rng: &mut StdRng) -> HModule {
    let mut m = piece(h, rng);
    while m.dim() > max_dim {
        m = piece(h, rng);
    }
    for _ in 0..3 {
        let p = piece(h, rng);
        if m.dim() + p.dim() <= max_dim && rng.gen_bool(0.6) {
            m = m.direct_sum(&p).expect("same hopf");
        }
    }
    let p = graded_automorphism(h, m.grading(), rng);
    m.change_basis(&p, m.grading().to_vec()).expect("invertible")
}

/// A random H-linear map M → N (random combination of a basis of H-linear maps).
pub fn h_linear_map(m: &HModule, n: &HModule, rng: &mut StdRng) -> Mat {
    let f = m.field();
    let basis = hmod::h_linear_maps(m, n).expect("same hopf");
    let mut out = Mat::zeros(f, n.dim(), m.dim());
    for b in basis {
        out = out.add(&b.scale(&scalar(f, rng)));
    }
    out
}

/// Specs of every builtin exercised by the batteries.
pub fn builtin_specs() -> Vec<&'static str> {
    vec![
        "group:2", "group:3", "p_dg:2", "p_dg:3", "p_dg:5", "p_dg:3:ungraded", "exterior:1", "exterior:2", "taft:2",
        "taft:3",
    ]
}

/// Whether jordan_type / slash cohomology apply.
pub fn has_nilpotent_generator(h: &HopfRef) -> bool {
    matches!(
        h.kind(),
        Some(BuiltinKind::PDg { .. }) | Some(BuiltinKind::Exterior { gens: 1 }) | Some(BuiltinKind::Taft { .. })
    )
}

/// Random homogeneous element of a module algebra.
pub fn algebra_element(a: &ModuleAlgebra, rng: &mut StdRng) -> Vec<Scalar> {
    let h = a.hopf();
    let f = h.field();
    let pieces = hmod::degree_pieces(h, a.algebra().grading());
    let keys: Vec<&Vec<usize>> = pieces.values().collect();
    let idx = keys[rng.gen_range(0..keys.len())];
    let mut v = vec![f.zero(); a.dim()];
    for &i in idx {
        v[i] = scalar(f, rng);
    }
    v
}

/// A random B-module piece: A⊗V, or a cyclic sub/quotient of A (tensored with a small H-module).
fn bpiece(a: &ModuleAlgebra, max_dim: usize, rng: &mut StdRng) -> Option<BModule> {
    let h = a.hopf();
    let reg = BModule::regular(a);
    let v = if a.dim() == 1 { module(h, max_dim, rng) } else { module(h, (max_dim / a.dim()).max(1), rng) };
    let m = match rng.gen_range(0..3) {
        0 => BModule::free(a, &v).ok()?,
        1 if a.dim() == 1 => BModule::from_hmodule(a.clone(), v).ok()?,
        _ => {
            let x = algebra_element(a, rng);
            if x.iter().all(|s| h.field().is_zero(s)) {
                return None;
            }
            let sub = reg.generated(&[x]);
            let base = if rng.gen_bool(0.5) { reg.submodule(&sub).ok()?.0 } else { reg.quotient(&sub).ok()?.0 };
            if base.dim() == 0 {
                return None;
            }
            if rng.gen_bool(0.5) {
                base.tensor_h(&HModule::trivial(h, 0)).ok()?
            } else {
                base.tensor_h(&module(h, 2, rng)).ok()?
            }
        }
    };
    (m.dim() <= max_dim && m.dim() > 0).then_some(m.degree_shift(rng.gen_range(-1..=1)))
}

/// Random B-module of dimension at most `max_dim` (falls back to A itself if nothing smaller fits).
pub fn bmodule(a: &ModuleAlgebra, max_dim: usize, rng: &mut StdRng) -> BModule {
    let mut m = None;
    for _ in 0..20 {
        if let Some(p) = bpiece(a, max_dim, rng) {
            m = Some(p);
            break;
        }
    }
    let mut m = m.unwrap_or_else(|| BModule::regular(a));
    if let Some(p) = bpiece(a, max_dim.saturating_sub(m.dim()), rng) {
        if rng.gen_bool(0.5) {
            m = m.direct_sum(&p).expect("same algebra");
        }
    }
    let p = graded_automorphism(a.hopf(), m.grading(), rng);
    m.change_basis(&p, m.grading().to_vec()).expect("invertible")
}

/// A random degree-0 B-linear map M → N.
pub fn b_linear_map(m: &BModule, n: &BModule, rng: &mut StdRng) -> Mat {
    let f = m.field();
    let basis = hopfomod::degree_zero_maps(m, n).expect("same algebra");
    let mut out = Mat::zeros(f, n.dim(), m.dim());
    for b in basis {
        out = out.add(&b.scale(&scalar(f, rng)));
    }
    out
}
