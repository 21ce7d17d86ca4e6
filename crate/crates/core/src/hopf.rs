//! Finite-dimensional (graded, super) Hopf algebras given by structure constants.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::exactla::{Field, FieldSpec, LinAlgError, Mat, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HopfError {
    #[error("{0}")]
    LinAlg(#[from] LinAlgError),
    #[error("{0}")]
    Shape(String),
    #[error("invalid builtin: {0}")]
    Builtin(String),
    #[error("Hopf axioms fail: {}", .0.join("; "))]
    Axioms(Vec<String>),
    #[error("integral space has dimension {0}, expected 1")]
    Integral(usize),
    #[error("antipode is not invertible")]
    AntipodeSingular,
}

/// The builtin catalog.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BuiltinKind {
    /// Group algebra of ℤ/n.
    GroupAlgebra { n: u32 },
    /// Exterior algebra on `gens` odd primitive generators; `gens = 1` is k[d]/d².
    Exterior { gens: u32 },
    /// 𝔽ₚ[∂]/∂ᵖ, with deg ∂ = 1 when graded and 0 otherwise.
    PDg { p: u64, graded: bool },
    /// Taft algebra over ℚ[ζₙ].
    Taft { n: u32 },
}

impl fmt::Display for BuiltinKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinKind::GroupAlgebra { n } => write!(f, "group:{n}"),
            BuiltinKind::Exterior { gens } => write!(f, "exterior:{gens}"),
            BuiltinKind::PDg { p, graded: true } => write!(f, "p_dg:{p}"),
            BuiltinKind::PDg { p, graded: false } => write!(f, "p_dg:{p}:ungraded"),
            BuiltinKind::Taft { n } => write!(f, "taft:{n}"),
        }
    }
}

impl BuiltinKind {
    /// Parses "p_dg:3", "p_dg:3:ungraded", "taft:3", "group:2", "exterior:2", "dg" (= exterior:1).
    /// An optional "@FIELD" suffix selects the field for group and exterior algebras.
    pub fn parse(spec: &str) -> Result<(BuiltinKind, Option<FieldSpec>), HopfError> {
        let (body, field) = match spec.split_once('@') {
            Some((b, f)) => (b, Some(FieldSpec::parse(f)?)),
            None => (spec, None),
        };
        let bad = || HopfError::Builtin(spec.to_string());
        let parts: Vec<&str> = body.split(':').collect();
        let num = |i: usize| -> Result<u64, HopfError> { parts.get(i).and_then(|s| s.parse().ok()).ok_or_else(bad) };
        let kind = match parts[0] {
            "dg" => BuiltinKind::Exterior { gens: 1 },
            "group" | "group_algebra" => BuiltinKind::GroupAlgebra { n: num(1)? as u32 },
            "exterior" => BuiltinKind::Exterior { gens: num(1)? as u32 },
            "taft" => BuiltinKind::Taft { n: num(1)? as u32 },
            "p_dg" | "pdg" => {
                let graded = match parts.get(2) {
                    None | Some(&"graded") => true,
                    Some(&"ungraded") => false,
                    _ => return Err(bad()),
                };
                BuiltinKind::PDg { p: num(1)?, graded }
            }
            _ => return Err(bad()),
        };
        Ok((kind, field))
    }

    pub fn default_field(&self) -> Result<Field, HopfError> {
        Ok(match self {
            BuiltinKind::GroupAlgebra { .. } | BuiltinKind::Exterior { .. } => Field::rationals(),
            BuiltinKind::PDg { p, .. } => Field::prime(*p)?,
            BuiltinKind::Taft { n } => Field::cyclotomic(*n)?,
        })
    }
}

/// Raw structure data. Tables follow the "row = image of a basis element" layout:
/// `mult` is dim²×dim (row i·dim+j holds eᵢeⱼ), `comult` is dim×dim² (row i holds Δ(eᵢ)),
/// `antipode` is dim×dim (row i holds S(eᵢ)).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HopfData {
    pub field: Field,
    pub labels: Vec<String>,
    pub mult: Mat,
    pub unit: Vec<Scalar>,
    pub comult: Mat,
    pub counit: Vec<Scalar>,
    pub antipode: Mat,
    pub grading: Vec<i64>,
    pub grading_modulus: u32,
    pub is_super: bool,
}

type Sparse = Vec<(usize, Scalar)>;
type Sparse2 = Vec<(usize, usize, Scalar)>;

/// A verified Hopf algebra with cached integral and operator matrices.
#[derive(Clone, Debug)]
pub struct HopfAlgebra {
    data: HopfData,
    kind: Option<BuiltinKind>,
    products: Vec<Sparse>,
    coproducts: Vec<Sparse2>,
    left_mult: Vec<Mat>,
    antipode_op: Mat,
    antipode_inv_op: Mat,
    integral: Vec<Scalar>,
    preferred_scale: Scalar,
    cocommutative: bool,
    /// eᵢ = e_prefix · e_generator for builtins; None for the unit.
    words: Option<Vec<Option<(usize, usize)>>>,
}

impl PartialEq for HopfAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.data == other.data && self.integral == other.integral
    }
}
impl Eq for HopfAlgebra {}

pub type HopfRef = Arc<HopfAlgebra>;

fn nonzeros<'v>(f: &Field, v: &'v [Scalar]) -> Vec<(usize, &'v Scalar)> {
    v.iter().enumerate().filter(|(_, x)| !f.is_zero(x)).collect()
}

fn modded(d: i64, m: u32) -> i64 {
    if m == 0 {
        d
    } else {
        d.rem_euclid(m as i64)
    }
}

struct Tables<'a> {
    d: &'a HopfData,
    products: Vec<Sparse>,
    coproducts: Vec<Sparse2>,
}

impl<'a> Tables<'a> {
    fn new(d: &'a HopfData) -> Tables<'a> {
        let n = d.labels.len();
        let f = &d.field;
        let products = (0..n * n)
            .map(|r| (0..n).filter(|&k| !f.is_zero(d.mult.get(r, k))).map(|k| (k, d.mult.get(r, k).clone())).collect())
            .collect();
        let coproducts = (0..n)
            .map(|i| {
                (0..n * n)
                    .filter(|&c| !f.is_zero(d.comult.get(i, c)))
                    .map(|c| (c / n, c % n, d.comult.get(i, c).clone()))
                    .collect()
            })
            .collect();
        Tables { d, products, coproducts }
    }

    fn dim(&self) -> usize {
        self.d.labels.len()
    }

    fn parity(&self, i: usize) -> i64 {
        if self.d.is_super {
            self.d.grading[i].rem_euclid(2)
        } else {
            0
        }
    }

    fn mul(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        let f = &self.d.field;
        let n = self.dim();
        let mut out = vec![f.zero(); n];
        let bn = nonzeros(f, b);
        for (i, x) in nonzeros(f, a) {
            for &(j, y) in &bn {
                let xy = f.mul(x, y);
                for (k, c) in &self.products[i * n + j] {
                    out[*k] = f.add(&out[*k], &f.mul(&xy, c));
                }
            }
        }
        out
    }

    /// Product in H⊗H with the Koszul sign; vectors indexed by i·dim + j.
    fn mul2(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        let f = &self.d.field;
        let n = self.dim();
        let mut out = vec![f.zero(); n * n];
        let bn = nonzeros(f, b);
        for (ab, x) in nonzeros(f, a) {
            let (a1, a2) = (ab / n, ab % n);
            for &(cd, y) in &bn {
                let (c1, c2) = (cd / n, cd % n);
                let mut coef = f.mul(x, y);
                if self.parity(a2) * self.parity(c1) % 2 == 1 {
                    coef = f.neg(&coef);
                }
                for (k1, u) in &self.products[a1 * n + c1] {
                    for (k2, v) in &self.products[a2 * n + c2] {
                        let i = k1 * n + k2;
                        out[i] = f.add(&out[i], &f.mul(&coef, &f.mul(u, v)));
                    }
                }
            }
        }
        out
    }

    fn basis(&self, i: usize) -> Vec<Scalar> {
        let f = &self.d.field;
        let mut v = vec![f.zero(); self.dim()];
        v[i] = f.one();
        v
    }

    fn comult_vec(&self, a: &[Scalar]) -> Vec<Scalar> {
        let f = &self.d.field;
        let n = self.dim();
        let mut out = vec![f.zero(); n * n];
        for (i, x) in a.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (j, k, c) in &self.coproducts[i] {
                out[j * n + k] = f.add(&out[j * n + k], &f.mul(x, c));
            }
        }
        out
    }

    fn apply_rows(&self, table: &Mat, a: &[Scalar]) -> Vec<Scalar> {
        // table rows are images of basis elements
        table.transpose().apply(a)
    }
}

/// Checks all Hopf algebra axioms; returns the names of failed ones (empty = pass).
pub fn verify_hopf(d: &HopfData) -> Vec<String> {
    let mut fails = Vec::new();
    let n = d.labels.len();
    let f = &d.field;
    if d.mult.rows() != n * n || d.mult.cols() != n {
        fails.push("mult shape".to_string());
    }
    if d.comult.rows() != n || d.comult.cols() != n * n {
        fails.push("comult shape".to_string());
    }
    if d.antipode.rows() != n || d.antipode.cols() != n {
        fails.push("antipode shape".to_string());
    }
    if d.unit.len() != n || d.counit.len() != n || d.grading.len() != n {
        fails.push("vector shape".to_string());
    }
    if !fails.is_empty() {
        return fails;
    }
    let t = Tables::new(d);
    let e = |i: usize| t.basis(i);
    let modu = d.grading_modulus;
    let deg_eq = |a: i64, b: i64| modded(a, modu) == modded(b, modu);

    // homogeneity
    let mut homog = true;
    for i in 0..n {
        for j in 0..n {
            for (k, _) in &t.products[i * n + j] {
                homog &= deg_eq(d.grading[*k], d.grading[i] + d.grading[j]);
            }
        }
        for (j, k, _) in &t.coproducts[i] {
            homog &= deg_eq(d.grading[*j] + d.grading[*k], d.grading[i]);
        }
        if !f.is_zero(&d.counit[i]) {
            homog &= deg_eq(d.grading[i], 0);
        }
        if !f.is_zero(&d.unit[i]) {
            homog &= deg_eq(d.grading[i], 0);
        }
        for k in 0..n {
            if !f.is_zero(d.antipode.get(i, k)) {
                homog &= deg_eq(d.grading[k], d.grading[i]);
            }
        }
    }
    if !homog {
        fails.push("homogeneity".to_string());
    }

    // associativity
    let mut assoc = true;
    'a: for i in 0..n {
        for j in 0..n {
            let ij = t.mul(&e(i), &e(j));
            for k in 0..n {
                let l = t.mul(&ij, &e(k));
                let r = t.mul(&e(i), &t.mul(&e(j), &e(k)));
                if l != r {
                    assoc = false;
                    break 'a;
                }
            }
        }
    }
    if !assoc {
        fails.push("associativity".to_string());
    }

    // unit
    if (0..n).any(|i| t.mul(&d.unit, &e(i)) != e(i) || t.mul(&e(i), &d.unit) != e(i)) {
        fails.push("unit".to_string());
    }

    // coassociativity: (Δ⊗id)Δ = (id⊗Δ)Δ, compared in H⊗H⊗H with index (a·n+b)·n+c
    let mut coassoc = true;
    for i in 0..n {
        let mut l = vec![f.zero(); n * n * n];
        let mut r = vec![f.zero(); n * n * n];
        for (a, b, c) in &t.coproducts[i] {
            for (x, y, u) in &t.coproducts[*a] {
                let idx = (x * n + y) * n + b;
                l[idx] = f.add(&l[idx], &f.mul(c, u));
            }
            for (x, y, u) in &t.coproducts[*b] {
                let idx = (a * n + x) * n + y;
                r[idx] = f.add(&r[idx], &f.mul(c, u));
            }
        }
        if l != r {
            coassoc = false;
            break;
        }
    }
    if !coassoc {
        fails.push("coassociativity".to_string());
    }

    // counit
    let mut counit_ok = true;
    for i in 0..n {
        let mut l = vec![f.zero(); n];
        let mut r = vec![f.zero(); n];
        for (a, b, c) in &t.coproducts[i] {
            l[*b] = f.add(&l[*b], &f.mul(c, &d.counit[*a]));
            r[*a] = f.add(&r[*a], &f.mul(c, &d.counit[*b]));
        }
        if l != e(i) || r != e(i) {
            counit_ok = false;
        }
    }
    if !counit_ok {
        fails.push("counit".to_string());
    }

    // Δ algebra map
    let mut dalg = t.comult_vec(&d.unit) == {
        let mut u = vec![f.zero(); n * n];
        for (i, x) in d.unit.iter().enumerate() {
            for (j, y) in d.unit.iter().enumerate() {
                u[i * n + j] = f.mul(x, y);
            }
        }
        u
    };
    'd: for i in 0..n {
        for j in 0..n {
            let l = t.comult_vec(&t.mul(&e(i), &e(j)));
            let r = t.mul2(&t.comult_vec(&e(i)), &t.comult_vec(&e(j)));
            if l != r {
                dalg = false;
                break 'd;
            }
        }
    }
    if !dalg {
        fails.push("Δ algebra map".to_string());
    }

    // ε algebra map
    let eps = |v: &[Scalar]| -> Scalar {
        v.iter().zip(&d.counit).fold(f.zero(), |acc, (x, y)| f.add(&acc, &f.mul(x, y)))
    };
    let mut ealg = f.is_one(&eps(&d.unit));
    for i in 0..n {
        for j in 0..n {
            ealg &= eps(&t.mul(&e(i), &e(j))) == f.mul(&d.counit[i], &d.counit[j]);
        }
    }
    if !ealg {
        fails.push("ε algebra map".to_string());
    }

    // antipode
    let mut anti = true;
    for i in 0..n {
        let mut l = vec![f.zero(); n];
        let mut r = vec![f.zero(); n];
        for (a, b, c) in &t.coproducts[i] {
            let sa = t.apply_rows(&d.antipode, &e(*a));
            let sb = t.apply_rows(&d.antipode, &e(*b));
            let x = t.mul(&sa, &e(*b));
            let y = t.mul(&e(*a), &sb);
            for k in 0..n {
                l[k] = f.add(&l[k], &f.mul(c, &x[k]));
                r[k] = f.add(&r[k], &f.mul(c, &y[k]));
            }
        }
        let want: Vec<Scalar> = d.unit.iter().map(|u| f.mul(u, &d.counit[i])).collect();
        if l != want || r != want {
            anti = false;
            break;
        }
    }
    if !anti {
        fails.push("antipode".to_string());
    }
    fails
}

impl HopfAlgebra {
    /// Verifies the data and computes the cached integral.
    pub fn from_data(data: HopfData) -> Result<HopfAlgebra, HopfError> {
        let fails = verify_hopf(&data);
        if !fails.is_empty() {
            return Err(HopfError::Axioms(fails));
        }
        let f = data.field.clone();
        let n = data.labels.len();
        let (products, coproducts) = {
            let t = Tables::new(&data);
            (t.products, t.coproducts)
        };
        let left_mult = (0..n)
            .map(|i| {
                let mut m = Mat::zeros(&f, n, n);
                for j in 0..n {
                    for (k, c) in &products[i * n + j] {
                        m.set(*k, j, c.clone());
                    }
                }
                m
            })
            .collect::<Vec<_>>();
        let antipode_op = data.antipode.transpose();
        let antipode_inv_op = antipode_op.inverse().ok_or(HopfError::AntipodeSingular)?;
        let mut h = HopfAlgebra {
            data,
            kind: None,
            products,
            coproducts,
            left_mult,
            antipode_op,
            antipode_inv_op,
            integral: Vec::new(),
            preferred_scale: f.one(),
            cocommutative: false,
            words: None,
        };
        h.integral = h.solve_integral()?;
        h.cocommutative = h.check_cocommutative();
        Ok(h)
    }

    fn solve_integral(&self) -> Result<Vec<Scalar>, HopfError> {
        let f = self.field();
        let n = self.dim();
        let blocks: Vec<Mat> = (0..n)
            .map(|i| self.left_mult[i].sub(&Mat::identity(f, n).scale(&self.data.counit[i])))
            .collect();
        let sys = Mat::vstack_all(f, n, &blocks);
        let ns = sys.nullspace();
        if ns.cols() != 1 {
            return Err(HopfError::Integral(ns.cols()));
        }
        let v = ns.column(0);
        let first = v.iter().find(|x| !f.is_zero(x)).expect("nonzero kernel vector").clone();
        let inv = f.inv(&first).expect("nonzero");
        Ok(v.iter().map(|x| f.mul(x, &inv)).collect())
    }

    fn check_cocommutative(&self) -> bool {
        let f = self.field();
        let n = self.dim();
        (0..n).all(|i| {
            let mut a = vec![f.zero(); n * n];
            let mut b = vec![f.zero(); n * n];
            for (j, k, c) in &self.coproducts[i] {
                a[j * n + k] = f.add(&a[j * n + k], c);
                let c2 = if self.parity(*j) * self.parity(*k) == 1 { f.neg(c) } else { c.clone() };
                b[k * n + j] = f.add(&b[k * n + j], &c2);
            }
            a == b
        })
    }

    pub fn data(&self) -> &HopfData {
        &self.data
    }
    pub fn field(&self) -> &Field {
        &self.data.field
    }
    pub fn dim(&self) -> usize {
        self.data.labels.len()
    }
    pub fn labels(&self) -> &[String] {
        &self.data.labels
    }
    pub fn kind(&self) -> Option<&BuiltinKind> {
        self.kind.as_ref()
    }
    pub fn is_super(&self) -> bool {
        self.data.is_super
    }
    pub fn grading(&self) -> &[i64] {
        &self.data.grading
    }
    pub fn degree(&self, i: usize) -> i64 {
        self.data.grading[i]
    }
    pub fn grading_modulus(&self) -> u32 {
        self.data.grading_modulus
    }
    /// Degree reduced by the grading modulus.
    pub fn reduce_degree(&self, d: i64) -> i64 {
        modded(d, self.data.grading_modulus)
    }
    pub fn degrees_equal(&self, a: i64, b: i64) -> bool {
        self.reduce_degree(a) == self.reduce_degree(b)
    }
    /// Parity of a degree (always 0 unless super).
    pub fn parity_of_degree(&self, d: i64) -> i64 {
        if self.data.is_super {
            d.rem_euclid(2)
        } else {
            0
        }
    }
    pub fn parity(&self, i: usize) -> i64 {
        self.parity_of_degree(self.data.grading[i])
    }
    pub fn is_cocommutative(&self) -> bool {
        self.cocommutative
    }
    pub fn unit(&self) -> &[Scalar] {
        &self.data.unit
    }
    pub fn counit(&self, i: usize) -> &Scalar {
        &self.data.counit[i]
    }
    pub fn counit_of(&self, x: &[Scalar]) -> Scalar {
        let f = self.field();
        x.iter().zip(&self.data.counit).fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
    }
    /// Nonzero terms (j, k, c) of Δ(eᵢ) = Σ c·eⱼ⊗e_k.
    pub fn coproduct(&self, i: usize) -> &[(usize, usize, Scalar)] {
        &self.coproducts[i]
    }
    /// Nonzero terms (k, c) of eᵢeⱼ.
    pub fn product(&self, i: usize, j: usize) -> &[(usize, Scalar)] {
        &self.products[i * self.dim() + j]
    }
    /// Left multiplication by eᵢ as an operator matrix (column j = eᵢeⱼ).
    pub fn left_mult(&self, i: usize) -> &Mat {
        &self.left_mult[i]
    }
    pub fn left_mults(&self) -> &[Mat] {
        &self.left_mult
    }
    /// S as an operator matrix (column i = S(eᵢ)).
    pub fn antipode_op(&self) -> &Mat {
        &self.antipode_op
    }
    pub fn antipode_inv_op(&self) -> &Mat {
        &self.antipode_inv_op
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Scalar> {
        let f = self.field();
        let mut v = vec![f.zero(); self.dim()];
        v[i] = f.one();
        v
    }

    pub fn mul_elements(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        Tables { d: &self.data, products: self.products.clone(), coproducts: Vec::new() }.mul(a, b)
    }

    /// The cached left integral, normalized so its first nonzero coordinate is 1.
    pub fn integral(&self) -> &[Scalar] {
        &self.integral
    }

    /// The builtin's preferred integral: `preferred_scale` times the normalized one.
    pub fn preferred_integral(&self) -> Vec<Scalar> {
        let f = self.field();
        self.integral.iter().map(|x| f.mul(x, &self.preferred_scale)).collect()
    }
    pub fn preferred_scale(&self) -> &Scalar {
        &self.preferred_scale
    }

    /// Copy of this algebra whose cached integral is multiplied by `c` (nonzero).
    pub fn with_integral_scaled(&self, c: &Scalar) -> HopfAlgebra {
        let f = self.field().clone();
        assert!(!f.is_zero(c), "integral rescaled by zero");
        let mut h = self.clone();
        h.integral = self.integral.iter().map(|x| f.mul(x, c)).collect();
        h.preferred_scale = f.div(&self.preferred_scale, c).expect("nonzero");
        h
    }

    /// Degree of the (homogeneous) integral.
    pub fn integral_degree(&self) -> i64 {
        let f = self.field();
        let i = self.integral.iter().position(|x| !f.is_zero(x)).expect("nonzero integral");
        self.data.grading[i]
    }

    /// Index of the basis element at which Λ is pivoted when completing it to a basis of H.
    pub fn integral_pivot(&self) -> usize {
        let f = self.field();
        self.integral.iter().position(|x| !f.is_zero(x)).expect("nonzero integral")
    }

    /// Basis indices of algebra generators (all basis elements when no word data is known).
    pub fn generators(&self) -> Vec<usize> {
        match &self.words {
            Some(w) => {
                let mut g: Vec<usize> = w.iter().flatten().map(|&(_, g)| g).collect();
                g.sort_unstable();
                g.dedup();
                g
            }
            None => (0..self.dim()).collect(),
        }
    }

    /// Words expressing each basis element as prefix times generator, when known.
    pub fn words(&self) -> Option<&[Option<(usize, usize)>]> {
        self.words.as_deref()
    }

    /// Extends generator operators to all basis elements using the words, or evaluates `op` on every basis element.
    pub fn extend_from_generators(&self, dim: usize, mut op: impl FnMut(usize) -> Mat) -> Vec<Mat> {
        let n = self.dim();
        match &self.words {
            Some(words) => {
                let gens = self.generators();
                let mut gen_ops: Vec<Option<Mat>> = vec![None; n];
                for g in gens {
                    gen_ops[g] = Some(op(g));
                }
                let mut out: Vec<Option<Mat>> = vec![None; n];
                let mut remaining = n;
                while remaining > 0 {
                    for i in 0..n {
                        if out[i].is_some() {
                            continue;
                        }
                        match words[i] {
                            None => {
                                out[i] = Some(Mat::identity(self.field(), dim));
                                remaining -= 1;
                            }
                            Some((pre, g)) => {
                                if let Some(p) = &out[pre] {
                                    out[i] = Some(p.mul(gen_ops[g].as_ref().expect("generator")));
                                    remaining -= 1;
                                }
                            }
                        }
                    }
                }
                out.into_iter().map(|m| m.expect("resolved")).collect()
            }
            None => (0..n).map(op).collect(),
        }
    }

    /// For kinds generated by one nilpotent element ∂ with ∂^N = 0: (basis index of ∂, N).
    pub fn nilpotent_generator(&self) -> Option<(usize, u32)> {
        match self.kind.as_ref()? {
            BuiltinKind::PDg { p, .. } => Some((1, *p as u32)),
            BuiltinKind::Exterior { gens: 1 } => Some((1, 2)),
            BuiltinKind::Taft { n } => Some((1, *n)),
            _ => None,
        }
    }

    /// Human-readable linear combination of basis labels.
    pub fn format_element(&self, v: &[Scalar]) -> String {
        format_combination(self.field(), &self.data.labels, v)
    }

    /// ε(Λ) for the normalized integral.
    pub fn counit_of_integral(&self) -> Scalar {
        self.counit_of(&self.integral)
    }
}

/// Renders Σ cᵢ·labelᵢ, omitting unit coefficients.
pub fn format_combination(f: &Field, labels: &[String], v: &[Scalar]) -> String {
    let mut out = String::new();
    for (i, c) in v.iter().enumerate() {
        if f.is_zero(c) {
            continue;
        }
        let cs = f.format(c);
        let is_unit_label = labels[i] == "1";
        let (neg, body) = if let Some(rest) = cs.strip_prefix('-') {
            if !rest.contains(' ') {
                (true, rest.to_string())
            } else {
                (false, format!("({cs})"))
            }
        } else if cs.contains(' ') {
            (false, format!("({cs})"))
        } else {
            (false, cs)
        };
        let term = if is_unit_label {
            body
        } else if body == "1" {
            labels[i].clone()
        } else {
            format!("{body} {}", labels[i])
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&term);
    }
    if out.is_empty() {
        "0".to_string()
    } else {
        out
    }
}

/// Builds a builtin Hopf algebra over its default field.
pub fn make_builtin(kind: BuiltinKind) -> Result<HopfAlgebra, HopfError> {
    let f = kind.default_field()?;
    make_builtin_over(kind, &f)
}

/// Parses a builtin spec string such as "p_dg:3" or "exterior:2@F3" and builds it.
pub fn builtin_from_spec(spec: &str) -> Result<HopfAlgebra, HopfError> {
    let (kind, fs) = BuiltinKind::parse(spec)?;
    match fs {
        Some(fs) => make_builtin_over(kind, &Field::new(fs)?),
        None => make_builtin(kind),
    }
}

struct Builder {
    field: Field,
    labels: Vec<String>,
    grading: Vec<i64>,
    is_super: bool,
    modulus: u32,
    mult: Mat,
}

impl Builder {
    fn new(field: &Field, labels: Vec<String>, grading: Vec<i64>, is_super: bool, modulus: u32) -> Builder {
        let n = labels.len();
        Builder { field: field.clone(), labels, grading, is_super, modulus, mult: Mat::zeros(field, n * n, n) }
    }

    fn data(&self, unit: Vec<Scalar>, comult: Mat, counit: Vec<Scalar>, antipode: Mat) -> HopfData {
        HopfData {
            field: self.field.clone(),
            labels: self.labels.clone(),
            mult: self.mult.clone(),
            unit,
            comult,
            counit,
            antipode,
            grading: self.grading.clone(),
            grading_modulus: self.modulus,
            is_super: self.is_super,
        }
    }

    /// Extends Δ and S from generators along words: word[i] = (prefix basis index, generator index),
    /// meaning eᵢ = e_prefix · gen. Word for the unit is None.
    fn extend(
        &self,
        unit_idx: usize,
        words: &[Option<(usize, usize)>],
        gen_comult: &[Vec<Scalar>],
        gen_antipode: &[Vec<Scalar>],
    ) -> (Mat, Mat) {
        let f = &self.field;
        let n = self.labels.len();
        let tmp = self.data(vec![f.zero(); n], Mat::zeros(f, n, n * n), vec![f.zero(); n], Mat::zeros(f, n, n));
        let t = Tables::new(&tmp);
        let mut comult: Vec<Option<Vec<Scalar>>> = vec![None; n];
        let mut anti: Vec<Option<Vec<Scalar>>> = vec![None; n];
        let mut one2 = vec![f.zero(); n * n];
        one2[unit_idx * n + unit_idx] = f.one();
        comult[unit_idx] = Some(one2);
        anti[unit_idx] = Some(t.basis(unit_idx));
        // words are resolvable in index order by construction
        let mut progress = true;
        while progress {
            progress = false;
            for i in 0..n {
                if comult[i].is_some() {
                    continue;
                }
                let (pre, g) = words[i].expect("word");
                if let (Some(cp), Some(sp)) = (&comult[pre], &anti[pre]) {
                    comult[i] = Some(t.mul2(cp, &gen_comult[g]));
                    // S(x·g) = (−1)^{|x||g|} S(g)S(x)
                    let mut s = t.mul(&gen_antipode[g], sp);
                    if t.parity(pre) * t.parity(g) == 1 {
                        s = s.iter().map(|x| f.neg(x)).collect();
                    }
                    anti[i] = Some(s);
                    progress = true;
                }
            }
        }
        let comult_rows: Vec<Vec<Scalar>> = comult.into_iter().map(|c| c.expect("resolved")).collect();
        let anti_rows: Vec<Vec<Scalar>> = anti.into_iter().map(|c| c.expect("resolved")).collect();
        (Mat::from_rows(f, comult_rows).expect("rect"), Mat::from_rows(f, anti_rows).expect("rect"))
    }
}

fn unit_vec(f: &Field, n: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![f.zero(); n];
    v[i] = f.one();
    v
}

/// Builds a builtin over an explicit field (checked against the kind's constraints).
pub fn make_builtin_over(kind: BuiltinKind, f: &Field) -> Result<HopfAlgebra, HopfError> {
    let bad = |m: &str| HopfError::Builtin(format!("{kind}: {m}"));
    let mut preferred_scale = f.one();
    let word_list: Vec<Option<(usize, usize)>>;
    let data = match &kind {
        BuiltinKind::GroupAlgebra { n } => {
            let n = *n as usize;
            if n == 0 {
                return Err(bad("group order must be positive"));
            }
            let labels: Vec<String> = (0..n)
                .map(|i| match i {
                    0 => "1".to_string(),
                    1 => "g".to_string(),
                    _ => format!("g^{i}"),
                })
                .collect();
            let mut b = Builder::new(f, labels, vec![0; n], false, 0);
            for i in 0..n {
                for j in 0..n {
                    b.mult.set(i * n + j, (i + j) % n, f.one());
                }
            }
            let mut comult = Mat::zeros(f, n, n * n);
            let mut anti = Mat::zeros(f, n, n);
            for i in 0..n {
                comult.set(i, i * n + i, f.one());
                anti.set(i, (n - i) % n, f.one());
            }
            word_list = (0..n).map(|i| if i == 0 { None } else { Some((i - 1, 1 % n)) }).collect();
            b.data(unit_vec(f, n, 0), comult, vec![f.one(); n], anti)
        }
        BuiltinKind::Exterior { gens } => {
            let m = *gens as usize;
            if m == 0 || m > 6 {
                return Err(bad("between 1 and 6 generators supported"));
            }
            if f.characteristic() == 2 {
                return Err(bad("characteristic 2 not supported for super algebras"));
            }
            let n = 1usize << m;
            let labels: Vec<String> = (0..n)
                .map(|s: usize| {
                    if s == 0 {
                        "1".to_string()
                    } else if m == 1 {
                        "d".to_string()
                    } else {
                        (0..m).filter(|k| s >> k & 1 == 1).map(|k| format!("v{}", k + 1)).collect::<Vec<_>>().join("∧")
                    }
                })
                .collect();
            let grading = (0..n).map(|s: usize| s.count_ones() as i64).collect();
            let mut b = Builder::new(f, labels, grading, true, 0);
            for s in 0..n {
                for t in 0..n {
                    if s & t != 0 {
                        continue;
                    }
                    // sign of moving the letters of t past the larger letters of s
                    let mut inv = 0;
                    for a in 0..m {
                        if s >> a & 1 == 1 {
                            inv += (0..a).filter(|bb| t >> bb & 1 == 1).count();
                        }
                    }
                    let c = if inv % 2 == 1 { f.from_i64(-1) } else { f.one() };
                    b.mult.set(s * n + t, s | t, c);
                }
            }
            // word: e_S = e_{S minus top letter} · v_top
            let words: Vec<Option<(usize, usize)>> = (0..n)
                .map(|s: usize| {
                    if s == 0 {
                        None
                    } else {
                        let top = usize::BITS - 1 - s.leading_zeros();
                        Some((s & !(1 << top), 1usize << top))
                    }
                })
                .collect();
            let mut gen_c = vec![Vec::new(); n];
            let mut gen_s = vec![Vec::new(); n];
            for k in 0..m {
                let g = 1 << k;
                let mut c = vec![f.zero(); n * n];
                c[g * n] = f.one();
                c[g] = f.one();
                gen_c[g] = c;
                let mut s = vec![f.zero(); n];
                s[g] = f.from_i64(-1);
                gen_s[g] = s;
            }
            let (comult, anti) = b.extend(0, &words, &gen_c, &gen_s);
            word_list = words.clone();
            b.data(unit_vec(f, n, 0), comult, unit_vec(f, n, 0), anti)
        }
        BuiltinKind::PDg { p, graded } => {
            if *f.spec() != FieldSpec::Prime(*p) {
                return Err(bad("p_dg requires the prime field of the same characteristic"));
            }
            let n = *p as usize;
            let labels: Vec<String> = (0..n)
                .map(|i| match i {
                    0 => "1".to_string(),
                    1 => "∂".to_string(),
                    _ => format!("∂^{i}"),
                })
                .collect();
            let grading = (0..n).map(|i| if *graded { i as i64 } else { 0 }).collect();
            let mut b = Builder::new(f, labels, grading, false, 0);
            for i in 0..n {
                for j in 0..n {
                    if i + j < n {
                        b.mult.set(i * n + j, i + j, f.one());
                    }
                }
            }
            let words: Vec<Option<(usize, usize)>> = (0..n).map(|i| if i == 0 { None } else { Some((i - 1, 1)) }).collect();
            let mut gen_c = vec![Vec::new(); n];
            let mut gen_s = vec![Vec::new(); n];
            if n > 1 {
                let mut c = vec![f.zero(); n * n];
                c[n] = f.one();
                c[1] = f.one();
                gen_c[1] = c;
                let mut s = vec![f.zero(); n];
                s[1] = f.from_i64(-1);
                gen_s[1] = s;
            }
            let (comult, anti) = b.extend(0, &words, &gen_c, &gen_s);
            word_list = words.clone();
            b.data(unit_vec(f, n, 0), comult, unit_vec(f, n, 0), anti)
        }
        BuiltinKind::Taft { n } => {
            if *f.spec() != FieldSpec::Cyclotomic(*n) {
                return Err(bad("taft(n) requires the cyclotomic field of order n"));
            }
            if *n < 2 {
                return Err(bad("taft needs n ≥ 2"));
            }
            let nn = *n as usize;
            let dim = nn * nn;
            let idx = |i: usize, j: usize| i * nn + j;
            let z = f.zeta()?;
            let labels: Vec<String> = (0..dim)
                .map(|x| {
                    let (i, j) = (x / nn, x % nn);
                    let k = match i {
                        0 => String::new(),
                        1 => "K".to_string(),
                        _ => format!("K^{i}"),
                    };
                    let d = match j {
                        0 => String::new(),
                        1 => "d".to_string(),
                        _ => format!("d^{j}"),
                    };
                    match (k.is_empty(), d.is_empty()) {
                        (true, true) => "1".to_string(),
                        (false, true) => k,
                        (true, false) => d,
                        (false, false) => format!("{k} {d}"),
                    }
                })
                .collect();
            let grading = (0..dim).map(|x| (x % nn) as i64).collect();
            let mut b = Builder::new(f, labels, grading, false, *n);
            // (Kⁱdʲ)(K^k d^l) = ζ^{−jk} K^{i+k} d^{j+l}
            for a in 0..dim {
                for c in 0..dim {
                    let (i, j) = (a / nn, a % nn);
                    let (k, l) = (c / nn, c % nn);
                    if j + l >= nn {
                        continue;
                    }
                    let e = ((nn * nn) - (j * k) % nn) % nn;
                    b.mult.set(a * dim + c, idx((i + k) % nn, j + l), f.pow(&z, e as u64));
                }
            }
            let (gk, gd) = (idx(1, 0), idx(0, 1));
            let words: Vec<Option<(usize, usize)>> = (0..dim)
                .map(|x| {
                    let (i, j) = (x / nn, x % nn);
                    if j > 0 {
                        Some((idx(i, j - 1), gd))
                    } else if i > 0 {
                        Some((idx(i - 1, 0), gk))
                    } else {
                        None
                    }
                })
                .collect();
            let mut gen_c = vec![Vec::new(); dim];
            let mut gen_s = vec![Vec::new(); dim];
            let mut ck = vec![f.zero(); dim * dim];
            ck[gk * dim + gk] = f.one();
            gen_c[gk] = ck;
            let mut cd = vec![f.zero(); dim * dim];
            cd[gd * dim] = f.one();
            cd[gk * dim + gd] = f.one();
            gen_c[gd] = cd;
            // S(K) = K^{n−1}, S(d) = −K^{−1}d
            gen_s[gk] = unit_vec(f, dim, idx(nn - 1, 0));
            let mut sd = vec![f.zero(); dim];
            sd[idx(nn - 1, 1)] = f.from_i64(-1);
            gen_s[gd] = sd;
            let (comult, anti) = b.extend(0, &words, &gen_c, &gen_s);
            word_list = words.clone();
            let counit = (0..dim).map(|x| if x % nn == 0 { f.one() } else { f.zero() }).collect();
            preferred_scale = f.inv(&f.from_i64(*n as i64)).expect("char 0");
            b.data(unit_vec(f, dim, 0), comult, counit, anti)
        }
    };
    let mut h = HopfAlgebra::from_data(data)?;
    h.kind = Some(kind);
    h.words = Some(word_list);
    h.preferred_scale = preferred_scale;
    Ok(h)
}

impl HopfAlgebra {
    /// Marks this algebra as a builtin of the given kind when its data matches the catalog entry.
    pub fn recognize_builtin(mut self, kind: BuiltinKind) -> Result<HopfAlgebra, HopfError> {
        let b = make_builtin_over(kind.clone(), self.field())?;
        if b.data != self.data {
            return Err(HopfError::Builtin(format!("data does not match builtin {kind}")));
        }
        self.kind = Some(kind);
        self.preferred_scale = b.preferred_scale;
        self.words = b.words;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_small_builtins() -> Vec<HopfAlgebra> {
        let mut v = Vec::new();
        for n in [2, 3, 4] {
            v.push(make_builtin(BuiltinKind::GroupAlgebra { n }).unwrap());
            v.push(make_builtin(BuiltinKind::Taft { n }).unwrap());
        }
        for g in [1, 2, 3] {
            v.push(make_builtin(BuiltinKind::Exterior { gens: g }).unwrap());
        }
        for p in [2, 3, 5] {
            v.push(make_builtin(BuiltinKind::PDg { p, graded: true }).unwrap());
            v.push(make_builtin(BuiltinKind::PDg { p, graded: false }).unwrap());
        }
        v
    }

    #[test]
    fn builtins_pass_and_integrals_are_integrals() {
        for h in all_small_builtins() {
            assert!(verify_hopf(h.data()).is_empty(), "{:?}", h.kind());
            let f = h.field();
            for i in 0..h.dim() {
                let l = h.mul_elements(&h.basis_vector(i), h.integral());
                let r: Vec<Scalar> = h.integral().iter().map(|x| f.mul(x, h.counit(i))).collect();
                assert_eq!(l, r);
            }
            // S² = id for cocommutative or super builtins
            if h.is_cocommutative() {
                assert!(h.antipode_op().mul(h.antipode_op()).is_identity());
            }
        }
    }

    #[test]
    fn pdg3_shape() {
        let h = make_builtin(BuiltinKind::PDg { p: 3, graded: true }).unwrap();
        assert_eq!(h.dim(), 3);
        assert_eq!(h.format_element(h.integral()), "∂^2");
        assert_eq!(h.integral_degree(), 2);
        assert!(h.field().is_zero(&h.counit_of_integral()));
    }

    #[test]
    fn taft2_relations() {
        let h = make_builtin(BuiltinKind::Taft { n: 2 }).unwrap();
        assert_eq!(h.dim(), 4);
        let f = h.field();
        let k = h.basis_vector(2);
        let d = h.basis_vector(1);
        assert_eq!(h.mul_elements(&k, &k), h.basis_vector(0));
        assert!(h.mul_elements(&d, &d).iter().all(|x| f.is_zero(x)));
        let kd = h.mul_elements(&k, &d);
        let dk = h.mul_elements(&d, &k);
        assert_eq!(kd, dk.iter().map(|x| f.neg(x)).collect::<Vec<_>>());
        assert!(!h.is_cocommutative());
    }

    #[test]
    fn group_integral() {
        let h = make_builtin(BuiltinKind::GroupAlgebra { n: 2 }).unwrap();
        assert_eq!(h.format_element(h.integral()), "1 + g");
        let c = h.coproduct(1);
        assert_eq!(c, &[(1, 1, h.field().one())]);
        assert_eq!(h.antipode_op().column(1), h.basis_vector(1));
    }

    #[test]
    fn taft_integral_preferred_form() {
        for n in [2u32, 3, 4] {
            let h = make_builtin(BuiltinKind::Taft { n }).unwrap();
            let f = h.field();
            let nn = n as usize;
            let inv_n = f.inv(&f.from_i64(n as i64)).unwrap();
            let want: Vec<Scalar> =
                (0..nn * nn).map(|x| if x % nn == nn - 1 { inv_n.clone() } else { f.zero() }).collect();
            assert_eq!(h.preferred_integral(), want);
        }
    }

    #[test]
    fn broken_antipode_detected() {
        let h = make_builtin(BuiltinKind::PDg { p: 3, graded: true }).unwrap();
        let mut d = h.data().clone();
        let f = d.field.clone();
        d.antipode.set(1, 1, f.one());
        assert!(verify_hopf(&d).contains(&"antipode".to_string()));
    }

    #[test]
    fn untwisted_taft_comult_fails() {
        let h = make_builtin(BuiltinKind::Taft { n: 3 }).unwrap();
        let mut d = h.data().clone();
        let f = d.field.clone();
        let n = 9;
        // Δ(d) = d⊗1 + 1⊗d instead of d⊗1 + K⊗d
        d.comult.set(1, 3 * n + 1, f.zero());
        d.comult.set(1, 1, f.one());
        assert!(verify_hopf(&d).contains(&"Δ algebra map".to_string()));
    }

    #[test]
    fn exterior_top_wedge() {
        for g in 1..=3u32 {
            let h = make_builtin(BuiltinKind::Exterior { gens: g }).unwrap();
            let top = (1usize << g) - 1;
            assert_eq!(h.integral(), h.basis_vector(top).as_slice());
            assert_eq!(h.integral_degree(), g as i64);
            assert!(h.is_cocommutative());
        }
    }

    #[test]
    fn rescaling_keeps_preferred_integral() {
        let h = make_builtin(BuiltinKind::Taft { n: 3 }).unwrap();
        let f = h.field();
        let h2 = h.with_integral_scaled(&f.from_i64(5));
        assert_eq!(h.preferred_integral(), h2.preferred_integral());
    }
}
