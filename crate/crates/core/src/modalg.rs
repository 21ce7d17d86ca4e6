//! H-module algebras, smash products, opposites, tensor products and the builtin algebra catalog.

use std::sync::Arc;

use thiserror::Error;

use crate::exactla::{Field, LinAlgError, Mat, Scalar};
use crate::hmod::{self, HModule, ModuleError};
use crate::hopf::{builtin_from_spec, BuiltinKind, HopfError, HopfRef};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("{0}")]
    LinAlg(#[from] LinAlgError),
    #[error("{0}")]
    Module(#[from] ModuleError),
    #[error("{0}")]
    Hopf(#[from] HopfError),
    #[error("module algebra axioms fail: {}", .0.join("; "))]
    Axioms(Vec<String>),
    #[error("refused: {0}")]
    Refused(String),
    #[error("unknown builtin algebra '{0}'")]
    Builtin(String),
    #[error("algebras over different Hopf algebras")]
    HopfMismatch,
    #[error("not a morphism of module algebras: {0}")]
    NotMorphism(String),
}

type Sparse = Vec<(usize, Scalar)>;

/// A finite-dimensional graded (super when H is) associative unital algebra by structure constants.
/// `mult` has row i·dim+j holding the coordinates of eᵢeⱼ.
#[derive(Clone, Debug)]
pub struct Algebra {
    field: Field,
    labels: Vec<String>,
    mult: Mat,
    unit: Vec<Scalar>,
    grading: Vec<i64>,
    products: Vec<Sparse>,
}

impl PartialEq for Algebra {
    fn eq(&self, o: &Self) -> bool {
        self.mult == o.mult && self.unit == o.unit && self.grading == o.grading
    }
}

fn sparse_rows(m: &Mat) -> Vec<Sparse> {
    let f = m.field();
    (0..m.rows())
        .map(|r| (0..m.cols()).filter(|&c| !f.is_zero(m.get(r, c))).map(|c| (c, m.get(r, c).clone())).collect())
        .collect()
}

impl Algebra {
    /// Builds without checking associativity (see [`Algebra::verify`]).
    pub fn new(field: &Field, labels: Vec<String>, mult: Mat, unit: Vec<Scalar>, grading: Vec<i64>) -> Result<Algebra, AlgebraError> {
        let d = labels.len();
        if mult.rows() != d * d || mult.cols() != d || unit.len() != d || grading.len() != d {
            return Err(AlgebraError::Axioms(vec!["mult shape".into()]));
        }
        let products = sparse_rows(&mult);
        Ok(Algebra { field: field.clone(), labels, mult, unit, grading, products })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn dim(&self) -> usize {
        self.labels.len()
    }
    pub fn labels(&self) -> &[String] {
        &self.labels
    }
    pub fn mult(&self) -> &Mat {
        &self.mult
    }
    pub fn unit(&self) -> &[Scalar] {
        &self.unit
    }
    pub fn grading(&self) -> &[i64] {
        &self.grading
    }
    pub fn product(&self, i: usize, j: usize) -> &[(usize, Scalar)] {
        &self.products[i * self.dim() + j]
    }

    pub fn mul_elements(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        let f = &self.field;
        let mut out = vec![f.zero(); self.dim()];
        for (i, x) in a.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if f.is_zero(y) {
                    continue;
                }
                let xy = f.mul(x, y);
                for (k, c) in self.product(i, j) {
                    out[*k] = f.add(&out[*k], &f.mul(&xy, c));
                }
            }
        }
        out
    }

    /// Left multiplication by eᵢ (column j = eᵢeⱼ).
    pub fn left_mult(&self, i: usize) -> Mat {
        let d = self.dim();
        let mut m = Mat::zeros(&self.field, d, d);
        for j in 0..d {
            for (k, c) in self.product(i, j) {
                m.set(*k, j, c.clone());
            }
        }
        m
    }

    /// Right multiplication by eⱼ (column i = eᵢeⱼ).
    pub fn right_mult(&self, j: usize) -> Mat {
        let d = self.dim();
        let mut m = Mat::zeros(&self.field, d, d);
        for i in 0..d {
            for (k, c) in self.product(i, j) {
                m.set(*k, i, c.clone());
            }
        }
        m
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Scalar> {
        let mut v = vec![self.field.zero(); self.dim()];
        v[i] = self.field.one();
        v
    }

    /// Failed algebra axioms (associativity, unit, homogeneity); `degrees_equal` compares degrees.
    pub fn verify(&self, degrees_equal: &dyn Fn(i64, i64) -> bool) -> Vec<String> {
        let mut fails = Vec::new();
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                for (k, _) in self.product(i, j) {
                    if !degrees_equal(self.grading[*k], self.grading[i] + self.grading[j]) {
                        fails.push("homogeneity".to_string());
                        return fails;
                    }
                }
            }
        }
        'outer: for i in 0..d {
            for j in 0..d {
                let ij = self.mul_elements(&self.basis_vector(i), &self.basis_vector(j));
                for k in 0..d {
                    let ek = self.basis_vector(k);
                    let l = self.mul_elements(&ij, &ek);
                    let jk = self.mul_elements(&self.basis_vector(j), &ek);
                    let r = self.mul_elements(&self.basis_vector(i), &jk);
                    if l != r {
                        fails.push("associativity".to_string());
                        break 'outer;
                    }
                }
            }
        }
        for i in 0..d {
            let e = self.basis_vector(i);
            if self.mul_elements(&self.unit, &e) != e || self.mul_elements(&e, &self.unit) != e {
                fails.push("unit".to_string());
                break;
            }
        }
        fails
    }
}

/// An algebra A with an H-action making it an H-module algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleAlgebra {
    hopf: HopfRef,
    algebra: Algebra,
    haction: HModule,
}

/// Failed module-algebra axioms for the given data (empty = pass).
pub fn verify_module_algebra(hopf: &HopfRef, algebra: &Algebra, haction: &[Mat]) -> Vec<String> {
    let h = hopf;
    let f = h.field();
    let mut fails = algebra.verify(&|a, b| h.degrees_equal(a, b));
    fails.extend(hmod::verify_module(h, haction, algebra.grading()));
    if !fails.is_empty() {
        return fails;
    }
    let d = algebra.dim();
    let parity = |i: usize| h.parity_of_degree(algebra.grading()[i]);
    // h·(ab) = Σ (−1)^{|h₂||a|}(h₁a)(h₂b)
    let gens = h.generators();
    let checks: Vec<usize> = if h.words().is_some() { gens } else { (0..h.dim()).collect() };
    'outer: for &x in &checks {
        for a in 0..d {
            for b in 0..d {
                let ab = algebra.mul_elements(&algebra.basis_vector(a), &algebra.basis_vector(b));
                let lhs = haction[x].apply(&ab);
                let mut rhs = vec![f.zero(); d];
                for (j, k, c) in h.coproduct(x) {
                    let c = if h.parity(*k) * parity(a) == 1 { f.neg(c) } else { c.clone() };
                    let ha = haction[*j].column(a);
                    let hb = haction[*k].column(b);
                    let prod = algebra.mul_elements(&ha, &hb);
                    for (r, p) in rhs.iter_mut().zip(prod) {
                        *r = f.add(r, &f.mul(&c, &p));
                    }
                }
                if lhs != rhs {
                    fails.push(format!("module algebra (h·(ab)) at {}", h.labels()[x]));
                    break 'outer;
                }
            }
        }
    }
    for x in 0..h.dim() {
        let want: Vec<Scalar> = algebra.unit().iter().map(|u| f.mul(u, h.counit(x))).collect();
        if haction[x].apply(algebra.unit()) != want {
            fails.push("h·1 = ε(h)1".to_string());
            break;
        }
    }
    if fails.is_empty() {
        if let Some(msg) = leibniz_cross_check(h, algebra, haction) {
            fails.push(msg);
        }
    }
    fails
}

/// The builtin-specific Leibniz rules, checked independently of the coproduct tables.
fn leibniz_cross_check(h: &HopfRef, algebra: &Algebra, haction: &[Mat]) -> Option<String> {
    let f = h.field();
    let d = algebra.dim();
    let kind = h.kind()?;
    let (g, _) = h.nilpotent_generator()?;
    let del = &haction[g];
    for a in 0..d {
        for b in 0..d {
            let ea = algebra.basis_vector(a);
            let eb = algebra.basis_vector(b);
            let lhs = del.apply(&algebra.mul_elements(&ea, &eb));
            let first = algebra.mul_elements(&del.apply(&ea), &eb);
            let second = match kind {
                BuiltinKind::PDg { .. } => algebra.mul_elements(&ea, &del.apply(&eb)),
                BuiltinKind::Exterior { gens: 1 } => {
                    let s = algebra.mul_elements(&ea, &del.apply(&eb));
                    if h.parity_of_degree(algebra.grading()[a]) == 1 {
                        s.iter().map(|x| f.neg(x)).collect()
                    } else {
                        s
                    }
                }
                BuiltinKind::Taft { n } => algebra.mul_elements(&haction[*n as usize].apply(&ea), &del.apply(&eb)),
                _ => return None,
            };
            let rhs: Vec<Scalar> = first.iter().zip(&second).map(|(x, y)| f.add(x, y)).collect();
            if lhs != rhs {
                return Some("Leibniz rule".to_string());
            }
        }
    }
    None
}

impl ModuleAlgebra {
    pub fn new(hopf: HopfRef, algebra: Algebra, haction: Vec<Mat>) -> Result<ModuleAlgebra, AlgebraError> {
        if algebra.field() != hopf.field() {
            return Err(AlgebraError::LinAlg(LinAlgError::FieldMismatch("algebra and Hopf algebra fields differ".into())));
        }
        let fails = verify_module_algebra(&hopf, &algebra, &haction);
        if !fails.is_empty() {
            return Err(AlgebraError::Axioms(fails));
        }
        Ok(Self::new_unchecked(hopf, algebra, haction))
    }

    /// Wraps data without checking the axioms (used for deliberately broken constructions).
    pub fn new_unchecked(hopf: HopfRef, algebra: Algebra, haction: Vec<Mat>) -> ModuleAlgebra {
        let haction = HModule::new_unchecked(hopf.clone(), haction, algebra.grading().to_vec());
        ModuleAlgebra { hopf, algebra, haction }
    }

    /// Builds from the action of the algebra generators of H (builtin H only).
    pub fn from_generator_actions(hopf: HopfRef, algebra: Algebra, gens: &[(usize, Mat)]) -> Result<ModuleAlgebra, AlgebraError> {
        let m = HModule::from_generators(hopf.clone(), gens, algebra.grading().to_vec())?;
        ModuleAlgebra::new(hopf, algebra, m.actions().to_vec())
    }

    /// A with trivial action h·a = ε(h)a.
    pub fn trivial_action(hopf: HopfRef, algebra: Algebra) -> Result<ModuleAlgebra, AlgebraError> {
        let f = hopf.field().clone();
        let haction = (0..hopf.dim()).map(|i| Mat::identity(&f, algebra.dim()).scale(hopf.counit(i))).collect();
        ModuleAlgebra::new(hopf, algebra, haction)
    }

    pub fn verify(&self) -> Vec<String> {
        verify_module_algebra(&self.hopf, &self.algebra, self.haction.actions())
    }

    pub fn hopf(&self) -> &HopfRef {
        &self.hopf
    }
    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }
    pub fn haction(&self) -> &HModule {
        &self.haction
    }
    pub fn field(&self) -> &Field {
        self.hopf.field()
    }
    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Whether every H-action is ε (the smooth-basic regime).
    pub fn has_trivial_action(&self) -> bool {
        let f = self.field();
        (0..self.hopf.dim()).all(|i| self.haction.action(i) == &Mat::identity(f, self.dim()).scale(self.hopf.counit(i)))
    }

    /// Parity of basis element i.
    pub fn parity(&self, i: usize) -> i64 {
        self.hopf.parity_of_degree(self.algebra.grading()[i])
    }
}

/// The smash product A#H on A⊗H (basis aᵢ⊗hⱼ at index i·dim H + j).
#[derive(Clone, Debug)]
pub struct SmashAlgebra {
    pub base: ModuleAlgebra,
    pub algebra: Algebra,
}

/// (a⊗h)(b⊗l) = Σ (−1)^{|h₂||b|} a(h₁·b) ⊗ h₂l, with associativity checked.
pub fn smash(a: &ModuleAlgebra) -> Result<SmashAlgebra, AlgebraError> {
    let fails = a.verify();
    if !fails.is_empty() {
        return Err(AlgebraError::Axioms(fails));
    }
    let h = &a.hopf;
    let f = h.field();
    let (da, dh) = (a.dim(), h.dim());
    let d = da * dh;
    let mut mult = Mat::zeros(f, d * d, d);
    for ai in 0..da {
        for hj in 0..dh {
            for bi in 0..da {
                for lj in 0..dh {
                    let row = (ai * dh + hj) * d + bi * dh + lj;
                    for (h1, h2, c) in h.coproduct(hj) {
                        let c = if h.parity(*h2) * a.parity(bi) == 1 { f.neg(c) } else { c.clone() };
                        let hb = a.haction.action(*h1).column(bi);
                        let ab = a.algebra.mul_elements(&a.algebra.basis_vector(ai), &hb);
                        for (k, abk) in ab.iter().enumerate() {
                            if f.is_zero(abk) {
                                continue;
                            }
                            for (m, hm) in h.product(*h2, lj) {
                                mult.add_to(row, k * dh + m, &f.mul(&c, &f.mul(abk, hm)));
                            }
                        }
                    }
                }
            }
        }
    }
    let mut unit = vec![f.zero(); d];
    for (i, u) in a.algebra.unit().iter().enumerate() {
        for (j, v) in h.unit().iter().enumerate() {
            unit[i * dh + j] = f.mul(u, v);
        }
    }
    let labels = a
        .algebra
        .labels()
        .iter()
        .flat_map(|x| h.labels().iter().map(move |y| format!("{x}#{y}")))
        .collect();
    let grading = a.algebra.grading().iter().flat_map(|x| h.grading().iter().map(move |y| x + y)).collect();
    let algebra = Algebra::new(f, labels, mult, unit, grading)?;
    let fails = algebra.verify(&|x, y| h.degrees_equal(x, y));
    if !fails.is_empty() {
        return Err(AlgebraError::Axioms(fails));
    }
    Ok(SmashAlgebra { base: a.clone(), algebra })
}

fn cocommutative_or_refuse(h: &HopfRef, what: &str) -> Result<(), AlgebraError> {
    if h.is_cocommutative() {
        Ok(())
    } else {
        Err(AlgebraError::Refused(format!(
            "{what} needs a cocommutative Hopf algebra; without it the H-action is not compatible with the swapped product"
        )))
    }
}

/// A^op with a∘b = (−1)^{|a||b|}ba and the same H-action, without any check.
pub fn opposite_unchecked(a: &ModuleAlgebra) -> ModuleAlgebra {
    let f = a.field();
    let d = a.dim();
    let mut mult = Mat::zeros(f, d * d, d);
    for i in 0..d {
        for j in 0..d {
            let sign = a.parity(i) * a.parity(j) == 1;
            for (k, c) in a.algebra.product(j, i) {
                mult.set(i * d + j, *k, if sign { f.neg(c) } else { c.clone() });
            }
        }
    }
    let alg = Algebra::new(f, a.algebra.labels.clone(), mult, a.algebra.unit.clone(), a.algebra.grading.clone())
        .expect("same shape");
    ModuleAlgebra::new_unchecked(a.hopf.clone(), alg, a.haction.actions().to_vec())
}

/// The opposite module algebra; refused unless H is cocommutative.
pub fn opposite(a: &ModuleAlgebra) -> Result<ModuleAlgebra, AlgebraError> {
    cocommutative_or_refuse(&a.hopf, "the opposite module algebra")?;
    let op = opposite_unchecked(a);
    let fails = op.verify();
    if !fails.is_empty() {
        return Err(AlgebraError::Axioms(fails));
    }
    Ok(op)
}

/// A₁⊗A₂ with (a⊗b)(a'⊗b') = (−1)^{|b||a'|}aa'⊗bb' and the diagonal H-action, unchecked.
pub fn tensor_algebras_unchecked(a1: &ModuleAlgebra, a2: &ModuleAlgebra) -> Result<ModuleAlgebra, AlgebraError> {
    if !hmod::same_hopf(&a1.hopf, &a2.hopf) {
        return Err(AlgebraError::HopfMismatch);
    }
    let f = a1.field();
    let (d1, d2) = (a1.dim(), a2.dim());
    let d = d1 * d2;
    let mut mult = Mat::zeros(f, d * d, d);
    for a in 0..d1 {
        for b in 0..d2 {
            for a2i in 0..d1 {
                for b2 in 0..d2 {
                    let sign = a2.parity(b) * a1.parity(a2i) == 1;
                    for (k, c) in a1.algebra.product(a, a2i) {
                        for (l, e) in a2.algebra.product(b, b2) {
                            let v = f.mul(c, e);
                            mult.add_to((a * d2 + b) * d + a2i * d2 + b2, k * d2 + l, &if sign { f.neg(&v) } else { v });
                        }
                    }
                }
            }
        }
    }
    let unit: Vec<Scalar> =
        a1.algebra.unit.iter().flat_map(|u| a2.algebra.unit.iter().map(move |v| f.mul(u, v))).collect();
    let labels = a1
        .algebra
        .labels
        .iter()
        .flat_map(|x| a2.algebra.labels.iter().map(move |y| format!("{x}⊗{y}")))
        .collect();
    let grading = a1.algebra.grading.iter().flat_map(|x| a2.algebra.grading.iter().map(move |y| x + y)).collect();
    let alg = Algebra::new(f, labels, mult, unit, grading)?;
    let act = hmod::tensor(&a1.haction, &a2.haction)?;
    Ok(ModuleAlgebra::new_unchecked(a1.hopf.clone(), alg, act.actions().to_vec()))
}

/// The tensor product module algebra; refused unless H is cocommutative.
pub fn tensor_algebras(a1: &ModuleAlgebra, a2: &ModuleAlgebra) -> Result<ModuleAlgebra, AlgebraError> {
    cocommutative_or_refuse(&a1.hopf, "the tensor product module algebra")?;
    let t = tensor_algebras_unchecked(a1, a2)?;
    let fails = t.verify();
    if !fails.is_empty() {
        return Err(AlgebraError::Axioms(fails));
    }
    Ok(t)
}

/// End_k(V) with composition and h·f = Σ (−1)^{|h₂||f|} h₁∘f∘S(h₂).
pub fn endomorphism_algebra(v: &HModule) -> Result<ModuleAlgebra, AlgebraError> {
    let h = v.hopf().clone();
    let f = h.field();
    let d = v.dim();
    let n = d * d;
    // basis E_ab at a·d + b; E_ab E_cd = δ_bc E_ad
    let mut mult = Mat::zeros(f, n * n, n);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                mult.set((a * d + b) * n + b * d + c, a * d + c, f.one());
            }
        }
    }
    let mut unit = vec![f.zero(); n];
    for a in 0..d {
        unit[a * d + a] = f.one();
    }
    let grading: Vec<i64> = (0..n).map(|x| v.grading()[x / d] - v.grading()[x % d]).collect();
    let labels = (0..n).map(|x| format!("E{}_{}", x / d, x % d)).collect();
    let alg = Algebra::new(f, labels, mult, unit, grading.clone())?;
    let s = h.antipode_op();
    let sacts: Vec<Mat> = (0..h.dim()).map(|j| v.action_of(&s.column(j))).collect();
    let sign = Mat::diagonal(
        f,
        &grading.iter().map(|&g| if h.parity_of_degree(g) == 1 { f.from_i64(-1) } else { f.one() }).collect::<Vec<_>>(),
    );
    let haction = h.extend_from_generators(n, |i| {
        let mut acc = Mat::zeros(f, n, n);
        for (j, k, c) in h.coproduct(i) {
            let mut t = v.action(*j).kron(&sacts[*k].transpose()).scale(c);
            if h.parity(*k) == 1 {
                t = t.mul(&sign);
            }
            acc = acc.add(&t);
        }
        acc
    });
    ModuleAlgebra::new(h, alg, haction)
}

/// An H-equivariant unital algebra map φ: source → target (matrix dim target × dim source).
#[derive(Clone, Debug)]
pub struct AlgebraMorphism {
    pub source: ModuleAlgebra,
    pub target: ModuleAlgebra,
    pub matrix: Mat,
}

impl AlgebraMorphism {
    pub fn new(source: ModuleAlgebra, target: ModuleAlgebra, matrix: Mat) -> Result<AlgebraMorphism, AlgebraError> {
        let bad = |m: &str| Err(AlgebraError::NotMorphism(m.to_string()));
        if !hmod::same_hopf(&source.hopf, &target.hopf) {
            return Err(AlgebraError::HopfMismatch);
        }
        if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
            return bad("shape");
        }
        if matrix.apply(source.algebra.unit()) != target.algebra.unit() {
            return bad("unit");
        }
        let (s, t) = (&source.algebra, &target.algebra);
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                let lhs = matrix.apply(&s.mul_elements(&s.basis_vector(i), &s.basis_vector(j)));
                let rhs = t.mul_elements(&matrix.column(i), &matrix.column(j));
                if lhs != rhs {
                    return bad("multiplicativity");
                }
            }
        }
        let map = hmod::HLinearMap::new(source.haction.clone(), target.haction.clone(), matrix.clone())?;
        if !map.is_h_linear() {
            return bad("H-equivariance");
        }
        Ok(AlgebraMorphism { source, target, matrix })
    }
}

fn alg_from_table(
    f: &Field,
    labels: Vec<String>,
    grading: Vec<i64>,
    unit_index: &[(usize, i64)],
    table: impl Fn(usize, usize) -> Vec<(usize, Scalar)>,
) -> Algebra {
    let d = labels.len();
    let mut mult = Mat::zeros(f, d * d, d);
    for i in 0..d {
        for j in 0..d {
            for (k, c) in table(i, j) {
                mult.add_to(i * d + j, k, &c);
            }
        }
    }
    let mut unit = vec![f.zero(); d];
    for &(i, c) in unit_index {
        unit[i] = f.from_i64(c);
    }
    Algebra::new(f, labels, mult, unit, grading).expect("catalog shapes")
}

/// The ground field k as a module algebra.
pub fn ground(h: &HopfRef) -> ModuleAlgebra {
    let f = h.field();
    let alg = alg_from_table(f, vec!["1".into()], vec![0], &[(0, 1)], |_, _| vec![(0, f.one())]);
    ModuleAlgebra::trivial_action(h.clone(), alg).expect("k is a module algebra")
}

/// k[x]/xᴺ with deg x = −deg ∂, as a plain algebra.
pub fn truncated_poly(f: &Field, n: usize, deg_x: i64) -> Algebra {
    let labels = (0..n)
        .map(|k| match k {
            0 => "1".to_string(),
            1 => "x".to_string(),
            _ => format!("x^{k}"),
        })
        .collect();
    alg_from_table(f, labels, (0..n as i64).map(|k| k * deg_x).collect(), &[(0, 1)], |i, j| {
        if i + j < n {
            vec![(i + j, f.one())]
        } else {
            vec![]
        }
    })
}

/// 𝔽ₚ[x]/(xᵖ) over p_dg(p) with ∂ = d/dx.
pub fn truncated_poly_pdg(p: u64) -> Result<ModuleAlgebra, AlgebraError> {
    let h: HopfRef = Arc::new(builtin_from_spec(&format!("p_dg:{p}"))?);
    let f = h.field().clone();
    let n = p as usize;
    let alg = truncated_poly(&f, n, -1);
    let del = Mat::from_fn(&f, n, n, |r, c| if c >= 1 && r == c - 1 { f.from_i64(c as i64) } else { f.zero() });
    ModuleAlgebra::from_generator_actions(h, alg, &[(1, del)])
}

/// k[ε,η]/(ε²,εη,η²) over k[d]/d² with deg ε = 0, deg η = 1, dε = η.
pub fn dg_square_zero() -> Result<ModuleAlgebra, AlgebraError> {
    let h: HopfRef = Arc::new(builtin_from_spec("dg")?);
    let f = h.field().clone();
    let alg = alg_from_table(&f, vec!["1".into(), "ε".into(), "η".into()], vec![0, 0, 1], &[(0, 1)], |i, j| match (i, j) {
        (0, k) | (k, 0) => vec![(k, f.one())],
        _ => vec![],
    });
    let mut d = Mat::zeros(&f, 3, 3);
    d.set(2, 1, f.one());
    ModuleAlgebra::from_generator_actions(h, alg, &[(1, d)])
}

/// The path algebra of 1 → 2: basis e₁, e₂, α with α = e₂αe₁, with trivial H-action.
pub fn path_algebra_a2(h: &HopfRef) -> Result<ModuleAlgebra, AlgebraError> {
    let f = h.field();
    let alg = alg_from_table(f, vec!["e1".into(), "e2".into(), "α".into()], vec![0, 0, 0], &[(0, 1), (1, 1)], |i, j| {
        match (i, j) {
            (0, 0) => vec![(0, f.one())],
            (1, 1) => vec![(1, f.one())],
            (1, 2) | (2, 0) => vec![(2, f.one())],
            _ => vec![],
        }
    });
    ModuleAlgebra::trivial_action(h.clone(), alg)
}

/// k×k with trivial action.
pub fn split_semisimple(h: &HopfRef, copies: usize) -> Result<ModuleAlgebra, AlgebraError> {
    let f = h.field();
    let labels = (1..=copies).map(|i| format!("e{i}")).collect();
    let units: Vec<(usize, i64)> = (0..copies).map(|i| (i, 1)).collect();
    let alg = alg_from_table(f, labels, vec![0; copies], &units, |i, j| if i == j { vec![(i, f.one())] } else { vec![] });
    ModuleAlgebra::trivial_action(h.clone(), alg)
}

/// Upper triangular 2×2 matrices (basis E11, E12, E22) with trivial action.
pub fn upper_triangular(h: &HopfRef) -> Result<ModuleAlgebra, AlgebraError> {
    let f = h.field();
    let alg = alg_from_table(f, vec!["E11".into(), "E12".into(), "E22".into()], vec![0, 0, 0], &[(0, 1), (2, 1)], |i, j| {
        match (i, j) {
            (0, 0) => vec![(0, f.one())],
            (0, 1) | (1, 2) => vec![(1, f.one())],
            (2, 2) => vec![(2, f.one())],
            _ => vec![],
        }
    });
    ModuleAlgebra::trivial_action(h.clone(), alg)
}

/// ℚ(ζₙ)[x]/xⁿ over taft(n), deg x = −1, K·x = ζ⁻¹x, d(xᵏ) = (1 + ζ⁻¹ + ⋯ + ζ^{−(k−1)})x^{k−1}.
/// With `wrong_power` the coefficients use ζ in place of ζ⁻¹ (breaks the Leibniz rule, keeps the module).
pub fn taft_poly(n: u32, wrong_power: bool) -> Result<ModuleAlgebra, AlgebraError> {
    let h: HopfRef = Arc::new(builtin_from_spec(&format!("taft:{n}"))?);
    let f = h.field().clone();
    let zeta = hmod::taft_root(&h).expect("taft");
    let zinv = f.inv(&zeta).expect("unit");
    let q = if wrong_power { zeta.clone() } else { zinv.clone() };
    let n = n as usize;
    let alg = truncated_poly(&f, n, -1);
    let mut d = Mat::zeros(&f, n, n);
    for k in 1..n {
        let mut c = f.zero();
        for i in 0..k {
            c = f.add(&c, &f.pow(&q, i as u64));
        }
        d.set(k - 1, k, c);
    }
    let kdiag: Vec<Scalar> = (0..n).map(|k| f.pow(&zinv, k as u64)).collect();
    let kmat = Mat::diagonal(&f, &kdiag);
    let gens = [(1, d), (n, kmat)];
    if wrong_power {
        let m = HModule::from_generators(h.clone(), &gens, alg.grading().to_vec())?;
        return Ok(ModuleAlgebra::new_unchecked(h, alg, m.actions().to_vec()));
    }
    ModuleAlgebra::from_generator_actions(h, alg, &gens)
}

/// Names accepted by [`make_builtin_algebra`].
pub const CATALOG: &[&str] = &[
    "poly_pdg:<p>",
    "dg_square_zero",
    "path_a2@<hopf>",
    "ground@<hopf>",
    "kxk@<hopf>",
    "upper_triangular@<hopf>",
    "taft_poly:<n>",
];

/// Looks up a catalog algebra, e.g. "poly_pdg:3", "dg_square_zero", "path_a2@p_dg:3", "taft_poly:3".
pub fn make_builtin_algebra(spec: &str) -> Result<ModuleAlgebra, AlgebraError> {
    let bad = || AlgebraError::Builtin(spec.to_string());
    let (name, hopf) = match spec.split_once('@') {
        Some((a, b)) => (a, Some(b)),
        None => (spec, None),
    };
    let with_hopf = |default: &str| -> Result<HopfRef, AlgebraError> {
        Ok(Arc::new(builtin_from_spec(hopf.unwrap_or(default))?))
    };
    if let Some(p) = name.strip_prefix("poly_pdg:") {
        return truncated_poly_pdg(p.parse().map_err(|_| bad())?);
    }
    if let Some(n) = name.strip_prefix("taft_poly:") {
        return taft_poly(n.parse().map_err(|_| bad())?, false);
    }
    match name {
        "dg_square_zero" => dg_square_zero(),
        "path_a2" => path_algebra_a2(&with_hopf("p_dg:3")?),
        "ground" => Ok(ground(&with_hopf("p_dg:3")?)),
        "kxk" => split_semisimple(&with_hopf("p_dg:3")?, 2),
        "upper_triangular" => upper_triangular(&with_hopf("p_dg:3")?),
        _ => Err(bad()),
    }
}
