//! Modules over the smash product B = A#H: A-linear Hom with its H-action, chain maps,
//! homotopy classes, cones, shifts, triangles and quasi-isomorphisms.

use thiserror::Error;

use crate::exactla::{Field, LinAlgError, Mat, Scalar};
use crate::hmod::{self, HModule, ModuleError, StableInvariants};
use crate::hopf::HopfRef;
use crate::modalg::ModuleAlgebra;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BModuleError {
    #[error("{0}")]
    LinAlg(#[from] LinAlgError),
    #[error("{0}")]
    Module(#[from] ModuleError),
    #[error("B-module axioms fail: {}", .0.join("; "))]
    Axioms(Vec<String>),
    #[error("modules over different algebras")]
    AlgebraMismatch,
    #[error("map is not B-linear: {0}")]
    NotBLinear(String),
    #[error("not exact: {0}")]
    NotExact(String),
    #[error("sequence is not split over A")]
    NotASplit,
    #[error("precondition fails: {0}")]
    Precondition(String),
}

/// A module over A#H: an A-action and an H-action on the same graded space.
#[derive(Clone, Debug, PartialEq)]
pub struct BModule {
    algebra: ModuleAlgebra,
    a_action: Vec<Mat>,
    hmod: HModule,
}

/// Failed B-module axioms for the given data.
pub fn verify_bmodule(algebra: &ModuleAlgebra, a_action: &[Mat], hmod: &HModule) -> Vec<String> {
    let mut fails = hmod.verify();
    let h = algebra.hopf();
    let f = h.field();
    let alg = algebra.algebra();
    let d = hmod.dim();
    if a_action.len() != alg.dim() || a_action.iter().any(|m| m.rows() != d || m.cols() != d) {
        fails.push("A-action shape".to_string());
        return fails;
    }
    let act = |x: &[Scalar]| -> Mat {
        let mut acc = Mat::zeros(f, d, d);
        for (i, c) in x.iter().enumerate() {
            if !f.is_zero(c) {
                acc = acc.add(&a_action[i].scale(c));
            }
        }
        acc
    };
    if !act(alg.unit()).is_identity() {
        fails.push("unit of A acts as identity".to_string());
    }
    for (i, m) in a_action.iter().enumerate() {
        if !hmod::is_homogeneous_map(m, hmod, hmod, alg.grading()[i]) {
            fails.push(format!("A-action homogeneity at {}", alg.labels()[i]));
            return fails;
        }
    }
    'rep: for i in 0..alg.dim() {
        for j in 0..alg.dim() {
            let prod = act(&alg.mul_elements(&alg.basis_vector(i), &alg.basis_vector(j)));
            if a_action[i].mul(&a_action[j]) != prod {
                fails.push("A-representation".to_string());
                break 'rep;
            }
        }
    }
    // h·(a·m) = Σ (−1)^{|h₂||a|} (h₁·a)·(h₂·m)
    let checks: Vec<usize> = if h.words().is_some() { h.generators() } else { (0..h.dim()).collect() };
    'compat: for &x in &checks {
        for a in 0..alg.dim() {
            let lhs = hmod.action(x).mul(&a_action[a]);
            let mut rhs = Mat::zeros(f, d, d);
            for (j, k, c) in h.coproduct(x) {
                let c = if h.parity(*k) * algebra.parity(a) == 1 { f.neg(c) } else { c.clone() };
                let ha = algebra.haction().action(*j).column(a);
                rhs = rhs.add(&act(&ha).mul(hmod.action(*k)).scale(&c));
            }
            if lhs != rhs {
                fails.push(format!("smash compatibility at {}", h.labels()[x]));
                break 'compat;
            }
        }
    }
    fails
}

fn same_algebra(a: &ModuleAlgebra, b: &ModuleAlgebra) -> bool {
    a == b
}

impl BModule {
    pub fn new(algebra: ModuleAlgebra, a_action: Vec<Mat>, hmod: HModule) -> Result<BModule, BModuleError> {
        if !hmod::same_hopf(algebra.hopf(), hmod.hopf()) {
            return Err(BModuleError::AlgebraMismatch);
        }
        let fails = verify_bmodule(&algebra, &a_action, &hmod);
        if !fails.is_empty() {
            return Err(BModuleError::Axioms(fails));
        }
        Ok(BModule { algebra, a_action, hmod })
    }

    pub(crate) fn new_unchecked(algebra: ModuleAlgebra, a_action: Vec<Mat>, hmod: HModule) -> BModule {
        BModule { algebra, a_action, hmod }
    }

    pub fn verify(&self) -> Vec<String> {
        verify_bmodule(&self.algebra, &self.a_action, &self.hmod)
    }

    pub fn algebra(&self) -> &ModuleAlgebra {
        &self.algebra
    }
    pub fn hopf(&self) -> &HopfRef {
        self.algebra.hopf()
    }
    pub fn field(&self) -> &Field {
        self.algebra.field()
    }
    pub fn dim(&self) -> usize {
        self.hmod.dim()
    }
    pub fn grading(&self) -> &[i64] {
        self.hmod.grading()
    }
    pub fn a_action(&self, i: usize) -> &Mat {
        &self.a_action[i]
    }
    pub fn a_actions(&self) -> &[Mat] {
        &self.a_action
    }
    /// The underlying H-module.
    pub fn restrict_to_h(&self) -> &HModule {
        &self.hmod
    }

    /// Action matrix of an element of A.
    pub fn a_action_of(&self, x: &[Scalar]) -> Mat {
        let f = self.field();
        let mut acc = Mat::zeros(f, self.dim(), self.dim());
        for (i, c) in x.iter().enumerate() {
            if !f.is_zero(c) {
                acc = acc.add(&self.a_action[i].scale(c));
            }
        }
        acc
    }

    /// An H-module seen as a module over k#H = H.
    pub fn from_hmodule(algebra: ModuleAlgebra, v: HModule) -> Result<BModule, BModuleError> {
        if algebra.dim() != 1 {
            return Err(BModuleError::Precondition("H-modules are B-modules only for A = k".into()));
        }
        let id = Mat::identity(v.field(), v.dim());
        BModule::new(algebra, vec![id], v)
    }

    /// A acting on itself.
    pub fn regular(algebra: &ModuleAlgebra) -> BModule {
        let alg = algebra.algebra();
        let a_action = (0..alg.dim()).map(|i| alg.left_mult(i)).collect();
        BModule { algebra: algebra.clone(), a_action, hmod: algebra.haction().clone() }
    }

    /// M⊗V for an H-module V: a·(m⊗v) = am⊗v and the diagonal H-action.
    pub fn tensor_h(&self, v: &HModule) -> Result<BModule, BModuleError> {
        let hm = hmod::tensor(&self.hmod, v)?;
        let id = Mat::identity(self.field(), v.dim());
        let a_action = self.a_action.iter().map(|a| a.kron(&id)).collect();
        Ok(BModule { algebra: self.algebra.clone(), a_action, hmod: hm })
    }

    /// The free module A⊗V.
    pub fn free(algebra: &ModuleAlgebra, v: &HModule) -> Result<BModule, BModuleError> {
        BModule::regular(algebra).tensor_h(v)
    }

    pub fn degree_shift(&self, s: i64) -> BModule {
        BModule { algebra: self.algebra.clone(), a_action: self.a_action.clone(), hmod: self.hmod.degree_shift(s) }
    }

    pub fn direct_sum(&self, other: &BModule) -> Result<BModule, BModuleError> {
        if !same_algebra(&self.algebra, &other.algebra) {
            return Err(BModuleError::AlgebraMismatch);
        }
        let a_action = self.a_action.iter().zip(&other.a_action).map(|(a, b)| a.direct_sum(b)).collect();
        Ok(BModule { algebra: self.algebra.clone(), a_action, hmod: self.hmod.direct_sum(&other.hmod)? })
    }

    /// Conjugates both actions by a homogeneous invertible `p` (columns = new basis).
    pub fn change_basis(&self, p: &Mat, grading: Vec<i64>) -> Option<BModule> {
        let pi = p.inverse()?;
        let hm = self.hmod.change_basis(p, grading)?;
        let a_action = self.a_action.iter().map(|a| pi.mul(a).mul(p)).collect();
        Some(BModule { algebra: self.algebra.clone(), a_action, hmod: hm })
    }

    /// Basis (columns) of the B-submodule generated by homogeneous vectors.
    pub fn generated(&self, gens: &[Vec<Scalar>]) -> Mat {
        let f = self.field();
        let h = self.hopf();
        let mut ops: Vec<&Mat> = self.a_action.iter().collect();
        for g in h.generators() {
            ops.push(self.hmod.action(g));
        }
        let mut basis: Vec<Vec<Scalar>> = Vec::new();
        let mut queue: Vec<Vec<Scalar>> = gens.to_vec();
        while let Some(v) = queue.pop() {
            if v.iter().all(|x| f.is_zero(x)) {
                continue;
            }
            let cur = Mat::from_columns(f, self.dim(), &basis);
            if !basis.is_empty() && cur.spans(&Mat::column_vector(f, &v)) {
                continue;
            }
            for op in &ops {
                queue.push(op.apply(&v));
            }
            basis.push(v);
        }
        Mat::from_columns(f, self.dim(), &basis)
    }

    fn vector_degree(&self, v: &[Scalar]) -> i64 {
        let f = self.field();
        let i = v.iter().position(|x| !f.is_zero(x)).expect("nonzero vector");
        self.grading()[i]
    }

    /// Submodule on an invariant subspace spanned by independent homogeneous columns.
    pub fn submodule(&self, basis: &Mat) -> Result<(BModule, Mat), BModuleError> {
        let grading = basis.columns().iter().map(|c| self.vector_degree(c)).collect();
        let hm = self.hmod.submodule(basis, grading)?;
        let a_action = self
            .a_action
            .iter()
            .map(|a| basis.solve(&a.mul(basis)).ok().flatten().ok_or_else(|| BModuleError::Precondition("not A-stable".into())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((BModule { algebra: self.algebra.clone(), a_action, hmod: hm }, basis.clone()))
    }

    /// Quotient by an invariant subspace; returns the module and the projection.
    pub fn quotient(&self, sub: &Mat) -> Result<(BModule, Mat), BModuleError> {
        let (hm, q, comp) = self.hmod.quotient(sub)?;
        let iota = Mat::identity(self.field(), self.dim()).select_columns(&comp);
        for a in &self.a_action {
            if !q.mul(&a.mul(sub)).is_zero() {
                return Err(BModuleError::Precondition("not A-stable".into()));
            }
        }
        let a_action = self.a_action.iter().map(|a| q.mul(a).mul(&iota)).collect();
        Ok((BModule { algebra: self.algebra.clone(), a_action, hmod: hm }, q))
    }
}

/// A degree-0 map of B-modules, checked A-linear and H-linear on construction.
#[derive(Clone, Debug)]
pub struct BLinearMap {
    pub source: BModule,
    pub target: BModule,
    pub matrix: Mat,
}

fn check_b_linear(source: &BModule, target: &BModule, m: &Mat) -> Result<(), BModuleError> {
    if !same_algebra(&source.algebra, &target.algebra) {
        return Err(BModuleError::AlgebraMismatch);
    }
    if m.rows() != target.dim() || m.cols() != source.dim() {
        return Err(BModuleError::NotBLinear("shape".into()));
    }
    if !hmod::is_homogeneous_map(m, &source.hmod, &target.hmod, 0) {
        return Err(BModuleError::NotBLinear("not of degree 0".into()));
    }
    for (s, t) in source.a_action.iter().zip(&target.a_action) {
        if m.mul(s) != t.mul(m) {
            return Err(BModuleError::NotBLinear("not A-linear".into()));
        }
    }
    for i in 0..source.hopf().dim() {
        if m.mul(source.hmod.action(i)) != target.hmod.action(i).mul(m) {
            return Err(BModuleError::NotBLinear("not H-linear".into()));
        }
    }
    Ok(())
}

impl BLinearMap {
    pub fn new(source: BModule, target: BModule, matrix: Mat) -> Result<BLinearMap, BModuleError> {
        check_b_linear(&source, &target, &matrix)?;
        Ok(BLinearMap { source, target, matrix })
    }

    pub fn identity(m: &BModule) -> BLinearMap {
        BLinearMap { source: m.clone(), target: m.clone(), matrix: Mat::identity(m.field(), m.dim()) }
    }

    pub fn zero(source: &BModule, target: &BModule) -> BLinearMap {
        BLinearMap { source: source.clone(), target: target.clone(), matrix: Mat::zeros(source.field(), target.dim(), source.dim()) }
    }

    pub fn compose(&self, first: &BLinearMap) -> Result<BLinearMap, BModuleError> {
        if first.target.dim() != self.source.dim() {
            return Err(BModuleError::Precondition("maps do not compose".into()));
        }
        Ok(BLinearMap { source: first.source.clone(), target: self.target.clone(), matrix: self.matrix.mul(&first.matrix) })
    }
}

/// Hom_A(M, N) as an H-module: `basis` columns are row-major vectorized matrices dim N × dim M.
#[derive(Clone, Debug)]
pub struct EnrichedHom {
    pub module: HModule,
    pub basis: Mat,
    pub source_dim: usize,
    pub target_dim: usize,
}

impl EnrichedHom {
    /// The linear map M → N for a coordinate vector in `module`.
    pub fn to_matrix(&self, coords: &[Scalar]) -> Mat {
        hmod::unvec(self.module.field(), &self.basis.apply(coords), self.target_dim, self.source_dim)
    }

    /// Coordinates of a matrix lying in Hom_A(M, N).
    pub fn coordinates(&self, m: &Mat) -> Option<Vec<Scalar>> {
        let f = self.module.field();
        let v: Vec<Scalar> = (0..m.rows()).flat_map(|r| (0..m.cols()).map(move |c| (r, c))).map(|(r, c)| m.get(r, c).clone()).collect();
        let sol = self.basis.solve(&Mat::column_vector(f, &v)).ok().flatten()?;
        Some(sol.column(0))
    }
}

/// Homogeneous basis of the A-linear maps M → N (f(am) = (−1)^{|f||a|} a f(m)), with degrees.
fn a_linear_basis(m: &BModule, n: &BModule) -> (Mat, Vec<i64>) {
    let h = m.hopf();
    let f = h.field();
    let (dm, dn) = (m.dim(), n.dim());
    let alg = m.algebra.algebra();
    let mut by_deg: std::collections::BTreeMap<i64, Vec<(usize, usize)>> = Default::default();
    for a in 0..dn {
        for b in 0..dm {
            by_deg.entry(h.reduce_degree(n.grading()[a] - m.grading()[b])).or_default().push((a, b));
        }
    }
    let mut cols: Vec<Vec<Scalar>> = Vec::new();
    let mut degs = Vec::new();
    for (deg, pairs) in by_deg {
        let pf = h.parity_of_degree(deg);
        let mut blocks = Vec::new();
        for ai in 0..alg.dim() {
            let na = &n.a_action[ai];
            let ma = &m.a_action[ai];
            let sign = if pf * m.algebra.parity(ai) == 1 { f.from_i64(-1) } else { f.one() };
            // s·N(a)∘E − E∘M(a), rows indexed by (r, c) of dim N × dim M
            let mut blk = Mat::zeros(f, dn * dm, pairs.len());
            for (ci, &(p, q)) in pairs.iter().enumerate() {
                for r in 0..dn {
                    let x = na.get(r, p);
                    if !f.is_zero(x) {
                        blk.add_to(r * dm + q, ci, &f.mul(&sign, x));
                    }
                }
                for t in 0..dm {
                    let x = ma.get(q, t);
                    if !f.is_zero(x) {
                        blk.add_to(p * dm + t, ci, &f.neg(x));
                    }
                }
            }
            blocks.push(blk);
        }
        let ns = Mat::vstack_all(f, pairs.len(), &blocks).nullspace();
        for c in 0..ns.cols() {
            let mut v = vec![f.zero(); dn * dm];
            for (t, &(p, q)) in pairs.iter().enumerate() {
                v[p * dm + q] = ns.get(t, c).clone();
            }
            cols.push(v);
            degs.push(deg);
        }
    }
    (Mat::from_columns(f, dn * dm, &cols), degs)
}

/// Hom_A(M, N) with (h·f) = Σ h₂∘f∘S⁻¹(h₁) (Koszul-signed).
pub fn enriched_hom(m: &BModule, n: &BModule) -> Result<EnrichedHom, BModuleError> {
    if !same_algebra(&m.algebra, &n.algebra) {
        return Err(BModuleError::AlgebraMismatch);
    }
    let h = m.hopf();
    let f = h.field();
    let (basis, grading) = a_linear_basis(m, n);
    let r = basis.cols();
    let mats: Vec<Mat> = (0..r).map(|c| hmod::unvec(f, &basis.column(c), n.dim(), m.dim())).collect();
    let mut fail = None;
    let action_on = |x: usize| -> Result<Mat, BModuleError> {
        let e = h.basis_vector(x);
        let imgs: Vec<Vec<Scalar>> = mats
            .iter()
            .map(|fm| {
                let g = hmod::hom_act(&m.hmod, &n.hmod, &e, fm);
                (0..g.rows()).flat_map(|a| (0..g.cols()).map(move |b| (a, b))).map(|(a, b)| g.get(a, b).clone()).collect()
            })
            .collect();
        let rhs = Mat::from_columns(f, n.dim() * m.dim(), &imgs);
        basis.solve(&rhs)?.ok_or_else(|| BModuleError::Precondition("Hom_A is not H-stable".into()))
    };
    let action = if h.words().is_some() {
        h.extend_from_generators(r, |g| {
            action_on(g).unwrap_or_else(|e| {
                fail = Some(e);
                Mat::zeros(f, r, r)
            })
        })
    } else {
        (0..h.dim()).map(action_on).collect::<Result<Vec<_>, _>>()?
    };
    if let Some(e) = fail {
        return Err(e);
    }
    let module = HModule::new_unchecked(h.clone(), action, grading);
    Ok(EnrichedHom { module, basis, source_dim: m.dim(), target_dim: n.dim() })
}

/// Basis of Hom_B(M, N) = 𝒵(Hom_A(M, N)), homogeneous maps of every degree, with their degrees.
pub fn chain_maps_graded(m: &BModule, n: &BModule) -> Result<Vec<(i64, Mat)>, BModuleError> {
    let e = enriched_hom(m, n)?;
    let h = m.hopf();
    let f = h.field();
    let z = hmod::invariants(&e.module);
    let mut out = Vec::new();
    for c in 0..z.cols() {
        let col = z.column(c);
        let i = col.iter().position(|x| !f.is_zero(x)).expect("nonzero");
        let deg = e.module.grading()[i];
        let fm = e.to_matrix(&col);
        if h.degrees_equal(deg, 0) {
            check_b_linear(m, n, &fm)?;
        } else {
            for x in 0..h.dim() {
                let hx = hmod::hom_act(&m.hmod, &n.hmod, &h.basis_vector(x), &fm);
                if hx != fm.scale(h.counit(x)) {
                    return Err(BModuleError::NotBLinear("invariant is not H-linear".into()));
                }
            }
        }
        out.push((deg, fm));
    }
    Ok(out)
}

/// Basis of Hom_B(M, N) as matrices (all degrees).
pub fn chain_maps(m: &BModule, n: &BModule) -> Result<Vec<Mat>, BModuleError> {
    Ok(chain_maps_graded(m, n)?.into_iter().map(|(_, x)| x).collect())
}

/// Basis of the degree-0 B-linear maps M → N.
pub fn degree_zero_maps(m: &BModule, n: &BModule) -> Result<Vec<Mat>, BModuleError> {
    let h = m.hopf().clone();
    Ok(chain_maps_graded(m, n)?.into_iter().filter(|(d, _)| h.degrees_equal(*d, 0)).map(|(_, x)| x).collect())
}

/// Morphisms M → N in the homotopy category: ℋ of Hom_A(M, N). `maps` are degree-0 representatives.
#[derive(Clone, Debug)]
pub struct HomotopyHom {
    pub stable: StableInvariants,
    pub degree_zero: usize,
    pub maps: Vec<Mat>,
}

pub fn homotopy_hom(m: &BModule, n: &BModule) -> Result<HomotopyHom, BModuleError> {
    let e = enriched_hom(m, n)?;
    let h = m.hopf();
    let s = hmod::stable_invariants(&e.module);
    let mut maps = Vec::new();
    for c in 0..s.basis.cols() {
        let col = s.basis.column(c);
        let i = col.iter().position(|x| !h.field().is_zero(x)).expect("nonzero");
        if h.degrees_equal(e.module.grading()[i], 0) {
            maps.push(e.to_matrix(&col));
        }
    }
    Ok(HomotopyHom { stable: s, degree_zero: maps.len(), maps })
}

/// An A-linear g with Λ·g = f, if f is null-homotopic.
pub fn null_homotopy_witness(fm: &BLinearMap) -> Result<Option<Mat>, BModuleError> {
    check_b_linear(&fm.source, &fm.target, &fm.matrix)?;
    let e = enriched_hom(&fm.source, &fm.target)?;
    let h = fm.source.hopf();
    let f = h.field();
    let coords = e.coordinates(&fm.matrix).ok_or_else(|| BModuleError::NotBLinear("not A-linear".into()))?;
    let lam = e.module.action_of(h.integral());
    let want = h.reduce_degree(-h.integral_degree());
    let idx: Vec<usize> = (0..e.module.dim()).filter(|&i| h.degrees_equal(e.module.grading()[i], want)).collect();
    let sys = lam.select_columns(&idx);
    let Some(y) = sys.solve(&Mat::column_vector(f, &coords))? else {
        return Ok(None);
    };
    let mut full = vec![f.zero(); e.module.dim()];
    for (t, &i) in idx.iter().enumerate() {
        full[i] = y.get(t, 0).clone();
    }
    Ok(Some(e.to_matrix(&full)))
}

/// g̃(m⊗h) = (−1)^{|m|(|h|+|g|)}(h·g)(m) on M⊗H{−deg Λ}, so that f = g̃∘λ_M when f = Λ·g.
pub fn factor_through_lambda(m: &BModule, n: &BModule, g: &Mat) -> Mat {
    let h = m.hopf();
    let f = h.field();
    let nh = h.dim();
    let mut out = Mat::zeros(f, n.dim(), m.dim() * nh);
    for j in 0..nh {
        let hg = hmod::hom_act(&m.hmod, &n.hmod, &h.basis_vector(j), g);
        for b in 0..m.dim() {
            let pm = h.parity_of_degree(m.grading()[b]);
            for a in 0..n.dim() {
                let v = hg.get(a, b);
                let odd = pm * h.parity_of_degree(n.grading()[a] - m.grading()[b]) == 1;
                out.set(a, b * nh + j, if odd { f.neg(v) } else { v.clone() });
            }
        }
    }
    out
}

/// M⊗H{−deg Λ}, the target of λ_M.
pub fn tensor_regular(m: &BModule) -> Result<BModule, BModuleError> {
    let h = m.hopf();
    m.tensor_h(&HModule::regular(h, -h.integral_degree()))
}

/// λ_M: m ↦ m⊗Λ.
pub fn lambda_embed(m: &BModule) -> Result<BLinearMap, BModuleError> {
    let h = m.hopf();
    let f = h.field();
    let tgt = tensor_regular(m)?;
    let n = h.dim();
    let mut mat = Mat::zeros(f, m.dim() * n, m.dim());
    for b in 0..m.dim() {
        for (c, l) in h.integral().iter().enumerate() {
            if !f.is_zero(l) {
                mat.set(b * n + c, b, l.clone());
            }
        }
    }
    BLinearMap::new(m.clone(), tgt, mat)
}

/// T(M) = M⊗(H/kΛ) for +1, T⁻¹(M) = M⊗ker ε for −1.
pub fn shift_b(m: &BModule, direction: i32) -> Result<BModule, BModuleError> {
    match direction {
        1 => m.tensor_h(&hmod::integral_quotient(m.hopf()).0),
        -1 => m.tensor_h(&hmod::augmentation_ideal(m.hopf()).0),
        _ => Err(BModuleError::Precondition(format!("shift direction must be ±1, got {direction}"))),
    }
}

/// The standard triangle X → Y → C_u → TX.
#[derive(Clone, Debug)]
pub struct TriangleData {
    pub u: BLinearMap,
    pub v: BLinearMap,
    pub w: BLinearMap,
    pub cone: BModule,
    /// Whether 0 → Y → C_u → TX → 0 is exact (rank checks).
    pub ses_exact: bool,
    /// (X⊗H{−deg Λ} ⊕ Y) → C_u
    pub quotient: Mat,
    /// C_u → X⊗H{−deg Λ} ⊕ Y onto the kept basis vectors
    pub inclusion: Mat,
}

/// C_u = (X⊗H ⊕ Y)/{(λ_X(x), −u(x))} with its standard triangle.
pub fn cone(u: &BLinearMap) -> Result<TriangleData, BModuleError> {
    check_b_linear(&u.source, &u.target, &u.matrix)?;
    let (x, y) = (&u.source, &u.target);
    let h = x.hopf();
    let f = h.field();
    let n = h.dim();
    let cq = hmod::cone_quotient(&x.hmod, &y.hmod, &u.matrix)?;
    let idn = Mat::identity(f, n);
    let a_action: Vec<Mat> = x
        .a_action
        .iter()
        .zip(&y.a_action)
        .map(|(ax, ay)| cq.q.mul(&ax.kron(&idn).direct_sum(ay)).mul(&cq.iota))
        .collect();
    let c = BModule { algebra: x.algebra.clone(), a_action, hmod: cq.module.clone() };
    let (dx, dy) = (x.dim(), y.dim());
    let iy = Mat::zeros(f, dx * n, dy).vstack(&Mat::identity(f, dy));
    let v = BLinearMap::new(y.clone(), c.clone(), cq.q.mul(&iy))?;
    let (_, pi) = hmod::integral_quotient(h);
    let tx = shift_b(x, 1)?;
    let pr = Mat::identity(f, dx).kron(&pi).hstack(&Mat::zeros(f, dx * (n - 1), dy));
    let w = BLinearMap::new(c.clone(), tx, pr.mul(&cq.iota))?;
    let ses_exact = v.matrix.rank() == dy
        && w.matrix.rank() == w.target.dim()
        && w.matrix.mul(&v.matrix).is_zero()
        && c.dim() == dy + w.target.dim();
    Ok(TriangleData { u: u.clone(), v, w, cone: c, ses_exact, quotient: cq.q, inclusion: cq.iota })
}

/// Verdict of a quasi-isomorphism test.
#[derive(Clone, Debug)]
pub struct QuasiIso {
    pub is_quasi_iso: bool,
    pub cone_dim: usize,
    /// g with Id = Λ·g on the restricted cone, when requested and found.
    pub witness: Option<Mat>,
}

/// f is a quasi-isomorphism iff its cone is projective over H.
pub fn quasi_iso(fm: &BLinearMap, with_witness: bool) -> Result<QuasiIso, BModuleError> {
    let t = cone(fm)?;
    let res = t.cone.restrict_to_h();
    let is_quasi_iso = hmod::is_projective(res);
    let witness = if with_witness && is_quasi_iso { hmod::is_stably_zero(res).map(|w| w.g) } else { None };
    Ok(QuasiIso { is_quasi_iso, cone_dim: res.dim(), witness })
}

/// x ∈ A with Λ·x = 1, if any.
pub fn contractible_certificate(a: &ModuleAlgebra) -> Option<Vec<Scalar>> {
    let h = a.hopf();
    let f = h.field();
    let lam = a.haction().action_of(h.integral());
    let sol = lam.solve(&Mat::column_vector(f, a.algebra().unit())).ok().flatten()?;
    Some(sol.column(0))
}

/// From an A-linear section γ₀ of a surjection β: C → Z⊗H, the H-averaged section
/// γ(z⊗h) = h₍₂₎γ₀(S⁻¹(h₍₁₎)z⊗1), checked to be B-linear with βγ = Id.
pub fn lift_section(beta: &BLinearMap, z: &BModule, gamma0: &Mat) -> Result<BLinearMap, BModuleError> {
    check_b_linear(&beta.source, &beta.target, &beta.matrix)?;
    let h = z.hopf();
    let f = h.field();
    let n = h.dim();
    let dz = z.dim();
    let c = &beta.source;
    if beta.target.dim() != dz * n || gamma0.rows() != c.dim() || gamma0.cols() != dz * n {
        return Err(BModuleError::Precondition("shapes do not match C → Z⊗H".into()));
    }
    if !beta.matrix.mul(gamma0).is_identity() {
        return Err(BModuleError::Precondition("γ₀ is not a section".into()));
    }
    for (s, t) in beta.target.a_action.iter().zip(&c.a_action) {
        if gamma0.mul(s) != t.mul(gamma0) {
            return Err(BModuleError::Precondition("γ₀ is not A-linear".into()));
        }
    }
    // γ = G∘Φ with Φ(z⊗l) = S⁻¹(l₁)z⊗l₂ onto Z₀⊗H and G(z⊗e_j) = ± e_j·γ₀(z⊗1)
    let (phi, _) = hmod::freeness_iso(&z.hmod)?;
    let unit_idx = h.unit().iter().position(|x| !f.is_zero(x)).expect("unit");
    let mut g = Mat::zeros(f, c.dim(), dz * n);
    for b in 0..dz {
        let base = gamma0.column(b * n + unit_idx);
        let pz = h.parity_of_degree(z.grading()[b]);
        for j in 0..n {
            let mut col = c.hmod.action(j).apply(&base);
            if pz * h.parity(j) == 1 {
                col = col.iter().map(|x| f.neg(x)).collect();
            }
            for (r, v) in col.into_iter().enumerate() {
                g.set(r, b * n + j, v);
            }
        }
    }
    let gamma = g.mul(&phi.matrix);
    if !beta.matrix.mul(&gamma).is_identity() {
        return Err(BModuleError::Precondition("lifted map is not a section".into()));
    }
    BLinearMap::new(beta.target.clone(), c.clone(), gamma)
}

/// A triangle X → Y → Z → TX from a short exact sequence split over A, with the connecting
/// morphism given as the pair (w: C_i → TX, comparison: C_i → Z).
#[derive(Clone, Debug)]
pub struct SesTriangle {
    pub triangle: TriangleData,
    pub comparison: BLinearMap,
    pub comparison_is_quasi_iso: bool,
    /// An A-linear section Z → Y, when one was required and found.
    pub splitting: Option<Mat>,
}

/// Degree-0 A-linear σ: Z → Y with p∘σ = Id, if one exists.
pub fn a_splitting(p: &BLinearMap) -> Result<Option<Mat>, BModuleError> {
    let (y, z) = (&p.source, &p.target);
    let h = y.hopf();
    let f = h.field();
    let (basis, degs) = a_linear_basis(z, y);
    let idx: Vec<usize> = (0..degs.len()).filter(|&i| h.degrees_equal(degs[i], 0)).collect();
    let mats: Vec<Mat> = idx.iter().map(|&c| hmod::unvec(f, &basis.column(c), y.dim(), z.dim())).collect();
    let cols: Vec<Vec<Scalar>> = mats
        .iter()
        .map(|s| {
            let ps = p.matrix.mul(s);
            (0..ps.rows()).flat_map(|r| (0..ps.cols()).map(move |c| (r, c))).map(|(r, c)| ps.get(r, c).clone()).collect()
        })
        .collect();
    let dz = z.dim();
    let sys = Mat::from_columns(f, dz * dz, &cols);
    let id: Vec<Scalar> = (0..dz * dz).map(|i| if i / dz == i % dz { f.one() } else { f.zero() }).collect();
    let Some(sol) = sys.solve(&Mat::column_vector(f, &id))? else {
        return Ok(None);
    };
    let mut s = Mat::zeros(f, y.dim(), dz);
    for (k, m) in mats.iter().enumerate() {
        s = s.add(&m.scale(sol.get(k, 0)));
    }
    Ok(Some(s))
}

/// Builds the triangle of 0 → X →i Y →p Z → 0. With `require_split`, refuses sequences that are
/// not split over A; without it only the comparison C_i → Z is computed and tested.
pub fn triangle_from_ses(i: &BLinearMap, p: &BLinearMap, require_split: bool) -> Result<SesTriangle, BModuleError> {
    check_b_linear(&i.source, &i.target, &i.matrix)?;
    check_b_linear(&p.source, &p.target, &p.matrix)?;
    if i.target.dim() != p.source.dim() {
        return Err(BModuleError::NotExact("maps do not compose".into()));
    }
    let (dx, dy, dz) = (i.source.dim(), i.target.dim(), p.target.dim());
    if !p.matrix.mul(&i.matrix).is_zero() || i.matrix.rank() != dx || p.matrix.rank() != dz || dx + dz != dy {
        return Err(BModuleError::NotExact("0 → X → Y → Z → 0 fails rank checks".into()));
    }
    let splitting = if require_split {
        Some(a_splitting(p)?.ok_or(BModuleError::NotASplit)?)
    } else {
        None
    };
    let triangle = cone(i)?;
    let h = i.source.hopf();
    let f = h.field();
    let n = h.dim();
    let total_to_z = Mat::zeros(f, dz, dx * n).hstack(&p.matrix);
    let cmp = total_to_z.mul(&triangle.inclusion);
    let comparison = BLinearMap::new(triangle.cone.clone(), p.target.clone(), cmp)?;
    let comparison_is_quasi_iso = quasi_iso(&comparison, false)?.is_quasi_iso;
    Ok(SesTriangle { triangle, comparison, comparison_is_quasi_iso, splitting })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modalg::{self, make_builtin_algebra};
    use crate::sample;
    use rand::rngs::StdRng;
    use rand::SeedableRng;
    use std::sync::Arc;

    fn hopf(spec: &str) -> HopfRef {
        Arc::new(crate::hopf::builtin_from_spec(spec).unwrap())
    }

    #[test]
    fn regular_and_free_are_modules() {
        for spec in ["poly_pdg:3", "dg_square_zero", "taft_poly:3", "path_a2@exterior:1"] {
            let a = make_builtin_algebra(spec).unwrap();
            let r = BModule::regular(&a);
            assert!(r.verify().is_empty(), "{spec}");
            let v = HModule::regular(a.hopf(), 0);
            let fr = BModule::free(&a, &v).unwrap();
            assert!(fr.verify().is_empty(), "{spec}");
            assert!(shift_b(&r, 1).unwrap().verify().is_empty());
            assert!(shift_b(&r, -1).unwrap().verify().is_empty());
        }
    }

    #[test]
    fn enriched_hom_examples() {
        let a = modalg::truncated_poly_pdg(3).unwrap();
        let r = BModule::regular(&a);
        // Hom_A(A, N) ≅ N
        let e = enriched_hom(&r, &r).unwrap();
        assert_eq!(e.module.dim(), 3);
        assert!(matches!(hmod::stable_iso_search(&e.module, a.haction(), 50).unwrap(), hmod::StableIsoSearch::Found(_)));
        assert_eq!(chain_maps(&r, &r).unwrap().len(), 1);
        assert_eq!(homotopy_hom(&r, &r).unwrap().stable.dim, 0);
        // A = k: enriched Hom is the full Hom
        let h = hopf("p_dg:3");
        let k = modalg::ground(&h);
        let reg = BModule::from_hmodule(k.clone(), HModule::regular(&h, 0)).unwrap();
        let e = enriched_hom(&reg, &reg).unwrap();
        let full = hmod::hom(reg.restrict_to_h(), reg.restrict_to_h()).unwrap();
        assert_eq!(e.module.dim(), full.dim());
        assert_eq!(hmod::invariants(&e.module).cols(), hmod::invariants(&full).cols());
        assert_eq!(chain_maps(&reg, &reg).unwrap().len(), 3);
        // free adjunction: Hom_A(A⊗V, N) has the dimension of Hom(V, N)
        let mut rng = StdRng::seed_from_u64(3);
        let v = sample::module(&h, 3, &mut rng);
        let free = BModule::free(&a, &v).unwrap();
        let e = enriched_hom(&free, &r).unwrap();
        assert_eq!(e.module.dim(), v.dim() * r.dim());
    }

    #[test]
    fn null_homotopies_factor_through_lambda() {
        let mut rng = StdRng::seed_from_u64(11);
        for spec in ["poly_pdg:3", "dg_square_zero", "ground@p_dg:3", "ground@exterior:2", "taft_poly:3"] {
            let a = make_builtin_algebra(spec).unwrap();
            for _ in 0..4 {
                let m = sample::bmodule(&a, 8, &mut rng);
                let n = sample::bmodule(&a, 8, &mut rng);
                let maps = degree_zero_maps(&m, &n).unwrap();
                for fm in maps {
                    let bl = BLinearMap::new(m.clone(), n.clone(), fm.clone()).unwrap();
                    if let Some(g) = null_homotopy_witness(&bl).unwrap() {
                        let gt = factor_through_lambda(&m, &n, &g);
                        let lam = lambda_embed(&m).unwrap();
                        assert_eq!(gt.mul(&lam.matrix), fm, "{spec}");
                        assert!(BLinearMap::new(lam.target.clone(), n.clone(), gt).is_ok(), "{spec}");
                    }
                }
            }
        }
    }

    #[test]
    fn witness_formulas() {
        // over k[d]/d²: d·g = dg + (−1)^{|g|+1}gd, with |g| = −1
        let h = hopf("dg");
        let k = modalg::ground(&h);
        let reg = BModule::from_hmodule(k, HModule::regular(&h, 0)).unwrap();
        let id = BLinearMap::identity(&reg);
        let g = null_homotopy_witness(&id).unwrap().unwrap();
        let d = reg.restrict_to_h().action(1);
        assert!(d.mul(&g).add(&g.mul(d)).is_identity());
        // over p_dg(3): Id = Σ ∂ⁱ g ∂^{2−i}
        let h = hopf("p_dg:3");
        let k = modalg::ground(&h);
        let reg = BModule::from_hmodule(k, HModule::regular(&h, 0)).unwrap();
        let g = null_homotopy_witness(&BLinearMap::identity(&reg)).unwrap().unwrap();
        let d = reg.restrict_to_h().action(1);
        let mut s = Mat::zeros(h.field(), 3, 3);
        for i in 0..3u32 {
            s = s.add(&d.pow(i).mul(&g).mul(&d.pow(2 - i)));
        }
        assert!(s.is_identity());
        let triv = BModule::from_hmodule(modalg::ground(&h), HModule::trivial(&h, 0)).unwrap();
        assert!(null_homotopy_witness(&BLinearMap::identity(&triv)).unwrap().is_none());
        assert!(null_homotopy_witness(&BLinearMap::zero(&triv, &triv)).unwrap().unwrap().is_zero());
    }

    #[test]
    fn lambda_and_shift() {
        let a = modalg::truncated_poly_pdg(3).unwrap();
        let r = BModule::regular(&a);
        let l = lambda_embed(&r).unwrap();
        assert_eq!(l.target.dim(), 9);
        assert_eq!(l.matrix.rank(), 3);
        let t = shift_b(&r, 1).unwrap();
        assert_eq!(t.dim(), 6);
        assert_eq!(t.restrict_to_h(), &hmod::shift(r.restrict_to_h(), 1).unwrap());
        let (q, _) = l.target.quotient(&l.matrix).unwrap();
        assert_eq!(q.dim(), t.dim());
    }

    #[test]
    fn cone_bookkeeping() {
        let mut rng = StdRng::seed_from_u64(5);
        for spec in ["poly_pdg:3", "dg_square_zero", "path_a2@p_dg:2", "taft_poly:3"] {
            let a = make_builtin_algebra(spec).unwrap();
            let n = a.hopf().dim();
            for _ in 0..3 {
                let x = sample::bmodule(&a, 6, &mut rng);
                let y = sample::bmodule(&a, 6, &mut rng);
                let u = BLinearMap::new(x.clone(), y.clone(), sample::b_linear_map(&x, &y, &mut rng)).unwrap();
                let t = cone(&u).unwrap();
                assert!(t.cone.verify().is_empty(), "{spec}");
                assert_eq!(t.cone.dim(), x.dim() * (n - 1) + y.dim());
                assert!(t.ses_exact);
                let vu = t.v.compose(&u).unwrap();
                assert!(null_homotopy_witness(&vu).unwrap().is_some(), "{spec}");
            }
            let x = BModule::regular(&a);
            assert!(quasi_iso(&BLinearMap::identity(&x), true).unwrap().is_quasi_iso);
        }
    }

    #[test]
    fn quasi_iso_examples() {
        let h = hopf("p_dg:3");
        let k = modalg::ground(&h);
        let triv = BModule::from_hmodule(k.clone(), HModule::trivial(&h, 0)).unwrap();
        let zero = BModule::from_hmodule(k, HModule::zero(&h)).unwrap();
        assert!(!quasi_iso(&BLinearMap::zero(&zero, &triv), false).unwrap().is_quasi_iso);
        let a = modalg::truncated_poly_pdg(3).unwrap();
        let r = BModule::regular(&a);
        let z = BModule::new_unchecked(a.clone(), vec![Mat::zeros(a.field(), 0, 0); 3], HModule::zero(a.hopf()));
        assert!(quasi_iso(&BLinearMap::zero(&r, &z), false).unwrap().is_quasi_iso);
    }

    #[test]
    fn contractibility() {
        for p in [3u64, 5] {
            let a = modalg::truncated_poly_pdg(p).unwrap();
            let x = contractible_certificate(&a).unwrap();
            let f = a.field();
            let lam = a.haction().action_of(a.hopf().integral());
            assert_eq!(lam.apply(&x), a.algebra().unit().to_vec());
            // ∂^{p−1} x^{p−1} = (p−1)! = −1
            let top = a.algebra().basis_vector(p as usize - 1);
            let d = a.haction().action(1).pow(p as u32 - 1);
            assert_eq!(d.apply(&top)[0], f.from_i64(-1));
        }
        let a = modalg::dg_square_zero().unwrap();
        assert!(contractible_certificate(&a).is_none());
        let h = hopf("group:2");
        let x = contractible_certificate(&modalg::ground(&h)).unwrap();
        assert_eq!(x[0], h.field().inv(&h.field().from_i64(2)).unwrap());
    }

    #[test]
    fn lift_section_examples() {
        let h = hopf("p_dg:2");
        let a = modalg::ground(&h);
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..5 {
            let z = sample::bmodule(&a, 3, &mut rng);
            let zh = z.tensor_h(&HModule::regular(&h, 0)).unwrap();
            let kk = sample::bmodule(&a, 3, &mut rng);
            let c = zh.direct_sum(&kk).unwrap();
            let f = h.field();
            let proj = Mat::identity(f, zh.dim()).hstack(&Mat::zeros(f, zh.dim(), kk.dim()));
            let beta = BLinearMap::new(c.clone(), zh.clone(), proj).unwrap();
            // a non-H-linear section: inclusion plus a random map into K
            let incl = Mat::identity(f, zh.dim()).vstack(&sample::matrix(f, kk.dim(), zh.dim(), &mut rng));
            let mut g0 = incl.clone();
            // keep degree-0 pieces only
            for r in 0..g0.rows() {
                for cc in 0..g0.cols() {
                    if !h.degrees_equal(c.grading()[r], zh.grading()[cc]) {
                        g0.set(r, cc, f.zero());
                    }
                }
            }
            let g = lift_section(&beta, &z, &g0).unwrap();
            assert!(beta.matrix.mul(&g.matrix).is_identity());
            let id = lift_section(&BLinearMap::identity(&zh), &z, &Mat::identity(f, zh.dim())).unwrap();
            assert!(id.matrix.is_identity());
        }
        // exterior: super signs
        let h = hopf("dg");
        let a = modalg::ground(&h);
        let z = BModule::from_hmodule(a, HModule::trivial(&h, 1).direct_sum(&HModule::regular(&h, 0)).unwrap()).unwrap();
        let zh = z.tensor_h(&HModule::regular(&h, 0)).unwrap();
        let id = lift_section(&BLinearMap::identity(&zh), &z, &Mat::identity(h.field(), zh.dim())).unwrap();
        assert!(id.matrix.is_identity());
    }

    #[test]
    fn triangles_from_ses() {
        let h = hopf("p_dg:3");
        let k = modalg::ground(&h);
        // 0 → k₀ → H → T(k₀) → 0
        let triv = BModule::from_hmodule(k.clone(), HModule::trivial(&h, h.integral_degree())).unwrap();
        let reg = BModule::from_hmodule(k.clone(), HModule::regular(&h, 0)).unwrap();
        let f = h.field();
        let lam = Mat::column_vector(f, h.integral());
        let i = BLinearMap::new(triv.clone(), reg.clone(), lam.clone()).unwrap();
        let (q, proj) = reg.quotient(&lam).unwrap();
        let p = BLinearMap::new(reg.clone(), q.clone(), proj).unwrap();
        let s = triangle_from_ses(&i, &p, true).unwrap();
        assert!(s.comparison_is_quasi_iso);
        assert!(s.splitting.is_some());
        // direct sum: connecting map null-homotopic
        let a = modalg::truncated_poly_pdg(3).unwrap();
        let x = BModule::regular(&a);
        let z = shift_b(&x, 1).unwrap();
        let y = x.direct_sum(&z).unwrap();
        let fl = a.field();
        let i = BLinearMap::new(x.clone(), y.clone(), Mat::identity(fl, x.dim()).vstack(&Mat::zeros(fl, z.dim(), x.dim()))).unwrap();
        let p = BLinearMap::new(y.clone(), z.clone(), Mat::zeros(fl, z.dim(), x.dim()).hstack(&Mat::identity(fl, z.dim()))).unwrap();
        let s = triangle_from_ses(&i, &p, true).unwrap();
        assert!(s.comparison_is_quasi_iso);
        // 0 → (ε, η) → A → k → 0 over the square-zero dg algebra is not A-split
        let a = modalg::dg_square_zero().unwrap();
        let x = BModule::regular(&a);
        let ideal = x.generated(&[a.algebra().basis_vector(1)]);
        assert_eq!(ideal.cols(), 2);
        let (sub, incl) = x.submodule(&ideal).unwrap();
        let (quo, pr) = x.quotient(&ideal).unwrap();
        let i = BLinearMap::new(sub, x.clone(), incl).unwrap();
        let p = BLinearMap::new(x.clone(), quo, pr).unwrap();
        assert!(matches!(triangle_from_ses(&i, &p, true), Err(BModuleError::NotASplit)));
        assert!(triangle_from_ses(&i, &p, false).unwrap().comparison_is_quasi_iso);
    }

    #[test]
    fn chain_maps_are_invariants() {
        let mut rng = StdRng::seed_from_u64(21);
        for spec in ["dg_square_zero", "poly_pdg:2", "ground@taft:2"] {
            let a = make_builtin_algebra(spec).unwrap();
            let m = sample::bmodule(&a, 6, &mut rng);
            let n = sample::bmodule(&a, 6, &mut rng);
            let e = enriched_hom(&m, &n).unwrap();
            for fm in chain_maps(&m, &n).unwrap() {
                let c = e.coordinates(&fm).unwrap();
                for x in 0..a.hopf().dim() {
                    let want: Vec<Scalar> = c.iter().map(|v| a.field().mul(v, a.hopf().counit(x))).collect();
                    assert_eq!(e.module.action(x).apply(&c), want);
                }
            }
        }
    }
}
