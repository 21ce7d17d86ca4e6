//! Truncated bar resolutions, finite cofibrant replacements for algebras with trivial action,
//! derived tensor and Hom, and induction/restriction along module-algebra maps.

use thiserror::Error;

use crate::exactla::{Mat, Scalar};
use crate::hmod::{self, HModule, ModuleError};
use crate::hopfomod::{self, BLinearMap, BModule, BModuleError};
use crate::modalg::{AlgebraMorphism, ModuleAlgebra};

pub const DEFAULT_MAX_STAGE: usize = 3;
pub const DEFAULT_DIM_CAP: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DerivedError {
    #[error("{0}")]
    BModule(#[from] BModuleError),
    #[error("{0}")]
    Module(#[from] ModuleError),
    #[error("{0}")]
    LinAlg(#[from] crate::exactla::LinAlgError),
    #[error("dimension {dim} exceeds the cap {cap}")]
    TooLarge { dim: usize, cap: usize },
    #[error("stage {0} exceeds the maximum stage {1}")]
    StageRange(usize, usize),
    #[error("resolution invalid: {0}")]
    Resolution(String),
    #[error("needs an algebra with trivial H-action")]
    NontrivialAction,
    #[error("no finite cofibrant replacement available (truncation regime); supply one")]
    TruncationRegime,
    #[error("bimodule axioms fail: {}", .0.join("; "))]
    Bimodule(Vec<String>),
    #[error("{0}")]
    Algebra(#[from] crate::modalg::AlgebraError),
}

/// An (A₁, A₂)-bimodule: a left B₁-module with a commuting right A₂-action.
#[derive(Clone, Debug)]
pub struct Bimodule {
    pub left: BModule,
    pub right_algebra: ModuleAlgebra,
    pub right_action: Vec<Mat>,
}

impl Bimodule {
    pub fn new(left: BModule, right_algebra: ModuleAlgebra, right_action: Vec<Mat>) -> Result<Bimodule, DerivedError> {
        let b = Bimodule { left, right_algebra, right_action };
        let fails = b.verify();
        if !fails.is_empty() {
            return Err(DerivedError::Bimodule(fails));
        }
        Ok(b)
    }

    pub fn dim(&self) -> usize {
        self.left.dim()
    }

    /// Right action of an element of A₂.
    pub fn right_action_of(&self, x: &[Scalar]) -> Mat {
        let f = self.left.field();
        let mut acc = Mat::zeros(f, self.dim(), self.dim());
        for (i, c) in x.iter().enumerate() {
            if !f.is_zero(c) {
                acc = acc.add(&self.right_action[i].scale(c));
            }
        }
        acc
    }

    pub fn verify(&self) -> Vec<String> {
        let mut fails = self.left.verify();
        let a2 = &self.right_algebra;
        let alg = a2.algebra();
        let h = a2.hopf();
        let f = h.field();
        let d = self.dim();
        if self.right_action.len() != alg.dim() || self.right_action.iter().any(|m| m.rows() != d || m.cols() != d) {
            fails.push("right action shape".into());
            return fails;
        }
        if !self.right_action_of(alg.unit()).is_identity() {
            fails.push("right unit".into());
        }
        'rep: for i in 0..alg.dim() {
            for j in 0..alg.dim() {
                let prod = self.right_action_of(&alg.mul_elements(&alg.basis_vector(i), &alg.basis_vector(j)));
                if self.right_action[j].mul(&self.right_action[i]) != prod {
                    fails.push("right representation".into());
                    break 'rep;
                }
            }
        }
        'comm: for r in &self.right_action {
            for l in self.left.a_actions() {
                if r.mul(l) != l.mul(r) {
                    fails.push("left and right actions commute".into());
                    break 'comm;
                }
            }
        }
        // h·(x·a) = Σ (−1)^{|h₂||x|}(h₁·x)·(h₂·a)
        let par = self.left.restrict_to_h().parity_operator();
        let checks: Vec<usize> = if h.words().is_some() { h.generators() } else { (0..h.dim()).collect() };
        'compat: for &x in &checks {
            for a in 0..alg.dim() {
                let lhs = self.left.restrict_to_h().action(x).mul(&self.right_action[a]);
                let mut rhs = Mat::zeros(f, d, d);
                for (j, k, c) in h.coproduct(x) {
                    let ha = a2.haction().action(*k).column(a);
                    let mut t = self.right_action_of(&ha).mul(self.left.restrict_to_h().action(*j));
                    if h.parity(*k) == 1 {
                        t = t.mul(&par);
                    }
                    rhs = rhs.add(&t.scale(c));
                }
                if lhs != rhs {
                    fails.push("right action compatibility with H".into());
                    break 'compat;
                }
            }
        }
        fails
    }

    /// A as an (A, A)-bimodule.
    pub fn regular(a: &ModuleAlgebra) -> Bimodule {
        let alg = a.algebra();
        let right = (0..alg.dim()).map(|j| alg.right_mult(j)).collect();
        Bimodule { left: BModule::regular(a), right_algebra: a.clone(), right_action: right }
    }

    /// A₂ as an (A₂, A₁)-bimodule through φ: A₁ → A₂.
    pub fn along(phi: &AlgebraMorphism) -> Bimodule {
        let t = phi.target.algebra();
        let right = (0..phi.source.dim())
            .map(|j| {
                let img = phi.matrix.column(j);
                let mut acc = Mat::zeros(t.field(), t.dim(), t.dim());
                for (k, c) in img.iter().enumerate() {
                    if !t.field().is_zero(c) {
                        acc = acc.add(&t.right_mult(k).scale(c));
                    }
                }
                acc
            })
            .collect();
        Bimodule { left: BModule::regular(&phi.target), right_algebra: phi.source.clone(), right_action: right }
    }

    /// The projective bimodule Ae⊗e'A (e, e' idempotent elements), H acting trivially.
    pub fn projective(a: &ModuleAlgebra, e: &[Scalar], e2: &[Scalar]) -> Result<(Bimodule, Mat), DerivedError> {
        if !a.has_trivial_action() {
            return Err(DerivedError::NontrivialAction);
        }
        let alg = a.algebra();
        let f = a.field();
        let d = alg.dim();
        let right_e = (0..d).map(|j| alg.right_mult(j).scale(&e[j])).fold(Mat::zeros(f, d, d), |x, y| x.add(&y));
        let left_e2 = (0..d).map(|j| alg.left_mult(j).scale(&e2[j])).fold(Mat::zeros(f, d, d), |x, y| x.add(&y));
        let ae = homogeneous_image(&right_e, alg.grading());
        let ea = homogeneous_image(&left_e2, alg.grading());
        let basis = ae.kron(&ea);
        let grading: Vec<i64> = (0..ae.cols())
            .flat_map(|i| (0..ea.cols()).map(move |j| (i, j)))
            .map(|(i, j)| first_degree(f, &ae.column(i), alg.grading()) + first_degree(f, &ea.column(j), alg.grading()))
            .collect();
        let ambient_left: Vec<Mat> = (0..d).map(|i| alg.left_mult(i).kron(&Mat::identity(f, d))).collect();
        let ambient_right: Vec<Mat> = (0..d).map(|j| Mat::identity(f, d).kron(&alg.right_mult(j))).collect();
        let restrict = |m: &Mat| -> Result<Mat, DerivedError> {
            basis.solve(&m.mul(&basis))?.ok_or_else(|| DerivedError::Resolution("summand not stable".into()))
        };
        let left: Vec<Mat> = ambient_left.iter().map(&restrict).collect::<Result<_, _>>()?;
        let right: Vec<Mat> = ambient_right.iter().map(&restrict).collect::<Result<_, _>>()?;
        let triv = (0..a.hopf().dim())
            .map(|i| Mat::identity(f, basis.cols()).scale(a.hopf().counit(i)))
            .collect();
        let hm = HModule::new(a.hopf().clone(), triv, grading)?;
        let lm = BModule::new(a.clone(), left, hm)?;
        Ok((Bimodule::new(lm, a.clone(), right)?, basis))
    }

    pub fn direct_sum(&self, o: &Bimodule) -> Result<Bimodule, DerivedError> {
        let left = self.left.direct_sum(&o.left)?;
        let right = self.right_action.iter().zip(&o.right_action).map(|(x, y)| x.direct_sum(y)).collect();
        Ok(Bimodule { left, right_algebra: self.right_algebra.clone(), right_action: right })
    }
}

fn first_degree(f: &crate::exactla::Field, v: &[Scalar], grading: &[i64]) -> i64 {
    let i = v.iter().position(|x| !f.is_zero(x)).expect("nonzero");
    grading[i]
}

/// Independent homogeneous columns spanning the image of a degree-preserving map.
fn homogeneous_image(m: &Mat, _grading: &[i64]) -> Mat {
    let piv = m.pivot_columns();
    m.select_columns(&piv)
}

/// X ⊗_{A₂} M as a left B₁-module, with the quotient map from X⊗M.
pub fn tensor_over(x: &Bimodule, m: &BModule) -> Result<(BModule, Mat), DerivedError> {
    if &x.right_algebra != m.algebra() {
        return Err(BModuleError::AlgebraMismatch.into());
    }
    let f = m.field();
    let total_h = hmod::tensor(x.left.restrict_to_h(), m.restrict_to_h())?;
    let idm = Mat::identity(f, m.dim());
    let idx = Mat::identity(f, x.dim());
    let left = x.left.a_actions().iter().map(|l| l.kron(&idm)).collect();
    let total = BModule::new_unchecked(x.left.algebra().clone(), left, total_h);
    let rels: Vec<Mat> =
        (0..x.right_action.len()).map(|a| x.right_action[a].kron(&idm).sub(&idx.kron(m.a_action(a)))).collect();
    let all = rels.iter().skip(1).fold(rels[0].clone(), |acc, r| acc.hstack(r));
    let piv = all.pivot_columns();
    let span = all.select_columns(&piv);
    if span.cols() == 0 {
        return Ok((total, Mat::identity(f, x.dim() * m.dim())));
    }
    Ok(total.quotient(&span)?)
}

/// Hom_{A₁}(X, M) as a left B₂-module, (a·f)(x) = f(x·a).
pub fn hom_from_bimodule(x: &Bimodule, m: &BModule) -> Result<BModule, DerivedError> {
    let e = hopfomod::enriched_hom(&x.left, m)?;
    let f = m.field();
    let actions = x
        .right_action
        .iter()
        .map(|r| {
            let imgs: Vec<Vec<Scalar>> = (0..e.module.dim())
                .map(|c| {
                    let fm = e.to_matrix(&Mat::identity(f, e.module.dim()).column(c)).mul(r);
                    e.coordinates(&fm).ok_or_else(|| DerivedError::Resolution("Hom not stable under A₂".into()))
                })
                .collect::<Result<_, _>>()?;
            Ok(Mat::from_columns(f, e.module.dim(), &imgs))
        })
        .collect::<Result<Vec<_>, DerivedError>>()?;
    Ok(BModule::new(x.right_algebra.clone(), actions, e.module)?)
}

/// One step of an iterated cone: C_m = Cone(δ̃_m: S_m → C_{m−1}).
#[derive(Clone, Debug)]
pub struct TowerStage {
    pub source: BModule,
    pub delta_tilde: Mat,
    pub triangle: hopfomod::TriangleData,
}

/// Iterated cones of a complex X_N → … → X_0 of B-modules (δ̃ lifted through H/kΛ at each step).
#[derive(Clone, Debug)]
pub struct ConeTower {
    pub complex: Vec<BModule>,
    pub diffs: Vec<Mat>,
    pub stages: Vec<TowerStage>,
    /// Tensor powers (H/kΛ)^{⊗k}, k = 0…
    pub q_powers: Vec<HModule>,
    /// A linear lift H/kΛ → H of the projection.
    pub lift: Mat,
}

impl ConeTower {
    /// C_m (C_0 = X_0).
    pub fn module(&self, m: usize) -> &BModule {
        if m == 0 {
            &self.complex[0]
        } else {
            &self.stages[m - 1].triangle.cone
        }
    }

    pub fn top(&self) -> &BModule {
        self.module(self.stages.len())
    }

    /// Bases of the images of C_0 ⊂ C_1 ⊂ … ⊂ C_top inside C_top.
    pub fn filtration(&self) -> Vec<Mat> {
        let top = self.stages.len();
        let mut out = Vec::new();
        for k in 0..=top {
            let mut e = Mat::identity(self.module(k).field(), self.module(k).dim());
            for s in &self.stages[k..] {
                e = s.triangle.v.matrix.mul(&e);
            }
            out.push(e);
        }
        out
    }

    /// The lifted map δ̃ from X_m ⊗ (H/kΛ)^{⊗(m−1)} into C_{m−1} for a map d: X_m → X_{m−1}.
    pub fn lifted(&self, d: &Mat) -> Mat {
        let m = self.stages.len() + 1;
        if m == 1 {
            return d.clone();
        }
        let f = self.lift.field();
        let prev = &self.stages[m - 2];
        let qp = &self.q_powers[m - 2];
        let top = d.kron(&Mat::identity(f, qp.dim())).kron(&self.lift);
        let below = self.module(m - 2).dim();
        prev.triangle.quotient.mul(&top.vstack(&Mat::zeros(f, below, top.cols())))
    }

    /// Builds stages up to C_{len−1} for the complex; refuses when a stage would exceed `cap`.
    pub fn build(complex: Vec<BModule>, diffs: Vec<Mat>, cap: usize) -> Result<ConeTower, DerivedError> {
        let x0 = &complex[0];
        let h = x0.hopf().clone();
        let f = h.field().clone();
        let (qmod, proj) = hmod::integral_quotient(&h);
        let comp = Mat::column_vector(&f, h.integral()).complement_standard();
        let lift = Mat::identity(&f, h.dim()).select_columns(&comp);
        debug_assert!(proj.mul(&lift).is_identity());
        let mut q_powers = vec![HModule::trivial(&h, 0)];
        let mut tower = ConeTower { complex, diffs, stages: Vec::new(), q_powers: Vec::new(), lift };
        for m in 1..tower.complex.len() {
            while q_powers.len() < m {
                let next = hmod::tensor(q_powers.last().expect("nonempty"), &qmod)?;
                q_powers.push(next);
            }
            tower.q_powers = q_powers.clone();
            let xm = &tower.complex[m];
            let qpow = &q_powers[m - 1];
            let predicted = xm.dim() * qpow.dim() * (h.dim() - 1) + tower.top().dim();
            if predicted > cap {
                return Err(DerivedError::TooLarge { dim: predicted, cap });
            }
            let source = xm.tensor_h(qpow)?;
            let dt = tower.lifted(&tower.diffs[m - 1]);
            let map = BLinearMap::new(source.clone(), tower.top().clone(), dt.clone())?;
            let triangle = hopfomod::cone(&map)?;
            tower.stages.push(TowerStage { source, delta_tilde: dt, triangle });
        }
        while q_powers.len() < tower.complex.len() {
            let next = hmod::tensor(q_powers.last().expect("nonempty"), &qmod)?;
            q_powers.push(next);
        }
        tower.q_powers = q_powers;
        Ok(tower)
    }

    /// A map C_top → M extending e: X_0 → M (which must kill the image of d₁).
    pub fn extend_augmentation(&self, e: &Mat) -> Mat {
        let f = e.field();
        let mut cur = e.clone();
        for s in &self.stages {
            let src_h = s.source.dim() * self.lift.rows();
            let total = Mat::zeros(f, cur.rows(), src_h).hstack(&cur);
            cur = total.mul(&s.triangle.inclusion);
        }
        cur
    }
}

/// Face sum δ: A^{⊗(k+1)} → A^{⊗k}, Σ (±1)ⁱ dᵢ with dᵢ multiplying positions i, i+1.
pub fn bar_differential(a: &ModuleAlgebra, k: usize, signed: bool) -> Mat {
    let alg = a.algebra();
    let f = a.field();
    let d = alg.dim();
    let mult = alg.mult().transpose();
    let mut acc = Mat::zeros(f, d.pow(k as u32), d.pow(k as u32 + 1));
    for i in 0..k {
        let face = Mat::identity(f, d.pow(i as u32)).kron(&mult).kron(&Mat::identity(f, d.pow((k - 1 - i) as u32)));
        acc = if signed && i % 2 == 1 { acc.sub(&face) } else { acc.add(&face) };
    }
    acc
}

/// A^{⊗k} as a B-module (A acting on the first factor) with the right action on the last factor.
fn bar_term(a: &ModuleAlgebra, k: usize) -> Result<(BModule, Vec<Mat>), DerivedError> {
    let mut rest = HModule::trivial(a.hopf(), 0);
    for _ in 1..k {
        rest = hmod::tensor(&rest, a.haction())?;
    }
    let f = a.field();
    let base = BModule::regular(a).tensor_h(&rest)?;
    let dim_rest = rest.dim();
    let alg = a.algebra();
    let right = if k == 1 {
        (0..alg.dim()).map(|j| alg.right_mult(j)).collect()
    } else {
        let d = alg.dim();
        let pre = Mat::identity(f, d.pow(k as u32 - 1));
        (0..d).map(|j| pre.kron(&alg.right_mult(j))).collect()
    };
    let _ = dim_rest;
    Ok((base, right))
}

/// The ground-indexed part A^{(k)} = ker(δ: A^{⊗k} → A^{⊗(k−1)}) of the extra-degeneracy splitting.
pub fn degeneracy_summand(a: &ModuleAlgebra, k: usize) -> Result<HModule, DerivedError> {
    let (term, _) = bar_term(a, k)?;
    if k == 1 {
        return Ok(term.restrict_to_h().clone());
    }
    let dmat = bar_differential(a, k - 1, true);
    let ker = kernel_homogeneous(&dmat, term.restrict_to_h());
    let grading = ker.columns().iter().map(|c| first_degree(term.field(), c, term.grading())).collect();
    Ok(term.restrict_to_h().submodule(&ker, grading)?)
}

fn kernel_homogeneous(m: &Mat, v: &HModule) -> Mat {
    let f = v.field();
    let mut cols = Vec::new();
    for (_, idx) in hmod::degree_pieces(v.hopf(), v.grading()) {
        let ns = m.select_columns(&idx).nullspace();
        for c in 0..ns.cols() {
            let mut vec = vec![f.zero(); v.dim()];
            for (t, &i) in idx.iter().enumerate() {
                vec[i] = ns.get(t, c).clone();
            }
            cols.push(vec);
        }
    }
    Mat::from_columns(f, v.dim(), &cols)
}

/// Stage C_n of the bar construction: cones C_{−1} = A ⊂ C_0 ⊂ … ⊂ C_n.
#[derive(Clone, Debug)]
pub struct BarStage {
    pub algebra: ModuleAlgebra,
    pub n: usize,
    pub tower: ConeTower,
    /// Right A-action on C_n.
    pub right_action: Vec<Mat>,
    /// δ̃_{n+1}: A^{⊗(n+3)}⊗(H/kΛ)^{⊗(n+1)} → C_n.
    pub delta_tilde_next: Mat,
}

impl BarStage {
    pub fn module(&self) -> &BModule {
        self.tower.top()
    }
    /// F⁰ ⊂ … ⊂ F^{n+1} = C_n.
    pub fn filtration(&self) -> Vec<Mat> {
        self.tower.filtration()
    }
}

/// Builds C_n; `max_stage` and `cap` bound the work.
pub fn bar_stage(a: &ModuleAlgebra, n: usize, max_stage: usize, cap: usize) -> Result<BarStage, DerivedError> {
    if n > max_stage {
        return Err(DerivedError::StageRange(n, max_stage));
    }
    let h = a.hopf();
    let predicted: usize = (0..=n + 1).map(|k| a.dim().pow(k as u32 + 1) * (h.dim() - 1).pow(k as u32)).sum();
    if predicted > cap {
        return Err(DerivedError::TooLarge { dim: predicted, cap });
    }
    let mut complex = Vec::new();
    let mut rights = Vec::new();
    let mut diffs = Vec::new();
    for k in 0..=n + 1 {
        let (t, r) = bar_term(a, k + 1)?;
        complex.push(t);
        rights.push(r);
        if k >= 1 {
            diffs.push(bar_differential(a, k, true));
        }
    }
    let tower = ConeTower::build(complex, diffs, cap)?;
    let right_action = tower_right_action(&tower, &rights, a);
    let next = bar_differential(a, n + 2, true);
    let delta_tilde_next = tower.lifted(&next);
    Ok(BarStage { algebra: a.clone(), n, tower, right_action, delta_tilde_next })
}

fn tower_right_action(tower: &ConeTower, rights: &[Vec<Mat>], a: &ModuleAlgebra) -> Vec<Mat> {
    let f = a.field();
    let h = a.hopf();
    let mut cur = rights[0].clone();
    for (m, s) in tower.stages.iter().enumerate() {
        let m = m + 1;
        let tail = hmod::tensor(&tower.q_powers[m - 1], &HModule::regular(h, -h.integral_degree())).expect("same hopf");
        let par = tail.parity_operator();
        cur = (0..a.dim())
            .map(|j| {
                let mut r = rights[m][j].kron(&Mat::identity(f, tail.dim()));
                if a.parity(j) == 1 {
                    r = rights[m][j].kron(&par);
                }
                s.triangle.quotient.mul(&r.direct_sum(&cur[j])).mul(&s.triangle.inclusion)
            })
            .collect();
    }
    cur
}

/// Which δ̃ the annihilation check uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BarVariant {
    Lifted,
    /// Faces summed without alternating signs: not a differential, so the identity must fail.
    UnsignedFaces,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BarReport {
    pub module_axioms: bool,
    pub filtration: bool,
    pub annihilation: bool,
    /// None when no stable comparison is available for this Hopf algebra.
    pub stable_shape: Option<bool>,
    pub details: Vec<String>,
}

impl BarReport {
    pub fn all_pass(&self) -> bool {
        self.module_axioms && self.filtration && self.annihilation && self.stable_shape != Some(false)
    }
}

/// Runs the four stage checks.
pub fn bar_checks(stage: &BarStage, variant: BarVariant) -> Result<BarReport, DerivedError> {
    let a = &stage.algebra;
    let h = a.hopf();
    let f = h.field();
    let n = stage.n;
    let c = stage.module();
    let mut details = Vec::new();
    // (i)
    let mut fails = c.verify();
    let bm = Bimodule { left: c.clone(), right_algebra: a.clone(), right_action: stage.right_action.clone() };
    if h.is_cocommutative() {
        fails.extend(bm.verify());
    } else {
        for r in &stage.right_action {
            if c.a_actions().iter().any(|l| l.mul(r) != r.mul(l)) {
                fails.push("left and right actions commute".into());
                break;
            }
        }
    }
    details.extend(fails.iter().map(|s| format!("(i) {s}")));
    let module_axioms = fails.is_empty();
    // (ii)
    let filt = stage.filtration();
    let mut filtration = filt.len() == n + 2;
    let mut prev = 0;
    for (k, basis) in filt.iter().enumerate() {
        let r = basis.rank();
        let want = a.dim().pow(k as u32 + 1) * (h.dim() - 1).pow(k as u32);
        if r != basis.cols() || r - prev != want {
            filtration = false;
            details.push(format!("(ii) F^{k}/F^{} has dim {} (want {want})", k as i64 - 1, r - prev));
        }
        let mut ops: Vec<&Mat> = c.a_actions().iter().collect();
        ops.extend(stage.right_action.iter());
        for g in h.generators() {
            ops.push(c.restrict_to_h().action(g));
        }
        if ops.iter().any(|op| !basis.spans(&op.mul(basis))) {
            filtration = false;
            details.push(format!("(ii) F^{k} is not a sub-bimodule"));
        }
        prev = r;
    }
    // (iii)
    let signed = variant == BarVariant::Lifted;
    let dt = match variant {
        BarVariant::Lifted => stage.delta_tilde_next.clone(),
        BarVariant::UnsignedFaces => stage.tower.lifted(&bar_differential(a, n + 2, false)),
    };
    let after = bar_differential(a, n + 3, signed);
    let qdim = stage.tower.q_powers[n + 1].dim();
    let annihilation = dt.mul(&after.kron(&Mat::identity(f, qdim))).is_zero();
    if !annihilation {
        details.push("(iii) δ̃∘(δ⊗Id) ≠ 0".into());
    }
    // (iv)
    let summand = degeneracy_summand(a, n + 2)?;
    let expected = hmod::tensor(&summand, &stage.tower.q_powers[n + 1])?;
    let got = c.restrict_to_h();
    let stable_shape = if crate::sample::has_nilpotent_generator(h) {
        let same = hmod::jordan_type_mod_free(got)? == hmod::jordan_type_mod_free(&expected)?;
        if !same {
            details.push("(iv) Jordan types modulo free blocks differ".into());
        }
        Some(same)
    } else if h.is_cocommutative() && hmod::is_projective(got) == hmod::is_projective(&expected) {
        let same = hmod::stable_invariants(got).graded == hmod::stable_invariants(&expected).graded;
        if !same {
            details.push("(iv) stable invariants differ".into());
        }
        Some(same)
    } else {
        None
    };
    // the splitting A^{⊗k} = A^{(k)} ⊕ s(A^{(k−1)}) used by (iv)
    if n + 2 >= 2 {
        let k = n + 2;
        let lower = degeneracy_summand(a, k - 1)?;
        if summand.dim() + lower.dim() != a.dim().pow(k as u32) {
            details.push("(iv) extra-degeneracy splitting has the wrong dimension".into());
            filtration = false;
        }
    }
    Ok(BarReport { module_axioms, filtration, annihilation, stable_shape, details })
}

/// A finite complex of projective (A, A)-bimodules resolving A (A with trivial H-action).
#[derive(Clone, Debug)]
pub struct BimoduleResolution {
    pub algebra: ModuleAlgebra,
    pub terms: Vec<Bimodule>,
    /// d_k: P_k → P_{k−1}, k ≥ 1.
    pub diffs: Vec<Mat>,
    /// P_0 → A.
    pub augmentation: Mat,
}

impl BimoduleResolution {
    /// Checks d∘d = 0, exactness and that the augmentation is a surjective bimodule map.
    pub fn validate(&self) -> Result<(), DerivedError> {
        let bad = |s: &str| Err(DerivedError::Resolution(s.to_string()));
        if !self.algebra.has_trivial_action() {
            return Err(DerivedError::NontrivialAction);
        }
        let reg = Bimodule::regular(&self.algebra);
        let mut maps: Vec<(&Mat, &Bimodule, &Bimodule)> = vec![(&self.augmentation, &self.terms[0], &reg)];
        for (k, d) in self.diffs.iter().enumerate() {
            maps.push((d, &self.terms[k + 1], &self.terms[k]));
        }
        for (m, s, t) in &maps {
            for (ls, lt) in s.left.a_actions().iter().zip(t.left.a_actions()) {
                if m.mul(ls) != lt.mul(m) {
                    return bad("differential is not left A-linear");
                }
            }
            for (rs, rt) in s.right_action.iter().zip(&t.right_action) {
                if m.mul(rs) != rt.mul(m) {
                    return bad("differential is not right A-linear");
                }
            }
            if !hmod::is_homogeneous_map(m, s.left.restrict_to_h(), t.left.restrict_to_h(), 0) {
                return bad("differential is not of degree 0");
            }
        }
        if self.augmentation.rank() != self.algebra.dim() {
            return bad("augmentation not surjective");
        }
        // exactness at every P_k
        let mut incoming_rank = self.algebra.dim();
        let mut prev = &self.augmentation;
        for (k, d) in self.diffs.iter().enumerate() {
            if !prev.mul(d).is_zero() {
                return bad("d∘d ≠ 0");
            }
            let dim_k = self.terms[k].dim();
            if d.rank() != dim_k - incoming_rank {
                return bad("not exact");
            }
            incoming_rank = d.rank();
            prev = d;
        }
        let last = self.terms.len() - 1;
        if self.terms[last].dim() != incoming_rank {
            return bad("last differential not injective");
        }
        Ok(())
    }

    /// A = A e₁⊗e₁A … for A semisimple with the listed orthogonal idempotents summing to 1.
    pub fn semisimple(a: &ModuleAlgebra, idempotents: &[Vec<Scalar>]) -> Result<BimoduleResolution, DerivedError> {
        let mut p0: Option<Bimodule> = None;
        let mut bases = Vec::new();
        for e in idempotents {
            let (b, basis) = Bimodule::projective(a, e, e)?;
            bases.push(basis);
            p0 = Some(match p0 {
                None => b,
                Some(p) => p.direct_sum(&b)?,
            });
        }
        let p0 = p0.ok_or_else(|| DerivedError::Resolution("no idempotents".into()))?;
        let aug = multiplication_on(a, &bases);
        Ok(BimoduleResolution { algebra: a.clone(), terms: vec![p0], diffs: vec![], augmentation: aug })
    }

    /// 0 → ⊕_α Ae_{t(α)}⊗e_{s(α)}A → ⊕_i Ae_i⊗e_iA → A → 0 for a path algebra without relations.
    /// `arrows` lists (arrow element, source vertex, target vertex) with α = e_t α e_s.
    pub fn hereditary(
        a: &ModuleAlgebra,
        vertices: &[Vec<Scalar>],
        arrows: &[(Vec<Scalar>, usize, usize)],
    ) -> Result<BimoduleResolution, DerivedError> {
        let f = a.field();
        let alg = a.algebra();
        let d = alg.dim();
        let mut res = BimoduleResolution::semisimple(a, vertices)?;
        let mut p1: Option<Bimodule> = None;
        let mut p1_bases = Vec::new();
        for (_, s, t) in arrows {
            let (b, basis) = Bimodule::projective(a, &vertices[*t], &vertices[*s])?;
            p1_bases.push(basis);
            p1 = Some(match p1 {
                None => b,
                Some(p) => p.direct_sum(&b)?,
            });
        }
        let Some(p1) = p1 else {
            return Ok(res);
        };
        // ambient embedding of P_0 in (A⊗A)^{#vertices}
        let p0_bases: Vec<Mat> = vertices.iter().map(|e| Bimodule::projective(a, e, e).map(|x| x.1)).collect::<Result<_, _>>()?;
        let amb0 = p0_bases.iter().skip(1).fold(p0_bases[0].clone(), |acc, b| acc.direct_sum(b));
        let mut dmat = Mat::zeros(f, res.terms[0].dim(), p1.dim());
        let mut col_off = 0;
        for ((alpha, s, t), basis) in arrows.iter().zip(&p1_bases) {
            // generator e_t⊗e_s ↦ α⊗e_s (in the e_s block) − e_t⊗α (in the e_t block)
            let mut g = vec![f.zero(); amb0.rows()];
            let put = |g: &mut Vec<Scalar>, block: usize, x: &[Scalar], y: &[Scalar], sign: bool| {
                for i in 0..d {
                    for j in 0..d {
                        let v = f.mul(&x[i], &y[j]);
                        if !f.is_zero(&v) {
                            let idx = block * d * d + i * d + j;
                            g[idx] = if sign { f.sub(&g[idx], &v) } else { f.add(&g[idx], &v) };
                        }
                    }
                }
            };
            put(&mut g, *s, alpha, &vertices[*s], false);
            put(&mut g, *t, &vertices[*t], alpha, true);
            // each basis vector u⊗v of Ae_t⊗e_sA maps to u·g·v
            for c in 0..basis.cols() {
                let uv = basis.column(c);
                let mut img = vec![f.zero(); amb0.rows()];
                for (pos, coef) in uv.iter().enumerate() {
                    if f.is_zero(coef) {
                        continue;
                    }
                    let (u, v) = (pos / d, pos % d);
                    for blk in 0..vertices.len() {
                        for i in 0..d {
                            for j in 0..d {
                                let gv = &g[blk * d * d + i * d + j];
                                if f.is_zero(gv) {
                                    continue;
                                }
                                for (k1, c1) in alg.product(u, i) {
                                    for (k2, c2) in alg.product(j, v) {
                                        let idx = blk * d * d + k1 * d + k2;
                                        img[idx] = f.add(&img[idx], &f.mul(coef, &f.mul(gv, &f.mul(c1, c2))));
                                    }
                                }
                            }
                        }
                    }
                }
                let coords = amb0
                    .solve(&Mat::column_vector(f, &img))?
                    .ok_or_else(|| DerivedError::Resolution("differential leaves P_0".into()))?;
                for r in 0..coords.rows() {
                    dmat.set(r, col_off + c, coords.get(r, 0).clone());
                }
            }
            col_off += basis.cols();
        }
        res.terms.push(p1);
        res.diffs.push(dmat);
        res.validate()?;
        Ok(res)
    }

    /// Adds a contractible summand Q → Q (Q = Ae⊗e'A) in degrees k+1, k: another resolution of A.
    pub fn with_contractible(&self, k: usize, e: &[Scalar], e2: &[Scalar]) -> Result<BimoduleResolution, DerivedError> {
        let f = self.algebra.field();
        let (q, _) = Bimodule::projective(&self.algebra, e, e2)?;
        let qd = q.dim();
        let mut out = self.clone();
        while out.terms.len() < k + 2 {
            // pad with zero bimodules
            let zero_left = BModule::new_unchecked(
                self.algebra.clone(),
                vec![Mat::zeros(f, 0, 0); self.algebra.dim()],
                HModule::zero(self.algebra.hopf()),
            );
            let z = Bimodule { left: zero_left, right_algebra: self.algebra.clone(), right_action: vec![Mat::zeros(f, 0, 0); self.algebra.dim()] };
            let prev_dim = out.terms.last().expect("nonempty").dim();
            out.terms.push(z);
            out.diffs.push(Mat::zeros(f, prev_dim, 0));
        }
        let old_k = out.terms[k].dim();
        let old_k1 = out.terms[k + 1].dim();
        out.terms[k] = out.terms[k].direct_sum(&q)?;
        out.terms[k + 1] = out.terms[k + 1].direct_sum(&q)?;
        // d_{k+1} gains the identity block; neighbouring maps gain zero rows/cols
        out.diffs[k] = out.diffs[k].direct_sum(&Mat::identity(f, qd));
        if k == 0 {
            out.augmentation = out.augmentation.hstack(&Mat::zeros(f, self.algebra.dim(), qd));
        } else {
            out.diffs[k - 1] = out.diffs[k - 1].vstack(&Mat::zeros(f, qd, out.diffs[k - 1].cols()));
        }
        if k + 1 < out.diffs.len() {
            out.diffs[k + 1] = out.diffs[k + 1].vstack(&Mat::zeros(f, qd, out.diffs[k + 1].cols()));
        }
        let _ = (old_k, old_k1);
        out.validate()?;
        Ok(out)
    }
}

/// Multiplication ⊕ Ae⊗e'A → A given the ambient bases of the summands.
fn multiplication_on(a: &ModuleAlgebra, bases: &[Mat]) -> Mat {
    let mult = a.algebra().mult().transpose();
    let blocks: Vec<Mat> = bases.iter().map(|b| mult.mul(b)).collect();
    blocks.iter().skip(1).fold(blocks[0].clone(), |acc, b| acc.hstack(b))
}

/// A finite cofibrant model of M: a surjective quasi-isomorphism P → M.
#[derive(Clone, Debug)]
pub struct FiniteReplacement {
    pub p: BModule,
    pub epi: BLinearMap,
    pub quasi_iso: bool,
    /// F⁰ ⊂ … ⊂ P, each subquotient of the form (projective A-module)⊗V.
    pub filtration: Vec<Mat>,
}

/// Lifts P_•⊗_A M through iterated cones (trivial H-action on A).
pub fn finite_cofibrant_replacement(m: &BModule, res: &BimoduleResolution) -> Result<FiniteReplacement, DerivedError> {
    res.validate()?;
    if m.algebra() != &res.algebra {
        return Err(BModuleError::AlgebraMismatch.into());
    }
    let f = m.field();
    let mut complex = Vec::new();
    let mut quots = Vec::new();
    let mut incls = Vec::new();
    for p in &res.terms {
        let (x, q) = tensor_over(p, m)?;
        let iota = right_inverse_inclusion(&q);
        complex.push(x);
        quots.push(q);
        incls.push(iota);
    }
    let idm = Mat::identity(f, m.dim());
    let diffs: Vec<Mat> =
        res.diffs.iter().enumerate().map(|(k, d)| quots[k].mul(&d.kron(&idm)).mul(&incls[k + 1])).collect();
    // P_0⊗_A M → A⊗_A M = M, x⊗m ↦ μ(x)·m
    let aug = &res.augmentation;
    let p0 = &res.terms[0];
    let mut e = Mat::zeros(f, m.dim(), p0.dim() * m.dim());
    for x in 0..p0.dim() {
        let act = m.a_action_of(&aug.column(x));
        for j in 0..m.dim() {
            for r in 0..m.dim() {
                e.set(r, x * m.dim() + j, act.get(r, j).clone());
            }
        }
    }
    let e0 = e.mul(&incls[0]);
    let tower = ConeTower::build(complex, diffs, DEFAULT_DIM_CAP)?;
    let epi_mat = tower.extend_augmentation(&e0);
    let p = tower.top().clone();
    let epi = BLinearMap::new(p.clone(), m.clone(), epi_mat)?;
    if epi.matrix.rank() != m.dim() {
        return Err(DerivedError::Resolution("augmentation not surjective".into()));
    }
    let quasi_iso = hopfomod::quasi_iso(&epi, false)?.is_quasi_iso;
    Ok(FiniteReplacement { filtration: tower.filtration(), p, epi, quasi_iso })
}

/// Inclusion of the kept standard basis vectors for a quotient map produced by `HModule::quotient`.
fn right_inverse_inclusion(q: &Mat) -> Mat {
    let f = q.field();
    let mut kept = Vec::new();
    for r in 0..q.rows() {
        let c = (0..q.cols())
            .find(|&c| f.is_one(q.get(r, c)) && (0..q.rows()).all(|r2| r2 == r || f.is_zero(q.get(r2, c))))
            .expect("quotient keeps standard basis vectors");
        kept.push(c);
    }
    Mat::identity(f, q.cols()).select_columns(&kept)
}

/// A B-module together with the reason it is cofibrant.
#[derive(Clone, Debug)]
pub struct Cofibrant {
    pub module: BModule,
    pub reason: String,
}

impl Cofibrant {
    /// A⊗V.
    pub fn free(a: &ModuleAlgebra, v: &HModule) -> Result<Cofibrant, DerivedError> {
        Ok(Cofibrant { module: BModule::free(a, v)?, reason: "free".into() })
    }
    /// Ae⊗V for an idempotent e, with H acting trivially on A.
    pub fn projective(a: &ModuleAlgebra, e: &[Scalar], v: &HModule) -> Result<Cofibrant, DerivedError> {
        if !a.has_trivial_action() {
            return Err(DerivedError::NontrivialAction);
        }
        let reg = BModule::regular(a);
        let alg = a.algebra();
        let f = a.field();
        let d = alg.dim();
        let right_e = (0..d).map(|j| alg.right_mult(j).scale(&e[j])).fold(Mat::zeros(f, d, d), |x, y| x.add(&y));
        let basis = homogeneous_image(&right_e, alg.grading());
        let (sub, _) = reg.submodule(&basis)?;
        Ok(Cofibrant { module: sub.tensor_h(v)?, reason: "projective summand of a free module".into() })
    }
    pub fn from_replacement(r: &FiniteReplacement) -> Cofibrant {
        Cofibrant { module: r.p.clone(), reason: "finite cofibrant replacement".into() }
    }
    pub fn from_bar_stage(s: &BarStage) -> Cofibrant {
        Cofibrant { module: s.module().clone(), reason: "bar stage (finite filtration by free pieces)".into() }
    }
    pub fn direct_sum(&self, o: &Cofibrant) -> Result<Cofibrant, DerivedError> {
        Ok(Cofibrant { module: self.module.direct_sum(&o.module)?, reason: format!("{} ⊕ {}", self.reason, o.reason) })
    }
}

/// X ⊗^L M computed as X ⊗_{A₂} P for a cofibrant model P of M.
pub fn derived_tensor(x: &Bimodule, p: Option<&Cofibrant>) -> Result<BModule, DerivedError> {
    let p = p.ok_or(DerivedError::TruncationRegime)?;
    Ok(tensor_over(x, &p.module)?.0)
}

/// RHom(P, M) = Hom_A(P, M) with its H-action, for cofibrant P.
pub fn derived_hom(p: Option<&Cofibrant>, m: &BModule) -> Result<HModule, DerivedError> {
    let p = p.ok_or(DerivedError::TruncationRegime)?;
    Ok(hopfomod::enriched_hom(&p.module, m)?.module)
}

/// Whether two derived tensor outputs agree stably (equal graded stable invariants, and equal
/// Jordan types modulo free blocks when available).
pub fn stably_equal(x: &BModule, y: &BModule) -> Result<bool, DerivedError> {
    let (a, b) = (x.restrict_to_h(), y.restrict_to_h());
    if hmod::stable_invariants(a).graded != hmod::stable_invariants(b).graded {
        return Ok(false);
    }
    if crate::sample::has_nilpotent_generator(a.hopf()) {
        return Ok(hmod::jordan_type_mod_free(a)? == hmod::jordan_type_mod_free(b)?);
    }
    Ok(true)
}

/// φ_*: B₂-modules → B₁-modules by pulling back the A-action.
pub fn restrict_along(phi: &AlgebraMorphism, n: &BModule) -> Result<BModule, DerivedError> {
    if n.algebra() != &phi.target {
        return Err(BModuleError::AlgebraMismatch.into());
    }
    let actions = (0..phi.source.dim()).map(|i| n.a_action_of(&phi.matrix.column(i))).collect();
    Ok(BModule::new(phi.source.clone(), actions, n.restrict_to_h().clone())?)
}

/// φ^* = A₂ ⊗^L_{A₁} (−) on a cofibrant B₁-module.
pub fn induce_along(phi: &AlgebraMorphism, m: Option<&Cofibrant>) -> Result<BModule, DerivedError> {
    derived_tensor(&Bimodule::along(phi), m)
}

/// Whether φ: A₁ → A₂ is a quasi-isomorphism (as a map of B₁-modules A₁ → φ_*A₂).
pub fn morphism_is_quasi_iso(phi: &AlgebraMorphism) -> Result<bool, DerivedError> {
    let src = BModule::regular(&phi.source);
    let tgt = restrict_along(phi, &BModule::regular(&phi.target))?;
    let map = BLinearMap::new(src, tgt, phi.matrix.clone())?;
    Ok(hopfomod::quasi_iso(&map, false)?.is_quasi_iso)
}

/// Unit of induction on a cofibrant M: m ↦ 1⊗m into φ_*φ^*M.
pub fn induction_unit(phi: &AlgebraMorphism, m: &Cofibrant) -> Result<BLinearMap, DerivedError> {
    let x = Bimodule::along(phi);
    let (ind, q) = tensor_over(&x, &m.module)?;
    let res = restrict_along(phi, &ind)?;
    let f = m.module.field();
    let one = phi.target.algebra().unit().to_vec();
    let mut mat = Mat::zeros(f, x.dim() * m.module.dim(), m.module.dim());
    for j in 0..m.module.dim() {
        for (i, c) in one.iter().enumerate() {
            if !f.is_zero(c) {
                mat.set(i * m.module.dim() + j, j, c.clone());
            }
        }
    }
    Ok(BLinearMap::new(m.module.clone(), res, q.mul(&mat))?)
}
