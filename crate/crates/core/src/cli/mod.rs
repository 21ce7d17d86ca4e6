//! Command-line front end. Exit status: 0 success/true, 1 false/none, 2 error.

pub mod doc;

use std::ffi::OsString;
use std::path::Path;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde_json::{json, Value};

use crate::exactla::{Mat, Scalar};
use crate::hmod::{self, HModule};
use crate::hopf::{self, format_combination, HopfRef};
use crate::hopfomod::{self, BLinearMap, BModule};
use crate::kzero::{self, BasicAlgebra};
use crate::modalg::{self, ModuleAlgebra};
use crate::resolve_derived::{self as rd, Bimodule, BimoduleResolution, Cofibrant};
use crate::sample;
use doc::{Entity, MapDoc};

#[derive(Parser, Debug)]
#[command(name = "hopfo", version, about = "Exact stable module calculus over finite-dimensional Hopf algebras")]
pub struct Cli {
    /// Emit a machine-readable JSON report.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Search bound (bar stages, random sizes).
    #[arg(long, global = true, default_value_t = rd::DEFAULT_MAX_STAGE)]
    pub effort: usize,
    /// Dimension cap for constructions that grow.
    #[arg(long = "max-dim", global = true, default_value_t = rd::DEFAULT_DIM_CAP)]
    pub max_dim: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Variant {
    Lifted,
    Unsigned,
}

/// Inputs are file paths or inline specs such as `hopf:p_dg:3`, `alg:poly_pdg:3`,
/// `hmod:trivial@p_dg:3`, `bmod:regular@dg_square_zero`, `bimod:regular@path_a2@p_dg:3`,
/// `map:lambda:trivial@p_dg:3`, `res:hereditary@path_a2@p_dg:3`.
#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the Hopf algebra axioms.
    VerifyHopf { input: Option<String>, #[arg(long)] builtin: Option<String> },
    /// The normalized integral.
    Integral { input: Option<String>, #[arg(long)] builtin: Option<String> },
    /// Print the document of an inline spec.
    Builtin { spec: String },
    /// Tensor product of H-modules.
    Tensor { m: String, n: String },
    /// Internal Hom of H-modules.
    Hom { m: String, n: String },
    /// Invariants of an H-module.
    Invariants { m: String },
    /// Stable invariants of an H-module.
    StableInvariants { m: String },
    /// Stable Hom between H-modules.
    StableHom { m: String, n: String },
    /// Whether an H-module is projective (acyclic); exit 1 if not.
    Acyclic { m: String },
    /// T(M), or T⁻¹(M) with --inverse.
    Shift { m: String, #[arg(long)] inverse: bool },
    /// Cone of a B-linear map.
    Cone { map: String },
    /// Triangle from an injective B-linear map and its cokernel.
    Triangle { map: String, #[arg(long)] require_split: bool },
    /// Whether a B-linear map is a quasi-isomorphism.
    QuasiIso { map: String },
    /// Morphisms in the homotopy category.
    HomotopyHom { m: String, n: String },
    /// A null-homotopy witness for a B-linear map; exit 1 if none.
    Witness { map: String },
    /// A contractibility certificate x with Λ·x = 1; exit 1 if none.
    Contractible { algebra: String },
    /// Smash product algebra.
    Smash { algebra: String },
    /// Opposite module algebra (cocommutative H only).
    Opposite { algebra: String },
    /// Bar stage checks.
    BarStage { algebra: String, #[arg(long, default_value_t = 0)] n: usize, #[arg(long, value_enum, default_value_t = Variant::Lifted)] variant: Variant },
    /// Finite cofibrant replacement of a B-module from a bimodule resolution.
    Replace { m: String, resolution: String, #[arg(long)] emit: bool },
    /// Derived tensor X ⊗ M.
    DerivedTensor { x: String, m: String, #[arg(long)] resolution: Option<String> },
    /// Derived Hom RHom(M, N).
    DerivedHom { m: String, n: String, #[arg(long)] resolution: Option<String> },
    /// Grothendieck ring of the stable category.
    K0Ring { input: Option<String>, #[arg(long)] builtin: Option<String> },
    /// Class of an H-module.
    K0Class { m: String },
    /// Pairing matrix [RHom(P_i, S_j)] for a basic algebra.
    K0Pairing { algebra: String, #[arg(long, value_delimiter = ',')] idempotents: Option<Vec<usize>> },
    /// Jordan type of the nilpotent generator.
    Jordan { m: String, #[arg(long)] modulo_free: bool },
    /// Slash cohomology dimensions.
    Slash { m: String, #[arg(long, default_value_t = 1)] q: usize },
    /// A random H-module (uses --seed and --max-dim).
    RandomModule { hopf: String },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Msg(String),
    #[error("{0}")]
    Doc(#[from] doc::DocError),
}

macro_rules! from_err {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Msg(e.to_string())
            }
        }
    )*};
}
from_err!(
    hmod::ModuleError,
    hopfomod::BModuleError,
    modalg::AlgebraError,
    rd::DerivedError,
    kzero::K0Error,
    hopf::HopfError,
    crate::exactla::LinAlgError,
    std::io::Error
);

fn err<T>(m: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Msg(m.into()))
}

pub struct Report {
    pub ok: bool,
    pub text: String,
    pub json: Value,
}

fn report(ok: bool, text: impl Into<String>, json: Value) -> Result<Report, CliError> {
    Ok(Report { ok, text: text.into(), json })
}

/// Runs the CLI on the given arguments and returns the exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (code, out) = run(&cli);
    if code == 2 {
        eprint!("{out}");
    } else {
        print!("{out}");
    }
    code
}

/// Runs a parsed command, returning the exit status and the text to print.
pub fn run(cli: &Cli) -> (i32, String) {
    match execute(cli) {
        Ok(r) => {
            let code = if r.ok { 0 } else { 1 };
            let out = if cli.json {
                let mut v = r.json;
                if let Value::Object(o) = &mut v {
                    o.insert("result".into(), Value::Bool(r.ok));
                }
                format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
            } else if r.text.ends_with('\n') {
                r.text
            } else {
                format!("{}\n", r.text)
            };
            (code, out)
        }
        Err(e) => {
            let out = if cli.json {
                format!("{}\n", json!({ "error": e.to_string() }))
            } else {
                format!("error: {e}\n")
            };
            (2, out)
        }
    }
}

fn hopf_spec(s: &str) -> Result<HopfRef, CliError> {
    Ok(Arc::new(hopf::builtin_from_spec(s)?))
}

fn hmod_named(name: &str, h: &HopfRef, cli: &Cli) -> Result<HModule, CliError> {
    let triv = HModule::trivial(h, 0);
    Ok(match name {
        "trivial" => triv,
        "regular" => HModule::regular(h, 0),
        "shift" => hmod::shift(&triv, 1)?,
        "unshift" => hmod::shift(&triv, -1)?,
        "augmentation" => hmod::augmentation_ideal(h).0,
        "integral_quotient" => hmod::integral_quotient(h).0,
        "zero" => HModule::zero(h),
        "random" => sample::module(h, cli.max_dim.min(8), &mut StdRng::seed_from_u64(cli.seed)),
        _ => return err(format!("unknown H-module name {name}")),
    })
}

/// Resolves a file path or inline spec.
pub fn load(input: &str, cli: &Cli) -> Result<Entity, CliError> {
    if Path::new(input).is_file() {
        return Ok(doc::parse(&std::fs::read_to_string(input)?)?);
    }
    let Some((prefix, rest)) = input.split_once(':') else {
        return err(format!("{input}: no such file, and not an inline spec"));
    };
    let at = |r: &str| -> Result<(String, String), CliError> {
        r.split_once('@').map(|(a, b)| (a.to_string(), b.to_string())).ok_or_else(|| CliError::Msg(format!("{input}: expected NAME@SPEC")))
    };
    Ok(match prefix {
        "hopf" => Entity::Hopf(hopf_spec(rest)?),
        "alg" => Entity::ModAlgebra(modalg::make_builtin_algebra(rest)?),
        "hmod" => {
            let (name, h) = at(rest)?;
            Entity::HModule(hmod_named(&name, &hopf_spec(&h)?, cli)?)
        }
        "bmod" => {
            let (name, spec) = at(rest)?;
            if let Some(hname) = name.strip_prefix("hmod-") {
                let h = hopf_spec(&spec)?;
                let v = hmod_named(hname, &h, cli)?;
                return Ok(Entity::BModule(BModule::from_hmodule(modalg::ground(&h), v)?));
            }
            let a = modalg::make_builtin_algebra(&spec)?;
            Entity::BModule(match name.as_str() {
                "regular" => BModule::regular(&a),
                "random" => sample::bmodule(&a, cli.max_dim.min(8), &mut StdRng::seed_from_u64(cli.seed)),
                n if n.starts_with("simple") => {
                    let j: usize = n.trim_start_matches("simple").trim_start_matches('-').parse().map_err(|_| CliError::Msg(format!("{n}: expected simpleJ")))?;
                    simple_module(&a, j)?
                }
                _ => return err(format!("unknown B-module name {name}")),
            })
        }
        "bimod" => {
            let (name, spec) = at(rest)?;
            let a = modalg::make_builtin_algebra(&spec)?;
            Entity::Bimodule(match name.as_str() {
                "regular" => Bimodule::regular(&a),
                n if n.starts_with("right-simple") => {
                    let j: usize = n.trim_start_matches("right-simple").trim_start_matches('-').parse().map_err(|_| CliError::Msg(format!("{n}: expected right-simpleJ")))?;
                    right_simple(&a, j)?
                }
                _ => return err(format!("unknown bimodule name {name}")),
            })
        }
        "map" => {
            let (name, spec) = at(rest)?;
            let (kind, obj) = name.split_once(':').unwrap_or((name.as_str(), "trivial"));
            let h = hopf_spec(&spec)?;
            let m = BModule::from_hmodule(modalg::ground(&h), hmod_named(obj, &h, cli)?)?;
            let f = match kind {
                "lambda" => hopfomod::lambda_embed(&m)?,
                "identity" => BLinearMap::identity(&m),
                "zero-into" => BLinearMap::zero(&BModule::from_hmodule(modalg::ground(&h), HModule::zero(&h))?, &m),
                _ => return err(format!("unknown map name {kind}")),
            };
            Entity::Map(MapDoc::B { source: f.source, target: f.target, matrix: f.matrix })
        }
        "res" => {
            let (name, spec) = at(rest)?;
            let a = modalg::make_builtin_algebra(&spec)?;
            Entity::Resolution(builtin_resolution(&name, &a, &spec)?)
        }
        _ => return err(format!("{input}: no such file, and unknown spec prefix {prefix}")),
    })
}

fn builtin_resolution(name: &str, a: &ModuleAlgebra, spec: &str) -> Result<BimoduleResolution, CliError> {
    let alg = a.algebra();
    let base = if spec.starts_with("path_a2") {
        BimoduleResolution::hereditary(a, &[alg.basis_vector(0), alg.basis_vector(1)], &[(alg.basis_vector(2), 0, 1)])?
    } else if spec.starts_with("kxk") || spec.starts_with("ground") {
        let ids: Vec<Vec<Scalar>> = (0..alg.dim()).map(|i| alg.basis_vector(i)).collect();
        BimoduleResolution::semisimple(a, &ids)?
    } else {
        return err(format!("no builtin resolution for {spec}"));
    };
    match name {
        "hereditary" | "standard" => Ok(base),
        "padded" => Ok(base.with_contractible(0, &alg.basis_vector(0), &alg.basis_vector(0))?),
        _ => err(format!("unknown resolution name {name}")),
    }
}

fn basic_idempotents(a: &ModuleAlgebra) -> Vec<usize> {
    let alg = a.algebra();
    let f = a.field();
    (0..alg.dim())
        .filter(|&i| alg.mul_elements(&alg.basis_vector(i), &alg.basis_vector(i)) == alg.basis_vector(i))
        .filter(|&i| f.is_one(&alg.unit()[i]))
        .collect()
}

fn simple_module(a: &ModuleAlgebra, j: usize) -> Result<BModule, CliError> {
    let ids = basic_idempotents(a);
    let b = BasicAlgebra::new(a.clone(), ids)?;
    if j >= b.idempotents.len() {
        return err(format!("simple {j} out of range"));
    }
    Ok(b.simple(j)?)
}

fn right_simple(a: &ModuleAlgebra, j: usize) -> Result<Bimodule, CliError> {
    let s = simple_module(a, j)?;
    let f = a.field();
    let k = modalg::ground(a.hopf());
    let right = s.a_actions().iter().map(|m| Mat::from_fn(f, 1, 1, |_, _| m.get(0, 0).clone())).collect();
    Ok(Bimodule::new(BModule::regular(&k), a.clone(), right)?)
}

fn as_hopf(e: Entity) -> Result<HopfRef, CliError> {
    match e {
        Entity::Hopf(h) => Ok(h),
        Entity::HModule(m) => Ok(m.hopf().clone()),
        Entity::ModAlgebra(a) => Ok(a.hopf().clone()),
        other => err(format!("expected a Hopf algebra, found {}", other.kind())),
    }
}

fn as_hmodule(e: Entity) -> Result<HModule, CliError> {
    match e {
        Entity::HModule(m) => Ok(m),
        Entity::BModule(m) => Ok(m.restrict_to_h().clone()),
        other => err(format!("expected an H-module, found {}", other.kind())),
    }
}

fn as_bmodule(e: Entity) -> Result<BModule, CliError> {
    match e {
        Entity::BModule(m) => Ok(m),
        Entity::HModule(m) => Ok(BModule::from_hmodule(modalg::ground(m.hopf()), m)?),
        other => err(format!("expected a B-module, found {}", other.kind())),
    }
}

fn as_modalg(e: Entity) -> Result<ModuleAlgebra, CliError> {
    match e {
        Entity::ModAlgebra(a) => Ok(a),
        other => err(format!("expected a module algebra, found {}", other.kind())),
    }
}

fn as_bmap(e: Entity) -> Result<BLinearMap, CliError> {
    match e {
        Entity::Map(MapDoc::B { source, target, matrix }) => Ok(BLinearMap::new(source, target, matrix)?),
        Entity::Map(MapDoc::H { source, target, matrix }) => {
            let k = modalg::ground(source.hopf());
            Ok(BLinearMap::new(BModule::from_hmodule(k.clone(), source)?, BModule::from_hmodule(k, target)?, matrix)?)
        }
        other => err(format!("expected a map, found {}", other.kind())),
    }
}

fn hopf_input(input: &Option<String>, builtin: &Option<String>, cli: &Cli) -> Result<HopfRef, CliError> {
    match (input, builtin) {
        (_, Some(b)) => hopf_spec(b),
        (Some(i), None) => as_hopf(load(i, cli)?),
        (None, None) => err("give an input file or --builtin SPEC"),
    }
}

fn graded_json(g: &hmod::GradedDims) -> Value {
    Value::Object(g.iter().map(|(d, n)| (d.to_string(), json!(n))).collect())
}

fn graded_text(g: &hmod::GradedDims) -> String {
    if g.is_empty() {
        return "none".into();
    }
    g.iter().map(|(d, n)| format!("deg {d}: {n}")).collect::<Vec<_>>().join(", ")
}

fn module_summary(m: &HModule) -> Value {
    json!({ "dim": m.dim(), "grading": m.grading() })
}

fn vec_text(f: &crate::exactla::Field, v: &[Scalar]) -> String {
    format!("[{}]", v.iter().map(|x| f.format(x)).collect::<Vec<_>>().join(", "))
}

fn emit_entity(e: &Entity) -> Result<Report, CliError> {
    let text = doc::serialize(e);
    let v: Value = serde_json::from_str(&text).expect("serialized json");
    report(true, text, json!({ "document": v }))
}

fn execute(cli: &Cli) -> Result<Report, CliError> {
    let ld = |s: &String| load(s, cli);
    match &cli.command {
        Command::VerifyHopf { input, builtin } => {
            let loaded = match (input, builtin) {
                (_, Some(b)) => hopf_spec(b).map(Entity::Hopf),
                (Some(i), None) => load(i, cli),
                (None, None) => return err("give an input file or --builtin SPEC"),
            };
            match loaded {
                Ok(e) => {
                    let h = as_hopf(e)?;
                    report(true, format!("Hopf algebra axioms hold (dim {})", h.dim()), json!({ "dim": h.dim(), "failures": [] }))
                }
                Err(CliError::Doc(doc::DocError::Semantic(m))) => {
                    report(false, format!("axioms fail: {m}"), json!({ "failures": [m] }))
                }
                Err(e) => Err(e),
            }
        }
        Command::Integral { input, builtin } => {
            let h = hopf_input(input, builtin, cli)?;
            let v = h.preferred_integral();
            let s = h.format_element(&v);
            report(
                true,
                s.clone(),
                json!({ "integral": s, "coefficients": v.iter().map(|x| h.field().format(x)).collect::<Vec<_>>(), "degree": h.integral_degree() }),
            )
        }
        Command::Builtin { spec } => emit_entity(&load(spec, cli)?),
        Command::Tensor { m, n } => {
            let t = hmod::tensor(&as_hmodule(ld(m)?)?, &as_hmodule(ld(n)?)?)?;
            emit_entity(&Entity::HModule(t))
        }
        Command::Hom { m, n } => {
            let t = hmod::hom(&as_hmodule(ld(m)?)?, &as_hmodule(ld(n)?)?)?;
            emit_entity(&Entity::HModule(t))
        }
        Command::Invariants { m } => {
            let v = as_hmodule(ld(m)?)?;
            let inv = hmod::invariants(&v);
            let f = v.field();
            let cols: Vec<String> = inv.columns().iter().map(|c| vec_text(f, c)).collect();
            report(true, format!("dim {}\n{}", inv.cols(), cols.join("\n")), json!({ "dim": inv.cols(), "basis": cols }))
        }
        Command::StableInvariants { m } => {
            let v = as_hmodule(ld(m)?)?;
            let s = hmod::stable_invariants(&v);
            report(true, format!("dim {} ({})", s.dim, graded_text(&s.graded)), json!({ "dim": s.dim, "graded": graded_json(&s.graded) }))
        }
        Command::StableHom { m, n } => {
            let (s, _) = hmod::stable_hom(&as_hmodule(ld(m)?)?, &as_hmodule(ld(n)?)?)?;
            report(true, format!("dim {} ({})", s.dim, graded_text(&s.graded)), json!({ "dim": s.dim, "graded": graded_json(&s.graded) }))
        }
        Command::Acyclic { m } => {
            let v = as_hmodule(ld(m)?)?;
            let w = hmod::is_stably_zero(&v);
            let ok = w.is_some();
            report(ok, if ok { "acyclic (projective)" } else { "not acyclic" }, json!({ "acyclic": ok, "module": module_summary(&v) }))
        }
        Command::Shift { m, inverse } => {
            let v = as_hmodule(ld(m)?)?;
            emit_entity(&Entity::HModule(hmod::shift(&v, if *inverse { -1 } else { 1 })?))
        }
        Command::Cone { map } => {
            let u = as_bmap(ld(map)?)?;
            let t = hopfomod::cone(&u)?;
            let kc = kzero::k0_triangle_check(&t).ok();
            report(
                true,
                format!("cone dim {} (ses exact: {})", t.cone.dim(), t.ses_exact),
                json!({ "cone": module_summary(t.cone.restrict_to_h()), "ses_exact": t.ses_exact, "k0_additive": kc }),
            )
        }
        Command::Triangle { map, require_split } => {
            let i = as_bmap(ld(map)?)?;
            if i.matrix.rank() != i.source.dim() {
                return err("triangle needs an injective map");
            }
            let img = i.matrix.select_columns(&i.matrix.pivot_columns());
            let (q, qm) = i.target.quotient(&img)?;
            let p = BLinearMap::new(i.target.clone(), q, qm)?;
            let t = hopfomod::triangle_from_ses(&i, &p, *require_split)?;
            let ok = t.comparison_is_quasi_iso;
            report(
                ok,
                format!(
                    "cokernel dim {}; cone dim {}; comparison quasi-iso: {}; A-split: {}",
                    p.target.dim(),
                    t.triangle.cone.dim(),
                    ok,
                    t.splitting.is_some()
                ),
                json!({ "cokernel_dim": p.target.dim(), "cone_dim": t.triangle.cone.dim(), "comparison_quasi_iso": ok, "a_split": t.splitting.is_some() }),
            )
        }
        Command::QuasiIso { map } => {
            let u = as_bmap(ld(map)?)?;
            let q = hopfomod::quasi_iso(&u, false)?;
            report(q.is_quasi_iso, if q.is_quasi_iso { "quasi-isomorphism" } else { "not a quasi-isomorphism" }, json!({ "quasi_iso": q.is_quasi_iso, "cone_dim": q.cone_dim }))
        }
        Command::HomotopyHom { m, n } => {
            let r = hopfomod::homotopy_hom(&as_bmodule(ld(m)?)?, &as_bmodule(ld(n)?)?)?;
            report(
                true,
                format!("dim {} ({}); degree 0: {}", r.stable.dim, graded_text(&r.stable.graded), r.degree_zero),
                json!({ "dim": r.stable.dim, "graded": graded_json(&r.stable.graded), "degree_zero": r.degree_zero }),
            )
        }
        Command::Witness { map } => {
            let u = as_bmap(ld(map)?)?;
            match hopfomod::null_homotopy_witness(&u)? {
                Some(g) => report(true, format!("null-homotopic; g =\n{}", mat_text(&g)), json!({ "witness": doc::mat_json(&g) })),
                None => report(false, "not null-homotopic", json!({ "witness": null })),
            }
        }
        Command::Contractible { algebra } => {
            let a = as_modalg(ld(algebra)?)?;
            match hopfomod::contractible_certificate(&a) {
                Some(x) => {
                    let s = format_combination(a.field(), a.algebra().labels(), &x);
                    report(true, format!("contractible; witness {s}"), json!({ "witness": s }))
                }
                None => report(false, "no contractibility certificate", json!({ "witness": null })),
            }
        }
        Command::Smash { algebra } => {
            let a = as_modalg(ld(algebra)?)?;
            let s = modalg::smash(&a)?;
            let labels = s.algebra.labels().to_vec();
            report(true, format!("smash product of dim {}: {}", s.algebra.dim(), labels.join(", ")), json!({ "dim": s.algebra.dim(), "labels": labels }))
        }
        Command::Opposite { algebra } => {
            let a = as_modalg(ld(algebra)?)?;
            emit_entity(&Entity::ModAlgebra(modalg::opposite(&a)?))
        }
        Command::BarStage { algebra, n, variant } => {
            let a = as_modalg(ld(algebra)?)?;
            let st = rd::bar_stage(&a, *n, cli.effort, cli.max_dim)?;
            let v = match variant {
                Variant::Lifted => rd::BarVariant::Lifted,
                Variant::Unsigned => rd::BarVariant::UnsignedFaces,
            };
            let r = rd::bar_checks(&st, v)?;
            let text = format!(
                "stage {n}: dim {}\n(i) module axioms: {}\n(ii) filtration: {}\n(iii) annihilation: {}\n(iv) stable shape: {}{}",
                st.module().dim(),
                r.module_axioms,
                r.filtration,
                r.annihilation,
                r.stable_shape.map_or("n/a".to_string(), |b| b.to_string()),
                if r.details.is_empty() { String::new() } else { format!("\n{}", r.details.join("\n")) }
            );
            report(
                r.all_pass(),
                text,
                json!({ "dim": st.module().dim(), "module_axioms": r.module_axioms, "filtration": r.filtration, "annihilation": r.annihilation, "stable_shape": r.stable_shape, "details": r.details }),
            )
        }
        Command::Replace { m, resolution, emit } => {
            let m = as_bmodule(ld(m)?)?;
            let res = as_resolution(ld(resolution)?)?;
            let r = rd::finite_cofibrant_replacement(&m, &res)?;
            if *emit {
                return emit_entity(&Entity::BModule(r.p));
            }
            report(
                r.quasi_iso,
                format!("replacement dim {} -> {}; quasi-iso: {}; filtration steps {}", r.p.dim(), m.dim(), r.quasi_iso, r.filtration.len()),
                json!({ "dim": r.p.dim(), "quasi_iso": r.quasi_iso, "filtration": r.filtration.iter().map(Mat::cols).collect::<Vec<_>>() }),
            )
        }
        Command::DerivedTensor { x, m, resolution } => {
            let xb = match ld(x)? {
                Entity::Bimodule(b) => b,
                other => return err(format!("expected a bimodule, found {}", other.kind())),
            };
            let m = as_bmodule(ld(m)?)?;
            let c = cofibrant_model(&m, resolution, cli)?;
            let t = rd::derived_tensor(&xb, c.as_ref())?;
            let s = hmod::stable_invariants(t.restrict_to_h());
            report(
                true,
                format!("dim {}; stable invariants {} ({})", t.dim(), s.dim, graded_text(&s.graded)),
                json!({ "dim": t.dim(), "stable_dim": s.dim, "graded": graded_json(&s.graded) }),
            )
        }
        Command::DerivedHom { m, n, resolution } => {
            let m = as_bmodule(ld(m)?)?;
            let n = as_bmodule(ld(n)?)?;
            let c = cofibrant_model(&m, resolution, cli)?;
            let h = rd::derived_hom(c.as_ref(), &n)?;
            let s = hmod::stable_invariants(&h);
            let k0 = kzero::k0_class(&h).ok().map(|c| c.to_string());
            report(
                true,
                format!("dim {}; stable dim {} ({}){}", h.dim(), s.dim, graded_text(&s.graded), k0.as_ref().map_or(String::new(), |c| format!("; class {c}"))),
                json!({ "dim": h.dim(), "stable_dim": s.dim, "graded": graded_json(&s.graded), "k0_class": k0 }),
            )
        }
        Command::K0Ring { input, builtin } => {
            let h = hopf_input(input, builtin, cli)?;
            let r = kzero::k0_ring(&h)?;
            report(true, r.to_string(), json!({ "ring": r.to_string(), "relation": r.relation() }))
        }
        Command::K0Class { m } => {
            let v = as_hmodule(ld(m)?)?;
            let c = kzero::k0_class(&v)?;
            report(true, c.to_string(), json!({ "ring": c.ring().to_string(), "class": c.to_string(), "coefficients": c.coefficients() }))
        }
        Command::K0Pairing { algebra, idempotents } => {
            let a = as_modalg(ld(algebra)?)?;
            let ids = idempotents.clone().unwrap_or_else(|| basic_idempotents(&a));
            let b = BasicAlgebra::new(a, ids)?;
            let m = kzero::k0_pairing_basic(&b)?;
            let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
            let ok = kzero::is_identity_matrix(&m);
            let text = rows.iter().map(|r| r.join("  ")).collect::<Vec<_>>().join("\n");
            report(ok, text, json!({ "matrix": rows, "identity": ok }))
        }
        Command::Jordan { m, modulo_free } => {
            let v = as_hmodule(ld(m)?)?;
            if *modulo_free {
                let j = hmod::jordan_type_mod_free(&v)?;
                let items: Vec<Value> = j.iter().map(|((s, d), c)| json!({ "size": s, "degree": d, "count": c })).collect();
                let text = j.iter().map(|((s, d), c)| format!("{c} x size {s} at degree {d}")).collect::<Vec<_>>().join("\n");
                return report(true, if text.is_empty() { "free".into() } else { text }, json!({ "blocks": items }));
            }
            let j = hmod::jordan_type(&v)?;
            let items: Vec<Value> = j.iter().map(|b| json!({ "size": b.size, "degree": b.degree, "count": b.count })).collect();
            let text = j.iter().map(|b| format!("{} x size {} at degree {}", b.count, b.size, b.degree)).collect::<Vec<_>>().join("\n");
            report(true, if text.is_empty() { "zero module".into() } else { text }, json!({ "blocks": items }))
        }
        Command::Slash { m, q } => {
            let v = as_hmodule(ld(m)?)?;
            let g = hmod::slash_cohomology(&v, *q)?;
            report(true, graded_text(&g), json!({ "graded": graded_json(&g), "total": g.values().sum::<usize>() }))
        }
        Command::RandomModule { hopf } => {
            let h = as_hopf(ld(hopf)?)?;
            let m = sample::module(&h, cli.max_dim.min(12), &mut StdRng::seed_from_u64(cli.seed));
            emit_entity(&Entity::HModule(m))
        }
    }
}

fn as_resolution(e: Entity) -> Result<BimoduleResolution, CliError> {
    match e {
        Entity::Resolution(r) => Ok(r),
        other => err(format!("expected a resolution, found {}", other.kind())),
    }
}

/// A cofibrant model of M: a finite replacement when a resolution is given; M itself over the
/// ground field; otherwise none (the command then refuses).
fn cofibrant_model(m: &BModule, resolution: &Option<String>, cli: &Cli) -> Result<Option<Cofibrant>, CliError> {
    if let Some(r) = resolution {
        let res = as_resolution(load(r, cli)?)?;
        let rep = rd::finite_cofibrant_replacement(m, &res)?;
        return Ok(Some(Cofibrant::from_replacement(&rep)));
    }
    if m.algebra().dim() == 1 {
        return Ok(Some(Cofibrant { module: m.clone(), reason: "module over the ground field".into() }));
    }
    Ok(None)
}

fn mat_text(m: &Mat) -> String {
    let f = m.field();
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| f.format(m.get(r, c))).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String) {
        let mut v = vec!["hopfo"];
        v.extend_from_slice(args);
        let cli = Cli::try_parse_from(v).expect("args");
        run(&cli)
    }

    #[test]
    fn integral_and_k0_ring() {
        let (c, out) = run_args(&["integral", "--builtin", "p_dg:3"]);
        assert_eq!((c, out.trim()), (0, "∂^2"));
        let (c, out) = run_args(&["k0-ring", "--builtin", "taft:3"]);
        assert_eq!((c, out.trim()), (0, "Z[q]/(1+q+q^2)"));
    }

    #[test]
    fn contractible_exit_codes() {
        let (c, out) = run_args(&["contractible", "alg:poly_pdg:3"]);
        assert_eq!(c, 0);
        assert!(out.contains("-x^2"), "{out}");
        let (c, _) = run_args(&["contractible", "alg:dg_square_zero"]);
        assert_eq!(c, 1);
        let (c, out) = run_args(&["contractible", "no-such-file"]);
        assert_eq!(c, 2);
        assert!(out.starts_with("error"));
    }

    #[test]
    fn boolean_commands() {
        assert_eq!(run_args(&["acyclic", "hmod:regular@p_dg:3"]).0, 0);
        assert_eq!(run_args(&["acyclic", "hmod:trivial@p_dg:3"]).0, 1);
        assert_eq!(run_args(&["quasi-iso", "map:zero-into:trivial@p_dg:3"]).0, 1);
        assert_eq!(run_args(&["quasi-iso", "map:zero-into:regular@p_dg:3"]).0, 0);
        assert_eq!(run_args(&["witness", "map:identity:regular@p_dg:3"]).0, 0);
        assert_eq!(run_args(&["witness", "map:identity:trivial@p_dg:3"]).0, 1);
        assert_eq!(run_args(&["opposite", "alg:taft_poly:3"]).0, 2);
        assert_eq!(run_args(&["bar-stage", "alg:dg_square_zero", "--n", "1"]).0, 0);
        assert_eq!(run_args(&["bar-stage", "alg:dg_square_zero", "--n", "1", "--variant", "unsigned"]).0, 1);
        assert_eq!(run_args(&["replace", "bmod:simple1@path_a2@p_dg:3", "res:hereditary@path_a2@p_dg:3"]).0, 0);
        assert_eq!(run_args(&["k0-pairing", "alg:path_a2@p_dg:3"]).0, 0);
        let (c, out) = run_args(&["--json", "k0-class", "hmod:shift@p_dg:3"]);
        assert_eq!(c, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["class"], "-1");
    }

    #[test]
    fn derived_commands() {
        let (c, out) = run_args(&[
            "derived-tensor",
            "bimod:right-simple0@path_a2@p_dg:3",
            "bmod:simple0@path_a2@p_dg:3",
            "--resolution",
            "res:padded@path_a2@p_dg:3",
        ]);
        assert_eq!(c, 0, "{out}");
        let (c, _) = run_args(&["derived-hom", "bmod:simple0@path_a2@p_dg:3", "bmod:simple1@path_a2@p_dg:3"]);
        assert_eq!(c, 2);
        let (c, out) = run_args(&[
            "derived-hom",
            "bmod:simple0@path_a2@p_dg:3",
            "bmod:simple0@path_a2@p_dg:3",
            "--resolution",
            "res:hereditary@path_a2@p_dg:3",
        ]);
        assert_eq!(c, 0, "{out}");
    }

    #[test]
    fn documents_round_trip() {
        let cli = Cli::try_parse_from(["hopfo", "builtin", "x"]).unwrap();
        for spec in [
            "hopf:p_dg:3",
            "hopf:taft:3",
            "hopf:exterior:2",
            "hmod:shift@p_dg:3",
            "alg:poly_pdg:3",
            "alg:taft_poly:3",
            "bmod:regular@dg_square_zero",
            "bimod:regular@path_a2@p_dg:3",
            "map:lambda:trivial@taft:3",
            "res:hereditary@path_a2@p_dg:3",
        ] {
            let e = load(spec, &cli).unwrap();
            let text = doc::serialize(&e);
            let back = doc::parse(&text).unwrap();
            assert_eq!(doc::serialize(&back), text, "{spec}");
        }
        let h = load("hopf:taft:3", &cli).unwrap();
        let Entity::Hopf(h0) = &h else { unreachable!() };
        let Entity::Hopf(h1) = doc::parse(&doc::serialize(&h)).unwrap() else { unreachable!() };
        assert_eq!(h0.data(), h1.data());
        assert_eq!(h1.kind(), h0.kind());
    }

    #[test]
    fn document_errors() {
        let cli = Cli::try_parse_from(["hopfo", "builtin", "x"]).unwrap();
        let text = doc::serialize(&load("hopf:p_dg:3", &cli).unwrap());
        let mut v: Value = serde_json::from_str(&text).unwrap();
        v["payload"]["comult"][1] = json!([["1"]]);
        let e = doc::parse(&v.to_string()).unwrap_err();
        assert!(e.to_string().contains("comult shape"), "{e}");
        let e = doc::parse("{\n  \"format_version\": 1,\n  oops").unwrap_err();
        assert!(matches!(e, doc::DocError::Syntax { line: 3, .. }), "{e}");
        let f = crate::exactla::Field::cyclotomic(4).unwrap();
        let x = f.parse("1/2 + 1/3 z").unwrap();
        assert_eq!(f.parse(&f.format(&x)).unwrap(), x);
    }
}
