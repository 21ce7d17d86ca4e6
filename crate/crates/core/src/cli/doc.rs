//! Plain-text (JSON) documents for Hopf algebras, modules, module algebras, maps and resolutions.

use std::sync::Arc;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::exactla::{Field, FieldSpec, Mat, Scalar};
use crate::hmod::HModule;
use crate::hopf::{BuiltinKind, HopfAlgebra, HopfData, HopfRef};
use crate::hopfomod::BModule;
use crate::modalg::{Algebra, ModuleAlgebra};
use crate::resolve_derived::{Bimodule, BimoduleResolution};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DocError {
    #[error("syntax error at line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("{0}")]
    Semantic(String),
}

fn sem<T>(msg: impl Into<String>) -> Result<T, DocError> {
    Err(DocError::Semantic(msg.into()))
}

/// A map between two modules of the same kind.
#[derive(Clone, Debug)]
pub enum MapDoc {
    H { source: HModule, target: HModule, matrix: Mat },
    B { source: BModule, target: BModule, matrix: Mat },
}

#[derive(Clone, Debug)]
pub enum Entity {
    Hopf(HopfRef),
    HModule(HModule),
    ModAlgebra(ModuleAlgebra),
    BModule(BModule),
    Bimodule(Bimodule),
    Map(MapDoc),
    Resolution(BimoduleResolution),
}

impl Entity {
    pub fn kind(&self) -> &'static str {
        match self {
            Entity::Hopf(_) => "hopf",
            Entity::HModule(_) => "hmodule",
            Entity::ModAlgebra(_) => "modalgebra",
            Entity::BModule(_) => "bmodule",
            Entity::Bimodule(_) => "bimodule",
            Entity::Map(_) => "map",
            Entity::Resolution(_) => "resolution",
        }
    }

    pub fn field(&self) -> &Field {
        match self {
            Entity::Hopf(h) => h.field(),
            Entity::HModule(m) => m.field(),
            Entity::ModAlgebra(a) => a.field(),
            Entity::BModule(m) => m.field(),
            Entity::Bimodule(b) => b.left.field(),
            Entity::Map(MapDoc::H { source, .. }) => source.field(),
            Entity::Map(MapDoc::B { source, .. }) => source.field(),
            Entity::Resolution(r) => r.algebra.field(),
        }
    }
}

/// Serializes an entity as a document.
pub fn serialize(e: &Entity) -> String {
    let payload = match e {
        Entity::Hopf(h) => hopf_json(h),
        Entity::HModule(m) => hmodule_json(m),
        Entity::ModAlgebra(a) => modalg_json(a),
        Entity::BModule(m) => bmodule_json(m),
        Entity::Bimodule(b) => bimodule_json(b),
        Entity::Map(MapDoc::H { source, target, matrix }) => json!({
            "over": "hopf",
            "source": hmodule_json(source),
            "target": hmodule_json(target),
            "matrix": mat_json(matrix),
        }),
        Entity::Map(MapDoc::B { source, target, matrix }) => json!({
            "over": "algebra",
            "source": bmodule_json(source),
            "target": bmodule_json(target),
            "matrix": mat_json(matrix),
        }),
        Entity::Resolution(r) => json!({
            "algebra": modalg_json(&r.algebra),
            "terms": r.terms.iter().map(bimodule_json).collect::<Vec<_>>(),
            "diffs": r.diffs.iter().map(mat_json).collect::<Vec<_>>(),
            "augmentation": mat_json(&r.augmentation),
        }),
    };
    let doc = json!({
        "format_version": FORMAT_VERSION,
        "field": e.field().spec().to_string(),
        "kind": e.kind(),
        "payload": payload,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json");
    s.push('\n');
    s
}

/// Parses and verifies a document.
pub fn parse(text: &str) -> Result<Entity, DocError> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| DocError::Syntax { line: e.line(), column: e.column(), msg: e.to_string() })?;
    let obj = v.as_object().ok_or_else(|| DocError::Semantic("document must be an object".into()))?;
    match obj.get("format_version").and_then(Value::as_u64) {
        Some(FORMAT_VERSION) => {}
        Some(other) => return sem(format!("unsupported format_version {other}")),
        None => return sem("missing format_version"),
    }
    let fs = obj.get("field").and_then(Value::as_str).ok_or_else(|| DocError::Semantic("missing field spec".into()))?;
    let field = Field::new(FieldSpec::parse(fs).map_err(|e| DocError::Semantic(e.to_string()))?)
        .map_err(|e| DocError::Semantic(e.to_string()))?;
    let kind = obj.get("kind").and_then(Value::as_str).ok_or_else(|| DocError::Semantic("missing kind".into()))?;
    let p = obj.get("payload").ok_or_else(|| DocError::Semantic("missing payload".into()))?;
    let r = Reader { f: field };
    Ok(match kind {
        "hopf" => Entity::Hopf(r.hopf(p)?),
        "hmodule" => Entity::HModule(r.hmodule(p)?),
        "modalgebra" => Entity::ModAlgebra(r.modalg(p)?),
        "bmodule" => Entity::BModule(r.bmodule(p)?),
        "bimodule" => Entity::Bimodule(r.bimodule(p)?),
        "map" => Entity::Map(r.map(p)?),
        "resolution" => Entity::Resolution(r.resolution(p)?),
        other => return sem(format!("unknown kind {other}")),
    })
}

fn scalar_json(f: &Field, s: &Scalar) -> Value {
    Value::String(f.format(s))
}

fn vec_json(f: &Field, v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(|s| scalar_json(f, s)).collect())
}

/// Rows of a matrix.
pub fn mat_json(m: &Mat) -> Value {
    let f = m.field();
    Value::Array((0..m.rows()).map(|r| Value::Array((0..m.cols()).map(|c| scalar_json(f, m.get(r, c))).collect())).collect())
}

fn hopf_json(h: &HopfAlgebra) -> Value {
    let d = h.data();
    let f = &d.field;
    let n = d.labels.len();
    let mut o = Map::new();
    if let Some(k) = h.kind() {
        o.insert("builtin".into(), Value::String(k.to_string()));
    }
    o.insert("labels".into(), json!(d.labels));
    o.insert("grading".into(), json!(d.grading));
    o.insert("grading_modulus".into(), json!(d.grading_modulus));
    o.insert("super".into(), json!(d.is_super));
    o.insert("unit".into(), vec_json(f, &d.unit));
    o.insert("counit".into(), vec_json(f, &d.counit));
    let mult: Vec<Value> =
        (0..n).map(|i| Value::Array((0..n).map(|j| vec_json(f, &row(&d.mult, i * n + j))).collect())).collect();
    o.insert("mult".into(), Value::Array(mult));
    let comult: Vec<Value> = (0..n)
        .map(|i| {
            let r = row(&d.comult, i);
            Value::Array((0..n).map(|j| vec_json(f, &r[j * n..(j + 1) * n])).collect())
        })
        .collect();
    o.insert("comult".into(), Value::Array(comult));
    o.insert("antipode".into(), Value::Array((0..n).map(|i| vec_json(f, &row(&d.antipode, i))).collect()));
    Value::Object(o)
}

fn row(m: &Mat, r: usize) -> Vec<Scalar> {
    (0..m.cols()).map(|c| m.get(r, c).clone()).collect()
}

fn hmodule_json(m: &HModule) -> Value {
    json!({
        "hopf": hopf_json(m.hopf()),
        "grading": m.grading(),
        "actions": m.actions().iter().map(mat_json).collect::<Vec<_>>(),
    })
}

fn modalg_json(a: &ModuleAlgebra) -> Value {
    let alg = a.algebra();
    let f = a.field();
    let n = alg.dim();
    json!({
        "hopf": hopf_json(a.hopf()),
        "labels": alg.labels(),
        "grading": alg.grading(),
        "unit": vec_json(f, alg.unit()),
        "mult": (0..n).map(|i| Value::Array((0..n).map(|j| vec_json(f, &row(alg.mult(), i * n + j))).collect())).collect::<Vec<_>>(),
        "haction": a.haction().actions().iter().map(mat_json).collect::<Vec<_>>(),
    })
}

fn bmodule_json(m: &BModule) -> Value {
    json!({
        "algebra": modalg_json(m.algebra()),
        "grading": m.grading(),
        "hactions": m.restrict_to_h().actions().iter().map(mat_json).collect::<Vec<_>>(),
        "a_actions": m.a_actions().iter().map(mat_json).collect::<Vec<_>>(),
    })
}

fn bimodule_json(b: &Bimodule) -> Value {
    json!({
        "left": bmodule_json(&b.left),
        "right_algebra": modalg_json(&b.right_algebra),
        "right_action": b.right_action.iter().map(mat_json).collect::<Vec<_>>(),
    })
}

struct Reader {
    f: Field,
}

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value, DocError> {
    v.get(key).ok_or_else(|| DocError::Semantic(format!("missing \"{key}\"")))
}

fn arr<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, DocError> {
    v.as_array().ok_or_else(|| DocError::Semantic(format!("{what}: expected an array")))
}

impl Reader {
    fn scalar(&self, v: &Value) -> Result<Scalar, DocError> {
        match v {
            Value::String(s) => self.f.parse(s).map_err(|e| DocError::Semantic(format!("scalar \"{s}\": {e}"))),
            Value::Number(n) => match n.as_i64() {
                Some(i) => Ok(self.f.from_i64(i)),
                None => sem(format!("scalar {n}: only integers may be given as numbers")),
            },
            _ => sem("scalar must be a string or an integer"),
        }
    }

    fn vector(&self, v: &Value, len: usize, what: &str) -> Result<Vec<Scalar>, DocError> {
        let a = arr(v, what)?;
        if a.len() != len {
            return sem(format!("{what} shape: expected length {len}, found {}", a.len()));
        }
        a.iter().map(|x| self.scalar(x)).collect()
    }

    fn matrix(&self, v: &Value, rows: usize, cols: usize, what: &str) -> Result<Mat, DocError> {
        let a = arr(v, what)?;
        if a.len() != rows {
            return sem(format!("{what} shape: expected {rows} rows, found {}", a.len()));
        }
        let mut m = Mat::zeros(&self.f, rows, cols);
        for (r, row) in a.iter().enumerate() {
            let row = self.vector(row, cols, what)?;
            for (c, x) in row.into_iter().enumerate() {
                m.set(r, c, x);
            }
        }
        Ok(m)
    }

    /// A matrix whose shape is taken from the data.
    fn matrix_any(&self, v: &Value, what: &str) -> Result<Mat, DocError> {
        let a = arr(v, what)?;
        let cols = a.first().and_then(Value::as_array).map_or(0, Vec::len);
        self.matrix(v, a.len(), cols, what)
    }

    fn ints(&self, v: &Value, what: &str) -> Result<Vec<i64>, DocError> {
        arr(v, what)?.iter().map(|x| x.as_i64().ok_or_else(|| DocError::Semantic(format!("{what}: expected integers")))).collect()
    }

    fn strings(&self, v: &Value, what: &str) -> Result<Vec<String>, DocError> {
        arr(v, what)?
            .iter()
            .map(|x| x.as_str().map(str::to_string).ok_or_else(|| DocError::Semantic(format!("{what}: expected strings"))))
            .collect()
    }

    /// A table t[i][j] = vector of length n, as the (n²)×n row layout.
    fn table(&self, v: &Value, n: usize, what: &str) -> Result<Mat, DocError> {
        let a = arr(v, what)?;
        if a.len() != n {
            return sem(format!("{what} shape: expected {n} entries, found {}", a.len()));
        }
        let mut m = Mat::zeros(&self.f, n * n, n);
        for (i, row) in a.iter().enumerate() {
            let row = arr(row, what)?;
            if row.len() != n {
                return sem(format!("{what} shape: entry {i} has {} parts, expected {n}", row.len()));
            }
            for (j, x) in row.iter().enumerate() {
                for (k, s) in self.vector(x, n, what)?.into_iter().enumerate() {
                    m.set(i * n + j, k, s);
                }
            }
        }
        Ok(m)
    }

    fn hopf(&self, p: &Value) -> Result<HopfRef, DocError> {
        let labels = self.strings(get(p, "labels")?, "labels")?;
        let n = labels.len();
        let grading = self.ints(get(p, "grading")?, "grading")?;
        if grading.len() != n {
            return sem("grading shape");
        }
        let modulus = get(p, "grading_modulus")?.as_u64().ok_or_else(|| DocError::Semantic("grading_modulus".into()))? as u32;
        let is_super = get(p, "super")?.as_bool().ok_or_else(|| DocError::Semantic("super must be a boolean".into()))?;
        let unit = self.vector(get(p, "unit")?, n, "unit")?;
        let counit = self.vector(get(p, "counit")?, n, "counit")?;
        let mult = self.table(get(p, "mult")?, n, "mult")?;
        let comult_table = self.table(get(p, "comult").map_err(|_| DocError::Semantic("comult shape: missing".into()))?, n, "comult")?;
        // comult[i][j][k] is the coefficient of e_j⊗e_k in Δ(e_i)
        let mut comult = Mat::zeros(&self.f, n, n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    comult.set(i, j * n + k, comult_table.get(i * n + j, k).clone());
                }
            }
        }
        let antipode = self.matrix(get(p, "antipode")?, n, n, "antipode")?;
        let data = HopfData {
            field: self.f.clone(),
            labels,
            mult,
            unit,
            comult,
            counit,
            antipode,
            grading,
            grading_modulus: modulus,
            is_super,
        };
        let h = HopfAlgebra::from_data(data).map_err(|e| DocError::Semantic(e.to_string()))?;
        let h = match p.get("builtin").and_then(Value::as_str) {
            Some(spec) => {
                let (kind, _): (BuiltinKind, _) = BuiltinKind::parse(spec).map_err(|e| DocError::Semantic(e.to_string()))?;
                h.recognize_builtin(kind).map_err(|e| DocError::Semantic(e.to_string()))?
            }
            None => h,
        };
        Ok(Arc::new(h))
    }

    fn actions(&self, v: &Value, count: usize, dim: usize, what: &str) -> Result<Vec<Mat>, DocError> {
        let a = arr(v, what)?;
        if a.len() != count {
            return sem(format!("{what} shape: expected {count} matrices, found {}", a.len()));
        }
        a.iter().map(|m| self.matrix(m, dim, dim, what)).collect()
    }

    fn hmodule(&self, p: &Value) -> Result<HModule, DocError> {
        let h = self.hopf(get(p, "hopf")?)?;
        let grading = self.ints(get(p, "grading")?, "grading")?;
        let acts = self.actions(get(p, "actions")?, h.dim(), grading.len(), "actions")?;
        HModule::new(h, acts, grading).map_err(|e| DocError::Semantic(e.to_string()))
    }

    fn modalg(&self, p: &Value) -> Result<ModuleAlgebra, DocError> {
        let h = self.hopf(get(p, "hopf")?)?;
        let labels = self.strings(get(p, "labels")?, "labels")?;
        let n = labels.len();
        let grading = self.ints(get(p, "grading")?, "grading")?;
        let unit = self.vector(get(p, "unit")?, n, "unit")?;
        let mult = self.table(get(p, "mult")?, n, "mult")?;
        let alg = Algebra::new(&self.f, labels, mult, unit, grading).map_err(|e| DocError::Semantic(e.to_string()))?;
        let acts = self.actions(get(p, "haction")?, h.dim(), n, "haction")?;
        ModuleAlgebra::new(h, alg, acts).map_err(|e| DocError::Semantic(e.to_string()))
    }

    fn bmodule(&self, p: &Value) -> Result<BModule, DocError> {
        let a = self.modalg(get(p, "algebra")?)?;
        let grading = self.ints(get(p, "grading")?, "grading")?;
        let d = grading.len();
        let hacts = self.actions(get(p, "hactions")?, a.hopf().dim(), d, "hactions")?;
        let hm = HModule::new(a.hopf().clone(), hacts, grading).map_err(|e| DocError::Semantic(e.to_string()))?;
        let aacts = self.actions(get(p, "a_actions")?, a.dim(), d, "a_actions")?;
        BModule::new(a, aacts, hm).map_err(|e| DocError::Semantic(e.to_string()))
    }

    fn bimodule(&self, p: &Value) -> Result<Bimodule, DocError> {
        let left = self.bmodule(get(p, "left")?)?;
        let ra = self.modalg(get(p, "right_algebra")?)?;
        let acts = self.actions(get(p, "right_action")?, ra.dim(), left.dim(), "right_action")?;
        Bimodule::new(left, ra, acts).map_err(|e| DocError::Semantic(e.to_string()))
    }

    fn map(&self, p: &Value) -> Result<MapDoc, DocError> {
        match get(p, "over")?.as_str() {
            Some("hopf") => {
                let source = self.hmodule(get(p, "source")?)?;
                let target = self.hmodule(get(p, "target")?)?;
                let matrix = self.matrix(get(p, "matrix")?, target.dim(), source.dim(), "matrix")?;
                Ok(MapDoc::H { source, target, matrix })
            }
            Some("algebra") => {
                let source = self.bmodule(get(p, "source")?)?;
                let target = self.bmodule(get(p, "target")?)?;
                let matrix = self.matrix(get(p, "matrix")?, target.dim(), source.dim(), "matrix")?;
                Ok(MapDoc::B { source, target, matrix })
            }
            _ => sem("map \"over\" must be \"hopf\" or \"algebra\""),
        }
    }

    fn resolution(&self, p: &Value) -> Result<BimoduleResolution, DocError> {
        let algebra = self.modalg(get(p, "algebra")?)?;
        let terms: Vec<Bimodule> = arr(get(p, "terms")?, "terms")?.iter().map(|t| self.bimodule(t)).collect::<Result<_, _>>()?;
        let diffs: Vec<Mat> =
            arr(get(p, "diffs")?, "diffs")?.iter().map(|m| self.matrix_any(m, "diffs")).collect::<Result<_, _>>()?;
        if terms.is_empty() || diffs.len() + 1 != terms.len() {
            return sem("resolution shape: need one differential fewer than terms");
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.rows() != terms[k].dim() || d.cols() != terms[k + 1].dim() {
                return sem(format!("resolution shape: differential {} has the wrong size", k + 1));
            }
        }
        let augmentation = self.matrix(get(p, "augmentation")?, algebra.dim(), terms[0].dim(), "augmentation")?;
        let r = BimoduleResolution { algebra, terms, diffs, augmentation };
        r.validate().map_err(|e| DocError::Semantic(e.to_string()))?;
        Ok(r)
    }
}
