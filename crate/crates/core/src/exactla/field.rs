use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use smallvec::{smallvec, SmallVec};

use super::rat::Rat;

/// Cyclotomic coefficient storage; inline for the low-degree fields used most.
pub type Coeffs = SmallVec<[Rat; 2]>;
use super::LinAlgError;

/// Which exact field scalars live in.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Prime(u64),
    Rationals,
    Cyclotomic(u32),
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime(p) => write!(f, "F{p}"),
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::Cyclotomic(n) => write!(f, "Q(z{n})"),
        }
    }
}

impl FieldSpec {
    /// Parses "F5", "Q", "Q(z4)" (also "prime:5", "cyclotomic:4").
    pub fn parse(s: &str) -> Result<FieldSpec, LinAlgError> {
        let t = s.trim();
        let bad = || LinAlgError::BadField(t.to_string());
        if t == "Q" || t == "rationals" {
            return Ok(FieldSpec::Rationals);
        }
        if let Some(rest) = t.strip_prefix("Q(z").and_then(|r| r.strip_suffix(')')) {
            return Ok(FieldSpec::Cyclotomic(rest.parse().map_err(|_| bad())?));
        }
        if let Some(rest) = t.strip_prefix("cyclotomic:") {
            return Ok(FieldSpec::Cyclotomic(rest.parse().map_err(|_| bad())?));
        }
        if let Some(rest) = t.strip_prefix("prime:").or_else(|| t.strip_prefix('F')) {
            return Ok(FieldSpec::Prime(rest.parse().map_err(|_| bad())?));
        }
        Err(bad())
    }
}

/// An element of a field. The field itself is carried by [`Field`], so a bare
/// scalar is only meaningful next to the field it was produced by.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Fp(u64),
    Q(Rat),
    /// Coefficients of a polynomial in z of degree < deg Φₙ, always padded to full length.
    Cyc(Coeffs),
}

#[derive(Debug)]
struct FieldInner {
    spec: FieldSpec,
    /// Monic Φₙ, lowest coefficient first. Empty unless cyclotomic.
    phi: Vec<i64>,
}

/// Arithmetic context for one field. Cheap to clone.
#[derive(Clone, Debug)]
pub struct Field(Arc<FieldInner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}
impl Eq for Field {}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    // den monic
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    if r.len() < den.len() {
        return vec![0];
    }
    let mut q = vec![0i64; r.len() - dd];
    for k in (dd..r.len()).rev() {
        let c = r[k];
        q[k - dd] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                r[k - dd + j] -= c * dj;
            }
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

/// Φₙ by dividing xⁿ − 1 by every Φ_d with d a proper divisor of n.
pub fn cyclotomic_poly(n: u32) -> Vec<i64> {
    let n = n as usize;
    let mut cache: Vec<Vec<i64>> = vec![Vec::new(); n + 1];
    for m in 1..=n {
        if n % m != 0 {
            continue;
        }
        let mut p = vec![0i64; m + 1];
        p[0] = -1;
        p[m] = 1;
        for d in 1..m {
            if m % d == 0 {
                p = poly_div_exact(&p, &cache[d]);
            }
        }
        cache[m] = p;
    }
    cache[n].clone()
}

fn rat(n: i64) -> Rat {
    Rat::from_i64(n)
}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Field, LinAlgError> {
        let phi = match &spec {
            FieldSpec::Prime(p) => {
                if !is_prime(*p) || *p >= (1 << 31) {
                    return Err(LinAlgError::BadField(format!("{p} is not a supported prime")));
                }
                Vec::new()
            }
            FieldSpec::Rationals => Vec::new(),
            FieldSpec::Cyclotomic(n) => {
                if *n == 0 || *n > 4096 {
                    return Err(LinAlgError::BadField(format!("cyclotomic order {n}")));
                }
                cyclotomic_poly(*n)
            }
        };
        Ok(Field(Arc::new(FieldInner { spec, phi })))
    }

    pub fn prime(p: u64) -> Result<Field, LinAlgError> {
        Field::new(FieldSpec::Prime(p))
    }
    pub fn rationals() -> Field {
        Field::new(FieldSpec::Rationals).expect("Q")
    }
    pub fn cyclotomic(n: u32) -> Result<Field, LinAlgError> {
        Field::new(FieldSpec::Cyclotomic(n))
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0.spec
    }

    pub fn characteristic(&self) -> u64 {
        match self.0.spec {
            FieldSpec::Prime(p) => p,
            _ => 0,
        }
    }

    /// Monic Φₙ coefficients (cyclotomic fields only).
    pub fn cyclotomic_modulus(&self) -> &[i64] {
        &self.0.phi
    }

    fn cyc_deg(&self) -> usize {
        self.0.phi.len() - 1
    }

    pub fn zero(&self) -> Scalar {
        match self.0.spec {
            FieldSpec::Prime(_) => Scalar::Fp(0),
            FieldSpec::Rationals => Scalar::Q(Rat::zero()),
            FieldSpec::Cyclotomic(_) => Scalar::Cyc(smallvec![Rat::zero(); self.cyc_deg()]),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self.0.spec {
            FieldSpec::Prime(p) => Scalar::Fp(n.rem_euclid(p as i64) as u64),
            FieldSpec::Rationals => Scalar::Q(rat(n)),
            FieldSpec::Cyclotomic(_) => {
                let mut v: Coeffs = smallvec![Rat::zero(); self.cyc_deg()];
                v[0] = rat(n);
                Scalar::Cyc(v)
            }
        }
    }

    pub fn from_rational(&self, r: &BigRational) -> Result<Scalar, LinAlgError> {
        match self.0.spec {
            FieldSpec::Prime(p) => Rat::from_big(r.clone())
                .mod_prime(p)
                .map(Scalar::Fp)
                .ok_or_else(|| LinAlgError::Parse(format!("denominator divisible by {p}"))),
            FieldSpec::Rationals => Ok(Scalar::Q(Rat::from_big(r.clone()))),
            FieldSpec::Cyclotomic(_) => {
                let mut v: Coeffs = smallvec![Rat::zero(); self.cyc_deg()];
                v[0] = Rat::from_big(r.clone());
                Ok(Scalar::Cyc(v))
            }
        }
    }

    /// The primitive root of unity z (cyclotomic), otherwise an error.
    pub fn zeta(&self) -> Result<Scalar, LinAlgError> {
        match self.0.spec {
            FieldSpec::Cyclotomic(_) => {
                let mut coeffs = [Rat::zero(), Rat::one()];
                Ok(Scalar::Cyc(self.reduce_poly(&mut coeffs)))
            }
            _ => Err(LinAlgError::BadField(format!("{} has no distinguished root of unity", self.spec()))),
        }
    }

    /// Reduces a coefficient list modulo Φₙ in place and returns the low part.
    fn reduce_poly(&self, c: &mut [Rat]) -> Coeffs {
        let phi = &self.0.phi;
        let d = phi.len() - 1;
        if c.len() > d {
            for k in (d..c.len()).rev() {
                if c[k].is_zero() {
                    continue;
                }
                let lead = std::mem::replace(&mut c[k], Rat::zero());
                for (j, &pj) in phi.iter().enumerate().take(d) {
                    if pj != 0 {
                        let t = &lead * &rat(pj);
                        c[k - d + j] -= t;
                    }
                }
            }
        }
        let mut out: Coeffs = c.iter().take(d).cloned().collect();
        out.resize(d, Rat::zero());
        out
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Fp(x) => *x == 0,
            Scalar::Q(x) => x.is_zero(),
            Scalar::Cyc(v) => v.iter().all(|x| x.is_zero()),
        }
    }

    pub fn is_one(&self, a: &Scalar) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (a, b) {
            (Scalar::Fp(x), Scalar::Fp(y)) => Scalar::Fp((x + y) % self.characteristic()),
            (Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x + y),
            (Scalar::Cyc(x), Scalar::Cyc(y)) => Scalar::Cyc(x.iter().zip(y).map(|(u, v)| u + v).collect()),
            _ => panic!("scalar from a different field"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match a {
            Scalar::Fp(x) => {
                let p = self.characteristic();
                Scalar::Fp((p - x) % p)
            }
            Scalar::Q(x) => Scalar::Q(-x),
            Scalar::Cyc(v) => Scalar::Cyc(v.iter().map(|u| -u).collect()),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (a, b) {
            (Scalar::Fp(x), Scalar::Fp(y)) => Scalar::Fp(x * y % self.characteristic()),
            (Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x * y),
            (Scalar::Cyc(x), Scalar::Cyc(y)) => {
                let mut c: SmallVec<[Rat; 4]> = smallvec![Rat::zero(); x.len() + y.len()];
                for (i, u) in x.iter().enumerate() {
                    if u.is_zero() {
                        continue;
                    }
                    for (j, v) in y.iter().enumerate() {
                        if !v.is_zero() {
                            c[i + j] += u * v;
                        }
                    }
                }
                Scalar::Cyc(self.reduce_poly(&mut c))
            }
            _ => panic!("scalar from a different field"),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if self.is_zero(a) {
            return None;
        }
        match a {
            Scalar::Fp(x) => Some(Scalar::Fp(inv_mod(*x, self.characteristic()))),
            Scalar::Q(x) => Some(Scalar::Q(x.recip())),
            Scalar::Cyc(x) => {
                // Solve (mult-by-x) s = 1 over Q; the matrix is invertible since Φₙ is irreducible.
                let d = x.len();
                let mut m: Vec<Vec<Rat>> = Vec::with_capacity(d);
                let mut basis = vec![Rat::zero(); d];
                basis[0] = Rat::one();
                let mut col = x.clone();
                let mut cols = Vec::with_capacity(d);
                for _ in 0..d {
                    cols.push(col.clone());
                    let mut shifted = vec![Rat::zero()];
                    shifted.extend(col.iter().cloned());
                    col = self.reduce_poly(&mut shifted);
                }
                for i in 0..d {
                    let mut row: Vec<Rat> = (0..d).map(|j| cols[j][i].clone()).collect();
                    row.push(basis[i].clone());
                    m.push(row);
                }
                // Gauss-Jordan
                for c in 0..d {
                    let piv = (c..d).find(|&r| !m[r][c].is_zero())?;
                    m.swap(c, piv);
                    let iv = m[c][c].recip();
                    for v in m[c].iter_mut() {
                        *v = &*v * &iv;
                    }
                    for r in 0..d {
                        if r != c && !m[r][c].is_zero() {
                            let f = m[r][c].clone();
                            for k in c..=d {
                                let t = &f * &m[c][k];
                                m[r][k] -= t;
                            }
                        }
                    }
                }
                Some(Scalar::Cyc((0..d).map(|i| m[i][d].clone()).collect()))
            }
        }
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        self.inv(b).map(|ib| self.mul(a, &ib))
    }

    pub fn pow(&self, a: &Scalar, mut e: u64) -> Scalar {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Integer power, allowing negative exponents for nonzero bases.
    pub fn powi(&self, a: &Scalar, e: i64) -> Option<Scalar> {
        if e >= 0 {
            Some(self.pow(a, e as u64))
        } else {
            self.inv(a).map(|ia| self.pow(&ia, (-e) as u64))
        }
    }

    /// True if the scalar is a well-formed element of this field.
    pub fn contains(&self, a: &Scalar) -> bool {
        match (a, &self.0.spec) {
            (Scalar::Fp(x), FieldSpec::Prime(p)) => x < p,
            (Scalar::Q(_), FieldSpec::Rationals) => true,
            (Scalar::Cyc(v), FieldSpec::Cyclotomic(_)) => v.len() == self.cyc_deg(),
            _ => false,
        }
    }

    /// Canonical text form. Prime-field elements use the balanced residue.
    pub fn format(&self, a: &Scalar) -> String {
        match a {
            Scalar::Fp(x) => {
                let p = self.characteristic();
                if p > 2 && *x > p / 2 {
                    format!("-{}", p - x)
                } else {
                    x.to_string()
                }
            }
            Scalar::Q(x) => fmt_rat(x),
            Scalar::Cyc(v) => {
                let mut out = String::new();
                for (k, c) in v.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let neg = c.is_negative();
                    let mag = c.abs();
                    let mono = match k {
                        0 => String::new(),
                        1 => "z".to_string(),
                        _ => format!("z^{k}"),
                    };
                    let body = if k == 0 {
                        fmt_rat(&mag)
                    } else if mag.is_one() {
                        mono
                    } else {
                        format!("{} {}", fmt_rat(&mag), mono)
                    };
                    if out.is_empty() {
                        if neg {
                            out.push('-');
                        }
                    } else {
                        out.push_str(if neg { " - " } else { " + " });
                    }
                    out.push_str(&body);
                }
                if out.is_empty() {
                    "0".to_string()
                } else {
                    out
                }
            }
        }
    }

    /// Parses the canonical text form (and looser variants such as "2*z^2", "-3/4").
    pub fn parse(&self, text: &str) -> Result<Scalar, LinAlgError> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || LinAlgError::Parse(format!("bad scalar '{text}'"));
        if s.is_empty() {
            return Err(err());
        }
        // split into signed terms
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for (i, ch) in s.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.is_empty() {
                terms.push((neg, std::mem::take(&mut cur)));
                neg = ch == '-';
            } else if (ch == '+' || ch == '-') && cur.is_empty() {
                if ch == '-' {
                    neg = !neg;
                }
            } else {
                cur.push(ch);
            }
        }
        if cur.is_empty() {
            return Err(err());
        }
        terms.push((neg, cur));
        let mut acc = self.zero();
        for (neg, t) in terms {
            let (coef, power) = if let Some(pos) = t.find('z') {
                let c = t[..pos].trim_end_matches('*');
                let rest = &t[pos + 1..];
                let power = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^').and_then(|e| e.parse::<u64>().ok()).ok_or_else(err)?
                };
                let c = if c.is_empty() { "1" } else { c };
                (c.to_string(), Some(power))
            } else {
                (t.clone(), None)
            };
            let r = parse_rat(&coef).ok_or_else(err)?;
            let mut v = self.from_rational(&r)?;
            if let Some(k) = power {
                let z = self.zeta().map_err(|_| err())?;
                v = self.mul(&v, &self.pow(&z, k));
            }
            if neg {
                v = self.neg(&v);
            }
            acc = self.add(&acc, &v);
        }
        Ok(acc)
    }
}

fn parse_rat(s: &str) -> Option<BigRational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

fn fmt_rat(x: &Rat) -> String {
    x.to_string()
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut t, mut newt) = (0i64, 1i64);
    let (mut r, mut newr) = (p as i64, (a % p) as i64);
    while newr != 0 {
        let q = r / newr;
        (t, newt) = (newt, t - q * newt);
        (r, newr) = (newr, r - q * newr);
    }
    t.rem_euclid(p as i64) as u64
}
