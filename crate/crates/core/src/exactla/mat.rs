use std::fmt;

use super::field::{inv_mod, Field, FieldSpec, Scalar};
use super::LinAlgError;

/// Dense matrix over an exact field, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} over {}", self.rows, self.cols, self.field.spec())?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.field.format(self.get(r, c))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Result of row reduction.
#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: Mat,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

impl Mat {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Mat {
        Mat { field: field.clone(), rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> Mat {
        let mut m = Mat::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    pub fn from_vec(field: &Field, rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Mat, LinAlgError> {
        if data.len() != rows * cols {
            return Err(LinAlgError::Shape(format!("{} entries for {rows}x{cols}", data.len())));
        }
        if let Some(bad) = data.iter().find(|s| !field.contains(s)) {
            return Err(LinAlgError::FieldMismatch(format!("{bad:?} not in {}", field.spec())));
        }
        Ok(Mat { field: field.clone(), rows, cols, data })
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<Scalar>>) -> Result<Mat, LinAlgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(LinAlgError::Shape("ragged rows".into()));
        }
        Mat::from_vec(field, r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_i64_rows(field: &Field, rows: &[&[i64]]) -> Mat {
        let data: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|&x| field.from_i64(x)).collect()).collect();
        Mat::from_rows(field, data).expect("rectangular")
    }

    pub fn from_fn(field: &Field, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Mat {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat { field: field.clone(), rows, cols, data }
    }

    /// Column matrix from a vector.
    pub fn column_vector(field: &Field, v: &[Scalar]) -> Mat {
        Mat { field: field.clone(), rows: v.len(), cols: 1, data: v.to_vec() }
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(field: &Field, rows: usize, cols: &[Vec<Scalar>]) -> Mat {
        Mat::from_fn(field, rows, cols.len(), |r, c| cols[c][r].clone())
    }

    pub fn diagonal(field: &Field, d: &[Scalar]) -> Mat {
        let n = d.len();
        let mut m = Mat::zeros(field, n, n);
        for (i, x) in d.iter().enumerate() {
            m.data[i * n + i] = x.clone();
        }
        m
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }
    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }
    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }
    pub fn add_to(&mut self, r: usize, c: usize, v: &Scalar) {
        let i = r * self.cols + c;
        self.data[i] = self.field.add(&self.data[i], v);
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> Vec<Scalar> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }
    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }
    pub fn columns(&self) -> Vec<Vec<Scalar>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Mat::identity(&self.field, self.rows)
    }

    fn check_same(&self, other: &Mat) -> Result<(), LinAlgError> {
        if self.field != other.field {
            return Err(LinAlgError::FieldMismatch(format!("{} vs {}", self.field.spec(), other.field.spec())));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Mat) -> Result<Mat, LinAlgError> {
        self.check_same(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinAlgError::Shape(format!(
                "add {}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| self.field.add(a, b)).collect();
        Ok(Mat { field: self.field.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn add(&self, other: &Mat) -> Mat {
        self.try_add(other).expect("matrix add")
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Mat {
        self.map(|x| self.field.neg(x))
    }

    pub fn scale(&self, s: &Scalar) -> Mat {
        self.map(|x| self.field.mul(x, s))
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Mat {
        Mat { field: self.field.clone(), rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(&self.field, self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn try_mul(&self, other: &Mat) -> Result<Mat, LinAlgError> {
        self.check_same(other)?;
        if self.cols != other.rows {
            return Err(LinAlgError::Shape(format!(
                "mul {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        if let FieldSpec::Prime(p) = *f.spec() {
            let a = self.to_u64();
            let b = other.to_u64();
            let (n, k, m) = (self.rows, self.cols, other.cols);
            let mut out = vec![0u64; n * m];
            for i in 0..n {
                for t in 0..k {
                    let x = a[i * k + t];
                    if x == 0 {
                        continue;
                    }
                    let brow = &b[t * m..(t + 1) * m];
                    let orow = &mut out[i * m..(i + 1) * m];
                    for j in 0..m {
                        orow[j] = (orow[j] + x * brow[j]) % p;
                    }
                }
            }
            return Ok(Mat::from_u64(f, n, m, out));
        }
        let sparse_rows: Vec<Vec<(usize, &Scalar)>> = (0..other.rows)
            .map(|t| (0..other.cols).filter_map(|j| Some((j, other.get(t, j))).filter(|(_, y)| !f.is_zero(y))).collect())
            .collect();
        let mut out = Mat::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for t in 0..self.cols {
                let x = self.get(i, t);
                if sparse_rows[t].is_empty() || f.is_zero(x) {
                    continue;
                }
                for &(j, y) in &sparse_rows[t] {
                    let idx = i * other.cols + j;
                    out.data[idx] = f.add(&out.data[idx], &f.mul(x, y));
                }
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        self.try_mul(other).expect("matrix mul")
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "apply: vector length");
        let f = &self.field;
        (0..self.rows)
            .map(|r| {
                let mut acc = f.zero();
                for (c, x) in v.iter().enumerate() {
                    let a = self.get(r, c);
                    if !f.is_zero(a) && !f.is_zero(x) {
                        acc = f.add(&acc, &f.mul(a, x));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn pow(&self, e: u32) -> Mat {
        let mut acc = Mat::identity(&self.field, self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Kronecker product; entry ((i_a·rows_b + i_b), (j_a·cols_b + j_b)) = a[i_a,j_a]·b[i_b,j_b].
    pub fn kron(&self, other: &Mat) -> Mat {
        self.check_same(other).expect("kron field");
        let f = &self.field;
        let (rb, cb) = (other.rows, other.cols);
        let mut out = Mat::zeros(f, self.rows * rb, self.cols * cb);
        for ia in 0..self.rows {
            for ja in 0..self.cols {
                let x = self.get(ia, ja);
                if f.is_zero(x) {
                    continue;
                }
                for ib in 0..rb {
                    for jb in 0..cb {
                        let y = other.get(ib, jb);
                        if !f.is_zero(y) {
                            out.set(ia * rb + ib, ja * cb + jb, f.mul(x, y));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows, "hstack rows");
        Mat::from_fn(&self.field, self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols {
                self.get(r, c).clone()
            } else {
                other.get(r, c - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols, "vstack cols");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Mat { field: self.field.clone(), rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn vstack_all(field: &Field, cols: usize, blocks: &[Mat]) -> Mat {
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack cols");
            data.extend(b.data.iter().cloned());
            rows += b.rows;
        }
        Mat { field: field.clone(), rows, cols, data }
    }

    /// Block diagonal sum.
    pub fn direct_sum(&self, other: &Mat) -> Mat {
        let mut m = Mat::zeros(&self.field, self.rows + other.rows, self.cols + other.cols);
        m.set_block(0, 0, self);
        m.set_block(self.rows, self.cols, other);
        m
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Mat) {
        for r in 0..b.rows {
            for c in 0..b.cols {
                self.set(r0 + r, c0 + c, b.get(r, c).clone());
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat {
        Mat::from_fn(&self.field, rows, cols, |r, c| self.get(r0 + r, c0 + c).clone())
    }

    pub fn select_columns(&self, idx: &[usize]) -> Mat {
        Mat::from_fn(&self.field, self.rows, idx.len(), |r, c| self.get(r, idx[c]).clone())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Mat {
        Mat::from_fn(&self.field, idx.len(), self.cols, |r, c| self.get(idx[r], c).clone())
    }

    fn to_u64(&self) -> Vec<u64> {
        self.data
            .iter()
            .map(|x| match x {
                Scalar::Fp(v) => *v,
                _ => unreachable!("prime field matrix"),
            })
            .collect()
    }

    fn from_u64(field: &Field, rows: usize, cols: usize, v: Vec<u64>) -> Mat {
        Mat { field: field.clone(), rows, cols, data: v.into_iter().map(Scalar::Fp).collect() }
    }

    /// Reduced row-echelon form.
    pub fn rref(&self) -> Rref {
        let f = &self.field;
        if let FieldSpec::Prime(p) = *f.spec() {
            let mut a = self.to_u64();
            let pivots = rref_u64(&mut a, self.rows, self.cols, p);
            let rank = pivots.len();
            return Rref { reduced: Mat::from_u64(f, self.rows, self.cols, a), pivots, rank };
        }
        let (rows, cols) = (self.rows, self.cols);
        let mut m: Vec<Vec<Scalar>> = (0..rows).map(|r| self.row(r)).collect();
        let mut pivots = Vec::new();
        let mut pr = 0;
        for c in 0..cols {
            if pr == rows {
                break;
            }
            let Some(sel) = (pr..rows).find(|&r| !f.is_zero(&m[r][c])) else { continue };
            m.swap(pr, sel);
            let iv = f.inv(&m[pr][c]).expect("nonzero pivot");
            for v in m[pr][c..].iter_mut() {
                if !f.is_zero(v) {
                    *v = f.mul(v, &iv);
                }
            }
            let prow = m[pr].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r == pr || f.is_zero(&row[c]) {
                    continue;
                }
                let factor = row[c].clone();
                for k in c..cols {
                    if !f.is_zero(&prow[k]) {
                        row[k] = f.sub(&row[k], &f.mul(&factor, &prow[k]));
                    }
                }
            }
            pivots.push(c);
            pr += 1;
        }
        let reduced = Mat { field: f.clone(), rows, cols, data: m.into_iter().flatten().collect() };
        let rank = pivots.len();
        Rref { reduced, pivots, rank }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Kernel basis as columns; each basis vector has a 1 in its free column and 0 in the other free columns.
    pub fn nullspace(&self) -> Mat {
        let f = &self.field;
        let Rref { reduced, pivots, .. } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Mat::zeros(f, self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            out.set(fc, k, f.one());
            for (i, &pc) in pivots.iter().enumerate() {
                let v = reduced.get(i, fc);
                if !f.is_zero(v) {
                    out.set(pc, k, f.neg(v));
                }
            }
        }
        out
    }

    /// Free (non-pivot) column indices of the rref: coordinates of kernel vectors in the nullspace basis.
    pub fn nullspace_with_free(&self) -> (Mat, Vec<usize>) {
        let Rref { pivots, .. } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        (self.nullspace(), free)
    }

    /// Some x with a·x = b (free variables set to zero), or None if inconsistent.
    pub fn solve(&self, b: &Mat) -> Result<Option<Mat>, LinAlgError> {
        self.check_same(b)?;
        if self.rows != b.rows {
            return Err(LinAlgError::Shape(format!("solve: a has {} rows, b has {}", self.rows, b.rows)));
        }
        let f = &self.field;
        let aug = self.hstack(b);
        let Rref { reduced, pivots, .. } = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return Ok(None);
        }
        let mut x = Mat::zeros(f, self.cols, b.cols);
        for (i, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, reduced.get(i, self.cols + j).clone());
            }
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Option<Mat> {
        if !self.is_square() {
            return None;
        }
        let x = self.solve(&Mat::identity(&self.field, self.rows)).ok()??;
        Some(x)
    }

    /// Indices of columns forming a basis of the column space (first-occurrence order).
    pub fn pivot_columns(&self) -> Vec<usize> {
        self.rref().pivots
    }

    /// Standard basis vectors completing the column space of `self` to the whole space
    /// (pivot procedure on [self | I]).
    pub fn complement_standard(&self) -> Vec<usize> {
        let aug = self.hstack(&Mat::identity(&self.field, self.rows));
        aug.rref().pivots.into_iter().filter(|&p| p >= self.cols).map(|p| p - self.cols).collect()
    }

    /// Whether every column of `v` lies in the column space of `self`.
    pub fn spans(&self, v: &Mat) -> bool {
        matches!(self.solve(v), Ok(Some(_)))
    }
}

fn rref_u64(a: &mut [u64], rows: usize, cols: usize, p: u64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut pr = 0;
    for c in 0..cols {
        if pr == rows {
            break;
        }
        let Some(sel) = (pr..rows).find(|&r| a[r * cols + c] != 0) else { continue };
        if sel != pr {
            for k in 0..cols {
                a.swap(sel * cols + k, pr * cols + k);
            }
        }
        let iv = inv_mod(a[pr * cols + c], p);
        for k in c..cols {
            a[pr * cols + k] = a[pr * cols + k] * iv % p;
        }
        let prow: Vec<u64> = a[pr * cols..(pr + 1) * cols].to_vec();
        let nz: Vec<usize> = (c..cols).filter(|&k| prow[k] != 0).collect();
        for r in 0..rows {
            if r == pr {
                continue;
            }
            let factor = a[r * cols + c];
            if factor == 0 {
                continue;
            }
            let neg = p - factor;
            let row = &mut a[r * cols..(r + 1) * cols];
            for &k in &nz {
                row[k] = (row[k] + neg * prow[k]) % p;
            }
        }
        pivots.push(c);
        pr += 1;
    }
    pivots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_examples() {
        let q = Field::rationals();
        let i3 = Mat::identity(&q, 3);
        let r = i3.rref();
        assert_eq!(r.reduced, i3);
        assert_eq!(r.pivots, vec![0, 1, 2]);
        let z = Mat::zeros(&q, 2, 2);
        assert_eq!(z.rref().rank, 0);

        let c4 = Field::cyclotomic(4).unwrap();
        let zeta = c4.zeta().unwrap();
        let m = Mat::from_rows(
            &c4,
            vec![vec![c4.one(), zeta.clone()], vec![c4.pow(&zeta, 2), c4.pow(&zeta, 3)]],
        )
        .unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn nullspace_examples() {
        let f5 = Field::prime(5).unwrap();
        assert_eq!(Mat::identity(&f5, 4).nullspace().cols(), 0);
        assert_eq!(Mat::zeros(&f5, 3, 3).nullspace().cols(), 3);
        let j3 = Mat::from_i64_rows(&f5, &[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        let k = j3.nullspace();
        assert_eq!(k.cols(), 1);
        assert!(j3.mul(&k).is_zero());
    }

    #[test]
    fn solve_policy() {
        let q = Field::rationals();
        let a = Mat::from_i64_rows(&q, &[&[1, 1], &[0, 0]]);
        let b = Mat::from_i64_rows(&q, &[&[2], &[0]]);
        let x = a.solve(&b).unwrap().unwrap();
        assert_eq!(x, Mat::from_i64_rows(&q, &[&[2], &[0]]));
        let zero = Mat::zeros(&q, 2, 2);
        assert!(zero.solve(&b).unwrap().is_none());
        let bad = Mat::zeros(&q, 3, 1);
        assert!(a.solve(&bad).is_err());
    }

    #[test]
    fn kron_examples() {
        let q = Field::rationals();
        assert_eq!(Mat::identity(&q, 2).kron(&Mat::identity(&q, 3)), Mat::identity(&q, 6));
        let six = Mat::from_i64_rows(&q, &[&[2]]).kron(&Mat::from_i64_rows(&q, &[&[3]]));
        assert_eq!(six, Mat::from_i64_rows(&q, &[&[6]]));
        let a = Mat::from_i64_rows(&q, &[&[1, 2], &[3, 4]]);
        let b = Mat::from_i64_rows(&q, &[&[0, 1], &[1, 0]]);
        let k = a.kron(&b);
        // row (1,0), column (0,1) of the 2x2 ⊗ 2x2 product
        assert_eq!(k.get(2, 1), &q.from_i64(3));
        assert!(Mat::zeros(&q, 2, 2).kron(&a).is_zero());
    }

    #[test]
    fn inverse_and_complement() {
        let f = Field::prime(7).unwrap();
        let a = Mat::from_i64_rows(&f, &[&[1, 2], &[3, 4]]);
        let ai = a.inverse().unwrap();
        assert!(a.mul(&ai).is_identity());
        let v = Mat::from_i64_rows(&f, &[&[0], &[0], &[5]]);
        assert_eq!(v.complement_standard(), vec![0, 1]);
    }
}
