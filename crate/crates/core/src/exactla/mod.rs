//! Exact field arithmetic and dense linear algebra.

mod field;
mod mat;
mod rat;

pub use field::{cyclotomic_poly, Field, FieldSpec, Scalar};
pub use mat::{Mat, Rref};
pub use rat::Rat;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("unsupported field: {0}")]
    BadField(String),
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A subspace given by a basis whose coordinates can be read off at fixed rows.
///
/// Bases coming out of [`Mat::nullspace`] have an identity block on the free rows,
/// so the coordinate of a member vector is its entry at those rows.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub basis: Mat,
    pub coord_rows: Vec<usize>,
}

impl Subspace {
    /// Wraps an arbitrary full-column-rank basis, column-reducing it so that coordinates can be read off.
    pub fn from_basis(basis: &Mat) -> Subspace {
        let t = basis.transpose().rref();
        let reduced = t.reduced.block(0, 0, t.rank, basis.rows()).transpose();
        Subspace { basis: reduced, coord_rows: t.pivots }
    }

    pub fn from_nullspace(basis: Mat, free: Vec<usize>) -> Subspace {
        Subspace { basis, coord_rows: free }
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// Coordinates of the columns of `v`, assumed to lie in the subspace.
    pub fn coords_unchecked(&self, v: &Mat) -> Mat {
        v.select_rows(&self.coord_rows)
    }

    /// Coordinates of the columns of `v`, or None if some column is outside the subspace.
    pub fn coords(&self, v: &Mat) -> Option<Mat> {
        let c = self.coords_unchecked(v);
        if self.basis.mul(&c) == *v {
            Some(c)
        } else {
            None
        }
    }
}
