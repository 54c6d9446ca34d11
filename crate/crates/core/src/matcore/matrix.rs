use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest supported Hilbert-space dimension.
pub const MAX_DIM: usize = 64;

/// Dense `dim × dim` complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexMatrix {
    fn check_dim(dim: usize) -> Result<()> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(())
    }

    pub(crate) fn from_inner(inner: DMatrix<Complex64>) -> Self {
        debug_assert!(inner.is_square());
        Self { inner }
    }

    /// Panics if `dim` is outside `1..=MAX_DIM`.
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} out of range");
        Self::from_inner(DMatrix::zeros(dim, dim))
    }

    /// Panics if `dim` is outside `1..=MAX_DIM`.
    pub fn identity(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} out of range");
        Self::from_inner(DMatrix::identity(dim, dim))
    }

    /// Builds a matrix from `dim²` entries in row-major order.
    pub fn from_row_major(dim: usize, entries: &[Complex64]) -> Result<Self> {
        Self::check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::EntryCount {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self::from_inner(DMatrix::from_row_slice(dim, dim, entries)))
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        let mut flat = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::EntryCount {
                    expected: dim,
                    actual: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        Self::from_row_major(dim, &flat)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Result<Self> {
        let dim = diag.len();
        Self::check_dim(dim)?;
        if diag.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self::from_inner(DMatrix::from_diagonal(
            &nalgebra::DVector::from_column_slice(diag),
        )))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let diag: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&diag)
    }

    /// Rank-one operator `|v⟩⟨v|`.
    pub fn outer(v: &[Complex64]) -> Result<Self> {
        let dim = v.len();
        Self::check_dim(dim)?;
        let col = nalgebra::DVector::from_column_slice(v);
        Ok(Self::from_inner(&col * col.adjoint()))
    }

    /// Block-diagonal matrix with the given square blocks along the diagonal.
    pub fn block_diagonal(blocks: &[ComplexMatrix]) -> Result<Self> {
        let dim: usize = blocks.iter().map(|b| b.dim()).sum();
        Self::check_dim(dim)?;
        let mut inner = DMatrix::zeros(dim, dim);
        let mut offset = 0;
        for b in blocks {
            let d = b.dim();
            inner.view_mut((offset, offset), (d, d)).copy_from(&b.inner);
            offset += d;
        }
        Ok(Self::from_inner(inner))
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.inner[(row, col)]
    }

    pub fn as_inner(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.inner
    }

    pub fn to_row_major(&self) -> Vec<Complex64> {
        let d = self.dim();
        let mut out = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        let d = self.dim();
        (0..d)
            .map(|i| (0..d).map(|j| self.inner[(i, j)]).collect())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_inner(self.inner.adjoint())
    }

    /// `(M + M*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let mut h = &self.inner + self.inner.adjoint();
        h.scale_mut(0.5);
        Self::from_inner(h)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_inner(self.inner.scale(s))
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self::from_inner(&self.inner * s)
    }

    pub fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub(crate) fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub(crate) fn distance_unchecked(&self, other: &Self) -> f64 {
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `M · N · M*`.
    pub fn sandwich(&self, middle: &Self) -> Self {
        Self::from_inner(&self.inner * &middle.inner * self.inner.adjoint())
    }

    /// `tr(M · N)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        let d = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for k in 0..d {
                acc += self.inner[(i, k)] * other.inner[(k, i)];
            }
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.inner.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
                ComplexMatrix::from_inner(&self.inner $op &rhs.inner)
            }
        }
        impl $tr<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                &self $op &rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

// Row-major list of rows, each entry a `[re, im]` pair.
impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.dim();
        let mut seq = serializer.serialize_seq(Some(d))?;
        for i in 0..d {
            let row: Vec<[f64; 2]> = (0..d)
                .map(|j| {
                    let z = self.inner[(i, j)];
                    [z.re, z.im]
                })
                .collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        let rows: Vec<Vec<Complex64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .collect();
        ComplexMatrix::from_rows(&rows).map_err(de::Error::custom)
    }
}
