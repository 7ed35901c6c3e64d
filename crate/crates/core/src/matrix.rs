//! Dense square complex matrices.
//!
//! Everything in the crate (Hamiltonians, symmetry operators, Bloch matrices)
//! is small enough that a row-major `Vec` is the right representation. Heavy
//! lifting (eigensolves) is delegated to `faer` through [`ComplexMatrix::to_faer`].

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries. Fails on non-square input or
    /// non-finite entries.
    pub fn from_row_major(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimMismatch { expected: dim * dim, found: entries.len() });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("matrix entry"));
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows<const N: usize>(rows: [[Complex64; N]; N]) -> Self {
        Self { dim: N, entries: rows.iter().flatten().copied().collect() }
    }

    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self {
            dim: N,
            entries: rows.iter().flatten().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.entries.iter().all(|z| z.im.abs() <= tol)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|z| z * c).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.entries[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, found: v.len() });
        }
        Ok((0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for a in 0..n {
            for b in 0..n {
                let s = self[(a, b)];
                if s == ZERO {
                    continue;
                }
                for i in 0..m {
                    for j in 0..m {
                        out[(a * m + i, b * m + j)] = s * other[(i, j)];
                    }
                }
            }
        }
        out
    }

    /// Extracts the `size x size` block whose top-left corner is `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, size: usize) -> Self {
        let mut out = Self::zeros(size);
        for i in 0..size {
            for j in 0..size {
                out[(i, j)] = self[(r0 + i, c0 + j)];
            }
        }
        out
    }

    pub fn to_faer(&self) -> faer::Mat<Complex64> {
        faer::Mat::from_fn(self.dim, self.dim, |i, j| self[(i, j)])
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = self.row(i).iter().map(|z| format!("{z:.4}")).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Pauli matrices and the 2x2 identity.
pub mod pauli {
    use super::*;

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_rows([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn sigma_y() -> ComplexMatrix {
        ComplexMatrix::from_rows([[ZERO, -I], [I, ZERO]])
    }

    pub fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_rows([[ONE, ZERO], [ZERO, -ONE]])
    }
}

pub(crate) fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
