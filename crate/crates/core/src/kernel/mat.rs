use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Dense row-major complex matrix of arbitrary shape.
///
/// Used for frames (n×k isometries) and intermediate products; square
/// operators live in [`CMatrix`].
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// First `k` columns of the n×n identity.
    pub fn coordinate_frame(n: usize, k: usize) -> Self {
        Mat::from_fn(n, k, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Mat { rows, cols, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[C64]) {
        debug_assert_eq!(v.len(), self.rows);
        for (i, x) in v.iter().enumerate() {
            self[(i, j)] = *x;
        }
    }

    /// Columns `start..end` as a new matrix.
    pub fn column_block(&self, start: usize, end: usize) -> Mat {
        Mat::from_fn(self.rows, end - start, |i, j| self[(i, start + j)])
    }

    /// Rows `r0..r1` and columns `c0..c1` as a new matrix.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Mat {
        Mat::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Overwrites columns `start..start + block.cols()` with `block`.
    pub fn set_column_block(&mut self, start: usize, block: &Mat) {
        debug_assert_eq!(block.rows, self.rows);
        for i in 0..self.rows {
            for j in 0..block.cols {
                self[(i, start + j)] = block[(i, j)];
            }
        }
    }

    /// Horizontal concatenation.
    pub fn hcat(&self, other: &Mat) -> Mat {
        debug_assert_eq!(self.rows, other.rows);
        Mat::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                other[(i, j - self.cols)]
            }
        })
    }

    pub fn adjoint(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for l in 0..self.cols {
                let a = self.data[i * self.cols + l];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[l * rhs.cols..(l + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self* · rhs` without materializing the adjoint.
    pub fn adjoint_matmul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.rows, rhs.rows, "adjoint_matmul shape mismatch");
        let mut out = Mat::zeros(self.cols, rhs.cols);
        for l in 0..self.rows {
            let lhs_row = self.row(l);
            let rhs_row = rhs.row(l);
            for (i, a) in lhs_row.iter().enumerate() {
                let a = a.conj();
                if a == ZERO {
                    continue;
                }
                let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self · rhs*` without materializing the adjoint.
    pub fn matmul_adjoint(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.cols, "matmul_adjoint shape mismatch");
        Mat::from_fn(self.rows, rhs.rows, |i, j| {
            self.row(i)
                .iter()
                .zip(rhs.row(j))
                .fold(ZERO, |acc, (a, b)| acc + a * b.conj())
        })
    }

    pub fn scale(&self, s: C64) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.frobenius_norm_sqr())
    }

    /// Real part of the Frobenius inner product `tr(self* · other)`.
    pub fn real_inner(&self, other: &Mat) -> f64 {
        debug_assert_eq!(self.data.len(), other.data.len());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn zip_with(&self, rhs: &Mat, f: impl Fn(C64, C64) -> C64) -> Mat {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "elementwise shape mismatch"
        );
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add<&Mat> for &Mat {
    type Output = Mat;
    fn add(self, rhs: &Mat) -> Mat {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub<&Mat> for &Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<&Mat> for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        self.matmul(rhs)
    }
}

/// Square complex matrix with finite entries: an element of the finite
/// tracial algebra `M_n(C)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix(Mat);

impl CMatrix {
    pub fn new(n: usize, entries: Vec<C64>) -> Result<Self> {
        CMatrix::try_from(Mat::from_vec(n, n, entries)?)
    }

    pub fn zeros(n: usize) -> Self {
        CMatrix(Mat::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        CMatrix(Mat::identity(n))
    }

    /// Builds from a generator; panics if it yields a non-finite value.
    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        CMatrix::try_from(Mat::from_fn(n, n, f)).expect("non-finite matrix entry")
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: r.len(),
                });
            }
            data.extend(r.iter().map(|&x| C64::new(x, 0.0)));
        }
        CMatrix::new(n, data)
    }

    /// Builds from separate real and imaginary row-major parts.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let n = re.len();
        if im.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: im.len(),
            });
        }
        let mut data = Vec::with_capacity(n * n);
        for (r, i) in re.iter().zip(im) {
            if r.len() != n || i.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: r.len().max(i.len()),
                });
            }
            data.extend(r.iter().zip(i).map(|(&a, &b)| C64::new(a, b)));
        }
        CMatrix::new(n, data)
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let n = values.len();
        CMatrix::from_fn(n, |i, j| if i == j { values[i] } else { ZERO })
    }

    pub fn real_diagonal(values: &[f64]) -> Self {
        let n = values.len();
        CMatrix::from_fn(n, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// The nilpotent n×n Jordan block: ones on the superdiagonal.
    pub fn jordan(n: usize) -> Self {
        CMatrix::from_fn(n, |i, j| if j == i + 1 { ONE } else { ZERO })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn as_mat(&self) -> &Mat {
        &self.0
    }

    pub fn into_mat(self) -> Mat {
        self.0
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix(self.0.adjoint())
    }

    pub fn scale(&self, s: f64) -> CMatrix {
        CMatrix(self.0.scale_real(s))
    }

    pub fn diag(&self) -> Vec<C64> {
        (0..self.dim()).map(|i| self[(i, i)]).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.frobenius_norm()
    }

    /// SHA-256 over the dimension and the IEEE bit patterns of all entries.
    pub fn digest(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update((self.dim() as u64).to_le_bytes());
        for z in &self.0.data {
            h.update(z.re.to_bits().to_le_bytes());
            h.update(z.im.to_bits().to_le_bytes());
        }
        h.finalize().into()
    }

    pub fn digest_hex(&self) -> String {
        let mut s = String::with_capacity(64);
        for b in self.digest() {
            let _ = write!(s, "{b:02x}");
        }
        s
    }
}

impl TryFrom<Mat> for CMatrix {
    type Error = Error;

    fn try_from(m: Mat) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::NotSquare {
                rows: m.rows,
                cols: m.cols,
            });
        }
        if let Some(pos) = m
            .data
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite {
                row: pos / m.cols,
                col: pos % m.cols,
            });
        }
        Ok(CMatrix(m))
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl Add<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 + &rhs.0)
    }
}

impl Sub<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 - &rhs.0)
    }
}

impl Mul<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(self.0.matmul(&rhs.0))
    }
}

impl Mul<&Mat> for &CMatrix {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        self.0.matmul(rhs)
    }
}

impl AsRef<Mat> for CMatrix {
    fn as_ref(&self) -> &Mat {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_square_and_non_finite() {
        assert!(matches!(
            CMatrix::try_from(Mat::zeros(2, 3)),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
        let mut m = Mat::zeros(2, 2);
        m[(1, 0)] = C64::new(f64::NAN, 0.0);
        assert!(matches!(
            CMatrix::try_from(m),
            Err(Error::NonFinite { row: 1, col: 0 })
        ));
    }

    #[test]
    fn adjoint_products_agree_with_explicit_adjoint() {
        let a = Mat::from_fn(3, 2, |i, j| C64::new(i as f64 + 1.0, j as f64 - 0.5));
        let b = Mat::from_fn(3, 4, |i, j| C64::new(j as f64, 0.25 * i as f64));
        let lhs = a.adjoint_matmul(&b);
        let rhs = a.adjoint().matmul(&b);
        assert!((&lhs - &rhs).max_abs() < 1e-14);
        let c = Mat::from_fn(4, 2, |i, j| C64::new((i * j) as f64, 1.0));
        let lhs = a.matmul_adjoint(&c);
        let rhs = a.matmul(&c.adjoint());
        assert!((&lhs - &rhs).max_abs() < 1e-14);
    }

    #[test]
    fn digest_depends_on_every_bit() {
        let a = CMatrix::identity(3);
        let mut m = a.clone().into_mat();
        m[(2, 1)] = C64::new(0.0, -0.0);
        let b = CMatrix::try_from(m).unwrap();
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest_hex().len(), 64);
    }
}
