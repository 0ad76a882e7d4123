//! Dense complex matrices, Kronecker products, Hermitian eigendecomposition
//! and joint-nullspace extraction.

mod eigen;
mod json;
mod nullspace;

use std::fmt;
use std::ops::{Index, IndexMut};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

pub use eigen::{hermitian_eig, hermitian_eig_with_tol, Spectrum};
pub use json::MatrixJson;
pub use nullspace::{joint_nullspace, GramAccumulator, Nullspace, RankPolicy};

/// Largest matrix dimension produced by [`kron`] unless a different cap is requested.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// Work size (multiply-adds) above which `matmul` splits rows across threads.
const PAR_MATMUL_WORK: usize = 1 << 18;

/// Entry-wise modifier applied to a generator before it enters a tensor word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modifier {
    Id,
    Conj,
    Transpose,
    ConjTranspose,
}

impl Modifier {
    pub const ALL: [Modifier; 4] = [Modifier::Id, Modifier::Conj, Modifier::Transpose, Modifier::ConjTranspose];

    /// Word-grammar suffix: `""`, `"*"`, `"^T"` or `"^H"`.
    pub fn suffix(self) -> &'static str {
        match self {
            Modifier::Id => "",
            Modifier::Conj => "*",
            Modifier::Transpose => "^T",
            Modifier::ConjTranspose => "^H",
        }
    }
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<Cx<T>>,
}

impl<T: Real> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:>+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<T: Real> Index<(usize, usize)> for Matrix<T> {
    type Output = Cx<T>;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Cx<T> {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Cx<T> {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

#[inline]
fn zero<T: Real>() -> Cx<T> {
    Cx::new(T::zero(), T::zero())
}

#[inline]
fn one<T: Real>() -> Cx<T> {
    Cx::new(T::one(), T::zero())
}

impl<T: Real> Matrix<T> {
    /// Builds a matrix from row-major entries, rejecting bad lengths and non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Cx<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { op: "new", left: (rows, cols), right: (data.len(), 1) });
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { row: k / cols.max(1), col: k % cols.max(1) });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cx<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Real matrix from row-major `f64` values.
    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        let data = values.iter().map(|&v| Cx::new(T::lit(v), T::zero())).collect();
        Self::new(rows, cols, data)
    }

    /// Square matrix from nested rows of `(re, im)` pairs.
    pub fn from_pairs(rows: &[Vec<(f64, f64)>]) -> Result<Self> {
        let n = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch { op: "from_pairs", left: (n, cols), right: (1, row.len()) });
            }
            data.extend(row.iter().map(|&(re, im)| Cx::new(T::lit(re), T::lit(im))));
        }
        Self::new(n, cols, data)
    }

    pub fn diagonal(entries: &[Cx<T>]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Matrix unit `E_ij` (0-based indices) of size `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = one();
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[Cx<T>] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [Cx<T>] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Cx<T>> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[Cx<T>] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Cx<T>> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn map(&self, f: impl Fn(Cx<T>) -> Cx<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn cast<U: Real>(&self) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| Cx::new(U::lit(z.re.to_f64_lossy()), U::lit(z.im.to_f64_lossy()))).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn apply_modifier(&self, m: Modifier) -> Self {
        match m {
            Modifier::Id => self.clone(),
            Modifier::Conj => self.conj(),
            Modifier::Transpose => self.transpose(),
            Modifier::ConjTranspose => self.adjoint(),
        }
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    fn check_same_shape(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch { op, left: self.shape(), right: other.shape() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "add")?;
        Ok(Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "sub")?;
        Ok(Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() })
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: Cx<T>, other: &Self) -> Result<()> {
        self.check_same_shape(other, "axpy")?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + alpha * b;
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { op: "matmul", left: self.shape(), right: other.shape() });
        }
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = Self::zeros(n, m);
        if n == 0 || m == 0 {
            return Ok(out);
        }
        let row_kernel = |r: usize, out_row: &mut [Cx<T>]| {
            let a_row = &self.data[r * k..(r + 1) * k];
            for (p, &a) in a_row.iter().enumerate() {
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let b_row = &other.data[p * m..(p + 1) * m];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o = *o + a * b;
                }
            }
        };
        if n * k * m >= PAR_MATMUL_WORK {
            out.data.par_chunks_mut(m).enumerate().for_each(|(r, row)| row_kernel(r, row));
        } else {
            out.data.chunks_mut(m).enumerate().for_each(|(r, row)| row_kernel(r, row));
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Cx<T>]) -> Result<Vec<Cx<T>>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { op: "apply", left: self.shape(), right: (v.len(), 1) });
        }
        Ok((0..self.rows).map(|r| self.row(r).iter().zip(v).fold(zero(), |acc, (a, b)| acc + a * b)).collect())
    }

    /// `g · self · g†`.
    pub fn conjugate_by(&self, g: &Self) -> Result<Self> {
        g.matmul(self)?.matmul(&g.adjoint())
    }

    pub fn trace(&self) -> Cx<T> {
        (0..self.rows.min(self.cols)).fold(zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// `‖self − other‖_F`.
    pub fn distance(&self, other: &Self) -> Result<T> {
        self.check_same_shape(other, "distance")?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm_sqr()).sum::<T>().sqrt())
    }

    /// Relative anti-Hermitian part `‖A − A†‖_F / ‖A‖_F`; zero for the zero matrix.
    pub fn hermitian_deviation(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let norm = self.frobenius_norm();
        if norm == T::zero() {
            return T::zero();
        }
        let mut acc = T::zero();
        for r in 0..self.rows {
            for c in 0..self.cols {
                acc = acc + (self[(r, c)] - self[(c, r)].conj()).norm_sqr();
            }
        }
        acc.sqrt() / norm
    }

    /// `‖A†A − I‖_F`.
    pub fn unitarity_defect(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let p = self.adjoint().matmul(self).expect("square");
        p.distance(&Self::identity(self.rows)).expect("same shape")
    }

    pub fn is_real(&self, tol: T) -> bool {
        self.data.iter().all(|z| z.im.abs() <= tol)
    }

    /// Copy of the `size × size` block at block coordinates `(bi, bj)` (0-based).
    pub fn block(&self, bi: usize, bj: usize, size: usize) -> Self {
        Self::from_fn(size, size, |r, c| self[(bi * size + r, bj * size + c)])
    }

    /// Column-stacking vectorisation: entry `(r, c)` lands at `c * rows + r`.
    pub fn vec_columns(&self) -> Vec<Cx<T>> {
        let mut v = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                v.push(self[(r, c)]);
            }
        }
        v
    }

    /// Inverse of [`Matrix::vec_columns`] for a square matrix.
    pub fn from_vec_columns(n: usize, v: &[Cx<T>]) -> Result<Self> {
        if v.len() != n * n {
            return Err(Error::DimensionMismatch { op: "from_vec_columns", left: (n, n), right: (v.len(), 1) });
        }
        Ok(Self::from_fn(n, n, |r, c| v[c * n + r]))
    }
}

/// Standard matrix product.
pub fn matmul<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    a.matmul(b)
}

/// Kronecker product `a ⊗ b`, capped at [`DEFAULT_DIM_CAP`] rows and columns.
pub fn kron<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    kron_with_cap(a, b, DEFAULT_DIM_CAP)
}

pub fn kron_with_cap<T: Real>(a: &Matrix<T>, b: &Matrix<T>, cap: usize) -> Result<Matrix<T>> {
    let rows = a.rows.checked_mul(b.rows).ok_or(Error::SizeOverflow { dim: usize::MAX, cap })?;
    let cols = a.cols.checked_mul(b.cols).ok_or(Error::SizeOverflow { dim: usize::MAX, cap })?;
    if rows.max(cols) > cap {
        return Err(Error::SizeOverflow { dim: rows.max(cols), cap });
    }
    let mut out = Matrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let s = a[(ar, ac)];
            if s.re == T::zero() && s.im == T::zero() {
                continue;
            }
            for br in 0..b.rows {
                let dst = (ar * b.rows + br) * cols + ac * b.cols;
                let src = &b.data[br * b.cols..(br + 1) * b.cols];
                for (o, &v) in out.data[dst..dst + b.cols].iter_mut().zip(src) {
                    *o = s * v;
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of a non-empty sequence of factors, left to right.
pub fn kron_all<'a, T: Real>(factors: impl IntoIterator<Item = &'a Matrix<T>>, cap: usize) -> Result<Matrix<T>> {
    let mut acc = Matrix::identity(1);
    for f in factors {
        acc = kron_with_cap(&acc, f, cap)?;
    }
    Ok(acc)
}

pub fn apply_modifier<T: Real>(a: &Matrix<T>, m: Modifier) -> Matrix<T> {
    a.apply_modifier(m)
}

/// Hilbert–Schmidt inner product `tr(a† b)`.
pub fn hs_inner<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Cx<T>> {
    a.check_same_shape(b, "hs_inner")?;
    Ok(a.data.iter().zip(&b.data).fold(zero(), |acc, (x, y)| acc + x.conj() * y))
}

impl<T: Real> Serialize for Matrix<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for Matrix<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        raw.try_into().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::CMatrix;

    fn c(re: f64, im: f64) -> Cx<f64> {
        Cx::new(re, im)
    }

    fn p12() -> CMatrix {
        CMatrix::from_real(2, 2, &[0., 1., 1., 0.]).unwrap()
    }

    fn f2() -> CMatrix {
        CMatrix::from_real(4, 4, &[1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0., 0., 0., 0., 0., 1.]).unwrap()
    }

    fn mm() -> CMatrix {
        let m = CMatrix::from_real(2, 2, &[0., 1., -1., 0.]).unwrap();
        kron(&m, &m).unwrap()
    }

    #[test]
    fn rejects_non_finite_and_bad_length() {
        assert!(matches!(CMatrix::new(1, 2, vec![c(0., 0.)]), Err(Error::DimensionMismatch { .. })));
        assert_eq!(CMatrix::new(1, 2, vec![c(0., 0.), c(f64::NAN, 0.)]), Err(Error::NonFinite { row: 0, col: 1 }));
    }

    #[test]
    fn matmul_examples() {
        let i2 = CMatrix::identity(2);
        assert_eq!(matmul(&i2, &i2).unwrap(), i2);
        assert_eq!(matmul(&p12(), &p12()).unwrap(), i2);
        assert_eq!(matmul(&f2(), &f2()).unwrap(), CMatrix::identity(4));
        let err = matmul(&CMatrix::zeros(2, 3), &CMatrix::zeros(2, 3)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { op: "matmul", .. }));
    }

    #[test]
    fn kron_examples() {
        assert_eq!(kron(&CMatrix::identity(2), &CMatrix::identity(2)).unwrap(), CMatrix::identity(4));
        let e = |i, j| CMatrix::unit(2, i, j);
        let mut f = kron(&e(0, 1), &e(1, 0)).unwrap();
        for (a, b) in [((1, 0), (0, 1)), ((0, 0), (0, 0)), ((1, 1), (1, 1))] {
            f = f.add(&kron(&e(a.0, a.1), &e(b.0, b.1)).unwrap()).unwrap();
        }
        assert_eq!(f, f2());
    }

    #[test]
    fn kron_respects_cap() {
        let a = CMatrix::identity(65);
        assert_eq!(kron(&a, &a).unwrap_err(), Error::SizeOverflow { dim: 4225, cap: 4096 });
        assert!(kron_with_cap(&CMatrix::identity(3), &CMatrix::identity(3), 8).is_err());
    }

    #[test]
    fn modifier_examples() {
        let i3 = CMatrix::identity(3);
        for m in Modifier::ALL {
            assert_eq!(apply_modifier(&i3, m), i3);
        }
        let a = CMatrix::from_pairs(&[vec![(0., 0.), (1., 0.)], vec![(0., 1.), (0., 0.)]]).unwrap();
        let expected = CMatrix::from_pairs(&[vec![(0., 0.), (0., -1.)], vec![(1., 0.), (0., 0.)]]).unwrap();
        assert_eq!(apply_modifier(&a, Modifier::ConjTranspose), expected);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let q = CMatrix::from_real(2, 2, &[s, -s, s, s]).unwrap();
        assert_eq!(apply_modifier(&q, Modifier::Conj), q);
    }

    #[test]
    fn hs_inner_examples() {
        let i4 = CMatrix::identity(4);
        assert_eq!(hs_inner(&i4, &i4).unwrap(), c(4., 0.));
        assert_eq!(hs_inner(&i4, &f2()).unwrap(), c(2., 0.));
        assert_eq!(hs_inner(&f2(), &mm()).unwrap(), c(-2., 0.));
        assert!(hs_inner(&i4, &CMatrix::identity(2)).is_err());
    }

    #[test]
    fn vectorisation_matches_commutator_identity() {
        // vec(gW − Wg) = (I⊗g − gᵀ⊗I) vec(W)
        let g = CMatrix::from_pairs(&[vec![(0.3, 0.1), (1., -0.2)], vec![(0.5, 0.5), (-0.7, 0.)]]).unwrap();
        let w = CMatrix::from_pairs(&[vec![(1., 2.), (3., 0.)], vec![(0., -1.), (0.25, 0.5)]]).unwrap();
        let lhs = g.matmul(&w).unwrap().sub(&w.matmul(&g).unwrap()).unwrap().vec_columns();
        let op = kron(&CMatrix::identity(2), &g).unwrap().sub(&kron(&g.transpose(), &CMatrix::identity(2)).unwrap()).unwrap();
        let rhs = op.apply(&w.vec_columns()).unwrap();
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!((a - b).norm() < 1e-14);
        }
        assert_eq!(CMatrix::from_vec_columns(2, &w.vec_columns()).unwrap(), w);
    }

    #[test]
    fn blocks_and_deviation() {
        let f = f2();
        assert_eq!(f.block(0, 1, 2), CMatrix::unit(2, 1, 0));
        assert_eq!(f.hermitian_deviation(), 0.0);
        assert_eq!(CMatrix::zeros(3, 3).hermitian_deviation(), 0.0);
        let a = CMatrix::from_pairs(&[vec![(0., 0.), (1., 0.)], vec![(0., 0.), (0., 0.)]]).unwrap();
        assert!(a.hermitian_deviation() > 1.0);
    }

    #[test]
    fn works_in_single_precision() {
        let a = crate::CMatrix32::from_real(2, 2, &[0., 1., 1., 0.]).unwrap();
        assert_eq!(a.matmul(&a).unwrap(), crate::CMatrix32::identity(2));
    }
}
