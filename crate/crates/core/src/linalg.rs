//! Small dense complex matrices.
//!
//! Arithmetic is done here directly; eigenvalue problems, singular value
//! decompositions and LU factorizations are delegated to `faer`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use faer::linalg::solvers::DenseSolveCore;
use faer::{c64, Mat, MatRef};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Row-major construction; every row must have the same length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.iter().flatten().copied().collect() }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let rows: Vec<Vec<Complex64>> = rows.iter().map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.cols.max(1)).map(<[Complex64]>::to_vec).take(self.rows).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[Complex64]) {
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(Complex64::conj).collect() }
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * k).collect() }
    }

    pub fn scale_re(&self, k: f64) -> Self {
        self.scale(Complex64::new(k, 0.0))
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols, "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(x).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// `f g*`, the matrix of the rank-one map `h -> f <h, g>`.
    pub fn outer(f: &[Complex64], g: &[Complex64]) -> Self {
        Self::from_fn(f.len(), g.len(), |i, j| f[i] * g[j].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius pairing `tr(other* self)`.
    pub fn frobenius_inner(&self, other: &Self) -> Complex64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn dist(&self, other: &Self) -> f64 {
        (self - other).frobenius_norm()
    }

    pub fn max_dist(&self, other: &Self) -> f64 {
        (self - other).max_abs()
    }

    /// Stacks the columns into one vector.
    pub fn vectorize(&self) -> Vec<Complex64> {
        let mut v = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self[(i, j)]);
            }
        }
        v
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    fn to_faer(&self) -> Mat<c64> {
        Mat::from_fn(self.rows, self.cols, |i, j| {
            let z = self[(i, j)];
            c64::new(z.re, z.im)
        })
    }

    fn from_faer(m: MatRef<'_, c64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| {
            let z = m[(i, j)];
            Complex64::new(z.re, z.im)
        })
    }

    /// Thin SVD `self = U diag(s) V^H`, `s` non-increasing.
    fn thin_svd(&self) -> Result<(CMatrix, Vec<f64>, CMatrix)> {
        let svd = self.to_faer().thin_svd().map_err(|e| Error::Linalg(format!("svd: {e:?}")))?;
        let s = svd.S().column_vector();
        let s = (0..s.nrows()).map(|i| s[i].re).collect();
        Ok((Self::from_faer(svd.U()), s, Self::from_faer(svd.V())))
    }

    /// Singular values in non-increasing order.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        if self.rows == 0 || self.cols == 0 {
            return Ok(Vec::new());
        }
        let mut s = self.to_faer().singular_values().map_err(|e| Error::Linalg(format!("svd: {e:?}")))?;
        s.sort_by(|a, b| b.total_cmp(a));
        Ok(s)
    }

    pub fn spectral_norm(&self) -> Result<f64> {
        Ok(self.singular_values()?.first().copied().unwrap_or(0.0))
    }

    pub fn condition_number(&self) -> Result<f64> {
        let s = self.singular_values()?;
        Ok(match (s.first(), s.last()) {
            (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
            _ => f64::INFINITY,
        })
    }

    pub fn rank(&self, rel_tol: f64) -> Result<usize> {
        let s = self.singular_values()?;
        let top = s.first().copied().unwrap_or(0.0);
        Ok(s.iter().filter(|&&x| x > rel_tol * top.max(f64::MIN_POSITIVE)).count())
    }

    pub fn inverse(&self, max_condition: f64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Linalg(format!("cannot invert a {}x{} matrix", self.rows, self.cols)));
        }
        let condition = self.condition_number()?;
        if !(condition < max_condition) {
            return Err(Error::Singular { condition });
        }
        let inv = self.to_faer().partial_piv_lu().inverse();
        Ok(Self::from_faer(inv.as_ref()))
    }

    /// Eigenvalues and (unit) eigenvectors of a square matrix, as columns.
    pub fn eigen(&self) -> Result<(Vec<Complex64>, CMatrix)> {
        assert!(self.is_square());
        let evd = self.to_faer().eigen().map_err(|e| Error::Linalg(format!("eigen: {e:?}")))?;
        let s = evd.S().column_vector();
        let values = (0..self.rows).map(|i| Complex64::new(s[i].re, s[i].im)).collect();
        let mut vectors = Self::from_faer(evd.U());
        for j in 0..vectors.cols {
            let col = vectors.column(j);
            let nrm = norm(&col);
            if nrm > 0.0 {
                vectors.set_column(j, &col.iter().map(|x| x / nrm).collect::<Vec<_>>());
            }
        }
        Ok((values, vectors))
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        assert!(self.is_square());
        if self.rows == 0 {
            return Ok(Vec::new());
        }
        let values = self.to_faer().eigenvalues().map_err(|e| Error::Linalg(format!("eigenvalues: {e:?}")))?;
        Ok(values.into_iter().map(|z: c64| Complex64::new(z.re, z.im)).collect())
    }

    /// Unit vector spanning the (numerical) kernel: the right singular
    /// vector of the smallest singular value.
    pub fn null_vector(&self) -> Result<Vec<Complex64>> {
        if self.rows < self.cols {
            // pad with zero rows so the thin factor carries the whole kernel
            let mut padded = Self::zeros(self.cols, self.cols);
            padded.data[..self.data.len()].copy_from_slice(&self.data);
            return padded.null_vector();
        }
        let (_, s, v) = self.thin_svd()?;
        let best = (0..s.len()).min_by(|&a, &b| s[a].total_cmp(&s[b])).unwrap_or(0);
        Ok(v.column(best))
    }

    /// Minimum-norm least-squares solution of `self x = b`; singular values
    /// below `rel_cutoff * sigma_max` are discarded.
    pub fn lstsq(&self, b: &[Complex64], rel_cutoff: f64) -> Result<Vec<Complex64>> {
        assert_eq!(b.len(), self.rows);
        let (u, s, v) = self.thin_svd()?;
        let top = s.iter().copied().fold(0.0, f64::max);
        let mut x = vec![ZERO; self.cols];
        for (r, &sigma) in s.iter().enumerate() {
            if sigma <= rel_cutoff * top || sigma == 0.0 {
                continue;
            }
            let coeff = dot(b, &u.column(r)) / sigma;
            for (j, xj) in x.iter_mut().enumerate() {
                *xj += v[(j, r)] * coeff;
            }
        }
        Ok(x)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &'a CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &'a CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sum");
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &'a CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in difference");
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale_re(-1.0)
    }
}

pub fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

pub fn axpy(alpha: Complex64, x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
    x.iter().zip(y).map(|(a, b)| alpha * a + b).collect()
}

pub fn vec_dist(x: &[Complex64], y: &[Complex64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

/// `1 - |<x, y>| / (|x| |y|)`; zero when the vectors are parallel.
pub fn cosine_distance(x: &[Complex64], y: &[Complex64]) -> f64 {
    let nx = norm(x);
    let ny = norm(y);
    if nx == 0.0 || ny == 0.0 {
        return 1.0;
    }
    (1.0 - dot(x, y).norm() / (nx * ny)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_and_adjoint() {
        let a = CMatrix::from_rows(&[vec![c(1.0, 1.0), c(0.0, 2.0)], vec![c(3.0, 0.0), c(0.0, 0.0)]]);
        let b = CMatrix::identity(2);
        assert_eq!(&a * &b, a);
        let ah = a.adjoint();
        assert_eq!(ah[(0, 1)], c(3.0, 0.0));
        assert_eq!(ah[(1, 0)], c(0.0, -2.0));
    }

    #[test]
    fn eigen_of_cyclic_shift() {
        let n = 5;
        let mut m = CMatrix::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = ONE;
        }
        m[(0, n - 1)] = ONE;
        let (vals, vecs) = m.eigen().unwrap();
        for (k, lam) in vals.iter().enumerate() {
            assert!((lam.norm() - 1.0).abs() < 1e-12);
            let v = vecs.column(k);
            let mv = m.mul_vec(&v);
            let lv: Vec<_> = v.iter().map(|x| x * lam).collect();
            assert!(vec_dist(&mv, &lv) < 1e-12);
        }
    }

    #[test]
    fn lstsq_handles_rank_deficiency() {
        let a = CMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0], &[0.0, 0.0]]);
        let x = a.lstsq(&[c(2.0, 0.0), c(2.0, 0.0), ZERO], 1e-12).unwrap();
        assert!((x[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((x[1] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn lstsq_consistent_system_with_dependent_complex_column() {
        let mut a = CMatrix::from_fn(12, 7, |i, j| c(((i * 7 + j * 3) % 11) as f64 - 5.0 + (i * j) as f64 * 0.1, ((i + 2 * j) % 5) as f64));
        let mix: Vec<_> = a.column(0).iter().zip(a.column(1)).map(|(x, y)| x * 0.5 + y * c(0.0, 2.0)).collect();
        a.set_column(6, &mix);
        let x0: Vec<_> = (0..7).map(|j| c(j as f64, 1.0)).collect();
        let b = a.mul_vec(&x0);
        let x = a.lstsq(&b, 1e-10).unwrap();
        assert!(vec_dist(&a.mul_vec(&x), &b) < 1e-10);
        assert_eq!(a.rank(1e-10).unwrap(), 6);
    }

    #[test]
    fn null_vector_of_singular_matrix() {
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        let v = a.null_vector().unwrap();
        assert!(norm(&a.mul_vec(&v)) < 1e-12);
        assert!((norm(&v) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_rejects_singular() {
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(a.inverse(1e8), Err(Error::Singular { .. })));
        let b = CMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, 4.0]]);
        let bi = b.inverse(1e8).unwrap();
        assert!((bi[(1, 1)] - c(0.25, 0.0)).norm() < 1e-15);
    }
}
