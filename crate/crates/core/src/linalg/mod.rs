//! Dense complex square matrices.
//!
//! `Matrix` is the concrete unital algebra every other module works in.
//! Storage is row-major and the dimension is capped at [`MAX_DIM`].

mod eigen;
mod norm;
mod radius;

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoslawError, Result};

pub use eigen::{eig_hermitian, eig_normal, EigenDecomposition};
pub use norm::{operator_norm, operator_norm_seeded, try_operator_norm, DEFAULT_SEED};
pub use radius::{spectral_radius, RadiusEstimate};

pub const MAX_DIM: usize = 256;

/// Magnitude above which a produced entry counts as overflowed.
pub const OVERFLOW_MAGNITUDE: f64 = 1e300;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1 && dim <= MAX_DIM, "matrix dimension {dim} out of range");
        Self { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Multiple of the identity.
    pub fn scalar(dim: usize, value: Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = value;
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(CoslawError::InvalidMatrix(format!("dimension {dim} not in 1..={MAX_DIM}")));
        }
        if data.len() != dim * dim {
            return Err(CoslawError::InvalidMatrix(format!(
                "expected {} entries for dim {dim}, got {}",
                dim * dim,
                data.len()
            )));
        }
        let m = Self { dim, data };
        m.ensure_finite()?;
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.dim + j] = value;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn ensure_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(CoslawError::InvalidMatrix("non-finite entry".into()))
        }
    }

    /// Fails with `Overflowed` once any entry passes [`OVERFLOW_MAGNITUDE`].
    pub fn ensure_bounded(&self) -> Result<()> {
        let overflowed = self
            .data
            .iter()
            .any(|z| !(z.re.abs() <= OVERFLOW_MAGNITUDE && z.im.abs() <= OVERFLOW_MAGNITUDE));
        if overflowed {
            Err(CoslawError::Overflowed { cap: OVERFLOW_MAGNITUDE })
        } else {
            Ok(())
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        // scaled accumulation so that huge entries do not overflow the sum
        let scale = self.max_abs();
        if scale == 0.0 || !scale.is_finite() {
            return scale;
        }
        let sum: f64 = self.data.iter().map(|z| (z / scale).norm_sqr()).sum();
        scale * sum.sqrt()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |i, j| self.data[j * n + i].conj())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * factor).collect() }
    }

    /// `self - c·I`
    pub fn sub_scalar(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            out.data[i * self.dim + i] -= c;
        }
        out
    }

    pub fn sub_identity(&self) -> Self {
        self.sub_scalar(Complex64::new(1.0, 0.0))
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Self { dim: n, data: out }
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim;
        (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(v)
                    .fold(Complex64::new(0.0, 0.0), |acc, (a, x)| acc + a * x)
            })
            .collect()
    }

    /// `self* · v` without forming the adjoint.
    pub fn adjoint_matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, x) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(&self.data[i * n..(i + 1) * n]) {
                *o += a.conj() * x;
            }
        }
        out
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim;
        let scale = self.max_abs().max(1.0);
        (0..n).all(|i| (i..n).all(|j| (self.get(i, j) - self.get(j, i).conj()).norm() <= tol * scale))
    }

    /// `(self + self*) / 2`
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |i, j| (self.get(i, j) + self.get(j, i).conj()) * 0.5)
    }

    /// `(self - self*) / (2i)`, Hermitian.
    pub fn skew_part_over_i(&self) -> Self {
        let n = self.dim;
        let half_over_i = Complex64::new(0.0, -0.5);
        Self::from_fn(n, |i, j| (self.get(i, j) - self.get(j, i).conj()) * half_over_i)
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim;
        (0..n).all(|i| (0..n).all(|j| i == j || self.get(i, j) == Complex64::new(0.0, 0.0)))
    }

    pub fn commutator_with_adjoint(&self) -> Self {
        let adj = self.adjoint();
        &self.matmul(&adj) - &adj.matmul(self)
    }

    /// Normality test `‖MM* − M*M‖ ≤ tol·‖M‖²` in the operator norm.
    pub fn normality_defect(&self) -> f64 {
        if self.is_diagonal() {
            return 0.0;
        }
        operator_norm(&self.commutator_with_adjoint())
    }

    pub fn is_normal(&self, tol: f64) -> bool {
        let n = operator_norm(self);
        self.normality_defect() <= tol * n * n
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            dim: self.dim,
            re: self.data.iter().map(|z| z.re).collect(),
            im: self.data.iter().map(|z| z.im).collect(),
        }
    }
}

impl<'a> Add<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn add(self, rhs: &'a Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        Matrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &'a Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        Matrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl<'a> Mul<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &'a Matrix) -> Matrix {
        self.matmul(rhs)
    }
}

/// Wire form of a matrix: `{"dim": n, "re": [...], "im": [...]}`, row-major.
///
/// `im` may be omitted for real matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

impl TryFrom<MatrixJson> for Matrix {
    type Error = CoslawError;

    fn try_from(value: MatrixJson) -> Result<Self> {
        let n2 = value.dim * value.dim;
        if value.re.len() != n2 {
            return Err(CoslawError::InvalidMatrix(format!(
                "\"re\" has {} entries, dim {} needs {n2}",
                value.re.len(),
                value.dim
            )));
        }
        let im = if value.im.is_empty() { vec![0.0; n2] } else { value.im };
        if im.len() != n2 {
            return Err(CoslawError::InvalidMatrix(format!(
                "\"im\" has {} entries, dim {} needs {n2}",
                im.len(),
                value.dim
            )));
        }
        let data = value.re.into_iter().zip(im).map(|(r, i)| Complex64::new(r, i)).collect();
        Matrix::from_row_major(value.dim, data)
    }
}

impl From<&Matrix> for MatrixJson {
    fn from(m: &Matrix) -> Self {
        m.to_json()
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let json = MatrixJson::deserialize(deserializer)?;
        Matrix::try_from(json).map_err(serde::de::Error::custom)
    }
}
