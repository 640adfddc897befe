//! Scalar and matrix cosine families.
//!
//! Scalar families are `c(t) = cos(a·t)` with complex `a`. Matrix families are
//! generated, `C(t) = cos(t·B)`, and can be evaluated two independent ways:
//! through the spectral calculus of a normal generator, or by a scaled Taylor
//! series followed by the double-angle step `C(2u) = 2·C(u)² − I`. The two
//! paths cross-check each other.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoslawError, Result};
use crate::linalg::{eig_normal, operator_norm, EigenDecomposition, Matrix, OVERFLOW_MAGNITUDE};

/// Scaled argument the series is summed at: `‖B‖·|t|/2^k ≤ 0.5`.
pub const SERIES_SCALED_TARGET: f64 = 0.5;
/// Terms below this magnitude end the Taylor sum.
pub const SERIES_TERM_TOL: f64 = 1e-18;
/// Largest `‖B‖·|t|` the series-doubling path accepts.
pub const SERIES_DOMAIN: f64 = 100.0;

/// `cos z = (e^{iz} + e^{−iz})/2`, with overflow reported instead of Inf.
pub fn complex_cos(z: Complex64) -> Result<Complex64> {
    let iz = Complex64::new(-z.im, z.re);
    let value = (iz.exp() + (-iz).exp()) * 0.5;
    if value.re.is_finite() && value.im.is_finite() && value.norm() <= OVERFLOW_MAGNITUDE {
        Ok(value)
    } else {
        Err(CoslawError::Overflowed { cap: OVERFLOW_MAGNITUDE })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarCosineFamily {
    pub a: Complex64,
}

impl ScalarCosineFamily {
    pub fn new(a: Complex64) -> Self {
        Self { a }
    }

    pub fn real(a: f64) -> Self {
        Self { a: Complex64::new(a, 0.0) }
    }

    pub fn eval(&self, t: f64) -> Result<Complex64> {
        eval_scalar(self, t)
    }
}

/// `c(t) = cos(a·t)`.
pub fn eval_scalar(f: &ScalarCosineFamily, t: f64) -> Result<Complex64> {
    complex_cos(f.a * t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalStrategy {
    /// `V·diag(cos(tλ))·V*`; the generator must be normal.
    Spectral,
    /// Scaled Taylor series plus repeated double-angle steps.
    #[default]
    Series,
}

/// `C(t) = cos(t·B)` for a fixed generator `B`.
#[derive(Debug)]
pub struct MatrixCosineFamily {
    generator: Matrix,
    strategy: EvalStrategy,
    generator_norm: f64,
    generator_sq: Matrix,
    spectral: OnceLock<Result<EigenDecomposition>>,
}

impl Clone for MatrixCosineFamily {
    fn clone(&self) -> Self {
        let spectral = OnceLock::new();
        if let Some(dec) = self.spectral.get() {
            let _ = spectral.set(dec.clone());
        }
        Self {
            generator: self.generator.clone(),
            strategy: self.strategy,
            generator_norm: self.generator_norm,
            generator_sq: self.generator_sq.clone(),
            spectral,
        }
    }
}

impl MatrixCosineFamily {
    pub fn new(generator: Matrix, strategy: EvalStrategy) -> Result<Self> {
        generator.ensure_finite()?;
        let generator_norm = operator_norm(&generator);
        let generator_sq = generator.matmul(&generator);
        Ok(Self { generator, strategy, generator_norm, generator_sq, spectral: OnceLock::new() })
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn strategy(&self) -> EvalStrategy {
        self.strategy
    }

    pub fn generator_norm(&self) -> f64 {
        self.generator_norm
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    /// Eigendecomposition of the generator, computed once.
    pub fn spectral_decomposition(&self) -> Result<&EigenDecomposition> {
        self.spectral.get_or_init(|| eig_normal(&self.generator)).as_ref().map_err(Clone::clone)
    }

    pub fn with_strategy(&self, strategy: EvalStrategy) -> Self {
        let mut out = self.clone();
        out.strategy = strategy;
        out
    }

    pub fn eval(&self, t: f64) -> Result<Matrix> {
        match self.strategy {
            EvalStrategy::Spectral => eval_matrix_spectral(self, t),
            EvalStrategy::Series => eval_matrix_series_doubling(self, t),
        }
    }
}

/// `V·diag(cos(t·λᵢ))·V*` through the eigendecomposition of the generator.
pub fn eval_matrix_spectral(f: &MatrixCosineFamily, t: f64) -> Result<Matrix> {
    let dec = f.spectral_decomposition()?;
    let cosines: Vec<Complex64> = dec.values.iter().map(|&l| complex_cos(l * t)).collect::<Result<_>>()?;
    let out = dec.with_values(&cosines);
    out.ensure_bounded()?;
    Ok(out)
}

/// Scaling and double-angle evaluation of `cos(t·B)`.
///
/// Picks the smallest `k` with `‖B‖·|t|/2^k ≤ 0.5`, sums
/// `Σ (−1)ⁿ (uB)²ⁿ/(2n)!` at `u = t/2^k` until a term drops under `1e-18`, then
/// applies `C ← 2C² − I` `k` times.
pub fn eval_matrix_series_doubling(f: &MatrixCosineFamily, t: f64) -> Result<Matrix> {
    let reach = f.generator_norm * t.abs();
    if !(reach <= SERIES_DOMAIN) {
        return Err(CoslawError::DomainError(format!(
            "series evaluation needs ‖B‖·|t| ≤ {SERIES_DOMAIN}, got {reach}"
        )));
    }
    let mut doublings = 0;
    while reach / f64::from(1u32 << doublings) > SERIES_SCALED_TARGET {
        doublings += 1;
    }
    let u = t / f64::from(1u32 << doublings);
    let n = f.dim();
    let step = f.generator_sq.scale_real(-u * u);

    let mut sum = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for k in 1..=60u32 {
        let denom = f64::from((2 * k - 1) * (2 * k));
        term = term.matmul(&step).scale_real(1.0 / denom);
        sum = &sum + &term;
        if term.frobenius_norm() < SERIES_TERM_TOL {
            break;
        }
    }

    let identity = Matrix::identity(n);
    for _ in 0..doublings {
        sum = &sum.matmul(&sum).scale_real(2.0) - &identity;
        sum.ensure_bounded()?;
    }
    Ok(sum)
}

/// A family of either kind, the unit the scans and law checks work on.
#[derive(Debug, Clone)]
pub enum CosineFamily {
    Scalar(ScalarCosineFamily),
    Matrix(MatrixCosineFamily),
}

impl CosineFamily {
    pub fn scalar(a: Complex64) -> Self {
        Self::Scalar(ScalarCosineFamily::new(a))
    }

    pub fn matrix(generator: Matrix, strategy: EvalStrategy) -> Result<Self> {
        Ok(Self::Matrix(MatrixCosineFamily::new(generator, strategy)?))
    }

    pub fn from_descriptor(descriptor: &FamilyDescriptor) -> Result<Self> {
        match descriptor {
            FamilyDescriptor::Scalar { a } => Ok(Self::scalar(Complex64::new(a[0], a[1]))),
            FamilyDescriptor::Matrix { generator, strategy } => Self::matrix(generator.clone(), *strategy),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Scalar(_) => 1,
            Self::Matrix(f) => f.dim(),
        }
    }

    /// `C(t)`; scalar families come back as 1×1 matrices.
    pub fn eval(&self, t: f64) -> Result<Matrix> {
        match self {
            Self::Scalar(f) => Ok(Matrix::scalar(1, f.eval(t)?)),
            Self::Matrix(f) => f.eval(t),
        }
    }

    /// `‖C(t) − I‖`
    pub fn distance_from_identity(&self, t: f64) -> Result<f64> {
        match self {
            Self::Scalar(f) => Ok((f.eval(t)? - 1.0).norm()),
            Self::Matrix(f) => Ok(operator_norm(&f.eval(t)?.sub_identity())),
        }
    }

    /// `|a|` or `‖B‖`.
    pub fn generator_norm(&self) -> f64 {
        match self {
            Self::Scalar(f) => f.a.norm(),
            Self::Matrix(f) => f.generator_norm(),
        }
    }

    /// Lipschitz constant of `t ↦ ‖C(t) − I‖` when the spectrum is real.
    ///
    /// `|d/dt cos(λt)| ≤ |λ|` for real `λ`, so a normal generator with real
    /// spectrum gives `max|λ|`. `None` when no such bound is available.
    pub fn lipschitz_bound(&self) -> Option<f64> {
        match self {
            Self::Scalar(f) => (f.a.im == 0.0).then(|| f.a.re.abs()),
            Self::Matrix(f) => {
                let dec = f.spectral_decomposition().ok()?;
                dec.has_real_spectrum(1e-12).then(|| dec.max_modulus())
            }
        }
    }

    pub fn descriptor(&self) -> FamilyDescriptor {
        match self {
            Self::Scalar(f) => FamilyDescriptor::Scalar { a: [f.a.re, f.a.im] },
            Self::Matrix(f) => FamilyDescriptor::Matrix { generator: f.generator.clone(), strategy: f.strategy },
        }
    }
}

/// Wire form: `{"kind":"scalar","a":[re,im]}` or
/// `{"kind":"matrix","B":<matrix>,"strategy":"spectral"|"series"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FamilyDescriptor {
    Scalar {
        a: [f64; 2],
    },
    Matrix {
        #[serde(rename = "B")]
        generator: Matrix,
        #[serde(default)]
        strategy: EvalStrategy,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    pub t: f64,
    pub s: f64,
    /// `‖C(t+s) + C(t−s) − 2·C(t)·C(s)‖`
    pub residual: f64,
    /// `1 + ‖C(t)‖·‖C(s)‖`, the natural size of the terms involved.
    pub scale: f64,
}

pub fn dalembert_residual(f: &CosineFamily, t: f64, s: f64) -> Result<ResidualReport> {
    let plus = f.eval(t + s)?;
    let minus = f.eval(t - s)?;
    let ct = f.eval(t)?;
    let cs = f.eval(s)?;
    let lhs = &plus + &minus;
    let rhs = ct.matmul(&cs).scale_real(2.0);
    let residual = operator_norm(&(&lhs - &rhs));
    let scale = 1.0 + operator_norm(&ct) * operator_norm(&cs);
    Ok(ResidualReport { t, s, residual, scale })
}
