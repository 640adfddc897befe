//! Binomial square-root series, the halving step, and dyadic reconstruction.
//!
//! For `‖x‖ < 1` the principal root is `√(I−x) = Σ (−1)ⁿ αₙ xⁿ` where `αₙ` is
//! the generalized binomial coefficient "1/2 choose n". Since `(−1)ⁿ⁻¹αₙ > 0`
//! for `n ≥ 1`, the scalar majorant `Σ|αₙ| rⁿ` telescopes to `1 − √(1−r)`,
//! which bounds both `‖I − √(I−x)‖` and every truncation tail.
//!
//! Halving recovers `C(s)` from `C(2s)` as `√(I − (I − C(2s))/2)`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use serde::Serialize;

use crate::error::{CoslawError, Result};
use crate::linalg::{operator_norm, Matrix};

pub const DEFAULT_MARGIN: f64 = 1e-6;
/// Certified truncation error the partial sums are run to.
pub const TAIL_TOL: f64 = 1e-14;
/// Hard cap on the number of series terms.
pub const MAX_TERMS: usize = 200_000;

/// `α₀ .. α_N` of `√(1−z) = Σ (−1)ⁿ αₙ zⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinomialCoefficients {
    pub alphas: Vec<f64>,
}

impl BinomialCoefficients {
    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// Coefficient of `zⁿ` in `√(1−z)`, i.e. `(−1)ⁿ αₙ`.
    pub fn taylor(&self, n: usize) -> f64 {
        if n % 2 == 0 {
            self.alphas[n]
        } else {
            -self.alphas[n]
        }
    }
}

/// `α₀ = 1`, `αₙ = αₙ₋₁·(3/2 − n)/n`.
pub fn binom_sqrt_coeffs(n: usize) -> BinomialCoefficients {
    let mut alphas = Vec::with_capacity(n + 1);
    alphas.push(1.0);
    for k in 1..=n {
        let kf = k as f64;
        alphas.push(alphas[k - 1] * (1.5 - kf) / kf);
    }
    BinomialCoefficients { alphas }
}

fn coefficient_cache() -> &'static RwLock<HashMap<usize, Arc<BinomialCoefficients>>> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<BinomialCoefficients>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Memoized [`binom_sqrt_coeffs`].
pub fn cached_coeffs(n: usize) -> Arc<BinomialCoefficients> {
    if let Some(hit) = coefficient_cache().read().expect("coefficient cache poisoned").get(&n) {
        return Arc::clone(hit);
    }
    let fresh = Arc::new(binom_sqrt_coeffs(n));
    coefficient_cache().write().expect("coefficient cache poisoned").entry(n).or_insert(fresh).clone()
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesResult {
    pub value: Matrix,
    pub terms_used: usize,
    /// Upper bound on `‖√(I−x) − value‖`.
    pub tail_bound: f64,
}

/// `√(I − x)` by partial sums of the binomial series.
///
/// Summation stops once the scalar tail `Σ_{n>n₀}|αₙ|‖x‖ⁿ`, evaluated as
/// `(1 − √(1−r))` minus the partial majorant sum, drops below `1e-14`.
pub fn sqrt_one_minus(x: &Matrix, margin: f64) -> Result<SeriesResult> {
    x.ensure_finite()?;
    let margin = margin.max(DEFAULT_MARGIN);
    let r = operator_norm(x);
    let limit = 1.0 - margin;
    if !(r <= limit) {
        return Err(CoslawError::OutsideDisk { norm: r, limit });
    }
    let n = x.dim();
    if r == 0.0 {
        return Ok(SeriesResult { value: Matrix::identity(n), terms_used: 1, tail_bound: 0.0 });
    }

    // 1 − √(1−r) without cancellation for small r
    let majorant_total = r / (1.0 + (1.0 - r).sqrt());
    let mut value = Matrix::identity(n);
    let mut power = Matrix::identity(n);
    let mut alpha = 1.0f64;
    let mut r_pow = 1.0f64;
    let mut majorant_partial = 0.0f64;
    let mut terms_used = 1;
    let mut tail = majorant_total;
    for k in 1..=MAX_TERMS {
        let kf = k as f64;
        alpha *= (1.5 - kf) / kf;
        power = power.matmul(x);
        // (−1)^k α_k = −|α_k| for every k ≥ 1
        value = &value - &power.scale_real(alpha.abs());
        r_pow *= r;
        majorant_partial += alpha.abs() * r_pow;
        terms_used = k + 1;
        tail = (majorant_total - majorant_partial).max(0.0);
        if tail < TAIL_TOL {
            break;
        }
    }
    if tail >= TAIL_TOL {
        return Err(CoslawError::SeriesBudget(MAX_TERMS));
    }
    Ok(SeriesResult { value, terms_used, tail_bound: tail })
}

/// `(‖I − √(I−x)‖, 1 − √(1−‖x‖))`; the first never exceeds the second.
pub fn verify_sqrt_bound(x: &Matrix) -> Result<(f64, f64)> {
    let root = sqrt_one_minus(x, DEFAULT_MARGIN)?;
    let lhs = operator_norm(&root.value.sub_identity());
    let r = operator_norm(x);
    let rhs = r / (1.0 + (1.0 - r).sqrt());
    Ok((lhs, rhs))
}

/// `C(s) = √(I − (I − C(2s))/2)`.
///
/// Requires `‖C(2s) − I‖ ≤ 2(1 − margin)`. The principal root is the right
/// one only when `ρ(C(s) − I) < 1`, which cannot be checked before `C(s)` is
/// known; the returned value is instead checked against `2·C(s)² − I = C(2s)`.
pub fn halve(c2s: &Matrix, margin: f64) -> Result<Matrix> {
    let n = c2s.dim();
    let x = (&Matrix::identity(n) - c2s).scale_real(0.5);
    let root = sqrt_one_minus(&x, margin)?;
    let residual = doubling_residual(&root.value, c2s);
    if residual > 1e-9 * (1.0 + operator_norm(c2s)) {
        return Err(CoslawError::NoConvergence("halving doubling check"));
    }
    Ok(root.value)
}

/// `‖2·C(s)² − I − C(2s)‖`
pub fn doubling_residual(cs: &Matrix, c2s: &Matrix) -> f64 {
    let doubled = cs.matmul(cs).scale_real(2.0).sub_identity();
    operator_norm(&(&doubled - c2s))
}

/// A reconstruction that stopped early.
#[derive(Debug, Clone)]
pub struct PartialReconstruction {
    /// Stages computed before the failure, `C(1/2), C(1/4), ...`.
    pub stages: Vec<Matrix>,
    /// 1-based index `j` of the stage `C(2^{-j})` that failed.
    pub failed_stage: usize,
    pub error: CoslawError,
}

/// `[C(1/2), C(1/4), …, C(2^{−k})]` from `C(1)` by repeated halving.
pub fn dyadic_reconstruct(c1: &Matrix, k: usize) -> std::result::Result<Vec<Matrix>, PartialReconstruction> {
    dyadic_reconstruct_with_margin(c1, k, DEFAULT_MARGIN)
}

pub fn dyadic_reconstruct_with_margin(
    c1: &Matrix,
    k: usize,
    margin: f64,
) -> std::result::Result<Vec<Matrix>, PartialReconstruction> {
    let mut stages: Vec<Matrix> = Vec::with_capacity(k);
    for j in 1..=k {
        let previous = stages.last().unwrap_or(c1);
        match halve(previous, margin) {
            Ok(next) => stages.push(next),
            Err(error) => return Err(PartialReconstruction { stages, failed_stage: j, error }),
        }
    }
    Ok(stages)
}
