//! Discrete cosine sequences `C(n) = Tₙ(X)` via the Chebyshev recurrence.

use std::sync::RwLock;

use serde::Serialize;

use crate::error::{CoslawError, Result};
use crate::laws::{LawVerdict, TailEstimate, DEFAULT_TAIL_WINDOWS};
use crate::linalg::{operator_norm, Matrix};

pub const MAX_INDEX: u64 = 1_000_000;
/// Cached entries per sequence; later indices are recomputed from the last cached pair.
pub const CACHE_CAPACITY: usize = 1 << 14;

/// `C(0) = I`, `C(1) = X`, `C(n+1) = 2X·C(n) − C(n−1)`, `C(−n) = C(n)`.
#[derive(Debug)]
pub struct DiscreteCosineSequence {
    x: Matrix,
    cache: RwLock<Vec<Matrix>>,
}

impl Clone for DiscreteCosineSequence {
    fn clone(&self) -> Self {
        Self::new(self.x.clone()).expect("validated on construction")
    }
}

fn step(two_x: &Matrix, current: &Matrix, previous: &Matrix) -> Result<Matrix> {
    let next = &two_x.matmul(current) - previous;
    next.ensure_bounded()?;
    Ok(next)
}

impl DiscreteCosineSequence {
    pub fn new(x: Matrix) -> Result<Self> {
        x.ensure_finite()?;
        let cache = vec![Matrix::identity(x.dim()), x.clone()];
        Ok(Self { x, cache: RwLock::new(cache) })
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    /// `C(n)`; errors with `Overflowed` once an entry exceeds `1e300`.
    pub fn eval(&self, n: i64) -> Result<Matrix> {
        let n = n.unsigned_abs();
        if n > MAX_INDEX {
            return Err(CoslawError::DomainError(format!("|n| = {n} exceeds {MAX_INDEX}")));
        }
        let n = n as usize;
        {
            let cache = self.cache.read().expect("cache lock");
            if n < cache.len() {
                return Ok(cache[n].clone());
            }
        }
        let two_x = self.x.scale_real(2.0);
        let mut cache = self.cache.write().expect("cache lock");
        while cache.len() <= n.min(CACHE_CAPACITY - 1) {
            let len = cache.len();
            let next = step(&two_x, &cache[len - 1], &cache[len - 2])?;
            cache.push(next);
        }
        if n < cache.len() {
            return Ok(cache[n].clone());
        }
        let len = cache.len();
        let (mut previous, mut current) = (cache[len - 2].clone(), cache[len - 1].clone());
        drop(cache);
        for _ in len..=n {
            let next = step(&two_x, &current, &previous)?;
            previous = std::mem::replace(&mut current, next);
        }
        Ok(current)
    }

    /// `(n, ‖C(n) − I‖)` for `n = 0..=n_max`, streamed without touching the cache.
    ///
    /// Stops at the first overflowing index and reports it.
    pub fn norm_trace(&self, n_max: u64) -> Result<NormTrace> {
        if n_max > MAX_INDEX {
            return Err(CoslawError::DomainError(format!("N = {n_max} exceeds {MAX_INDEX}")));
        }
        let dim = self.dim();
        let two_x = self.x.scale_real(2.0);
        let mut samples = Vec::with_capacity(n_max as usize + 1);
        let mut previous = Matrix::identity(dim);
        let mut current = self.x.clone();
        samples.push((0, 0.0));
        if n_max >= 1 {
            samples.push((1, operator_norm(&current.sub_identity())));
        }
        for n in 2..=n_max {
            match step(&two_x, &current, &previous) {
                Ok(next) => {
                    samples.push((n, operator_norm(&next.sub_identity())));
                    previous = std::mem::replace(&mut current, next);
                }
                Err(CoslawError::Overflowed { .. }) => return Ok(NormTrace { n_max, samples, overflowed_at: Some(n) }),
                Err(e) => return Err(e),
            }
        }
        Ok(NormTrace { n_max, samples, overflowed_at: None })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormTrace {
    pub n_max: u64,
    pub samples: Vec<(u64, f64)>,
    pub overflowed_at: Option<u64>,
}

impl NormTrace {
    pub fn tail_estimate(&self) -> TailEstimate {
        TailEstimate::from_integer_samples(&self.samples, DEFAULT_TAIL_WINDOWS, self.overflowed_at)
    }
}

pub fn discrete_eval(seq: &DiscreteCosineSequence, n: i64) -> Result<Matrix> {
    seq.eval(n)
}

/// `limsup_{n→∞} ‖C(n) − I‖ < r ⟹ C ≡ I`, estimated over the tail `[N/2, N]`.
pub fn discrete_law_check(seq: &DiscreteCosineSequence, r: f64, n_max: u64, tol_zero: f64) -> Result<LawVerdict> {
    check_law_inputs(r, n_max)?;
    discrete_verdict(seq, r, &seq.norm_trace(n_max)?, tol_zero)
}

/// [`discrete_law_check`] on a trace that is already computed.
pub fn discrete_verdict(seq: &DiscreteCosineSequence, r: f64, trace: &NormTrace, tol_zero: f64) -> Result<LawVerdict> {
    check_law_inputs(r, trace.n_max)?;
    let generator_trivial = operator_norm(&seq.x().sub_identity()) <= tol_zero;
    Ok(LawVerdict::new(r, trace.tail_estimate(), generator_trivial, tol_zero))
}

fn check_law_inputs(r: f64, n_max: u64) -> Result<()> {
    if !(r > 0.0 && r <= 1.5) {
        return Err(CoslawError::ConfigError(format!("threshold r must lie in (0, 3/2], got {r}")));
    }
    if n_max < 100 {
        return Err(CoslawError::ConfigError(format!("N must be at least 100, got {n_max}")));
    }
    Ok(())
}

/// Discrete d'Alembert residual `‖C(m+n) + C(m−n) − 2C(m)C(n)‖` and its scale `1 + ‖C(m)‖‖C(n)‖`.
pub fn discrete_dalembert_residual(seq: &DiscreteCosineSequence, m: i64, n: i64) -> Result<(f64, f64)> {
    let cm = seq.eval(m)?;
    let cn = seq.eval(n)?;
    let lhs = &seq.eval(m + n)? + &seq.eval(m - n)?;
    let rhs = cm.matmul(&cn).scale_real(2.0);
    let scale = 1.0 + operator_norm(&cm) * operator_norm(&cn);
    Ok((operator_norm(&(&lhs - &rhs)), scale))
}
