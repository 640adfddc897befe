use serde::Serialize;

use super::{eig_normal, operator_norm, Matrix};

/// Power-of-two exponent cap `k = 2^16` for the Gelfand iteration.
const MAX_DOUBLINGS: u32 = 16;
const AGREEMENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusEstimate {
    pub value: f64,
    /// Two successive estimates agreed within `1e-8` (always true on the normal path).
    pub converged: bool,
    /// The input could not be squared without leaving the finite range.
    pub overflowed: bool,
}

impl RadiusEstimate {
    fn exact(value: f64) -> Self {
        Self { value, converged: true, overflowed: false }
    }
}

/// Spectral radius `max |λ|`.
///
/// Normal matrices are diagonalized. Anything else goes through the Gelfand
/// formula on `M^k`, `k = 2^j`, built by repeated squaring with the scale kept
/// in log form. The ratio `(‖M^{2k}‖/‖M^k‖)^{1/k}` is used as the estimate; it
/// has the same limit as `‖M^k‖^{1/k}` but converges geometrically when the
/// dominant eigenvalue is unique in modulus.
pub fn spectral_radius(m: &Matrix) -> RadiusEstimate {
    if !m.is_finite() {
        return RadiusEstimate { value: f64::INFINITY, converged: false, overflowed: true };
    }
    let norm = operator_norm(m);
    if norm == 0.0 {
        return RadiusEstimate::exact(0.0);
    }
    if m.dim() == 1 {
        return RadiusEstimate::exact(m.get(0, 0).norm());
    }
    if m.normality_defect() <= 1e-10 * norm * norm {
        if let Ok(dec) = eig_normal(m) {
            return RadiusEstimate::exact(dec.max_modulus());
        }
    }
    gelfand(m, norm)
}

fn gelfand(m: &Matrix, norm: f64) -> RadiusEstimate {
    let mut power = m.scale_real(1.0 / norm);
    let mut log_norm = norm.ln();
    let mut previous: Option<f64> = None;
    let mut estimate = norm;
    for j in 0..MAX_DOUBLINGS {
        let k = f64::from(1u32 << j);
        let squared = power.matmul(&power);
        let q = operator_norm(&squared);
        if q == 0.0 {
            return RadiusEstimate::exact(0.0);
        }
        if !q.is_finite() {
            return RadiusEstimate { value: estimate, converged: false, overflowed: true };
        }
        let next_log_norm = q.ln() + 2.0 * log_norm;
        estimate = ((next_log_norm - log_norm) / k).exp().min(norm);
        if let Some(prev) = previous {
            if (estimate - prev).abs() <= AGREEMENT_TOL * estimate {
                return RadiusEstimate { value: estimate, converged: true, overflowed: false };
            }
        }
        previous = Some(estimate);
        power = squared.scale_real(1.0 / q);
        log_norm = next_log_norm;
    }
    RadiusEstimate { value: estimate, converged: false, overflowed: false }
}
