use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{eig_hermitian, Matrix};
use crate::error::Result;
use crate::random::seeded_rng;

pub const DEFAULT_SEED: u64 = 0x5eed_c051;

const RESTARTS: u64 = 2;
const MAX_POWER_ITERATIONS: usize = 400;
/// Residual target `‖Gv − μv‖ ≤ tol·μ` on the Gram matrix `G = M*M`.
const RESIDUAL_TOL: f64 = 1e-13;

/// Induced 2-norm (largest singular value).
pub fn operator_norm(m: &Matrix) -> f64 {
    operator_norm_seeded(m, DEFAULT_SEED)
}

/// Induced 2-norm with power-iteration restarts drawn from `seed`.
///
/// Power iteration runs on `M*M` and stops once the Rayleigh quotient is
/// certified by its residual. Dimensions 1 and 2 use closed forms. If the
/// iteration budget runs out (tightly clustered top singular values) the Gram
/// matrix is diagonalized by Jacobi instead. Non-finite input yields NaN.
pub fn operator_norm_seeded(m: &Matrix, seed: u64) -> f64 {
    if !m.is_finite() {
        return f64::NAN;
    }
    let scale = m.max_abs();
    if scale == 0.0 {
        return 0.0;
    }
    let n = m.dim();
    if n == 1 {
        return m.get(0, 0).norm();
    }
    let a = m.scale_real(1.0 / scale);
    let sigma = if n == 2 { norm_2x2(&a) } else { power_norm(&a, seed) };
    sigma * scale
}

/// [`operator_norm`] that rejects non-finite input instead of returning NaN.
pub fn try_operator_norm(m: &Matrix) -> Result<f64> {
    m.ensure_finite()?;
    Ok(operator_norm(m))
}

fn norm_2x2(a: &Matrix) -> f64 {
    let (p, q, r, s) = (a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1));
    let fro2 = p.norm_sqr() + q.norm_sqr() + r.norm_sqr() + s.norm_sqr();
    let det = (p * s - q * r).norm();
    let disc = ((fro2 - 2.0 * det) * (fro2 + 2.0 * det)).max(0.0);
    (0.5 * (fro2 + disc.sqrt())).sqrt()
}

fn power_norm(a: &Matrix, seed: u64) -> f64 {
    let n = a.dim();
    let mut rng = seeded_rng(seed);
    let mut best: f64 = 0.0;
    let mut certified = true;
    for _ in 0..RESTARTS {
        let mut v: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        normalize(&mut v);
        let mut done = false;
        let mut mu = 0.0;
        for _ in 0..MAX_POWER_ITERATIONS {
            let w = a.adjoint_matvec(&a.matvec(&v));
            mu = v.iter().zip(&w).map(|(x, y)| (x.conj() * y).re).sum::<f64>();
            if mu <= 0.0 {
                // start vector in the kernel; the next restart takes over
                break;
            }
            let residual = w.iter().zip(&v).map(|(y, x)| (y - x * mu).norm_sqr()).sum::<f64>().sqrt();
            if residual <= RESIDUAL_TOL * mu {
                done = true;
                break;
            }
            v = w;
            normalize(&mut v);
        }
        certified &= done;
        best = best.max(mu);
    }
    if !certified {
        let gram = a.adjoint().matmul(a);
        if let Ok(dec) = eig_hermitian(&gram) {
            best = dec.values.iter().fold(0.0, |acc, l| acc.max(l.re));
        }
    }
    best.max(0.0).sqrt()
}

fn normalize(v: &mut [Complex64]) {
    let len = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if len > 0.0 {
        v.iter_mut().for_each(|z| *z /= len);
    }
}
