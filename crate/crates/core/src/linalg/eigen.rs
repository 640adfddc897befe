use num_complex::Complex64;

use super::{operator_norm, Matrix};
use crate::error::{CoslawError, Result};

const MAX_SWEEPS: usize = 80;

/// Unitary diagonalization `M = V·diag(values)·V*` of a normal matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    /// Columns are the eigenvectors.
    pub vectors: Matrix,
}

impl EigenDecomposition {
    /// `V·diag(f(λ))·V*`
    pub fn apply(&self, f: impl Fn(Complex64) -> Complex64) -> Matrix {
        let fv: Vec<Complex64> = self.values.iter().map(|&l| f(l)).collect();
        self.with_values(&fv)
    }

    /// `V·diag(fv)·V*` for values listed in eigenvalue order.
    pub fn with_values(&self, fv: &[Complex64]) -> Matrix {
        let n = self.vectors.dim();
        assert_eq!(fv.len(), n);
        let v = &self.vectors;
        Matrix::from_fn(n, |i, j| {
            (0..n).fold(Complex64::new(0.0, 0.0), |acc, k| acc + v.get(i, k) * fv[k] * v.get(j, k).conj())
        })
    }

    pub fn reconstruct(&self) -> Matrix {
        self.apply(|l| l)
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, l| acc.max(l.norm()))
    }

    /// Whether every eigenvalue is real up to `tol·max|λ|`.
    pub fn has_real_spectrum(&self, tol: f64) -> bool {
        let scale = self.max_modulus().max(f64::MIN_POSITIVE);
        self.values.iter().all(|l| l.im.abs() <= tol * scale)
    }
}

/// Cyclic complex Jacobi rotations on a Hermitian matrix.
///
/// Only the Hermitian part of `m` is used; callers pass Hermitian input.
pub fn eig_hermitian(m: &Matrix) -> Result<EigenDecomposition> {
    m.ensure_finite()?;
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = Matrix::identity(n);
    let frob = a.frobenius_norm();
    if n == 1 || frob == 0.0 {
        return Ok(EigenDecomposition { values: a.diag(), vectors: v });
    }

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= f64::EPSILON * 1e-2 * frob {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > 1e-14 * frob {
        return Err(CoslawError::NoConvergence("Jacobi eigenvalue sweeps"));
    }
    let values = (0..n).map(|i| Complex64::new(a.get(i, i).re, 0.0)).collect();
    Ok(EigenDecomposition { values, vectors: v })
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a.get(i, j).norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Annihilates `a[p][q]` with the unitary `U = diag(1, e^{-iφ})·R(θ)` on the (p, q) plane.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let phase = apq / g; // e^{iφ}
    let theta = 0.5 * (2.0 * g).atan2(aqq - app);
    let (s, c) = theta.sin_cos();
    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;

    let n = a.dim();
    // A <- A U, V <- V U
    for k in 0..n {
        let (akp, akq) = (a.get(k, p), a.get(k, q));
        a.set(k, p, akp * u_pp + akq * u_qp);
        a.set(k, q, akp * u_pq + akq * u_qq);
        let (vkp, vkq) = (v.get(k, p), v.get(k, q));
        v.set(k, p, vkp * u_pp + vkq * u_qp);
        v.set(k, q, vkp * u_pq + vkq * u_qq);
    }
    // A <- U* A
    for k in 0..n {
        let (apk, aqk) = (a.get(p, k), a.get(q, k));
        a.set(p, k, u_pp.conj() * apk + u_qp.conj() * aqk);
        a.set(q, k, u_pq.conj() * apk + u_qq.conj() * aqk);
    }
    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));
    let (dp, dq) = (a.get(p, p).re, a.get(q, q).re);
    a.set(p, p, Complex64::new(dp, 0.0));
    a.set(q, q, Complex64::new(dq, 0.0));
}

/// Unitary diagonalization of a normal matrix.
///
/// Hermitian input goes straight to Jacobi. Otherwise the commuting Hermitian
/// pair `H = (M+M*)/2`, `K = (M−M*)/2i` is diagonalized jointly: Jacobi on
/// `H + γK`, then `K` is diagonalized inside every eigenvalue cluster of that
/// combination so coincidences of `h + γk` cannot mix distinct eigenvalues.
pub fn eig_normal(m: &Matrix) -> Result<EigenDecomposition> {
    m.ensure_finite()?;
    let norm = operator_norm(m);
    if norm == 0.0 {
        return Ok(EigenDecomposition {
            values: vec![Complex64::new(0.0, 0.0); m.dim()],
            vectors: Matrix::identity(m.dim()),
        });
    }
    let defect = m.normality_defect();
    if defect > 1e-10 * norm * norm {
        return Err(CoslawError::NotNormal { commutator: defect });
    }
    if m.is_hermitian(1e-15) {
        return eig_hermitian(m);
    }

    let n = m.dim();
    let h = m.hermitian_part();
    let k = m.skew_part_over_i();
    // irrational mixing weight, balanced against the two parts' sizes
    let gamma = 0.754_877_666_246_692_7 * (h.frobenius_norm() + norm) / (k.frobenius_norm() + norm);
    let combined = &h + &k.scale_real(gamma);
    let mut dec = eig_hermitian(&combined)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| dec.values[i].re.total_cmp(&dec.values[j].re));
    let cluster_tol = 1e-9 * combined.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && dec.values[order[end]].re - dec.values[order[end - 1]].re <= cluster_tol {
            end += 1;
        }
        if end - start > 1 {
            split_cluster(&mut dec.vectors, &order[start..end], &k)?;
        }
        start = end;
    }

    let v = &dec.vectors;
    let mv = m.matmul(v);
    dec.values = (0..n)
        .map(|col| (0..n).fold(Complex64::new(0.0, 0.0), |acc, row| acc + v.get(row, col).conj() * mv.get(row, col)))
        .collect();

    let residual = (&dec.reconstruct() - m).frobenius_norm();
    if residual > 1e-10 * norm.max(1.0) {
        return Err(CoslawError::NoConvergence("normal eigendecomposition"));
    }
    Ok(dec)
}

/// Rotates the columns `cols` of `v` so that `K` is diagonal on their span.
fn split_cluster(v: &mut Matrix, cols: &[usize], k: &Matrix) -> Result<()> {
    let n = v.dim();
    let size = cols.len();
    let kv: Vec<Vec<Complex64>> = cols
        .iter()
        .map(|&c| k.matvec(&(0..n).map(|r| v.get(r, c)).collect::<Vec<_>>()))
        .collect();
    let restricted = Matrix::from_fn(size, |i, j| {
        (0..n).fold(Complex64::new(0.0, 0.0), |acc, r| acc + v.get(r, cols[i]).conj() * kv[j][r])
    });
    let inner = eig_hermitian(&restricted)?;
    let old: Vec<Vec<Complex64>> = cols.iter().map(|&c| (0..n).map(|r| v.get(r, c)).collect()).collect();
    for (j, &c) in cols.iter().enumerate() {
        for r in 0..n {
            let value = (0..size).fold(Complex64::new(0.0, 0.0), |acc, i| acc + old[i][r] * inner.vectors.get(i, j));
            v.set(r, c, value);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, random_unitary, seeded_rng};

    fn unitarity_defect(v: &Matrix) -> f64 {
        let n = v.dim();
        (&v.adjoint().matmul(v) - &Matrix::identity(n)).max_abs()
    }

    #[test]
    fn diagonal_input_is_untouched() {
        let d = Matrix::from_real_diag(&[3.0, -1.0, 0.5]);
        let dec = eig_normal(&d).unwrap();
        assert_eq!(dec.vectors, Matrix::identity(3));
        let vals: Vec<f64> = dec.values.iter().map(|z| z.re).collect();
        assert_eq!(vals, vec![3.0, -1.0, 0.5]);
    }

    #[test]
    fn two_by_two_hermitian() {
        let m = Matrix::from_fn(2, |i, j| Complex64::new(if i == j { 2.0 } else { 1.0 }, 0.0));
        let dec = eig_normal(&m).unwrap();
        let mut vals: Vec<f64> = dec.values.iter().map(|z| z.re).collect();
        vals.sort_by(f64::total_cmp);
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        let mut rng = seeded_rng(11);
        for dim in [2, 5, 8, 16] {
            let h = random_hermitian(dim, &mut rng);
            let dec = eig_normal(&h).unwrap();
            let scale = operator_norm(&h).max(1.0);
            assert!((&dec.reconstruct() - &h).frobenius_norm() <= 1e-10 * scale);
            assert!(unitarity_defect(&dec.vectors) <= 1e-10);
            assert!(dec.has_real_spectrum(0.0));
        }
    }

    #[test]
    fn normal_non_hermitian_with_degenerate_real_parts() {
        // eigenvalues share real parts so H alone cannot separate them
        let mut rng = seeded_rng(5);
        let u = random_unitary(4, &mut rng);
        let lambdas = [
            Complex64::new(1.0, 2.0),
            Complex64::new(1.0, -2.0),
            Complex64::new(-0.5, 0.0),
            Complex64::new(1.0, 0.5),
        ];
        let m = u.matmul(&Matrix::from_diag(&lambdas)).matmul(&u.adjoint());
        let dec = eig_normal(&m).unwrap();
        assert!((&dec.reconstruct() - &m).frobenius_norm() <= 1e-10 * 3.0);
        assert!(unitarity_defect(&dec.vectors) <= 1e-10);
        for want in lambdas {
            let nearest = dec.values.iter().map(|g| (g - want).norm()).fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-10, "{want} missing from {:?}", dec.values);
        }
    }

    #[test]
    fn rejects_non_normal() {
        let nil = Matrix::from_fn(2, |i, j| Complex64::new(if i == 0 && j == 1 { 1.0 } else { 0.0 }, 0.0));
        assert!(matches!(eig_normal(&nil), Err(CoslawError::NotNormal { .. })));
    }
}
