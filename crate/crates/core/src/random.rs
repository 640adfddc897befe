//! Seeded generators for the randomized suites.
//!
//! Every randomized check in the crate draws from a `ChaCha8Rng` built here so
//! runs are reproducible from a single integer seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{operator_norm, Matrix};

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_complex<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(dim, |_, _| complex_normal(rng))
}

/// `(G + G*)/2` for a complex Gaussian `G`; exactly Hermitian.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
    random_complex(dim, rng).hermitian_part()
}

/// Random Hermitian matrix rescaled to operator norm `norm`.
pub fn random_hermitian_with_norm<R: Rng + ?Sized>(dim: usize, norm: f64, rng: &mut R) -> Matrix {
    let h = random_hermitian(dim, rng);
    let current = operator_norm(&h);
    h.scale_real(norm / current).hermitian_part()
}

/// Random complex matrix rescaled to operator norm `norm`.
pub fn random_complex_with_norm<R: Rng + ?Sized>(dim: usize, norm: f64, rng: &mut R) -> Matrix {
    let g = random_complex(dim, rng);
    let current = operator_norm(&g);
    g.scale_real(norm / current)
}

/// Unitary matrix from modified Gram-Schmidt on Gaussian columns.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
    let g = random_complex(dim, rng);
    let mut cols: Vec<Vec<Complex64>> = (0..dim).map(|j| (0..dim).map(|i| g.get(i, j)).collect()).collect();
    for j in 0..dim {
        for k in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let proj: Complex64 = done[k].iter().zip(&rest[0]).map(|(q, v)| q.conj() * v).sum();
            for (v, q) in rest[0].iter_mut().zip(&done[k]) {
                *v -= proj * q;
            }
        }
        let len = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|z| *z /= len);
    }
    Matrix::from_fn(dim, |i, j| cols[j][i])
}

/// `U·diag(values)·U*` with a random unitary `U`.
pub fn random_normal_with_spectrum<R: Rng + ?Sized>(values: &[Complex64], rng: &mut R) -> Matrix {
    let u = random_unitary(values.len(), rng);
    u.matmul(&Matrix::from_diag(values)).matmul(&u.adjoint())
}
