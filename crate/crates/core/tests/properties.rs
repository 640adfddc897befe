use std::f64::consts::PI;

use coslaw_core::cosine::{dalembert_residual, CosineFamily, EvalStrategy, MatrixCosineFamily};
use coslaw_core::discrete::{discrete_dalembert_residual, DiscreteCosineSequence};
use coslaw_core::laws::{
    classify_scalar_dichotomy, contraction_s_iteration, gelfand_check, law_check_limsup_infinity, windowed_sup_scan,
    Dichotomy, LimitPoint, ScanConfig,
};
use coslaw_core::linalg::{eig_normal, operator_norm, spectral_radius, Matrix};
use coslaw_core::random::{
    random_complex, random_complex_with_norm, random_hermitian, random_hermitian_with_norm, seeded_rng,
};
use coslaw_core::semigroup::{cesaro_wallen, PowerSemigroup};
use coslaw_core::sqrt_halving::{halve, sqrt_one_minus, verify_sqrt_bound, DEFAULT_MARGIN};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

/// Characteristic polynomial coefficients `c₀..c_n` (monic, `c_n = 1`) by Faddeev–LeVerrier.
fn char_poly(m: &Matrix) -> Vec<Complex64> {
    let n = m.dim();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut mk = Matrix::zeros(n);
    for k in 1..=n {
        let prev = coeffs[n - k + 1];
        mk = m.matmul(&(&mk + &Matrix::scalar(n, prev)));
        let trace: Complex64 = mk.diag().iter().sum();
        coeffs[n - k] = -trace / k as f64;
    }
    coeffs
}

/// All roots of a monic polynomial by Durand–Kerner iteration.
fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let eval = |z: Complex64| coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
    let bound = 1.0 + coeffs[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * bound).collect();
    for _ in 0..5000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let denom = (0..n).filter(|&j| j != i).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (roots[i] - roots[j]));
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * bound {
            break;
        }
    }
    roots
}

#[test]
fn char_poly_oracle_self_check() {
    // (z − 1)(z − 2)(z + 3)
    let roots = poly_roots(&char_poly(&Matrix::from_real_diag(&[1.0, 2.0, -3.0])));
    let mut moduli: Vec<f64> = roots.iter().map(|r| r.norm()).collect();
    moduli.sort_by(f64::total_cmp);
    assert!((moduli[0] - 1.0).abs() < 1e-10 && (moduli[2] - 3.0).abs() < 1e-10);
}

#[test]
fn spectral_radius_matches_characteristic_roots() {
    let mut rng = seeded_rng(404);
    for _ in 0..30 {
        let m = random_complex(4, &mut rng);
        let oracle = poly_roots(&char_poly(&m)).iter().map(|r| r.norm()).fold(0.0, f64::max);
        let got = spectral_radius(&m);
        assert!(got.converged);
        assert!((got.value - oracle).abs() <= 1e-6 * oracle, "{} vs {oracle}", got.value);
    }
}

#[test]
fn spectral_radius_of_normal_matches_eig() {
    let mut rng = seeded_rng(405);
    for dim in 1..=6 {
        let h = random_hermitian(dim, &mut rng);
        let psd = h.matmul(&h);
        assert!((spectral_radius(&psd).value - operator_norm(&psd)).abs() <= 1e-8 * operator_norm(&psd));
        let oracle = eig_normal(&h).unwrap().max_modulus();
        assert!((spectral_radius(&h).value - oracle).abs() <= 1e-8 * oracle.max(1.0));
    }
}

#[test]
fn norm_submultiplicative_on_seeded_pairs() {
    let mut rng = seeded_rng(500);
    for _ in 0..500 {
        let dim = rng.random_range(1..=6);
        let a = random_complex(dim, &mut rng);
        let b = random_complex(dim, &mut rng);
        assert!(operator_norm(&a.matmul(&b)) <= operator_norm(&a) * operator_norm(&b) * (1.0 + 1e-9));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn radius_bounded_by_norm(seed in any::<u64>(), dim in 1usize..=6) {
        let m = random_complex(dim, &mut seeded_rng(seed));
        prop_assert!(spectral_radius(&m).value <= operator_norm(&m) * (1.0 + 1e-9));
    }

    #[test]
    fn cosine_is_even(seed in any::<u64>(), dim in 1usize..=5, t in -8.0f64..8.0) {
        let b = random_hermitian_with_norm(dim, 1.0, &mut seeded_rng(seed));
        for strategy in [EvalStrategy::Spectral, EvalStrategy::Series] {
            let f = MatrixCosineFamily::new(b.clone(), strategy).unwrap();
            let (plus, minus) = (f.eval(t).unwrap(), f.eval(-t).unwrap());
            prop_assert!((&plus - &minus).frobenius_norm() <= 1e-12 * (1.0 + operator_norm(&plus)));
            prop_assert!((&f.eval(0.0).unwrap() - &Matrix::identity(dim)).max_abs() <= 1e-14);
        }
    }

    #[test]
    fn two_paths_agree(seed in any::<u64>(), dim in 1usize..=6, scaled in -20.0f64..20.0) {
        let mut rng = seeded_rng(seed);
        let b = random_hermitian_with_norm(dim, rng.random_range(0.1..5.0), &mut rng);
        let t = scaled / operator_norm(&b);
        let spectral = MatrixCosineFamily::new(b.clone(), EvalStrategy::Spectral).unwrap().eval(t).unwrap();
        let series = MatrixCosineFamily::new(b, EvalStrategy::Series).unwrap().eval(t).unwrap();
        prop_assert!((&spectral - &series).frobenius_norm() <= 1e-8 * (1.0 + spectral.frobenius_norm()));
    }

    #[test]
    fn dalembert_matrix(seed in any::<u64>(), dim in 1usize..=5, t in -4.0f64..4.0, s in -4.0f64..4.0) {
        let b = random_hermitian_with_norm(dim, 2.0, &mut seeded_rng(seed));
        let f = CosineFamily::matrix(b, EvalStrategy::Series).unwrap();
        let r = dalembert_residual(&f, t, s).unwrap();
        prop_assert!(r.residual <= 1e-10 * r.scale);
    }

    #[test]
    fn sqrt_squares_back_and_obeys_bound(seed in any::<u64>(), dim in 1usize..=5, radius in 0.0f64..0.95) {
        let x = random_complex_with_norm(dim, radius, &mut seeded_rng(seed));
        let root = sqrt_one_minus(&x, DEFAULT_MARGIN).unwrap().value;
        let target = &Matrix::identity(dim) - &x;
        prop_assert!((&root.matmul(&root) - &target).frobenius_norm() <= 1e-10);
        let (lhs, rhs) = verify_sqrt_bound(&x).unwrap();
        prop_assert!(lhs <= rhs + 1e-10);
    }

    #[test]
    fn halve_inverts_doubling(seed in any::<u64>(), dim in 1usize..=5, s in 0.01f64..0.7) {
        let b = random_hermitian_with_norm(dim, 1.0, &mut seeded_rng(seed));
        let f = MatrixCosineFamily::new(b, EvalStrategy::Spectral).unwrap();
        let cs = f.eval(s).unwrap();
        prop_assume!(operator_norm(&cs.sub_identity()) < 1.0);
        let doubled = &cs.matmul(&cs).scale_real(2.0) - &Matrix::identity(dim);
        let back = halve(&doubled, DEFAULT_MARGIN).unwrap();
        prop_assert!((&back - &cs).frobenius_norm() <= 1e-9);
    }

    #[test]
    fn binary_power_matches_sequential(seed in any::<u64>(), dim in 1usize..=4, n in 1u64..=200) {
        let t = random_complex_with_norm(dim, 1.0, &mut seeded_rng(seed));
        let mut sequential = Matrix::identity(dim);
        for _ in 0..n {
            sequential = sequential.matmul(&t);
        }
        let fast = PowerSemigroup::new(t).unwrap().eval(n).unwrap();
        prop_assert!((&fast - &sequential).frobenius_norm() <= 1e-10 * sequential.frobenius_norm().max(1e-300) + 1e-300);
    }

    #[test]
    fn scan_monotone_in_horizon(a in 0.2f64..5.0, horizon in 20.0f64..60.0) {
        let f = CosineFamily::scalar(Complex64::new(a, 0.0));
        let period = 2.0 * PI / a;
        let short = ScanConfig::new(0.0, horizon * period, period / 64.0, 2.0 * period);
        let long = ScanConfig { t_end: 2.0 * short.t_end, ..short };
        let (ls, ll) = (windowed_sup_scan(&f, &short).unwrap(), windowed_sup_scan(&f, &long).unwrap());
        let bound = ls.grid_error_bound.unwrap();
        prop_assert!(ll.limsup_estimate.finite().unwrap() >= ls.limsup_estimate.finite().unwrap() - bound);
    }
}

#[test]
fn law_soundness_on_generated_families() {
    let mut rng = seeded_rng(195);
    for _ in 0..40 {
        let dim = rng.random_range(1..=4);
        let b = random_hermitian_with_norm(dim, rng.random_range(0.05..3.0), &mut rng);
        let cfg = ScanConfig::periodic_default(operator_norm(&b));
        let f = CosineFamily::matrix(b, EvalStrategy::Spectral).unwrap();
        let verdict = law_check_limsup_infinity(&f, 1.95, &cfg).unwrap();
        assert!(!verdict.premise_holds, "premise held for a nonzero generator: {:?}", verdict.evidence.limsup_estimate);
    }
}

#[test]
fn dichotomy_exhaustive_away_from_borderline() {
    let mut rng = seeded_rng(1000);
    for i in 0..1000 {
        let re = rng.random_range(-10.0..10.0);
        let im = match i % 3 {
            0 => 0.0,
            _ => rng.random_range(0.01..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 },
        };
        let a = Complex64::new(re, im);
        let class = classify_scalar_dichotomy(a, LimitPoint::Infinity, &ScanConfig::scalar_infinity_default(a))
            .unwrap()
            .class;
        let want = if im != 0.0 {
            Dichotomy::Infinite
        } else if re == 0.0 {
            Dichotomy::Zero
        } else {
            Dichotomy::Two
        };
        assert_eq!(class, want, "a = {a}");
    }
}

#[test]
fn gelfand_equality_on_diagonal_suite() {
    let mut rng = seeded_rng(11);
    for _ in 0..200 {
        let dim = rng.random_range(1..=8);
        let b: Vec<Complex64> = (0..dim).map(|_| Complex64::new(rng.random_range(-5.0..5.0), 0.0)).collect();
        let t = rng.random_range(-10.0..10.0);
        let (lhs, rhs) = gelfand_check(&b, t).unwrap();
        assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs));
    }
}

#[test]
fn contraction_reaches_zero_from_grid() {
    for k in 0..=100 {
        let (s, _) = contraction_s_iteration(k as f64 / 100.0).unwrap();
        assert!(s.abs() <= 1e-12);
    }
}

#[test]
fn discrete_dalembert_on_seeded_generators() {
    let mut rng = seeded_rng(20);
    for _ in 0..20 {
        let dim = rng.random_range(1..=4);
        let x = random_hermitian_with_norm(dim, rng.random_range(0.1..1.0), &mut rng);
        let seq = DiscreteCosineSequence::new(x).unwrap();
        for _ in 0..200 {
            let m: i64 = rng.random_range(0..400);
            let n: i64 = rng.random_range(0..=m);
            let (res, scale) = discrete_dalembert_residual(&seq, m, n).unwrap();
            assert!(res <= 1e-9 * scale, "m = {m}, n = {n}: {res}");
        }
    }
}

#[test]
fn chebyshev_closed_form_on_theta_grid() {
    for k in 0..50 {
        let theta = PI * k as f64 / 49.0;
        let seq = DiscreteCosineSequence::new(Matrix::scalar(2, Complex64::new(theta.cos(), 0.0))).unwrap();
        let trace = seq.norm_trace(10_000).unwrap();
        for &(n, norm) in trace.samples.iter().step_by(97) {
            assert!((norm - ((n as f64 * theta).cos() - 1.0).abs()).abs() <= 1e-9, "θ = {theta}, n = {n}");
        }
        let c = seq.eval(10_000).unwrap();
        assert!((c.get(0, 0).re - (1e4 * theta).cos()).abs() <= 1e-9);
    }
}

#[test]
fn three_halves_witness_takes_two_values() {
    let seq = DiscreteCosineSequence::new(Matrix::from_real_diag(&[-0.5])).unwrap();
    let trace = seq.norm_trace(10_000).unwrap();
    let mut values: Vec<f64> = trace.samples.iter().map(|s| s.1).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    assert_eq!(values, vec![0.0, 1.5]);
}

/// Perturbations `T = I + E`, `‖E‖` log-uniform in `[1e-2, 1]`, keep the
/// Cesàro tail above 0.95 by `N = 10⁴`.
#[test]
fn wallen_soundness() {
    let mut rng = seeded_rng(310);
    for _ in 0..40 {
        let dim = rng.random_range(1..=4);
        let norm = 10f64.powf(rng.random_range(-2.0..=0.0));
        let t = &Matrix::identity(dim) + &random_complex_with_norm(dim, norm, &mut rng);
        let c = cesaro_wallen(&PowerSemigroup::new(t).unwrap(), 10_000).unwrap();
        if let Some(l) = c.liminf_estimate.finite() {
            assert!(l >= 0.95, "‖E‖ = {norm}: {l}");
        }
    }
}

/// A slow contraction `T = 1 − δ` sits below 0.95 at `N = 10⁴` when `Nδ ≲ 20`,
/// and only clears it once `N` grows past `20/δ`.
#[test]
fn wallen_tail_needs_horizon_beyond_inverse_gap() {
    let delta = 2e-3;
    let sg = PowerSemigroup::new(Matrix::from_real_diag(&[1.0 - delta])).unwrap();
    let oracle = |n: f64| 1.0 - (1.0 - (1.0 - delta).powf(n)) * (1.0 - delta) / (n * delta);
    let short = cesaro_wallen(&sg, 10_000).unwrap().liminf_estimate.finite().unwrap();
    assert!((short - oracle(5_000.0)).abs() < 1e-9);
    assert!(short < 0.95);
    let long = cesaro_wallen(&sg, 100_000).unwrap().liminf_estimate.finite().unwrap();
    assert!(long > 0.99);
}
