//! Power semigroups `Tⁿ`, Cesàro averages, and `exp(tG)` semigroups.

use serde::Serialize;

use crate::error::{CoslawError, Result};
use crate::laws::{
    scan_with_samples, windowed_sup_scan, LawVerdict, Limsup, ScanConfig, ScanTrace, TailEstimate, Trajectory,
    DEFAULT_TAIL_WINDOWS,
};
use crate::linalg::{eig_normal, operator_norm, Matrix};

/// `‖G‖·t` beyond which [`matrix_exp`] refuses to evaluate.
pub const EXP_DOMAIN: f64 = 100.0;
const EXP_SCALED_TARGET: f64 = 0.5;
const EXP_TERM_TOL: f64 = 1e-18;

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSemigroup {
    t: Matrix,
}

impl PowerSemigroup {
    pub fn new(t: Matrix) -> Result<Self> {
        t.ensure_finite()?;
        Ok(Self { t })
    }

    pub fn generator(&self) -> &Matrix {
        &self.t
    }

    /// `Tⁿ` by binary exponentiation.
    pub fn eval(&self, n: u64) -> Result<Matrix> {
        let mut result = Matrix::identity(self.t.dim());
        let mut base = self.t.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.matmul(&base);
                result.ensure_bounded()?;
            }
            e >>= 1;
            if e > 0 {
                base = base.matmul(&base);
                base.ensure_bounded()?;
            }
        }
        Ok(result)
    }

    /// `(n, ‖Tⁿ − I‖)` for `n = 1..=n_max` by successive multiplication.
    pub fn norm_trace(&self, n_max: u64) -> Result<PowerTrace> {
        let mut samples = Vec::with_capacity(n_max as usize);
        let mut power = Matrix::identity(self.t.dim());
        for n in 1..=n_max {
            power = power.matmul(&self.t);
            if power.ensure_bounded().is_err() {
                return Ok(PowerTrace { n_max, samples, overflowed_at: Some(n) });
            }
            samples.push((n, operator_norm(&power.sub_identity())));
        }
        Ok(PowerTrace { n_max, samples, overflowed_at: None })
    }
}

pub fn semigroup_eval(sg: &PowerSemigroup, n: u64) -> Result<Matrix> {
    sg.eval(n)
}

/// `‖Tⁿ − I‖` for `n = 1..=N`, truncated at the first overflowing power.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerTrace {
    pub n_max: u64,
    pub samples: Vec<(u64, f64)>,
    pub overflowed_at: Option<u64>,
}

impl PowerTrace {
    /// Cesàro averages `Aₙ = (1/n)·Σ_{j≤n} ‖Tʲ − I‖` and their minimum over `[N/2, N]`.
    pub fn cesaro(&self) -> CesaroResult {
        let mut sum = 0.0;
        let averages: Vec<f64> = self
            .samples
            .iter()
            .map(|&(n, v)| {
                sum += v;
                sum / n as f64
            })
            .collect();
        if self.overflowed_at.is_some() || averages.is_empty() {
            return CesaroResult { liminf_estimate: Limsup::Overflowed, averages };
        }
        let from = (self.n_max / 2).max(1) as usize - 1;
        let liminf = averages[from..].iter().copied().fold(f64::INFINITY, f64::min);
        CesaroResult { liminf_estimate: Limsup::Finite(liminf), averages }
    }

    pub fn tail_estimate(&self) -> TailEstimate {
        TailEstimate::from_integer_samples(&self.samples, DEFAULT_TAIL_WINDOWS, self.overflowed_at)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CesaroResult {
    /// `min Aₙ` over `n ∈ [N/2, N]`.
    pub liminf_estimate: Limsup,
    /// `A₁, …, A_N` (truncated at overflow).
    pub averages: Vec<f64>,
}

/// Cesàro averages `Aₙ = (1/n)·Σ_{j≤n} ‖Tʲ − I‖`.
pub fn cesaro_wallen(sg: &PowerSemigroup, n_max: u64) -> Result<CesaroResult> {
    if n_max < 10 {
        return Err(CoslawError::ConfigError(format!("N must be at least 10, got {n_max}")));
    }
    Ok(sg.norm_trace(n_max)?.cesaro())
}

/// `limsup_{n→∞} ‖Tⁿ − I‖ < r ⟹ T = I`, estimated over the tail `[N/2, N]`.
pub fn semigroup_law_check(sg: &PowerSemigroup, r: f64, n_max: u64, tol_zero: f64) -> Result<LawVerdict> {
    if n_max < 100 {
        return Err(CoslawError::ConfigError(format!("N must be at least 100, got {n_max}")));
    }
    semigroup_verdict(sg, r, &sg.norm_trace(n_max)?, tol_zero)
}

/// [`semigroup_law_check`] on a trace that is already computed.
pub fn semigroup_verdict(sg: &PowerSemigroup, r: f64, trace: &PowerTrace, tol_zero: f64) -> Result<LawVerdict> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(CoslawError::ConfigError(format!("threshold r must lie in (0, 1], got {r}")));
    }
    if trace.n_max < 100 {
        return Err(CoslawError::ConfigError(format!("N must be at least 100, got {}", trace.n_max)));
    }
    let trivial = operator_norm(&sg.generator().sub_identity()) <= tol_zero;
    let mut verdict = LawVerdict::new(r, trace.tail_estimate(), trivial, tol_zero);
    verdict.conclusion_holds = trivial;
    Ok(verdict)
}

/// `exp(tG)` by Taylor series on `tG/2^k` followed by `k` squarings.
pub fn matrix_exp(g: &Matrix, t: f64) -> Result<Matrix> {
    g.ensure_finite()?;
    let scaled_norm = operator_norm(g) * t.abs();
    if scaled_norm > EXP_DOMAIN {
        return Err(CoslawError::DomainError(format!("‖G‖·|t| = {scaled_norm} exceeds {EXP_DOMAIN}")));
    }
    let mut k = 0;
    while scaled_norm / 2f64.powi(k) > EXP_SCALED_TARGET {
        k += 1;
    }
    let a = g.scale_real(t / 2f64.powi(k));
    let dim = g.dim();
    let mut sum = Matrix::identity(dim);
    let mut term = Matrix::identity(dim);
    for j in 1..60 {
        term = term.matmul(&a).scale_real(1.0 / j as f64);
        sum = &sum + &term;
        if term.frobenius_norm() < EXP_TERM_TOL {
            break;
        }
    }
    for _ in 0..k {
        sum = sum.matmul(&sum);
    }
    sum.ensure_bounded()?;
    Ok(sum)
}

/// The continuous semigroup `t ↦ exp(tG)`.
#[derive(Debug, Clone)]
pub struct ExpSemigroup {
    generator: Matrix,
    lipschitz: Option<f64>,
}

impl ExpSemigroup {
    pub fn new(generator: Matrix) -> Result<Self> {
        generator.ensure_finite()?;
        // for normal G with spectrum in Re λ ≤ 0, |d/dt e^{tλ}| ≤ |λ| ≤ ‖G‖
        let lipschitz = eig_normal(&generator).ok().and_then(|dec| {
            let dissipative = dec.values.iter().all(|l| l.re <= 1e-12 * (1.0 + l.norm()));
            dissipative.then(|| dec.max_modulus())
        });
        Ok(Self { generator, lipschitz })
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }
}

impl Trajectory for ExpSemigroup {
    fn distance_from_identity(&self, t: f64) -> Result<f64> {
        Ok(operator_norm(&matrix_exp(&self.generator, t)?.sub_identity()))
    }

    fn lipschitz_bound(&self) -> Option<f64> {
        self.lipschitz
    }
}

/// `limsup_{t→∞} ‖exp(tG) − I‖ < r ⟹ G = 0` on the horizon of `cfg`.
pub fn matrix_exp_semigroup_check(g: &Matrix, r: f64, cfg: &ScanConfig) -> Result<LawVerdict> {
    check_exp_inputs(g, r, cfg)?;
    let evidence = windowed_sup_scan(&ExpSemigroup::new(g.clone())?, cfg)?;
    Ok(exp_verdict(g, r, evidence, cfg.tol_zero))
}

/// [`matrix_exp_semigroup_check`] that also keeps every `(t, ‖exp(tG) − I‖)` sample.
pub fn exp_semigroup_trace(g: &Matrix, r: f64, cfg: &ScanConfig) -> Result<(LawVerdict, ScanTrace)> {
    check_exp_inputs(g, r, cfg)?;
    let trace = scan_with_samples(&ExpSemigroup::new(g.clone())?, cfg)?;
    Ok((exp_verdict(g, r, trace.estimate.clone(), cfg.tol_zero), trace))
}

fn check_exp_inputs(g: &Matrix, r: f64, cfg: &ScanConfig) -> Result<()> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(CoslawError::ConfigError(format!("threshold r must lie in (0, 1], got {r}")));
    }
    cfg.validate()?;
    g.ensure_finite()?;
    let reach = operator_norm(g) * cfg.t_end;
    if reach > EXP_DOMAIN {
        return Err(CoslawError::DomainError(format!("‖G‖·t_end = {reach} exceeds {EXP_DOMAIN}")));
    }
    Ok(())
}

fn exp_verdict(g: &Matrix, r: f64, evidence: TailEstimate, tol_zero: f64) -> LawVerdict {
    let trivial = operator_norm(g) <= tol_zero;
    let mut verdict = LawVerdict::new(r, evidence, trivial, tol_zero);
    verdict.conclusion_holds = trivial;
    verdict
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_complex, seeded_rng};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn scalar(z: Complex64) -> PowerSemigroup {
        PowerSemigroup::new(Matrix::from_diag(&[z])).unwrap()
    }

    #[test]
    fn identity_powers() {
        let sg = PowerSemigroup::new(Matrix::identity(3)).unwrap();
        assert_eq!(sg.eval(1_000_000_000).unwrap(), Matrix::identity(3));
        assert_eq!(sg.eval(0).unwrap(), Matrix::identity(3));
    }

    #[test]
    fn eighth_root_of_unity() {
        let got = scalar(Complex64::from_polar(1.0, PI / 4.0)).eval(8).unwrap().get(0, 0);
        assert!((got - 1.0).norm() < 1e-14);
    }

    #[test]
    fn binary_matches_sequential() {
        let mut rng = seeded_rng(37);
        let t = random_complex(4, &mut rng).scale_real(0.5);
        let sg = PowerSemigroup::new(t.clone()).unwrap();
        let mut seq = Matrix::identity(4);
        for _ in 0..37 {
            seq = seq.matmul(&t);
        }
        let fast = sg.eval(37).unwrap();
        assert!((&fast - &seq).frobenius_norm() <= 1e-10 * seq.frobenius_norm());
    }

    #[test]
    fn power_overflow() {
        assert!(matches!(scalar(Complex64::new(10.0, 0.0)).eval(400), Err(CoslawError::Overflowed { .. })));
        let c = cesaro_wallen(&scalar(Complex64::new(10.0, 0.0)), 400).unwrap();
        assert_eq!(c.liminf_estimate, Limsup::Overflowed);
    }

    #[test]
    fn cesaro_examples() {
        let c = cesaro_wallen(&PowerSemigroup::new(Matrix::identity(2)).unwrap(), 100).unwrap();
        assert!(c.averages.iter().all(|&a| a == 0.0));

        let c = cesaro_wallen(&scalar(Complex64::new(0.5, 0.0)), 1000).unwrap();
        assert_eq!(c.averages[0], 0.5);
        // direct summation oracle
        let n = 1000.0;
        let oracle = (n - (1.0 - 0.5f64.powi(1000))) / n;
        assert!((c.averages[999] - oracle).abs() < 1e-12);
        assert!(c.liminf_estimate.finite().unwrap() < 1.0);
    }

    #[test]
    fn cesaro_of_eighth_root_is_the_phase_average() {
        // T⁸ = 1, so Aₙ tends to the mean of |e^{ikπ/4} − 1| over one period
        let period_mean = (0..8).map(|k| (Complex64::from_polar(1.0, k as f64 * PI / 4.0) - 1.0).norm()).sum::<f64>() / 8.0;
        assert!((period_mean - 0.25 / (PI / 16.0).tan()).abs() < 1e-15);
        let c = cesaro_wallen(&scalar(Complex64::from_polar(1.0, PI / 4.0)), 100_000).unwrap();
        let liminf = c.liminf_estimate.finite().unwrap();
        assert!((liminf - period_mean).abs() < 1e-4, "{liminf}");
        assert!((liminf - 4.0 / PI).abs() > 1e-2);
    }

    #[test]
    fn semigroup_law_examples() {
        let v = semigroup_law_check(&PowerSemigroup::new(Matrix::identity(2)).unwrap(), 1.0, 200, 1e-9).unwrap();
        assert!(v.premise_holds && v.conclusion_holds);

        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let rot = scalar(Complex64::from_polar(1.0, 2.0 * PI * golden));
        let v = semigroup_law_check(&rot, 0.95, 10_000, 1e-9).unwrap();
        assert!(v.evidence.limsup_estimate.finite().unwrap() > 1.99);
        assert!(!v.premise_holds && !v.conclusion_holds);
    }

    #[test]
    fn exp_matches_scalar() {
        let g = Matrix::from_diag(&[Complex64::new(-0.3, 2.0), Complex64::new(0.1, 0.0)]);
        let e = matrix_exp(&g, 7.0).unwrap();
        assert!((e.get(0, 0) - (Complex64::new(-0.3, 2.0) * 7.0).exp()).norm() < 1e-12);
        assert!((e.get(1, 1).re - 0.7f64.exp()).abs() < 1e-12);
        assert!(matches!(matrix_exp(&g, 1e3), Err(CoslawError::DomainError(_))));
    }

    #[test]
    fn exp_semigroup_examples() {
        let cfg = ScanConfig::new(0.0, 60.0, 0.01, 6.0);
        let v = matrix_exp_semigroup_check(&Matrix::zeros(2), 0.95, &cfg).unwrap();
        assert!(v.premise_holds && v.conclusion_holds);

        let rotation = Matrix::scalar(1, Complex64::new(0.0, 1.0));
        let v = matrix_exp_semigroup_check(&rotation, 0.95, &cfg).unwrap();
        assert!((v.evidence.limsup_estimate.finite().unwrap() - 2.0).abs() < 1e-3);
        assert!(!v.premise_holds);

        let decay = Matrix::scalar(1, Complex64::new(-0.1, 0.0));
        let v = matrix_exp_semigroup_check(&decay, 0.95, &ScanConfig::new(0.0, 100.0, 0.1, 10.0)).unwrap();
        let l = v.evidence.limsup_estimate.finite().unwrap();
        assert!(l > 0.99 && l < 1.0, "{l}");
        assert!(!v.premise_holds);
    }
}
