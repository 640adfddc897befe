//! Windowed sup scans and the law checkers built on them.
//!
//! `limsup_{t→∞}` has no finite procedure, so it is estimated: the horizon is
//! cut into windows, each window reports the sup of `‖C(t) − I‖` over a step
//! grid, and the estimate is the max over the last `m` windows, with a trend
//! flag comparing the tail against the windows before it.

use std::f64::consts::PI;

use num_complex::{Complex64, ComplexFloat};
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::cosine::{complex_cos, CosineFamily, EvalStrategy, MatrixCosineFamily, ScalarCosineFamily};
use crate::error::{CoslawError, Result};
use crate::linalg::{spectral_radius, Matrix};

pub const DEFAULT_OVERFLOW_CAP: f64 = 1e6;
pub const DEFAULT_TOL_ZERO: f64 = 1e-9;
pub const DEFAULT_TAIL_WINDOWS: usize = 3;
/// Distance from 0 or 2 within which the dichotomy classifier accepts a class.
pub const CLASSIFY_TOL: f64 = 0.05;
/// Number of dyadic windows `(2^{-j-1}T, 2^{-j}T]` scanned for `t → 0`.
pub const ZERO_LEVELS: usize = 48;

fn default_overflow_cap() -> f64 {
    DEFAULT_OVERFLOW_CAP
}

fn default_tol_zero() -> f64 {
    DEFAULT_TOL_ZERO
}

fn default_tail_windows() -> usize {
    DEFAULT_TAIL_WINDOWS
}

/// Anything whose distance to the identity can be sampled along `t`.
pub trait Trajectory: Sync {
    /// `‖X(t) − I‖`
    fn distance_from_identity(&self, t: f64) -> Result<f64>;

    /// Lipschitz constant of `t ↦ ‖X(t) − I‖`, if one is known.
    fn lipschitz_bound(&self) -> Option<f64>;
}

impl Trajectory for CosineFamily {
    fn distance_from_identity(&self, t: f64) -> Result<f64> {
        CosineFamily::distance_from_identity(self, t)
    }

    fn lipschitz_bound(&self) -> Option<f64> {
        CosineFamily::lipschitz_bound(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub t_start: f64,
    pub t_end: f64,
    pub step: f64,
    pub window_len: f64,
    #[serde(default = "default_overflow_cap")]
    pub overflow_cap: f64,
    #[serde(default = "default_tol_zero")]
    pub tol_zero: f64,
    /// `m`: how many final windows make up the limsup estimate.
    #[serde(default = "default_tail_windows")]
    pub tail_windows: usize,
}

impl ScanConfig {
    pub fn new(t_start: f64, t_end: f64, step: f64, window_len: f64) -> Self {
        Self {
            t_start,
            t_end,
            step,
            window_len,
            overflow_cap: DEFAULT_OVERFLOW_CAP,
            tol_zero: DEFAULT_TOL_ZERO,
            tail_windows: DEFAULT_TAIL_WINDOWS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.t_start, self.t_end, self.step, self.window_len, self.overflow_cap, self.tol_zero]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(CoslawError::ConfigError("scan fields must be finite".into()));
        }
        if !(0.0 <= self.t_start && self.t_start < self.t_end) {
            return Err(CoslawError::ConfigError(format!(
                "need 0 ≤ t_start < t_end, got [{}, {}]",
                self.t_start, self.t_end
            )));
        }
        if !(0.0 < self.step && self.step <= self.window_len && self.window_len <= self.t_end - self.t_start) {
            return Err(CoslawError::ConfigError(format!(
                "need 0 < step ≤ window_len ≤ t_end − t_start, got step {} window {}",
                self.step, self.window_len
            )));
        }
        if self.tail_windows == 0 || self.overflow_cap <= 0.0 || self.tol_zero < 0.0 {
            return Err(CoslawError::ConfigError("tail_windows, overflow_cap and tol_zero must be positive".into()));
        }
        Ok(())
    }

    /// Defaults for the `t → ∞` scan of `cos(a·t)`.
    ///
    /// Horizon `10³/min(|a|, 1)`, stretched to `20/|Im a|` so that growing
    /// families reach the overflow cap; step `0.05/|a|` keeps the grid within
    /// `0.05` rad of every peak; 20 windows.
    pub fn scalar_infinity_default(a: Complex64) -> Self {
        let modulus = a.norm();
        let mut t_end = if modulus > 0.0 { 1e3 / modulus.min(1.0) } else { 1e3 };
        if a.im != 0.0 {
            t_end = t_end.max(20.0 / a.im.abs());
        }
        let window_len = t_end / 20.0;
        let step = if modulus > 0.0 { (0.05 / modulus).min(window_len) } else { window_len };
        Self::new(0.0, t_end, step, window_len)
    }

    /// Defaults for the `t → 0` scan: top window `(T/2, T]` with `T = 1` and 128 points per dyadic window.
    pub fn scalar_zero_default() -> Self {
        Self::new(0.0, 1.0, 1.0 / 256.0, 0.5)
    }

    /// Defaults for a `t → ∞` scan of a family whose fastest frequency is `rate`.
    ///
    /// Ten windows of two periods each, 128 samples per period.
    pub fn periodic_default(rate: f64) -> Self {
        if rate <= 0.0 || !rate.is_finite() {
            return Self::new(0.0, 100.0, 1.0, 10.0);
        }
        let period = 2.0 * PI / rate;
        Self::new(0.0, 20.0 * period, period / 128.0, 2.0 * period)
    }

    /// Defaults for [`scaled_gap_witness`]: twenty beat periods `2π/|b − a|`
    /// (at most `10⁵`), 20 samples per radian of the faster frequency.
    pub fn witness_default(a: f64, b: f64) -> Self {
        let fastest = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        let slowest = [a.abs(), b.abs(), (b - a).abs()].into_iter().filter(|v| *v > 0.0).fold(fastest, f64::min);
        let t_end = (40.0 * PI / slowest).min(1e5);
        let step = (0.05 / fastest).min(t_end / 16.0);
        Self::new(0.0, t_end, step, t_end / 16.0)
    }

    /// `t_start + k·step`, `k = 0..`, up to and including `t_end`.
    fn grid_len(&self) -> usize {
        ((self.t_end - self.t_start) / self.step + 1e-9).floor() as usize + 1
    }

    fn grid_point(&self, k: usize) -> f64 {
        self.t_start + k as f64 * self.step
    }
}

/// A limsup estimate, or the report that samples passed the overflow cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Limsup {
    Finite(f64),
    Overflowed,
}

impl Limsup {
    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Overflowed => None,
        }
    }

    pub fn is_overflowed(self) -> bool {
        matches!(self, Self::Overflowed)
    }
}

impl Serialize for Limsup {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(v) => serializer.serialize_f64(*v),
            Self::Overflowed => serializer.serialize_str("overflowed"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    Decreasing,
    Stable,
    Increasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowSup {
    pub start: f64,
    pub sup: f64,
    /// Grid point where the sup was attained.
    pub at: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailEstimate {
    pub window_sups: Vec<WindowSup>,
    pub limsup_estimate: Limsup,
    pub trend: Trend,
    /// `step·L` for a known Lipschitz constant `L` of the scanned norm.
    pub grid_error_bound: Option<f64>,
    /// Largest sample over the whole scan, `(t, ‖X(t) − I‖)`.
    pub worst_sample: (f64, f64),
    pub overflowed_at: Option<f64>,
}

impl TailEstimate {
    /// Builds the estimate from finished windows, the last of which may have overflowed.
    fn from_windows(
        window_sups: Vec<WindowSup>,
        tail_windows: usize,
        grid_error_bound: Option<f64>,
        overflowed_at: Option<f64>,
    ) -> Self {
        let worst = window_sups
            .iter()
            .fold((f64::NAN, f64::NEG_INFINITY), |acc, w| if w.sup > acc.1 { (w.at, w.sup) } else { acc });
        if overflowed_at.is_some() {
            return Self {
                window_sups,
                limsup_estimate: Limsup::Overflowed,
                trend: Trend::Increasing,
                grid_error_bound,
                worst_sample: worst,
                overflowed_at,
            };
        }
        let count = window_sups.len();
        let m = tail_windows.min(count);
        let tail_max = window_sups[count - m..].iter().map(|w| w.sup).fold(f64::NEG_INFINITY, f64::max);
        let sups: Vec<f64> = window_sups.iter().map(|w| w.sup).collect();
        let (recent, earlier) = if count >= 2 * m {
            (mean(&sups[count - m..]), mean(&sups[count - 2 * m..count - m]))
        } else {
            (sups[count - 1], sups[0])
        };
        let slack = grid_error_bound.unwrap_or(0.0) + 1e-9 * (1.0 + earlier.abs());
        let trend = if recent - earlier > slack {
            Trend::Increasing
        } else if earlier - recent > slack {
            Trend::Decreasing
        } else {
            Trend::Stable
        };
        Self {
            window_sups,
            limsup_estimate: Limsup::Finite(tail_max),
            trend,
            grid_error_bound,
            worst_sample: worst,
            overflowed_at: None,
        }
    }

    /// Window sups over integer samples `(n, value)`: `m` windows over the
    /// first half and `m` over `[N/2, N]`, so the estimate is the tail max over `[N/2, N]`.
    pub fn from_integer_samples(samples: &[(u64, f64)], tail_windows: usize, overflowed_at: Option<u64>) -> Self {
        let m = tail_windows.max(1);
        let last = samples.last().map_or(0, |s| s.0);
        let half = last.div_ceil(2);
        let mut windows: Vec<WindowSup> = Vec::with_capacity(2 * m);
        let mut bounds: Vec<u64> = (0..m).map(|i| i as u64 * half / m as u64).collect();
        bounds.extend((0..m).map(|i| half + i as u64 * (last + 1 - half) / m as u64));
        bounds.push(last + 1);
        bounds.dedup();
        for pair in bounds.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let best = samples
                .iter()
                .filter(|(n, _)| *n >= lo && *n < hi)
                .fold(None::<(u64, f64)>, |acc, &(n, v)| match acc {
                    Some((_, bv)) if bv >= v => acc,
                    _ => Some((n, v)),
                });
            if let Some((n, v)) = best {
                windows.push(WindowSup { start: lo as f64, sup: v, at: n as f64 });
            }
        }
        let tail = windows.iter().filter(|w| w.start >= half as f64).count().max(1);
        Self::from_windows(windows, tail, None, overflowed_at.map(|n| n as f64))
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

struct WindowOutcome {
    sup: WindowSup,
    overflowed_at: Option<f64>,
    samples: Vec<(f64, f64)>,
}

fn scan_window<T: Trajectory + ?Sized>(
    f: &T,
    cfg: &ScanConfig,
    k_range: (usize, usize),
    start: f64,
    collect: bool,
) -> Result<WindowOutcome> {
    let mut sup = WindowSup { start, sup: f64::NEG_INFINITY, at: start };
    let mut samples = Vec::new();
    for k in k_range.0..k_range.1 {
        let t = cfg.grid_point(k);
        let value = match f.distance_from_identity(t) {
            Ok(v) => v,
            Err(CoslawError::Overflowed { .. }) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        let over = !(value <= cfg.overflow_cap);
        let value = if over { value.max(cfg.overflow_cap) } else { value };
        if collect {
            samples.push((t, value));
        }
        if value > sup.sup {
            sup.sup = value;
            sup.at = t;
        }
        if over {
            return Ok(WindowOutcome { sup, overflowed_at: Some(t), samples });
        }
    }
    Ok(WindowOutcome { sup, overflowed_at: None, samples })
}

/// Full scan record: the estimate plus, optionally, every `(t, norm)` sample.
#[derive(Debug, Clone)]
pub struct ScanTrace {
    pub estimate: TailEstimate,
    pub samples: Vec<(f64, f64)>,
}

/// Windowed sup of `‖C(t) − I‖` over `[t_start, t_end]`.
pub fn windowed_sup_scan<T: Trajectory + ?Sized>(f: &T, cfg: &ScanConfig) -> Result<TailEstimate> {
    Ok(scan(f, cfg, false)?.estimate)
}

/// [`windowed_sup_scan`] that also keeps every grid sample.
pub fn scan_with_samples<T: Trajectory + ?Sized>(f: &T, cfg: &ScanConfig) -> Result<ScanTrace> {
    scan(f, cfg, true)
}

fn scan<T: Trajectory + ?Sized>(f: &T, cfg: &ScanConfig, collect: bool) -> Result<ScanTrace> {
    cfg.validate()?;
    let points = cfg.grid_len();
    let span = cfg.t_end - cfg.t_start;
    let n_windows = ((span / cfg.window_len) - 1e-12).ceil().max(1.0) as usize;
    let ranges: Vec<(usize, usize, f64)> = (0..n_windows)
        .map(|i| {
            let lo = ((i as f64 * cfg.window_len) / cfg.step - 1e-9).ceil().max(0.0) as usize;
            let hi = if i + 1 == n_windows {
                points
            } else {
                ((((i + 1) as f64 * cfg.window_len) / cfg.step - 1e-9).ceil() as usize).min(points)
            };
            (lo.min(points), hi, cfg.t_start + i as f64 * cfg.window_len)
        })
        .filter(|(lo, hi, _)| hi > lo)
        .collect();
    if ranges.is_empty() {
        return Err(CoslawError::ConfigError("scan grid is empty".into()));
    }

    let outcomes: Vec<Result<WindowOutcome>> =
        ranges.par_iter().map(|&(lo, hi, start)| scan_window(f, cfg, (lo, hi), start, collect)).collect();

    let mut window_sups = Vec::with_capacity(outcomes.len());
    let mut samples = Vec::new();
    let mut overflowed_at = None;
    for outcome in outcomes {
        let outcome = outcome?;
        window_sups.push(outcome.sup);
        samples.extend(outcome.samples);
        if outcome.overflowed_at.is_some() {
            overflowed_at = outcome.overflowed_at;
            break;
        }
    }
    let grid_error_bound = f.lipschitz_bound().map(|l| l * cfg.step);
    let estimate = TailEstimate::from_windows(window_sups, cfg.tail_windows, grid_error_bound, overflowed_at);
    Ok(ScanTrace { estimate, samples })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LimitPoint {
    Zero,
    #[serde(alias = "inf")]
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Dichotomy {
    Zero,
    Two,
    Infinite,
    Indeterminate,
}

/// Outcome of the scalar dichotomy at `t₀ ∈ {0, ∞}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DichotomyClass {
    pub class: Dichotomy,
    pub t0: LimitPoint,
    /// `a` (with `Re a ≥ 0`) fitted from samples so that `c(t) = cos(a·t)`; only for `t₀ = 0`, class `Zero`.
    pub recovered_a: Option<[f64; 2]>,
    pub evidence: TailEstimate,
}

/// Samples `|c(t) − 1|` on dyadic windows `(2^{-j-1}T, 2^{-j}T]`, `T = cfg.t_end`.
struct ShrinkingScan<'a> {
    family: &'a ScalarCosineFamily,
}

impl ShrinkingScan<'_> {
    fn run(&self, cfg: &ScanConfig) -> Result<TailEstimate> {
        cfg.validate()?;
        let top = cfg.t_end;
        let per_window = ((0.5 * top / cfg.step).ceil() as usize).clamp(8, 4096);
        let levels: Vec<Result<(WindowSup, Option<f64>)>> = (0..ZERO_LEVELS)
            .into_par_iter()
            .map(|j| {
                let hi = top * 0.5f64.powi(j as i32);
                let lo = 0.5 * hi;
                let mut sup = WindowSup { start: hi, sup: f64::NEG_INFINITY, at: hi };
                for i in 0..per_window {
                    let t = hi - (hi - lo) * i as f64 / per_window as f64;
                    let value = match self.family.eval(t) {
                        Ok(c) => (c - 1.0).norm(),
                        Err(CoslawError::Overflowed { .. }) => f64::INFINITY,
                        Err(e) => return Err(e),
                    };
                    if value > sup.sup {
                        sup.sup = value.min(f64::MAX);
                        sup.at = t;
                    }
                    if !(value <= cfg.overflow_cap) {
                        return Ok((sup, Some(t)));
                    }
                }
                Ok((sup, None))
            })
            .collect();
        let mut windows = Vec::with_capacity(ZERO_LEVELS);
        let mut overflowed_at = None;
        for level in levels {
            let (sup, over) = level?;
            windows.push(sup);
            if over.is_some() {
                overflowed_at = over;
                break;
            }
        }
        let lipschitz = (self.family.a.im == 0.0).then(|| self.family.a.re.abs());
        let bound = lipschitz.map(|l| l * top / (2.0 * per_window as f64));
        Ok(TailEstimate::from_windows(windows, cfg.tail_windows, bound, overflowed_at))
    }
}

/// Which of `limsup |c(t) − 1| ∈ {0, 2, ∞}` a scalar family `cos(a·t)` shows at `t₀`.
///
/// For `t₀ = ∞` the scan runs over `cfg` as given; for `t₀ = 0` over dyadic
/// windows shrinking from `cfg.t_end` toward zero.
pub fn classify_scalar_dichotomy(a: Complex64, t0: LimitPoint, cfg: &ScanConfig) -> Result<DichotomyClass> {
    let family = ScalarCosineFamily::new(a);
    let evidence = match t0 {
        LimitPoint::Infinity => windowed_sup_scan(&CosineFamily::Scalar(family), cfg)?,
        LimitPoint::Zero => ShrinkingScan { family: &family }.run(cfg)?,
    };
    let class = match evidence.limsup_estimate {
        Limsup::Overflowed => Dichotomy::Infinite,
        Limsup::Finite(l) if (l - 2.0).abs() <= CLASSIFY_TOL => Dichotomy::Two,
        Limsup::Finite(l) if l <= cfg.tol_zero => Dichotomy::Zero,
        Limsup::Finite(_) => Dichotomy::Indeterminate,
    };
    let recovered_a = match (class, t0) {
        (Dichotomy::Zero, LimitPoint::Zero) => recover_frequency(&family, cfg.t_end),
        _ => None,
    };
    Ok(DichotomyClass { class, t0, recovered_a, evidence })
}

/// Fits `a` from `c(t₁) = cos(a·t₁)` at the largest dyadic `t₁ ≤ T` with
/// `|c(t₁) − 1| ≤ 1/2`, and accepts it only if it also reproduces `c(t₁/2)`.
fn recover_frequency(family: &ScalarCosineFamily, top: f64) -> Option<[f64; 2]> {
    let mut t = top;
    for _ in 0..200 {
        let c = family.eval(t).ok()?;
        if (c - 1.0).norm() <= 0.5 {
            if c == Complex64::new(1.0, 0.0) {
                return Some([0.0, 0.0]);
            }
            let mut a = c.acos() / t;
            if a.re < 0.0 || (a.re == 0.0 && a.im < 0.0) {
                a = -a;
            }
            let check_t = 0.5 * t;
            let predicted = complex_cos(a * check_t).ok()?;
            let observed = family.eval(check_t).ok()?;
            let ok = (predicted - observed).norm() <= 1e-9 * (1.0 + observed.norm());
            // + 0.0 folds a negative zero into +0
            return ok.then_some([a.re + 0.0, a.im + 0.0]);
        }
        t *= 0.5;
    }
    None
}

/// Result of checking one of the `limsup < r ⟹ trivial` laws on a finite horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawVerdict {
    pub threshold_r: f64,
    /// The scan certifies `limsup < r`: estimate plus grid error stays below `r`.
    pub premise_holds: bool,
    /// Every sample sat within `tol_zero` of the identity (and the generator is zero where applicable).
    pub conclusion_holds: bool,
    pub worst_sample: (f64, f64),
    pub evidence: TailEstimate,
}

impl LawVerdict {
    pub fn new(threshold_r: f64, evidence: TailEstimate, generator_trivial: bool, tol_zero: f64) -> Self {
        let premise_holds = match evidence.limsup_estimate {
            Limsup::Finite(l) => l + evidence.grid_error_bound.unwrap_or(0.0) < threshold_r,
            Limsup::Overflowed => false,
        };
        let all_near_identity =
            !evidence.limsup_estimate.is_overflowed() && evidence.window_sups.iter().all(|w| w.sup <= tol_zero);
        Self {
            threshold_r,
            premise_holds,
            conclusion_holds: all_near_identity && generator_trivial,
            worst_sample: evidence.worst_sample,
            evidence,
        }
    }

    /// Premise held but the family is not trivial.
    pub fn is_counterexample(&self) -> bool {
        self.premise_holds && !self.conclusion_holds
    }

    /// The JSON-lines record `{"r", "premise", "conclusion", "limsup", ...}`.
    pub fn record(&self) -> serde_json::Value {
        serde_json::json!({
            "r": self.threshold_r,
            "premise": self.premise_holds,
            "conclusion": self.conclusion_holds,
            "limsup": self.evidence.limsup_estimate,
            "trend": self.evidence.trend,
            "worst_t": self.worst_sample.0,
            "worst_norm": self.worst_sample.1,
        })
    }
}

/// `limsup_{t→∞} ‖C(t) − I‖ < r ⟹ C ≡ I` on the horizon of `cfg`.
pub fn law_check_limsup_infinity(f: &CosineFamily, r: f64, cfg: &ScanConfig) -> Result<LawVerdict> {
    if !(r > 0.0 && r <= 2.0) {
        return Err(CoslawError::ConfigError(format!("threshold r must lie in (0, 2], got {r}")));
    }
    let evidence = windowed_sup_scan(f, cfg)?;
    law_verdict(f, r, evidence, cfg.tol_zero)
}

/// The verdict for an already computed scan of `f`.
pub fn law_verdict(f: &CosineFamily, r: f64, evidence: TailEstimate, tol_zero: f64) -> Result<LawVerdict> {
    if !(r > 0.0 && r <= 2.0) {
        return Err(CoslawError::ConfigError(format!("threshold r must lie in (0, 2], got {r}")));
    }
    let generator_trivial = match f {
        CosineFamily::Scalar(_) => true,
        CosineFamily::Matrix(m) => m.generator_norm() <= tol_zero,
    };
    Ok(LawVerdict::new(r, evidence, generator_trivial, tol_zero))
}

/// `(ρ(C(t) − I), maxᵢ |cos(t·bᵢ) − 1|)` for the diagonal generator `diag(b)`.
///
/// On a diagonal algebra the characters are the coordinate functionals, so the
/// two sides agree; they are computed by unrelated code paths.
pub fn gelfand_check(diag_b: &[Complex64], t: f64) -> Result<(f64, f64)> {
    let family = MatrixCosineFamily::new(Matrix::from_diag(diag_b), EvalStrategy::Spectral)?;
    let lhs = spectral_radius(&family.eval(t)?.sub_identity()).value;
    let rhs = diag_b
        .iter()
        .map(|&b| complex_cos(b * t).map(|c| (c - 1.0).abs()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok((lhs, rhs))
}

/// Iterates `g(S) = 1 − √(1 − S/2)` from `s0 ∈ [0, 1]` until `|ΔS| < 1e-14`.
///
/// Returns the limit and the number of applications of `g`.
pub fn contraction_s_iteration(s0: f64) -> Result<(f64, usize)> {
    if !(0.0..=1.0).contains(&s0) {
        return Err(CoslawError::ConfigError(format!("S₀ must lie in [0, 1], got {s0}")));
    }
    // 1 − √(1−u) = u/(1 + √(1−u)), free of cancellation near 0
    let g = |s: f64| {
        let u = 0.5 * s;
        u / (1.0 + (1.0 - u).sqrt())
    };
    let mut s = s0;
    for iteration in 1..=10_000 {
        let next = g(s);
        let delta = (next - s).abs();
        s = next;
        if delta < 1e-14 {
            return Ok((s, iteration));
        }
    }
    Err(CoslawError::NoConvergence("S contraction"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapWitness {
    /// `sup_t |cos(b·t) − cos(a·t)|` over the horizon.
    pub value: f64,
    pub at: f64,
}

/// `sup_t |cos(b·t) − cos(a·t)|`: grid search, then golden-section refinement
/// around the best few grid maxima.
pub fn scaled_gap_witness(a: f64, b: f64, cfg: &ScanConfig) -> Result<GapWitness> {
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(CoslawError::ConfigError("frequencies must be finite".into()));
    }
    if a == b {
        return Ok(GapWitness { value: 0.0, at: cfg.t_start });
    }
    let fastest = a.abs().max(b.abs());
    if cfg.step * fastest > 0.5 {
        return Err(CoslawError::ConfigError(format!(
            "step {} too coarse for frequency {fastest}; need step·max(|a|,|b|) ≤ 0.5",
            cfg.step
        )));
    }
    let gap = |t: f64| ((b * t).cos() - (a * t).cos()).abs();
    let points = cfg.grid_len();
    let values: Vec<f64> = (0..points).into_par_iter().map(|k| gap(cfg.grid_point(k))).collect();

    let mut peaks: Vec<usize> = (0..points)
        .filter(|&k| {
            let left = if k == 0 { f64::NEG_INFINITY } else { values[k - 1] };
            let right = if k + 1 == points { f64::NEG_INFINITY } else { values[k + 1] };
            values[k] >= left && values[k] >= right
        })
        .collect();
    peaks.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    peaks.truncate(8);

    let mut best = GapWitness { value: values[peaks[0]], at: cfg.grid_point(peaks[0]) };
    for &k in &peaks {
        let lo = cfg.grid_point(k.saturating_sub(1));
        let hi = cfg.grid_point((k + 1).min(points - 1));
        let (t, v) = golden_section_max(gap, lo, hi);
        if v > best.value {
            best = GapWitness { value: v, at: t };
        }
    }
    Ok(best)
}

/// Golden-section search for a maximum of a unimodal function on `[lo, hi]`.
fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= 1e-13 * (1.0 + lo.abs()) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let candidates = [(lo, f(lo)), (x1, f1), (x2, f2), (hi, f(hi))];
    candidates.into_iter().fold((lo, f64::NEG_INFINITY), |acc, c| if c.1 > acc.1 { c } else { acc })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(a: f64) -> Complex64 {
        Complex64::new(a, 0.0)
    }

    #[test]
    fn config_validation() {
        assert!(ScanConfig::new(0.0, 10.0, 0.1, 1.0).validate().is_ok());
        for bad in [
            ScanConfig::new(5.0, 1.0, 0.1, 1.0),
            ScanConfig::new(-1.0, 1.0, 0.1, 1.0),
            ScanConfig::new(0.0, 1.0, 0.0, 0.5),
            ScanConfig::new(0.0, 1.0, 0.6, 0.5),
            ScanConfig::new(0.0, 1.0, 0.1, 2.0),
        ] {
            assert!(matches!(bad.validate(), Err(CoslawError::ConfigError(_))), "{bad:?}");
        }
    }

    #[test]
    fn constant_family_scans_to_zero() {
        let f = CosineFamily::scalar(real(0.0));
        let est = windowed_sup_scan(&f, &ScanConfig::new(0.0, 100.0, 0.5, 10.0)).unwrap();
        assert_eq!(est.limsup_estimate, Limsup::Finite(0.0));
        assert!(est.window_sups.iter().all(|w| w.sup == 0.0));
        assert_eq!(est.window_sups.len(), 10);
        assert_eq!(est.trend, Trend::Stable);
    }

    #[test]
    fn unit_frequency_reaches_two() {
        let f = CosineFamily::scalar(real(1.0));
        let est = windowed_sup_scan(&f, &ScanConfig::new(0.0, 1000.0, 1e-3, 50.0)).unwrap();
        let l = est.limsup_estimate.finite().unwrap();
        assert!(l >= 1.999 && l <= 2.0, "{l}");
        assert_eq!(est.grid_error_bound, Some(1e-3));
    }

    #[test]
    fn imaginary_frequency_overflows_early() {
        let f = CosineFamily::scalar(Complex64::new(0.0, 1.0));
        let est = windowed_sup_scan(&f, &ScanConfig::new(0.0, 100.0, 0.01, 5.0)).unwrap();
        assert_eq!(est.limsup_estimate, Limsup::Overflowed);
        let at = est.overflowed_at.unwrap();
        assert!(at < 20.0 && at > 14.0, "{at}");
    }

    #[test]
    fn samples_cover_the_grid_in_order() {
        let f = CosineFamily::scalar(real(1.0));
        let trace = scan_with_samples(&f, &ScanConfig::new(0.0, 1.0, 0.25, 0.5)).unwrap();
        let ts: Vec<f64> = trace.samples.iter().map(|s| s.0).collect();
        assert_eq!(ts, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn integer_windows_cover_tail_half() {
        let samples: Vec<(u64, f64)> = (0..=100).map(|n| (n, if n == 40 { 9.0 } else { n as f64 / 100.0 })).collect();
        let est = TailEstimate::from_integer_samples(&samples, 3, None);
        // the spike at n = 40 is outside [50, 100]
        assert_eq!(est.limsup_estimate, Limsup::Finite(1.0));
        assert_eq!(est.worst_sample, (40.0, 9.0));
    }

    #[test]
    fn dichotomy_examples() {
        let zero = classify_scalar_dichotomy(real(0.0), LimitPoint::Infinity, &ScanConfig::scalar_infinity_default(real(0.0)))
            .unwrap();
        assert_eq!(zero.class, Dichotomy::Zero);
        let two = classify_scalar_dichotomy(real(1.0), LimitPoint::Infinity, &ScanConfig::scalar_infinity_default(real(1.0)))
            .unwrap();
        assert_eq!(two.class, Dichotomy::Two);
        let a = Complex64::new(0.0, 1.0);
        let inf = classify_scalar_dichotomy(a, LimitPoint::Infinity, &ScanConfig::scalar_infinity_default(a)).unwrap();
        assert_eq!(inf.class, Dichotomy::Infinite);
    }

    #[test]
    fn dichotomy_at_zero_recovers_frequency() {
        let got = classify_scalar_dichotomy(real(2.5), LimitPoint::Zero, &ScanConfig::scalar_zero_default()).unwrap();
        assert_eq!(got.class, Dichotomy::Zero);
        let [re, im] = got.recovered_a.unwrap();
        assert!((re - 2.5).abs() < 1e-6 && im.abs() < 1e-6, "{re} {im}");

        let complex = Complex64::new(1.5, -0.75);
        let got = classify_scalar_dichotomy(complex, LimitPoint::Zero, &ScanConfig::scalar_zero_default()).unwrap();
        assert_eq!(got.class, Dichotomy::Zero);
        let [re, im] = got.recovered_a.unwrap();
        assert!((re - 1.5).abs() < 1e-6 && (im + 0.75).abs() < 1e-6, "{re} {im}");
    }

    #[test]
    fn law_check_trivial_and_oscillating() {
        let zero = CosineFamily::matrix(Matrix::zeros(2), EvalStrategy::Spectral).unwrap();
        let v = law_check_limsup_infinity(&zero, 2.0, &ScanConfig::new(0.0, 50.0, 0.5, 5.0)).unwrap();
        assert!(v.premise_holds && v.conclusion_holds && !v.is_counterexample());

        let one = CosineFamily::scalar(real(1.0));
        let v = law_check_limsup_infinity(&one, 2.0, &ScanConfig::new(0.0, 1000.0, 1e-3, 50.0)).unwrap();
        assert!(!v.premise_holds);
        assert!(!v.conclusion_holds);
        assert!(law_check_limsup_infinity(&one, 2.5, &ScanConfig::new(0.0, 10.0, 0.1, 1.0)).is_err());
    }

    #[test]
    fn gelfand_examples() {
        assert_eq!(gelfand_check(&[real(0.0), real(0.0)], 3.0).unwrap(), (0.0, 0.0));
        let (lhs, rhs) = gelfand_check(&[real(1.0), real(2.0)], PI).unwrap();
        assert!((lhs - 2.0).abs() < 1e-15 && (rhs - 2.0).abs() < 1e-15);
    }

    #[test]
    fn contraction_examples() {
        assert_eq!(contraction_s_iteration(0.0).unwrap(), (0.0, 1));
        for s0 in [1.0, 0.5] {
            let (s, it) = contraction_s_iteration(s0).unwrap();
            assert!(s <= 1e-12 && it <= 60, "{s0}: {s} after {it}");
        }
        assert!(contraction_s_iteration(1.5).is_err());
    }

    #[test]
    fn witness_trivial_pair() {
        let w = scaled_gap_witness(1.0, 1.0, &ScanConfig::new(0.0, 10.0, 0.01, 1.0)).unwrap();
        assert_eq!(w.value, 0.0);
    }

    #[test]
    fn witness_coarse_grid_rejected() {
        assert!(scaled_gap_witness(1.0, 30.0, &ScanConfig::new(0.0, 10.0, 0.1, 1.0)).is_err());
    }

    #[test]
    fn golden_section_finds_parabola_top() {
        let (t, v) = golden_section_max(|x| 1.0 - (x - 0.3) * (x - 0.3), 0.0, 1.0);
        assert!((t - 0.3).abs() < 1e-7 && (v - 1.0).abs() < 1e-14);
    }
}
