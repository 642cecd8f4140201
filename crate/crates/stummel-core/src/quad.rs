//! Radial integrals: closed forms, adaptive panels and Monte-Carlo checks.
//!
//! Everything radial in this crate boils down to
//! `∫_0^r  Σ_i c_i s^(a_i - 1) |ln s|^(b_i) ds`.
//! The closed-form route (incomplete gamma under `u = -ln s`) is always
//! preferred; divergence is decided exactly by the exponent test (a term
//! diverges at 0 iff `a < 0`, or `a = 0` with `b >= -1`). Adaptive
//! Gauss-Legendre panels on log-subdivided intervals cover the few finite
//! segments without an elementary antiderivative, and a stratified
//! Monte-Carlo estimator exists purely to cross-check the other two routes.

use crate::error::{Error, Result};
use crate::powerlog::{segment_integral, Piecewise, SegmentIntegral};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Relative tolerance of the adaptive panel integrator.
pub const PANEL_REL_TOL: f64 = 1e-10;

/// Result of an integral that may diverge. Divergence is a value here, not
/// an error: callers propagate it into modulus curves and reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegralValue {
    Finite(f64),
    Divergent,
}

impl IntegralValue {
    pub fn is_divergent(&self) -> bool {
        matches!(self, IntegralValue::Divergent)
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            IntegralValue::Finite(v) => Some(*v),
            IntegralValue::Divergent => None,
        }
    }

    /// Apply a monotone map to the finite value (e.g. a p-th root).
    pub fn map(self, f: impl FnOnce(f64) -> f64) -> IntegralValue {
        match self {
            IntegralValue::Finite(v) => IntegralValue::Finite(f(v)),
            IntegralValue::Divergent => IntegralValue::Divergent,
        }
    }

    /// Panics when divergent; used by tests and by callers that have already
    /// excluded divergence.
    pub fn expect_finite(&self) -> f64 {
        self.finite().expect("integral unexpectedly divergent")
    }
}

/// One summand `coeff * s^(a-1) * |ln s|^b` of a radial integrand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialTerm {
    pub coeff: f64,
    pub a: f64,
    pub b: f64,
}

impl RadialTerm {
    /// Exponent test: does `∫_0 coeff s^(a-1) |ln s|^b ds` diverge at zero?
    pub fn divergent_at_zero(&self) -> bool {
        self.coeff != 0.0 && (self.a < 0.0 || (self.a == 0.0 && self.b >= -1.0))
    }
}

/// A sum of power-log summands supported on `(0, s_max)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialIntegrand {
    pub terms: Vec<RadialTerm>,
    pub s_max: f64,
}

impl RadialIntegrand {
    pub fn new(terms: Vec<RadialTerm>, s_max: f64) -> Result<Self> {
        if !(s_max > 0.0) {
            return Err(Error::InvalidDescriptor(format!(
                "radial integrand needs s_max > 0, got {s_max}"
            )));
        }
        for t in &terms {
            if !t.coeff.is_finite() || !t.a.is_finite() || !t.b.is_finite() {
                return Err(Error::InvalidDescriptor(
                    "radial integrand coefficients must be finite".into(),
                ));
            }
            if t.b != 0.0 && t.coeff != 0.0 && s_max > 1.0 {
                return Err(Error::InvalidDescriptor(
                    "log-factor terms require s_max <= 1".into(),
                ));
            }
        }
        Ok(RadialIntegrand { terms, s_max })
    }

    pub fn eval(&self, s: f64) -> f64 {
        debug_assert!(s > 0.0);
        self.terms
            .iter()
            .map(|t| {
                let log_factor = if t.b == 0.0 { 1.0 } else { s.ln().abs().powf(t.b) };
                t.coeff * s.powf(t.a - 1.0) * log_factor
            })
            .sum()
    }
}

/// `∫_0^min(r, s_max) w(s) ds` by the closed-form route.
pub fn integrate_radial(w: &RadialIntegrand, r: f64) -> Result<IntegralValue> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveArgument(r));
    }
    let hi = r.min(w.s_max);
    let mut total = 0.0;
    for t in &w.terms {
        if t.divergent_at_zero() {
            return Ok(IntegralValue::Divergent);
        }
        match segment_integral(t.coeff, t.a - 1.0, t.b, 0.0, hi) {
            SegmentIntegral::Value(v) => total += v,
            SegmentIntegral::Divergent => return Ok(IntegralValue::Divergent),
            SegmentIntegral::NeedsNumeric => unreachable!("prefix integrals are closed form"),
        }
    }
    Ok(IntegralValue::Finite(total))
}

/// `∫_(r1, r2) w(s) ds` over a subinterval of the support.
pub fn integrate_radial_between(w: &RadialIntegrand, r1: f64, r2: f64) -> Result<IntegralValue> {
    if !(r1 >= 0.0 && r2 > r1) {
        return Err(Error::NonPositiveArgument(r2 - r1));
    }
    let lo = r1;
    let hi = r2.min(w.s_max);
    if hi <= lo {
        return Ok(IntegralValue::Finite(0.0));
    }
    let mut total = 0.0;
    for t in &w.terms {
        match segment_integral(t.coeff, t.a - 1.0, t.b, lo, hi) {
            SegmentIntegral::Value(v) => total += v,
            SegmentIntegral::Divergent => return Ok(IntegralValue::Divergent),
            SegmentIntegral::NeedsNumeric => {
                let (c, e, b) = (t.coeff, t.a - 1.0, t.b);
                total += adaptive_log_panels(
                    &|s: f64| c * s.powf(e) * (-s.ln()).powf(b),
                    lo,
                    hi,
                    PANEL_REL_TOL,
                )?;
            }
        }
    }
    Ok(IntegralValue::Finite(total))
}

/// Prefix integral `∫_0^r` of a piecewise power-log function, falling back
/// to panels for the segments without an elementary antiderivative.
pub(crate) fn integrate_piecewise_prefix(pw: &Piecewise, r: f64) -> Result<IntegralValue> {
    integrate_piecewise_between(pw, 0.0, r)
}

pub(crate) fn integrate_piecewise_between(pw: &Piecewise, lo: f64, hi: f64) -> Result<IntegralValue> {
    let mut total = 0.0;
    for p in &pw.pieces {
        let a = p.lo.max(lo);
        let b = p.hi.min(hi);
        if a >= b {
            continue;
        }
        match segment_integral(p.coeff, p.exp, p.log_exp, a, b) {
            SegmentIntegral::Value(v) => total += v,
            SegmentIntegral::Divergent => return Ok(IntegralValue::Divergent),
            SegmentIntegral::NeedsNumeric => {
                let (c, e, le) = (p.coeff, p.exp, p.log_exp);
                total += adaptive_log_panels(
                    &|s: f64| c * s.powf(e) * (-s.ln()).powf(le),
                    a,
                    b,
                    PANEL_REL_TOL,
                )?;
            }
        }
    }
    Ok(IntegralValue::Finite(total))
}

/// 15-point Gauss-Legendre nodes and weights on [-1, 1], computed once by
/// Newton iteration on the Legendre recurrence.
fn gauss_legendre_15() -> &'static ([f64; 15], [f64; 15]) {
    static TABLE: OnceLock<([f64; 15], [f64; 15])> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = 15usize;
        let mut nodes = [0.0; 15];
        let mut weights = [0.0; 15];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                // Legendre P_n(x) and derivative by the three-term recurrence.
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

fn gl15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gauss_legendre_15();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for i in 0..15 {
        s += weights[i] * f(c + h * nodes[i]);
    }
    s * h
}

/// One fixed 15-point panel on `[a, b]`, for composite rules built elsewhere
/// in the crate.
pub(crate) fn gl15_on(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    gl15(f, a, b)
}

/// Adaptive Gauss-Legendre on one smooth segment; subdivision happens at the
/// geometric midpoint, matching the log-scale structure of the integrands.
fn adaptive_segment(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64> {
    let whole = gl15(f, a, b);
    let m = if a > 0.0 { (a * b).sqrt() } else { 0.5 * (a + b) };
    let halves = gl15(f, a, m) + gl15(f, m, b);
    let err = (whole - halves).abs();
    if err <= tol.max(1e-300) {
        return Ok(halves);
    }
    if depth == 0 {
        return Err(Error::NonconvergentQuadrature { estimate: halves, error: err });
    }
    Ok(adaptive_segment(f, a, m, 0.5 * tol, depth - 1)?
        + adaptive_segment(f, m, b, 0.5 * tol, depth - 1)?)
}

/// Adaptive panel integration of `f` over `(lo, hi)`, `0 <= lo < hi`.
///
/// With `lo > 0` this is one adaptive segment. With `lo = 0` the interval is
/// cut into dyadic panels `[hi 2^-(k+1), hi 2^-k]` marching toward the
/// origin; the march stops when the geometric tail estimate drops below the
/// requested relative tolerance, and fails with
/// [`Error::NonconvergentQuadrature`] when contributions do not decay.
pub fn adaptive_log_panels(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> Result<f64> {
    assert!(lo >= 0.0 && lo < hi);
    if lo > 0.0 {
        let rough = gl15(f, lo, hi).abs();
        return adaptive_segment(f, lo, hi, rel_tol * rough.max(1e-30), 48);
    }
    let mut sum = 0.0;
    let mut prev = f64::NAN;
    let mut b = hi;
    for _ in 0..2000 {
        let a = 0.5 * b;
        let rough = gl15(f, a, b).abs();
        let v = adaptive_segment(f, a, b, 0.125 * rel_tol * rough.max(1e-30), 48)?;
        sum += v;
        // Geometric tail bound once panel contributions decay.
        if prev.is_finite() && prev.abs() > 0.0 {
            let q = (v / prev).abs();
            if q < 0.95 {
                let tail = v.abs() * q / (1.0 - q);
                if tail <= 0.25 * rel_tol * sum.abs().max(1e-300) {
                    return Ok(sum + v * q / (1.0 - q));
                }
            }
        }
        if v.abs() <= 1e-3 * rel_tol * sum.abs().max(1e-300) {
            return Ok(sum);
        }
        prev = v;
        b = a;
        if b < 1e-280 {
            break;
        }
    }
    Err(Error::NonconvergentQuadrature { estimate: sum, error: prev.abs() })
}

/// A Monte-Carlo estimate with its standard error; bit-for-bit reproducible
/// for a fixed seed because every stratum draws from its own substream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Number of logarithmic strata used by [`integrate_ball_mc`].
const MC_STRATA: usize = 64;
/// The strata span `[MC_CORE_FRACTION * r, r]`; the excluded core carries a
/// vanishing fraction of any integrable-singularity mass.
const MC_CORE_FRACTION: f64 = 1e-14;

/// Stratified Monte-Carlo estimate of `∫_B(0,r) g(z) dz` in dimension
/// `n <= 3`.
///
/// Radii are stratified on a log scale so that power-law singularities at the
/// origin contribute bounded per-stratum variance; within a stratum the
/// radius is drawn volume-uniformly. This estimator is a cross-check for the
/// closed-form routes, never the primary path.
pub fn integrate_ball_mc(
    g: &dyn Fn(&[f64]) -> f64,
    n: u32,
    r: f64,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    if n == 0 || n > 3 {
        return Err(Error::DimensionTooLarge(n));
    }
    if !(r > 0.0) {
        return Err(Error::NonPositiveArgument(r));
    }
    let nf = n as f64;
    let per_stratum = (samples as usize / MC_STRATA).max(2);
    let ratio = (1.0 / MC_CORE_FRACTION).powf(1.0 / MC_STRATA as f64);
    let mut value = 0.0;
    let mut variance = 0.0;
    let mut used = 0u64;
    let mut inner = r * MC_CORE_FRACTION;
    for stratum in 0..MC_STRATA {
        let outer = if stratum + 1 == MC_STRATA { r } else { inner * ratio };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stratum as u64 + 1);
        let shell_volume = crate::catalog::Geometry::new(n).ball_volume()
            * (outer.powf(nf) - inner.powf(nf));
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..per_stratum {
            let u: f64 = rng.random();
            let t = (inner.powf(nf) + u * (outer.powf(nf) - inner.powf(nf))).powf(1.0 / nf);
            let mut point = [0.0f64; 3];
            match n {
                1 => {
                    point[0] = if rng.random::<bool>() { t } else { -t };
                }
                2 => {
                    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                    point[0] = t * phi.cos();
                    point[1] = t * phi.sin();
                }
                _ => {
                    let cos_theta: f64 = rng.random_range(-1.0..1.0);
                    let sin_theta = (1.0 - cos_theta * cos_theta).sqrt();
                    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                    point[0] = t * sin_theta * phi.cos();
                    point[1] = t * sin_theta * phi.sin();
                    point[2] = t * cos_theta;
                }
            }
            let v = g(&point[..n as usize]);
            sum += v;
            sum_sq += v * v;
        }
        let m = per_stratum as f64;
        let mean = sum / m;
        let var = (sum_sq / m - mean * mean).max(0.0) / (m - 1.0).max(1.0);
        value += shell_volume * mean;
        variance += shell_volume * shell_volume * var;
        used += per_stratum as u64;
        inner = outer;
    }
    Ok(McEstimate { value, std_error: variance.sqrt(), samples: used, seed })
}
