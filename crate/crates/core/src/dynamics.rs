//! Arithmetic of `f(z) = z^m + lambda / z^l`: evaluation, critical data,
//! escape-bounded iteration, cycle detection and the real-slice levels.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
use thiserror::Error;

use crate::cmath::{self, modulus, powu, ExtComplex};

/// Window tolerance used when looking for a periodic tail.
pub const CYCLE_WINDOW_TOL: f64 = 1e-8;
/// Residual target for Newton polishing of `f^p(z) - z`.
pub const CYCLE_POLISH_TOL: f64 = 1e-12;
/// `|multiplier|` below this counts as superattracting.
pub const SUPERATTRACTING_TOL: f64 = 1e-6;
/// Half-width of the band around `|multiplier| = 1` reported as indifferent.
pub const INDIFFERENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("exponents must satisfy l >= 2, m >= 2 and l*m > l + m (got l={l}, m={m})")]
    InvalidExponents { l: u32, m: u32 },
    #[error("lambda must be a nonzero finite complex number")]
    InvalidLambda,
    #[error("derivative undefined at pole")]
    DerivativeAtPole,
    #[error("maxIter must be at least 1")]
    ZeroIterations,
    #[error("seed orbit escapes or hits the pole; cycle search needs a bounded orbit")]
    UnboundedSeed,
    #[error("maxPeriod must be at least 1")]
    ZeroPeriod,
    #[error("real levels need l = m (got l={l}, m={m})")]
    UnequalExponents { l: u32, m: u32 },
    #[error("real levels need a real positive lambda")]
    NonPositiveLambda,
    #[error("real levels absent")]
    RealLevelsAbsent,
}

/// Exponent pair `(l, m)` of the pole and polynomial terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Exponents {
    l: u32,
    m: u32,
}

impl Exponents {
    pub fn new(l: u32, m: u32) -> Result<Self, DynamicsError> {
        let ok = l >= 2 && m >= 2 && u64::from(l) * u64::from(m) > u64::from(l) + u64::from(m);
        if ok && l <= 64 && m <= 64 {
            Ok(Exponents { l, m })
        } else {
            Err(DynamicsError::InvalidExponents { l, m })
        }
    }

    /// The symmetric family `l = m = n`.
    pub fn symmetric(n: u32) -> Result<Self, DynamicsError> {
        Exponents::new(n, n)
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn degree(&self) -> u32 {
        self.l + self.m
    }
}

/// A member of the family together with its derived constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapParams {
    lambda: Complex64,
    exp: Exponents,
    crit_radius: f64,
    escape_radius: f64,
}

impl MapParams {
    pub fn new(lambda: Complex64, exp: Exponents) -> Result<Self, DynamicsError> {
        if !cmath::is_finite(lambda) || (lambda.re == 0.0 && lambda.im == 0.0) {
            return Err(DynamicsError::InvalidLambda);
        }
        let (l, m) = (f64::from(exp.l), f64::from(exp.m));
        let d = f64::from(exp.degree());
        let abs = modulus(lambda);
        let crit_radius = libm::pow(abs * l / m, 1.0 / d);
        let escape_radius = escape_radius_for(abs, exp.m);
        Ok(MapParams { lambda, exp, crit_radius, escape_radius })
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn exponents(&self) -> Exponents {
        self.exp
    }

    pub fn degree(&self) -> u32 {
        self.exp.degree()
    }

    /// Common modulus `|lambda l / m|^{1/(l+m)}` of the free critical points.
    pub fn crit_radius(&self) -> f64 {
        self.crit_radius
    }

    pub fn escape_radius(&self) -> f64 {
        self.escape_radius
    }

    /// The same exponents with `lambda` replaced by its conjugate.
    pub fn conj(&self) -> Self {
        MapParams { lambda: self.lambda.conj(), ..*self }
    }

    /// `f(z)` for finite nonzero `z`; non-finite results propagate as IEEE values.
    #[inline]
    pub fn eval_finite(&self, z: Complex64) -> Complex64 {
        let inv = z.inv();
        powu(z, self.exp.m) + self.lambda * powu(inv, self.exp.l)
    }
}

/// `max(1, (2 + |lambda|)^{1/(m-1)})`.
fn escape_radius_for(abs_lambda: f64, m: u32) -> f64 {
    let r = libm::pow(2.0 + abs_lambda, 1.0 / f64::from(m - 1));
    if r > 1.0 {
        r
    } else {
        1.0
    }
}

/// `z^m + lambda / z^l` on the extended plane; `0` and `inf` both map to `inf`.
pub fn evaluate(map: &MapParams, z: ExtComplex) -> ExtComplex {
    match z {
        ExtComplex::Infinity => ExtComplex::Infinity,
        ExtComplex::Finite(w) if w.re == 0.0 && w.im == 0.0 => ExtComplex::Infinity,
        ExtComplex::Finite(w) => ExtComplex::from(map.eval_finite(w)),
    }
}

/// `m z^{m-1} - l lambda z^{-l-1}`.
pub fn derivative(map: &MapParams, z: ExtComplex) -> Result<Complex64, DynamicsError> {
    match z {
        ExtComplex::Finite(w) if w.re != 0.0 || w.im != 0.0 => Ok(derivative_finite(map, w)),
        _ => Err(DynamicsError::DerivativeAtPole),
    }
}

#[inline]
fn derivative_finite(map: &MapParams, z: Complex64) -> Complex64 {
    let (l, m) = (map.exp.l, map.exp.m);
    let inv = z.inv();
    powu(z, m - 1) * f64::from(m) - map.lambda * powu(inv, l + 1) * f64::from(l)
}

/// The `l+m` free critical points `omega_j = e^{2 pi i j/(l+m)} (lambda l/m)^{1/(l+m)}`,
/// `omega_0` on the principal branch.
pub fn critical_points(map: &MapParams) -> Vec<Complex64> {
    let d = map.exp.degree();
    let ratio = f64::from(map.exp.l) / f64::from(map.exp.m);
    let w0 = cmath::principal_root(map.lambda * ratio, d);
    (0..d).map(|j| w0 * cmath::cis(TAU * f64::from(j) / f64::from(d))).collect()
}

/// `v_j = f(omega_j)`.
pub fn critical_values(map: &MapParams) -> Vec<Complex64> {
    critical_points(map).into_iter().map(|w| map.eval_finite(w)).collect()
}

pub fn escape_radius(map: &MapParams) -> f64 {
    map.escape_radius
}

/// An orbit cut off at escape, at the pole, or at the iteration budget.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTrace {
    pub points: Vec<ExtComplex>,
    pub escape_index: Option<usize>,
    pub hit_pole: bool,
}

impl OrbitTrace {
    pub fn is_bounded(&self) -> bool {
        self.escape_index.is_none() && !self.hit_pole
    }

    pub fn last_finite(&self) -> Option<Complex64> {
        self.points.last().and_then(ExtComplex::finite)
    }
}

/// Iterate from `z0` for at most `max_iter` steps.
///
/// Stops at the first point of modulus above the escape radius (non-finite
/// values count as escaped) or at an exact hit of the pole `0`.
pub fn iterate(map: &MapParams, z0: ExtComplex, max_iter: usize) -> Result<OrbitTrace, DynamicsError> {
    if max_iter == 0 {
        return Err(DynamicsError::ZeroIterations);
    }
    let r = map.escape_radius;
    let mut points = Vec::new();
    let mut z = z0;
    for k in 0..=max_iter {
        points.push(z);
        let w = match z {
            ExtComplex::Infinity => {
                return Ok(OrbitTrace { points, escape_index: Some(k), hit_pole: false });
            }
            ExtComplex::Finite(w) => w,
        };
        if modulus(w) > r {
            return Ok(OrbitTrace { points, escape_index: Some(k), hit_pole: false });
        }
        if w.re == 0.0 && w.im == 0.0 {
            return Ok(OrbitTrace { points, escape_index: None, hit_pole: true });
        }
        if k < max_iter {
            z = ExtComplex::from(map.eval_finite(w));
        }
    }
    Ok(OrbitTrace { points, escape_index: None, hit_pole: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleKind {
    Superattracting,
    Attracting,
    Indifferent,
    Repelling,
}

impl CycleKind {
    pub fn from_multiplier(abs: f64) -> Self {
        if abs < SUPERATTRACTING_TOL {
            CycleKind::Superattracting
        } else if abs < 1.0 - INDIFFERENT_TOL {
            CycleKind::Attracting
        } else if abs <= 1.0 + INDIFFERENT_TOL {
            CycleKind::Indifferent
        } else {
            CycleKind::Repelling
        }
    }

    pub fn is_attracting(&self) -> bool {
        matches!(self, CycleKind::Superattracting | CycleKind::Attracting)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleReport {
    pub period: usize,
    pub representative: Complex64,
    pub multiplier: Complex64,
    pub kind: CycleKind,
    /// `|f^p(z) - z|` at the polished representative.
    pub residual: f64,
}

/// Outcome of a cycle search. `PolishDiverged` is the diagnostic for a
/// detected period whose Newton refinement did not converge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CycleSearch {
    Found(CycleReport),
    NoPeriod,
    PolishDiverged { period: usize },
}

impl CycleSearch {
    pub fn report(&self) -> Option<&CycleReport> {
        match self {
            CycleSearch::Found(r) => Some(r),
            _ => None,
        }
    }
}

/// Look for an eventually periodic tail of `seed` with period at most
/// `max_period`, then refine it by Newton's method on `f^p(z) - z`.
///
/// A period `p` is accepted when `|z_{k+p} - z_k| < tol` for every `k` in a
/// trailing window of `max(8, 2p)` indices. The smallest such `p` wins.
pub fn find_cycle(
    map: &MapParams,
    seed: &OrbitTrace,
    max_period: usize,
    tol: f64,
) -> Result<CycleSearch, DynamicsError> {
    if !seed.is_bounded() {
        return Err(DynamicsError::UnboundedSeed);
    }
    if max_period == 0 {
        return Err(DynamicsError::ZeroPeriod);
    }
    let pts: Vec<Complex64> = seed.points.iter().filter_map(ExtComplex::finite).collect();
    let n = pts.len();
    let period = (1..=max_period).find(|&p| {
        let window = core::cmp::max(8, 2 * p);
        if n < window + p {
            return false;
        }
        (n - window - p..n - p).all(|k| modulus(pts[k + p] - pts[k]) < tol)
    });
    let Some(p) = period else {
        return Ok(CycleSearch::NoPeriod);
    };
    Ok(match polish_cycle(map, pts[n - 1], p) {
        Some(report) => CycleSearch::Found(report),
        None => CycleSearch::PolishDiverged { period: p },
    })
}

/// `(f^p(z), (f^p)'(z))`, or `None` if the orbit meets the pole or overflows.
fn iterate_with_derivative(map: &MapParams, z: Complex64, p: usize) -> Option<(Complex64, Complex64)> {
    let mut w = z;
    let mut dw = Complex64::new(1.0, 0.0);
    for _ in 0..p {
        if w.re == 0.0 && w.im == 0.0 {
            return None;
        }
        dw *= derivative_finite(map, w);
        w = map.eval_finite(w);
        if !cmath::is_finite(w) || !cmath::is_finite(dw) {
            return None;
        }
    }
    Some((w, dw))
}

/// Newton refinement of a period-`p` point near `guess`.
///
/// Returns `None` if the residual does not reach [`CYCLE_POLISH_TOL`]
/// (scaled by `max(1, |z|)`) within 60 steps.
pub fn polish_cycle(map: &MapParams, guess: Complex64, p: usize) -> Option<CycleReport> {
    let mut z = guess;
    let mut best: Option<(f64, Complex64)> = None;
    for _ in 0..60 {
        let (fp, dfp) = iterate_with_derivative(map, z, p)?;
        let g = fp - z;
        let res = modulus(g);
        if best.is_none_or(|(r, _)| res < r) {
            best = Some((res, z));
        }
        if res <= CYCLE_POLISH_TOL * f64::max(1.0, modulus(z)) {
            break;
        }
        let dg = dfp - Complex64::new(1.0, 0.0);
        if modulus(dg) == 0.0 {
            break;
        }
        let step = g / dg;
        if !cmath::is_finite(step) {
            break;
        }
        z -= step;
    }
    let (res, z) = best?;
    if res > CYCLE_POLISH_TOL * f64::max(1.0, modulus(z)) {
        return None;
    }
    let (_, multiplier) = iterate_with_derivative(map, z, p)?;
    Some(CycleReport {
        period: p,
        representative: z,
        multiplier,
        kind: CycleKind::from_multiplier(modulus(multiplier)),
        residual: res,
    })
}

/// Real-slice levels: `q` is the largest positive fixed point and `p` the
/// preimage of `q` inside the critical radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealLevels {
    pub p: f64,
    pub q: f64,
}

/// Solve for the real-slice levels. Only the symmetric family `l = m` with
/// real positive `lambda` is supported.
pub fn real_levels(map: &MapParams) -> Result<RealLevels, DynamicsError> {
    let (l, m) = (map.exp.l, map.exp.m);
    if l != m {
        return Err(DynamicsError::UnequalExponents { l, m });
    }
    if map.lambda.im != 0.0 || map.lambda.re <= 0.0 {
        return Err(DynamicsError::NonPositiveLambda);
    }
    let lam = map.lambda.re;
    let n = i32::try_from(m).map_err(|_| DynamicsError::UnequalExponents { l, m })?;
    let f = |x: f64| libm::pow(x, f64::from(n)) + lam / libm::pow(x, f64::from(n));
    let df = |x: f64| f64::from(n) * (libm::pow(x, f64::from(n - 1)) - lam / libm::pow(x, f64::from(n + 1)));
    let c = map.crit_radius;
    let r = map.escape_radius;

    // f is convex on (0, inf) with f'(c) = 0, so f(x) - x has a single minimum
    // on [c, R] where f' = 1.
    let xmin = bisect(|x| df(x) - 1.0, c, r);
    if f(xmin) - xmin > 0.0 {
        return Err(DynamicsError::RealLevelsAbsent);
    }
    let q = bisect(|x| f(x) - x, xmin, r);
    let q = newton_polish(|x| (f(x) - x, df(x) - 1.0), q);
    if !(q > c) {
        return Err(DynamicsError::RealLevelsAbsent);
    }
    // f decreases from +inf to f(c) <= q on (0, c].
    let lo = c * 1e-12;
    let p = bisect(|x| q - f(x), lo, c);
    let p = newton_polish(|x| (f(x) - q, df(x)), p);
    if !(p > 0.0 && p < c) {
        return Err(DynamicsError::RealLevelsAbsent);
    }
    Ok(RealLevels { p, q })
}

/// Bisection for a sign change of `g` on `[a, b]` with `g(a) <= 0 <= g(b)`
/// (or the reverse), run to floating-point resolution.
fn bisect(g: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (mut lo, mut hi) = (a, b);
    let neg_at_lo = g(lo) <= 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (g(mid) <= 0.0) == neg_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// A few guarded Newton steps; keeps the input if a step makes things worse.
fn newton_polish(g: impl Fn(f64) -> (f64, f64), x0: f64) -> f64 {
    let mut x = x0;
    for _ in 0..4 {
        let (v, dv) = g(x);
        if dv == 0.0 || !dv.is_finite() {
            break;
        }
        let nx = x - v / dv;
        if libm::fabs(g(nx).0) < libm::fabs(v) {
            x = nx;
        } else {
            break;
        }
    }
    x
}
