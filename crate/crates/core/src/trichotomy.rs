//! Escape classification of the free critical orbit and the structure of the
//! positive real slice of the parameter plane.

use alloc::vec::Vec;

use num_complex::Complex64;
use thiserror::Error;

use crate::cmath::{self, modulus};
use crate::dynamics::{self, CycleReport, DynamicsError, Exponents, MapParams};
use crate::grid::{Bounds, FieldGrid, GridError, PayloadKind};

/// Longest cycle period searched by [`detect_hyperbolic`].
pub const HYPERBOLIC_MAX_PERIOD: usize = 64;
/// Endpoints and size of the geometric pre-scan in [`bracket_real`].
pub const BRACKET_SCAN_MIN: f64 = 1e-8;
pub const BRACKET_SCAN_MAX: f64 = 10.0;
pub const BRACKET_SCAN_POINTS: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrichotomyError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("invalid classifier config: {0}")]
    InvalidConfig(&'static str),
    #[error("not in non-escaping locus")]
    NotNonEscaping,
    #[error("bracketing needs l = m >= 3")]
    BracketExponents,
    #[error("bracketing tolerance must be positive and finite")]
    BracketTolerance,
    #[error("bracketing failed ({reason}); {} samples logged", log.len())]
    BracketingFailed { reason: &'static str, log: Vec<(f64, VerdictClass)> },
}

/// The classes of the trichotomy plus the two numerical outcomes. The
/// discriminants are the stable verdict codes used in grids and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(i32)]
pub enum VerdictClass {
    CantorSet = 1,
    CantorCircles = 2,
    SierpinskiEscaping = 3,
    NonEscaping = 4,
    Indeterminate = 5,
}

/// Grid code for a pixel where no map is defined (`lambda = 0`).
pub const CODE_UNDEFINED: i32 = 0;

impl VerdictClass {
    pub const ALL: [VerdictClass; 5] = [
        VerdictClass::CantorSet,
        VerdictClass::CantorCircles,
        VerdictClass::SierpinskiEscaping,
        VerdictClass::NonEscaping,
        VerdictClass::Indeterminate,
    ];

    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn from_code(code: i32) -> Option<Self> {
        VerdictClass::ALL.into_iter().find(|c| c.code() == code)
    }

    pub fn name(self) -> &'static str {
        match self {
            VerdictClass::CantorSet => "CantorSet",
            VerdictClass::CantorCircles => "CantorCircles",
            VerdictClass::SierpinskiEscaping => "SierpinskiEscaping",
            VerdictClass::NonEscaping => "NonEscaping",
            VerdictClass::Indeterminate => "Indeterminate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub class: VerdictClass,
    /// First orbit index above the escape radius.
    pub escape_index: Option<usize>,
    /// Index at which the orbit is deemed to be in the trap door.
    pub entry_index: Option<usize>,
    pub entry_modulus: Option<f64>,
    pub iterations_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierConfig {
    pub max_iter: usize,
    /// Relative half-width of the undecided band around the reference circle.
    pub ambiguity_band: f64,
    /// Scales the critical radius to give the reference circle that separates
    /// basin points from trap-door points.
    pub inner_radius_factor: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig { max_iter: 10_000, ambiguity_band: 0.05, inner_radius_factor: 1.0 }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<(), TrichotomyError> {
        if self.max_iter < 100 {
            return Err(TrichotomyError::InvalidConfig("maxIter must be at least 100"));
        }
        if !(self.ambiguity_band > 0.0 && self.ambiguity_band < 0.5) {
            return Err(TrichotomyError::InvalidConfig("ambiguityBand must lie in (0, 0.5)"));
        }
        if !(self.inner_radius_factor > 0.0 && self.inner_radius_factor.is_finite()) {
            return Err(TrichotomyError::InvalidConfig("innerRadiusFactor must be positive"));
        }
        Ok(())
    }

    pub fn with_max_iter(self, max_iter: usize) -> Self {
        ClassifierConfig { max_iter, ..self }
    }
}

/// Classify by the orbit of the critical value `f(omega_0)`.
pub fn classify(map: &MapParams, cfg: &ClassifierConfig) -> Verdict {
    classify_seeded(map, cfg, 0)
}

/// Classify by the orbit of `f(omega_j)`; `j` is taken modulo `l + m`.
pub fn classify_seeded(map: &MapParams, cfg: &ClassifierConfig, j: usize) -> Verdict {
    let pts = dynamics::critical_points(map);
    let v = map.eval_finite(pts[j % pts.len()]);
    classify_orbit_of(map, v, cfg)
}

/// Walk-back classification of the orbit of `v0`.
///
/// The orbit is scanned once, tracking the run of points above the upper
/// threshold that immediately precedes the current index, so no orbit is
/// stored.
pub fn classify_orbit_of(map: &MapParams, v0: Complex64, cfg: &ClassifierConfig) -> Verdict {
    let reference = map.crit_radius() * cfg.inner_radius_factor;
    let upper = reference * (1.0 + cfg.ambiguity_band);
    let lower = reference * (1.0 - cfg.ambiguity_band);
    let r = map.escape_radius();

    let mut run_start: Option<usize> = None;
    let mut before_run = 0.0;
    let mut prev = 0.0;
    let mut z = v0;
    for k in 0..=cfg.max_iter {
        let a = if cmath::is_finite(z) { modulus(z) } else { f64::INFINITY };
        if a > r {
            let (n, before) = match run_start {
                Some(s) => (s, before_run),
                None => (k, prev),
            };
            return decide(n, before, Some(k), k, lower);
        }
        if z.re == 0.0 && z.im == 0.0 {
            // The next point is infinity; this point is the trap door itself.
            return decide(k + 1, 0.0, Some(k + 1), k + 1, lower);
        }
        if a > upper {
            if run_start.is_none() {
                run_start = Some(k);
                before_run = prev;
            }
        } else {
            run_start = None;
        }
        prev = a;
        if k < cfg.max_iter {
            z = map.eval_finite(z);
        }
    }
    Verdict {
        class: VerdictClass::NonEscaping,
        escape_index: None,
        entry_index: None,
        entry_modulus: None,
        iterations_used: cfg.max_iter,
    }
}

/// `n` is the walked-back index and `before` the modulus of `orbit[n - 1]`.
fn decide(n: usize, before: f64, escape: Option<usize>, used: usize, lower: f64) -> Verdict {
    let (class, entry, entry_mod) = if n == 0 {
        (VerdictClass::CantorSet, None, None)
    } else if before < lower {
        let e = n - 1;
        let class = if e == 0 { VerdictClass::CantorCircles } else { VerdictClass::SierpinskiEscaping };
        (class, Some(e), Some(before))
    } else {
        (VerdictClass::Indeterminate, None, None)
    };
    Verdict { class, escape_index: escape, entry_index: entry, entry_modulus: entry_mod, iterations_used: used }
}

/// Verdict code at parameter `lambda`, [`CODE_UNDEFINED`] at `lambda = 0`.
pub fn verdict_code(exp: Exponents, lambda: Complex64, cfg: &ClassifierConfig) -> i32 {
    match MapParams::new(lambda, exp) {
        Ok(map) => classify(&map, cfg).class.code(),
        Err(_) => CODE_UNDEFINED,
    }
}

/// Fill one grid row (row 0 at `im_min`) with verdict codes.
pub fn classify_row(exp: Exponents, bounds: &Bounds, width: usize, height: usize, row: usize, cfg: &ClassifierConfig, out: &mut [i32]) {
    for (i, slot) in out.iter_mut().enumerate().take(width) {
        *slot = verdict_code(exp, bounds.pixel_center(i, row, width, height), cfg);
    }
}

/// Serial parameter-plane classification.
pub fn classify_grid(
    exp: Exponents,
    bounds: Bounds,
    width: usize,
    height: usize,
    cfg: &ClassifierConfig,
) -> Result<FieldGrid, TrichotomyError> {
    cfg.validate()?;
    let mut grid = FieldGrid::zeroed(width, height, bounds, PayloadKind::VerdictCode)?;
    for j in 0..height {
        classify_row(exp, &bounds, width, height, j, cfg, grid.row_mut(j));
    }
    Ok(grid)
}

/// Bracketed endpoints of the non-escaping window on the positive real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealBracket {
    pub lambda0: f64,
    pub lambda1: f64,
    pub tol: f64,
    /// Final bisection interval `(CantorCircles side, NonEscaping side)`.
    pub lambda0_interval: (f64, f64),
    /// Final bisection interval `(NonEscaping side, CantorSet side)`.
    pub lambda1_interval: (f64, f64),
}

fn real_class(exp: Exponents, x: f64, cfg: &ClassifierConfig) -> Result<VerdictClass, TrichotomyError> {
    let map = MapParams::new(Complex64::new(x, 0.0), exp)?;
    Ok(classify(&map, cfg).class)
}

/// Locate `lambda_0` (CantorCircles to NonEscaping) and `lambda_1`
/// (NonEscaping to CantorSet) by a geometric pre-scan followed by bisection.
pub fn bracket_real(exp: Exponents, tol: f64, cfg: &ClassifierConfig) -> Result<RealBracket, TrichotomyError> {
    if exp.l() != exp.m() || exp.m() < 3 {
        return Err(TrichotomyError::BracketExponents);
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(TrichotomyError::BracketTolerance);
    }
    cfg.validate()?;

    let ratio = libm::pow(BRACKET_SCAN_MAX / BRACKET_SCAN_MIN, 1.0 / (BRACKET_SCAN_POINTS - 1) as f64);
    let mut log = Vec::with_capacity(BRACKET_SCAN_POINTS);
    let mut x = BRACKET_SCAN_MIN;
    for _ in 0..BRACKET_SCAN_POINTS {
        log.push((x, real_class(exp, x, cfg)?));
        x *= ratio;
    }
    let fail = |reason, log: Vec<(f64, VerdictClass)>| Err(TrichotomyError::BracketingFailed { reason, log });

    let Some(last_cc) = log.iter().rposition(|s| s.1 == VerdictClass::CantorCircles) else {
        return fail("no CantorCircles sample", log);
    };
    let Some(first_cs) = log.iter().position(|s| s.1 == VerdictClass::CantorSet) else {
        return fail("no CantorSet sample", log);
    };
    let prefix_ok = log[..=last_cc].iter().all(|s| s.1 == VerdictClass::CantorCircles);
    let suffix_ok = log[first_cs..].iter().all(|s| s.1 == VerdictClass::CantorSet);
    let middle_ok = last_cc + 1 < first_cs
        && log[last_cc + 1..first_cs].iter().all(|s| s.1 == VerdictClass::NonEscaping);
    if !(prefix_ok && suffix_ok && middle_ok) {
        return fail("verdict pattern not monotone", log);
    }

    let a0 = (log[last_cc].0, log[last_cc + 1].0);
    let a1 = (log[first_cs - 1].0, log[first_cs].0);
    let i0 = bisect_classes(exp, cfg, a0, VerdictClass::CantorCircles, VerdictClass::NonEscaping, tol, &mut log)?;
    let i1 = bisect_classes(exp, cfg, a1, VerdictClass::NonEscaping, VerdictClass::CantorSet, tol, &mut log)?;
    Ok(RealBracket {
        lambda0: 0.5 * (i0.0 + i0.1),
        lambda1: 0.5 * (i1.0 + i1.1),
        tol,
        lambda0_interval: i0,
        lambda1_interval: i1,
    })
}

fn bisect_classes(
    exp: Exponents,
    cfg: &ClassifierConfig,
    (mut lo, mut hi): (f64, f64),
    below: VerdictClass,
    above: VerdictClass,
    tol: f64,
    log: &mut Vec<(f64, VerdictClass)>,
) -> Result<(f64, f64), TrichotomyError> {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let c = real_class(exp, mid, cfg)?;
        log.push((mid, c));
        if c == below {
            lo = mid;
        } else if c == above {
            hi = mid;
        } else {
            return Err(TrichotomyError::BracketingFailed {
                reason: "unexpected verdict inside bracket",
                log: core::mem::take(log),
            });
        }
    }
    Ok((lo, hi))
}

/// An attracting cycle on the free critical orbit, if one is detected.
pub fn detect_hyperbolic(map: &MapParams, cfg: &ClassifierConfig) -> Result<Option<CycleReport>, TrichotomyError> {
    if classify(map, cfg).class != VerdictClass::NonEscaping {
        return Err(TrichotomyError::NotNonEscaping);
    }
    let w0 = dynamics::critical_points(map)[0];
    let orbit = dynamics::iterate(map, crate::ExtComplex::Finite(w0), cfg.max_iter)?;
    if !orbit.is_bounded() {
        return Err(TrichotomyError::NotNonEscaping);
    }
    let search = dynamics::find_cycle(map, &orbit, HYPERBOLIC_MAX_PERIOD, dynamics::CYCLE_WINDOW_TOL)?;
    Ok(search.report().copied().filter(|r| r.kind.is_attracting()))
}
