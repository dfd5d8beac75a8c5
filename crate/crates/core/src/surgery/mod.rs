//! The piecewise quasiregular model map `F` of degree `l + m`.
//!
//! With `r1 = r0 + (1 - r0)/l` and `r2 = 1 - (1 - r0)/m`:
//!
//! | region              | `F(z)`                                        |
//! |---------------------|-----------------------------------------------|
//! | `|z| <= r0`         | `r0^l / z^l`                                  |
//! | `r0 < |z| <= r1`    | `(1 - l(|z| - r0)) e^{-il arg z}`             |
//! | `r1 < |z| < r2`     | `r0 G(rho(|z|) e^{i arg z})`                  |
//! | `r2 <= |z| < 1`     | `(1 - m(1 - |z|)) e^{im arg z}`               |
//! | `|z| >= 1`          | `z^m`                                         |
//!
//! where `rho` is the affine map of `[r1, r2]` onto `[eps, 1]` and `G` is the
//! cellwise map of the normalized annulus onto the unit disk built in
//! [`complex`].

pub mod complex;
pub mod patch;
mod verify;

use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
use thiserror::Error;

pub use complex::{reduce_to_sector, CellComplex, ComplexConfig, SourceCell};
pub use patch::{Quad, Side};
pub use verify::{QuasiregularReport, DEGREE_TARGETS, MIN_SAMPLE_BUDGET, PASS_ORBITS, PASS_STEPS};

use crate::cantor::AnnulusModel;
use crate::cmath::{self, cis, modulus, powu, ExtComplex};
use crate::dynamics::Exponents;
use crate::grid::{Bounds, FieldGrid, GridError, PayloadKind, BOUNDED};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurgeryError {
    #[error("r0 must lie in (0, 1) (got {0})")]
    InvalidRadius(f64),
    #[error("invalid cell complex: {0}")]
    InvalidComplex(&'static str),
    #[error("sample budget must be at least {min} (got {got})")]
    SampleBudget { got: usize, min: usize },
    #[error("resolution must be at least 16 (got {0})")]
    Resolution(usize),
    #[error("cell inversion failed")]
    CellInversion,
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Disk,
    InnerAnnulus,
    Middle,
    OuterAnnulus,
    Exterior,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurgeryConfig {
    pub exp: Exponents,
    pub r0: f64,
    pub complex: ComplexConfig,
}

impl SurgeryConfig {
    pub fn new(exp: Exponents, r0: f64) -> Self {
        SurgeryConfig { exp, r0, complex: ComplexConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurgeryMap {
    cfg: SurgeryConfig,
    annulus: AnnulusModel,
    complex: CellComplex,
}

impl SurgeryMap {
    pub fn new(cfg: SurgeryConfig) -> Result<Self, SurgeryError> {
        let annulus = AnnulusModel::new(cfg.exp, cfg.r0).map_err(|_| SurgeryError::InvalidRadius(cfg.r0))?;
        let complex = CellComplex::build(cfg.exp, cfg.complex)?;
        Ok(SurgeryMap { cfg, annulus, complex })
    }

    pub fn build(exp: Exponents, r0: f64) -> Result<Self, SurgeryError> {
        SurgeryMap::new(SurgeryConfig::new(exp, r0))
    }

    pub fn config(&self) -> &SurgeryConfig {
        &self.cfg
    }

    pub fn complex(&self) -> &CellComplex {
        &self.complex
    }

    pub fn exponents(&self) -> Exponents {
        self.cfg.exp
    }

    pub fn degree(&self) -> usize {
        self.cfg.exp.degree() as usize
    }

    pub fn r0(&self) -> f64 {
        self.cfg.r0
    }

    pub fn r1(&self) -> f64 {
        self.annulus.r1()
    }

    pub fn r2(&self) -> f64 {
        self.annulus.r2()
    }

    pub fn region(&self, z: Complex64) -> Region {
        let r = modulus(z);
        if r <= self.r0() {
            Region::Disk
        } else if r <= self.r1() {
            Region::InnerAnnulus
        } else if r < self.r2() {
            Region::Middle
        } else if r < 1.0 {
            Region::OuterAnnulus
        } else {
            Region::Exterior
        }
    }

    /// Normalized radius of a point of the middle annulus.
    fn normalize_radius(&self, r: f64) -> f64 {
        let eps = self.cfg.complex.epsilon;
        eps + (1.0 - eps) * (r - self.r1()) / (self.r2() - self.r1())
    }

    fn denormalize_radius(&self, rho: f64) -> f64 {
        let eps = self.cfg.complex.epsilon;
        self.r1() + (rho - eps) * (self.r2() - self.r1()) / (1.0 - eps)
    }

    /// Rotation `e^{2pi i m j/d}` with the exponent reduced mod `d`.
    fn twist(&self, j: usize) -> Complex64 {
        let d = self.degree();
        cis(TAU * ((self.cfg.exp.m() as usize * j) % d) as f64 / d as f64)
    }

    /// The formula of `region` applied to `z`, whether or not `z` lies in
    /// it. The middle formula needs `z != 0` and fails only if a cell
    /// inversion does.
    pub fn eval_in(&self, region: Region, z: Complex64) -> Option<Complex64> {
        let (l, m) = (self.cfg.exp.l(), self.cfg.exp.m());
        let r = modulus(z);
        Some(match region {
            Region::Disk => powu(Complex64::new(self.r0(), 0.0) / z, l),
            Region::InnerAnnulus => powu((z / r).conj(), l) * self.annulus.g0_inv(r),
            Region::OuterAnnulus => powu(z / r, m) * self.annulus.g1_inv(r),
            Region::Exterior => powu(z, m),
            Region::Middle => {
                let zn = z / r * self.normalize_radius(r);
                let (j, z0) = reduce_to_sector(zn, self.degree());
                self.complex.map_sector(z0)? * self.r0() * self.twist(j)
            }
        })
    }

    pub fn try_eval(&self, z: ExtComplex) -> Result<ExtComplex, SurgeryError> {
        let Some(z) = z.finite() else {
            return Ok(ExtComplex::Infinity);
        };
        if z == Complex64::new(0.0, 0.0) {
            return Ok(ExtComplex::Infinity);
        }
        self.eval_in(self.region(z), z).map(ExtComplex::from).ok_or(SurgeryError::CellInversion)
    }

    /// `F(z)`. A failed cell inversion, which [`SurgeryMap::verify`] counts,
    /// yields NaN components.
    pub fn eval(&self, z: ExtComplex) -> ExtComplex {
        self.try_eval(z).unwrap_or(ExtComplex::Finite(Complex64::new(f64::NAN, f64::NAN)))
    }

    pub fn eval_finite(&self, z: Complex64) -> ExtComplex {
        self.eval(ExtComplex::Finite(z))
    }

    /// All solutions of `F(z) = w`, each branch point listed once per
    /// sheet meeting it.
    pub fn preimages(&self, w: ExtComplex) -> Result<Vec<ExtComplex>, SurgeryError> {
        let Some(w) = w.finite() else {
            return Ok(alloc::vec![ExtComplex::Finite(Complex64::new(0.0, 0.0)), ExtComplex::Infinity]);
        };
        let (l, m) = (self.cfg.exp.l(), self.cfg.exp.m());
        let rho = modulus(w);
        let theta = cmath::arg(w);
        let mut out = Vec::with_capacity(self.degree());
        if rho > 1.0 {
            let inner = self.r0() / libm::pow(rho, 1.0 / f64::from(l));
            for k in 0..l {
                out.push(cmath::from_polar(inner, -(theta + TAU * f64::from(k)) / f64::from(l)));
            }
            let outer = libm::pow(rho, 1.0 / f64::from(m));
            for k in 0..m {
                out.push(cmath::from_polar(outer, (theta + TAU * f64::from(k)) / f64::from(m)));
            }
        } else if rho >= self.r0() {
            for k in 0..l {
                out.push(cmath::from_polar(self.annulus.g0(rho), -(theta + TAU * f64::from(k)) / f64::from(l)));
            }
            for k in 0..m {
                out.push(cmath::from_polar(self.annulus.g1(rho), (theta + TAU * f64::from(k)) / f64::from(m)));
            }
        } else {
            let d = self.degree();
            let wn = w / self.r0();
            for j in 0..d {
                let z0 = self.complex.preimage_sector(wn * self.twist(j).conj()).ok_or(SurgeryError::CellInversion)?;
                let zn = z0 * cis(TAU * j as f64 / d as f64);
                let a = modulus(zn);
                out.push(zn / a * self.denormalize_radius(a));
            }
        }
        Ok(out.into_iter().map(ExtComplex::Finite).collect())
    }

    /// Escape depth for `F`: the first `k` with `|F^k(z)| >= 1`, or
    /// [`BOUNDED`] if there is none up to `max_iter`.
    pub fn escape_depth(&self, z: Complex64, max_iter: usize) -> i32 {
        let mut w = ExtComplex::Finite(z);
        for k in 0..=max_iter {
            if !(w.modulus() < 1.0) {
                return k as i32;
            }
            if k < max_iter {
                w = self.eval(w);
            }
        }
        BOUNDED
    }

    /// Escape-depth grid of `F` over `bounds`.
    pub fn attractor_render(&self, bounds: Bounds, width: usize, height: usize, max_iter: usize) -> Result<FieldGrid, SurgeryError> {
        let res = width.min(height);
        if res < 16 {
            return Err(SurgeryError::Resolution(res));
        }
        Ok(FieldGrid::from_fn(width, height, bounds, PayloadKind::EscapeDepth, |z| self.escape_depth(z, max_iter))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::CantorIfs;

    fn map(l: u32, m: u32) -> SurgeryMap {
        SurgeryMap::build(Exponents::new(l, m).unwrap(), 0.5).unwrap()
    }

    fn fin(z: ExtComplex) -> Complex64 {
        z.finite().unwrap()
    }

    #[test]
    fn special_values() {
        let f = map(2, 3);
        assert!(f.eval_finite(Complex64::new(0.0, 0.0)).is_infinite());
        assert!(f.eval(ExtComplex::Infinity).is_infinite());
        let z = cis(0.7);
        assert_eq!(fin(f.eval_finite(z)), powu(z, 3));
    }

    #[test]
    fn inner_circle_of_middle_annulus() {
        let f = map(2, 3);
        for k in 0..100 {
            let t = TAU * k as f64 / 100.0;
            let z = cmath::from_polar(f.r1(), t);
            let want = cis(-2.0 * t) * 0.5;
            assert!(modulus(fin(f.eval_finite(z)) - want) < 1e-12);
            let mid = f.eval_in(Region::Middle, z).unwrap();
            assert!(modulus(mid - want) < 1e-12);
        }
    }

    #[test]
    fn middle_lands_in_small_disk() {
        let f = map(3, 3);
        for k in 0..200 {
            let r = f.r1() + (f.r2() - f.r1()) * (k as f64 + 0.5) / 200.0;
            let w = fin(f.eval_finite(cmath::from_polar(r, 0.37 * k as f64)));
            assert!(modulus(w) <= f.r0() + 1e-12);
        }
    }

    #[test]
    fn preimages_solve_equation() {
        let f = map(2, 3);
        for w in [Complex64::new(0.1, 0.2), Complex64::new(0.6, -0.3), Complex64::new(-2.0, 1.0)] {
            let pts = f.preimages(ExtComplex::Finite(w)).unwrap();
            assert_eq!(pts.len(), 5);
            for p in pts {
                assert!(modulus(fin(f.eval(p)) - w) < 1e-10);
            }
        }
    }

    #[test]
    fn middle_escapes_in_two_steps() {
        let f = map(2, 3);
        for k in 0..50 {
            let r = f.r1() + (f.r2() - f.r1()) * (k as f64 + 0.5) / 50.0;
            let z = cmath::from_polar(r, 0.1 * k as f64);
            let dep = f.escape_depth(z, 50);
            assert_eq!(dep, 2);
        }
        assert_eq!(f.escape_depth(Complex64::new(1.5, 0.0), 10), 0);
    }

    #[test]
    fn render_radial_levels() {
        let f = map(2, 3);
        let b = Bounds::new(-1.1, 1.1, -1.1, 1.1).unwrap();
        let g = f.attractor_render(b, 101, 101, 40).unwrap();
        let ifs = CantorIfs::new(f.exponents());
        let px = g.pixel_size().0;
        let j = 50;
        for k in 1..4u32 {
            let lev = ifs.level_set(k).unwrap();
            for i in 0..101 {
                let x = g.pixel_center(i, j).re;
                let dep = g.get(i, j);
                if x >= f.r0() && x < 1.0 && (dep == BOUNDED || dep >= k as i32 + 2) {
                    let u = (x - f.r0()) / (1.0 - f.r0());
                    assert!(lev.contains_approx(u, px / (1.0 - f.r0())), "x={x} k={k}");
                }
            }
        }
        assert!(f.attractor_render(b, 8, 8, 10).is_err());
    }
}
