//! The polygonal cell complex of the normalized middle annulus
//! `eps <= |z| <= 1` and its cellwise map onto the closed unit disk.
//!
//! One fundamental sector `0 <= arg z <= 2pi/d`, `d = l + m`, carries:
//!
//! * the star chain `st_0..st_l` at angles `2pi t/(l d)` on the two star
//!   edges running from the tip at angle 0 to the notch at `pi/d` and on to
//!   the tip at `2pi/d`;
//! * the free chain `f_0..f_m` at angles `2pi s/(m d)` on the two edges from
//!   the same tips to the apex at `pi/d`;
//! * inner quads `D_t` between the circle `|z| = eps` and the star chain,
//!   outer quads `E_s` between the free chain and the unit circle, both cut
//!   by radial spokes, and the petal between the two chains.
//!
//! The target is a regular `d`-gon `B` with vertices `z_k` at angles
//! `2pi k/d` and the quads `G_n` between its sides and the unit circle. `E_s`
//! maps onto `G_s`, `D_t` onto `G_{-(t+1)}` with both parameters reversed,
//! and the petal onto `B` with `f_k -> z_k` and `st_k -> z_{-k}`. The unit
//! circle then maps by `z^m` and the circle `|z| = eps` by
//! `eps e^{it} -> e^{-ilt}`. Every other sector is a rotation, with
//! `F(e^{2pi i/d} z) = e^{2pi i m/d} F(z)`.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;

use super::patch::{barycentric, triangle_map, Quad, Side};
use super::SurgeryError;
use crate::cmath::{self, arg_positive, cis, from_polar, modulus};
use crate::dynamics::Exponents;

/// Shape of the normalized complex. Radii are in the normalized annulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexConfig {
    /// Inner radius of the normalized annulus.
    pub epsilon: f64,
    /// Star notch radius, reached halfway between two tips.
    pub notch_radius: f64,
    /// Star tip radius; the tips are the branch points.
    pub tip_radius: f64,
    /// Radius of the free chain halfway between two tips.
    pub apex_radius: f64,
    /// Circumradius of the target polygon `B`.
    pub target_radius: f64,
}

impl Default for ComplexConfig {
    fn default() -> Self {
        ComplexConfig { epsilon: 0.3, notch_radius: 0.45, tip_radius: 0.6, apex_radius: 0.85, target_radius: 0.5 }
    }
}

impl ComplexConfig {
    pub fn validate(&self) -> Result<(), SurgeryError> {
        let c = self;
        let ordered = 0.0 < c.epsilon
            && c.epsilon < c.notch_radius
            && c.notch_radius < c.tip_radius
            && c.tip_radius < c.apex_radius
            && c.apex_radius < 1.0;
        if !ordered {
            return Err(SurgeryError::InvalidComplex("need 0 < epsilon < notch < tip < apex < 1"));
        }
        if !(c.target_radius > 0.0 && c.target_radius < 1.0) {
            return Err(SurgeryError::InvalidComplex("target radius must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// A cell of the fundamental sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceCell {
    Inner(usize),
    /// Petal fan triangle `(center, p_k, p_{k+1})`.
    Petal(usize),
    Outer(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellComplex {
    exp: Exponents,
    cfg: ComplexConfig,
    star: Vec<Complex64>,
    free: Vec<Complex64>,
    inner: Vec<Quad>,
    outer: Vec<Quad>,
    /// Counterclockwise: `f_0..f_m` then `st_{l-1}..st_1`.
    petal: Vec<Complex64>,
    petal_center: Complex64,
    target: Vec<Complex64>,
    target_quads: Vec<Quad>,
}

/// Radius along the ray at angle `phi` of the line through `p` and `q`.
fn ray_hit(p: Complex64, q: Complex64, phi: f64) -> f64 {
    let e = q - p;
    let dir = cis(phi);
    let cross = |a: Complex64, b: Complex64| a.re * b.im - a.im * b.re;
    cross(p, e) / cross(dir, e)
}

/// Point at angle `phi` on the two-edge path from the tip at angle 0
/// through `middle` at half the sector to the tip at `sector`.
fn tent(phi: f64, sector: f64, tip: f64, middle: f64) -> Complex64 {
    let half = sector / 2.0;
    let (a, b, c) = (from_polar(tip, 0.0), from_polar(middle, half), from_polar(tip, sector));
    let r = if phi <= half { ray_hit(a, b, phi) } else { ray_hit(b, c, phi) };
    from_polar(r, phi)
}

fn orient(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    (b - a).re * (c - a).im - (b - a).im * (c - a).re
}

impl CellComplex {
    pub fn build(exp: Exponents, cfg: ComplexConfig) -> Result<Self, SurgeryError> {
        cfg.validate()?;
        let (l, m) = (exp.l() as usize, exp.m() as usize);
        let d = l + m;
        let sector = TAU / d as f64;
        let star: Vec<Complex64> = (0..=l)
            .map(|t| {
                let phi = sector * t as f64 / l as f64;
                tent(phi, sector, cfg.tip_radius, cfg.notch_radius)
            })
            .collect();
        let free: Vec<Complex64> = (0..=m)
            .map(|s| {
                let phi = sector * s as f64 / m as f64;
                tent(phi, sector, cfg.tip_radius, cfg.apex_radius)
            })
            .collect();
        let inner: Vec<Quad> = (0..l)
            .map(|t| {
                let (a0, a1) = (sector * t as f64 / l as f64, sector * (t + 1) as f64 / l as f64);
                Quad::new(Side::Arc { radius: cfg.epsilon, t0: a0, t1: a1 }, Side::Segment { a: star[t], b: star[t + 1] })
            })
            .collect();
        let outer: Vec<Quad> = (0..m)
            .map(|s| {
                let (b0, b1) = (sector * s as f64 / m as f64, sector * (s + 1) as f64 / m as f64);
                Quad::new(Side::Segment { a: free[s], b: free[s + 1] }, Side::Arc { radius: 1.0, t0: b0, t1: b1 })
            })
            .collect();
        let mut petal: Vec<Complex64> = free.clone();
        petal.extend(star[1..l].iter().rev());
        let petal_center = petal.iter().sum::<Complex64>() / d as f64;
        for k in 0..d {
            let (a, b, c) = (petal[k], petal[(k + 1) % d], petal[(k + 2) % d]);
            if orient(a, b, c) <= 0.0 {
                return Err(SurgeryError::InvalidComplex("petal polygon is not strictly convex"));
            }
        }
        let target: Vec<Complex64> = (0..d).map(|k| from_polar(cfg.target_radius, sector * k as f64)).collect();
        let target_quads: Vec<Quad> = (0..d)
            .map(|n| {
                let (t0, t1) = (sector * n as f64, sector * (n + 1) as f64);
                Quad::new(Side::Segment { a: target[n], b: target[(n + 1) % d] }, Side::Arc { radius: 1.0, t0, t1 })
            })
            .collect();
        Ok(CellComplex { exp, cfg, star, free, inner, outer, petal, petal_center, target, target_quads })
    }

    pub fn exponents(&self) -> Exponents {
        self.exp
    }

    pub fn config(&self) -> &ComplexConfig {
        &self.cfg
    }

    pub fn degree(&self) -> usize {
        self.exp.degree() as usize
    }

    pub fn sector_angle(&self) -> f64 {
        TAU / self.degree() as f64
    }

    /// Star chain of the fundamental sector, `st_0..st_l`.
    pub fn star_chain(&self) -> &[Complex64] {
        &self.star
    }

    /// Free chain of the fundamental sector, `f_0..f_m`.
    pub fn free_chain(&self) -> &[Complex64] {
        &self.free
    }

    /// Petal of the fundamental sector, counterclockwise from the tip at 0.
    pub fn petal(&self) -> &[Complex64] {
        &self.petal
    }

    pub fn inner_cells(&self) -> &[Quad] {
        &self.inner
    }

    pub fn outer_cells(&self) -> &[Quad] {
        &self.outer
    }

    /// Vertices `z_k` of the target polygon `B`.
    pub fn target_polygon(&self) -> &[Complex64] {
        &self.target
    }

    /// The target quads `G_0..G_{d-1}`.
    pub fn target_quads(&self) -> &[Quad] {
        &self.target_quads
    }

    /// Target quad index of the sector-0 inner cell `D_t`.
    pub fn inner_target(&self, t: usize) -> usize {
        self.degree() - 1 - t
    }

    fn rotations(&self) -> impl Iterator<Item = f64> + '_ {
        let a = self.sector_angle();
        (0..self.degree()).map(move |j| a * j as f64)
    }

    /// All star vertices, `l` per sector starting with each tip.
    pub fn star_vertices(&self) -> Vec<Complex64> {
        let l = self.star.len() - 1;
        self.rotations().flat_map(|a| self.star[..l].iter().map(move |&p| p * cis(a))).collect()
    }

    /// The `l + m` outer star vertices, which are the branch points.
    pub fn tips(&self) -> Vec<Complex64> {
        self.rotations().map(|a| self.star[0] * cis(a)).collect()
    }

    pub fn inner_quads(&self) -> Vec<Quad> {
        self.rotations().flat_map(|a| self.inner.iter().map(move |q| q.rotated(a))).collect()
    }

    pub fn outer_quads(&self) -> Vec<Quad> {
        self.rotations().flat_map(|a| self.outer.iter().map(move |q| q.rotated(a))).collect()
    }

    pub fn petal_polygons(&self) -> Vec<Vec<Complex64>> {
        self.rotations().map(|a| self.petal.iter().map(|&p| p * cis(a)).collect()).collect()
    }

    fn star_radius(&self, phi: f64) -> (usize, f64) {
        let l = self.inner.len();
        let step = self.sector_angle() / l as f64;
        let t = ((phi / step) as usize).min(l - 1);
        (t, ray_hit(self.star[t], self.star[t + 1], phi))
    }

    fn free_radius(&self, phi: f64) -> (usize, f64) {
        let m = self.outer.len();
        let step = self.sector_angle() / m as f64;
        let s = ((phi / step) as usize).min(m - 1);
        (s, ray_hit(self.free[s], self.free[s + 1], phi))
    }

    fn petal_triangle(&self, z: Complex64) -> usize {
        let d = self.degree();
        let score = |k: usize| {
            let (s, t) = barycentric([self.petal_center, self.petal[k], self.petal[(k + 1) % d]], z);
            s.min(t).min(1.0 - s - t)
        };
        (0..d).max_by(|&a, &b| score(a).total_cmp(&score(b))).unwrap_or(0)
    }

    /// The cell of the fundamental sector containing `z`.
    pub fn locate(&self, z: Complex64) -> SourceCell {
        let phi = arg_positive(z).min(self.sector_angle());
        let r = modulus(z);
        let (t, sr) = self.star_radius(phi);
        if r <= sr {
            return SourceCell::Inner(t);
        }
        let (s, fr) = self.free_radius(phi);
        if r <= fr {
            return SourceCell::Petal(self.petal_triangle(z));
        }
        SourceCell::Outer(s)
    }

    fn polar_guess(&self, q: &Quad, z: Complex64) -> (f64, f64) {
        let c = q.corners();
        let (a0, a1) = (arg_positive(c[0]), arg_positive(c[1]));
        let a1 = if a1 < a0 { a1 + TAU } else { a1 };
        let mut phi = arg_positive(z);
        if phi < a0 - 1.0 {
            phi += TAU;
        }
        let u = ((phi - a0) / (a1 - a0)).clamp(0.0, 1.0);
        let lo = modulus(q.bottom.point(u));
        let hi = modulus(q.top.point(u));
        let v = ((modulus(z) - lo) / (hi - lo)).clamp(0.0, 1.0);
        (u, v)
    }

    /// Cell parameter of `z` in the fundamental-sector quad `q`.
    pub fn quad_param(&self, q: &Quad, z: Complex64) -> Option<(f64, f64)> {
        q.invert_from(z, self.polar_guess(q, z))
    }

    /// The normalized map on the fundamental sector; `None` if a cell
    /// inversion fails.
    pub fn map_sector(&self, z: Complex64) -> Option<Complex64> {
        let d = self.degree();
        match self.locate(z) {
            SourceCell::Inner(t) => {
                let (u, v) = self.quad_param(&self.inner[t], z)?;
                Some(self.target_quads[self.inner_target(t)].eval(1.0 - u, 1.0 - v))
            }
            SourceCell::Outer(s) => {
                let (u, v) = self.quad_param(&self.outer[s], z)?;
                Some(self.target_quads[s].eval(u, v))
            }
            SourceCell::Petal(k) => {
                let src = [self.petal_center, self.petal[k], self.petal[(k + 1) % d]];
                let dst = [Complex64::new(0.0, 0.0), self.target[k], self.target[(k + 1) % d]];
                Some(triangle_map(src, dst, z))
            }
        }
    }

    /// The unique point of the fundamental sector mapped to `w`, for
    /// `|w| <= 1`; `None` if a cell inversion fails.
    pub fn preimage_sector(&self, w: Complex64) -> Option<Complex64> {
        let d = self.degree();
        let m = self.outer.len();
        let k = ((arg_positive(w) / self.sector_angle()) as usize).min(d - 1);
        let tri = [Complex64::new(0.0, 0.0), self.target[k], self.target[(k + 1) % d]];
        let (s, t) = barycentric(tri, w);
        if s + t <= 1.0 {
            let src = [self.petal_center, self.petal[k], self.petal[(k + 1) % d]];
            return Some(triangle_map(tri, src, w));
        }
        let (u, v) = self.quad_param(&self.target_quads[k], w)?;
        if k < m {
            Some(self.outer[k].eval(u, v))
        } else {
            Some(self.inner[d - 1 - k].eval(1.0 - u, 1.0 - v))
        }
    }

    /// Vertex and edge lists of the full complex, arcs replaced by chords
    /// between consecutive spoke feet.
    pub fn mesh(&self) -> (Vec<Complex64>, Vec<(usize, usize)>) {
        let mut verts: Vec<Complex64> = Vec::new();
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let id = |verts: &mut Vec<Complex64>, p: Complex64| {
            if let Some(i) = verts.iter().position(|&q| modulus(q - p) < 1e-12) {
                i
            } else {
                verts.push(p);
                verts.len() - 1
            }
        };
        let add = |verts: &mut Vec<Complex64>, edges: &mut Vec<(usize, usize)>, a: Complex64, b: Complex64| {
            let (i, j) = (id(verts, a), id(verts, b));
            let e = (i.min(j), i.max(j));
            if !edges.contains(&e) {
                edges.push(e);
            }
        };
        for q in self.inner_quads().iter().chain(self.outer_quads().iter()) {
            let c = q.corners();
            for k in 0..4 {
                add(&mut verts, &mut edges, c[k], c[(k + 1) % 4]);
            }
        }
        for p in self.petal_polygons() {
            for k in 0..p.len() {
                add(&mut verts, &mut edges, p[k], p[(k + 1) % p.len()]);
            }
        }
        (verts, edges)
    }
}

/// Rotate `z` into the fundamental sector: `z = e^{2pi i j/d} z0`.
pub fn reduce_to_sector(z: Complex64, d: usize) -> (usize, Complex64) {
    let sector = TAU / d as f64;
    let j = ((arg_positive(z) / sector) as usize).min(d - 1);
    (j, z * cmath::cis(-sector * j as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complex(l: u32, m: u32) -> CellComplex {
        CellComplex::build(Exponents::new(l, m).unwrap(), ComplexConfig::default()).unwrap()
    }

    #[test]
    fn cell_counts() {
        let c = complex(2, 3);
        assert_eq!(c.outer_quads().len(), 15);
        assert_eq!(c.inner_quads().len(), 10);
        assert_eq!(c.petal_polygons().len(), 5);
        assert_eq!(c.star_vertices().len(), 10);
        let c = complex(3, 3);
        assert_eq!((c.outer_quads().len(), c.inner_quads().len(), c.petal_polygons().len()), (18, 18, 6));
    }

    #[test]
    fn sector_map_round_trips() {
        for (l, m) in [(2, 3), (3, 3), (2, 4), (4, 5)] {
            let c = complex(l, m);
            let d = (l + m) as usize;
            let sector = c.sector_angle();
            for i in 1..40 {
                for k in 1..40 {
                    let r = c.config().epsilon + (1.0 - c.config().epsilon) * i as f64 / 40.0;
                    let z = from_polar(r, sector * k as f64 / 40.0);
                    let w = c.map_sector(z).unwrap();
                    assert!(modulus(w) <= 1.0 + 1e-12);
                    let back = c.preimage_sector(w).unwrap();
                    assert!(modulus(back - z) < 1e-9, "({l},{m}) {z} -> {w} -> {back}");
                }
            }
            assert_eq!(c.petal().len(), d);
        }
    }

    #[test]
    fn boundary_circles() {
        let c = complex(2, 3);
        let eps = c.config().epsilon;
        for k in 0..50 {
            let t = c.sector_angle() * k as f64 / 50.0;
            let w = c.map_sector(from_polar(eps, t)).unwrap();
            assert!(modulus(w - cis(-2.0 * t)) < 1e-12);
            let w = c.map_sector(from_polar(1.0, t)).unwrap();
            assert!(modulus(w - cis(3.0 * t)) < 1e-12);
        }
    }

    #[test]
    fn tips_map_to_polygon_vertex() {
        let c = complex(2, 3);
        let w = c.map_sector(c.star_chain()[0]).unwrap();
        assert!(modulus(w - c.target_polygon()[0]) < 1e-12);
        let w = c.map_sector(c.star_chain()[1]).unwrap();
        assert!(modulus(w - c.target_polygon()[4]) < 1e-12);
    }

    #[test]
    fn bad_config_rejected() {
        let exp = Exponents::new(2, 3).unwrap();
        let cfg = ComplexConfig { tip_radius: 0.95, ..ComplexConfig::default() };
        assert!(CellComplex::build(exp, cfg).is_err());
        let cfg = ComplexConfig { epsilon: 0.5, ..ComplexConfig::default() };
        assert!(CellComplex::build(exp, cfg).is_err());
    }

    #[test]
    fn mesh_is_consistent() {
        let c = complex(2, 3);
        let (v, e) = c.mesh();
        assert!(e.iter().all(|&(a, b)| a < v.len() && b < v.len() && a != b));
        // Euler characteristic of the closed annulus: V - E + F = 0.
        let faces = 15 + 10 + 5;
        assert_eq!(v.len() as i64 - e.len() as i64 + faces, 0);
    }
}
