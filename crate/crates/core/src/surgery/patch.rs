//! Quadrilateral cells with two straight spokes and two opposite sides that
//! are either segments or circular arcs about the origin, parameterized over
//! the unit square by the ruled (transfinite) patch
//! `S(u, v) = (1 - v) bottom(u) + v top(u)`.
//!
//! Sides are parameterized linearly (segments in arclength, arcs in angle),
//! so two patches sharing a side agree on it.

use num_complex::Complex64;

use crate::cmath::{self, modulus};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Side {
    Segment { a: Complex64, b: Complex64 },
    /// `radius * e^{i t}` for `t` running linearly from `t0` to `t1`.
    Arc { radius: f64, t0: f64, t1: f64 },
}

impl Side {
    pub fn point(&self, u: f64) -> Complex64 {
        match *self {
            Side::Segment { a, b } => a + (b - a) * u,
            Side::Arc { radius, t0, t1 } => cmath::from_polar(radius, t0 + (t1 - t0) * u),
        }
    }

    pub fn tangent(&self, u: f64) -> Complex64 {
        match *self {
            Side::Segment { a, b } => b - a,
            Side::Arc { radius, t0, t1 } => {
                let t = t0 + (t1 - t0) * u;
                cmath::from_polar(radius * (t1 - t0), t) * Complex64::new(0.0, 1.0)
            }
        }
    }

    pub fn start(&self) -> Complex64 {
        self.point(0.0)
    }

    pub fn end(&self) -> Complex64 {
        self.point(1.0)
    }

    /// The side rotated about the origin by `angle`.
    pub fn rotated(&self, angle: f64) -> Side {
        match *self {
            Side::Segment { a, b } => {
                let r = cmath::cis(angle);
                Side::Segment { a: a * r, b: b * r }
            }
            Side::Arc { radius, t0, t1 } => Side::Arc { radius, t0: t0 + angle, t1: t1 + angle },
        }
    }
}

/// A cell with `u` running along `bottom` and `top`, `v` from bottom to top.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub bottom: Side,
    pub top: Side,
}

/// Slack on `[0, 1]^2` when accepting an inverted parameter.
pub const PARAM_SLACK: f64 = 1e-9;

impl Quad {
    pub fn new(bottom: Side, top: Side) -> Self {
        Quad { bottom, top }
    }

    pub fn eval(&self, u: f64, v: f64) -> Complex64 {
        self.bottom.point(u) * (1.0 - v) + self.top.point(u) * v
    }

    /// `(dS/du, dS/dv)`.
    pub fn jacobian(&self, u: f64, v: f64) -> (Complex64, Complex64) {
        let su = self.bottom.tangent(u) * (1.0 - v) + self.top.tangent(u) * v;
        let sv = self.top.point(u) - self.bottom.point(u);
        (su, sv)
    }

    pub fn rotated(&self, angle: f64) -> Quad {
        Quad { bottom: self.bottom.rotated(angle), top: self.top.rotated(angle) }
    }

    /// Corners in counterclockwise order starting at `(0, 0)`.
    pub fn corners(&self) -> [Complex64; 4] {
        [self.bottom.start(), self.bottom.end(), self.top.end(), self.top.start()]
    }

    /// Newton inversion from `guess`. Returns the parameter if the residual
    /// reaches `1e-13` relative to the cell size.
    pub fn invert_from(&self, z: Complex64, guess: (f64, f64)) -> Option<(f64, f64)> {
        let c = self.corners();
        let scale = modulus(c[2] - c[0]).max(modulus(c[3] - c[1]));
        let (mut u, mut v) = guess;
        for _ in 0..50 {
            let r = self.eval(u, v) - z;
            if modulus(r) <= 1e-13 * scale.max(1e-300) {
                return Some((u, v));
            }
            let (su, sv) = self.jacobian(u, v);
            let det = su.re * sv.im - su.im * sv.re;
            if det == 0.0 || !det.is_finite() {
                return None;
            }
            let du = (r.re * sv.im - r.im * sv.re) / det;
            let dv = (su.re * r.im - su.im * r.re) / det;
            u -= du;
            v -= dv;
            if !(u.is_finite() && v.is_finite()) {
                return None;
            }
            // Keep iterates from wandering far outside the cell.
            u = u.clamp(-0.5, 1.5);
            v = v.clamp(-0.5, 1.5);
        }
        let r = self.eval(u, v) - z;
        (modulus(r) <= 1e-11 * scale.max(1e-300)).then_some((u, v))
    }

    pub fn invert(&self, z: Complex64) -> Option<(f64, f64)> {
        self.invert_from(z, (0.5, 0.5))
    }

    pub fn param_inside(p: (f64, f64)) -> bool {
        let s = PARAM_SLACK;
        p.0 >= -s && p.0 <= 1.0 + s && p.1 >= -s && p.1 <= 1.0 + s
    }
}

/// Affine map of the triangle `(a0, a1, a2)` onto `(b0, b1, b2)`.
pub fn triangle_map(src: [Complex64; 3], dst: [Complex64; 3], z: Complex64) -> Complex64 {
    let (s, t) = barycentric(src, z);
    dst[0] + (dst[1] - dst[0]) * s + (dst[2] - dst[0]) * t
}

/// `(s, t)` with `z = a0 + s (a1 - a0) + t (a2 - a0)`.
pub fn barycentric(tri: [Complex64; 3], z: Complex64) -> (f64, f64) {
    let (e1, e2, p) = (tri[1] - tri[0], tri[2] - tri[0], z - tri[0]);
    let det = e1.re * e2.im - e1.im * e2.re;
    let s = (p.re * e2.im - p.im * e2.re) / det;
    let t = (e1.re * p.im - e1.im * p.re) / det;
    (s, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn patch_boundary_and_inverse() {
        let q = Quad::new(Side::Segment { a: c(0.5, 0.0), b: c(0.3, 0.4) }, Side::Arc { radius: 1.0, t0: 0.0, t1: PI / 3.0 });
        assert_eq!(q.eval(0.0, 0.0), c(0.5, 0.0));
        assert!(modulus(q.eval(1.0, 1.0) - cmath::cis(PI / 3.0)) < 1e-15);
        for &(u, v) in &[(0.1, 0.2), (0.5, 0.5), (0.9, 0.95), (0.0, 1.0)] {
            let z = q.eval(u, v);
            let (uu, vv) = q.invert(z).unwrap();
            assert!((uu - u).abs() < 1e-12 && (vv - v).abs() < 1e-12);
        }
    }

    #[test]
    fn jacobian_matches_differences() {
        let q = Quad::new(Side::Arc { radius: 0.4, t0: 0.2, t1: 0.9 }, Side::Segment { a: c(0.6, 0.1), b: c(0.2, 0.7) });
        let (u, v, h) = (0.3, 0.6, 1e-6);
        let (su, sv) = q.jacobian(u, v);
        let du = (q.eval(u + h, v) - q.eval(u - h, v)) / (2.0 * h);
        let dv = (q.eval(u, v + h) - q.eval(u, v - h)) / (2.0 * h);
        assert!(modulus(su - du) < 1e-8 && modulus(sv - dv) < 1e-8);
    }

    #[test]
    fn triangle_affine() {
        let src = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)];
        let dst = [c(1.0, 1.0), c(3.0, 1.0), c(1.0, 2.0)];
        assert_eq!(triangle_map(src, dst, c(0.5, 0.5)), c(2.0, 1.5));
    }
}
