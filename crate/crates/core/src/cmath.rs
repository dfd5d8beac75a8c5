//! Complex helpers on top of `num-complex`, routed through `libm` so results do
//! not depend on the platform math library.

use core::f64::consts::TAU;

use num_complex::Complex64;

/// A point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtComplex {
    Finite(Complex64),
    Infinity,
}

impl ExtComplex {
    pub const ZERO: ExtComplex = ExtComplex::Finite(Complex64::new(0.0, 0.0));

    pub fn new(re: f64, im: f64) -> Self {
        ExtComplex::from(Complex64::new(re, im))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtComplex::Infinity)
    }

    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            ExtComplex::Finite(z) => Some(z),
            ExtComplex::Infinity => None,
        }
    }

    /// Modulus, `f64::INFINITY` at the point at infinity.
    pub fn modulus(&self) -> f64 {
        match *self {
            ExtComplex::Finite(z) => modulus(z),
            ExtComplex::Infinity => f64::INFINITY,
        }
    }

    pub fn conj(&self) -> Self {
        match *self {
            ExtComplex::Finite(z) => ExtComplex::Finite(z.conj()),
            ExtComplex::Infinity => ExtComplex::Infinity,
        }
    }
}

/// Non-finite components collapse to the point at infinity.
impl From<Complex64> for ExtComplex {
    fn from(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            ExtComplex::Finite(z)
        } else {
            ExtComplex::Infinity
        }
    }
}

#[inline]
pub fn modulus(z: Complex64) -> f64 {
    libm::hypot(z.re, z.im)
}

#[inline]
pub fn arg(z: Complex64) -> f64 {
    libm::atan2(z.im, z.re)
}

/// Argument normalized to `[0, 2pi)`.
#[inline]
pub fn arg_positive(z: Complex64) -> f64 {
    let t = arg(z);
    if t < 0.0 {
        let u = t + TAU;
        if u >= TAU {
            0.0
        } else {
            u
        }
    } else {
        t
    }
}

/// `e^{i t}`.
#[inline]
pub fn cis(t: f64) -> Complex64 {
    let (s, c) = libm::sincos(t);
    Complex64::new(c, s)
}

#[inline]
pub fn from_polar(r: f64, t: f64) -> Complex64 {
    cis(t) * r
}

/// Integer power by repeated squaring.
#[inline]
pub fn powu(z: Complex64, n: u32) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    let mut base = z;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        e >>= 1;
        if e > 0 {
            base *= base;
        }
    }
    acc
}

/// Principal `n`-th root: modulus `|z|^{1/n}`, argument `arg(z)/n` with
/// `arg` in `(-pi, pi]`.
pub fn principal_root(z: Complex64, n: u32) -> Complex64 {
    let r = libm::pow(modulus(z), 1.0 / f64::from(n));
    from_polar(r, arg(z) / f64::from(n))
}

#[inline]
pub fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
