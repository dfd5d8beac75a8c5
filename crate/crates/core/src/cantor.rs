//! Standard Cantor sets `C_{l,m}` from the IFS `g0(x) = (1-x)/l`,
//! `g1(x) = 1 + (x-1)/m` in exact rational arithmetic, and the radial annulus
//! model of the Cantor circles.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, Pow, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cmath::{self, modulus, powu};
use crate::dynamics::Exponents;

pub type Rational = Ratio<i128>;

/// Hard cap on the level of an explicit interval list (2^20 intervals).
pub const MAX_LEVEL: u32 = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CantorError {
    #[error("level {n} exceeds the limit {limit} for these exponents")]
    LevelTooLarge { n: u32, limit: u32 },
    #[error("r0 must lie in (0, 1) (got {0})")]
    InvalidRadius(f64),
    #[error("middle annulus: use the surgery module")]
    MiddleAnnulus,
    #[error("point outside the annulus r0 <= |z| <= 1")]
    OutsideAnnulus,
    #[error("depth must be at least 1")]
    ZeroDepth,
}

fn rat(n: i128, d: i128) -> Rational {
    Ratio::new(n, d)
}

/// The interval IFS `{g0, g1}` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CantorIfs {
    exp: Exponents,
}

impl CantorIfs {
    pub fn new(exp: Exponents) -> Self {
        CantorIfs { exp }
    }

    pub fn exponents(&self) -> Exponents {
        self.exp
    }

    fn l(&self) -> i128 {
        i128::from(self.exp.l())
    }

    fn m(&self) -> i128 {
        i128::from(self.exp.m())
    }

    /// `(1 - x) / l`, orientation reversing onto `[0, 1/l]`.
    pub fn g0(&self, x: Rational) -> Rational {
        (Rational::one() - x) / self.l()
    }

    /// `1 + (x - 1) / m`, orientation preserving onto `[1 - 1/m, 1]`.
    pub fn g1(&self, x: Rational) -> Rational {
        Rational::one() + (x - Rational::one()) / self.m()
    }

    /// Largest level whose endpoints and partial sums fit comfortably in `i128`.
    pub fn level_limit(&self) -> u32 {
        let lm = (self.l() * self.m()) as f64;
        let by_denominator = (100.0 / libm::log2(lm)) as u32;
        by_denominator.min(MAX_LEVEL)
    }

    /// `I_n`: the `2^n` intervals of level `n` in increasing order.
    pub fn level_set(&self, n: u32) -> Result<IntervalUnion, CantorError> {
        let limit = self.level_limit();
        if n > limit {
            return Err(CantorError::LevelTooLarge { n, limit });
        }
        let mut cur = alloc::vec![(Rational::zero(), Rational::one())];
        for _ in 0..n {
            let mut next = Vec::with_capacity(2 * cur.len());
            // g0 reverses order, so its images are pushed back to front.
            next.extend(cur.iter().rev().map(|&(a, b)| (self.g0(b), self.g0(a))));
            next.extend(cur.iter().map(|&(a, b)| (self.g1(a), self.g1(b))));
            cur = next;
        }
        Ok(IntervalUnion { intervals: cur })
    }

    /// Exact membership of `x` in `I_n` by greedy inverse iteration.
    pub fn member(&self, x: Rational, n: u32) -> bool {
        if x < Rational::zero() || x > Rational::one() {
            return false;
        }
        let (l, m) = (self.l(), self.m());
        let left = rat(1, l);
        let right = Rational::one() - rat(1, m);
        let mut y = x;
        for _ in 0..n {
            if y <= left {
                y = Rational::one() - y * l;
            } else if y >= right {
                y = Rational::one() - (Rational::one() - y) * m;
            } else {
                return false;
            }
        }
        true
    }

    /// `(1/l + 1/m)^n`.
    pub fn total_length(&self, n: u32) -> Rational {
        let r = rat(self.l() + self.m(), self.l() * self.m());
        Pow::pow(r, n)
    }
}

/// Sorted, pairwise disjoint closed intervals with rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalUnion {
    intervals: Vec<(Rational, Rational)>,
}

impl IntervalUnion {
    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Sum of interval lengths.
    pub fn measure(&self) -> Rational {
        self.intervals.iter().fold(Rational::zero(), |acc, &(a, b)| acc + (b - a))
    }

    /// Sorted with positive gaps between consecutive intervals.
    pub fn is_well_formed(&self) -> bool {
        self.intervals.iter().all(|&(a, b)| a <= b) && self.intervals.windows(2).all(|w| w[0].1 < w[1].0)
    }

    pub fn contains(&self, x: Rational) -> bool {
        let i = self.intervals.partition_point(|&(_, b)| b < x);
        self.intervals.get(i).is_some_and(|&(a, _)| a <= x)
    }

    /// Membership of a float with absolute slack `tol`.
    pub fn contains_approx(&self, x: f64, tol: f64) -> bool {
        let i = self.intervals.partition_point(|&(_, b)| to_f64(b) + tol < x);
        self.intervals.get(i).is_some_and(|&(a, _)| to_f64(a) - tol <= x)
    }

    /// Every interval of `self` lies inside some interval of `other`.
    pub fn is_subset_of(&self, other: &IntervalUnion) -> bool {
        self.intervals.iter().all(|&(a, b)| {
            let i = other.intervals.partition_point(|&(_, ob)| ob < a);
            other.intervals.get(i).is_some_and(|&(oa, ob)| oa <= a && b <= ob)
        })
    }

    /// Distance from `x` to the union.
    pub fn distance_to(&self, x: Rational) -> Rational {
        let i = self.intervals.partition_point(|&(_, b)| b < x);
        let mut best: Option<Rational> = None;
        let mut take = |d: Rational| {
            if best.is_none_or(|b| d < b) {
                best = Some(d);
            }
        };
        if let Some(&(a, _)) = self.intervals.get(i) {
            take(if a > x { a - x } else { Rational::zero() });
        }
        if i > 0 {
            take(x - self.intervals[i - 1].1);
        }
        best.unwrap_or_else(Rational::zero)
    }

    /// `sup_{x in self} dist(x, other)`: the maximum is attained at an
    /// endpoint of `self` or at a gap midpoint of `other`.
    fn directed_hausdorff(&self, other: &IntervalUnion) -> Rational {
        let mut candidates: Vec<Rational> = self.intervals.iter().flat_map(|&(a, b)| [a, b]).collect();
        for w in other.intervals.windows(2) {
            let mid = (w[0].1 + w[1].0) / 2;
            if self.contains(mid) {
                candidates.push(mid);
            }
        }
        candidates.into_iter().map(|x| other.distance_to(x)).max().unwrap_or_else(Rational::zero)
    }

    /// Exact Hausdorff distance between two nonempty unions.
    pub fn hausdorff_distance(&self, other: &IntervalUnion) -> Rational {
        core::cmp::max(self.directed_hausdorff(other), other.directed_hausdorff(self))
    }
}

pub fn to_f64(x: Rational) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// The annulus `r0 <= |z| <= 1` with its radial IFS
/// `g0(r) = (1 - r)/l + r0`, `g1(r) = 1 - (1 - r)/m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusModel {
    exp: Exponents,
    r0: f64,
    r1: f64,
    r2: f64,
}

pub const DEFAULT_R0: f64 = 0.5;

impl AnnulusModel {
    pub fn new(exp: Exponents, r0: f64) -> Result<Self, CantorError> {
        if !(r0 > 0.0 && r0 < 1.0) {
            return Err(CantorError::InvalidRadius(r0));
        }
        let r1 = r0 + (1.0 - r0) / f64::from(exp.l());
        let r2 = 1.0 - (1.0 - r0) / f64::from(exp.m());
        Ok(AnnulusModel { exp, r0, r1, r2 })
    }

    pub fn with_default_radius(exp: Exponents) -> Self {
        AnnulusModel::new(exp, DEFAULT_R0).expect("default radius is valid")
    }

    pub fn exponents(&self) -> Exponents {
        self.exp
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    pub fn g0(&self, r: f64) -> f64 {
        (1.0 - r) / f64::from(self.exp.l()) + self.r0
    }

    pub fn g1(&self, r: f64) -> f64 {
        1.0 - (1.0 - r) / f64::from(self.exp.m())
    }

    /// `g0^{-1}(r) = 1 - l (r - r0)`, mapping `[r0, r1]` onto `[r0, 1]` reversed.
    pub fn g0_inv(&self, r: f64) -> f64 {
        1.0 - f64::from(self.exp.l()) * (r - self.r0)
    }

    /// `g1^{-1}(r) = 1 - m (1 - r)`, mapping `[r2, 1]` onto `[r0, 1]`.
    pub fn g1_inv(&self, r: f64) -> f64 {
        1.0 - f64::from(self.exp.m()) * (1.0 - r)
    }

    /// Radial coordinate `x = (r - r0)/(1 - r0)` conjugating the radial IFS
    /// to the interval IFS.
    pub fn to_unit(&self, r: f64) -> f64 {
        (r - self.r0) / (1.0 - self.r0)
    }

    pub fn from_unit(&self, x: f64) -> f64 {
        self.r0 + (1.0 - self.r0) * x
    }

    /// The degree-`l` cover on `A0` and the degree-`m` cover on `A1`.
    pub fn annulus_map(&self, z: Complex64) -> Result<Complex64, CantorError> {
        let r = modulus(z);
        if !(r >= self.r0 && r <= 1.0) {
            return Err(CantorError::OutsideAnnulus);
        }
        let u = z / r;
        if r <= self.r1 {
            Ok(powu(u.conj(), self.exp.l()) * self.g0_inv(r))
        } else if r >= self.r2 {
            Ok(powu(u, self.exp.m()) * self.g1_inv(r))
        } else {
            Err(CantorError::MiddleAnnulus)
        }
    }

    /// One random inverse branch of the annulus map applied to `w` in `A`.
    pub fn inverse_branch<R: Rng>(&self, w: Complex64, rng: &mut R) -> Complex64 {
        let rho = modulus(w);
        let theta = cmath::arg(w);
        if rng.gen::<bool>() {
            let l = self.exp.l();
            let k = f64::from(rng.gen_range(0..l));
            cmath::from_polar(self.g0(rho), -(theta + TAU * k) / f64::from(l))
        } else {
            let m = self.exp.m();
            let k = f64::from(rng.gen_range(0..m));
            cmath::from_polar(self.g1(rho), (theta + TAU * k) / f64::from(m))
        }
    }

    /// `count` points of the depth-`depth` approximation to the attractor of
    /// the inverse branches, deterministic in `seed`.
    pub fn attractor_sample(&self, depth: u32, count: usize, seed: u64) -> Result<Vec<Complex64>, CantorError> {
        if depth == 0 {
            return Err(CantorError::ZeroDepth);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok((0..count)
            .map(|_| {
                let r = self.r0 + (1.0 - self.r0) * rng.gen::<f64>();
                let mut z = cmath::from_polar(r, TAU * rng.gen::<f64>());
                for _ in 0..depth {
                    z = self.inverse_branch(z, &mut rng);
                }
                z
            })
            .collect())
    }
}
