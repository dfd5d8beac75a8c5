//! Numerical checks of the model map: degree, dilatation, symmetry, seams
//! and the single pass through the middle annulus.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Region, SurgeryError, SurgeryMap};
use crate::cmath::{cis, from_polar, modulus, ExtComplex};

pub const MIN_SAMPLE_BUDGET: usize = 1000;
/// Generic targets used for the degree count.
pub const DEGREE_TARGETS: usize = 100;
pub const PASS_ORBITS: usize = 10_000;
pub const PASS_STEPS: usize = 100;
/// Interior samples per cell for the round-trip check.
const ROUND_TRIP_SAMPLES: usize = 100;
/// Parameter margin keeping dilatation samples away from cell edges.
const EDGE_MARGIN: f64 = 0.05;
const SEED: u64 = 0x5e_ed0f_f00d;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiregularReport {
    /// Smallest number of distinct solutions of `F(z) = w` over the generic
    /// targets.
    pub degree_count: usize,
    /// Largest such number; equal to `degree_count` when the count is stable.
    pub degree_max: usize,
    /// Largest sampled `|mu|`, `mu = F_zbar / F_z`.
    pub max_dilatation: f64,
    /// Where the largest `|mu|` was sampled.
    pub max_dilatation_at: Complex64,
    pub symmetry_error: f64,
    pub seam_error: f64,
    pub pass_through_violations: usize,
    pub inversion_failures: usize,
    /// Largest distance from a cell sample to the nearest computed preimage
    /// of its image.
    pub round_trip_error: f64,
    /// Distinct preimages of the image of a star tip.
    pub branch_fiber_size: usize,
}

impl SurgeryMap {
    /// Point of the actual middle annulus over a normalized point.
    fn denormalize_point(&self, zn: Complex64) -> Complex64 {
        let a = modulus(zn);
        zn / a * self.denormalize_radius(a)
    }

    /// Beltrami coefficient `F_zbar / F_z` by central differences.
    pub fn beltrami(&self, z: Complex64, h: f64) -> Option<Complex64> {
        let f = |p: Complex64| self.try_eval(ExtComplex::Finite(p)).ok().and_then(|w| w.finite());
        let fx = (f(z + h)? - f(z - h)?) / (2.0 * h);
        let ih = Complex64::new(0.0, h);
        let fy = (f(z + ih)? - f(z - ih)?) / (2.0 * h);
        let i = Complex64::new(0.0, 1.0);
        let fz = (fx - i * fy) * 0.5;
        let fzb = (fx + i * fy) * 0.5;
        Some(fzb / fz)
    }

    /// Interior sample points of every cell of the fundamental sector and of
    /// the two covering annuli, `per_cell` each.
    fn cell_samples(&self, per_cell: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        let c = self.complex();
        let d = self.degree();
        let lo = EDGE_MARGIN;
        let param = |rng: &mut ChaCha8Rng| (rng.gen_range(lo..1.0 - lo), rng.gen_range(lo..1.0 - lo));
        let mut out = Vec::new();
        for q in c.inner_cells().iter().chain(c.outer_cells().iter()) {
            for _ in 0..per_cell {
                let (u, v) = param(rng);
                out.push(self.denormalize_point(q.eval(u, v)));
            }
        }
        let petal = c.petal();
        let center = petal.iter().sum::<Complex64>() / d as f64;
        for k in 0..d {
            let (a, b) = (petal[k], petal[(k + 1) % d]);
            for _ in 0..per_cell {
                let (mut s, mut t) = param(rng);
                if s + t > 1.0 {
                    (s, t) = (1.0 - s, 1.0 - t);
                }
                let (s, t) = (lo + s * (1.0 - 3.0 * lo), lo + t * (1.0 - 3.0 * lo));
                out.push(self.denormalize_point(center + (a - center) * s + (b - center) * t));
            }
        }
        let sector = c.sector_angle();
        for (r_lo, r_hi) in [(self.r0(), self.r1()), (self.r2(), 1.0)] {
            for _ in 0..per_cell {
                let (u, v) = param(rng);
                out.push(from_polar(r_lo + (r_hi - r_lo) * v, sector * u));
            }
        }
        out
    }

    fn count_solutions(&self, w: Complex64, merge: f64) -> Result<usize, SurgeryError> {
        let pts = self.preimages(ExtComplex::Finite(w))?;
        let scale = modulus(w).max(1.0);
        let mut seen: Vec<Complex64> = Vec::new();
        for p in pts.iter().filter_map(ExtComplex::finite) {
            let Some(fp) = self.try_eval(ExtComplex::Finite(p)).ok().and_then(|x| x.finite()) else {
                continue;
            };
            if modulus(fp - w) <= 1e-9 * scale && !seen.iter().any(|&q| modulus(q - p) < merge) {
                seen.push(p);
            }
        }
        Ok(seen.len())
    }

    /// Sampled verification with roughly `sample_budget` points per check.
    pub fn verify(&self, sample_budget: usize) -> Result<QuasiregularReport, SurgeryError> {
        if sample_budget < MIN_SAMPLE_BUDGET {
            return Err(SurgeryError::SampleBudget { got: sample_budget, min: MIN_SAMPLE_BUDGET });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let d = self.degree();
        let m = self.exponents().m() as usize;
        let mut failures = 0;

        let mut degree_count = usize::MAX;
        let mut degree_max = 0;
        for i in 0..DEGREE_TARGETS {
            let rho = match i % 3 {
                0 => self.r0() * rng.gen_range(0.01..0.99),
                1 => self.r0() + (1.0 - self.r0()) * rng.gen_range(0.01..0.99),
                _ => rng.gen_range(1.01..3.0),
            };
            let w = from_polar(rho, TAU * rng.gen::<f64>());
            match self.count_solutions(w, 1e-8) {
                Ok(n) => {
                    degree_count = degree_count.min(n);
                    degree_max = degree_max.max(n);
                }
                Err(_) => failures += 1,
            }
        }
        if degree_count == usize::MAX {
            degree_count = 0;
        }

        let per_cell = (sample_budget / (d + m + self.exponents().l() as usize + 2)).max(1);
        let h = 1e-7 * (self.r2() - self.r1());
        let mut max_mu = 0.0;
        let mut max_at = Complex64::new(0.0, 0.0);
        for z in self.cell_samples(per_cell, &mut rng) {
            match self.beltrami(z, h) {
                Some(mu) if mu.re.is_finite() && mu.im.is_finite() => {
                    if modulus(mu) > max_mu {
                        max_mu = modulus(mu);
                        max_at = z;
                    }
                }
                _ => failures += 1,
            }
        }

        let rot = cis(TAU / d as f64);
        let rot_m = cis(TAU * (m % d) as f64 / d as f64);
        let mut symmetry_error: f64 = 0.0;
        for _ in 0..sample_budget {
            let z = from_polar(rng.gen_range(0.2..1.5), TAU * rng.gen::<f64>());
            let (a, b) = (self.try_eval(ExtComplex::Finite(z * rot)), self.try_eval(ExtComplex::Finite(z)));
            match (a.ok().and_then(|x| x.finite()), b.ok().and_then(|x| x.finite())) {
                (Some(a), Some(b)) => symmetry_error = symmetry_error.max(modulus(a - rot_m * b) / modulus(b).max(1.0)),
                _ => failures += 1,
            }
        }

        let seams = [
            (self.r0(), Region::Disk, Region::InnerAnnulus),
            (self.r1(), Region::InnerAnnulus, Region::Middle),
            (self.r2(), Region::Middle, Region::OuterAnnulus),
            (1.0, Region::OuterAnnulus, Region::Exterior),
        ];
        let mut seam_error: f64 = 0.0;
        for &(r, a, b) in &seams {
            for k in 0..sample_budget {
                let z = from_polar(r, TAU * (k as f64 + rng.gen::<f64>()) / sample_budget as f64);
                match (self.eval_in(a, z), self.eval_in(b, z)) {
                    (Some(x), Some(y)) => seam_error = seam_error.max(modulus(x - y)),
                    _ => failures += 1,
                }
            }
        }

        let mut round_trip: f64 = 0.0;
        for j in 0..d {
            let turn = cis(TAU * j as f64 / d as f64);
            for z in self.cell_samples(ROUND_TRIP_SAMPLES, &mut rng) {
                let z = z * turn;
                let Some(w) = self.try_eval(ExtComplex::Finite(z)).ok().and_then(|x| x.finite()) else {
                    failures += 1;
                    continue;
                };
                match self.preimages(ExtComplex::Finite(w)) {
                    Ok(pts) => {
                        let best = pts.iter().filter_map(ExtComplex::finite).map(|p| modulus(p - z)).fold(f64::INFINITY, f64::min);
                        round_trip = round_trip.max(best);
                    }
                    Err(_) => failures += 1,
                }
            }
        }

        let mut violations = 0;
        for _ in 0..PASS_ORBITS {
            let r = 1.25 * libm::sqrt(rng.gen::<f64>());
            let mut z = ExtComplex::Finite(from_polar(r, TAU * rng.gen::<f64>()));
            let mut entries = 0;
            let mut inside = false;
            for _ in 0..=PASS_STEPS {
                let now = z.finite().is_some_and(|p| self.region(p) == Region::Middle);
                if now && !inside {
                    entries += 1;
                }
                inside = now;
                z = self.eval(z);
            }
            if entries > 1 {
                violations += 1;
            }
        }

        let tip = self.denormalize_point(self.complex().star_chain()[0]);
        let branch_fiber_size = match self.try_eval(ExtComplex::Finite(tip)).ok().and_then(|x| x.finite()) {
            Some(w) => self.count_solutions(w, 1e-7).unwrap_or_else(|_| {
                failures += 1;
                0
            }),
            None => {
                failures += 1;
                0
            }
        };

        Ok(QuasiregularReport {
            degree_count,
            degree_max,
            max_dilatation: max_mu,
            max_dilatation_at: max_at,
            symmetry_error,
            seam_error,
            pass_through_violations: violations,
            inversion_failures: failures,
            round_trip_error: round_trip,
            branch_fiber_size,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Exponents;

    #[test]
    fn report_for_default_complex() {
        for (l, m) in [(2, 3), (3, 3)] {
            let f = SurgeryMap::build(Exponents::new(l, m).unwrap(), 0.5).unwrap();
            let r = f.verify(1000).unwrap();
            std::println!("({l},{m}) {r:?}");
            assert_eq!(r.degree_count, (l + m) as usize);
            assert_eq!(r.degree_max, (l + m) as usize);
            // The tips whose images coincide are the multiples of d / gcd(m, d).
            let g = if (l, m) == (2, 3) { 1 } else { 3 };
            assert_eq!(r.branch_fiber_size, (l + m - g) as usize);
            assert_eq!(r.inversion_failures, 0);
            assert_eq!(r.pass_through_violations, 0);
            assert!(r.seam_error < 1e-9 && r.symmetry_error < 1e-9 && r.round_trip_error < 1e-9);
            assert!(r.max_dilatation < 1.0);
        }
    }

    #[test]
    fn conformal_regions_have_zero_dilatation() {
        let f = SurgeryMap::build(Exponents::new(2, 3).unwrap(), 0.5).unwrap();
        for z in [Complex64::new(0.1, 0.2), Complex64::new(1.3, -0.4)] {
            assert!(modulus(f.beltrami(z, 1e-6).unwrap()) < 1e-6);
        }
    }

    #[test]
    fn small_budget_rejected() {
        let f = SurgeryMap::build(Exponents::new(2, 3).unwrap(), 0.5).unwrap();
        assert!(f.verify(10).is_err());
    }
}
