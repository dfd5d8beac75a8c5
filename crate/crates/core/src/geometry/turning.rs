//! Bounded-turning estimate `max diam(I) / |x - y|` over vertex pairs, `I`
//! the arc between `x` and `y` of smaller chordal diameter.
//!
//! Pairs are grouped by their index gap `g`: every pair `(i, i + g)` of a
//! selected gap is evaluated. Arc diameters come from the recurrence
//! `D_L(i) = max(D_{L-1}(i), D_{L-1}(i + 1), |p_i - p_{i+L}|)` for the arc of
//! `L` edges starting at vertex `i`, swept once over `L` in `O(n^2)` time.
//! Gaps are taken from a fixed nested sequence that visits dyadic strata
//! `[2^s, 2^{s+1})` in turn, so a larger budget only adds pairs.

use alloc::vec;
use alloc::vec::Vec;

use super::{dist3, Curve, GeometryError};

pub const MIN_PAIR_BUDGET: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningReport {
    pub k_estimate: f64,
    pub witness_pair: (usize, usize),
    pub sample_pairs: usize,
}

/// Gaps `1..=n/2` in stratified order: the first element of each dyadic
/// stratum, then the second, with each stratum walked in bit-reversed
/// (van der Corput) order of offsets.
fn gap_sequence(n: usize) -> Vec<usize> {
    let max_gap = n / 2;
    let mut strata: Vec<Vec<usize>> = Vec::new();
    let mut s = 1usize;
    while s <= max_gap {
        let hi = core::cmp::min(2 * s, max_gap + 1);
        let width = hi - s;
        let bits = usize::BITS - (s - 1).leading_zeros();
        let mut order: Vec<usize> = (0..s).filter_map(|k| {
            let r = if bits == 0 { 0 } else { k.reverse_bits() >> (usize::BITS - bits) };
            (r < width).then_some(s + r)
        }).collect();
        order.dedup();
        strata.push(order);
        s *= 2;
    }
    let mut out = Vec::with_capacity(max_gap);
    let mut round = 0;
    loop {
        let mut any = false;
        for st in &strata {
            if let Some(&g) = st.get(round) {
                out.push(g);
                any = true;
            }
        }
        if !any {
            break;
        }
        round += 1;
    }
    out
}

/// Stratified estimate with roughly `pair_budget` vertex pairs.
pub fn turning_constant(c: &Curve, pair_budget: usize) -> Result<TurningReport, GeometryError> {
    if pair_budget < MIN_PAIR_BUDGET {
        return Err(GeometryError::PairBudget(pair_budget));
    }
    let pts = c.sphere_points();
    let n = pts.len();
    let seq = gap_sequence(n);
    let take = core::cmp::min(seq.len(), core::cmp::max(1, pair_budget / n));
    let gaps = &seq[..take];

    // Row lengths L needed: each gap g and its complement n - g.
    let mut want = vec![None::<usize>; n + 1];
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for &g in gaps {
        for l in [g, n - g] {
            if want[l].is_none() {
                want[l] = Some(rows.len());
                rows.push(Vec::new());
            }
        }
    }
    let max_len = gaps.iter().map(|&g| n - g).max().unwrap_or(0);
    // cur[i] = diameter of the arc of `len` edges starting at vertex i.
    let mut cur = vec![0.0f64; n];
    for len in 1..=max_len {
        let next: Vec<f64> = (0..n)
            .map(|i| {
                let d = dist3(&pts[i], &pts[(i + len) % n]);
                cur[i].max(cur[(i + 1) % n]).max(d)
            })
            .collect();
        cur = next;
        if let Some(slot) = want[len] {
            rows[slot] = cur.clone();
        }
    }

    let mut best = TurningReport { k_estimate: 1.0, witness_pair: (0, 1 % n), sample_pairs: 0 };
    let mut first = true;
    for &g in gaps {
        let fwd = &rows[want[g].unwrap()];
        let back = &rows[want[n - g].unwrap()];
        // Gap n/2 on an even cycle lists each pair twice.
        let count = if 2 * g == n { n / 2 } else { n };
        for i in 0..count {
            let j = (i + g) % n;
            let chord = dist3(&pts[i], &pts[j]);
            if chord == 0.0 {
                continue;
            }
            best.sample_pairs += 1;
            let ratio = fwd[i].min(back[j]) / chord;
            if first || ratio > best.k_estimate {
                best.k_estimate = ratio;
                best.witness_pair = (i, j);
                first = false;
            }
        }
    }
    best.k_estimate = best.k_estimate.max(1.0);
    Ok(best)
}

/// Every vertex pair, arcs measured by direct maximization. `O(n^3)`; meant
/// for tests on small curves.
pub fn turning_constant_brute_force(c: &Curve) -> f64 {
    let pts = c.sphere_points();
    let n = pts.len();
    let arc_diam = |a: usize, len: usize| {
        let mut d: f64 = 0.0;
        for s in 0..=len {
            for t in s + 1..=len {
                d = d.max(dist3(&pts[(a + s) % n], &pts[(a + t) % n]));
            }
        }
        d
    };
    let mut k: f64 = 1.0;
    for i in 0..n {
        for j in i + 1..n {
            let chord = dist3(&pts[i], &pts[j]);
            if chord == 0.0 {
                continue;
            }
            let small = arc_diam(i, j - i).min(arc_diam(j, n - (j - i)));
            k = k.max(small / chord);
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmath::from_polar;
    use crate::geometry::circle_polyline;
    use core::f64::consts::{PI, TAU};
    use num_complex::Complex64;

    fn cardioid(n: usize) -> Curve {
        Curve::from_finite((0..n).map(|k| {
            let t = TAU * k as f64 / n as f64;
            from_polar((1.0 + libm::cos(t)) / 4.0, t)
        }))
        .unwrap()
    }

    fn square(per_side: usize) -> Curve {
        let corners = [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.5), Complex64::new(0.0, 0.5)];
        let mut pts = Vec::new();
        for s in 0..4 {
            let (a, b) = (corners[s], corners[(s + 1) % 4]);
            for k in 0..per_side {
                pts.push(a + (b - a) * (k as f64 / per_side as f64));
            }
        }
        Curve::from_finite(pts).unwrap()
    }

    #[test]
    fn gap_sequence_is_permutation() {
        for n in [8, 9, 31, 64, 100, 1001] {
            let mut s = gap_sequence(n);
            assert_eq!(s[0], 1);
            if n >= 4 {
                assert_eq!(s[1], 2);
            }
            s.sort_unstable();
            assert_eq!(s, (1..=n / 2).collect::<Vec<_>>());
        }
    }

    #[test]
    fn full_budget_matches_brute_force() {
        for c in [cardioid(40), square(6), circle_polyline(Complex64::new(0.3, 0.2), 0.7, 33)] {
            let exact = turning_constant_brute_force(&c);
            let est = turning_constant(&c, c.len() * c.len()).unwrap();
            assert!((est.k_estimate - exact).abs() < 1e-12, "{} vs {}", est.k_estimate, exact);
        }
    }

    #[test]
    fn circle_is_near_one() {
        let r = turning_constant(&circle_polyline(Complex64::new(0.0, 0.0), 0.4, 500), 10_000).unwrap();
        assert!(r.k_estimate >= 1.0 && r.k_estimate <= 1.01);
    }

    #[test]
    fn square_is_bounded() {
        let c = square(25);
        let r = turning_constant(&c, 10_000).unwrap();
        assert!(r.k_estimate <= 1.5);
        assert!(r.k_estimate <= turning_constant_brute_force(&c) + 1e-12);
    }

    #[test]
    fn cardioid_detects_cusp() {
        let a = turning_constant(&cardioid(1000), 10_000).unwrap();
        let b = turning_constant(&cardioid(2000), 10_000).unwrap();
        assert!(a.k_estimate > 10.0);
        assert!(b.k_estimate > a.k_estimate);
        let (i, j) = a.witness_pair;
        let near = |k: usize| (TAU * k as f64 / 1000.0 - PI).abs() < 0.05;
        assert!(near(i) && near(j));
    }

    #[test]
    fn monotone_in_budget() {
        let c = cardioid(300);
        let mut last = 0.0;
        for b in [100, 600, 1200, 5000, 20_000, 90_000] {
            let k = turning_constant(&c, b).unwrap().k_estimate;
            assert!(k >= last);
            last = k;
        }
        assert!(turning_constant(&c, 10).is_err());
    }
}
