//! Cross-checks against independent computations.

use mcmullen_core::cantor::{CantorIfs, Rational};
use mcmullen_core::cmath::{arg, cis};
use mcmullen_core::geometry::{extract_peripheral, separation};
use mcmullen_core::grid::render_julia;
use mcmullen_core::surgery::SurgeryMap;
use mcmullen_core::{Bounds, Complex64, ExtComplex, Exponents, MapParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

/// Winding number of `F - w` around the circle `|z| = r`.
fn winding(f: &SurgeryMap, w: Complex64, r: f64) -> i64 {
    let n = 20_000;
    let val = |k: usize| f.eval_finite(cis(TAU * k as f64 / n as f64) * r).finite().unwrap() - w;
    let mut total = 0.0;
    let mut prev = val(0);
    for k in 1..=n {
        let cur = val(k % n);
        let mut d = arg(cur) - arg(prev);
        if d > PI {
            d -= TAU;
        } else if d < -PI {
            d += TAU;
        }
        total += d;
        prev = cur;
    }
    (total / TAU).round() as i64
}

#[test]
fn surgery_degree_by_argument_principle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (l, m) in [(2u32, 3u32), (3, 3)] {
        let f = SurgeryMap::build(Exponents::new(l, m).unwrap(), 0.5).unwrap();
        let d = i64::from(l + m);
        let delta = 1e-3;
        for _ in 0..5 {
            // Targets in the small disk are covered by the middle annulus only.
            let w = cis(rng.gen_range(0.0..TAU)) * (f.r0() * rng.gen_range(0.05..0.95));
            let count = winding(&f, w, f.r2() - delta) - winding(&f, w, f.r1() + delta);
            assert_eq!(count, d);
            let n = f.preimages(ExtComplex::Finite(w)).unwrap().len() as i64;
            assert_eq!(n, count);
        }
        let w = cis(1.0) * 0.8;
        assert_eq!(winding(&f, w, 1.0 + delta) - winding(&f, w, f.r0() - delta), d);
    }
}

/// Level-`n` middle-thirds membership read off the first `n` ternary digits
/// of `x` in `[0, 1]`.
fn in_middle_thirds_level(x: Rational, n: u32) -> bool {
    let (mut p, q) = (*x.numer(), *x.denom());
    if p == q {
        return true;
    }
    for _ in 0..n {
        p *= 3;
        let digit = p / q;
        p -= digit * q;
        if digit == 1 {
            // 0.…1000… equals 0.…0222…, which stays in the closed set.
            return p == 0;
        }
    }
    true
}

#[test]
fn cantor_membership_matches_ternary_digits() {
    let ifs = CantorIfs::new(Exponents::symmetric(3).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let q: i128 = rng.gen_range(1..5000);
        let p: i128 = rng.gen_range(0..=q);
        let x = Rational::new(p, q);
        for n in [1, 5, 12] {
            assert_eq!(ifs.member(x, n), in_middle_thirds_level(x, n), "x={x} n={n}");
        }
    }
    assert!(ifs.member(Rational::new(1, 4), 20));
}

#[test]
fn cantor_circles_parameter_has_nested_curves() {
    let f = MapParams::new(Complex64::new(1e-5, 0.0), Exponents::symmetric(3).unwrap()).unwrap();
    let g = render_julia(&f, Bounds::centered(Complex64::new(0.0, 0.0), 1.2).unwrap(), 400, 400, 200).unwrap();
    let ex = extract_peripheral(&g, 1, 16).unwrap();
    let depths: Vec<u32> = ex.curves.iter().filter_map(|c| c.source_depth()).collect();
    assert!(depths.contains(&0) && depths.contains(&1), "{depths:?}");
    assert!(separation(&ex.curves).unwrap().s_minimum > 0.0);
    // The trap door around 0 escapes in one step.
    assert_eq!(g.get(200, 200), 1);
}

#[test]
fn doubling_resolution_keeps_curve_diameters() {
    use mcmullen_core::geometry::diameter;
    let f = MapParams::new(Complex64::new(1e-5, 0.0), Exponents::symmetric(3).unwrap()).unwrap();
    let b = Bounds::centered(Complex64::new(0.0, 0.0), 1.2).unwrap();
    let diam = |n: usize| {
        let g = render_julia(&f, b, n, n, 200).unwrap();
        let ex = extract_peripheral(&g, 1, 16).unwrap();
        ex.curves.iter().map(|c| (c.source_depth().unwrap(), diameter(c))).collect::<Vec<_>>()
    };
    // Below about 600 pixels across, the thin Julia circles are not resolved.
    let (a, c) = (diam(600), diam(1200));
    assert_eq!(a.len(), c.len());
    let px = 2.4 / 600.0;
    for (x, y) in a.iter().zip(&c) {
        assert_eq!(x.0, y.0);
        assert!((x.1 - y.1).abs() < 2.0 * px, "{x:?} {y:?}");
    }
}

#[test]
fn winding_oracle_sanity() {
    // z -> z^m outside the unit disk winds m times around small targets.
    let f = SurgeryMap::build(Exponents::new(2, 3).unwrap(), 0.5).unwrap();
    assert_eq!(winding(&f, Complex64::new(0.1, 0.0), 1.5), 3);
}

#[test]
fn sierpinski_component_counts_follow_univalent_pullbacks() {
    use mcmullen_core::trichotomy::classify;
    use mcmullen_core::{ClassifierConfig, VerdictClass};
    // While the critical values sit in a deeper component, each component
    // of depth k >= 1 has 2n univalent preimages, so depth k holds (2n)^(k-1).
    let f = MapParams::new(Complex64::new(0.1, 0.1), Exponents::symmetric(3).unwrap()).unwrap();
    let v = classify(&f, &ClassifierConfig::default());
    assert_eq!(v.class, VerdictClass::SierpinskiEscaping);
    let entry = v.entry_index.unwrap();
    let max_depth = 4;
    assert!(entry > max_depth);
    let half = f.escape_radius() * 1.02;
    let g = render_julia(&f, Bounds::centered(Complex64::new(0.0, 0.0), half).unwrap(), 1024, 1024, 500).unwrap();
    let ex = extract_peripheral(&g, max_depth as u32, 16).unwrap();
    for k in 0..=max_depth as u32 {
        let count = ex.curves.iter().filter(|c| c.source_depth() == Some(k)).count();
        assert_eq!(count, 6usize.pow(k.saturating_sub(1)), "depth {k}");
    }
    assert!(separation(&ex.curves).unwrap().s_minimum > 0.0);
}
