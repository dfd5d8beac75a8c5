use mcmullen_core::cantor::{CantorIfs, Rational};
use mcmullen_core::cmath::{cis, modulus};
use mcmullen_core::dynamics::{critical_points, derivative, evaluate, iterate};
use mcmullen_core::geometry::{chordal, turning_constant, Curve};
use mcmullen_core::surgery::SurgeryMap;
use mcmullen_core::trichotomy::classify;
use mcmullen_core::{ClassifierConfig, Complex64, ExtComplex, Exponents, MapParams};
use proptest::prelude::*;
use std::f64::consts::TAU;

const PAIRS: [(u32, u32); 4] = [(2, 3), (3, 3), (2, 4), (4, 5)];

fn exponents() -> impl Strategy<Value = Exponents> {
    (0..PAIRS.len()).prop_map(|i| Exponents::new(PAIRS[i].0, PAIRS[i].1).unwrap())
}

fn polar(rlo: f64, rhi: f64) -> impl Strategy<Value = Complex64> {
    (rlo..rhi, 0.0..TAU).prop_map(|(r, t)| cis(t) * r)
}

fn lambda() -> impl Strategy<Value = Complex64> {
    (-6.0f64..1.5, 0.0..TAU).prop_map(|(e, t)| cis(t) * 10f64.powf(e))
}

fn fin(z: ExtComplex) -> Complex64 {
    z.finite().expect("finite value")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn map_is_rotation_equivariant(exp in exponents(), lam in lambda(), z in polar(0.05, 3.0)) {
        let f = MapParams::new(lam, exp).unwrap();
        let d = f64::from(exp.degree());
        let lhs = fin(evaluate(&f, ExtComplex::Finite(z * cis(TAU / d))));
        let rhs = fin(evaluate(&f, ExtComplex::Finite(z))) * cis(TAU * f64::from(exp.m()) / d);
        prop_assert!(modulus(lhs - rhs) <= 1e-12 * modulus(rhs).max(1.0));
    }

    #[test]
    fn map_commutes_with_conjugation(exp in exponents(), lam in lambda(), z in polar(0.05, 3.0)) {
        let f = MapParams::new(lam, exp).unwrap();
        let a = fin(evaluate(&f.conj(), ExtComplex::Finite(z.conj())));
        let b = fin(evaluate(&f, ExtComplex::Finite(z))).conj();
        prop_assert!(modulus(a - b) <= 1e-14 * modulus(b).max(1.0));
    }

    #[test]
    fn critical_orbits_share_moduli(exp in exponents(), lam in lambda()) {
        let f = MapParams::new(lam, exp).unwrap();
        let crit = critical_points(&f);
        prop_assert_eq!(crit.len(), exp.degree() as usize);
        let mut orbits: Vec<Complex64> = crit.clone();
        for _ in 0..4 {
            let mods: Vec<f64> = orbits.iter().map(|&z| modulus(z)).collect();
            if mods[0] > 1e12 {
                break;
            }
            for &r in &mods {
                prop_assert!((r - mods[0]).abs() <= 1e-9 * mods[0]);
            }
            orbits = orbits.iter().map(|&z| f.eval_finite(z)).collect();
        }
        for w in crit {
            prop_assert!(modulus(derivative(&f, ExtComplex::Finite(w)).unwrap()) <= 1e-9 * f64::from(exp.m()) * modulus(w).powi(exp.m() as i32 - 1));
        }
    }

    #[test]
    fn escape_radius_doubles_modulus(exp in exponents(), lam in lambda(), t in 0.0..TAU, s in 1.0f64..50.0) {
        let f = MapParams::new(lam, exp).unwrap();
        let z = cis(t) * (f.escape_radius() * s);
        prop_assert!(modulus(f.eval_finite(z)) >= 2.0 * modulus(z) * (1.0 - 1e-12));
        let tr = iterate(&f, ExtComplex::Finite(z), 5).unwrap();
        prop_assert_eq!(tr.escape_index, Some(0));
    }

    #[test]
    fn derivative_matches_central_difference(exp in exponents(), lam in lambda(), z in polar(0.2, 2.0)) {
        let f = MapParams::new(lam, exp).unwrap();
        let h = 1e-6 * modulus(z);
        let fd = (f.eval_finite(z + h) - f.eval_finite(z - h)) / (2.0 * h);
        let d = derivative(&f, ExtComplex::Finite(z)).unwrap();
        let scale = modulus(d).max(modulus(f.eval_finite(z)) / modulus(z)).max(1.0);
        prop_assert!(modulus(fd - d) <= 1e-5 * scale);
    }

    #[test]
    fn verdict_is_conjugation_invariant(lam in lambda()) {
        let exp = Exponents::symmetric(3).unwrap();
        let cfg = ClassifierConfig::default().with_max_iter(2000);
        let a = classify(&MapParams::new(lam, exp).unwrap(), &cfg);
        let b = classify(&MapParams::new(lam.conj(), exp).unwrap(), &cfg);
        prop_assert_eq!(a.class, b.class);
        prop_assert_eq!(a.escape_index, b.escape_index);
    }

    #[test]
    fn chordal_is_a_metric(a in polar(0.0, 20.0), b in polar(0.0, 20.0), c in polar(0.0, 20.0)) {
        let (x, y, z) = (ExtComplex::Finite(a), ExtComplex::Finite(b), ExtComplex::Finite(c));
        prop_assert!((chordal(x, y) - chordal(y, x)).abs() <= 1e-15);
        prop_assert!(chordal(x, z) <= chordal(x, y) + chordal(y, z) + 1e-12);
        prop_assert!(chordal(x, y) <= 2.0 + 1e-15);
        prop_assert!((chordal(x, ExtComplex::Infinity) - 2.0 / (1.0 + a.norm_sqr()).sqrt()).abs() <= 1e-12);
    }

    #[test]
    fn turning_constant_is_rotation_invariant(t in 0.0..TAU, ex in 0.1f64..0.9) {
        // An ellipse rotated about the origin is the same curve up to an
        // isometry of the chordal metric.
        let pts = |rot: f64| Curve::from_finite((0..200).map(|k| {
            let s = TAU * k as f64 / 200.0;
            Complex64::new(0.4 * s.cos(), 0.4 * ex * s.sin()) * cis(rot)
        })).unwrap();
        let a = turning_constant(&pts(0.0), 20_000).unwrap().k_estimate;
        let b = turning_constant(&pts(t), 20_000).unwrap().k_estimate;
        prop_assert!((a - b).abs() <= 1e-9 * a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cantor_levels_nest(exp in exponents(), n in 0u32..10) {
        let ifs = CantorIfs::new(exp);
        let a = ifs.level_set(n).unwrap();
        let b = ifs.level_set(n + 1).unwrap();
        prop_assert!(b.is_well_formed());
        prop_assert!(b.is_subset_of(&a));
        prop_assert_eq!(b.len(), 2 * a.len());
        // Every interval of level n loses its middle gap and nothing else, so
        // the Hausdorff distance is at most half the largest interval.
        let longest = a.intervals().iter().map(|&(x, y)| y - x).max().unwrap();
        prop_assert!(b.hausdorff_distance(&a) <= longest / Rational::from_integer(2));
    }

    #[test]
    fn surgery_map_is_rotation_equivariant(i in 0..PAIRS.len(), z in polar(0.05, 1.6)) {
        let (l, m) = PAIRS[i];
        let f = SurgeryMap::build(Exponents::new(l, m).unwrap(), 0.5).unwrap();
        let d = f64::from(l + m);
        let a = fin(f.eval_finite(z * cis(TAU / d)));
        let b = fin(f.eval_finite(z)) * cis(TAU * f64::from(m) / d);
        prop_assert!(modulus(a - b) <= 1e-9 * modulus(b).max(1.0));
    }

    #[test]
    fn surgery_preimages_are_solutions(i in 0..PAIRS.len(), w in polar(0.0, 3.0)) {
        let (l, m) = PAIRS[i];
        let f = SurgeryMap::build(Exponents::new(l, m).unwrap(), 0.5).unwrap();
        let pts = f.preimages(ExtComplex::Finite(w)).unwrap();
        prop_assert_eq!(pts.len(), (l + m) as usize);
        for p in pts {
            prop_assert!(modulus(fin(f.eval(p)) - w) <= 1e-9 * modulus(w).max(1.0));
        }
    }
}
