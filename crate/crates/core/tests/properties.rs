use dustlab_core::analysis::{pluriphase_polynomial_solve, pluriphase_recursion_check, scan_inequality, RecursionVariant};
use dustlab_core::bounds::{f1, f2, ratio_lower_bound_thm41, ratio_upper_bound_thm41};
use dustlab_core::distance::DistanceOracle;
use dustlab_core::ifs::{build_cantor_dust, construction_step, minkowski_dimension, Word};
use dustlab_core::volume::{volume, Region, RegionKind};
use dustlab_core::CantorDustParams;
use proptest::prelude::*;

fn oracle(r: f64) -> DistanceOracle {
    DistanceOracle::new(CantorDustParams::new(r).unwrap())
}

fn plane_volume(r: f64, eps: f64, budget: f64) -> dustlab_core::VolumeResult {
    let params = CantorDustParams::new(r).unwrap();
    volume(&params, eps, &Region::new(RegionKind::Plane, r).unwrap(), budget).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn word_images_are_construction_squares(
        r in 2.05f64..40.0,
        letters in prop::collection::vec(1u8..=4, 0..5),
    ) {
        let system = build_cantor_dust(r).unwrap();
        let n = letters.len();
        let map = system.word_map(&Word::new(letters).unwrap()).unwrap();
        let side = r.powi(-(n as i32));
        prop_assert!((map.ratio() - side).abs() <= 1e-14 * side);
        let squares = construction_step(&system, n).unwrap();
        let t = map.translation();
        let found = squares.iter().any(|s| {
            (s.origin[0] - t[0]).abs() < 1e-14 && (s.origin[1] - t[1]).abs() < 1e-14
                && (s.side - side).abs() <= 1e-14 * side
        });
        prop_assert!(found);
        prop_assert!(t[0] >= 0.0 && t[1] >= 0.0 && t[0] + side <= 1.0 + 1e-15 && t[1] + side <= 1.0 + 1e-15);
    }

    #[test]
    fn osc_holds_above_two(r in 2.000_001f64..1e6) {
        prop_assert!(build_cantor_dust(r).unwrap().satisfies_osc());
    }

    #[test]
    fn dimension_strictly_decreasing(a in 2.001f64..1e3, f in 1.001f64..10.0) {
        prop_assert!(minkowski_dimension(a * f).unwrap() < minkowski_dimension(a).unwrap());
    }

    #[test]
    fn construction_corners_lie_on_attractor(r in 2.1f64..50.0, n in 0usize..4, pick in 0usize..256) {
        let system = build_cantor_dust(r).unwrap();
        let squares = construction_step(&system, n).unwrap();
        let sq = squares[pick % squares.len()];
        let o = oracle(r);
        for c in sq.corners() {
            let d = o.distance(c, 1e-12).unwrap();
            prop_assert!(d.lower <= 1e-12, "{:?} at {:?}", d, c);
        }
    }

    #[test]
    fn distance_is_lipschitz(
        r in 2.1f64..50.0,
        x in -0.5f64..1.5, y in -0.5f64..1.5,
        dx in -0.3f64..0.3, dy in -0.3f64..0.3,
    ) {
        let o = oracle(r);
        let p = [x, y];
        let q = [x + dx, y + dy];
        let a = o.distance(p, 1e-10).unwrap();
        let b = o.distance(q, 1e-10).unwrap();
        let gap = dx.hypot(dy) * (1.0 + 1e-12);
        prop_assert!(a.lower <= b.upper + gap && b.lower <= a.upper + gap);
    }

    #[test]
    fn distance_has_dihedral_symmetry(r in 2.1f64..50.0, x in -0.5f64..1.5, y in -0.5f64..1.5) {
        let o = oracle(r);
        let base = o.distance([x, y], 1e-10).unwrap();
        let images = [
            [y, x], [1.0 - x, y], [x, 1.0 - y], [1.0 - x, 1.0 - y],
            [1.0 - y, x], [y, 1.0 - x], [1.0 - y, 1.0 - x],
        ];
        for p in images {
            let d = o.distance(p, 1e-10).unwrap();
            // 1 - x is rounded, so allow its Lipschitz effect.
            let slack = 4.0 * f64::EPSILON;
            prop_assert!(d.lower <= base.upper + slack && base.lower <= d.upper + slack, "{:?} vs {:?}", d, base);
        }
    }

    #[test]
    fn refinement_is_nested(r in 2.1f64..50.0, x in -0.5f64..1.5, y in -0.5f64..1.5) {
        let o = oracle(r);
        let mut prev = o.distance([x, y], 1e-2).unwrap();
        for tol in [1e-4, 1e-6, 1e-8, 1e-10] {
            let d = o.distance([x, y], tol).unwrap();
            prop_assert!(d.lower >= prev.lower && d.upper <= prev.upper);
            prop_assert!(d.width() <= tol);
            prev = d;
        }
    }

    #[test]
    fn distance_is_deterministic(r in 2.1f64..50.0, x in -0.5f64..1.5, y in -0.5f64..1.5) {
        let o = oracle(r);
        prop_assert_eq!(o.distance([x, y], 1e-9).unwrap(), o.distance([x, y], 1e-9).unwrap());
    }

    #[test]
    fn thm41_bound_increasing(a in 1.01f64..1e6, f in 1.0001f64..2.0) {
        let lo = ratio_lower_bound_thm41(a).unwrap();
        let hi = ratio_lower_bound_thm41(a * f).unwrap();
        if lo.hi() < hi.lo() || hi.hi() < lo.lo() {
            prop_assert!(lo.hi() < hi.lo());
        }
    }

    #[test]
    fn thm41_separation(r in 30.0f64..1e12) {
        prop_assert!(ratio_lower_bound_thm41(r).unwrap().lo() > ratio_upper_bound_thm41().hi());
    }

    #[test]
    fn f_enclosures_are_tight(r in 2.0001f64..30.0) {
        let a = f1(r).unwrap();
        let b = f2(r).unwrap();
        prop_assert!(a.width() <= 1e-11 * a.mid() && b.width() <= 1e-11 * b.mid());
        prop_assert!(a.certainly_gt(&b));
    }

    #[test]
    fn polynomial_solution_constant(r in 2.01f64..1e4) {
        let s = pluriphase_polynomial_solve(r).unwrap();
        prop_assert!((s.a + 3.0 * std::f64::consts::PI).abs() <= 1e-12);
        prop_assert!(s.b.abs() <= 1e-12 && s.c.abs() <= 1e-12 && s.contradiction);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn volume_monotone_in_eps(r in 2.5f64..40.0, eps in 0.02f64..0.3, f in 1.01f64..1.5) {
        let budget = 5e-3;
        let a = plane_volume(r, eps, budget);
        let b = plane_volume(r, eps * f, budget);
        prop_assert!(a.enclosure.lo() <= b.enclosure.hi());
    }

    #[test]
    fn volume_containment(r in 2.5f64..40.0, eps in 0.01f64..0.5) {
        let v = plane_volume(r, eps, 5e-3);
        prop_assert!(v.enclosure.lo() <= (1.0 + 2.0 * eps).powi(2));
        // Level-n squares lie in C_eps once eps reaches their half-diagonal.
        for n in (0..8).filter(|&n| eps >= 0.5f64.sqrt() * r.powi(-n)) {
            prop_assert!(v.enclosure.hi() >= 4f64.powi(n) * r.powi(-2 * n));
        }
    }

    #[test]
    fn budget_halving_never_widens(r in 2.5f64..40.0, eps in 0.02f64..0.3) {
        let a = plane_volume(r, eps, 4e-3);
        let b = plane_volume(r, eps, 2e-3);
        prop_assert!(b.enclosure.width() <= a.enclosure.width());
        prop_assert!(b.enclosure.overlaps(&a.enclosure));
    }

    #[test]
    fn volume_deterministic(r in 2.5f64..40.0, eps in 0.02f64..0.3) {
        prop_assert_eq!(plane_volume(r, eps, 5e-3), plane_volume(r, eps, 5e-3));
    }

    #[test]
    fn region_volumes_are_ordered(r in 2.5f64..40.0, eps in 0.02f64..0.2) {
        let params = CantorDustParams::new(r).unwrap();
        let get = |kind| volume(&params, eps, &Region::new(kind, r).unwrap(), 2e-3).unwrap().enclosure;
        let plane = get(RegionKind::Plane);
        let square = get(RegionKind::UnitSquare);
        let cross = get(RegionKind::GammaCross);
        let arms = get(RegionKind::GammaMinusCenter);
        prop_assert!(arms.lo() <= cross.hi() && cross.lo() <= square.hi() && square.lo() <= plane.hi());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn recursion_never_certifiably_fails(r in 2.5f64..20.0, frac in 0.1f64..0.9) {
        let eps = frac * (r - 2.0) / (2.0 * r);
        let params = CantorDustParams::new(r).unwrap();
        for variant in [RecursionVariant::Gamma, RecursionVariant::P] {
            let c = pluriphase_recursion_check(&params, eps, 2e-3, variant).unwrap();
            prop_assert!(c.consistent, "{:?}", c);
        }
    }
}

#[test]
fn scan_is_deterministic() {
    assert_eq!(scan_inequality(2.0001, 3.0, 1e-3).unwrap(), scan_inequality(2.0001, 3.0, 1e-3).unwrap());
}
