use std::collections::BTreeSet;

use num_bigint::BigInt;
use periodlab_core::dynamics::linalg::mat_mul;
use periodlab_core::dynamics::{
    reduce_map_and_point, reduce_point, special_fiber_census, special_fiber_census_via, MapSpec, Monomial, Point,
    PointSpace, Polynomial, Space,
};
use periodlab_core::period_lab::{
    compute_bounds, find_periodic_points, hensel_lift_cycle, verify_theorem, PeriodCertificate,
};
use periodlab_core::{Eisenstein, FieldSpec, Ring, RingSpec};
use proptest::prelude::*;

type Terms = Vec<(Vec<u32>, i64)>;

fn poly(nvars: usize, terms: &Terms) -> Polynomial {
    Polynomial::from_terms(nvars, terms.iter().map(|(e, c)| (Monomial { exps: e.clone(), pi: 0 }, BigInt::from(*c)))).unwrap()
}

fn affine_terms(nvars: usize) -> impl Strategy<Value = Terms> {
    prop::collection::vec((prop::collection::vec(0u32..4, nvars), -6i64..7), 1..5)
}

fn affine_map(dim: usize) -> impl Strategy<Value = MapSpec> {
    prop::collection::vec(affine_terms(dim), dim)
        .prop_map(move |ps| MapSpec::new(Space::Affine, dim, ps.iter().map(|t| poly(dim, t)).collect()).unwrap())
}

/// `[x:y] ↦ [F(x,y) : G(x,y)]` homogeneous of degree `deg`, built as
/// `x^deg + (terms)` and `y^deg + (terms)` so that the base locus is often empty.
fn projective_line_map() -> impl Strategy<Value = MapSpec> {
    (1u32..4, prop::collection::vec(-4i64..5, 8), prop::collection::vec(-4i64..5, 8)).prop_map(|(deg, a, b)| {
        let side = |lead: [u32; 2], coeffs: &[i64]| {
            let mut terms: Terms = vec![(lead.to_vec(), 1)];
            for i in 0..=deg {
                terms.push((vec![i, deg - i], coeffs[i as usize] * 5));
            }
            poly(2, &terms)
        };
        MapSpec::new(Space::Projective, 1, vec![side([deg, 0], &a), side([0, deg], &b)]).unwrap()
    })
}

fn int_point(ring: &RingSpec, xs: &[u64]) -> Point<periodlab_core::DvrElement> {
    Point(xs.iter().map(|&x| ring.integer(&BigInt::from(x))).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reduction_commutes_with_evaluation(map in affine_map(1), p_idx in 0..3usize) {
        let p = [3u64, 5, 7][p_idx];
        let ring = RingSpec::new(p, 1, 1, Eisenstein::Default, 2).unwrap();
        let k = ring.residue_field().clone();
        for x in 0..p * p {
            let pt = int_point(&ring, &[x]);
            let (rm, rp) = reduce_map_and_point(&map, &ring, &pt);
            prop_assert_eq!(reduce_point(&ring, &map.evaluate(&ring, &pt).unwrap()), rm.evaluate(&k, &rp).unwrap());
        }
    }

    #[test]
    fn chain_rule(map in affine_map(2), x in 0u64..49, y in 0u64..49) {
        let ring = RingSpec::new(7, 1, 1, Eisenstein::Default, 2).unwrap();
        let pt = int_point(&ring, &[x, y]);
        let twice = map.compose(&map).unwrap();
        let lhs = twice.jacobian(&ring, &pt).unwrap();
        let image = map.evaluate(&ring, &pt).unwrap();
        let rhs = mat_mul(&ring, &map.jacobian(&ring, &image).unwrap(), &map.jacobian(&ring, &pt).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn projective_chain_rule(map in projective_line_map(), x in 0u64..25) {
        let ring = RingSpec::new(5, 1, 1, Eisenstein::Default, 2).unwrap();
        prop_assume!(map.validate(ring.residue_field(), 1 << 20).is_ok());
        let pt = map.normalize(&ring, int_point(&ring, &[x, 1]).0).unwrap();
        let twice = map.compose(&map).unwrap();
        let image = map.evaluate(&ring, &pt).unwrap();
        let rhs = mat_mul(&ring, &map.jacobian(&ring, &image).unwrap(), &map.jacobian(&ring, &pt).unwrap());
        prop_assert_eq!(twice.jacobian(&ring, &pt).unwrap(), rhs);
        prop_assert_eq!(twice.evaluate(&ring, &pt).unwrap(), map.evaluate(&ring, &image).unwrap());
    }

    #[test]
    fn census_matches_orbit_probes(map in affine_map(1), p_idx in 0..4usize) {
        let k = FieldSpec::new([2u64, 3, 5, 7][p_idx], 2).unwrap();
        let census = special_fiber_census(&map, &k).unwrap();
        let on_cycles: u64 = census.cycles.iter().sum();
        prop_assert_eq!(on_cycles + census.tails, census.n_pts);
        prop_assert!(census.cycles.iter().all(|&c| c <= census.n_pts));
        let space = PointSpace::new(Space::Affine, 1, &k, 1 << 20).unwrap();
        let probes: BTreeSet<u64> = space.points().map(|pt| map.orbit(&k, &pt, 10_000).unwrap().cycle).collect();
        prop_assert_eq!(probes, census.per_set.clone());
    }

    #[test]
    fn census_invariant_under_base_change(map in projective_line_map()) {
        let k = FieldSpec::new(5, 1).unwrap();
        prop_assume!(map.validate(&k, 1 << 20).is_ok());
        let base = special_fiber_census(&map, &k).unwrap();
        for e in 1..=3 {
            for choice in [Eisenstein::Default, Eisenstein::alternate(5, e)] {
                let ring = RingSpec::over_field(k.clone(), e, choice, 2 * e).unwrap();
                prop_assert_eq!(&special_fiber_census_via(&map, &ring, 1 << 20).unwrap(), &base);
            }
        }
    }
}

fn check_certificates(map: &MapSpec, ring: &RingSpec, certs: &[PeriodCertificate]) {
    let k = ring.residue_field();
    let bounds = compute_bounds(&special_fiber_census(map, k).unwrap(), ring.e(), ring.p());
    for c in certs {
        assert_eq!(map.iterate(ring, &c.point, c.n).unwrap(), c.point);
        for j in 1..c.n {
            assert_ne!(map.iterate(ring, &c.point, j).unwrap(), c.point);
        }
        let residue = reduce_point(ring, &c.point);
        assert_eq!(map.orbit(k, &residue, 10_000).unwrap().cycle, c.m);
        assert_eq!(c.n % c.m, 0);
        assert_eq!(c.n, c.m * c.r * ring.p().pow(c.t));
        assert_ne!(c.r % ring.p(), 0);
        if c.n % ring.p() != 0 {
            assert!(num_bigint::BigUint::from(c.n) <= bounds.coprime);
        }
        assert!(c.checks.m_divides_n && c.checks.coprime_bound_ok);
    }
}

fn sample_maps() -> Vec<(MapSpec, u64)> {
    let aff = |t: &[(u32, i64)]| {
        let terms: Terms = t.iter().map(|&(e, c)| (vec![e], c)).collect();
        MapSpec::new(Space::Affine, 1, vec![poly(1, &terms)]).unwrap()
    };
    let proj = |a: &[([u32; 2], i64)], b: &[([u32; 2], i64)]| {
        let mk = |t: &[([u32; 2], i64)]| poly(2, &t.iter().map(|&(e, c)| (e.to_vec(), c)).collect());
        MapSpec::new(Space::Projective, 1, vec![mk(a), mk(b)]).unwrap()
    };
    vec![
        (aff(&[(2, 1)]), 7),
        (aff(&[(3, 1)]), 5),
        (aff(&[(2, 1), (0, -1)]), 3),
        (aff(&[(2, 1), (0, 1)]), 5),
        (proj(&[([3, 0], 1)], &[([0, 3], 1)]), 5),
        (proj(&[([2, 0], 1), ([0, 2], 1)], &[([0, 2], 1)]), 3),
    ]
}

#[test]
fn certificates_satisfy_their_invariants() {
    for (map, p) in sample_maps() {
        for e in 1..=2 {
            let ring = RingSpec::new(p, 1, e, Eisenstein::Default, 3 * e).unwrap();
            check_certificates(&map, &ring, &find_periodic_points(&map, &ring, 6).unwrap());
        }
    }
}

#[test]
fn certificates_are_stable_under_precision() {
    for (map, p) in sample_maps() {
        for e in 1..=2 {
            let low = RingSpec::new(p, 1, e, Eisenstein::Default, 2 * e).unwrap();
            let high = low.with_precision(4 * e).unwrap();
            let project = |certs: Vec<PeriodCertificate>| -> BTreeSet<Point<periodlab_core::DvrElement>> {
                certs.into_iter().map(|c| Point(c.point.0.iter().map(|x| low.coerce(x)).collect())).collect()
            };
            let at_low = project(find_periodic_points(&map, &low, 4).unwrap());
            let at_high = project(find_periodic_points(&map, &high, 4).unwrap());
            assert_eq!(at_high, at_low, "p = {p}, e = {e}");
        }
    }
}

#[test]
fn hensel_cycles_keep_their_period() {
    let k7 = FieldSpec::new(7, 1).unwrap();
    let sq = &sample_maps()[0].0;
    let cycle = [Point(vec![k7.elem_from_u64(2)]), Point(vec![k7.elem_from_u64(4)])];
    for e in 1..=2 {
        for factor in [2, 4, 8] {
            let ring = RingSpec::over_field(k7.clone(), e, Eisenstein::Default, factor * e).unwrap();
            let lifted = hensel_lift_cycle(sq, &cycle, &ring).unwrap();
            let orbit = sq.orbit(&ring, &lifted[0], 1000).unwrap();
            assert_eq!((orbit.tail, orbit.cycle), (0, 2));
            for (pt, res) in lifted.iter().zip(&cycle) {
                assert_eq!(&reduce_point(&ring, pt), res);
            }
        }
    }
}

#[test]
fn verification_reports_are_consistent() {
    let (map, p) = sample_maps()[4].clone();
    let report = verify_theorem(&map, p, 1, &[1, 2], 8, None).unwrap();
    assert!(report.invariance_ok);
    assert_eq!(report.stages.len(), 4);
    for s in &report.stages {
        assert_eq!(s.census, report.census);
    }
}
