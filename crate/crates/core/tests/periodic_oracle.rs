//! `find_periodic_points` over `Z/p^N` against an exhaustive scan done with
//! plain integer arithmetic.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use periodlab_core::dynamics::{MapSpec, Monomial, Polynomial, Space};
use periodlab_core::period_lab::find_periodic_points;
use periodlab_core::{Eisenstein, RingSpec};

/// `Σ c_k x^k` as (exponent, coefficient) pairs.
type IntPoly = &'static [(u32, i64)];

fn eval(poly: IntPoly, x: u128, modulus: u128) -> u128 {
    poly.iter().fold(0, |acc, &(k, c)| {
        let mut term = c.rem_euclid(modulus as i64) as u128;
        for _ in 0..k {
            term = term * x % modulus;
        }
        (acc + term) % modulus
    })
}

fn iterate(poly: IntPoly, x: u128, n: u64, modulus: u128) -> u128 {
    (0..n).fold(x, |y, _| eval(poly, y, modulus))
}

/// Classes mod `p^N` that are the image of a solution of `f^n(y) = y` mod
/// `p^{2N}` for some `n ≤ n_max`, with their exact period mod `p^N`.
fn oracle(poly: IntPoly, p: u128, prec: u32, n_max: u64) -> BTreeSet<(u64, u128)> {
    let low = p.pow(prec);
    let high = p.pow(2 * prec);
    let mut classes = BTreeSet::new();
    for y in 0..high {
        if (1..=n_max).any(|n| iterate(poly, y, n, high) == y) {
            classes.insert(y % low);
        }
    }
    classes
        .into_iter()
        .map(|x| {
            let period = (1..).find(|&j| iterate(poly, x, j, low) == x).unwrap();
            (period, x)
        })
        .collect()
}

fn map_of(poly: IntPoly) -> MapSpec {
    let terms = poly.iter().map(|&(k, c)| (Monomial { exps: vec![k], pi: 0 }, BigInt::from(c)));
    MapSpec::new(Space::Affine, 1, vec![Polynomial::from_terms(1, terms).unwrap()]).unwrap()
}

const MAPS: &[IntPoly] = &[
    &[(2, 1)],
    &[(3, 1)],
    &[(2, 1), (0, -1)],
    &[(2, 1), (1, 1)],
    &[(1, -1)],
    &[(2, 1), (0, 2)],
    &[(3, 1), (1, 2), (0, 1)],
    &[(5, 1)],
    &[(7, 1), (1, 3)],
];

#[test]
fn matches_exhaustive_scan() {
    for p in [2u64, 3, 5, 7] {
        for prec in 1..=3u32 {
            let ring = RingSpec::new(p, 1, 1, Eisenstein::Default, prec).unwrap();
            for &poly in MAPS {
                let expected = oracle(poly, p as u128, prec, 4);
                let got: BTreeSet<(u64, u128)> = find_periodic_points(&map_of(poly), &ring, 4)
                    .unwrap()
                    .into_iter()
                    .map(|c| (c.n, ring.as_integer(&c.point.0[0]).unwrap() as u128))
                    .collect();
                assert_eq!(got, expected, "p = {p}, N = {prec}, map {poly:?}");
            }
        }
    }
}
