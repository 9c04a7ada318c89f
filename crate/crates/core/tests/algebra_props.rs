use num_bigint::BigInt;
use periodlab_core::residue_field::FieldOp;
use periodlab_core::{Eisenstein, FieldSpec, Ring, RingSpec};
use proptest::prelude::*;

const PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

fn field_params() -> impl Strategy<Value = (u64, u32)> {
    (0..PRIMES.len(), 1u32..=3).prop_map(|(i, f)| (PRIMES[i], f))
}

fn ring_params() -> impl Strategy<Value = (u64, u32, u32, bool)> {
    (0..4usize, 1u32..=2, 1u32..=3, any::<bool>()).prop_map(|(i, f, e, alt)| (PRIMES[i], f, e, alt))
}

fn ring_of(p: u64, f: u32, e: u32, alt: bool, n: u32) -> RingSpec {
    let choice = if alt { Eisenstein::alternate(p, e) } else { Eisenstein::Default };
    RingSpec::new(p, f, e, choice, n).unwrap()
}

/// Random element built as a sum of `c_i·π^i` with small integers `c_i`.
fn element(ring: &RingSpec, digits: &[(i64, u64)]) -> periodlab_core::DvrElement {
    let k = ring.residue_field();
    digits.iter().enumerate().fold(ring.zero(), |acc, (i, &(c, unit_index))| {
        let unit = ring.lift(&k.elem_from_index(unit_index % k.size()));
        let term = ring.mul(&ring.mul(&ring.integer(&BigInt::from(c)), &unit), &ring.uniformizer_pow(i as u32));
        ring.add(&acc, &term)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fermat_and_order((p, f) in field_params(), idx in any::<u64>()) {
        let k = FieldSpec::new(p, f).unwrap();
        let q = k.size();
        let a = k.elem_from_index(idx % q);
        prop_assume!(!k.is_zero_elem(&a));
        prop_assert_eq!(k.pow(&a, q - 1), k.one());
        let ord = k.mult_order(&a).unwrap();
        prop_assert_eq!((q - 1) % ord, 0);
        prop_assert_eq!(k.pow(&a, ord), k.one());
    }

    #[test]
    fn field_axioms((p, f) in field_params(), i in any::<u64>(), j in any::<u64>(), l in any::<u64>()) {
        let k = FieldSpec::new(p, f).unwrap();
        let q = k.size();
        let (a, b, c) = (k.elem_from_index(i % q), k.elem_from_index(j % q), k.elem_from_index(l % q));
        prop_assert_eq!(k.mul(&a, &k.add(&b, &c)), k.add(&k.mul(&a, &b), &k.mul(&a, &c)));
        prop_assert_eq!(k.mul(&k.mul(&a, &b), &c), k.mul(&a, &k.mul(&b, &c)));
        prop_assert_eq!(k.sub(&k.add(&a, &b), &b), a.clone());
        if !k.is_zero_elem(&b) {
            let inv = k.apply(FieldOp::Inv, &b, &b).unwrap();
            prop_assert_eq!(k.mul(&b, &inv), k.one());
        }
    }

    #[test]
    fn valuation_is_additive(
        (p, f, e, alt) in ring_params(),
        xs in prop::collection::vec((-20i64..20, any::<u64>()), 1..6),
        ys in prop::collection::vec((-20i64..20, any::<u64>()), 1..6),
    ) {
        let ring = ring_of(p, f, e, alt, 3 * e);
        let (a, b) = (element(&ring, &xs), element(&ring, &ys));
        let (va, vb) = (ring.valuation(&a), ring.valuation(&b));
        let vab = ring.valuation(&ring.mul(&a, &b));
        if va + vb < ring.precision() {
            prop_assert_eq!(vab, va + vb);
        } else {
            prop_assert_eq!(vab, ring.precision());
        }
    }

    #[test]
    fn ring_axioms_and_inverse(
        (p, f, e, alt) in ring_params(),
        xs in prop::collection::vec((-20i64..20, any::<u64>()), 1..6),
        ys in prop::collection::vec((-20i64..20, any::<u64>()), 1..6),
        zs in prop::collection::vec((-20i64..20, any::<u64>()), 1..6),
    ) {
        let ring = ring_of(p, f, e, alt, 2 * e + 1);
        let (a, b, c) = (element(&ring, &xs), element(&ring, &ys), element(&ring, &zs));
        prop_assert_eq!(ring.mul(&a, &ring.add(&b, &c)), ring.add(&ring.mul(&a, &b), &ring.mul(&a, &c)));
        prop_assert_eq!(ring.mul(&ring.mul(&a, &b), &c), ring.mul(&a, &ring.mul(&b, &c)));
        prop_assert_eq!(ring.reduce(&ring.mul(&a, &b)), ring.residue_field().mul(&ring.reduce(&a), &ring.reduce(&b)));
        if ring.is_unit(&a) {
            prop_assert_eq!(ring.mul(&a, &ring.inv(&a).unwrap()), ring.one());
        } else {
            prop_assert!(ring.inv(&a).is_err());
        }
    }

    #[test]
    fn teichmuller_lifts((p, f, e, alt) in ring_params(), idx in any::<u64>()) {
        let ring = ring_of(p, f, e, alt, 4 * e);
        let k = ring.residue_field();
        let x = k.elem_from_index(idx % k.size());
        let w = ring.teichmuller_lift(&x);
        prop_assert_eq!(ring.reduce(&w), x.clone());
        prop_assert_eq!(ring.pow(&w, k.size()), w.clone());
        if !k.is_zero_elem(&x) {
            prop_assert_eq!(ring.pow(&w, k.size() - 1), ring.one());
        }
    }

    #[test]
    fn integers_mod_prime_power(i in 0..4usize, n in 1u32..=4, a in any::<u32>(), b in any::<u32>()) {
        let p = PRIMES[i];
        let ring = RingSpec::new(p, 1, 1, Eisenstein::Default, n).unwrap();
        let m = p.pow(n);
        let (a, b) = (u64::from(a) % m, u64::from(b) % m);
        let (x, y) = (ring.integer(&BigInt::from(a)), ring.integer(&BigInt::from(b)));
        prop_assert_eq!(ring.as_integer(&ring.mul(&x, &y)), Some(a * b % m));
        prop_assert_eq!(ring.as_integer(&ring.add(&x, &y)), Some((a + b) % m));
        prop_assert_eq!(ring.as_integer(&ring.sub(&x, &y)), Some((a + m - b) % m));
    }
}

#[test]
fn mu_order_is_independent_of_the_tower() {
    for (p, f) in [(3u64, 1u32), (5, 1), (3, 2), (7, 1)] {
        let q = p.pow(f);
        for e in 1..=3 {
            for alt in [false, true] {
                let mu = ring_of(p, f, e, alt, 3 * e).mu_prime_to_p(1 << 20).unwrap();
                assert_eq!(mu.order, q - 1);
            }
        }
    }
}
