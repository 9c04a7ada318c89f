//! Torsion primes over totally ramified towers.
//!
//! A prime `ℓ` carrying rational `ℓ`-torsion over the tower must divide
//! `q^{m·p^b} - 1` for a period `m` prime to `p`; outside the progression
//! `ℓ ≡ 1 (mod p^a)` only finitely many such `ℓ` exist. This module sieves
//! them, measures the density of the progressions, counts points of
//! elliptic curves over finite fields and tracks component-group orders
//! along a tower.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Pow, Zero};

use crate::arith::{factor_u64, is_prime, lcm, primes_up_to, valuation, Factorizer};
use crate::error::{Error, Result};
use crate::residue_field::{FieldElem, FieldSpec};
use crate::ring::Ring;

/// Largest cutoff accepted by [`density_estimate`].
pub const DEFAULT_SIEVE_CAP: u64 = 10_000_000;
/// `q^E - 1` with more bits than this is not factored.
pub const DEFAULT_MAX_BITS: u64 = 4096;
/// Largest field accepted by the elliptic-curve routines.
pub const ELLIPTIC_FIELD_CAP: u64 = 1_000_000;
/// Curves with at most this many points get every element order computed.
pub const EXHAUSTIVE_GROUP_LIMIT: u64 = 20_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SievePrime {
    pub ell: BigUint,
    /// Witness `ℓ | q^{m·p^b} - 1` with `m·p^b` minimal.
    pub m: u64,
    pub b: u32,
    /// `ℓ = p`, which the congruence condition does not speak to.
    pub is_p: bool,
    /// Above 2^64 and only a Miller-Rabin probable prime.
    pub probable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveResult {
    pub q: u64,
    pub p: u64,
    pub a: u32,
    pub m_max: u64,
    /// Sorted by `ℓ`.
    pub primes: Vec<SievePrime>,
    /// No cofactor left unsplit and no exponent skipped.
    pub complete: bool,
    pub cofactors: Vec<BigUint>,
    /// Exponents `m·p^b` whose `q^E - 1` exceeded the size budget.
    pub skipped: Vec<u64>,
}

impl SieveResult {
    pub fn ells(&self) -> Vec<BigUint> {
        self.primes.iter().map(|s| s.ell.clone()).collect()
    }
}

fn mobius(n: u64) -> i8 {
    let f = factor_u64(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (l, e) in factor_u64(n) {
        let len = out.len();
        let mut pw = 1;
        for _ in 0..e {
            pw *= l;
            for i in 0..len {
                out.push(out[i] * pw);
            }
        }
    }
    out.sort_unstable();
    out
}

/// `Φ_d(q)` from `Π_{k | d} (q^{d/k} - 1)^{μ(k)}`.
pub fn cyclotomic_value(d: u64, q: u64) -> BigUint {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    let base = BigUint::from(q);
    for k in divisors(d) {
        let term = Pow::pow(&base, d / k) - BigUint::one();
        match mobius(k) {
            1 => num *= term,
            -1 => den *= term,
            _ => {}
        }
    }
    num / den
}

/// `q^{m·p^b} ≡ 1 (mod ℓ)`, checked directly.
pub fn verify_witness(q: u64, p: u64, prime: &SievePrime) -> bool {
    let exp = BigUint::from(prime.m) * Pow::pow(&BigUint::from(p), prime.b);
    BigUint::from(q).modpow(&exp, &prime.ell) == BigUint::one() % &prime.ell
}

/// Primes `ℓ ≢ 1 (mod p^a)` dividing some `q^{m·p^b} - 1` with
/// `m ≤ m_max`, `gcd(m, p) = 1` and `b < a`.
pub fn sieve(q: u64, p: u64, a: u32, m_max: u64) -> Result<SieveResult> {
    sieve_with(q, p, a, m_max, &Factorizer::default(), DEFAULT_MAX_BITS)
}

pub fn sieve_with(q: u64, p: u64, a: u32, m_max: u64, factorizer: &Factorizer, max_bits: u64) -> Result<SieveResult> {
    if q < 2 {
        return Err(Error::BadInput("q must be at least 2".into()));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if a == 0 || m_max == 0 {
        return Err(Error::BadInput("a and m_max must be at least 1".into()));
    }
    let p_pow = |b: u32| p.checked_pow(b).ok_or_else(|| Error::BadInput("p^b overflows".into()));
    let modulus = BigUint::from(p_pow(a)?);
    let mut exponents = Vec::new();
    for b in 0..a {
        for m in (1..=m_max).filter(|m| m % p != 0) {
            let e = m.checked_mul(p_pow(b)?).ok_or_else(|| Error::BadInput("exponent overflows".into()))?;
            exponents.push((e, m, b));
        }
    }
    exponents.sort_unstable();
    let bits_per = 64 - u64::from(q.leading_zeros());
    let mut skipped = Vec::new();
    let mut orders = BTreeSet::new();
    for &(e, _, _) in &exponents {
        if e.saturating_mul(bits_per) > max_bits {
            skipped.push(e);
        } else {
            orders.extend(divisors(e));
        }
    }
    let mut found: BTreeMap<BigUint, bool> = BTreeMap::new();
    let mut cofactors = Vec::new();
    for d in orders {
        let value = cyclotomic_value(d, q);
        if value.is_zero() || value.is_one() {
            continue;
        }
        let fact = factorizer.factor(&value);
        for f in fact.factors {
            *found.entry(f.prime).or_insert(false) |= f.probable;
        }
        cofactors.extend(fact.cofactor);
    }
    let big_q = BigUint::from(q);
    let big_p = BigUint::from(p);
    let mut primes = Vec::new();
    for (ell, probable) in found {
        if (&ell % &modulus).is_one() || (&big_q % &ell).is_zero() {
            continue;
        }
        let witness = exponents
            .iter()
            .find(|&&(e, _, _)| !skipped.contains(&e) && big_q.modpow(&BigUint::from(e), &ell).is_one());
        let &(_, m, b) = witness.expect("every factor divides some q^E - 1");
        primes.push(SievePrime { is_p: ell == big_p, ell, m, b, probable });
    }
    cofactors.sort();
    cofactors.dedup();
    Ok(SieveResult { q, p, a, m_max, complete: cofactors.is_empty() && skipped.is_empty(), primes, cofactors, skipped })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityLevel {
    pub a: u32,
    /// `p^a`.
    pub modulus: u64,
    /// Primes `ℓ ≤ X` with `ℓ ≡ 1 (mod p^a)`.
    pub count: u64,
    pub ratio: f64,
    /// `1/φ(p^a)`.
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    pub p: u64,
    pub x: u64,
    pub count_1modp: u64,
    pub prime_count: u64,
    pub ratio: f64,
    /// Levels `a = 1, 2, ...` while `p^a ≤ X`.
    pub levels: Vec<DensityLevel>,
}

/// Share of primes up to `x` that are `≡ 1 (mod p^a)`.
pub fn density_estimate(p: u64, x: u64) -> Result<DensityEstimate> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if x > DEFAULT_SIEVE_CAP {
        return Err(Error::CapExceeded(x, DEFAULT_SIEVE_CAP));
    }
    let primes = primes_up_to(x);
    let total = primes.len() as u64;
    let ratio_of = |count: u64| if total == 0 { 0.0 } else { count as f64 / total as f64 };
    let mut levels = Vec::new();
    let mut modulus = p;
    let mut a = 1;
    while modulus <= x.max(p) {
        let count = primes.iter().filter(|&&l| l % modulus == 1).count() as u64;
        let phi = modulus / p * (p - 1);
        levels.push(DensityLevel { a, modulus, count, ratio: ratio_of(count), expected: 1.0 / phi as f64 });
        match modulus.checked_mul(p) {
            Some(m) => modulus = m,
            None => break,
        }
        a += 1;
    }
    let count_1modp = levels[0].count;
    Ok(DensityEstimate { p, x, count_1modp, prime_count: total, ratio: ratio_of(count_1modp), levels })
}

/// `y^2 = x^3 + a4·x + a6` over a finite field of characteristic above 3.
#[derive(Debug, Clone)]
pub struct Curve {
    field: FieldSpec,
    a4: FieldElem,
    a6: FieldElem,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum CurvePoint {
    Infinity,
    Affine(FieldElem, FieldElem),
}

impl Curve {
    pub fn new(a4: i64, a6: i64, field: &FieldSpec) -> Result<Self> {
        if field.p() <= 3 {
            return Err(Error::BadInput("characteristic must exceed 3".into()));
        }
        if field.size() > ELLIPTIC_FIELD_CAP {
            return Err(Error::FieldTooLarge {
                what: "elliptic curve field",
                size: u128::from(field.size()),
                cap: ELLIPTIC_FIELD_CAP,
            });
        }
        let k = field;
        let a4 = k.integer(&BigInt::from(a4));
        let a6 = k.integer(&BigInt::from(a6));
        let disc = k.add(
            &k.mul(&k.integer(&BigInt::from(4)), &k.pow(&a4, 3)),
            &k.mul(&k.integer(&BigInt::from(27)), &k.mul(&a6, &a6)),
        );
        if k.is_zero_elem(&disc) {
            return Err(Error::SingularCurve);
        }
        Ok(Curve { field: field.clone(), a4, a6 })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    fn rhs(&self, x: &FieldElem) -> FieldElem {
        let k = &self.field;
        k.add(&k.add(&k.pow(x, 3), &k.mul(&self.a4, x)), &self.a6)
    }

    pub fn contains(&self, pt: &CurvePoint) -> bool {
        match pt {
            CurvePoint::Infinity => true,
            CurvePoint::Affine(x, y) => self.field.mul(y, y) == self.rhs(x),
        }
    }

    /// Every rational point, the point at infinity first.
    pub fn points(&self) -> Vec<CurvePoint> {
        let k = &self.field;
        let q = k.size() as usize;
        let mut roots: Vec<Vec<u64>> = vec![Vec::new(); q];
        for y in k.elements() {
            roots[k.index_of(&k.mul(&y, &y)) as usize].push(k.index_of(&y));
        }
        let mut out = vec![CurvePoint::Infinity];
        for x in k.elements() {
            for &y in &roots[k.index_of(&self.rhs(&x)) as usize] {
                out.push(CurvePoint::Affine(x.clone(), k.elem_from_index(y)));
            }
        }
        out
    }

    pub fn neg(&self, pt: &CurvePoint) -> CurvePoint {
        match pt {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine(x, y) => CurvePoint::Affine(x.clone(), self.field.neg(y)),
        }
    }

    pub fn add(&self, a: &CurvePoint, b: &CurvePoint) -> CurvePoint {
        let k = &self.field;
        let (x1, y1, x2, y2) = match (a, b) {
            (CurvePoint::Infinity, _) => return b.clone(),
            (_, CurvePoint::Infinity) => return a.clone(),
            (CurvePoint::Affine(x1, y1), CurvePoint::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let slope = if x1 == x2 {
            if k.is_zero_elem(&k.add(y1, y2)) {
                return CurvePoint::Infinity;
            }
            let three = k.integer(&BigInt::from(3));
            let num = k.add(&k.mul(&three, &k.mul(x1, x1)), &self.a4);
            k.mul(&num, &k.inv(&k.add(y1, y1)).expect("y1 is nonzero"))
        } else {
            k.mul(&k.sub(y2, y1), &k.inv(&k.sub(x2, x1)).expect("x1 != x2"))
        };
        let x3 = k.sub(&k.sub(&k.mul(&slope, &slope), x1), x2);
        let y3 = k.sub(&k.mul(&slope, &k.sub(x1, &x3)), y1);
        CurvePoint::Affine(x3, y3)
    }

    pub fn mul(&self, n: u64, pt: &CurvePoint) -> CurvePoint {
        let mut acc = CurvePoint::Infinity;
        let mut base = pt.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            n >>= 1;
        }
        acc
    }

    /// Order of `pt`, given the group order.
    pub fn point_order(&self, pt: &CurvePoint, group_order: u64) -> u64 {
        let mut order = group_order;
        for (l, _) in factor_u64(group_order) {
            while order.is_multiple_of(l) && self.mul(order / l, pt) == CurvePoint::Infinity {
                order /= l;
            }
        }
        order
    }
}

/// `#E(F_q)` and the structure `Z/m × Z/n`, `n | m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EllipticCount {
    pub q: u64,
    pub order: u64,
    /// Group exponent.
    pub m: u64,
    pub n: u64,
    /// Every element order was computed (otherwise a deterministic sample).
    pub exhaustive: bool,
}

/// `|#E - (q + 1)| ≤ 2√q`, in integers.
pub fn hasse_ok(order: u64, q: u64) -> bool {
    let t = i128::from(order) - i128::from(q) - 1;
    t * t <= 4 * i128::from(q)
}

pub fn elliptic_point_count(a4: i64, a6: i64, field: &FieldSpec) -> Result<EllipticCount> {
    let curve = Curve::new(a4, a6, field)?;
    let points = curve.points();
    let order = points.len() as u64;
    let exhaustive = order <= EXHAUSTIVE_GROUP_LIMIT;
    let stride = if exhaustive { 1 } else { (points.len() / 256).max(1) };
    let mut exponent = 1u64;
    for pt in points.iter().step_by(stride) {
        exponent = lcm(exponent, curve.point_order(pt, order));
        if exponent == order {
            break;
        }
    }
    Ok(EllipticCount { q: field.size(), order, m: exponent, n: order / exponent, exhaustive })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionPrimes {
    pub count: EllipticCount,
    /// Prime divisors of `#E(k)` other than `p`.
    pub primes: Vec<u64>,
    /// The residue characteristic, whose torsion reduction does not see.
    pub undetermined: u64,
}

pub fn good_reduction_torsion_primes(a4: i64, a6: i64, field: &FieldSpec) -> Result<TorsionPrimes> {
    let count = elliptic_point_count(a4, a6, field)?;
    let primes = factor_u64(count.order).into_iter().map(|(l, _)| l).filter(|&l| l != field.p()).collect();
    Ok(TorsionPrimes { count, primes, undetermined: field.p() })
}

/// Component-group orders `v_n(Δ) = e_n·v_delta` along a tower.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    pub p: u64,
    pub v_delta: u64,
    pub e_seq: Vec<u64>,
    pub values: Vec<u64>,
    pub prime_to_p: Vec<u64>,
    /// First index from which the prime-to-`p` parts are constant.
    pub stable_from: usize,
    /// At least two stages and the last two prime-to-`p` parts agree.
    pub stable: bool,
    /// First index from which every ratio `e_{n+1}/e_n` is a power of `p`.
    pub wild_from: usize,
    /// Component groups for reduction other than split multiplicative
    /// have order at most this.
    pub other_reduction_bound: u64,
}

fn is_power_of(mut n: u64, p: u64) -> bool {
    while n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

pub fn component_stability(v_delta: u64, e_seq: &[u64], p: u64) -> Result<StabilityReport> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if v_delta == 0 || e_seq.is_empty() || e_seq.contains(&0) {
        return Err(Error::BadInput("v_delta and every e_n must be positive".into()));
    }
    if let Some(w) = e_seq.windows(2).find(|w| w[1] % w[0] != 0) {
        return Err(Error::BadTower(format!("{} does not divide {}", w[0], w[1])));
    }
    let values = e_seq
        .iter()
        .map(|&e| e.checked_mul(v_delta).ok_or_else(|| Error::BadInput("v_n(Δ) overflows".into())))
        .collect::<Result<Vec<_>>>()?;
    let prime_to_p: Vec<u64> = values.iter().map(|&v| v / p.pow(valuation(v, p))).collect();
    let last = *prime_to_p.last().unwrap();
    let stable_from = prime_to_p.iter().rposition(|&x| x != last).map_or(0, |i| i + 1);
    let ratios: Vec<u64> = e_seq.windows(2).map(|w| w[1] / w[0]).collect();
    let wild_from = ratios.iter().rposition(|&r| !is_power_of(r, p)).map_or(0, |i| i + 1);
    Ok(StabilityReport {
        p,
        v_delta,
        e_seq: e_seq.to_vec(),
        stable: e_seq.len() >= 2 && stable_from + 2 <= e_seq.len(),
        values,
        prime_to_p,
        stable_from,
        wild_from,
        other_reduction_bound: 4,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn small(result: &SieveResult) -> Vec<(u64, u64, u32)> {
        result.primes.iter().map(|s| (s.ell.to_u64().unwrap(), s.m, s.b)).collect()
    }

    #[test]
    fn sieve_examples() {
        let r = sieve(2, 5, 1, 6).unwrap();
        assert_eq!(small(&r), vec![(3, 2, 0), (5, 4, 0), (7, 3, 0)]);
        assert!(r.complete);
        assert_eq!(r.primes.iter().map(|s| s.is_p).collect::<Vec<_>>(), vec![false, true, false]);
        let r = sieve(2, 3, 1, 4).unwrap();
        assert_eq!(small(&r), vec![(3, 2, 0), (5, 4, 0)]);
        assert_eq!(sieve(2, 5, 1, 0).unwrap_err().code(), "BadInput");
        assert!(r.primes.iter().all(|s| verify_witness(2, 3, s)));
    }

    #[test]
    fn cyclotomic_values() {
        assert_eq!(cyclotomic_value(1, 2), BigUint::from(1u32));
        assert_eq!(cyclotomic_value(4, 2), BigUint::from(5u32));
        assert_eq!(cyclotomic_value(6, 2), BigUint::from(3u32));
        assert_eq!(cyclotomic_value(12, 3), BigUint::from(73u32));
        // Product over divisors recovers q^n - 1.
        for n in 1..30u64 {
            let prod = divisors(n).into_iter().fold(BigUint::one(), |acc, d| acc * cyclotomic_value(d, 3));
            assert_eq!(prod, Pow::pow(&BigUint::from(3u32), n) - BigUint::one());
        }
    }

    #[test]
    fn skipped_exponents_mark_incomplete() {
        let r = sieve_with(2, 3, 2, 4, &Factorizer::new(1000), 5).unwrap();
        assert!(!r.complete);
        assert!(r.skipped.contains(&6));
    }

    #[test]
    fn density_examples() {
        let d = density_estimate(5, 100_000).unwrap();
        assert!((d.ratio - 0.25).abs() < 0.02);
        let d = density_estimate(3, 100_000).unwrap();
        assert!((d.ratio - 0.5).abs() < 0.02);
        assert_eq!(d.levels[1].modulus, 9);
        let d = density_estimate(7, 5).unwrap();
        assert_eq!(d.ratio, 0.0);
        assert_eq!(density_estimate(5, DEFAULT_SIEVE_CAP + 1), Err(Error::CapExceeded(DEFAULT_SIEVE_CAP + 1, DEFAULT_SIEVE_CAP)));
    }

    #[test]
    fn elliptic_examples() {
        let k5 = FieldSpec::new(5, 1).unwrap();
        let c = elliptic_point_count(1, 0, &k5).unwrap();
        assert_eq!((c.order, c.m, c.n), (4, 2, 2));
        assert_eq!(elliptic_point_count(0, 0, &k5), Err(Error::SingularCurve));
        let t = good_reduction_torsion_primes(1, 0, &k5).unwrap();
        assert_eq!((t.primes.clone(), t.undetermined), (vec![2], 5));

        let k7 = FieldSpec::new(7, 1).unwrap();
        let c = elliptic_point_count(0, 2, &k7).unwrap();
        let brute = 1 + (0..7u64)
            .map(|x| (0..7u64).filter(|y| (y * y) % 7 == (x * x * x + 2) % 7).count() as u64)
            .sum::<u64>();
        assert_eq!(c.order, brute);
        assert!(hasse_ok(c.order, 7));
        assert_eq!(c.m * c.n, c.order);
        assert_eq!(c.m % c.n, 0);
    }

    #[test]
    fn group_law_over_f25() {
        let k = FieldSpec::new(5, 2).unwrap();
        let curve = Curve::new(1, 1, &k).unwrap();
        let pts = curve.points();
        let n = pts.len() as u64;
        assert!(hasse_ok(n, 25));
        for a in pts.iter().take(8) {
            assert!(curve.contains(a));
            assert_eq!(curve.mul(n, a), CurvePoint::Infinity);
            for b in pts.iter().take(8) {
                let s = curve.add(a, b);
                assert!(curve.contains(&s));
                assert_eq!(s, curve.add(b, a));
            }
            assert_eq!(curve.add(a, &curve.neg(a)), CurvePoint::Infinity);
        }
    }

    #[test]
    fn stability_examples() {
        let r = component_stability(6, &[2, 6, 18, 54], 3).unwrap();
        assert_eq!(r.values, vec![12, 36, 108, 324]);
        assert_eq!(r.prime_to_p, vec![4, 4, 4, 4]);
        assert!(r.stable);
        let r = component_stability(1, &[1, 2, 4], 3).unwrap();
        assert_eq!(r.prime_to_p, vec![1, 2, 4]);
        assert!(!r.stable);
        assert!(matches!(component_stability(1, &[2, 3], 3), Err(Error::BadTower(_))));
    }
}
