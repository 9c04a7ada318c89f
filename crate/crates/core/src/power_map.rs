//! Periods of roots of unity under `x ↦ x^q`.
//!
//! A primitive `p^k`-th root of unity has period `ord(q mod p^k)` under the
//! power map, so the `p`-part of the periods grows without bound along the
//! cyclotomic tower while the prime-to-`p` part stays put.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, Pow};

use crate::arith::{factor_u64, gcd, is_prime, multiplicative_order, order_from_multiple, valuation_big};
use crate::error::{Error, Result};

/// Largest level accepted by [`unboundedness_report`].
pub const MAX_LEVEL: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderRow {
    pub k: u32,
    /// `ord(q mod p^k)`.
    pub order: BigUint,
    pub p_valuation: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderTable {
    pub q: u64,
    pub p: u64,
    pub rows: Vec<OrderRow>,
    /// `v_p(q^{ord(q mod p)} - 1)`: from this level on every step
    /// multiplies the order by `p`.
    pub k0: u32,
    /// `ord_{k+1}/ord_k ∈ {1, p}` for every consecutive pair of rows.
    pub ratio_law_ok: bool,
    /// The valuation column grows by exactly 1 per level from `k0` on.
    pub strict_from_k0: bool,
}

fn check_input(q: u64, p: u64) -> Result<()> {
    if q < 2 {
        return Err(Error::BadInput("base q must be at least 2".into()));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Err(Error::BadInput("p must be odd".into()));
    }
    if q.is_multiple_of(p) {
        return Err(Error::NotCoprime(q, p));
    }
    Ok(())
}

fn order_mod_prime_power(q: u64, p: u64, k: u32, p_minus_one_primes: &[BigUint]) -> BigUint {
    let modulus = BigUint::from(p).pow(k);
    let phi = BigUint::from(p).pow(k - 1) * BigUint::from(p - 1);
    let mut primes = p_minus_one_primes.to_vec();
    if k > 1 {
        primes.push(BigUint::from(p));
    }
    order_from_multiple(&(BigUint::from(q) % &modulus), &modulus, &phi, &primes)
}

fn prime_divisors(n: u64) -> Vec<BigUint> {
    factor_u64(n).into_iter().map(|(l, _)| BigUint::from(l)).collect()
}

/// Least `n ≥ 1` with `q^n ≡ 1 (mod p^k)`.
pub fn cyclotomic_period(q: u64, p: u64, k: u32) -> Result<BigUint> {
    check_input(q, p)?;
    if k == 0 {
        return Err(Error::BadInput("level k must be at least 1".into()));
    }
    Ok(order_mod_prime_power(q, p, k, &prime_divisors(p - 1)))
}

/// Orders of `q` modulo `p, p^2, ..., p^{k_max}`.
pub fn unboundedness_report(q: u64, p: u64, k_max: u32) -> Result<OrderTable> {
    check_input(q, p)?;
    if k_max == 0 || k_max > MAX_LEVEL {
        return Err(Error::BadInput(alloc::format!("k_max must lie in 1..={MAX_LEVEL}")));
    }
    let primes = prime_divisors(p - 1);
    let rows: Vec<OrderRow> = (1..=k_max)
        .map(|k| {
            let order = order_mod_prime_power(q, p, k, &primes);
            OrderRow { k, p_valuation: valuation_big(&order, p), order }
        })
        .collect();
    let ord1 = multiplicative_order(q % p, p);
    let k0 = valuation_big(&(BigUint::from(q).pow(ord1) - BigUint::one()), p);
    let big_p = BigUint::from(p);
    let ratio_law_ok = rows.windows(2).all(|w| w[1].order == w[0].order || w[1].order == &w[0].order * &big_p);
    let strict_from_k0 = rows
        .windows(2)
        .filter(|w| w[0].k >= k0)
        .all(|w| w[1].p_valuation == w[0].p_valuation + 1);
    Ok(OrderTable { q, p, rows, k0, ratio_law_ok, strict_from_k0 })
}

/// Period of a primitive `n`-th root of unity under `x ↦ x^q`, that is
/// `ord(q mod n)`.
pub fn rou_period(q: u64, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::BadInput("root order must be positive".into()));
    }
    if gcd(q % n, n) != 1 && n != 1 {
        return Err(Error::NotCoprime(q, n));
    }
    Ok(multiplicative_order(q % n, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn brute_order(q: u64, m: u64) -> u64 {
        let mut x = q % m;
        let mut n = 1;
        while x != 1 % m {
            x = x * q % m;
            n += 1;
        }
        n
    }

    #[test]
    fn examples() {
        let periods: Vec<BigUint> = (1..=3).map(|k| cyclotomic_period(2, 3, k).unwrap()).collect();
        assert_eq!(periods, [2u32, 6, 18].map(BigUint::from));
        let t = unboundedness_report(4, 3, 2).unwrap();
        let rows: Vec<(u32, BigUint)> = t.rows.iter().map(|r| (r.k, r.order.clone())).collect();
        assert_eq!(rows, vec![(1, BigUint::from(1u32)), (2, BigUint::from(3u32))]);
        assert_eq!(rou_period(3, 4).unwrap(), 2);
        assert_eq!(rou_period(9, 1).unwrap(), 1);
        assert_eq!(rou_period(2, 7).unwrap(), 3);
    }

    #[test]
    fn errors() {
        assert_eq!(cyclotomic_period(6, 3, 1), Err(Error::NotCoprime(6, 3)));
        assert_eq!(rou_period(2, 6), Err(Error::NotCoprime(2, 6)));
        assert_eq!(unboundedness_report(2, 9, 3), Err(Error::NotPrime(9)));
        assert!(matches!(unboundedness_report(3, 2, 3), Err(Error::BadInput(_))));
        assert!(matches!(unboundedness_report(2, 3, 65), Err(Error::BadInput(_))));
    }

    #[test]
    fn threshold_and_ratio_law() {
        for (q, p) in [(2u64, 3u64), (10, 3), (8, 7), (2, 5), (7, 3), (26, 5), (3, 11)] {
            let t = unboundedness_report(q, p, 10).unwrap();
            assert!(t.ratio_law_ok && t.strict_from_k0, "q = {q}, p = {p}");
            for row in &t.rows {
                if let Some(m) = p.checked_pow(row.k).filter(|&m| m < 1 << 20) {
                    assert_eq!(row.order, BigUint::from(brute_order(q, m)));
                }
            }
            // Below k0 the order is stuck at ord(q mod p).
            assert!(t.rows.iter().take_while(|r| r.k <= t.k0).all(|r| r.order == t.rows[0].order));
        }
        // 10 = 1 + 9: orders 1, 1, 3, 9, ...
        assert_eq!(unboundedness_report(10, 3, 4).unwrap().k0, 2);
    }
}
