//! Machine-word and big-integer number theory shared by the other modules:
//! modular powers, Miller-Rabin, Pollard rho (Brent variant), trial-division
//! factorization and multiplicative orders.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Witnesses making Miller-Rabin deterministic below 2^64 (and far beyond).
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// `p`-adic valuation of a nonzero integer.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0 && p > 1);
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

pub fn valuation_big(n: &BigUint, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let p = BigUint::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Deterministic primality test for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &w in &MR_WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin with the fixed witness set. Exact below 2^64; above that a
/// `true` answer means "probable prime".
pub fn is_probable_prime_big(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime(small);
    }
    for &w in &MR_WITNESSES {
        if (n % w).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &a in &MR_WITNESSES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// One nontrivial factor of an odd composite `n`, by Pollard rho with Brent's
/// cycle detection. Tries a fixed sequence of polynomial constants so the
/// result is deterministic.
pub fn pollard_rho(n: u64) -> Option<u64> {
    if n.is_multiple_of(2) {
        return Some(2);
    }
    for c in 1..64u64 {
        if let Some(d) = rho_brent(n, c) {
            return Some(d);
        }
    }
    None
}

fn rho_brent(n: u64, c: u64) -> Option<u64> {
    const BATCH: u64 = 128;
    let step = |x: u64| (mul_mod(x, x, n) + c) % n;
    let (mut y, mut r, mut prod) = (2u64, 1u64, 1u64);
    let (mut x, mut ys);
    let mut g;
    loop {
        x = y;
        for _ in 0..r {
            y = step(y);
        }
        let mut k = 0;
        loop {
            ys = y;
            for _ in 0..BATCH.min(r - k) {
                y = step(y);
                prod = mul_mod(prod, x.abs_diff(y), n);
            }
            g = gcd(prod, n);
            k += BATCH;
            if k >= r || g != 1 {
                break;
            }
        }
        r *= 2;
        if g != 1 || r > (1 << 26) {
            break;
        }
    }
    if g == n {
        // Batched product overshot; retrace one step at a time.
        loop {
            ys = step(ys);
            g = gcd(x.abs_diff(ys), n);
            if g != 1 {
                break;
            }
        }
    }
    (g != 1 && g != n).then_some(g)
}

/// Complete factorization of a 64-bit integer, as sorted `(prime, exponent)`
/// pairs. `factor_u64(1)` is empty.
pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    assert!(n != 0, "cannot factor zero");
    let mut primes = Vec::new();
    let mut n = n;
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        while n.is_multiple_of(p) {
            primes.push(p);
            n /= p;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            primes.push(m);
            continue;
        }
        let d = pollard_rho(m).expect("pollard rho failed on a 64-bit composite");
        stack.push(d);
        stack.push(m / d);
    }
    collect_exponents(primes)
}

fn collect_exponents<T: Ord + Clone>(mut primes: Vec<T>) -> Vec<(T, u32)> {
    primes.sort();
    let mut out: Vec<(T, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Primes up to `limit` by the sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// A prime factor of a big integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigFactor {
    pub prime: BigUint,
    pub exponent: u32,
    /// `true` when the factor exceeds 2^64 and was only shown to be a
    /// Miller-Rabin probable prime.
    pub probable: bool,
}

/// Result of [`Factorizer::factor`]: every factor found, plus whatever
/// composite cofactor could not be split within budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigFactorization {
    pub factors: Vec<BigFactor>,
    pub cofactor: Option<BigUint>,
}

impl BigFactorization {
    pub fn is_complete(&self) -> bool {
        self.cofactor.is_none()
    }
}

/// Trial division up to a fixed bound, then Pollard rho for 64-bit
/// survivors. Larger composite survivors are reported, not split.
#[derive(Debug, Clone)]
pub struct Factorizer {
    trial_primes: Vec<u64>,
    trial_limit: u64,
}

impl Default for Factorizer {
    fn default() -> Self {
        Factorizer::new(1_000_000)
    }
}

impl Factorizer {
    pub fn new(trial_limit: u64) -> Self {
        Factorizer { trial_primes: primes_up_to(trial_limit), trial_limit }
    }

    pub fn factor(&self, n: &BigUint) -> BigFactorization {
        assert!(!n.is_zero(), "cannot factor zero");
        let mut found: Vec<(BigUint, bool)> = Vec::new();
        let mut n = n.clone();
        for &p in &self.trial_primes {
            if n.is_one() {
                break;
            }
            if let Some(small) = n.to_u64() {
                if p.saturating_mul(p) > small {
                    break;
                }
            }
            let big_p = BigUint::from(p);
            loop {
                let (q, r) = n.div_rem(&big_p);
                if !r.is_zero() {
                    break;
                }
                found.push((big_p.clone(), false));
                n = q;
            }
        }
        let mut cofactor = None;
        if !n.is_one() {
            match n.to_u64() {
                Some(small) => {
                    for (p, e) in factor_u64(small) {
                        for _ in 0..e {
                            found.push((BigUint::from(p), false));
                        }
                    }
                }
                None => {
                    let bound = BigUint::from(self.trial_limit);
                    if &bound * &bound > n {
                        found.push((n, false));
                    } else if is_probable_prime_big(&n) {
                        found.push((n, true));
                    } else {
                        cofactor = Some(n);
                    }
                }
            }
        }
        let factors = collect_exponents(found)
            .into_iter()
            .map(|((prime, probable), exponent)| BigFactor { prime, exponent, probable })
            .collect();
        BigFactorization { factors, cofactor }
    }
}

/// Order of `base` in the unit group modulo `modulus`, given the
/// factorization of a multiple `group_order` of that order. Descends from
/// `group_order` one prime at a time.
pub fn order_from_multiple(
    base: &BigUint,
    modulus: &BigUint,
    group_order: &BigUint,
    group_order_primes: &[BigUint],
) -> BigUint {
    let one = BigUint::one();
    debug_assert!(base.modpow(group_order, modulus) == &one % modulus);
    let mut order = group_order.clone();
    for p in group_order_primes {
        while (&order % p).is_zero() {
            let candidate = &order / p;
            if base.modpow(&candidate, modulus) == one {
                order = candidate;
            } else {
                break;
            }
        }
    }
    order
}

/// Multiplicative order of `base` modulo `n` for `gcd(base, n) = 1`, via the
/// prime-power factorization of `n` and the Chinese remainder theorem.
pub fn multiplicative_order(base: u64, n: u64) -> u64 {
    assert!(n == 1 || gcd(base % n, n) == 1, "base must be a unit mod n");
    if n == 1 {
        return 1;
    }
    let mut order = 1u64;
    for (l, a) in factor_u64(n) {
        // Unit group of Z/l^a has order l^(a-1)(l-1).
        let prime_power = l.pow(a);
        let phi = l.pow(a - 1) * (l - 1);
        let mut ord = phi;
        let mut primes: Vec<u64> = factor_u64(l - 1).into_iter().map(|(q, _)| q).collect();
        if a > 1 {
            primes.push(l);
        }
        for q in primes {
            while ord % q == 0 && pow_mod(base, ord / q, prime_power) == 1 {
                ord /= q;
            }
        }
        order = lcm(order, ord);
    }
    order
}
