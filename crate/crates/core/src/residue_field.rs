//! Finite fields `F_q = F_p[x]/(g)`, `q = p^f`.
//!
//! Elements are coefficient vectors of length `f`, low degree first, with
//! entries in `[0, p)`. The modulus `g` is the lexicographically smallest
//! monic irreducible of degree `f` (coefficients compared from the constant
//! term up), so a given `(p, f)` always yields the same field.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, Sign};
use num_traits::ToPrimitive;

use crate::arith::{factor_u64, is_prime, mul_mod, pow_mod};
use crate::error::{Error, Result};
use crate::ring::Ring;

/// Default bound on the number of elements of any structure we enumerate.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElem(pub Vec<u64>);

impl FieldElem {
    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u64,
    f: u32,
    /// Monic, length `f + 1`, low degree first.
    modulus: Vec<u64>,
    q: u64,
}

/// Operations accepted by [`FieldSpec::apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Inv,
    Pow(u64),
}

impl FieldSpec {
    /// `F_{p^f}` with the deterministic modulus, refusing fields with more
    /// than [`DEFAULT_ENUMERATION_CAP`] elements.
    pub fn new(p: u64, f: u32) -> Result<Self> {
        Self::with_cap(p, f, DEFAULT_ENUMERATION_CAP)
    }

    pub fn with_cap(p: u64, f: u32, cap: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if f == 0 {
            return Err(Error::BadInput("residue degree f must be at least 1".into()));
        }
        let q = checked_size(p, f, cap)?;
        let modulus = smallest_irreducible(p, f as usize);
        Ok(FieldSpec { p, f, modulus, q })
    }

    /// Field with an explicit modulus, as read back from a serialized spec.
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::BadInput("modulus must be monic of degree >= 1 with entries in [0, p)".into()));
        }
        let f = (modulus.len() - 1) as u32;
        let q = checked_size(p, f, DEFAULT_ENUMERATION_CAP)?;
        if !is_irreducible(&modulus, p) {
            return Err(Error::BadInput("modulus is reducible over F_p".into()));
        }
        Ok(FieldSpec { p, f, modulus, q })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.f
    }

    /// `q = #k`.
    pub fn size(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn elem_from_u64(&self, n: u64) -> FieldElem {
        let mut c = vec![0; self.f as usize];
        c[0] = n % self.p;
        FieldElem(c)
    }

    pub fn elem(&self, coeffs: &[u64]) -> Result<FieldElem> {
        if coeffs.len() > self.f as usize {
            return Err(Error::BadInput("too many coefficients for this field".into()));
        }
        let mut c = vec![0; self.f as usize];
        for (slot, &x) in c.iter_mut().zip(coeffs) {
            *slot = x % self.p;
        }
        Ok(FieldElem(c))
    }

    /// The element whose base-`p` digits (least significant first) are its
    /// coefficients. This is the enumeration order.
    pub fn elem_from_index(&self, mut index: u64) -> FieldElem {
        let mut c = vec![0; self.f as usize];
        for slot in c.iter_mut() {
            *slot = index % self.p;
            index /= self.p;
        }
        FieldElem(c)
    }

    pub fn index_of(&self, a: &FieldElem) -> u64 {
        a.0.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    /// All `q` elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.q).map(move |i| self.elem_from_index(i))
    }

    pub fn enumerate(&self, cap: u64) -> Result<Vec<FieldElem>> {
        if self.q > cap {
            return Err(Error::FieldTooLarge { what: "field", size: self.q as u128, cap });
        }
        Ok(self.elements().collect())
    }

    pub fn apply(&self, op: FieldOp, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        Ok(match op {
            FieldOp::Add => Ring::add(self, a, b),
            FieldOp::Sub => Ring::sub(self, a, b),
            FieldOp::Mul => Ring::mul(self, a, b),
            FieldOp::Inv => Ring::inv(self, a)?,
            FieldOp::Pow(e) => Ring::pow(self, a, e),
        })
    }

    pub fn is_zero_elem(&self, a: &FieldElem) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    /// Smallest `n >= 1` with `a^n = 1`.
    pub fn mult_order(&self, a: &FieldElem) -> Result<u64> {
        if self.is_zero_elem(a) {
            return Err(Error::ZeroElement);
        }
        let one = self.one();
        let mut order = self.q - 1;
        for (l, _) in factor_u64(self.q - 1) {
            while order.is_multiple_of(l) && self.pow(a, order / l) == one {
                order /= l;
            }
        }
        Ok(order)
    }

    /// Quadratic character: 0, 1 or -1.
    pub fn legendre(&self, a: &FieldElem) -> i8 {
        if self.is_zero_elem(a) {
            return 0;
        }
        if self.p == 2 {
            return 1;
        }
        if self.pow(a, (self.q - 1) / 2) == self.one() {
            1
        } else {
            -1
        }
    }

    fn reduce_poly(&self, mut c: Vec<u64>) -> FieldElem {
        let f = self.f as usize;
        let p = self.p;
        while c.len() > f {
            let top = c.pop().unwrap();
            if top == 0 {
                continue;
            }
            let shift = c.len() - f;
            for (i, &m) in self.modulus[..f].iter().enumerate() {
                let idx = shift + i;
                c[idx] = (c[idx] + p - mul_mod(top, m, p)) % p;
            }
        }
        c.resize(f, 0);
        FieldElem(c)
    }
}

fn checked_size(p: u64, f: u32, cap: u64) -> Result<u64> {
    let size = (p as u128).checked_pow(f).unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(Error::FieldTooLarge { what: "field", size, cap });
    }
    Ok(size as u64)
}

impl Ring for FieldSpec {
    type Elem = FieldElem;

    fn zero(&self) -> FieldElem {
        FieldElem(vec![0; self.f as usize])
    }

    fn one(&self) -> FieldElem {
        self.elem_from_u64(1)
    }

    fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem(a.0.iter().zip(&b.0).map(|(&x, &y)| (x + y) % self.p).collect())
    }

    fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem(a.0.iter().zip(&b.0).map(|(&x, &y)| (x + self.p - y) % self.p).collect())
    }

    fn neg(&self, a: &FieldElem) -> FieldElem {
        FieldElem(a.0.iter().map(|&x| (self.p - x) % self.p).collect())
    }

    fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let f = self.f as usize;
        let mut c = vec![0u64; 2 * f - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                c[i + j] = (c[i + j] + mul_mod(x, y, self.p)) % self.p;
            }
        }
        self.reduce_poly(c)
    }

    fn inv(&self, a: &FieldElem) -> Result<FieldElem> {
        if self.is_zero_elem(a) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.q - 2))
    }

    fn integer(&self, n: &BigInt) -> FieldElem {
        let r = (n % BigInt::from(self.p)).to_i64().unwrap();
        let r = if r < 0 { r + self.p as i64 } else { r };
        debug_assert!(n.sign() != Sign::Minus || r >= 0);
        self.elem_from_u64(r as u64)
    }

    fn uniformizer_pow(&self, k: u32) -> FieldElem {
        if k == 0 {
            self.one()
        } else {
            self.zero()
        }
    }

    fn precision(&self) -> u32 {
        1
    }

    fn valuation(&self, a: &FieldElem) -> u32 {
        u32::from(self.is_zero_elem(a))
    }

    fn residue_field(&self) -> &FieldSpec {
        self
    }

    fn reduce(&self, a: &FieldElem) -> FieldElem {
        a.clone()
    }

    fn lift(&self, x: &FieldElem) -> FieldElem {
        x.clone()
    }
}

// ---- polynomials over F_p, low degree first, used for modulus selection ----

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    let lead_inv = pow_mod(*b.last().unwrap(), p - 2, p);
    while r.len() >= b.len() {
        let coef = mul_mod(*r.last().unwrap(), lead_inv, p);
        let shift = r.len() - b.len();
        for (i, &bc) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - mul_mod(coef, bc, p)) % p;
        }
        r = trim(r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut c = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            c[i + j] = (c[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    poly_rem(&c, m, p)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Rabin-style test: `g` of degree `f` is irreducible iff it shares no factor
/// with `x^{p^i} - x` for `1 <= i <= f/2`.
pub(crate) fn is_irreducible(g: &[u64], p: u64) -> bool {
    let g = trim(g.to_vec());
    let f = g.len() - 1;
    if f == 1 {
        return true;
    }
    let x = vec![0, 1];
    let mut frob = x.clone();
    for _ in 1..=f / 2 {
        // frob <- frob^p mod g
        let mut acc = vec![1u64];
        let mut base = frob.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(&acc, &base, &g, p);
            }
            base = poly_mulmod(&base, &base, &g, p);
            e >>= 1;
        }
        frob = acc;
        let mut diff = frob.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        let h = poly_gcd(&g, &diff, p);
        if h.len() > 1 {
            return false;
        }
    }
    true
}

fn smallest_irreducible(p: u64, f: usize) -> Vec<u64> {
    let total = p.pow(f as u32);
    for idx in 0..total {
        // c_0 is the most significant digit of idx, giving lexicographic order
        // on (c_0, c_1, ..., c_{f-1}).
        let mut g = vec![0u64; f + 1];
        let mut rest = idx;
        for i in (0..f).rev() {
            g[i] = rest % p;
            rest /= p;
        }
        g[f] = 1;
        if is_irreducible(&g, p) {
            return g;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
