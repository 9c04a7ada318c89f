//! Sparse multivariate polynomials with coefficients in `Z[π]`.
//!
//! A term is an exponent vector, a power of the uniformizer and an integer.
//! Coefficients are only pushed into a concrete ring at evaluation time, so
//! one polynomial serves every base change: `π` becomes the uniformizer of
//! `O/π^N`, and 0 in the residue field.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::ring::Ring;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub exps: Vec<u32>,
    /// Power of the uniformizer multiplying this term.
    pub pi: u32,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial { exps: vec![0; nvars], pi: 0 }, c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(Monomial { exps, pi: 0 }, BigInt::one());
        p
    }

    /// Collects terms, merging repeated monomials. Returns `None` if some
    /// exponent vector has the wrong length.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, BigInt)>) -> Option<Self> {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            if m.exps.len() != nvars {
                return None;
            }
            p.add_term(m, c);
        }
        Some(p)
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    /// Total degree in the variables (powers of π do not count).
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let exps = m1.exps.iter().zip(&m2.exps).map(|(a, b)| a + b).collect();
                out.add_term(Monomial { exps, pi: m1.pi + m2.pi }, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::constant(self.nvars, BigInt::one());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Formal partial derivative in `x_var`.
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let k = m.exps[var];
            if k == 0 {
                continue;
            }
            let mut exps = m.exps.clone();
            exps[var] -= 1;
            out.add_term(Monomial { exps, pi: m.pi }, c * BigInt::from(k));
        }
        out
    }

    /// Substitutes `x_i ↦ subs[i]`.
    pub fn compose(&self, subs: &[Polynomial]) -> Self {
        assert_eq!(subs.len(), self.nvars, "one substitution per variable");
        let nvars = subs.first().map_or(0, |s| s.nvars);
        let mut out = Self::zero(nvars);
        for (m, c) in &self.terms {
            let mut term = Self::zero(nvars);
            term.add_term(Monomial { exps: vec![0; nvars], pi: m.pi }, c.clone());
            for (s, &k) in subs.iter().zip(&m.exps) {
                if k > 0 {
                    term = term.mul(&s.pow(k));
                }
            }
            out = out.add(&term);
        }
        out
    }

    pub fn eval<R: Ring>(&self, ring: &R, point: &[R::Elem]) -> R::Elem {
        debug_assert_eq!(point.len(), self.nvars);
        let mut acc = ring.zero();
        for (m, c) in &self.terms {
            let mut term = ring.integer(c);
            if m.pi > 0 {
                term = ring.mul(&term, &ring.uniformizer_pow(m.pi));
            }
            for (x, &k) in point.iter().zip(&m.exps) {
                if k > 0 {
                    term = ring.mul(&term, &ring.pow(x, u64::from(k)));
                }
            }
            acc = ring.add(&acc, &term);
        }
        acc
    }
}
