use core::fmt::Debug;

use num_bigint::BigInt;

use crate::error::Result;
use crate::residue_field::{FieldElem, FieldSpec};

/// A local ring with residue field `k`: either `k` itself or a truncated
/// DVR `O/π^N`. Polynomial maps, orbits and Jacobians are written once
/// against this trait.
///
/// `precision` is the number of π-adic digits the ring sees: 1 for the
/// residue field, `N` for `O/π^N`. `valuation` is capped at `precision`.
pub trait Ring {
    type Elem: Clone + Eq + Ord + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;

    /// Image of an integer.
    fn integer(&self, n: &BigInt) -> Self::Elem;
    /// `π^k`; in the residue field this is 1 for `k = 0` and 0 otherwise.
    fn uniformizer_pow(&self, k: u32) -> Self::Elem;

    fn precision(&self) -> u32;
    fn valuation(&self, a: &Self::Elem) -> u32;

    fn residue_field(&self) -> &FieldSpec;
    /// Reduction onto the residue field.
    fn reduce(&self, a: &Self::Elem) -> FieldElem;
    /// The coordinate-wise lift of a residue class (digits in `[0, p)`).
    fn lift(&self, x: &FieldElem) -> Self::Elem;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        self.valuation(a) >= self.precision()
    }

    fn is_unit(&self, a: &Self::Elem) -> bool {
        self.valuation(a) == 0
    }

    /// `a ≡ b (mod π^level)`.
    fn eq_mod(&self, a: &Self::Elem, b: &Self::Elem, level: u32) -> bool {
        self.valuation(&self.sub(a, b)) >= level.min(self.precision())
    }

    fn pow(&self, a: &Self::Elem, mut exp: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            exp >>= 1;
            if exp > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }
}
