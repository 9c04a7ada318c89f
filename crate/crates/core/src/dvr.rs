//! Truncated totally ramified DVRs `O/π^N`.
//!
//! `O = W[π]/(E(π))` where `W` is the unramified extension of `Z_p` with
//! residue field `k = F_{p^f}` and `E` is an Eisenstein polynomial of degree
//! `e` with integer coefficients. An element is stored as
//! `a_0 + a_1 π + ... + a_{e-1} π^{e-1}` with `a_i ∈ W`.
//!
//! Since `v(a_i π^i) = e·v_p(a_i) + i` and these are distinct mod `e`, the
//! ideal `π^N` is exactly `⊕ p^{M_i} W π^i` with `M_i = ⌈(N - i)/e⌉`.
//! Every element is kept reduced coordinate-wise modulo `p^{M_i}`, which
//! makes the representation canonical: two elements are equal mod `π^N`
//! iff their stored coefficients agree.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::mul_mod;
use crate::error::{Error, Result};
use crate::residue_field::{FieldElem, FieldSpec};
use crate::ring::Ring;

/// Default precision is this many multiples of `e`.
pub const DEFAULT_PRECISION_PER_E: u32 = 6;

/// How the Eisenstein polynomial was chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Eisenstein {
    /// `x^e - p`.
    Default,
    /// `((1 + x)^p - 1)/x`, whose root is `ζ_p - 1`; needs `e = p - 1`.
    ZetaP,
    /// Explicit integer coefficients, low degree first, monic of degree `e`.
    Custom(Vec<BigInt>),
}

impl Eisenstein {
    /// `x^e + p x + p` (`x + p` when `e = 1`), a second choice distinct from
    /// the default `x^e - p`.
    pub fn alternate(p: u64, e: u32) -> Eisenstein {
        let mut c = vec![BigInt::zero(); e as usize + 1];
        c[0] = BigInt::from(p);
        if e >= 2 {
            c[1] = BigInt::from(p);
        }
        c[e as usize] = BigInt::one();
        Eisenstein::Custom(c)
    }

    pub fn coefficients(&self, p: u64, e: u32) -> Result<Vec<BigInt>> {
        let coeffs = match self {
            Eisenstein::Default => {
                let mut c = vec![BigInt::zero(); e as usize + 1];
                c[0] = -BigInt::from(p);
                c[e as usize] = BigInt::one();
                c
            }
            Eisenstein::ZetaP => {
                if u64::from(e) + 1 != p {
                    return Err(Error::NotEisenstein(format!(
                        "zeta_p preset needs e = p - 1 = {}, got e = {e}",
                        p - 1
                    )));
                }
                // C(p, j) for j = 1..=p is the coefficient of x^{j-1}
                let mut c = Vec::with_capacity(p as usize);
                let mut binom = BigInt::one();
                for j in 1..=p {
                    binom = binom * BigInt::from(p - j + 1) / BigInt::from(j);
                    c.push(binom.clone());
                }
                c
            }
            Eisenstein::Custom(c) => c.clone(),
        };
        check_eisenstein(&coeffs, p, e)?;
        Ok(coeffs)
    }
}

fn check_eisenstein(c: &[BigInt], p: u64, e: u32) -> Result<()> {
    if e == 0 {
        return Err(Error::NotEisenstein("ramification index must be at least 1".into()));
    }
    if c.len() != e as usize + 1 {
        return Err(Error::NotEisenstein(format!("expected degree {e}, got {} coefficients", c.len())));
    }
    if !c[e as usize].is_one() {
        return Err(Error::NotEisenstein("polynomial is not monic".into()));
    }
    let p = BigInt::from(p);
    if let Some(i) = c[..e as usize].iter().position(|x| !x.is_multiple_of(&p)) {
        return Err(Error::NotEisenstein(format!("coefficient of x^{i} is not divisible by p")));
    }
    if c[0].is_multiple_of(&(&p * &p)) {
        return Err(Error::NotEisenstein("constant term is divisible by p^2".into()));
    }
    Ok(())
}

/// An element of `O/π^N`: `e` coefficients in `W`, each a length-`f` vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DvrElement(pub Vec<Vec<u64>>);

impl DvrElement {
    pub fn coeffs(&self) -> &[Vec<u64>] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingSpec {
    field: FieldSpec,
    e: u32,
    choice: Eisenstein,
    eisenstein: Vec<BigInt>,
    precision: u32,
    /// `p^{M_0}`, the working modulus for all intermediate arithmetic.
    work_modulus: u64,
    /// `p^{M_i}` for each π-power `i < e`.
    digit_moduli: Vec<u64>,
    /// `-E_i mod p^{M_0}` for `i < e`, so that `π^e = Σ tail_i π^i`.
    tail: Vec<u64>,
}

impl RingSpec {
    /// Builds `O/π^N` over `F_{p^f}` with ramification index `e`.
    pub fn new(p: u64, f: u32, e: u32, eisenstein: Eisenstein, precision: u32) -> Result<Self> {
        Self::over_field(FieldSpec::new(p, f)?, e, eisenstein, precision)
    }

    pub fn over_field(field: FieldSpec, e: u32, choice: Eisenstein, precision: u32) -> Result<Self> {
        let p = field.p();
        let eisenstein = choice.coefficients(p, e)?;
        if precision == 0 {
            return Err(Error::BadPrecision("precision must be at least 1".into()));
        }
        let m0 = precision.div_ceil(e);
        let work_modulus = (p as u128)
            .checked_pow(m0)
            .filter(|&m| m < (1u128 << 62))
            .ok_or_else(|| Error::BadPrecision(format!("p^{m0} does not fit the 62-bit working modulus")))?
            as u64;
        let digit_moduli = (0..e)
            .map(|i| p.pow(precision.saturating_sub(i).div_ceil(e)))
            .collect();
        let wm = BigInt::from(work_modulus);
        let tail = eisenstein[..e as usize]
            .iter()
            .map(|c| (-c).mod_floor(&wm).to_u64().unwrap())
            .collect();
        Ok(RingSpec { field, e, choice, eisenstein, precision, work_modulus, digit_moduli, tail })
    }

    /// The same ring at another precision.
    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        Self::over_field(self.field.clone(), self.e, self.choice.clone(), precision)
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn f(&self) -> u32 {
        self.field.degree()
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn eisenstein_choice(&self) -> &Eisenstein {
        &self.choice
    }

    /// Coefficients of `E`, low degree first.
    pub fn eisenstein(&self) -> &[BigInt] {
        &self.eisenstein
    }

    /// `v(p)`, which equals `e` for a totally ramified extension.
    pub fn v_p(&self) -> u32 {
        self.e
    }

    /// The uniformizer `π`.
    pub fn pi(&self) -> DvrElement {
        let mut poly = vec![vec![0u64; self.f() as usize]; 2];
        poly[1][0] = 1;
        self.reduce_pi_poly(poly)
    }

    /// Image of a higher- (or lower-) precision element of the same tower
    /// stage in this ring.
    pub fn coerce(&self, x: &DvrElement) -> DvrElement {
        self.canonical(x.0.clone())
    }

    /// Element from its coefficient arrays (π-power major, low degree first).
    /// Missing entries are zero; entries are reduced to canonical form.
    pub fn element(&self, coeffs: &[Vec<u64>]) -> Result<DvrElement> {
        let f = self.f() as usize;
        if coeffs.len() > self.e as usize || coeffs.iter().any(|c| c.len() > f) {
            return Err(Error::BadInput(format!("element shape exceeds e = {} by f = {f}", self.e)));
        }
        Ok(self.canonical(coeffs.iter().map(|c| {
            let mut c = c.clone();
            c.resize(f, 0);
            c
        }).collect()))
    }

    /// For `e = f = 1` the ring is `Z/p^N`; this is the element as an integer
    /// in `[0, p^N)`.
    pub fn as_integer(&self, x: &DvrElement) -> Option<u64> {
        (self.e == 1 && self.f() == 1).then(|| x.0[0][0])
    }

    fn canonical(&self, mut c: Vec<Vec<u64>>) -> DvrElement {
        c.resize(self.e as usize, vec![0; self.f() as usize]);
        for (coef, &m) in c.iter_mut().zip(&self.digit_moduli) {
            for x in coef.iter_mut() {
                *x %= m;
            }
        }
        DvrElement(c)
    }

    // ---- the unramified ring W mod p^{M_0} ----

    fn w_add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let m = self.work_modulus;
        a.iter().zip(b).map(|(&x, &y)| (x + y) % m).collect()
    }

    fn w_sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let m = self.work_modulus;
        a.iter().zip(b).map(|(&x, &y)| (x % m + m - y % m) % m).collect()
    }

    fn w_scale(&self, a: &[u64], s: u64) -> Vec<u64> {
        a.iter().map(|&x| mul_mod(x, s, self.work_modulus)).collect()
    }

    fn w_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let f = self.f() as usize;
        let m = self.work_modulus;
        let mut c = vec![0u64; 2 * f - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                c[i + j] = (c[i + j] + mul_mod(x, y, m)) % m;
            }
        }
        // reduce by the (lifted, monic) residue-field modulus
        let g = self.field.modulus();
        while c.len() > f {
            let top = c.pop().unwrap();
            if top == 0 {
                continue;
            }
            let shift = c.len() - f;
            for (i, &gi) in g[..f].iter().enumerate() {
                c[shift + i] = (c[shift + i] + m - mul_mod(top, gi, m)) % m;
            }
        }
        c.resize(f, 0);
        c
    }

    /// Reduces a polynomial in π of any degree using `E(π) = 0`.
    fn reduce_pi_poly(&self, mut poly: Vec<Vec<u64>>) -> DvrElement {
        let e = self.e as usize;
        while poly.len() > e {
            let top = poly.pop().unwrap();
            let shift = poly.len() - e;
            for (i, &t) in self.tail.iter().enumerate() {
                if t != 0 {
                    let term = self.w_scale(&top, t);
                    poly[shift + i] = self.w_add(&poly[shift + i], &term);
                }
            }
        }
        self.canonical(poly)
    }

    /// Teichmüller representative of `x`: the unique root of `y^q = y`
    /// reducing to `x`, found by iterating `y ↦ y^q` from the naive lift.
    pub fn teichmuller_lift(&self, x: &FieldElem) -> DvrElement {
        let q = self.field.size();
        let mut y = self.lift(x);
        // each step gains at least one π-adic digit
        for _ in 0..=self.precision {
            let next = self.pow(&y, q);
            if next == y {
                return y;
            }
            y = next;
        }
        unreachable!("Teichmüller iteration must stabilize within N steps")
    }

    /// The prime-to-p roots of unity `μ_(p)(O)`: the Teichmüller lifts of
    /// `k^×`, paired with their residues.
    pub fn mu_prime_to_p(&self, cap: u64) -> Result<MuGroup> {
        let units = self.field.enumerate(cap)?;
        let elements: Vec<_> = units
            .into_iter()
            .skip(1)
            .map(|x| {
                let w = self.teichmuller_lift(&x);
                (x, w)
            })
            .collect();
        Ok(MuGroup { order: elements.len() as u64, elements })
    }
}

/// `μ_(p)(O) ≅ k^×`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuGroup {
    pub order: u64,
    pub elements: Vec<(FieldElem, DvrElement)>,
}

fn p_valuation_capped(x: u64, p: u64, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut v = 0;
    let mut x = x;
    while x.is_multiple_of(p) && v < cap {
        x /= p;
        v += 1;
    }
    v
}

impl Ring for RingSpec {
    type Elem = DvrElement;

    fn zero(&self) -> DvrElement {
        DvrElement(vec![vec![0; self.f() as usize]; self.e as usize])
    }

    fn one(&self) -> DvrElement {
        let mut z = self.zero();
        z.0[0][0] = 1 % self.digit_moduli[0];
        z
    }

    fn add(&self, a: &DvrElement, b: &DvrElement) -> DvrElement {
        self.canonical(a.0.iter().zip(&b.0).map(|(x, y)| self.w_add(x, y)).collect())
    }

    fn sub(&self, a: &DvrElement, b: &DvrElement) -> DvrElement {
        self.canonical(a.0.iter().zip(&b.0).map(|(x, y)| self.w_sub(x, y)).collect())
    }

    fn neg(&self, a: &DvrElement) -> DvrElement {
        self.sub(&self.zero(), a)
    }

    fn mul(&self, a: &DvrElement, b: &DvrElement) -> DvrElement {
        let e = self.e as usize;
        let f = self.f() as usize;
        let mut prod = vec![vec![0u64; f]; 2 * e - 1];
        for (i, x) in a.0.iter().enumerate() {
            if x.iter().all(|&c| c == 0) {
                continue;
            }
            for (j, y) in b.0.iter().enumerate() {
                if y.iter().all(|&c| c == 0) {
                    continue;
                }
                let t = self.w_mul(x, y);
                prod[i + j] = self.w_add(&prod[i + j], &t);
            }
        }
        self.reduce_pi_poly(prod)
    }

    fn inv(&self, a: &DvrElement) -> Result<DvrElement> {
        let v = self.valuation(a);
        if v != 0 {
            return Err(Error::NonUnitInverse(v));
        }
        let residue_inv = self.field.inv(&self.reduce(a))?;
        let mut y = self.lift(&residue_inv);
        let two = self.integer(&BigInt::from(2));
        let one = self.one();
        // Newton: y <- y (2 - a y); correct digits double each step.
        for _ in 0..=32 {
            if self.mul(a, &y) == one {
                return Ok(y);
            }
            y = self.mul(&y, &self.sub(&two, &self.mul(a, &y)));
        }
        unreachable!("Newton inversion converges quadratically")
    }

    fn integer(&self, n: &BigInt) -> DvrElement {
        let r = n.mod_floor(&BigInt::from(self.work_modulus)).to_u64().unwrap();
        let mut z = self.zero();
        z.0[0][0] = r;
        self.canonical(z.0)
    }

    fn uniformizer_pow(&self, k: u32) -> DvrElement {
        if k >= self.precision {
            return self.zero();
        }
        self.pow(&self.pi(), u64::from(k))
    }

    fn precision(&self) -> u32 {
        self.precision
    }

    fn valuation(&self, a: &DvrElement) -> u32 {
        let p = self.p();
        let mut best = self.precision;
        for (i, coef) in a.0.iter().enumerate() {
            if coef.iter().all(|&c| c == 0) {
                continue;
            }
            let vp = coef.iter().map(|&c| p_valuation_capped(c, p, self.precision)).min().unwrap();
            best = best.min(self.e * vp + i as u32);
        }
        best
    }

    fn residue_field(&self) -> &FieldSpec {
        &self.field
    }

    fn reduce(&self, a: &DvrElement) -> FieldElem {
        let p = self.p();
        FieldElem(a.0[0].iter().map(|&c| c % p).collect())
    }

    fn lift(&self, x: &FieldElem) -> DvrElement {
        let mut z = self.zero();
        z.0[0] = x.0.clone();
        self.canonical(z.0)
    }
}

/// Signed integer view, handy for reading off small examples (`-1` instead of `p^N - 1`).
pub fn centered(value: u64, modulus: u64) -> i64 {
    if value > modulus / 2 {
        value as i64 - modulus as i64
    } else {
        value as i64
    }
}
