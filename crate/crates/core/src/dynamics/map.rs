use alloc::format;
use alloc::vec::Vec;

use crate::dynamics::linalg::{self, Matrix};
use crate::dynamics::poly::Polynomial;
use crate::error::{Error, Result};
use crate::residue_field::{FieldElem, FieldSpec};
use crate::ring::Ring;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Space {
    Affine,
    Projective,
}

impl Space {
    /// Number of coordinates of a point of the `dim`-dimensional space.
    pub fn coords(self, dim: usize) -> usize {
        match self {
            Space::Affine => dim,
            Space::Projective => dim + 1,
        }
    }
}

/// A polynomial self-map of `A^d` or `P^d` defined over `Z[π]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapSpec {
    space: Space,
    dim: usize,
    polys: Vec<Polynomial>,
    /// `partials[i][j] = ∂polys[i]/∂x_j`.
    partials: Vec<Vec<Polynomial>>,
}

/// A point of `A^d` or `P^d` over some ring. Projective points are kept
/// normalized: the first unit coordinate is 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point<E>(pub Vec<E>);

impl<E> Point<E> {
    pub fn coords(&self) -> &[E] {
        &self.0
    }
}

/// Tail and cycle length of an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitRecord {
    pub tail: u64,
    pub cycle: u64,
}

/// Output of [`MapSpec::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapInfo {
    pub degrees: Vec<u32>,
}

impl MapSpec {
    /// Checks the syntactic shape: `d` (affine) or `d + 1` (projective)
    /// polynomials in as many variables, homogeneous of one common degree
    /// in the projective case.
    pub fn new(space: Space, dim: usize, polys: Vec<Polynomial>) -> Result<Self> {
        let n = space.coords(dim);
        if polys.len() != n {
            return Err(Error::DimensionMismatch(format!("expected {n} polynomials, got {}", polys.len())));
        }
        if let Some(bad) = polys.iter().find(|p| p.nvars() != n) {
            return Err(Error::DimensionMismatch(format!(
                "polynomial in {} variables, expected {n}",
                bad.nvars()
            )));
        }
        if space == Space::Projective {
            if !polys.iter().all(Polynomial::is_homogeneous) {
                return Err(Error::InhomogeneousMap);
            }
            let mut degs = polys.iter().filter_map(Polynomial::degree);
            if let Some(d) = degs.next() {
                if degs.any(|x| x != d) {
                    return Err(Error::InhomogeneousMap);
                }
            }
        }
        Ok(Self::build(space, dim, polys))
    }

    pub fn identity(space: Space, dim: usize) -> Self {
        let n = space.coords(dim);
        Self::build(space, dim, (0..n).map(|i| Polynomial::var(n, i)).collect())
    }

    fn build(space: Space, dim: usize, polys: Vec<Polynomial>) -> Self {
        let n = space.coords(dim);
        let partials = polys.iter().map(|p| (0..n).map(|j| p.derivative(j)).collect()).collect();
        MapSpec { space, dim, polys, partials }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn ncoords(&self) -> usize {
        self.space.coords(self.dim)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &MapSpec) -> Result<MapSpec> {
        if self.space != inner.space || self.dim != inner.dim {
            return Err(Error::DimensionMismatch("composing maps on different spaces".into()));
        }
        MapSpec::new(self.space, self.dim, self.polys.iter().map(|p| p.compose(&inner.polys)).collect())
    }

    /// Degrees of the coordinate polynomials, after checking (projective
    /// case) that they have no common zero in `P^d(k)`.
    pub fn validate(&self, field: &FieldSpec, cap: u64) -> Result<MapInfo> {
        if self.space == Space::Projective {
            let space = PointSpace::new(self.space, self.dim, field, cap)?;
            for i in 0..space.len() {
                let pt = space.point(i);
                if self.polys.iter().all(|p| field.is_zero_elem(&p.eval(field, &pt.0))) {
                    return Err(Error::BaseLocusNonempty);
                }
            }
        }
        Ok(MapInfo { degrees: self.polys.iter().map(|p| p.degree().unwrap_or(0)).collect() })
    }

    /// Brings a point to canonical form (projective: first unit coordinate 1).
    pub fn normalize<R: Ring>(&self, ring: &R, coords: Vec<R::Elem>) -> Result<Point<R::Elem>> {
        if self.space == Space::Affine {
            return Ok(Point(coords));
        }
        let lead = coords.iter().position(|c| ring.is_unit(c));
        let Some(lead) = lead else {
            return Err(if ring.precision() == 1 { Error::BaseLocusNonempty } else { Error::PrecisionExhausted });
        };
        let inv = ring.inv(&coords[lead])?;
        Ok(Point(coords.iter().map(|c| ring.mul(c, &inv)).collect()))
    }

    fn raw_eval<R: Ring>(&self, ring: &R, p: &Point<R::Elem>) -> Vec<R::Elem> {
        self.polys.iter().map(|f| f.eval(ring, &p.0)).collect()
    }

    pub fn evaluate<R: Ring>(&self, ring: &R, p: &Point<R::Elem>) -> Result<Point<R::Elem>> {
        if p.0.len() != self.ncoords() {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, map expects {}",
                p.0.len(),
                self.ncoords()
            )));
        }
        self.normalize(ring, self.raw_eval(ring, p))
    }

    pub fn iterate<R: Ring>(&self, ring: &R, p: &Point<R::Elem>, n: u64) -> Result<Point<R::Elem>> {
        let mut x = p.clone();
        for _ in 0..n {
            x = self.evaluate(ring, &x)?;
        }
        Ok(x)
    }

    /// Tail and cycle lengths of the orbit of `p`, by Brent's algorithm.
    /// Fails if more than `max_iter` map evaluations would be needed to see
    /// a repeat.
    pub fn orbit<R: Ring>(&self, ring: &R, p: &Point<R::Elem>, max_iter: u64) -> Result<OrbitRecord> {
        let mut power = 1u64;
        let mut lam = 1u64;
        let mut tortoise = p.clone();
        let mut hare = self.evaluate(ring, p)?;
        let mut steps = 1u64;
        while tortoise != hare {
            if steps >= max_iter {
                return Err(Error::IterationBudgetExceeded(max_iter));
            }
            if power == lam {
                tortoise = hare.clone();
                power *= 2;
                lam = 0;
            }
            hare = self.evaluate(ring, &hare)?;
            lam += 1;
            steps += 1;
        }
        let mut tortoise = p.clone();
        let mut hare = self.iterate(ring, p, lam)?;
        let mut tail = 0u64;
        while tortoise != hare {
            tortoise = self.evaluate(ring, &tortoise)?;
            hare = self.evaluate(ring, &hare)?;
            tail += 1;
        }
        Ok(OrbitRecord { tail, cycle: lam })
    }

    /// Index of the coordinate fixed to 1 in the affine chart containing a
    /// normalized point (always `None` for affine space).
    pub fn chart<R: Ring>(&self, ring: &R, p: &Point<R::Elem>) -> Option<usize> {
        match self.space {
            Space::Affine => None,
            Space::Projective => p.0.iter().position(|c| ring.is_unit(c)),
        }
    }

    /// Derivative matrix at `p`. For projective points it is taken in the
    /// affine chart of `p` (source) and of `f(p)` (target), dropping the
    /// coordinate fixed to 1 in each.
    pub fn jacobian<R: Ring>(&self, ring: &R, p: &Point<R::Elem>) -> Result<Matrix<R::Elem>> {
        let n = self.ncoords();
        let partial = |i: usize, j: usize| self.partials[i][j].eval(ring, &p.0);
        match self.space {
            Space::Affine => Ok((0..n).map(|i| (0..n).map(|j| partial(i, j)).collect()).collect()),
            Space::Projective => {
                let src = self.chart(ring, p).ok_or(Error::PrecisionExhausted)?;
                let values = self.raw_eval(ring, p);
                let dst = values.iter().position(|c| ring.is_unit(c)).ok_or(Error::PrecisionExhausted)?;
                let denom = &values[dst];
                let denom_sq_inv = ring.inv(&ring.mul(denom, denom))?;
                let mut rows = Vec::with_capacity(self.dim);
                for i in (0..n).filter(|&i| i != dst) {
                    let mut row = Vec::with_capacity(self.dim);
                    for j in (0..n).filter(|&j| j != src) {
                        // d(F_i / F_dst)/dx_j
                        let num = ring.sub(
                            &ring.mul(&partial(i, j), denom),
                            &ring.mul(&values[i], &partial(dst, j)),
                        );
                        row.push(ring.mul(&num, &denom_sq_inv));
                    }
                    rows.push(row);
                }
                Ok(rows)
            }
        }
    }

    /// Jacobian of `f^m` at `p` by the chain rule along the orbit.
    pub fn jacobian_iterate<R: Ring>(&self, ring: &R, p: &Point<R::Elem>, m: u64) -> Result<Matrix<R::Elem>> {
        let mut acc = linalg::identity(ring, self.dim);
        let mut x = p.clone();
        for _ in 0..m {
            let j = self.jacobian(ring, &x)?;
            acc = linalg::mat_mul(ring, &j, &acc);
            x = self.evaluate(ring, &x)?;
        }
        Ok(acc)
    }

    /// Coordinates of `p` in its chart, with the chart index.
    pub fn to_chart<R: Ring>(&self, ring: &R, p: &Point<R::Elem>) -> (Option<usize>, Vec<R::Elem>) {
        let chart = self.chart(ring, p);
        let coords = p.0.iter().enumerate().filter(|(i, _)| Some(*i) != chart).map(|(_, c)| c.clone()).collect();
        (chart, coords)
    }

    pub fn from_chart<R: Ring>(&self, ring: &R, chart: Option<usize>, coords: &[R::Elem]) -> Point<R::Elem> {
        match chart {
            None => Point(coords.to_vec()),
            Some(c) => {
                let mut v = coords.to_vec();
                v.insert(c, ring.one());
                Point(v)
            }
        }
    }
}

/// Reduction of a point onto the special fiber.
pub fn reduce_point<R: Ring>(ring: &R, p: &Point<R::Elem>) -> Point<FieldElem> {
    Point(p.0.iter().map(|c| ring.reduce(c)).collect())
}

/// Coordinate-wise lift of a residue point (stays normalized).
pub fn lift_point<R: Ring>(ring: &R, p: &Point<FieldElem>) -> Point<R::Elem> {
    Point(p.0.iter().map(|c| ring.lift(c)).collect())
}

/// The special fiber and its reduced map. Coefficients are reduced at
/// evaluation time, so the map itself is unchanged.
pub fn reduce_map_and_point<R: Ring>(m: &MapSpec, ring: &R, p: &Point<R::Elem>) -> (MapSpec, Point<FieldElem>) {
    (m.clone(), reduce_point(ring, p))
}

/// `A^d(k)` or `P^d(k)` with a dense indexing of its points.
#[derive(Debug, Clone)]
pub struct PointSpace<'a> {
    space: Space,
    dim: usize,
    field: &'a FieldSpec,
    len: u64,
    /// Projective: starting index of the block whose first nonzero coordinate is `j`.
    offsets: Vec<u64>,
}

impl<'a> PointSpace<'a> {
    pub fn new(space: Space, dim: usize, field: &'a FieldSpec, cap: u64) -> Result<Self> {
        let q = field.size() as u128;
        let (len, offsets) = match space {
            Space::Affine => (q.checked_pow(dim as u32).unwrap_or(u128::MAX), Vec::new()),
            Space::Projective => {
                let mut offsets = Vec::with_capacity(dim + 1);
                let mut total = 0u128;
                for j in 0..=dim {
                    offsets.push(total.min(u64::MAX as u128) as u64);
                    total = total.saturating_add(q.checked_pow((dim - j) as u32).unwrap_or(u128::MAX));
                }
                (total, offsets)
            }
        };
        if len > cap as u128 {
            return Err(Error::FieldTooLarge { what: "point space", size: len, cap });
        }
        Ok(PointSpace { space, dim, field, len: len as u64, offsets })
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn digits(&self, mut index: u64, count: usize) -> Vec<FieldElem> {
        let q = self.field.size();
        (0..count)
            .map(|_| {
                let d = index % q;
                index /= q;
                self.field.elem_from_index(d)
            })
            .collect()
    }

    pub fn point(&self, index: u64) -> Point<FieldElem> {
        match self.space {
            Space::Affine => Point(self.digits(index, self.dim)),
            Space::Projective => {
                let j = self.offsets.iter().rposition(|&o| o <= index).unwrap();
                let mut coords = Vec::with_capacity(self.dim + 1);
                coords.extend((0..j).map(|_| self.field.zero()));
                coords.push(self.field.one());
                coords.extend(self.digits(index - self.offsets[j], self.dim - j));
                Point(coords)
            }
        }
    }

    pub fn index(&self, p: &Point<FieldElem>) -> u64 {
        let q = self.field.size();
        let fold = |cs: &[FieldElem]| cs.iter().rev().fold(0u64, |acc, c| acc * q + self.field.index_of(c));
        match self.space {
            Space::Affine => fold(&p.0),
            Space::Projective => {
                let j = p.0.iter().position(|c| !self.field.is_zero_elem(c)).expect("normalized point");
                self.offsets[j] + fold(&p.0[j + 1..])
            }
        }
    }

    pub fn points(&self) -> impl Iterator<Item = Point<FieldElem>> + '_ {
        (0..self.len).map(move |i| self.point(i))
    }
}
