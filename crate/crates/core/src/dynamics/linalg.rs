//! Small dense matrices over a [`Ring`].

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ring::Ring;

pub type Matrix<E> = Vec<Vec<E>>;

pub fn identity<R: Ring>(ring: &R, n: usize) -> Matrix<R::Elem> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { ring.one() } else { ring.zero() }).collect())
        .collect()
}

pub fn mat_mul<R: Ring>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(ring.zero(), |acc, k| ring.add(&acc, &ring.mul(&row[k], &b[k][j])))
                })
                .collect()
        })
        .collect()
}

pub fn mat_sub<R: Ring>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| ring.sub(x, y)).collect())
        .collect()
}

pub fn mat_vec<R: Ring>(ring: &R, a: &Matrix<R::Elem>, v: &[R::Elem]) -> Vec<R::Elem> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(ring.zero(), |acc, (x, y)| ring.add(&acc, &ring.mul(x, y))))
        .collect()
}

/// Solves `a x = b` by elimination with unit pivots. Over a local ring a
/// square matrix is invertible iff some unit pivot exists at every step,
/// so failure means `det(a)` is not a unit.
pub fn solve<R: Ring>(ring: &R, a: &Matrix<R::Elem>, b: &[R::Elem]) -> Result<Vec<R::Elem>> {
    let n = a.len();
    let mut m: Matrix<R::Elem> = a.clone();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let pivot = (col..n).find(|&r| ring.is_unit(&m[r][col])).ok_or(Error::Degenerate)?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = ring.inv(&m[col][col])?;
        for x in &mut m[col][col..] {
            *x = ring.mul(x, &inv);
        }
        rhs[col] = ring.mul(&rhs[col], &inv);
        let pivot_row = m[col].clone();
        for r in 0..n {
            if r == col || ring.is_zero(&m[r][col]) {
                continue;
            }
            let factor = m[r][col].clone();
            for (x, y) in m[r][col..].iter_mut().zip(&pivot_row[col..]) {
                *x = ring.sub(x, &ring.mul(&factor, y));
            }
            let t = ring.mul(&factor, &rhs[col]);
            rhs[r] = ring.sub(&rhs[r], &t);
        }
    }
    Ok(rhs)
}

/// Whether a square matrix is invertible over the ring (its determinant is a unit).
pub fn is_invertible<R: Ring>(ring: &R, a: &Matrix<R::Elem>) -> bool {
    let zero = alloc::vec![ring.zero(); a.len()];
    solve(ring, a, &zero).is_ok()
}

/// Determinant by elimination with unit pivots; exact over fields.
pub fn det<R: Ring>(ring: &R, a: &Matrix<R::Elem>) -> R::Elem {
    let n = a.len();
    let mut m = a.clone();
    let mut acc = ring.one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| ring.is_unit(&m[r][col])) else {
            return ring.zero();
        };
        if pivot != col {
            m.swap(col, pivot);
            acc = ring.neg(&acc);
        }
        acc = ring.mul(&acc, &m[col][col]);
        let inv = ring.inv(&m[col][col]).expect("unit pivot");
        for r in col + 1..n {
            let factor = ring.mul(&m[r][col], &inv);
            let (upper, lower) = m.split_at_mut(r);
            for (x, y) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *x = ring.sub(x, &ring.mul(&factor, y));
            }
        }
    }
    acc
}

/// Determinant by cofactor expansion. Uses no division, so it is exact over
/// any ring; meant for the small dimensions handled here.
pub fn det_expansion<R: Ring>(ring: &R, a: &Matrix<R::Elem>) -> R::Elem {
    let n = a.len();
    if n == 0 {
        return ring.one();
    }
    if n == 1 {
        return a[0][0].clone();
    }
    let mut acc = ring.zero();
    for col in 0..n {
        let minor: Matrix<R::Elem> = a[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = ring.mul(&a[0][col], &det_expansion(ring, &minor));
        acc = if col % 2 == 0 { ring.add(&acc, &term) } else { ring.sub(&acc, &term) };
    }
    acc
}
