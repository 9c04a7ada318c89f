use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::dynamics::map::{lift_point, reduce_point, MapSpec, PointSpace};
use crate::error::Result;
use crate::residue_field::{FieldSpec, DEFAULT_ENUMERATION_CAP};
use crate::ring::Ring;

/// Functional-graph summary of the reduced map on `X_s(k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiberCensus {
    pub q: u64,
    pub n_pts: u64,
    pub d: usize,
    /// One entry per cycle, sorted ascending.
    pub cycles: Vec<u64>,
    pub per_set: BTreeSet<u64>,
    /// Strictly preperiodic points.
    pub tails: u64,
}

impl FiberCensus {
    /// Decomposes the functional graph `i ↦ succ[i]`.
    pub fn from_successors(q: u64, d: usize, succ: &[u64]) -> Self {
        const NEW: u8 = 0;
        const ACTIVE: u8 = 1;
        const DONE: u8 = 2;
        let n = succ.len();
        let mut state = vec![NEW; n];
        let mut cycles = Vec::new();
        let mut path = Vec::new();
        for start in 0..n {
            if state[start] != NEW {
                continue;
            }
            path.clear();
            let mut x = start;
            while state[x] == NEW {
                state[x] = ACTIVE;
                path.push(x);
                x = succ[x] as usize;
            }
            if state[x] == ACTIVE {
                let pos = path.iter().position(|&y| y == x).expect("on path");
                cycles.push((path.len() - pos) as u64);
            }
            for &y in &path {
                state[y] = DONE;
            }
        }
        cycles.sort_unstable();
        let on_cycles: u64 = cycles.iter().sum();
        FiberCensus {
            q,
            n_pts: n as u64,
            d,
            per_set: cycles.iter().copied().collect(),
            tails: n as u64 - on_cycles,
            cycles,
        }
    }

    /// Number of periodic points of exact period `n`.
    pub fn points_of_period(&self, n: u64) -> u64 {
        self.cycles.iter().filter(|&&c| c == n).count() as u64 * n
    }
}

/// Successor indices for the points with index in `range`, computing `f`
/// on lifts to `ring` and reducing back. With `ring` the residue field this
/// is the plain reduced map.
pub fn successor_table<R: Ring>(map: &MapSpec, ring: &R, space: &PointSpace<'_>, range: Range<u64>) -> Result<Vec<u64>> {
    range
        .map(|i| {
            let pt = lift_point(ring, &space.point(i));
            let image = map.evaluate(ring, &pt)?;
            Ok(space.index(&reduce_point(ring, &image)))
        })
        .collect()
}

/// Full census of the reduced map on `X_s(k)`.
pub fn special_fiber_census(map: &MapSpec, field: &FieldSpec) -> Result<FiberCensus> {
    special_fiber_census_via(map, field, DEFAULT_ENUMERATION_CAP)
}

/// Census computed through an arbitrary base change: each residue point is
/// lifted, mapped in `ring` and reduced.
pub fn special_fiber_census_via<R: Ring>(map: &MapSpec, ring: &R, cap: u64) -> Result<FiberCensus> {
    let field = ring.residue_field();
    let space = PointSpace::new(map.space(), map.dim(), field, cap)?;
    map.validate(field, cap)?;
    let succ = successor_table(map, ring, &space, 0..space.len())?;
    Ok(FiberCensus::from_successors(field.size(), map.dim(), &succ))
}
