//! Polynomial self-maps of affine and projective space and their dynamics
//! on the special fiber.

pub mod census;
pub mod linalg;
pub mod map;
pub mod poly;

pub use census::{special_fiber_census, special_fiber_census_via, successor_table, FiberCensus};
pub use map::{lift_point, reduce_map_and_point, reduce_point, MapInfo, MapSpec, OrbitRecord, Point, PointSpace, Space};
pub use poly::{Monomial, Polynomial};
