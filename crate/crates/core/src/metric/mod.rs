//! Geodesic distance fields, shortest paths and directions of shortest paths.

mod domain;
mod field;
mod focal;

pub use domain::{Domain, DEFAULT_STEINER};
pub use field::{Candidate, DistanceField, Via};
pub use focal::{in_polygon, world_to_face, world_xy, FocalItem, FocalSet};
mod directions;
mod walk;

pub use directions::{
    angle_between, cone_distance, direction_resolution, direction_set, directions_at, metric_projection,
    one_sided_derivative, shoot, DerivativeEstimate, Direction, DirectionSet, TangentFrame, TOL_REL,
};
pub use walk::{trace_shortest_path, walk, GeodesicPath, Walk};
