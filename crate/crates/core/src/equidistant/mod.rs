//! The signed field `d(·,A) − d(·,B)`, its zero set as a 1-complex, and wedges.

mod extract;
mod signed;
mod wedges;

pub use extract::{arclength, extract_equidistant, point_at, EquidistantComplex, Node, NodeKind, Polyline, MIN_SEPARATION};
pub use signed::{SignedField, EPS_ZERO_REL};
pub use wedges::{bisector_residual, sample_wedges, wedges_at, BisectorCase, Side, Wedge, WedgeSample};

#[cfg(test)]
mod tests;
