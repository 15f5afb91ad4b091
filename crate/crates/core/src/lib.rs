#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod equidistant;
pub mod error;
pub mod geom;
pub mod surface;
pub mod topology;

pub use error::{Error, Result};
pub mod metric;
pub mod measure;
pub mod metric_lab;
pub mod scene;
