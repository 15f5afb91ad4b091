//! Declarative scene files, builtin scenes and the end-to-end pipeline.

mod builtins;
mod export;
mod pipeline;
mod random;
mod suite;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::metric_lab::LineMetric;
use crate::surface::SurfaceDescriptor;

pub use builtins::{builtin, builtin_names};
pub use export::{boxcount_csv, complex_obj, complex_svg, ExportFormat};
pub use pipeline::{run_scene, DimensionReport, ExtractionStats, RunOptions, SceneOutput, SceneReport, SurfaceSummary};
pub use random::random_polygon_pair;
pub use suite::{run_suite, SuiteReport, SUITES};

/// Current scene schema version.
pub const SCHEMA_VERSION: u32 = 1;

/// Default target edge length.
pub const DEFAULT_RESOLUTION: f64 = 0.02;

fn default_resolution() -> f64 {
    DEFAULT_RESOLUTION
}

fn default_steiner() -> usize {
    crate::metric::DEFAULT_STEINER
}

fn default_grid() -> usize {
    2048
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    pub version: u32,
    pub id: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    #[serde(default = "default_resolution")]
    pub resolution: f64,
    /// Checks to run; `None` selects the defaults for the scene class.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<CheckName>>,
    pub scene: SceneKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SceneKind {
    /// Focal sets on a triangulated surface.
    Surface {
        surface: SurfaceDescriptor,
        a: Vec<FocalDesc>,
        b: Vec<FocalDesc>,
        #[serde(default = "default_steiner")]
        steiner: usize,
    },
    /// Two points on the real line.
    Line {
        metric: LineMetric,
        p: f64,
        q: f64,
        lo: f64,
        hi: f64,
        step: f64,
    },
    /// Inside and outside of a Koch snowflake, by grid sign analysis.
    Koch {
        level: u32,
        #[serde(default = "default_grid")]
        grid: usize,
        #[serde(default)]
        swapped: bool,
    },
    /// Interlocking combs in a rectangular window.
    Comb {
        teeth: usize,
        gap: f64,
        /// Extract the complex on a mesh in addition to the grid analysis.
        #[serde(default = "yes")]
        extract: bool,
        #[serde(default = "default_grid")]
        grid: usize,
    },
    /// Two random star-shaped polygons in a disk of radius 2.
    PlanarRandom {
        seed: u64,
        index: u64,
    },
}

/// One connected piece of a focal set as written in a scene file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FocalDesc {
    /// Embedding coordinates, `[x, y]` or `[x, y, z]`, located on the
    /// nearest face (restricted to one sheet of a doubled surface if given).
    Point {
        at: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sheet: Option<u8>,
    },
    Vertex {
        index: u32,
    },
    /// Closed polygon in the plane of a planar surface.
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
    Faces {
        faces: Vec<u32>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Length,
    HomologyBound,
    MinimalSeparating,
    OneManifold,
    GridCrossCheck,
    Wedges,
    Bisector,
    StrictSides,
    Relabel,
    Derivative,
    Dimension,
}

impl CheckName {
    pub const ALL: [CheckName; 11] = [
        CheckName::Length,
        CheckName::HomologyBound,
        CheckName::MinimalSeparating,
        CheckName::OneManifold,
        CheckName::GridCrossCheck,
        CheckName::Wedges,
        CheckName::Bisector,
        CheckName::StrictSides,
        CheckName::Relabel,
        CheckName::Derivative,
        CheckName::Dimension,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Length => "length",
            CheckName::HomologyBound => "homology_bound",
            CheckName::MinimalSeparating => "minimal_separating",
            CheckName::OneManifold => "one_manifold",
            CheckName::GridCrossCheck => "grid_cross_check",
            CheckName::Wedges => "wedges",
            CheckName::Bisector => "bisector",
            CheckName::StrictSides => "strict_sides",
            CheckName::Relabel => "relabel",
            CheckName::Derivative => "derivative",
            CheckName::Dimension => "dimension",
        }
    }

    pub fn parse(s: &str) -> Result<CheckName> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Scene(format!("unknown check `{s}`")))
    }
}

impl SceneSpec {
    pub fn from_json(text: &str) -> Result<SceneSpec> {
        let spec: SceneSpec = serde_json::from_str(text).map_err(|e| Error::Scene(e.to_string()))?;
        spec.check()?;
        Ok(spec)
    }

    pub fn check(&self) -> Result<()> {
        if self.version != SCHEMA_VERSION {
            return Err(Error::Scene(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                self.version
            )));
        }
        if self.id.is_empty() {
            return Err(Error::Scene("scene id is empty".into()));
        }
        if !(self.resolution.is_finite() && self.resolution > 0.0) {
            return Err(Error::Scene(format!("resolution {} must be positive", self.resolution)));
        }
        if let SceneKind::Surface { a, b, .. } = &self.scene {
            if a.is_empty() || b.is_empty() {
                return Err(Error::EmptyFocalSet);
            }
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("scene specs serialize");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    /// Whether the scene lives on a closed surface.
    pub fn is_closed_surface(&self) -> bool {
        match &self.scene {
            SceneKind::Surface { surface, .. } => matches!(
                surface,
                SurfaceDescriptor::Sphere { .. } | SurfaceDescriptor::FlatTorus { .. } | SurfaceDescriptor::DoubledDisk { .. }
            ),
            _ => false,
        }
    }

    /// Default checks for the scene class.
    pub fn default_checks(&self) -> Vec<CheckName> {
        use CheckName::*;
        match &self.scene {
            SceneKind::Line { .. } => vec![],
            SceneKind::Koch { .. } => vec![Dimension],
            SceneKind::Comb { extract: false, .. } => vec![Dimension],
            SceneKind::Comb { .. } | SceneKind::PlanarRandom { .. } => {
                vec![Length, OneManifold, GridCrossCheck, Wedges, Bisector, StrictSides, Relabel, Dimension]
            }
            SceneKind::Surface { surface, a, b, .. } => {
                if self.is_closed_surface() {
                    vec![Length, HomologyBound, MinimalSeparating, Wedges, Bisector, StrictSides, Relabel]
                } else if surface.is_planar_window() {
                    // the 1-manifold theorem needs connected focal sets
                    if a.len() == 1 && b.len() == 1 {
                        vec![Length, OneManifold, GridCrossCheck, Wedges, Bisector, StrictSides, Relabel, Dimension, Derivative]
                    } else {
                        vec![Length, Wedges, Bisector, StrictSides, Relabel, Dimension]
                    }
                } else {
                    vec![Length, Wedges, Bisector, StrictSides, Relabel]
                }
            }
        }
    }

    pub fn checks(&self) -> Vec<CheckName> {
        self.checks.clone().unwrap_or_else(|| self.default_checks())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_fields_and_versions() {
        let ok = r#"{"version":1,"id":"x","scene":{"kind":"line","metric":"truncated","p":2,"q":-2,"lo":-10,"hi":10,"step":1e-4}}"#;
        assert!(SceneSpec::from_json(ok).is_ok());
        let extra = ok.replace(r#""id":"x""#, r#""id":"x","colour":1"#);
        assert!(SceneSpec::from_json(&extra).is_err());
        let inner = ok.replace(r#""step":1e-4"#, r#""step":1e-4,"foo":2"#);
        assert!(SceneSpec::from_json(&inner).is_err());
        let v2 = ok.replace(r#""version":1"#, r#""version":2"#);
        assert!(SceneSpec::from_json(&v2).is_err());
    }

    #[test]
    fn builtins_roundtrip_and_hash() {
        for name in builtin_names() {
            let spec = builtin(name).unwrap();
            let text = serde_json::to_string(&spec).unwrap();
            let back = SceneSpec::from_json(&text).unwrap();
            assert_eq!(back, spec, "{name}");
            assert_eq!(back.hash(), spec.hash());
            assert_eq!(spec.hash().len(), 64);
        }
        assert!(builtin("nope").is_err());
    }

    #[test]
    fn check_names_parse() {
        for c in CheckName::ALL {
            assert_eq!(CheckName::parse(c.as_str()).unwrap(), c);
        }
        assert!(CheckName::parse("bogus").is_err());
    }
}
