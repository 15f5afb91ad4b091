use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::TriSurface;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleFailure {
    pub vertex: u32,
    pub total_angle: f64,
}

/// Outcome of the polyhedral curvature-bounded-below check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pass: bool,
    /// Interior vertices with total angle above `2π + tol`.
    pub failures: Vec<AngleFailure>,
    /// Boundary vertices with total angle above `π`; doubling them would
    /// create interior vertices that fail.
    pub boundary_warnings: Vec<AngleFailure>,
    pub max_interior_angle: f64,
    /// Sum of angle defects, interior `2π − θ` plus boundary `π − θ`.
    pub total_defect: f64,
    pub tolerance: f64,
}

/// A polyhedral surface has curvature bounded below exactly when no interior
/// vertex carries more than `2π` of total angle.
pub fn validate_alexandrov(s: &TriSurface, tol_angle: f64) -> ValidationReport {
    let mut failures = Vec::new();
    let mut boundary_warnings = Vec::new();
    let mut max_interior: f64 = 0.0;
    for v in 0..s.n_vertices() as u32 {
        let theta = s.cone_angle(v);
        if s.is_boundary_vertex(v) {
            if theta > PI + tol_angle {
                boundary_warnings.push(AngleFailure { vertex: v, total_angle: theta });
            }
        } else {
            max_interior = max_interior.max(theta);
            if theta > 2.0 * PI + tol_angle {
                failures.push(AngleFailure { vertex: v, total_angle: theta });
            }
        }
    }
    ValidationReport {
        pass: failures.is_empty(),
        failures,
        boundary_warnings,
        max_interior_angle: max_interior,
        total_defect: total_defect(s),
        tolerance: tol_angle,
    }
}

fn total_defect(s: &TriSurface) -> f64 {
    (0..s.n_vertices() as u32)
        .map(|v| {
            let base = if s.is_boundary_vertex(v) { PI } else { 2.0 * PI };
            base - s.cone_angle(v)
        })
        .sum()
}

/// `Σ defects − 2πχ`; zero up to rounding for every valid triangulation.
pub fn gauss_bonnet_residual(s: &TriSurface) -> f64 {
    total_defect(s) - 2.0 * PI * s.euler_characteristic() as f64
}
