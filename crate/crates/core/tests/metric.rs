use std::f64::consts::PI;
use std::sync::Arc;

use mediatrix::metric::{DistanceField, Domain, FocalSet};
use mediatrix::metric_lab::{line_equidistant, LineMetric, Root};
use mediatrix::surface::generators::{cone, flat_disk, sphere};
use mediatrix::surface::TriSurface;

fn max_error(s: TriSurface, steiner: usize, src: [f64; 3], exact: impl Fn([f64; 3]) -> f64) -> f64 {
    let s = Arc::new(s);
    let p = s.locate(src, None).unwrap();
    let d = Arc::new(Domain::new(s.clone(), steiner));
    let f = DistanceField::compute(d, FocalSet::points([p]).unwrap()).unwrap();
    let pos = s.positions().unwrap();
    (0..s.n_vertices())
        .map(|v| (f.value(v as u32) - exact(pos[v])).abs())
        .fold(0.0, f64::max)
}

#[test]
fn flat_disk_fields_are_exact() {
    for src in [[0.13, 0.07, 0.0], [-0.41, 0.22, 0.0], [0.0, -0.6, 0.0]] {
        for (h, m) in [(0.1, 3), (0.05, 7)] {
            let e = max_error(flat_disk(1.0, h).unwrap(), m, src, |q| (q[0] - src[0]).hypot(q[1] - src[1]));
            assert!(e < 1e-9, "{src:?} h={h}: {e}");
        }
    }
}

/// Geodesic distance on the cone of total angle `theta`, by unfolding.
fn cone_oracle(theta: f64, a: [f64; 3], b: [f64; 3]) -> f64 {
    let s = theta / (2.0 * PI);
    let polar = |q: [f64; 3]| {
        let r = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt();
        (r, q[1].atan2(q[0]).rem_euclid(2.0 * PI) * s)
    };
    let ((r1, t1), (r2, t2)) = (polar(a), polar(b));
    let dt = (t1 - t2).abs();
    let dt = dt.min(theta - dt);
    if dt >= PI {
        r1 + r2
    } else {
        (r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * dt.cos()).max(0.0).sqrt()
    }
}

/// Errors this small are rounding in the corridor unfolding.
const EXACT: f64 = 1e-5;

fn refines(coarse: f64, fine: f64) -> bool {
    coarse.max(fine) < EXACT || coarse >= 1.5 * fine
}

#[test]
fn halving_h_reduces_cone_error() {
    let theta = 1.5 * PI;
    let s = theta / (2.0 * PI);
    let z = (1.0 - s * s).sqrt();
    for (rho, t) in [(0.5, 0.3), (0.3, 2.0), (0.7, 4.0)] {
        let src = [rho * s * f64::cos(t), rho * s * f64::sin(t), -rho * z];
        let coarse = max_error(cone(theta, 1.0, 0.1).unwrap(), 3, src, |q| cone_oracle(theta, src, q));
        let fine = max_error(cone(theta, 1.0, 0.05).unwrap(), 7, src, |q| cone_oracle(theta, src, q));
        assert!(refines(coarse, fine), "{rho} {t}: {coarse} -> {fine}");
    }
}

#[test]
fn halving_h_reduces_sphere_error() {
    let great_circle = |a: [f64; 3], b: [f64; 3]| {
        let n = |q: [f64; 3]| (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt();
        let c = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) / (n(a) * n(b));
        c.clamp(-1.0, 1.0).acos()
    };
    for src in [[0.0, 0.0, 1.0], [0.6, 0.0, 0.8], [0.36, -0.48, 0.8]] {
        let coarse = max_error(sphere(1.0, 0.1).unwrap(), 3, src, |q| great_circle(src, q));
        let fine = max_error(sphere(1.0, 0.05).unwrap(), 7, src, |q| great_circle(src, q));
        assert!(fine > EXACT && refines(coarse, fine), "{src:?}: {coarse} -> {fine}");
    }
}

fn ends(roots: &[Root]) -> Vec<f64> {
    roots
        .iter()
        .flat_map(|r| match *r {
            Root::Point { x } => vec![x],
            Root::Interval { lo, hi } => vec![lo, hi],
        })
        .collect()
}

#[test]
fn truncated_endpoints_are_stable_under_refinement() {
    let res = 1e-3;
    let coarse = line_equidistant(LineMetric::Truncated, 2.0, -2.0, -10.0, 10.0, res).unwrap();
    let fine = line_equidistant(LineMetric::Truncated, 2.0, -2.0, -10.0, 10.0, res / 10.0).unwrap();
    let (a, b) = (ends(&coarse), ends(&fine));
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < res, "{x} vs {y}");
    }
    // breakpoints are where one distance reaches the truncation level
    for (x, want) in b.iter().zip([-10.0, -3.0, -1.0, 1.0, 3.0, 10.0]) {
        assert!((x - want).abs() < res / 10.0, "{x} vs {want}");
    }
}
