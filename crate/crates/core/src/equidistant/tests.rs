use std::f64::consts::PI;
use std::sync::Arc;

use super::*;
use crate::metric::{directions_at, DistanceField, Domain, FocalSet};
use crate::surface::generators::{cone, flat_disk, flat_torus, sphere};
use crate::surface::{double, SurfacePoint, TriSurface};

fn signed(s: TriSurface, a: Vec<SurfacePoint>, b: Vec<SurfacePoint>) -> SignedField {
    let d = Arc::new(Domain::new(Arc::new(s), 3));
    let fa = Arc::new(DistanceField::compute(d.clone(), FocalSet::points(a).unwrap()).unwrap());
    let fb = Arc::new(DistanceField::compute(d, FocalSet::points(b).unwrap()).unwrap());
    SignedField::new(fa, fb).unwrap()
}

fn at(s: &TriSurface, p: [f64; 2]) -> SurfacePoint {
    s.locate([p[0], p[1], 0.0], None).unwrap()
}

#[test]
fn two_points_give_clipped_chord() {
    let s = flat_disk(2.0, 0.05).unwrap();
    let (a, b) = (at(&s, [-1.0, 0.0]), at(&s, [1.0, 0.0]));
    let sf = signed(s, vec![a], vec![b]);
    let c = extract_equidistant(&sf).unwrap();
    assert_eq!(c.edges.len(), 1);
    assert_eq!(c.count(NodeKind::WindowClipped), 2);
    assert_eq!(c.count(NodeKind::Junction), 0);
    assert!((c.length() - 4.0).abs() < 0.08, "{}", c.length());
    let s = sf.surface();
    for p in &c.edges[0].points {
        let x = s.embed(p).unwrap()[0];
        assert!(x.abs() < 1e-3, "{x} {p:?}");
    }
}

#[test]
fn square_configuration_has_degree_four_junction() {
    let s = flat_disk(2.0, 0.05).unwrap();
    let a = vec![at(&s, [1.0, 0.0]), at(&s, [-1.0, 0.0])];
    let b = vec![at(&s, [0.0, 1.0]), at(&s, [0.0, -1.0])];
    let sf = signed(s, a, b);
    let c = extract_equidistant(&sf).unwrap();
    assert_eq!(c.count(NodeKind::Junction), 1);
    assert_eq!(c.count(NodeKind::WindowClipped), 4);
    assert_eq!(c.nodes.len(), 5);
    assert_eq!(c.edges.len(), 4);
    let j = c.nodes.iter().find(|n| n.kind == NodeKind::Junction).unwrap();
    assert_eq!(j.degree, 4);
    let w = sf.surface().embed(&j.point).unwrap();
    assert!(w[0].hypot(w[1]) < 0.05);
}

#[test]
fn offset_junction_is_resolved() {
    // junction away from vertices: the discrete arcs pass near each other
    let s = flat_disk(2.0, 0.05).unwrap();
    let o = [0.0123, 0.0311];
    let a = vec![at(&s, [o[0] + 0.9, o[1] + 0.1]), at(&s, [o[0] - 0.9, o[1] - 0.1])];
    let b = vec![at(&s, [o[0] - 0.1, o[1] + 0.9]), at(&s, [o[0] + 0.1, o[1] - 0.9])];
    let sf = signed(s, a, b);
    let c = extract_equidistant(&sf).unwrap();
    assert_eq!(c.count(NodeKind::Junction), 1, "{:?}", c.nodes);
    assert_eq!(c.edges.len(), 4);
}

#[test]
fn doubled_disk_gives_seam_loop() {
    let base = flat_disk(1.0, 0.05).unwrap();
    let n = base.n_vertices() as u32;
    let sf = signed(double(&base).unwrap(), vec![SurfacePoint::Vertex(0)], vec![SurfacePoint::Vertex(n)]);
    let c = extract_equidistant(&sf).unwrap();
    assert_eq!(c.edges.len(), 1);
    assert_eq!(c.nodes[0].kind, NodeKind::LoopMarker);
    assert!((c.length() - 2.0 * PI).abs() < 0.03 * 2.0 * PI, "{}", c.length());
    let s = sf.surface();
    for p in &c.edges[0].points {
        let w = s.embed(p).unwrap();
        assert!((w[0].hypot(w[1]) - 1.0).abs() < 0.1);
    }
}

#[test]
fn sphere_antipodal_equator() {
    let s = sphere(1.0, 0.1).unwrap();
    let n = s.locate([0.0, 0.0, 1.0], None).unwrap();
    let so = s.locate([0.0, 0.0, -1.0], None).unwrap();
    let sf = signed(s, vec![n], vec![so]);
    let c = extract_equidistant(&sf).unwrap();
    assert_eq!(c.edges.len(), 1);
    assert!((c.length() - 2.0 * PI).abs() < 0.03 * 2.0 * PI, "{}", c.length());
}

#[test]
fn torus_diamond() {
    let s = flat_torus(1.0, 0.05).unwrap();
    let a = s.locate([0.0, 0.0, 0.0], None).unwrap();
    let b = s.locate([0.5, 0.5, 0.0], None).unwrap();
    let sf = signed(s, vec![a], vec![b]);
    let c = extract_equidistant(&sf).unwrap();
    assert_eq!(c.count(NodeKind::Junction), 2, "{:?}", c.nodes);
    assert_eq!(c.edges.len(), 4);
    assert!(c.nodes.iter().all(|n| n.degree == 4));
    // four sides of length sqrt(2)/2
    assert!((c.length() - 2.0 * 2f64.sqrt()).abs() < 0.05);
}

#[test]
fn relabelling_gives_identical_complex() {
    let s = flat_disk(2.0, 0.05).unwrap();
    let a = vec![at(&s, [0.83, 0.1]), at(&s, [-0.9, -0.2])];
    let b = vec![at(&s, [0.05, 0.77]), at(&s, [0.2, -1.0])];
    let sf = signed(s, a, b);
    let c = extract_equidistant(&sf).unwrap();
    let d = extract_equidistant(&sf.swapped()).unwrap();
    assert_eq!(c, d);
}

#[test]
fn separation_guard() {
    let s = flat_disk(1.0, 0.05).unwrap();
    let (a, b) = (at(&s, [-0.1, 0.0]), at(&s, [0.1, 0.0]));
    let sf = signed(s, vec![a], vec![b]);
    assert!(matches!(extract_equidistant(&sf), Err(crate::Error::SeparationTooSmall { .. })));
}

#[test]
fn midpoint_wedges_and_residuals() {
    let s = flat_disk(2.0, 0.05).unwrap();
    let (a, b) = (at(&s, [-1.0, 0.0]), at(&s, [1.0, 0.0]));
    let sf = signed(s, vec![a], vec![b]);
    let (da, db, frame) = directions_at(sf.field_a(), sf.field_b(), &SurfacePoint::Vertex(0)).unwrap();
    let ws = wedges_at(&frame, &da, &db).unwrap();
    assert_eq!(ws.len(), 2);
    for w in &ws {
        assert!((w.width - PI).abs() < 1e-9);
        assert!((w.half_angle - PI / 2.0).abs() < 1e-9);
    }
    let c = extract_equidistant(&sf).unwrap();
    let samples = sample_wedges(&sf, &c, 5.0 * 0.05);
    assert!(samples.len() > 10);
    for x in &samples {
        assert_eq!(x.n_wedges, 2, "{x:?}");
        if let Some(r) = x.residual {
            assert!(r < 0.02, "{x:?}");
        }
    }
}

#[test]
fn cone_point_wedge_cases() {
    let theta = 1.5 * PI;
    let s = cone(theta, 1.0, 0.05).unwrap();
    // polar points at intrinsic angle ±π/4 from the apex direction pair
    let pos = |r: f64, phi: f64| {
        let t = phi / 0.75;
        s.locate([r * 0.75 * t.cos(), r * 0.75 * t.sin(), -r * (1.0 - 0.5625f64).sqrt()], None).unwrap()
    };
    let a = pos(0.6, 0.0);
    let b = pos(0.6, PI / 2.0);
    let sf = signed(s, vec![a], vec![b]);
    let (da, db, frame) = directions_at(sf.field_a(), sf.field_b(), &SurfacePoint::Vertex(0)).unwrap();
    assert!((frame.total - theta).abs() < 1e-9);
    let mut ws = wedges_at(&frame, &da, &db).unwrap();
    ws.sort_by(|x, y| x.width.total_cmp(&y.width));
    assert_eq!(ws.len(), 2);
    assert!((ws[0].width - PI / 2.0).abs() < 0.02);
    assert!((ws[1].width - PI).abs() < 0.02);
    assert_eq!(ws[0].case, BisectorCase::Acute);
    assert_eq!(ws[1].case, BisectorCase::Obtuse);
    for w in &ws {
        assert!((w.half_angle - w.width / 2.0).abs() < 1e-9);
    }
}

