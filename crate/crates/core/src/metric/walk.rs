//! Straight-line walking across faces and shortest-path tracing.

use serde::Serialize;

use super::field::DistanceField;
use crate::error::{Error, Result};
use crate::geom::{point_segment_distance, ray_segment, Vec2};
use crate::surface::{SurfacePoint, TriSurface, NONE};

/// End state of a straight walk.
#[derive(Clone, Debug)]
pub struct Walk {
    /// Edge crossings with the arc length at which they occur.
    pub crossings: Vec<(SurfacePoint, f64)>,
    pub face: u32,
    pub pos: Vec2,
    pub dir: Vec2,
    pub traveled: f64,
}

impl Walk {
    pub fn end_point(&self, s: &TriSurface) -> SurfacePoint {
        s.face_point(self.face, self.pos, 1e-12)
    }
}

/// Walks a straight line of the given length from `pos` in face `face`,
/// unfolding across edges. Fails if the line leaves through the boundary.
pub fn walk(s: &TriSurface, face: u32, pos: Vec2, dir: Vec2, length: f64) -> Result<Walk> {
    let mut f = face;
    let mut p = pos;
    let mut d = dir.normalized();
    let mut remaining = length;
    let mut traveled = 0.0;
    let mut entry = NONE;
    let mut crossings = Vec::new();
    let scale = s.max_edge_length();
    for _ in 0..(4 * s.n_faces() + 64) {
        let l = s.layout(f);
        let fe = s.face_edges(f);
        let mut best: Option<(f64, usize, f64)> = None;
        for c in 0..3 {
            if fe[c] == entry {
                continue;
            }
            if let Some((t, u)) = ray_segment(p, d, l[c], l[(c + 1) % 3]) {
                if t > 1e-13 * scale && (-1e-9..=1.0 + 1e-9).contains(&u) && best.map_or(true, |b| t < b.0) {
                    best = Some((t, c, u));
                }
            }
        }
        let Some((t, c, u)) = best else {
            if remaining <= 1e-9 * scale {
                break;
            }
            // Starting on an edge or vertex while pointing out of the face:
            // step into the neighbour without advancing.
            let mut moved = false;
            for c in 0..3 {
                let (a, b) = (l[c], l[(c + 1) % 3]);
                if fe[c] == entry || point_segment_distance(p, a, b) > 1e-9 * scale || (b - a).cross(d) >= 0.0 {
                    continue;
                }
                let e = fe[c];
                let g = s.edge(e).other_face(f);
                if g == NONE {
                    return Err(Error::GeodesicExitsSurface(traveled));
                }
                let m = s.unfold(f, g, e);
                p = m.apply(p);
                d = m.rotate(d);
                f = g;
                entry = e;
                moved = true;
                break;
            }
            if moved {
                continue;
            }
            return Err(Error::GeodesicExitsSurface(traveled));
        };
        if t >= remaining {
            p = p + d * remaining;
            traveled += remaining;
            remaining = 0.0;
            break;
        }
        let e = fe[c];
        let ed = s.edge(e);
        if ed.is_boundary() {
            return Err(Error::GeodesicExitsSurface(traveled + t));
        }
        let u = u.clamp(1e-9, 1.0 - 1e-9);
        let q = l[c].lerp(l[(c + 1) % 3], u);
        let tri = s.triangle(f);
        let te = if tri[c] == ed.v[0] { u } else { 1.0 - u };
        traveled += t;
        remaining -= t;
        crossings.push((SurfacePoint::Edge { edge: e, t: te }, traveled));
        let g = ed.other_face(f);
        let m = s.unfold(f, g, e);
        p = m.apply(q);
        d = m.rotate(d);
        f = g;
        entry = e;
    }
    if remaining > 1e-9 * scale {
        return Err(Error::GeodesicExitsSurface(traveled));
    }
    Ok(Walk {
        crossings,
        face: f,
        pos: p,
        dir: d,
        traveled,
    })
}

/// Polyline on the surface with cumulative arc length.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeodesicPath {
    pub points: Vec<SurfacePoint>,
    pub arclength: Vec<f64>,
}

impl GeodesicPath {
    pub fn length(&self) -> f64 {
        self.arclength.last().copied().unwrap_or(0.0)
    }

    /// Point at arc length `t` (linear between stored points, which share a face).
    pub fn point_at(&self, s: &TriSurface, t: f64) -> SurfacePoint {
        let i = self.arclength.partition_point(|&a| a <= t);
        if i == 0 {
            return self.points[0];
        }
        if i >= self.points.len() {
            return *self.points.last().unwrap();
        }
        let (a, b) = (self.points[i - 1], self.points[i]);
        let (ta, tb) = (self.arclength[i - 1], self.arclength[i]);
        let w = if tb > ta { (t - ta) / (tb - ta) } else { 0.0 };
        for f in s.incident_faces(&a) {
            if let (Some(pa), Some(pb)) = (s.point_in_face(&a, f), s.point_in_face(&b, f)) {
                return s.face_point(f, pa.lerp(pb, w), 1e-12);
            }
        }
        a
    }
}

/// Follows the stored virtual-source chain from a candidate segment to the
/// focal set.
pub(crate) fn follow(
    field: &DistanceField,
    start: SurfacePoint,
    mut face: u32,
    mut pos: Vec2,
    mut target: Vec2,
    mut anchor: u32,
) -> Result<GeodesicPath> {
    let dom = field.domain();
    let s = dom.surface();
    let mut points = vec![start];
    let mut arclength = vec![0.0];
    let mut acc = 0.0;
    for _ in 0..dom.n_samples() + 1 {
        let len = pos.dist(target);
        let (end_face, end_pos) = if len > 0.0 {
            let w = walk(s, face, pos, target - pos, len)?;
            for (p, t) in &w.crossings {
                points.push(*p);
                arclength.push(acc + t);
            }
            acc += w.traveled;
            (w.face, w.pos)
        } else {
            (face, pos)
        };
        if field.anchor_item(anchor).is_some() {
            points.push(s.face_point(end_face, end_pos, 1e-9));
            arclength.push(acc);
            break;
        }
        let sp = dom.sample_point(anchor);
        points.push(sp);
        arclength.push(acc);
        let l = field.label(anchor);
        if l.frame == NONE {
            break;
        }
        face = l.frame;
        pos = dom.sample_pos(anchor, face).expect("sample on its frame face");
        target = l.src;
        anchor = l.anchor;
    }
    dedup(&mut points, &mut arclength);
    Ok(GeodesicPath { points, arclength })
}

fn dedup(points: &mut Vec<SurfacePoint>, arc: &mut Vec<f64>) {
    let mut keep_p = Vec::with_capacity(points.len());
    let mut keep_a = Vec::with_capacity(arc.len());
    for (p, a) in points.iter().zip(arc.iter()) {
        if let Some(&last) = keep_a.last() {
            if *a - last <= 1e-15 && keep_p.last() == Some(p) {
                continue;
            }
        }
        keep_p.push(*p);
        keep_a.push(*a);
    }
    *points = keep_p;
    *arc = keep_a;
}

/// Shortest path from `p` to the focal set of `field`.
pub fn trace_shortest_path(field: &DistanceField, p: &SurfacePoint) -> Result<GeodesicPath> {
    if field.in_focal(p) {
        return Err(Error::PointInFocalSet);
    }
    let c = field
        .best_candidate(p)
        .ok_or_else(|| Error::PointNotOnSurface(format!("{p:?}")))?;
    follow(field, *p, c.face, c.pos, c.target, c.anchor)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use super::*;
    use crate::metric::{Domain, FocalSet};
    use crate::surface::double;
    use crate::surface::generators::{cone, flat_disk, sphere};

    fn field(s: TriSurface, k: Vec<SurfacePoint>) -> DistanceField {
        let d = Arc::new(Domain::new(Arc::new(s), 3));
        DistanceField::compute(d, FocalSet::points(k).unwrap()).unwrap()
    }

    fn cone_chord(theta: f64, a: [f64; 3], b: [f64; 3]) -> f64 {
        let r = |p: [f64; 3]| (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        let dt = (a[1].atan2(a[0]) - b[1].atan2(b[0])).abs().rem_euclid(2.0 * PI);
        let dphi = dt.min(2.0 * PI - dt) * theta / (2.0 * PI);
        let (ra, rb) = (r(a), r(b));
        if dphi >= PI {
            ra + rb
        } else {
            (ra * ra + rb * rb - 2.0 * ra * rb * dphi.cos()).sqrt()
        }
    }

    #[test]
    fn disk_path_is_straight() {
        let f = field(flat_disk(1.0, 0.05).unwrap(), vec![SurfacePoint::Vertex(0)]);
        let s = f.surface();
        let x = s.locate([0.61, 0.33, 0.0], None).unwrap();
        let p = trace_shortest_path(&f, &x).unwrap();
        let len = (0.61f64.hypot(0.33) - p.length()).abs();
        assert!(len < 1e-9, "{len}");
        for q in &p.points {
            let w = s.embed(q).unwrap();
            assert!((w[0] * 0.33 - w[1] * 0.61).abs() < 1e-9);
        }
        assert_eq!(p.points.last(), Some(&SurfacePoint::Vertex(0)));
    }

    #[test]
    fn sphere_meridian() {
        let f = field(sphere(1.0, 0.1).unwrap(), vec![SurfacePoint::Vertex(0)]);
        let s = f.surface();
        let x = s.locate([1.0, 0.0, 0.0], None).unwrap();
        let p = trace_shortest_path(&f, &x).unwrap();
        assert!((p.length() - PI / 2.0).abs() < 0.02, "{}", p.length());
        assert!((p.length() - f.eval(&x)).abs() < 1e-9);
    }

    #[test]
    fn cone_path_matches_unfolded_chord() {
        let theta = 1.5 * PI;
        let s = cone(theta, 1.0, 0.1).unwrap();
        let pos = s.positions().unwrap().to_vec();
        let a = 7u32;
        let f = field(s, vec![SurfacePoint::Vertex(a)]);
        let mut worst: f64 = 0.0;
        for v in (1..pos.len() as u32).step_by(5).filter(|&v| v != a) {
            let p = trace_shortest_path(&f, &SurfacePoint::Vertex(v)).unwrap();
            let exact = cone_chord(theta, pos[a as usize], pos[v as usize]);
            worst = worst.max((p.length() - exact).abs());
        }
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn doubled_disk_centres() {
        let base = flat_disk(1.0, 0.05).unwrap();
        let n = base.n_vertices() as u32;
        let f = field(double(&base).unwrap(), vec![SurfacePoint::Vertex(0)]);
        let x = SurfacePoint::Vertex(n);
        let v = f.eval(&x);
        assert!((v - 2.0).abs() < 5e-3, "{v}");
        let p = trace_shortest_path(&f, &x).unwrap();
        assert!((p.length() - v).abs() < 1e-9);
    }

    #[test]
    fn distance_decreases_at_unit_rate_along_path() {
        let theta = 1.5 * PI;
        let f = field(cone(theta, 1.0, 0.05).unwrap(), vec![SurfacePoint::Vertex(11)]);
        let s = f.surface();
        let tol = f.tol_dist();
        for v in [40u32, 200, 333, 501] {
            let x = SurfacePoint::Vertex(v);
            let p = trace_shortest_path(&f, &x).unwrap();
            let d = f.eval(&x);
            for k in 0..=20 {
                let t = p.length() * k as f64 / 20.0;
                let q = p.point_at(s, t);
                assert!((f.eval(&q) - (d - t)).abs() < tol, "v {v} t {t}");
            }
        }
    }

    #[test]
    fn walk_leaving_disk_fails() {
        let s = flat_disk(1.0, 0.1).unwrap();
        let f = s.fan(0)[0].0;
        let pos = s.point_in_face(&SurfacePoint::Vertex(0), f).unwrap();
        let l = s.layout(f);
        let dir = (l[0] + l[1] + l[2]) * (1.0 / 3.0) - pos;
        match walk(&s, f, pos, dir, 3.0) {
            Err(Error::GeodesicExitsSurface(t)) => assert!((t - 1.0).abs() < 0.02),
            other => panic!("{other:?}"),
        }
        assert!(walk(&s, f, pos, dir, 0.5).is_ok());
    }
}
