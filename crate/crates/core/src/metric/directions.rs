//! Spaces of directions, directions of shortest paths, and first variation.

use std::f64::consts::PI;

use serde::Serialize;

use super::field::{Candidate, DistanceField, Via};
use super::walk::{follow, walk, Walk};
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::surface::{SurfacePoint, TriSurface};

/// Relative slack for admitting a path as near-minimal.
pub const TOL_REL: f64 = 1e-3;

/// Distance on the circle of directions of circumference `total`, capped at `π`.
pub fn angle_between(a1: f64, a2: f64, total: f64) -> Result<f64> {
    if !(total > 0.0) {
        return Err(Error::InvalidParameter(format!("total angle {total} must be positive")));
    }
    let d = (a1 - a2).abs().rem_euclid(total);
    Ok(d.min(total - d).min(PI))
}

/// Tangent-cone distance between `(angle, radius)` pairs, by the law of cosines.
pub fn cone_distance(total: f64, p1: (f64, f64), p2: (f64, f64)) -> Result<f64> {
    if p1.1 < 0.0 || p2.1 < 0.0 {
        return Err(Error::InvalidParameter("negative radius".into()));
    }
    let a = angle_between(p1.0, p2.0, total)?;
    let (t, s) = (p1.1, p2.1);
    Ok((t * t + s * s - 2.0 * t * s * a.cos()).max(0.0).sqrt())
}

#[derive(Clone, Debug)]
struct Sector {
    face: u32,
    start: f64,
    span: f64,
    origin: Vec2,
}

/// Angular coordinates on the space of directions at a surface point.
///
/// Face and interior-edge points get a full circle of `2π`; vertices get
/// their cone angle; boundary points get a segment.
#[derive(Clone, Debug)]
pub struct TangentFrame {
    pub point: SurfacePoint,
    pub total: f64,
    pub segment: bool,
    sectors: Vec<Sector>,
    /// For circle frames without vertex structure: per-face rotation into the
    /// reference face, and the shared origin direction.
    plane: Option<Vec<(u32, crate::geom::Rigid2)>>,
}

impl TangentFrame {
    pub fn at(s: &TriSurface, p: &SurfacePoint) -> TangentFrame {
        let p = s.canonical(*p);
        match p {
            SurfacePoint::Face { face, .. } => TangentFrame {
                point: p,
                total: 2.0 * PI,
                segment: false,
                sectors: Vec::new(),
                plane: Some(vec![(face, crate::geom::Rigid2::IDENTITY)]),
            },
            SurfacePoint::Edge { edge, .. } => {
                let ed = s.edge(edge);
                let f0 = ed.faces[0];
                if ed.is_boundary() {
                    let a = s.point_in_face(&SurfacePoint::Vertex(ed.v[0]), f0).unwrap();
                    let b = s.point_in_face(&SurfacePoint::Vertex(ed.v[1]), f0).unwrap();
                    let t = s.triangle(f0);
                    let o = s.layout(f0)[t.iter().position(|v| !ed.v.contains(v)).unwrap()];
                    let origin = if (b - a).cross(o - a) > 0.0 { b - a } else { a - b };
                    TangentFrame {
                        point: p,
                        total: PI,
                        segment: true,
                        sectors: vec![Sector {
                            face: f0,
                            start: 0.0,
                            span: PI,
                            origin: origin.normalized(),
                        }],
                        plane: None,
                    }
                } else {
                    let f1 = ed.faces[1];
                    TangentFrame {
                        point: p,
                        total: 2.0 * PI,
                        segment: false,
                        sectors: Vec::new(),
                        plane: Some(vec![(f0, crate::geom::Rigid2::IDENTITY), (f1, s.unfold(f1, f0, edge))]),
                    }
                }
            }
            SurfacePoint::Vertex(v) => {
                let mut start = 0.0;
                let mut sectors = Vec::new();
                for &(f, c) in s.fan(v) {
                    let l = s.layout(f);
                    let c = c as usize;
                    let span = s.corner_angles(f)[c];
                    sectors.push(Sector {
                        face: f,
                        start,
                        span,
                        origin: (l[(c + 1) % 3] - l[c]).normalized(),
                    });
                    start += span;
                }
                TangentFrame {
                    point: p,
                    total: s.cone_angle(v),
                    segment: s.is_boundary_vertex(v),
                    sectors,
                    plane: None,
                }
            }
        }
    }

    /// Angle of direction `d` given in the layout of `face`.
    pub fn angle_of(&self, face: u32, d: Vec2) -> Option<f64> {
        if let Some(plane) = &self.plane {
            let (_, r) = plane.iter().find(|(f, _)| *f == face)?;
            let v = r.rotate(d);
            return Some(v.angle().rem_euclid(2.0 * PI));
        }
        let sec = self.sectors.iter().find(|s| s.face == face)?;
        let a = sec.origin.cross(d).atan2(sec.origin.dot(d));
        // directions just outside the corner snap to its nearer side
        let a = if a < 0.0 {
            if a > -0.5 * (2.0 * PI - sec.span) {
                0.0
            } else {
                sec.span
            }
        } else {
            a.min(sec.span)
        };
        Some((sec.start + a).min(self.total))
    }

    /// Like [`TangentFrame::angle_of`], but `None` when `d` leaves the corner
    /// of `face` by more than `tol` radians.
    pub fn angle_within(&self, face: u32, d: Vec2, tol: f64) -> Option<f64> {
        if self.plane.is_none() {
            let sec = self.sectors.iter().find(|s| s.face == face)?;
            let a = sec.origin.cross(d).atan2(sec.origin.dot(d));
            if a < -tol || a > sec.span + tol {
                return None;
            }
        }
        self.angle_of(face, d)
    }

    /// Face and layout direction realising an angle.
    pub fn direction(&self, s: &TriSurface, angle: f64) -> (u32, Vec2) {
        if let Some(plane) = &self.plane {
            let v = Vec2::from_angle(angle);
            if plane.len() == 1 {
                return (plane[0].0, v);
            }
            // interior edge: pick the face on the side the direction points to
            let SurfacePoint::Edge { edge, .. } = self.point else { unreachable!() };
            let ed = s.edge(edge);
            let f0 = plane[0].0;
            let a = s.point_in_face(&SurfacePoint::Vertex(ed.v[0]), f0).unwrap();
            let b = s.point_in_face(&SurfacePoint::Vertex(ed.v[1]), f0).unwrap();
            let t = s.triangle(f0);
            let o = s.layout(f0)[t.iter().position(|v| !ed.v.contains(v)).unwrap()];
            if (b - a).cross(v) * (b - a).cross(o - a) >= 0.0 {
                return (f0, v);
            }
            let (f1, r) = plane[1];
            return (f1, r.inverse().rotate(v));
        }
        let a = angle.clamp(0.0, self.total);
        let sec = self
            .sectors
            .iter()
            .find(|sec| a <= sec.start + sec.span)
            .unwrap_or_else(|| self.sectors.last().unwrap());
        let r = (a - sec.start).clamp(0.0, sec.span);
        let (c, si) = (r.cos(), r.sin());
        let o = sec.origin;
        (sec.face, Vec2::new(c * o.x - si * o.y, si * o.x + c * o.y))
    }

    /// Angular distance in this frame (segments do not wrap).
    pub fn separation(&self, a1: f64, a2: f64) -> f64 {
        if self.segment {
            (a1 - a2).abs().min(PI)
        } else {
            angle_between(a1, a2, self.total).unwrap_or(0.0)
        }
    }

    /// Diameter of the space of directions.
    pub fn diameter(&self) -> f64 {
        if self.segment {
            self.total.min(PI)
        } else {
            (self.total / 2.0).min(PI)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Direction {
    pub angle: f64,
    /// Length of the representative path.
    pub length: f64,
}

/// Clustered directions of near-minimal paths from a point to a focal set.
#[derive(Clone, Debug, Serialize)]
pub struct DirectionSet {
    pub base: SurfacePoint,
    pub total_angle: f64,
    pub segment: bool,
    /// Clustering threshold `δ_dir`.
    pub resolution: f64,
    /// Distance to the focal set.
    pub dist: f64,
    pub directions: Vec<Direction>,
    #[serde(skip)]
    reps: Vec<Candidate>,
}

impl DirectionSet {
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }
}

/// Clustering threshold for direction sets at distance `d` and resolution `h`.
pub fn direction_resolution(h: f64, d: f64) -> f64 {
    (8.0 * h / d.max(1e-300)).clamp(0.05, PI / 2.0)
}

/// Directions of near-minimal paths from `p` to the focal set of `field`.
pub fn direction_set(field: &DistanceField, p: &SurfacePoint, frame: &TangentFrame) -> Result<DirectionSet> {
    if field.in_focal(p) {
        return Err(Error::PointInFocalSet);
    }
    // segments much shorter than the mesh carry no usable direction
    let min_len = 1e-6 * field.domain().h();
    let mut all: Vec<Candidate> = Vec::new();
    field.for_each_candidate(p, |c| {
        if c.pos.dist(c.target) > min_len {
            all.push(c);
        }
    });
    // Straight corridor segments are geodesic; restarting at a sample is
    // only geodesic when that sample lies in the focal set.
    let mut cands: Vec<Candidate> = all
        .iter()
        .copied()
        .filter(|c| match c.via {
            Via::Extended => true,
            Via::Sample(s) => field.is_source(s),
        })
        .collect();
    if cands.is_empty() {
        cands = all;
    }
    let dmin = cands.iter().map(|c| c.dist).fold(f64::INFINITY, f64::min);
    if !dmin.is_finite() {
        return Err(Error::PointNotOnSurface(format!("{p:?} is unreachable")));
    }
    let limit = dmin * (1.0 + TOL_REL) + 1e-12;
    let mut items: Vec<(f64, Candidate)> = cands
        .into_iter()
        .filter(|c| c.dist <= limit)
        .filter_map(|c| frame.angle_within(c.face, c.target - c.pos, 1e-7).map(|a| (a, c)))
        .collect();
    items.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.dist.total_cmp(&b.1.dist)));
    let delta = direction_resolution(field.domain().h(), dmin);

    // split the sorted angles at gaps wider than delta
    let n = items.len();
    let mut breaks: Vec<usize> = (0..n)
        .filter(|&i| {
            let next = if i + 1 < n {
                items[i + 1].0
            } else if frame.segment {
                f64::INFINITY
            } else {
                items[0].0 + frame.total
            };
            next - items[i].0 > delta
        })
        .collect();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    if breaks.is_empty() {
        clusters.push((0..n).collect());
    } else {
        // clusters run from just after one break to the next break (cyclically)
        breaks.sort_unstable();
        let k = breaks.len();
        for j in 0..k {
            let from = (breaks[(j + k - 1) % k] + 1) % n;
            let to = breaks[j];
            let mut c = Vec::new();
            let mut i = from;
            loop {
                c.push(i);
                if i == to {
                    break;
                }
                i = (i + 1) % n;
            }
            if frame.segment && from > to {
                // segments do not wrap: split the run at the end
                let (a, b): (Vec<usize>, Vec<usize>) = c.into_iter().partition(|&i| i >= from);
                clusters.push(a);
                clusters.push(b);
            } else {
                clusters.push(c);
            }
        }
    }
    let mut dirs: Vec<(Direction, Candidate)> = clusters
        .into_iter()
        .filter(|c| !c.is_empty())
        .map(|c| {
            let best = c
                .iter()
                .copied()
                .min_by(|&a, &b| items[a].1.dist.total_cmp(&items[b].1.dist).then(a.cmp(&b)))
                .unwrap();
            (
                Direction {
                    angle: items[best].0,
                    length: items[best].1.dist,
                },
                items[best].1,
            )
        })
        .collect();
    dirs.sort_by(|a, b| a.0.angle.total_cmp(&b.0.angle));
    Ok(DirectionSet {
        base: *p,
        total_angle: frame.total,
        segment: frame.segment,
        resolution: delta,
        dist: dmin,
        directions: dirs.iter().map(|d| d.0.clone()).collect(),
        reps: dirs.into_iter().map(|d| d.1).collect(),
    })
}

/// Direction sets towards `A` and `B`, which must be angularly separated.
pub fn directions_at(
    field_a: &DistanceField,
    field_b: &DistanceField,
    p: &SurfacePoint,
) -> Result<(DirectionSet, DirectionSet, TangentFrame)> {
    let frame = TangentFrame::at(field_a.surface(), p);
    let a = direction_set(field_a, p, &frame)?;
    let b = direction_set(field_b, p, &frame)?;
    let threshold = a.resolution.max(b.resolution);
    let mut gap = f64::INFINITY;
    for da in &a.directions {
        for db in &b.directions {
            gap = gap.min(frame.separation(da.angle, db.angle));
        }
    }
    if gap < threshold {
        return Err(Error::ResolutionInsufficient { gap, threshold });
    }
    Ok((a, b, frame))
}

/// Endpoints in the focal set of all near-minimal paths from `p`.
pub fn metric_projection(field: &DistanceField, p: &SurfacePoint) -> Result<Vec<SurfacePoint>> {
    if field.in_focal(p) {
        return Ok(vec![*p]);
    }
    let s = field.surface();
    let frame = TangentFrame::at(s, p);
    let set = direction_set(field, p, &frame)?;
    let snap = field.domain().h() / 4.0;
    let mut out: Vec<SurfacePoint> = Vec::new();
    for c in &set.reps {
        let path = follow(field, *p, c.face, c.pos, c.target, c.anchor)?;
        let end = *path.points.last().unwrap();
        let dup = out.iter().any(|q| match (s.embed(q), s.embed(&end)) {
            (Some(a), Some(b)) => crate::geom::dist3(a, b) < snap,
            _ => *q == end,
        });
        if !dup {
            out.push(end);
        }
    }
    Ok(out)
}

/// Walks the geodesic leaving `p` at `angle` for `length`.
pub fn shoot(s: &TriSurface, frame: &TangentFrame, angle: f64, length: f64) -> Result<Walk> {
    let (face, dir) = frame.direction(s, angle);
    let pos = s.point_in_face(&frame.point, face).expect("frame face contains its point");
    walk(s, face, pos, dir, length)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivativeEstimate {
    pub steps: Vec<f64>,
    pub quotients: Vec<f64>,
    /// Richardson extrapolation of the last two quotients.
    pub estimate: f64,
    pub angle_min: f64,
    /// `-cos(angle_min)`.
    pub predicted: f64,
}

/// One-sided derivative of `d(·, K)` along the geodesic leaving `p` at `angle`.
pub fn one_sided_derivative(field: &DistanceField, p: &SurfacePoint, angle: f64, steps: &[f64]) -> Result<DerivativeEstimate> {
    if steps.is_empty() || steps.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidParameter("steps must be positive".into()));
    }
    let s = field.surface();
    let frame = TangentFrame::at(s, p);
    let set = direction_set(field, p, &frame)?;
    let d0 = field.eval(p);
    let mut quotients = Vec::with_capacity(steps.len());
    for &t in steps {
        let w = shoot(s, &frame, angle, t)?;
        quotients.push((field.eval(&w.end_point(s)) - d0) / t);
    }
    let k = quotients.len();
    let estimate = if k >= 2 {
        let (t1, t2) = (steps[k - 2], steps[k - 1]);
        let (q1, q2) = (quotients[k - 2], quotients[k - 1]);
        (t1 * q2 - t2 * q1) / (t1 - t2)
    } else {
        quotients[0]
    };
    let angle_min = set
        .directions
        .iter()
        .map(|d| frame.separation(angle, d.angle))
        .fold(f64::INFINITY, f64::min);
    Ok(DerivativeEstimate {
        steps: steps.to_vec(),
        quotients,
        estimate,
        angle_min,
        predicted: -angle_min.cos(),
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::metric::{Domain, FocalSet};
    use crate::surface::double;
    use crate::surface::generators::flat_disk;

    fn fields(s: TriSurface, a: &[[f64; 3]], b: &[[f64; 3]]) -> (DistanceField, DistanceField) {
        let a: Vec<_> = a.iter().map(|&p| s.locate(p, None).unwrap()).collect();
        let b: Vec<_> = b.iter().map(|&p| s.locate(p, None).unwrap()).collect();
        let d = Arc::new(Domain::new(Arc::new(s), 3));
        (
            DistanceField::compute(d.clone(), FocalSet::points(a).unwrap()).unwrap(),
            DistanceField::compute(d, FocalSet::points(b).unwrap()).unwrap(),
        )
    }

    #[test]
    fn angle_between_examples() {
        assert!((angle_between(0.0, PI, 2.0 * PI).unwrap() - PI).abs() < 1e-15);
        assert!((angle_between(0.0, 1.4, 1.5).unwrap() - 0.1).abs() < 1e-12);
        assert!((angle_between(0.0, 3.0, 2.0 * PI).unwrap() - 3.0).abs() < 1e-15);
        assert!(angle_between(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn cone_distance_examples() {
        let t = 2.0 * PI;
        assert!((cone_distance(t, (0.5, 3.0), (0.5, 1.0)).unwrap() - 2.0).abs() < 1e-12);
        assert!((cone_distance(t, (0.0, 1.0), (PI, 1.0)).unwrap() - 2.0).abs() < 1e-12);
        assert!((cone_distance(t, (0.0, 3.0), (PI / 2.0, 4.0)).unwrap() - 5.0).abs() < 1e-12);
        assert!(cone_distance(t, (0.0, -1.0), (0.0, 1.0)).is_err());
    }

    #[test]
    fn midpoint_has_opposite_directions() {
        let (fa, fb) = fields(flat_disk(2.0, 0.05).unwrap(), &[[-1.0, 0.0, 0.0]], &[[1.0, 0.0, 0.0]]);
        let x = SurfacePoint::Vertex(0);
        let (a, b, frame) = directions_at(&fa, &fb, &x).unwrap();
        assert_eq!((a.len(), b.len()), (1, 1));
        let sep = frame.separation(a.directions[0].angle, b.directions[0].angle);
        assert!((sep - PI).abs() < 1e-9, "{sep}");
        assert!((a.dist - 1.0).abs() < 1e-9);
    }

    #[test]
    fn square_configuration_alternates() {
        let (fa, fb) = fields(
            flat_disk(2.0, 0.05).unwrap(),
            &[[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
            &[[0.0, 1.0, 0.0], [0.0, -1.0, 0.0]],
        );
        let x = fa.surface().locate([0.0, 0.0, 0.0], None).unwrap();
        let (a, b, frame) = directions_at(&fa, &fb, &x).unwrap();
        assert_eq!((a.len(), b.len()), (2, 2));
        let mut all: Vec<(f64, char)> = a.directions.iter().map(|d| (d.angle, 'a')).collect();
        all.extend(b.directions.iter().map(|d| (d.angle, 'b')));
        all.sort_by(|x, y| x.0.total_cmp(&y.0));
        for i in 0..4 {
            assert_ne!(all[i].1, all[(i + 1) % 4].1);
            let sep = frame.separation(all[i].0, all[(i + 1) % 4].0);
            assert!((sep - PI / 2.0).abs() < 1e-9);
        }
        let proj = metric_projection(&fa, &x).unwrap();
        assert_eq!(proj.len(), 2);
    }

    #[test]
    fn doubled_disk_seam_merges_sides() {
        let base = flat_disk(1.0, 0.05).unwrap();
        let n = base.n_vertices() as u32;
        let s = double(&base).unwrap();
        let seam = s.boundary_loops().len();
        assert_eq!(seam, 0);
        let v = (0..n).find(|&v| base.is_boundary_vertex(v)).unwrap();
        let d = Arc::new(Domain::new(Arc::new(s), 3));
        let fa = DistanceField::compute(d.clone(), FocalSet::points([SurfacePoint::Vertex(0)]).unwrap()).unwrap();
        let fb = DistanceField::compute(d, FocalSet::points([SurfacePoint::Vertex(n)]).unwrap()).unwrap();
        let (a, b, frame) = directions_at(&fa, &fb, &SurfacePoint::Vertex(v)).unwrap();
        assert_eq!((a.len(), b.len()), (1, 1));
        let sep = frame.separation(a.directions[0].angle, b.directions[0].angle);
        assert!((sep - PI).abs() < 0.1, "{sep}");
    }

    #[test]
    fn one_sided_derivative_matches_cosine() {
        let s = flat_disk(2.0, 0.05).unwrap();
        let a = s.locate([-0.5, 0.1, 0.0], None).unwrap();
        let x = s.locate([0.3, 0.2, 0.0], None).unwrap();
        let f = DistanceField::compute(Arc::new(Domain::new(Arc::new(s), 3)), FocalSet::points([a]).unwrap()).unwrap();
        let s = f.surface();
        let frame = TangentFrame::at(s, &x);
        let face = s.incident_faces(&x)[0];
        let ta = crate::metric::world_to_face(s, face, Vec2::new(-0.5, 0.1)).unwrap();
        let base = frame.angle_of(face, ta - s.point_in_face(&x, face).unwrap()).unwrap();
        for phi in [0.0, PI / 4.0, PI / 2.0, 2.0 * PI / 3.0, PI] {
            let e = one_sided_derivative(&f, &x, (base + phi).rem_euclid(2.0 * PI), &[0.04, 0.02]).unwrap();
            assert!((e.angle_min - phi).abs() < 1e-9);
            assert!((e.estimate - (-phi.cos())).abs() < 0.01, "{phi}: {e:?}");
        }
    }

    #[test]
    fn boundary_frame_is_segment() {
        let s = flat_disk(1.0, 0.1).unwrap();
        let v = (0..s.n_vertices() as u32).find(|&v| s.is_boundary_vertex(v)).unwrap();
        let f = TangentFrame::at(&s, &SurfacePoint::Vertex(v));
        assert!(f.segment);
        assert!(f.total < PI && f.total > PI - 0.2);
        assert!((f.separation(0.0, f.total) - f.total).abs() < 1e-12);
    }
}
