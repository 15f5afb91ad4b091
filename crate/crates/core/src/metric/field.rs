//! Distance fields to focal sets.
//!
//! Each sample carries, besides its distance, a *virtual source*: a point in
//! the development of one incident face (its `frame`) from which the sample
//! is reached by a straight segment, together with the angular window of
//! rays that stay inside the unfolded corridor. Relaxation either extends
//! that virtual source across an edge into the next face, or restarts the
//! segment at the relaying sample. Extending keeps paths straight across
//! faces, which is what makes the field exact on flat regions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::Arc;

use super::domain::Domain;
use super::focal::{in_polygon, world_to_face, FocalItem, FocalSet};
use crate::error::Result;
use crate::geom::{barycentric, nearest_on_polygon, polygon_distance, Vec2};
use crate::surface::{SurfacePoint, TriSurface, NONE};

/// Angular slack when testing whether a ray lies inside a window.
const RAY_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Label {
    pub dist: f64,
    /// Distance already accumulated at the virtual source.
    pub base: f64,
    pub src: Vec2,
    /// Unit window bounds, CCW from `lo` to `hi`; a zero bound is open.
    pub lo: Vec2,
    pub hi: Vec2,
    /// Face whose layout `src` is expressed in; `NONE` for a source sample.
    pub frame: u32,
    /// Sample the straight segment ends at, or `n_samples + item` for a
    /// focal item.
    pub anchor: u32,
}

const UNSET: Label = Label {
    dist: f64::INFINITY,
    base: 0.0,
    src: Vec2::ZERO,
    lo: Vec2::ZERO,
    hi: Vec2::ZERO,
    frame: NONE,
    anchor: NONE,
};

#[derive(Clone, Copy, Debug)]
struct Ext {
    src: Vec2,
    base: f64,
    lo: Vec2,
    hi: Vec2,
    anchor: u32,
}

fn is_full(lo: Vec2, hi: Vec2) -> bool {
    lo == Vec2::ZERO && hi == Vec2::ZERO
}

fn admits(lo: Vec2, hi: Vec2, d: Vec2) -> bool {
    if is_full(lo, hi) {
        return true;
    }
    let n = d.norm();
    if n < 1e-300 {
        return true;
    }
    let tol = RAY_SLACK * n;
    (lo == Vec2::ZERO || lo.cross(d) >= -tol) && (hi == Vec2::ZERO || d.cross(hi) >= -tol)
}

fn intersect(a: (Vec2, Vec2), b: (Vec2, Vec2)) -> Option<(Vec2, Vec2)> {
    let lo = match (a.0 == Vec2::ZERO, b.0 == Vec2::ZERO) {
        (true, _) => b.0,
        (_, true) => a.0,
        _ if a.0.cross(b.0) >= 0.0 => b.0,
        _ => a.0,
    };
    let hi = match (a.1 == Vec2::ZERO, b.1 == Vec2::ZERO) {
        (true, _) => b.1,
        (_, true) => a.1,
        _ if a.1.cross(b.1) >= 0.0 => a.1,
        _ => b.1,
    };
    let ok = admits(a.0, a.1, lo)
        && admits(b.0, b.1, lo)
        && admits(a.0, a.1, hi)
        && admits(b.0, b.1, hi)
        && (lo == Vec2::ZERO || hi == Vec2::ZERO || lo.cross(hi) >= -RAY_SLACK);
    ok.then_some((lo, hi))
}

/// Strict-improvement threshold below `v`.
fn below(v: f64) -> f64 {
    if v.is_finite() {
        v - 1e-13 * v.abs()
    } else {
        f64::INFINITY
    }
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem {
    dist: f64,
    id: u32,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, o: &Self) -> Ordering {
        // min-heap on (dist, id)
        o.dist.total_cmp(&self.dist).then_with(|| o.id.cmp(&self.id))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// How a candidate path leaves the query point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Via {
    /// Straight to a sample, then along that sample's own path.
    Sample(u32),
    /// Straight towards a virtual source through the unfolded corridor.
    Extended,
}

/// A path from a query point: a straight developed segment from `pos` to
/// `target` in the layout of `face`, continuing at `anchor`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Candidate {
    pub dist: f64,
    pub face: u32,
    pub pos: Vec2,
    pub target: Vec2,
    pub anchor: u32,
    pub via: Via,
}

/// Approximate geodesic distance to a focal set, with path-tracing data.
#[derive(Debug)]
pub struct DistanceField {
    domain: Arc<Domain>,
    focal: FocalSet,
    labels: Vec<Label>,
    focal_faces: Vec<bool>,
    band: f64,
}

impl DistanceField {
    pub fn compute(domain: Arc<Domain>, focal: FocalSet) -> Result<DistanceField> {
        if focal.items.is_empty() {
            return Err(crate::error::Error::EmptyFocalSet);
        }
        let surf = domain.surface();
        let n = domain.n_samples();
        let mut labels = vec![UNSET; n];
        let mut heap = BinaryHeap::new();
        let mut focal_faces = vec![false; surf.n_faces()];
        let band = 2.0 * surf.max_edge_length();

        let set = |labels: &mut Vec<Label>, heap: &mut BinaryHeap<HeapItem>, id: u32, l: Label| {
            if l.dist < labels[id as usize].dist {
                labels[id as usize] = l;
                heap.push(HeapItem { dist: l.dist, id });
            }
        };
        let source = |anchor: u32| Label {
            dist: 0.0,
            frame: NONE,
            anchor,
            ..UNSET
        };

        for (k, item) in focal.items.iter().enumerate() {
            let anchor = (n + k) as u32;
            match item {
                FocalItem::Point(p) => {
                    let p = surf.canonical(*p);
                    if let Some(id) = domain.sample_at(&p) {
                        set(&mut labels, &mut heap, id, source(anchor));
                        continue;
                    }
                    for g in surf.incident_faces(&p) {
                        let pp = surf.point_in_face(&p, g).expect("incident face");
                        for (u, pu) in domain.face_samples(g) {
                            let l = Label {
                                dist: pu.dist(pp),
                                base: 0.0,
                                src: pp,
                                frame: g,
                                anchor,
                                ..UNSET
                            };
                            set(&mut labels, &mut heap, u, l);
                        }
                    }
                }
                FocalItem::Faces(fs) => {
                    for &f in fs {
                        if f as usize >= surf.n_faces() {
                            return Err(crate::error::Error::InvalidParameter(format!(
                                "focal face {f} out of range"
                            )));
                        }
                        focal_faces[f as usize] = true;
                        for (u, _) in domain.face_samples(f) {
                            set(&mut labels, &mut heap, u, source(anchor));
                        }
                    }
                }
                FocalItem::Polygon(poly) => {
                    let pos = surf.positions().ok_or_else(|| {
                        crate::error::Error::InvalidParameter("polygon focal sets need a planar embedding".into())
                    })?;
                    for f in 0..surf.n_faces() as u32 {
                        let t = surf.triangle(f);
                        let w = [0, 1, 2].map(|c| Vec2::new(pos[t[c] as usize][0], pos[t[c] as usize][1]));
                        let near = w.iter().any(|&q| polygon_distance(q, poly) <= band);
                        let l = surf.layout(f);
                        for (u, pu) in domain.face_samples(f) {
                            let b = barycentric(l, pu);
                            let wu = w[0] * b[0] + w[1] * b[1] + w[2] * b[2];
                            if in_polygon(wu, poly) {
                                set(&mut labels, &mut heap, u, source(anchor));
                            } else if near {
                                let q = nearest_on_polygon(wu, poly);
                                let src = world_to_face(surf, f, q).expect("positions exist");
                                let lab = Label {
                                    dist: pu.dist(src),
                                    base: 0.0,
                                    src,
                                    frame: f,
                                    anchor,
                                    ..UNSET
                                };
                                set(&mut labels, &mut heap, u, lab);
                            }
                        }
                    }
                }
            }
        }

        let mut field = DistanceField {
            domain,
            focal,
            labels,
            focal_faces,
            band,
        };
        field.propagate(heap);
        Ok(field)
    }

    fn propagate(&mut self, mut heap: BinaryHeap<HeapItem>) {
        let domain = Arc::clone(&self.domain);
        while let Some(HeapItem { dist, id: s }) = heap.pop() {
            let ls = self.labels[s as usize];
            if dist != ls.dist {
                continue;
            }
            for g in domain.sample_faces(s) {
                let ps = domain.sample_pos(s, g).expect("sample on face");
                let ext = self.extension(s, &ls, g);
                for (u, pu) in domain.face_samples(g) {
                    if u == s {
                        continue;
                    }
                    let cur = self.labels[u as usize].dist;
                    let mut bd = below(cur);
                    let mut best: Option<Label> = None;
                    if let Some(e) = &ext {
                        if admits(e.lo, e.hi, pu - e.src) {
                            let c = e.base + pu.dist(e.src);
                            if c < bd {
                                bd = below(c);
                                best = Some(Label {
                                    dist: c,
                                    base: e.base,
                                    src: e.src,
                                    lo: e.lo,
                                    hi: e.hi,
                                    frame: g,
                                    anchor: e.anchor,
                                });
                            }
                        }
                    }
                    // restarting at `s` must win clearly; straight corridors are preferred
                    let c1 = ls.dist + pu.dist(ps);
                    if c1 < bd {
                        best = Some(Label {
                            dist: c1,
                            base: ls.dist,
                            src: ps,
                            frame: g,
                            anchor: s,
                            ..UNSET
                        });
                    }
                    if let Some(l) = best {
                        self.labels[u as usize] = l;
                        heap.push(HeapItem { dist: l.dist, id: u });
                    }
                }
            }
        }
    }

    /// The virtual source of sample `s` expressed in face `g`, if its
    /// corridor continues into `g`.
    fn extension(&self, s: u32, ls: &Label, g: u32) -> Option<Ext> {
        if ls.frame == NONE {
            return None;
        }
        if ls.frame == g {
            return Some(Ext {
                src: ls.src,
                base: ls.base,
                lo: ls.lo,
                hi: ls.hi,
                anchor: ls.anchor,
            });
        }
        let (e, _) = self.domain.steiner_of(s)?;
        let surf = self.domain.surface();
        let ed = surf.edge(e);
        let joins = (ed.faces[0] == ls.frame && ed.faces[1] == g) || (ed.faces[1] == ls.frame && ed.faces[0] == g);
        if !joins {
            return None;
        }
        let m = surf.unfold(ls.frame, g, e);
        let src = m.apply(ls.src);
        let t = surf.triangle(g);
        let l = surf.layout(g);
        let ia = t.iter().position(|&v| v == ed.v[0])?;
        let ib = t.iter().position(|&v| v == ed.v[1])?;
        let (a, b, o) = (l[ia], l[ib], l[3 - ia - ib]);
        let ab = b - a;
        let side_src = ab.cross(src - a);
        let side_o = ab.cross(o - a);
        if side_src * side_o >= 0.0 || side_src.abs() <= 1e-12 * ab.norm2() {
            return None;
        }
        let bound = |v: u32, p: Vec2| {
            if self.domain.is_hard(v) {
                (p - src).normalized()
            } else {
                Vec2::ZERO
            }
        };
        let (da, db) = ((a - src).normalized(), (b - src).normalized());
        let w = if da.cross(db) > 0.0 {
            (bound(ed.v[0], a), bound(ed.v[1], b))
        } else {
            (bound(ed.v[1], b), bound(ed.v[0], a))
        };
        let (lo, hi) = intersect((m.rotate(ls.lo), m.rotate(ls.hi)), w)?;
        Some(Ext {
            src,
            base: ls.base,
            lo,
            hi,
            anchor: ls.anchor,
        })
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn surface(&self) -> &TriSurface {
        self.domain.surface()
    }

    pub fn focal(&self) -> &FocalSet {
        &self.focal
    }

    /// Distance stored at a sample.
    pub fn value(&self, id: u32) -> f64 {
        self.labels[id as usize].dist
    }

    pub fn values(&self) -> Vec<f64> {
        self.labels.iter().map(|l| l.dist).collect()
    }

    pub(crate) fn label(&self, id: u32) -> &Label {
        &self.labels[id as usize]
    }

    /// Whether sample `id` is a source (lies in the focal set).
    pub fn is_source(&self, id: u32) -> bool {
        let l = &self.labels[id as usize];
        l.frame == NONE && l.dist == 0.0
    }

    pub fn max_value(&self) -> f64 {
        self.labels
            .iter()
            .map(|l| l.dist)
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max)
    }

    /// Working distance tolerance: `4h` scaled by the field's extent.
    pub fn tol_dist(&self) -> f64 {
        4.0 * self.domain.h() * self.max_value().max(1.0)
    }

    /// Focal item index for an anchor, if it names one.
    pub fn anchor_item(&self, anchor: u32) -> Option<usize> {
        let n = self.domain.n_samples() as u32;
        (anchor >= n && anchor != NONE).then(|| (anchor - n) as usize)
    }

    /// Whether `p` lies in the focal set.
    pub fn in_focal(&self, p: &SurfacePoint) -> bool {
        let surf = self.surface();
        let p = surf.canonical(*p);
        if let Some(id) = self.domain.sample_at(&p) {
            if self.is_source(id) {
                return true;
            }
        }
        if surf.incident_faces(&p).iter().any(|&f| self.focal_faces[f as usize]) {
            return true;
        }
        for it in &self.focal.items {
            match it {
                FocalItem::Point(q) => {
                    if let Some(d) = surf.face_distance(&p, q) {
                        if d < 1e-12 {
                            return true;
                        }
                    }
                }
                FocalItem::Polygon(poly) => {
                    if let Some(w) = surf.embed(&p) {
                        if in_polygon(Vec2::new(w[0], w[1]), poly) {
                            return true;
                        }
                    }
                }
                FocalItem::Faces(_) => {}
            }
        }
        false
    }

    /// Visits every candidate path leaving `p`.
    pub fn for_each_candidate(&self, p: &SurfacePoint, mut visit: impl FnMut(Candidate)) {
        let surf = self.surface();
        let p = surf.canonical(*p);
        let n = self.domain.n_samples() as u32;
        for g in surf.incident_faces(&p) {
            let x = surf.point_in_face(&p, g).expect("incident face");
            for (s, ps) in self.domain.face_samples(g) {
                let ls = self.labels[s as usize];
                if !ls.dist.is_finite() {
                    continue;
                }
                visit(Candidate {
                    dist: ls.dist + x.dist(ps),
                    face: g,
                    pos: x,
                    target: ps,
                    anchor: s,
                    via: Via::Sample(s),
                });
                if let Some(e) = self.extension(s, &ls, g) {
                    if admits(e.lo, e.hi, x - e.src) {
                        visit(Candidate {
                            dist: e.base + x.dist(e.src),
                            face: g,
                            pos: x,
                            target: e.src,
                            anchor: e.anchor,
                            via: Via::Extended,
                        });
                    }
                }
            }
            // exact straight segments to focal items visible inside this face
            for (k, it) in self.focal.items.iter().enumerate() {
                let anchor = n + k as u32;
                match it {
                    FocalItem::Point(q) => {
                        if let Some(pq) = surf.point_in_face(q, g) {
                            visit(Candidate {
                                dist: x.dist(pq),
                                face: g,
                                pos: x,
                                target: pq,
                                anchor,
                                via: Via::Extended,
                            });
                        }
                    }
                    FocalItem::Polygon(poly) => {
                        if let Some(w) = surf.embed(&p) {
                            let w = Vec2::new(w[0], w[1]);
                            if polygon_distance(w, poly) <= self.band {
                                let q = if in_polygon(w, poly) { w } else { nearest_on_polygon(w, poly) };
                                if let Some(t) = world_to_face(surf, g, q) {
                                    visit(Candidate {
                                        dist: x.dist(t),
                                        face: g,
                                        pos: x,
                                        target: t,
                                        anchor,
                                        via: Via::Extended,
                                    });
                                }
                            }
                        }
                    }
                    FocalItem::Faces(_) => {
                        if self.focal_faces[g as usize] {
                            visit(Candidate {
                                dist: 0.0,
                                face: g,
                                pos: x,
                                target: x,
                                anchor,
                                via: Via::Extended,
                            });
                        }
                    }
                }
            }
        }
    }

    /// Shortest candidate path from `p` (lowest distance, first found on ties).
    pub fn best_candidate(&self, p: &SurfacePoint) -> Option<Candidate> {
        let mut best: Option<Candidate> = None;
        self.for_each_candidate(p, |c| {
            if best.map_or(true, |b| c.dist < b.dist) {
                best = Some(c);
            }
        });
        best
    }

    /// Distance from an arbitrary surface point.
    pub fn eval(&self, p: &SurfacePoint) -> f64 {
        if let Some(id) = self.domain.sample_at(&self.surface().canonical(*p)) {
            if self.is_source(id) {
                return 0.0;
            }
        }
        self.best_candidate(p).map_or(f64::INFINITY, |c| c.dist)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::generators::{flat_disk, flat_rect, sphere};
    use crate::surface::SurfacePoint;

    fn domain(s: TriSurface) -> Arc<Domain> {
        Arc::new(Domain::new(Arc::new(s), 3))
    }

    #[test]
    fn window_intersection() {
        let x = Vec2::new(1.0, 0.0);
        let y = Vec2::new(0.0, 1.0);
        let d = Vec2::new(1.0, 1.0).normalized();
        let (lo, hi) = intersect((x, y), (d, Vec2::new(-1.0, 1.0).normalized())).unwrap();
        assert_eq!(lo, d);
        assert_eq!(hi, y);
        assert!(intersect((x, d), (y, Vec2::new(-1.0, 0.0))).is_none());
    }

    #[test]
    fn flat_disk_distance_is_euclidean() {
        let d = domain(flat_disk(1.0, 0.05).unwrap());
        let f = DistanceField::compute(d.clone(), FocalSet::points([SurfacePoint::Vertex(0)]).unwrap()).unwrap();
        let s = d.surface();
        let mut worst: f64 = 0.0;
        for id in 0..d.n_samples() as u32 {
            let w = s.embed(&d.sample_point(id)).unwrap();
            let exact = (w[0] * w[0] + w[1] * w[1]).sqrt();
            worst = worst.max((f.value(id) - exact).abs());
        }
        assert!(worst < 1e-9, "max error {worst}");
    }

    #[test]
    fn off_vertex_source_on_rect() {
        let d = domain(flat_rect(2.0, 2.0, 0.1).unwrap());
        let s = d.surface();
        let a = s.locate([0.234, -0.117, 0.0], None).unwrap();
        let f = DistanceField::compute(d.clone(), FocalSet::points([a]).unwrap()).unwrap();
        let mut worst: f64 = 0.0;
        for id in 0..d.n_samples() as u32 {
            let w = s.embed(&d.sample_point(id)).unwrap();
            let exact = ((w[0] - 0.234).powi(2) + (w[1] + 0.117).powi(2)).sqrt();
            worst = worst.max((f.value(id) - exact).abs());
        }
        assert!(worst < 1e-9, "max error {worst}");
        let q = s.locate([-0.71, 0.55, 0.0], None).unwrap();
        let exact = ((-0.71f64 - 0.234).powi(2) + (0.55f64 + 0.117).powi(2)).sqrt();
        assert!((f.eval(&q) - exact).abs() < 1e-9);
        assert_eq!(f.eval(&a), 0.0);
    }

    #[test]
    fn sphere_pole_to_equator() {
        let d = domain(sphere(1.0, 0.1).unwrap());
        let f = DistanceField::compute(d.clone(), FocalSet::points([SurfacePoint::Vertex(0)]).unwrap()).unwrap();
        let south = d.surface().locate([0.0, 0.0, -1.0], None).unwrap();
        let v = f.eval(&south);
        // inscribed polyhedron: slightly shorter than π
        assert!(v < std::f64::consts::PI && v > 0.97 * std::f64::consts::PI, "{v}");
    }

    #[test]
    fn whole_surface_gives_zero() {
        let d = domain(flat_rect(1.0, 1.0, 0.25).unwrap());
        let all = (0..d.surface().n_faces() as u32).collect();
        let f = DistanceField::compute(d.clone(), FocalSet::new(vec![FocalItem::Faces(all)]).unwrap()).unwrap();
        assert!(f.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn polygon_region() {
        let d = domain(flat_rect(2.0, 2.0, 0.05).unwrap());
        let sq = vec![
            Vec2::new(-0.2, -0.2),
            Vec2::new(0.2, -0.2),
            Vec2::new(0.2, 0.2),
            Vec2::new(-0.2, 0.2),
        ];
        let f = DistanceField::compute(d.clone(), FocalSet::new(vec![FocalItem::Polygon(sq.clone())]).unwrap()).unwrap();
        let s = d.surface();
        let mut worst: f64 = 0.0;
        for id in 0..d.n_samples() as u32 {
            let w = s.embed(&d.sample_point(id)).unwrap();
            let exact = polygon_distance(Vec2::new(w[0], w[1]), &sq);
            worst = worst.max((f.value(id) - exact).abs());
        }
        // corners of the square are sharp: allow a small relative excess
        assert!(worst < 5e-3, "max error {worst}");
    }
}
