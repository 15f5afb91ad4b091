use std::collections::{BTreeMap, VecDeque};

use super::{SurfacePoint, TriSurface};
use crate::geom::{Rigid2, Vec2};

/// Faces around a point developed into the layout frame of a root face.
///
/// Breadth-first unfolding keeps the first placement of each face, so near a
/// cone point the chart is only one of several developments.
#[derive(Clone, Debug)]
pub struct LocalChart {
    pub root: u32,
    pub center: Vec2,
    placed: BTreeMap<u32, Rigid2>,
}

impl LocalChart {
    /// Develops every face reachable through faces with a corner within
    /// `radius` of `center` (given in the root layout).
    pub fn new(s: &TriSurface, root: u32, center: Vec2, radius: f64) -> LocalChart {
        let mut placed = BTreeMap::new();
        placed.insert(root, Rigid2::IDENTITY);
        let mut queue = VecDeque::from([root]);
        while let Some(f) = queue.pop_front() {
            let m = placed[&f];
            for &e in &s.face_edges(f) {
                let g = s.edge(e).other_face(f);
                if g == super::NONE || placed.contains_key(&g) {
                    continue;
                }
                let mg = m.compose(&s.unfold(g, f, e));
                let near = s.layout(g).iter().any(|&q| mg.apply(q).dist(center) <= radius);
                placed.insert(g, mg);
                if near {
                    queue.push_back(g);
                }
            }
        }
        LocalChart { root, center, placed }
    }

    /// Chart centred on a surface point.
    pub fn around(s: &TriSurface, p: &SurfacePoint, radius: f64) -> LocalChart {
        let root = s.incident_faces(p)[0];
        let c = s.point_in_face(p, root).expect("incident face");
        LocalChart::new(s, root, c, radius)
    }

    pub fn contains_face(&self, f: u32) -> bool {
        self.placed.contains_key(&f)
    }

    pub fn faces(&self) -> impl Iterator<Item = u32> + '_ {
        self.placed.keys().copied()
    }

    /// Transform from the layout of `f` into the chart.
    pub fn transform(&self, f: u32) -> Option<Rigid2> {
        self.placed.get(&f).copied()
    }

    /// Chart coordinates of a point in face `f`.
    pub fn place(&self, f: u32, q: Vec2) -> Option<Vec2> {
        self.placed.get(&f).map(|m| m.apply(q))
    }

    /// Chart coordinates of a surface point; of its placements, the one
    /// closest to the centre.
    pub fn map(&self, s: &TriSurface, p: &SurfacePoint) -> Option<Vec2> {
        s.incident_faces(p)
            .into_iter()
            .filter_map(|f| Some(self.placed.get(&f)?.apply(s.point_in_face(p, f)?)))
            .min_by(|a, b| a.dist(self.center).total_cmp(&b.dist(self.center)))
    }

    /// Surface point at chart coordinates `q`, if a developed face covers it.
    pub fn locate(&self, s: &TriSurface, q: Vec2) -> Option<SurfacePoint> {
        let mut best: Option<(f64, u32, Vec2)> = None;
        for (&f, m) in &self.placed {
            let local = m.inverse().apply(q);
            let b = crate::geom::barycentric(s.layout(f), local);
            let worst = -b.iter().copied().fold(f64::INFINITY, f64::min);
            if best.map_or(true, |x| worst < x.0) {
                best = Some((worst, f, local));
            }
        }
        let (w, f, local) = best?;
        (w <= 1e-9).then(|| s.face_point(f, local, 1e-12))
    }
}

/// Intrinsic distance between nearby points: straight-line distance in a
/// common face or in a local development, falling back to the embedding.
pub fn local_distance(s: &TriSurface, a: &SurfacePoint, b: &SurfacePoint, radius: f64) -> f64 {
    if let Some(d) = s.face_distance(a, b) {
        return d;
    }
    let chart = LocalChart::around(s, a, radius);
    if let Some(q) = chart.map(s, b) {
        return q.dist(chart.center);
    }
    match (s.embed(a), s.embed(b)) {
        (Some(x), Some(y)) => crate::geom::dist3(x, s.unwrap_near(y, x)),
        _ => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::generators::{flat_rect, flat_torus};

    #[test]
    fn chart_distances_are_euclidean_on_flat_rect() {
        let s = flat_rect(2.0, 2.0, 0.1).unwrap();
        let a = s.locate([0.013, 0.021, 0.0], None).unwrap();
        let b = s.locate([0.31, -0.22, 0.0], None).unwrap();
        let d = local_distance(&s, &a, &b, 0.6);
        assert!((d - (0.297f64).hypot(0.241)).abs() < 1e-12);
        let chart = LocalChart::around(&s, &a, 0.6);
        let q = chart.map(&s, &b).unwrap();
        let back = chart.locate(&s, q).unwrap();
        assert!(s.face_distance(&back, &b).unwrap() < 1e-12);
    }

    #[test]
    fn chart_wraps_on_torus() {
        let s = flat_torus(1.0, 0.1).unwrap();
        let a = s.locate([0.02, 0.5, 0.0], None).unwrap();
        let b = s.locate([0.97, 0.5, 0.0], None).unwrap();
        assert!((local_distance(&s, &a, &b, 0.3) - 0.05).abs() < 1e-9);
    }
}
