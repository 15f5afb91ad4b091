//! Graph topology of the extracted complex and the separation, 1-manifold
//! and homology-bound checks.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::equidistant::{EquidistantComplex, NodeKind, SignedField};
use crate::error::{Error, Result};
use crate::geom::{point_segment_distance, polygon_distance, Vec2};
use crate::metric::{FocalItem, FocalSet};
use crate::surface::{LocalChart, SurfacePoint, TriSurface};

/// Union-find with smallest-index roots.
#[derive(Clone, Debug)]
pub struct UnionFind(Vec<usize>);

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a < b {
            self.0[b] = a;
        } else if b < a {
            self.0[a] = b;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexTopology {
    pub v: usize,
    pub eg: usize,
    pub c: usize,
    pub beta1: i64,
    /// Degrees of non-window nodes.
    pub degree_histogram: BTreeMap<usize, usize>,
    pub window_nodes: usize,
}

/// Cycle rank `Eg − V + C` of the complex as a multigraph.
pub fn cycle_rank(c: &EquidistantComplex) -> ComplexTopology {
    let v = c.nodes.len();
    let mut uf = UnionFind::new(v);
    for e in &c.edges {
        uf.union(e.ends[0], e.ends[1]);
    }
    let comps = (0..v).filter(|&i| uf.find(i) == i).count();
    let mut deg = vec![0usize; v];
    for e in &c.edges {
        deg[e.ends[0]] += 1;
        deg[e.ends[1]] += 1;
    }
    let mut hist = BTreeMap::new();
    let mut window = 0;
    for (i, n) in c.nodes.iter().enumerate() {
        if n.kind == NodeKind::WindowClipped {
            window += 1;
        } else {
            *hist.entry(deg[i]).or_insert(0) += 1;
        }
    }
    ComplexTopology {
        v,
        eg: c.edges.len(),
        c: comps,
        beta1: c.edges.len() as i64 - v as i64 + comps as i64,
        degree_histogram: hist,
        window_nodes: window,
    }
}

/// `dim H₁(X; Z₂) = 2 − χ` for a closed orientable surface.
pub fn surface_h1_z2(s: &TriSurface) -> Result<usize> {
    if !s.is_closed() {
        return Err(Error::HasBoundary);
    }
    Ok((2 - s.euler_characteristic()).max(0) as usize)
}

/// Components of the focal set, joining items closer than `radius`.
pub fn focal_components(s: &TriSurface, k: &FocalSet, radius: f64) -> usize {
    let n = k.items.len();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if items_close(s, &k.items[i], &k.items[j], radius) {
                uf.union(i, j);
            }
        }
    }
    (0..n).filter(|&i| uf.find(i) == i).count()
}

fn items_close(s: &TriSurface, a: &FocalItem, b: &FocalItem, radius: f64) -> bool {
    use FocalItem::*;
    let xy = |p: &SurfacePoint| s.embed(p).map(|w| Vec2::new(w[0], w[1]));
    match (a, b) {
        (Point(p), Point(q)) => {
            let chart = LocalChart::around(s, p, radius);
            chart.map(s, q).is_some_and(|x| x.dist(chart.center) <= radius)
        }
        (Point(p), Polygon(poly)) | (Polygon(poly), Point(p)) => {
            xy(p).is_some_and(|w| polygon_distance(w, poly) <= radius)
        }
        (Polygon(x), Polygon(y)) => polygons_distance(x, y) <= radius,
        (Faces(f), Faces(g)) => {
            let verts = |fs: &[u32]| {
                let mut v: Vec<u32> = fs.iter().flat_map(|&f| s.triangle(f)).collect();
                v.sort_unstable();
                v.dedup();
                v
            };
            let (u, w) = (verts(f), verts(g));
            u.iter().any(|x| w.binary_search(x).is_ok())
        }
        (Faces(f), Point(p)) | (Point(p), Faces(f)) => s.incident_faces(p).iter().any(|x| f.contains(x)),
        (Faces(_), Polygon(_)) | (Polygon(_), Faces(_)) => false,
    }
}

/// Distance between closed polygonal regions.
pub fn polygons_distance(x: &[Vec2], y: &[Vec2]) -> f64 {
    let mut d = f64::INFINITY;
    for (p, q) in [(x, y), (y, x)] {
        for &v in p {
            d = d.min(polygon_distance(v, q));
            for k in 0..q.len() {
                d = d.min(point_segment_distance(v, q[k], q[(k + 1) % q.len()]));
            }
        }
    }
    d
}

/// Sides of the complement of the complex.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SideLabeling {
    /// Per face: `true` on the A side (negative `f` at the centroid).
    #[serde(skip)]
    pub a_side: Vec<bool>,
    pub l_a: usize,
    pub l_b: usize,
    pub h0_a: usize,
    pub h0_b: usize,
}

fn centroid(f: u32) -> SurfacePoint {
    SurfacePoint::Face {
        face: f,
        bary: [1.0 / 3.0; 3],
    }
}

/// Face sides from the sign of `f` at centroids, their components, and the
/// focal component counts at radius `3h`.
pub fn side_labeling(sf: &SignedField, c: &EquidistantComplex) -> SideLabeling {
    let s = sf.surface();
    let nf = s.n_faces();
    let a_side: Vec<bool> = (0..nf as u32).map(|f| sf.eval_sign(&centroid(f)) < 0.0).collect();
    let blocked = |f: u32| c.junction_faces.binary_search(&f).is_ok();
    let mut uf = UnionFind::new(nf);
    for e in s.edges() {
        let [f, g] = e.faces;
        if e.is_boundary() || blocked(f) || blocked(g) {
            continue;
        }
        if a_side[f as usize] == a_side[g as usize] {
            uf.union(f as usize, g as usize);
        }
    }
    // slivers cut off by junction faces are not components of their own:
    // count only components holding a face with all corners on one side
    let neg = |v: u32| sf.sign_value(v) < 0.0;
    let mut roots = std::collections::BTreeSet::new();
    for f in 0..nf as u32 {
        let t = s.triangle(f);
        if !blocked(f) && t.iter().all(|&v| neg(v) == a_side[f as usize]) {
            roots.insert((uf.find(f as usize), a_side[f as usize]));
        }
    }
    let l_a = roots.iter().filter(|r| r.1).count();
    let l_b = roots.len() - l_a;
    let r = 3.0 * c.h;
    SideLabeling {
        a_side,
        l_a,
        l_b,
        h0_a: focal_components(s, sf.field_a().focal(), r),
        h0_b: focal_components(s, sf.field_b().focal(), r),
    }
}

/// Components of the complement, built from the signed pieces of faces.
/// Returns `(negative components, positive components, flanked)`, where
/// `flanked` says every face crossed by the complex has both pieces.
pub fn complement_components(sf: &SignedField, c: &EquidistantComplex) -> (usize, usize, bool) {
    let s = sf.surface();
    let nf = s.n_faces();
    let neg = |v: u32| sf.sign_value(v) < 0.0;
    let blocked = |f: u32| c.junction_faces.binary_search(&f).is_ok();
    // piece 2f: negative part of f, 2f+1: positive part
    let has = |f: u32, positive: bool| s.triangle(f).iter().any(|&v| neg(v) != positive);
    let mut uf = UnionFind::new(2 * nf);
    for e in s.edges() {
        let [f, g] = e.faces;
        if e.is_boundary() || blocked(f) || blocked(g) {
            continue;
        }
        for positive in [false, true] {
            if e.v.iter().any(|&v| neg(v) != positive) {
                uf.union(2 * f as usize + positive as usize, 2 * g as usize + positive as usize);
            }
        }
    }
    let mut roots = std::collections::BTreeSet::new();
    for f in 0..nf as u32 {
        if blocked(f) {
            continue;
        }
        for positive in [false, true] {
            if !has(f, !positive) {
                roots.insert((uf.find(2 * f as usize + positive as usize), positive));
            }
        }
    }
    let n_pos = roots.iter().filter(|r| r.1).count();
    let n_neg = roots.len() - n_pos;
    let flanked = c
        .edges
        .iter()
        .flat_map(|e| e.faces.iter())
        .filter(|&&f| !blocked(f))
        .all(|&f| has(f, false) && has(f, true));
    (n_neg, n_pos, flanked)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub scene: String,
    pub pass: bool,
    pub inconclusive: bool,
    pub measured: Value,
    pub bound: Value,
}

impl Verdict {
    pub fn new(check: &str, pass: bool, measured: Value, bound: Value) -> Verdict {
        Verdict {
            check: check.into(),
            scene: String::new(),
            pass,
            inconclusive: false,
            measured,
            bound,
        }
    }

    pub fn inconclusive(check: &str, measured: Value, why: &str) -> Verdict {
        Verdict {
            check: check.into(),
            scene: String::new(),
            pass: false,
            inconclusive: true,
            measured,
            bound: json!({ "reason": why }),
        }
    }
}

/// `1 ≤ β₁ ≤ h₁(X) + h₀(A) + h₀(B) − 1`, and `β₁ ≤ h₁(X) + 1` for connected
/// focal sets.
pub fn homology_bound_check(t: &ComplexTopology, h1x: usize, lab: &SideLabeling) -> Verdict {
    let upper = (h1x + lab.h0_a + lab.h0_b) as i64 - 1;
    let connected = lab.h0_a == 1 && lab.h0_b == 1;
    let mut pass = t.beta1 >= 1 && t.beta1 <= upper;
    if connected {
        pass &= t.beta1 <= h1x as i64 + 1;
    }
    let sides = lab.l_a >= 1 && lab.l_b >= 1 && lab.l_a <= lab.h0_a && lab.l_b <= lab.h0_b;
    Verdict::new(
        "homology_bound",
        pass && sides,
        json!({ "beta1": t.beta1, "l_a": lab.l_a, "l_b": lab.l_b }),
        json!({ "lower": 1, "upper": upper, "h1": h1x, "h0_a": lab.h0_a, "h0_b": lab.h0_b, "connected": connected }),
    )
}

/// Complement components equal `ℓ_A + ℓ_B` and every edge is flanked by
/// both sides.
pub fn minimal_separating_check(sf: &SignedField, c: &EquidistantComplex, lab: &SideLabeling) -> Verdict {
    let (n_neg, n_pos, flanked) = complement_components(sf, c);
    let pass = n_neg + n_pos == lab.l_a + lab.l_b && flanked;
    Verdict::new(
        "minimal_separating",
        pass,
        json!({ "components": n_neg + n_pos, "a_components": n_neg, "b_components": n_pos, "flanked": flanked }),
        json!({ "l_a": lab.l_a, "l_b": lab.l_b }),
    )
}

/// Planar windows: every non-window node has degree 2 and the complex is
/// connected. Window crossings closer than `2h` suggest a tangential touch.
pub fn one_manifold_check(s: &TriSurface, c: &EquidistantComplex) -> Verdict {
    let t = cycle_rank(c);
    let bad: usize = t.degree_histogram.iter().filter(|(&d, _)| d != 2).map(|(_, &n)| n).sum();
    let measured = json!({ "components": t.c, "non_degree_two": bad, "degrees": t.degree_histogram });
    let windows: Vec<SurfacePoint> = c
        .nodes
        .iter()
        .filter(|n| n.kind == NodeKind::WindowClipped)
        .map(|n| n.point)
        .collect();
    for i in 0..windows.len() {
        for j in i + 1..windows.len() {
            if let (Some(a), Some(b)) = (s.embed(&windows[i]), s.embed(&windows[j])) {
                if crate::geom::dist3(a, b) < 2.0 * c.h {
                    return Verdict::inconclusive("one_manifold", measured, "E touches the window tangentially");
                }
            }
        }
    }
    Verdict::new("one_manifold", bad == 0 && t.c == 1, measured, json!({ "degree": 2, "components": 1 }))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::equidistant::extract_equidistant;
    use crate::metric::{DistanceField, Domain};
    use crate::surface::generators::{flat_disk, flat_torus, sphere};
    use crate::surface::double;

    fn signed(s: TriSurface, a: Vec<SurfacePoint>, b: Vec<SurfacePoint>) -> SignedField {
        let d = Arc::new(Domain::new(Arc::new(s), 3));
        let fa = Arc::new(DistanceField::compute(d.clone(), FocalSet::points(a).unwrap()).unwrap());
        let fb = Arc::new(DistanceField::compute(d, FocalSet::points(b).unwrap()).unwrap());
        SignedField::new(fa, fb).unwrap()
    }

    #[test]
    fn h1_of_closed_surfaces() {
        assert_eq!(surface_h1_z2(&sphere(1.0, 0.2).unwrap()).unwrap(), 0);
        assert_eq!(surface_h1_z2(&flat_torus(1.0, 0.1).unwrap()).unwrap(), 2);
        assert_eq!(surface_h1_z2(&double(&flat_disk(1.0, 0.2).unwrap()).unwrap()).unwrap(), 0);
        assert!(surface_h1_z2(&flat_disk(1.0, 0.2).unwrap()).is_err());
    }

    #[test]
    fn sphere_antipodal_at_equality() {
        let s = sphere(1.0, 0.1).unwrap();
        let n = s.locate([0.0, 0.0, 1.0], None).unwrap();
        let so = s.locate([0.0, 0.0, -1.0], None).unwrap();
        let sf = signed(s, vec![n], vec![so]);
        let c = extract_equidistant(&sf).unwrap();
        let t = cycle_rank(&c);
        assert_eq!((t.v, t.eg, t.c, t.beta1), (1, 1, 1, 1));
        let lab = side_labeling(&sf, &c);
        let v = homology_bound_check(&t, 0, &lab);
        assert!(v.pass, "{v:?}");
        assert_eq!(v.bound["upper"], 1);
        assert!(minimal_separating_check(&sf, &c, &lab).pass);
    }

    #[test]
    fn torus_diamond_topology() {
        let s = flat_torus(1.0, 0.05).unwrap();
        let a = s.locate([0.0, 0.0, 0.0], None).unwrap();
        let b = s.locate([0.5, 0.5, 0.0], None).unwrap();
        let sf = signed(s, vec![a], vec![b]);
        let c = extract_equidistant(&sf).unwrap();
        let t = cycle_rank(&c);
        assert_eq!(t.beta1, 3);
        let lab = side_labeling(&sf, &c);
        assert_eq!((lab.l_a, lab.l_b), (1, 1));
        assert!(homology_bound_check(&t, 2, &lab).pass);
        let v = minimal_separating_check(&sf, &c, &lab);
        assert!(v.pass, "{v:?}");
    }

    #[test]
    fn planar_chord_is_one_manifold() {
        let s = flat_disk(2.0, 0.05).unwrap();
        let a = s.locate([-1.0, 0.0, 0.0], None).unwrap();
        let b = s.locate([1.0, 0.0, 0.0], None).unwrap();
        let sf = signed(s, vec![a], vec![b]);
        let c = extract_equidistant(&sf).unwrap();
        let v = one_manifold_check(sf.surface(), &c);
        assert!(v.pass, "{v:?}");
        let t = cycle_rank(&c);
        assert_eq!(t.beta1, 0);
    }

    #[test]
    fn square_configuration_is_a_tree() {
        let s = flat_disk(2.0, 0.05).unwrap();
        let at = |x: f64, y: f64| s.locate([x, y, 0.0], None).unwrap();
        let a = vec![at(1.0, 0.0), at(-1.0, 0.0)];
        let b = vec![at(0.0, 1.0), at(0.0, -1.0)];
        let sf = signed(s.clone(), a, b);
        let c = extract_equidistant(&sf).unwrap();
        let t = cycle_rank(&c);
        assert_eq!((t.v, t.eg, t.c, t.beta1), (5, 4, 1, 0));
        assert!(!one_manifold_check(sf.surface(), &c).pass);
    }

    #[test]
    fn focal_components_by_radius() {
        let s = flat_disk(1.0, 0.05).unwrap();
        let at = |x: f64, y: f64| s.locate([x, y, 0.0], None).unwrap();
        let k = FocalSet::points([at(0.0, 0.0), at(0.1, 0.0), at(0.5, 0.0)]).unwrap();
        assert_eq!(focal_components(&s, &k, 0.15), 2);
        assert_eq!(focal_components(&s, &k, 0.05), 3);
    }
}
