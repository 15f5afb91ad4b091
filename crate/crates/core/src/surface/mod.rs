//! Triangulated polyhedral surfaces with intrinsic edge lengths.
//!
//! A [`TriSurface`] is the discrete carrier of a compact Alexandrov surface:
//! the metric is determined entirely by the edge lengths, while vertex
//! positions (when present) are kept for point lookup and export only.

mod chart;
mod double;
pub mod generators;
pub mod obj;
mod validate;

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{angle_from_sides, barycentric, layout_triangle, Rigid2, Vec2};

pub use chart::{local_distance, LocalChart};
pub use double::double;
pub use generators::{load_surface, SurfaceDescriptor};
pub use validate::{gauss_bonnet_residual, validate_alexandrov, AngleFailure, ValidationReport};

pub const NONE: u32 = u32::MAX;

/// Default angular tolerance for CBB validation.
pub const TOL_ANGLE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    /// Endpoints, `v[0] < v[1]`.
    pub v: [u32; 2],
    /// Incident faces; `faces[1] == NONE` on the boundary.
    pub faces: [u32; 2],
    pub length: f64,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.faces[1] == NONE
    }

    pub fn other_face(&self, f: u32) -> u32 {
        if self.faces[0] == f {
            self.faces[1]
        } else {
            self.faces[0]
        }
    }
}

/// A point on the surface, addressed combinatorially.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfacePoint {
    Vertex(u32),
    /// `t` runs from `edge.v[0]` (t = 0) to `edge.v[1]` (t = 1).
    Edge { edge: u32, t: f64 },
    Face { face: u32, bary: [f64; 3] },
}

/// Per-vertex total angle and boundary flag.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeProfile {
    pub total_angle: Vec<f64>,
    pub is_boundary: Vec<bool>,
}

impl ConeProfile {
    /// Diameter of the space of directions at `v`.
    pub fn direction_diameter(&self, v: usize) -> f64 {
        if self.is_boundary[v] {
            self.total_angle[v].min(std::f64::consts::PI)
        } else {
            (self.total_angle[v] / 2.0).min(std::f64::consts::PI)
        }
    }
}

#[derive(Clone, Debug)]
pub struct TriSurface {
    n_vertices: usize,
    triangles: Vec<[u32; 3]>,
    edges: Vec<Edge>,
    face_edges: Vec<[u32; 3]>,
    layouts: Vec<[Vec2; 3]>,
    corner_angles: Vec<[f64; 3]>,
    fans: Vec<Vec<(u32, u8)>>,
    vertex_edges: Vec<Vec<u32>>,
    is_boundary: Vec<bool>,
    boundary_loops: Vec<Vec<u32>>,
    cone_angles: Vec<f64>,
    edge_unfold: Vec<Rigid2>,
    positions: Option<Vec<[f64; 3]>>,
    period: Option<[f64; 2]>,
    face_sheet: Vec<u8>,
}

/// Raw mesh data awaiting validation.
#[derive(Clone, Debug, Default)]
pub struct SurfaceBuilder {
    pub n_vertices: usize,
    pub triangles: Vec<[u32; 3]>,
    pub positions: Option<Vec<[f64; 3]>>,
    /// Periodic embedding (flat tori): positions live in `[0, p0) x [0, p1)`.
    pub period: Option<[f64; 2]>,
    pub face_sheet: Option<Vec<u8>>,
}

impl SurfaceBuilder {
    pub fn new(n_vertices: usize, triangles: Vec<[u32; 3]>) -> Self {
        SurfaceBuilder {
            n_vertices,
            triangles,
            ..Default::default()
        }
    }

    pub fn positions(mut self, p: Vec<[f64; 3]>) -> Self {
        self.positions = Some(p);
        self
    }

    pub fn period(mut self, p: [f64; 2]) -> Self {
        self.period = Some(p);
        self
    }

    pub fn face_sheet(mut self, s: Vec<u8>) -> Self {
        self.face_sheet = Some(s);
        self
    }

    /// Build with edge lengths measured on the embedding.
    pub fn build_embedded(self) -> Result<TriSurface> {
        let pos = self
            .positions
            .clone()
            .ok_or_else(|| Error::InvalidParameter("no positions to measure lengths".into()))?;
        let period = self.period;
        self.build_with(|u, v| {
            let (a, b) = (pos[u as usize], pos[v as usize]);
            let mut d = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
            if let Some(p) = period {
                for k in 0..2 {
                    d[k] -= p[k] * (d[k] / p[k]).round();
                }
            }
            (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
        })
    }

    /// Build with intrinsic edge lengths supplied by `length(u, v)`.
    pub fn build_with(self, mut length: impl FnMut(u32, u32) -> f64) -> Result<TriSurface> {
        TriSurface::assemble(self, &mut length)
    }
}

fn key(a: u32, b: u32) -> (u32, u32) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl TriSurface {
    fn assemble(b: SurfaceBuilder, length: &mut dyn FnMut(u32, u32) -> f64) -> Result<TriSurface> {
        let n = b.n_vertices;
        let mut tris = b.triangles;
        if tris.is_empty() {
            return Err(Error::NonManifold("no faces".into()));
        }
        for (f, t) in tris.iter().enumerate() {
            if t.iter().any(|&v| v as usize >= n) {
                return Err(Error::NonManifold(format!("face {f} references a missing vertex")));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::NonManifold(format!("face {f} repeats a vertex")));
            }
        }

        // undirected edge -> incident (face, corner) where the face runs tri[c] -> tri[c+1]
        let mut incidence: HashMap<(u32, u32), Vec<(u32, u8)>> = HashMap::new();
        for (f, t) in tris.iter().enumerate() {
            for c in 0..3 {
                incidence
                    .entry(key(t[c], t[(c + 1) % 3]))
                    .or_default()
                    .push((f as u32, c as u8));
            }
        }
        if let Some((k, _)) = incidence.iter().find(|(_, v)| v.len() > 2) {
            return Err(Error::NonManifold(format!(
                "edge ({}, {}) has more than two faces",
                k.0, k.1
            )));
        }

        // Orient consistently and check connectivity.
        let nf = tris.len();
        let mut flip = vec![false; nf];
        let mut seen = vec![false; nf];
        let mut components = 0;
        for start in 0..nf {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(f) = queue.pop_front() {
                let t = tris[f];
                for c in 0..3 {
                    let (a, bb) = (t[c], t[(c + 1) % 3]);
                    for &(g, gc) in &incidence[&key(a, bb)] {
                        let g = g as usize;
                        if g == f {
                            continue;
                        }
                        let same_dir = tris[g][gc as usize] == a;
                        let need = flip[f] ^ same_dir;
                        if seen[g] {
                            if flip[g] != need {
                                return Err(Error::NonOrientable);
                            }
                        } else {
                            seen[g] = true;
                            flip[g] = need;
                            queue.push_back(g);
                        }
                    }
                }
            }
        }
        if components > 1 {
            return Err(Error::Disconnected(components));
        }
        for (t, &fl) in tris.iter_mut().zip(&flip) {
            if fl {
                t.swap(1, 2);
            }
        }

        // Edges in first-seen order.
        let mut edge_id: HashMap<(u32, u32), u32> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut face_edges = vec![[NONE; 3]; nf];
        for (f, t) in tris.iter().enumerate() {
            for c in 0..3 {
                let k = key(t[c], t[(c + 1) % 3]);
                let id = *edge_id.entry(k).or_insert_with(|| {
                    edges.push(Edge {
                        v: [k.0, k.1],
                        faces: [NONE, NONE],
                        length: 0.0,
                    });
                    (edges.len() - 1) as u32
                });
                let e = &mut edges[id as usize];
                if e.faces[0] == NONE {
                    e.faces[0] = f as u32;
                } else {
                    e.faces[1] = f as u32;
                }
                face_edges[f][c] = id;
            }
        }
        for e in edges.iter_mut() {
            let l = length(e.v[0], e.v[1]);
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "edge ({}, {}) has non-positive length {l}",
                    e.v[0], e.v[1]
                )));
            }
            e.length = l;
        }

        let mut layouts = Vec::with_capacity(nf);
        let mut corner_angles = Vec::with_capacity(nf);
        for f in 0..nf {
            let l = [
                edges[face_edges[f][0] as usize].length,
                edges[face_edges[f][1] as usize].length,
                edges[face_edges[f][2] as usize].length,
            ];
            if !(l[0] < l[1] + l[2] && l[1] < l[0] + l[2] && l[2] < l[0] + l[1]) {
                return Err(Error::DegenerateFace { face: f, lengths: l });
            }
            layouts.push(layout_triangle(l[0], l[1], l[2]));
            corner_angles.push([
                angle_from_sides(l[0], l[2], l[1]),
                angle_from_sides(l[0], l[1], l[2]),
                angle_from_sides(l[1], l[2], l[0]),
            ]);
        }

        let mut s = TriSurface {
            n_vertices: n,
            triangles: tris,
            edges,
            face_edges,
            layouts,
            corner_angles,
            fans: Vec::new(),
            vertex_edges: vec![Vec::new(); n],
            is_boundary: vec![false; n],
            boundary_loops: Vec::new(),
            cone_angles: vec![0.0; n],
            edge_unfold: Vec::new(),
            positions: b.positions,
            period: b.period,
            face_sheet: b.face_sheet.unwrap_or_else(|| vec![0; nf]),
        };
        if let Some(p) = &s.positions {
            if p.len() != n {
                return Err(Error::InvalidParameter("position count mismatch".into()));
            }
        }
        if s.face_sheet.len() != nf {
            return Err(Error::InvalidParameter("face sheet count mismatch".into()));
        }
        for (i, e) in s.edges.iter().enumerate() {
            s.vertex_edges[e.v[0] as usize].push(i as u32);
            s.vertex_edges[e.v[1] as usize].push(i as u32);
            if e.is_boundary() {
                s.is_boundary[e.v[0] as usize] = true;
                s.is_boundary[e.v[1] as usize] = true;
            }
        }
        s.build_fans()?;
        s.build_boundary_loops()?;
        s.edge_unfold = (0..s.edges.len())
            .map(|e| {
                let ed = &s.edges[e];
                if ed.is_boundary() {
                    Rigid2::IDENTITY
                } else {
                    s.compute_unfold(ed.faces[0], ed.faces[1], e as u32)
                }
            })
            .collect();
        Ok(s)
    }

    fn build_fans(&mut self) -> Result<()> {
        let n = self.n_vertices;
        let mut incident: Vec<Vec<(u32, u8)>> = vec![Vec::new(); n];
        for (f, t) in self.triangles.iter().enumerate() {
            for c in 0..3 {
                incident[t[c] as usize].push((f as u32, c as u8));
            }
        }
        let mut fans = Vec::with_capacity(n);
        for v in 0..n {
            let inc = &incident[v];
            if inc.is_empty() {
                return Err(Error::NonManifold(format!("vertex {v} is isolated")));
            }
            // start: a corner with no predecessor (boundary), else the first
            let start = inc
                .iter()
                .copied()
                .find(|&(f, c)| self.fan_prev(f, c).is_none())
                .unwrap_or(inc[0]);
            let mut fan = vec![start];
            let mut cur = start;
            while let Some(nx) = self.fan_next(cur.0, cur.1) {
                if nx == start {
                    break;
                }
                if fan.len() > inc.len() {
                    return Err(Error::NonManifold(format!("vertex {v} has a broken fan")));
                }
                fan.push(nx);
                cur = nx;
            }
            if fan.len() != inc.len() {
                return Err(Error::NonManifold(format!(
                    "vertex {v} link is not a single cycle or path"
                )));
            }
            self.cone_angles[v] = fan
                .iter()
                .map(|&(f, c)| self.corner_angles[f as usize][c as usize])
                .sum();
            fans.push(fan);
        }
        self.fans = fans;
        Ok(())
    }

    /// Next corner CCW around `tri[c]`, across the edge `(tri[c+2], tri[c])`.
    fn fan_next(&self, f: u32, c: u8) -> Option<(u32, u8)> {
        let e = self.face_edges[f as usize][(c as usize + 2) % 3];
        let g = self.edges[e as usize].other_face(f);
        if g == NONE {
            return None;
        }
        let v = self.triangles[f as usize][c as usize];
        let gc = self.triangles[g as usize].iter().position(|&w| w == v)? as u8;
        Some((g, gc))
    }

    fn fan_prev(&self, f: u32, c: u8) -> Option<(u32, u8)> {
        let e = self.face_edges[f as usize][c as usize];
        let g = self.edges[e as usize].other_face(f);
        if g == NONE {
            return None;
        }
        let v = self.triangles[f as usize][c as usize];
        let gc = self.triangles[g as usize].iter().position(|&w| w == v)? as u8;
        Some((g, gc))
    }

    fn build_boundary_loops(&mut self) -> Result<()> {
        // boundary edges directed as traversed by their face
        let mut next: BTreeMap<u32, u32> = BTreeMap::new();
        for e in &self.edges {
            if !e.is_boundary() {
                continue;
            }
            let f = e.faces[0] as usize;
            let t = self.triangles[f];
            let c = (0..3)
                .find(|&c| key(t[c], t[(c + 1) % 3]) == (e.v[0], e.v[1]))
                .expect("edge belongs to face");
            let (a, b) = (t[c], t[(c + 1) % 3]);
            if next.insert(a, b).is_some() {
                return Err(Error::NonSimpleBoundary(a as usize));
            }
        }
        let mut used: BTreeMap<u32, bool> = next.keys().map(|&k| (k, false)).collect();
        let mut loops = Vec::new();
        let starts: Vec<u32> = next.keys().copied().collect();
        for s in starts {
            if used[&s] {
                continue;
            }
            let mut lp = vec![s];
            used.insert(s, true);
            let mut cur = next[&s];
            while cur != s {
                if used.get(&cur).copied().unwrap_or(true) {
                    return Err(Error::NonSimpleBoundary(cur as usize));
                }
                used.insert(cur, true);
                lp.push(cur);
                cur = next[&cur];
            }
            loops.push(lp);
        }
        self.boundary_loops = loops;
        Ok(())
    }

    fn compute_unfold(&self, from: u32, to: u32, e: u32) -> Rigid2 {
        let ed = &self.edges[e as usize];
        let a = SurfacePoint::Vertex(ed.v[0]);
        let b = SurfacePoint::Vertex(ed.v[1]);
        Rigid2::matching(
            self.point_in_face(&a, from).expect("edge in face"),
            self.point_in_face(&b, from).expect("edge in face"),
            self.point_in_face(&a, to).expect("edge in face"),
            self.point_in_face(&b, to).expect("edge in face"),
        )
    }

    // ---- accessors -------------------------------------------------------

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_faces(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, f: u32) -> [u32; 3] {
        self.triangles[f as usize]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: u32) -> &Edge {
        &self.edges[e as usize]
    }

    /// `face_edges(f)[c]` joins corners `c` and `c + 1`.
    pub fn face_edges(&self, f: u32) -> [u32; 3] {
        self.face_edges[f as usize]
    }

    pub fn layout(&self, f: u32) -> &[Vec2; 3] {
        &self.layouts[f as usize]
    }

    pub fn corner_angles(&self, f: u32) -> [f64; 3] {
        self.corner_angles[f as usize]
    }

    /// Faces around `v` in counter-clockwise order, as `(face, corner)`.
    pub fn fan(&self, v: u32) -> &[(u32, u8)] {
        &self.fans[v as usize]
    }

    pub fn vertex_edges(&self, v: u32) -> &[u32] {
        &self.vertex_edges[v as usize]
    }

    pub fn is_boundary_vertex(&self, v: u32) -> bool {
        self.is_boundary[v as usize]
    }

    pub fn boundary_loops(&self) -> &[Vec<u32>] {
        &self.boundary_loops
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_loops.is_empty()
    }

    pub fn cone_angle(&self, v: u32) -> f64 {
        self.cone_angles[v as usize]
    }

    pub fn cone_profile(&self) -> ConeProfile {
        ConeProfile {
            total_angle: self.cone_angles.clone(),
            is_boundary: self.is_boundary.clone(),
        }
    }

    pub fn positions(&self) -> Option<&[[f64; 3]]> {
        self.positions.as_deref()
    }

    pub fn period(&self) -> Option<[f64; 2]> {
        self.period
    }

    pub fn face_sheet(&self, f: u32) -> u8 {
        self.face_sheet[f as usize]
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    pub fn mean_edge_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum::<f64>() / self.edges.len() as f64
    }

    pub fn max_edge_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).fold(0.0, f64::max)
    }

    pub fn total_area(&self) -> f64 {
        self.layouts
            .iter()
            .map(|l| 0.5 * (l[1] - l[0]).cross(l[2] - l[0]))
            .sum()
    }

    /// Edge joining `u` and `v`, if any.
    pub fn find_edge(&self, u: u32, v: u32) -> Option<u32> {
        self.vertex_edges[u as usize]
            .iter()
            .copied()
            .find(|&e| {
                let ed = &self.edges[e as usize];
                (ed.v[0] == u && ed.v[1] == v) || (ed.v[0] == v && ed.v[1] == u)
            })
    }

    /// Rigid map from the layout frame of one face of `e` to the other's.
    pub fn unfold(&self, from: u32, to: u32, e: u32) -> Rigid2 {
        let ed = &self.edges[e as usize];
        if ed.faces[0] == from && ed.faces[1] == to {
            self.edge_unfold[e as usize]
        } else if ed.faces[1] == from && ed.faces[0] == to {
            self.edge_unfold[e as usize].inverse()
        } else if from == to {
            Rigid2::IDENTITY
        } else {
            panic!("faces {from} and {to} do not share edge {e}")
        }
    }

    /// Edge shared by two distinct faces.
    pub fn shared_edge(&self, f: u32, g: u32) -> Option<u32> {
        self.face_edges[f as usize]
            .iter()
            .copied()
            .find(|&e| self.edges[e as usize].other_face(f) == g)
    }

    // ---- surface points ---------------------------------------------------

    pub fn incident_faces(&self, p: &SurfacePoint) -> Vec<u32> {
        match *p {
            SurfacePoint::Vertex(v) => self.fans[v as usize].iter().map(|&(f, _)| f).collect(),
            SurfacePoint::Edge { edge, .. } => {
                let e = &self.edges[edge as usize];
                if e.is_boundary() {
                    vec![e.faces[0]]
                } else {
                    vec![e.faces[0], e.faces[1]]
                }
            }
            SurfacePoint::Face { face, .. } => vec![face],
        }
    }

    /// Coordinates of `p` in the layout frame of face `f`, if `p` lies on `f`.
    pub fn point_in_face(&self, p: &SurfacePoint, f: u32) -> Option<Vec2> {
        let t = &self.triangles[f as usize];
        let l = &self.layouts[f as usize];
        match *p {
            SurfacePoint::Vertex(v) => t.iter().position(|&w| w == v).map(|c| l[c]),
            SurfacePoint::Edge { edge, t: s } => {
                let e = &self.edges[edge as usize];
                if e.faces[0] != f && e.faces[1] != f {
                    return None;
                }
                let a = t.iter().position(|&w| w == e.v[0])?;
                let b = t.iter().position(|&w| w == e.v[1])?;
                Some(l[a].lerp(l[b], s))
            }
            SurfacePoint::Face { face, bary } => {
                (face == f).then(|| l[0] * bary[0] + l[1] * bary[1] + l[2] * bary[2])
            }
        }
    }

    /// Converts a layout position inside face `f` to a canonical surface point,
    /// snapping onto edges and vertices within `snap` (relative barycentric).
    pub fn face_point(&self, f: u32, q: Vec2, snap: f64) -> SurfacePoint {
        let b = barycentric(&self.layouts[f as usize], q);
        self.snap_barycentric(f, b, snap)
    }

    pub fn snap_barycentric(&self, f: u32, b: [f64; 3], snap: f64) -> SurfacePoint {
        let t = self.triangles[f as usize];
        let b = [b[0].max(0.0), b[1].max(0.0), b[2].max(0.0)];
        let s = b[0] + b[1] + b[2];
        let b = [b[0] / s, b[1] / s, b[2] / s];
        for c in 0..3 {
            if b[c] >= 1.0 - snap {
                return SurfacePoint::Vertex(t[c]);
            }
        }
        for c in 0..3 {
            // weight of the corner opposite edge (c, c+1)
            let opp = (c + 2) % 3;
            if b[opp] <= snap {
                let e = self.face_edges[f as usize][c];
                let ed = &self.edges[e as usize];
                let wa = b[c] / (b[c] + b[(c + 1) % 3]);
                // weight of t[c] in [0,1]; convert to parameter from ed.v[0]
                let tt = if t[c] == ed.v[0] { 1.0 - wa } else { wa };
                return SurfacePoint::Edge { edge: e, t: tt };
            }
        }
        SurfacePoint::Face { face: f, bary: b }
    }

    /// Canonical form: edge points at the ends become vertices.
    pub fn canonical(&self, p: SurfacePoint) -> SurfacePoint {
        match p {
            SurfacePoint::Edge { edge, t } if t <= 0.0 => SurfacePoint::Vertex(self.edges[edge as usize].v[0]),
            SurfacePoint::Edge { edge, t } if t >= 1.0 => SurfacePoint::Vertex(self.edges[edge as usize].v[1]),
            other => other,
        }
    }

    /// Straight-line distance between two points lying on a common face.
    pub fn face_distance(&self, a: &SurfacePoint, b: &SurfacePoint) -> Option<f64> {
        for f in self.incident_faces(a) {
            if let (Some(pa), Some(pb)) = (self.point_in_face(a, f), self.point_in_face(b, f)) {
                return Some(pa.dist(pb));
            }
        }
        None
    }

    /// Embedding coordinates of a surface point (periodic coordinates are
    /// wrapped into the fundamental domain).
    pub fn embed(&self, p: &SurfacePoint) -> Option<[f64; 3]> {
        let pos = self.positions.as_ref()?;
        let (verts, w): (Vec<u32>, Vec<f64>) = match *p {
            SurfacePoint::Vertex(v) => (vec![v], vec![1.0]),
            SurfacePoint::Edge { edge, t } => {
                let e = &self.edges[edge as usize];
                (vec![e.v[0], e.v[1]], vec![1.0 - t, t])
            }
            SurfacePoint::Face { face, bary } => (self.triangles[face as usize].to_vec(), bary.to_vec()),
        };
        let base = pos[verts[0] as usize];
        let mut out = [0.0; 3];
        for (v, wt) in verts.iter().zip(&w) {
            let q = self.unwrap_near(pos[*v as usize], base);
            for k in 0..3 {
                out[k] += wt * q[k];
            }
        }
        if let Some(per) = self.period {
            for k in 0..2 {
                out[k] = out[k].rem_euclid(per[k]);
            }
        }
        Some(out)
    }

    /// Translate `q` by periods so that it is nearest to `base`.
    pub fn unwrap_near(&self, q: [f64; 3], base: [f64; 3]) -> [f64; 3] {
        match self.period {
            None => q,
            Some(per) => {
                let mut r = q;
                for k in 0..2 {
                    r[k] -= per[k] * ((q[k] - base[k]) / per[k]).round();
                }
                r
            }
        }
    }

    /// Nearest surface point to an embedding coordinate, optionally restricted
    /// to faces on one sheet (doubled surfaces).
    pub fn locate(&self, target: [f64; 3], sheet: Option<u8>) -> Result<SurfacePoint> {
        let pos = self
            .positions
            .as_ref()
            .ok_or_else(|| Error::PointNotOnSurface(format!("{target:?} (surface has no embedding)")))?;
        let mut best: Option<(f64, u32, [f64; 3])> = None;
        for (f, t) in self.triangles.iter().enumerate() {
            if let Some(s) = sheet {
                if self.face_sheet[f] != s {
                    continue;
                }
            }
            let base = pos[t[0] as usize];
            let tq = self.unwrap_near(target, base);
            let c = [
                base,
                self.unwrap_near(pos[t[1] as usize], base),
                self.unwrap_near(pos[t[2] as usize], base),
            ];
            let (d, b) = closest_on_triangle(tq, &c);
            if best.map_or(true, |(bd, _, _)| d < bd - 1e-15) {
                best = Some((d, f as u32, b));
            }
        }
        let (d, f, b) = best.ok_or_else(|| Error::PointNotOnSurface(format!("{target:?}")))?;
        let scale = self.mean_edge_length();
        if d > 0.5 * scale.max(1e-12) + 1e-9 {
            return Err(Error::PointNotOnSurface(format!("{target:?} is {d} from the surface")));
        }
        Ok(self.snap_barycentric(f, b, 1e-9))
    }
}

/// Squared-distance minimiser on a 3D triangle; returns `(distance, barycentric)`.
fn closest_on_triangle(p: [f64; 3], t: &[[f64; 3]; 3]) -> (f64, [f64; 3]) {
    let sub = |a: [f64; 3], b: [f64; 3]| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let ab = sub(t[1], t[0]);
    let ac = sub(t[2], t[0]);
    let ap = sub(p, t[0]);
    let d1 = dot(ab, ap);
    let d2 = dot(ac, ap);
    let bary = |b: [f64; 3]| -> (f64, [f64; 3]) {
        let q = [
            b[0] * t[0][0] + b[1] * t[1][0] + b[2] * t[2][0],
            b[0] * t[0][1] + b[1] * t[1][1] + b[2] * t[2][1],
            b[0] * t[0][2] + b[1] * t[1][2] + b[2] * t[2][2],
        ];
        let d = sub(p, q);
        (dot(d, d).sqrt(), b)
    };
    if d1 <= 0.0 && d2 <= 0.0 {
        return bary([1.0, 0.0, 0.0]);
    }
    let bp = sub(p, t[1]);
    let d3 = dot(ab, bp);
    let d4 = dot(ac, bp);
    if d3 >= 0.0 && d4 <= d3 {
        return bary([0.0, 1.0, 0.0]);
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return bary([1.0 - v, v, 0.0]);
    }
    let cp = sub(p, t[2]);
    let d5 = dot(ab, cp);
    let d6 = dot(ac, cp);
    if d6 >= 0.0 && d5 <= d6 {
        return bary([0.0, 0.0, 1.0]);
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return bary([1.0 - w, 0.0, w]);
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return bary([0.0, 1.0 - w, w]);
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    bary([1.0 - v - w, v, w])
}
