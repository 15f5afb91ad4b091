use std::sync::Arc;

use crate::geom::Vec2;
use crate::surface::{SurfacePoint, TriSurface};

/// Default number of Steiner points inserted on each edge.
pub const DEFAULT_STEINER: usize = 3;

/// Interior vertices whose total angle is within this of `2π` do not bound
/// corridor windows: unfolding on either side of them agrees to second order.
pub const FLAT_VERTEX_TOL: f64 = 0.05;

/// A surface together with its sample set: the vertices followed by `m`
/// evenly spaced Steiner points per edge.
///
/// Sample `id < n_vertices` is a vertex; otherwise `id - n_vertices =
/// edge * m + k` is the `k`-th Steiner point on `edge`, at parameter
/// `(k + 1) / (m + 1)` from `edge.v[0]`.
#[derive(Debug)]
pub struct Domain {
    surface: Arc<TriSurface>,
    m: usize,
    stride: usize,
    face_ids: Vec<u32>,
    face_pos: Vec<Vec2>,
    hard: Vec<bool>,
    h: f64,
}

impl Domain {
    pub fn new(surface: Arc<TriSurface>, steiner: usize) -> Domain {
        let m = steiner;
        let stride = 3 + 3 * m;
        let nf = surface.n_faces();
        let nv = surface.n_vertices() as u32;
        let mut face_ids = Vec::with_capacity(nf * stride);
        let mut face_pos = Vec::with_capacity(nf * stride);
        for f in 0..nf as u32 {
            let t = surface.triangle(f);
            let l = surface.layout(f);
            for c in 0..3 {
                face_ids.push(t[c]);
                face_pos.push(l[c]);
            }
            for (c, &e) in surface.face_edges(f).iter().enumerate() {
                let ed = surface.edge(e);
                let (p0, p1) = if t[c] == ed.v[0] {
                    (l[c], l[(c + 1) % 3])
                } else {
                    (l[(c + 1) % 3], l[c])
                };
                for k in 0..m {
                    let tt = (k + 1) as f64 / (m + 1) as f64;
                    face_ids.push(nv + e * m as u32 + k as u32);
                    face_pos.push(p0.lerp(p1, tt));
                }
            }
        }
        let h = surface.mean_edge_length();
        let hard = (0..nv)
            .map(|v| {
                surface.is_boundary_vertex(v)
                    || (surface.cone_angle(v) - 2.0 * std::f64::consts::PI).abs() > FLAT_VERTEX_TOL
            })
            .collect();
        Domain {
            surface,
            m,
            stride,
            face_ids,
            face_pos,
            hard,
            h,
        }
    }

    pub fn surface(&self) -> &TriSurface {
        &self.surface
    }

    pub fn surface_arc(&self) -> &Arc<TriSurface> {
        &self.surface
    }

    pub fn steiner(&self) -> usize {
        self.m
    }

    /// Mean edge length, the working resolution.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n_samples(&self) -> usize {
        self.surface.n_vertices() + self.surface.n_edges() * self.m
    }

    /// Whether a vertex bounds corridor windows (boundary or cone point).
    pub fn is_hard(&self, v: u32) -> bool {
        self.hard[v as usize]
    }

    pub fn is_vertex(&self, id: u32) -> bool {
        (id as usize) < self.surface.n_vertices()
    }

    /// `(edge, k)` for a Steiner sample.
    pub fn steiner_of(&self, id: u32) -> Option<(u32, usize)> {
        let nv = self.surface.n_vertices() as u32;
        if id < nv || self.m == 0 {
            return None;
        }
        let r = (id - nv) as usize;
        Some(((r / self.m) as u32, r % self.m))
    }

    pub fn steiner_t(&self, k: usize) -> f64 {
        (k + 1) as f64 / (self.m + 1) as f64
    }

    pub fn sample_point(&self, id: u32) -> SurfacePoint {
        match self.steiner_of(id) {
            None => SurfacePoint::Vertex(id),
            Some((e, k)) => SurfacePoint::Edge {
                edge: e,
                t: self.steiner_t(k),
            },
        }
    }

    /// Sample id of a surface point that coincides with a sample.
    pub fn sample_at(&self, p: &SurfacePoint) -> Option<u32> {
        match *p {
            SurfacePoint::Vertex(v) => Some(v),
            SurfacePoint::Edge { edge, t } => {
                if t <= 0.0 {
                    return Some(self.surface.edge(edge).v[0]);
                }
                if t >= 1.0 {
                    return Some(self.surface.edge(edge).v[1]);
                }
                let x = t * (self.m + 1) as f64 - 1.0;
                let k = x.round();
                if (x - k).abs() < 1e-9 && k >= 0.0 && (k as usize) < self.m {
                    Some(self.surface.n_vertices() as u32 + edge * self.m as u32 + k as u32)
                } else {
                    None
                }
            }
            SurfacePoint::Face { .. } => None,
        }
    }

    /// Faces containing a sample.
    pub fn sample_faces(&self, id: u32) -> SampleFaces<'_> {
        match self.steiner_of(id) {
            None => SampleFaces::Fan(self.surface.fan(id).iter()),
            Some((e, _)) => {
                let ed = self.surface.edge(e);
                SampleFaces::Edge(ed.faces, 0)
            }
        }
    }

    /// Samples lying on face `f` with their layout coordinates.
    pub fn face_samples(&self, f: u32) -> impl Iterator<Item = (u32, Vec2)> + '_ {
        let r = f as usize * self.stride..(f as usize + 1) * self.stride;
        self.face_ids[r.clone()]
            .iter()
            .copied()
            .zip(self.face_pos[r].iter().copied())
    }

    pub fn sample_pos(&self, id: u32, f: u32) -> Option<Vec2> {
        let r = f as usize * self.stride..(f as usize + 1) * self.stride;
        self.face_ids[r.clone()]
            .iter()
            .position(|&x| x == id)
            .map(|i| self.face_pos[r.start + i])
    }

    /// Embedding coordinates of a sample.
    pub fn sample_world(&self, id: u32) -> Option<[f64; 3]> {
        self.surface.embed(&self.sample_point(id))
    }
}

pub enum SampleFaces<'a> {
    Fan(std::slice::Iter<'a, (u32, u8)>),
    Edge([u32; 2], usize),
}

impl Iterator for SampleFaces<'_> {
    type Item = u32;
    fn next(&mut self) -> Option<u32> {
        match self {
            SampleFaces::Fan(it) => it.next().map(|&(f, _)| f),
            SampleFaces::Edge(faces, i) => {
                while *i < 2 {
                    let f = faces[*i];
                    *i += 1;
                    if f != crate::surface::NONE {
                        return Some(f);
                    }
                }
                None
            }
        }
    }
}
