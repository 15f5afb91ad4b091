use std::collections::HashMap;

use super::{SurfaceBuilder, TriSurface, NONE};
use crate::error::{Error, Result};
use crate::geom::Vec2;

/// Split interior edges whose endpoints both lie on the boundary.
///
/// Both copies of such an edge would coincide in the double. New vertices are
/// appended after the original ones.
fn split_chords(s: &TriSurface) -> Result<Option<TriSurface>> {
    let n = s.n_vertices() as u32;
    let mut mid = vec![NONE; s.n_edges()];
    let mut next = n;
    for (e, ed) in s.edges().iter().enumerate() {
        if !ed.is_boundary() && s.is_boundary_vertex(ed.v[0]) && s.is_boundary_vertex(ed.v[1]) {
            mid[e] = next;
            next += 1;
        }
    }
    if next == n {
        return Ok(None);
    }
    let mut tris = Vec::new();
    let mut lengths: HashMap<(u32, u32), f64> = HashMap::new();
    for f in 0..s.n_faces() as u32 {
        let t = s.triangle(f);
        let l = s.layout(f);
        let fe = s.face_edges(f);
        let mut ring: Vec<(u32, Vec2)> = Vec::with_capacity(6);
        for c in 0..3 {
            ring.push((t[c], l[c]));
            let m = mid[fe[c] as usize];
            if m != NONE {
                ring.push((m, l[c].lerp(l[(c + 1) % 3], 0.5)));
            }
        }
        let Some(k) = ring.iter().position(|&(v, _)| v >= n) else {
            tris.push(t);
            continue;
        };
        // fan from a midpoint: no fan triangle has all three corners on one side
        ring.rotate_left(k);
        for i in 1..ring.len() - 1 {
            let tri = [ring[0], ring[i], ring[i + 1]];
            for a in 0..3 {
                let (u, v) = (tri[a], tri[(a + 1) % 3]);
                lengths.entry((u.0.min(v.0), u.0.max(v.0))).or_insert(u.1.dist(v.1));
            }
            tris.push([tri[0].0, tri[1].0, tri[2].0]);
        }
    }
    let mut b = SurfaceBuilder::new(next as usize, tris);
    if let Some(p) = s.positions() {
        let mut pos = p.to_vec();
        for (e, &m) in mid.iter().enumerate() {
            if m != NONE {
                let [a, c] = s.edge(e as u32).v.map(|v| p[v as usize]);
                pos.push([(a[0] + c[0]) / 2.0, (a[1] + c[1]) / 2.0, (a[2] + c[2]) / 2.0]);
            }
        }
        b = b.positions(pos);
    }
    b.build_with(|u, v| match s.find_edge(u, v) {
        Some(e) if u < n && v < n => s.edge(e).length,
        _ => lengths[&(u.min(v), u.max(v))],
    })
    .map(Some)
}

/// Glue a surface to a mirrored copy of itself along its whole boundary.
///
/// Interior edges between two boundary vertices are split first. Vertices of the original keep their ids; interior vertices of the copy are
/// appended. Copy faces carry sheet tag `1` and mirrored embedding `z -> -z`.
pub fn double(s: &TriSurface) -> Result<TriSurface> {
    if s.is_closed() {
        return Err(Error::EmptyBoundary);
    }
    if let Some(split) = split_chords(s)? {
        return double(&split);
    }
    let n = s.n_vertices();
    let mut map = vec![NONE; n];
    let mut next = n as u32;
    for v in 0..n as u32 {
        if s.is_boundary_vertex(v) {
            map[v as usize] = v;
        } else {
            map[v as usize] = next;
            next += 1;
        }
    }
    let total = next as usize;
    let mut tris: Vec<[u32; 3]> = s.triangles().to_vec();
    for t in s.triangles() {
        // reversed winding keeps the glued surface consistently oriented
        tris.push([map[t[0] as usize], map[t[2] as usize], map[t[1] as usize]]);
    }
    let mut sheet = vec![0u8; s.n_faces()];
    sheet.extend(std::iter::repeat(1u8).take(s.n_faces()));
    let mut back: Vec<u32> = (0..total as u32).collect();
    for v in 0..n {
        back[map[v] as usize] = v as u32;
    }
    let mut b = SurfaceBuilder::new(total, tris).face_sheet(sheet);
    if let Some(p) = s.positions() {
        let mut pos = p.to_vec();
        pos.resize(total, [0.0; 3]);
        for v in 0..n {
            if map[v] as usize >= n {
                let q = p[v];
                pos[map[v] as usize] = [q[0], q[1], -q[2]];
            }
        }
        b = b.positions(pos);
    }
    if let Some(per) = s.period() {
        b = b.period(per);
    }
    b.build_with(|u, v| {
        let (a, c) = (back[u as usize], back[v as usize]);
        let e = s.find_edge(a, c).expect("copied edge exists in the original");
        s.edge(e).length
    })
}
