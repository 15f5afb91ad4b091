//! Wavefront OBJ import and export.
//!
//! Besides `v` and `f` records the reader accepts `el i j length` lines
//! (1-based vertex indices) giving intrinsic edge lengths. Edges without an
//! `el` record take their length from the vertex coordinates.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{SurfaceBuilder, TriSurface};
use crate::error::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn vertex_index(tok: &str, n: usize, line: usize) -> Result<u32> {
    let head = tok.split('/').next().unwrap_or("");
    let i: i64 = head
        .parse()
        .map_err(|_| parse_err(line, format!("bad vertex index `{tok}`")))?;
    let idx = if i < 0 { n as i64 + i } else { i - 1 };
    if idx < 0 || idx as usize >= n {
        return Err(parse_err(line, format!("vertex index {i} out of range")));
    }
    Ok(idx as u32)
}

pub fn parse_obj(text: &str) -> Result<TriSurface> {
    let mut pos: Vec<[f64; 3]> = Vec::new();
    let mut tris: Vec<[u32; 3]> = Vec::new();
    let mut lengths: HashMap<(u32, u32), f64> = HashMap::new();
    let mut pending_el: Vec<(usize, String, String, f64)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        let mut it = body.split_whitespace();
        let Some(tag) = it.next() else { continue };
        let rest: Vec<&str> = it.collect();
        match tag {
            "v" => {
                if rest.len() < 3 {
                    return Err(parse_err(line, "vertex needs three coordinates"));
                }
                let mut p = [0.0; 3];
                for k in 0..3 {
                    p[k] = rest[k]
                        .parse()
                        .map_err(|_| parse_err(line, format!("bad coordinate `{}`", rest[k])))?;
                }
                pos.push(p);
            }
            "f" => {
                if rest.len() < 3 {
                    return Err(parse_err(line, "face needs at least three vertices"));
                }
                let ids = rest
                    .iter()
                    .map(|t| vertex_index(t, pos.len(), line))
                    .collect::<Result<Vec<_>>>()?;
                for k in 1..ids.len() - 1 {
                    tris.push([ids[0], ids[k], ids[k + 1]]);
                }
            }
            "el" => {
                if rest.len() != 3 {
                    return Err(parse_err(line, "`el` needs two indices and a length"));
                }
                let l: f64 = rest[2]
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad length `{}`", rest[2])))?;
                pending_el.push((line, rest[0].to_string(), rest[1].to_string(), l));
            }
            "vn" | "vt" | "o" | "g" | "s" | "mtllib" | "usemtl" | "l" => {}
            other => return Err(parse_err(line, format!("unsupported record `{other}`"))),
        }
    }
    for (line, a, b, l) in pending_el {
        let (u, v) = (vertex_index(&a, pos.len(), line)?, vertex_index(&b, pos.len(), line)?);
        lengths.insert((u.min(v), u.max(v)), l);
    }
    if pos.is_empty() {
        return Err(parse_err(0, "no vertices"));
    }
    let n = pos.len();
    let p2 = pos.clone();
    SurfaceBuilder::new(n, tris).positions(pos).build_with(|u, v| {
        if let Some(&l) = lengths.get(&(u.min(v), u.max(v))) {
            return l;
        }
        let (a, b) = (p2[u as usize], p2[v as usize]);
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    })
}

pub fn read_obj_file(path: &Path) -> Result<TriSurface> {
    let text = std::fs::read_to_string(path)?;
    parse_obj(&text)
}

/// Serialises a surface. Intrinsic lengths are always written as `el`
/// records so the metric survives a round trip even without coordinates.
pub fn write_obj(s: &TriSurface) -> String {
    let mut out = String::new();
    match s.positions() {
        Some(p) => {
            for q in p {
                let _ = writeln!(out, "v {} {} {}", q[0], q[1], q[2]);
            }
        }
        None => {
            for _ in 0..s.n_vertices() {
                let _ = writeln!(out, "v 0 0 0");
            }
        }
    }
    for t in s.triangles() {
        let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    for e in s.edges() {
        let _ = writeln!(out, "el {} {} {}", e.v[0] + 1, e.v[1] + 1, e.length);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::generators::cone;

    #[test]
    fn round_trip_keeps_metric() {
        let c = cone(1.2 * std::f64::consts::PI, 1.0, 0.25).unwrap();
        let back = parse_obj(&write_obj(&c)).unwrap();
        assert_eq!(back.n_faces(), c.n_faces());
        assert!((back.cone_angle(0) - c.cone_angle(0)).abs() < 1e-12);
    }

    #[test]
    fn quads_and_negative_indices() {
        let text = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf -4 -3 -2 -1\n";
        let s = parse_obj(text).unwrap();
        assert_eq!(s.n_faces(), 2);
        assert!((s.total_area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_obj("v 0 0 0\nv 1 0 0\nf 1 2 9\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = parse_obj("v 0 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn edge_length_records_override_coordinates() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\nel 1 2 2.0\nel 2 3 2.0\nel 1 3 2.0\n";
        let s = parse_obj(text).unwrap();
        assert!((s.total_area() - 3f64.sqrt()).abs() < 1e-12);
    }
}
