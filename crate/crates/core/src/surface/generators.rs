//! Builtin surface generators.
//!
//! Every generator takes a target edge length `h`; mean edge lengths land
//! within a factor of two of it.

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{double, obj, SurfaceBuilder, TriSurface};
use crate::error::{Error, Result};

fn one() -> f64 {
    1.0
}

fn default_cone_angle() -> f64 {
    1.5 * PI
}

/// Declarative surface source, as it appears in scene files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceDescriptor {
    FlatDisk {
        #[serde(default = "one")]
        radius: f64,
    },
    FlatRect {
        width: f64,
        height: f64,
    },
    Sphere {
        #[serde(default = "one")]
        radius: f64,
    },
    FlatTorus {
        #[serde(default = "one")]
        side: f64,
    },
    Cone {
        #[serde(default = "default_cone_angle")]
        total_angle: f64,
        #[serde(default = "one")]
        radius: f64,
    },
    DoubledDisk {
        #[serde(default = "one")]
        radius: f64,
    },
    SqrtHorn {},
    Mesh {
        path: PathBuf,
    },
}

impl SurfaceDescriptor {
    /// Builtin generator with default parameters.
    pub fn from_name(name: &str) -> Result<SurfaceDescriptor> {
        Ok(match name {
            "flat_disk" => SurfaceDescriptor::FlatDisk { radius: 1.0 },
            "flat_rect" => SurfaceDescriptor::FlatRect { width: 1.0, height: 1.0 },
            "sphere" => SurfaceDescriptor::Sphere { radius: 1.0 },
            "flat_torus" => SurfaceDescriptor::FlatTorus { side: 1.0 },
            "cone" => SurfaceDescriptor::Cone {
                total_angle: default_cone_angle(),
                radius: 1.0,
            },
            "doubled_disk" => SurfaceDescriptor::DoubledDisk { radius: 1.0 },
            "sqrt_horn" => SurfaceDescriptor::SqrtHorn {},
            other => return Err(Error::UnknownGenerator(other.to_string())),
        })
    }

    pub fn is_planar_window(&self) -> bool {
        matches!(
            self,
            SurfaceDescriptor::FlatDisk { .. } | SurfaceDescriptor::FlatRect { .. }
        )
    }
}

pub fn load_surface(desc: &SurfaceDescriptor, h: f64) -> Result<TriSurface> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidParameter(format!("resolution {h} must be positive")));
    }
    match desc {
        SurfaceDescriptor::FlatDisk { radius } => flat_disk(*radius, h),
        SurfaceDescriptor::FlatRect { width, height } => flat_rect(*width, *height, h),
        SurfaceDescriptor::Sphere { radius } => sphere(*radius, h),
        SurfaceDescriptor::FlatTorus { side } => flat_torus(*side, h),
        SurfaceDescriptor::Cone { total_angle, radius } => cone(*total_angle, *radius, h),
        SurfaceDescriptor::DoubledDisk { radius } => double(&flat_disk(*radius, h)?),
        SurfaceDescriptor::SqrtHorn {} => sqrt_horn(h),
        SurfaceDescriptor::Mesh { path } => obj::read_obj_file(path),
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {x}")))
    }
}

/// Triangulates the annulus between two rings of vertices listed by
/// increasing angle in `[0, 2π)`.
fn stitch(inner: &[(u32, f64)], outer: &[(u32, f64)], tris: &mut Vec<[u32; 3]>) {
    let (na, nb) = (inner.len(), outer.len());
    let ang = |ring: &[(u32, f64)], k: usize| {
        let n = ring.len();
        ring[k % n].1 + if k >= n { 2.0 * PI } else { 0.0 }
    };
    let (mut i, mut j) = (0usize, 0usize);
    while i < na || j < nb {
        let a = inner[i % na].0;
        let b = outer[j % nb].0;
        let advance_outer = j < nb && (i == na || ang(outer, j + 1) < ang(inner, i + 1));
        if advance_outer {
            tris.push([a, b, outer[(j + 1) % nb].0]);
            j += 1;
        } else {
            tris.push([a, b, inner[(i + 1) % na].0]);
            i += 1;
        }
    }
}

/// Polar ring mesh: an apex vertex plus rings at the given radii with the
/// given vertex counts. Returns `(n_vertices, triangles, polar coordinates)`.
fn ring_mesh(rings: &[(f64, usize)]) -> (usize, Vec<[u32; 3]>, Vec<(f64, f64)>) {
    let mut polar = vec![(0.0, 0.0)];
    let mut tris = Vec::new();
    let mut prev: Vec<(u32, f64)> = Vec::new();
    for (k, &(r, n)) in rings.iter().enumerate() {
        let off = if k % 2 == 1 { 0.5 } else { 0.0 };
        let ring: Vec<(u32, f64)> = (0..n)
            .map(|j| {
                let t = 2.0 * PI * (j as f64 + off) / n as f64;
                polar.push((r, t));
                ((polar.len() - 1) as u32, t)
            })
            .collect();
        if k == 0 {
            for j in 0..n {
                tris.push([0, ring[j].0, ring[(j + 1) % n].0]);
            }
        } else {
            stitch(&prev, &ring, &mut tris);
        }
        prev = ring;
    }
    (polar.len(), tris, polar)
}

fn uniform_rings(radius: f64, h: f64, circumference_factor: f64) -> Vec<(f64, usize)> {
    let n_rings = (radius / h).round().max(1.0) as usize;
    (1..=n_rings)
        .map(|k| {
            let r = radius * k as f64 / n_rings as f64;
            let n = ((circumference_factor * r / h).round() as usize).max(6);
            (r, n)
        })
        .collect()
}

/// Intrinsic length between polar points on a cone of total angle `theta`.
fn cone_length(theta: f64, a: (f64, f64), b: (f64, f64)) -> f64 {
    let mut dt = (b.1 - a.1).rem_euclid(2.0 * PI);
    if dt > PI {
        dt -= 2.0 * PI;
    }
    let dphi = dt * theta / (2.0 * PI);
    (a.0 * a.0 + b.0 * b.0 - 2.0 * a.0 * b.0 * dphi.cos()).max(0.0).sqrt()
}

/// Planar disk centred at the origin; vertex 0 is the centre.
pub fn flat_disk(radius: f64, h: f64) -> Result<TriSurface> {
    positive("radius", radius)?;
    positive("h", h)?;
    cone(2.0 * PI, radius, h)
}

/// Flat cone of the given total angle at the apex (vertex 0), truncated at
/// slant radius `radius`. Angles above `2π` give a saddle point.
pub fn cone(total_angle: f64, radius: f64, h: f64) -> Result<TriSurface> {
    positive("total_angle", total_angle)?;
    positive("radius", radius)?;
    positive("h", h)?;
    if total_angle > 4.0 * PI {
        return Err(Error::InvalidParameter("cone angle above 4π".into()));
    }
    let rings = uniform_rings(radius, h, total_angle);
    let (n, tris, polar) = ring_mesh(&rings);
    let s = total_angle / (2.0 * PI);
    let pos: Vec<[f64; 3]> = polar
        .iter()
        .map(|&(r, t)| {
            if s <= 1.0 + 1e-12 {
                let lift = (1.0 - s * s).max(0.0).sqrt();
                [r * s * t.cos(), r * s * t.sin(), -r * lift]
            } else {
                [r * t.cos(), r * t.sin(), 0.0]
            }
        })
        .collect();
    SurfaceBuilder::new(n, tris)
        .positions(pos)
        .build_with(|u, v| cone_length(total_angle, polar[u as usize], polar[v as usize]))
}

/// Axis-aligned rectangle centred at the origin.
pub fn flat_rect(width: f64, height: f64, h: f64) -> Result<TriSurface> {
    positive("width", width)?;
    positive("height", height)?;
    positive("h", h)?;
    let nx = (width / h).round().max(1.0) as usize;
    let ny = (height / h).round().max(1.0) as usize;
    let id = |i: usize, j: usize| (j * (nx + 1) + i) as u32;
    let mut pos = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            pos.push([
                -width / 2.0 + width * i as f64 / nx as f64,
                -height / 2.0 + height * j as f64 / ny as f64,
                0.0,
            ]);
        }
    }
    let mut tris = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                tris.push([a, b, c]);
                tris.push([a, c, d]);
            } else {
                tris.push([a, b, d]);
                tris.push([b, c, d]);
            }
        }
    }
    SurfaceBuilder::new(pos.len(), tris).positions(pos).build_embedded()
}

/// Square flat torus of side `side`; positions are periodic coordinates.
pub fn flat_torus(side: f64, h: f64) -> Result<TriSurface> {
    positive("side", side)?;
    positive("h", h)?;
    let n = (side / h).round().max(3.0) as usize;
    let id = |i: usize, j: usize| ((j % n) * n + (i % n)) as u32;
    let mut pos = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            pos.push([side * i as f64 / n as f64, side * j as f64 / n as f64, 0.0]);
        }
    }
    let mut tris = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            tris.push([a, b, c]);
            tris.push([a, c, d]);
        }
    }
    SurfaceBuilder::new(n * n, tris)
        .positions(pos)
        .period([side, side])
        .build_embedded()
}

/// Geodesic sphere (subdivided icosahedron projected to the sphere) with
/// vertices at both poles. Centrally symmetric.
pub fn sphere(radius: f64, h: f64) -> Result<TriSurface> {
    positive("radius", radius)?;
    positive("h", h)?;
    let freq = ((1.0515 * radius / h).round() as usize).max(1);
    let z0 = 1.0 / 5f64.sqrt();
    let s0 = 2.0 / 5f64.sqrt();
    let mut base: Vec<[f64; 3]> = vec![[0.0, 0.0, 1.0]];
    for k in 0..5 {
        let a = 2.0 * PI * k as f64 / 5.0;
        base.push([s0 * a.cos(), s0 * a.sin(), z0]);
    }
    for k in 0..5 {
        let a = 2.0 * PI * k as f64 / 5.0 + PI / 5.0;
        base.push([s0 * a.cos(), s0 * a.sin(), -z0]);
    }
    base.push([0.0, 0.0, -1.0]);
    let (top, bottom) = (0u32, 11u32);
    let up = |k: usize| 1 + (k % 5) as u32;
    let lo = |k: usize| 6 + (k % 5) as u32;
    let mut faces = Vec::new();
    for k in 0..5 {
        faces.push([top, up(k), up(k + 1)]);
        faces.push([up(k), lo(k), up(k + 1)]);
        faces.push([up(k + 1), lo(k), lo(k + 1)]);
        faces.push([bottom, lo(k + 1), lo(k)]);
    }

    let mut index: std::collections::HashMap<Vec<(u32, usize)>, u32> = Default::default();
    let mut pos: Vec<[f64; 3]> = Vec::new();
    let mut point = |w: [(u32, usize); 3]| -> u32 {
        let mut k: Vec<(u32, usize)> = w.iter().copied().filter(|&(_, c)| c > 0).collect();
        k.sort_unstable();
        if let Some(&id) = index.get(&k) {
            return id;
        }
        let mut p = [0.0; 3];
        for &(v, c) in &k {
            for d in 0..3 {
                p[d] += base[v as usize][d] * c as f64;
            }
        }
        let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        pos.push([radius * p[0] / norm, radius * p[1] / norm, radius * p[2] / norm]);
        let id = (pos.len() - 1) as u32;
        index.insert(k, id);
        id
    };
    let n = freq;
    let mut tris = Vec::new();
    for f in &faces {
        let p = |point: &mut dyn FnMut([(u32, usize); 3]) -> u32, i: usize, j: usize| {
            point([(f[0], n - i - j), (f[1], i), (f[2], j)])
        };
        for i in 0..n {
            for j in 0..(n - i) {
                let a = p(&mut point, i, j);
                let b = p(&mut point, i + 1, j);
                let c = p(&mut point, i, j + 1);
                tris.push([a, b, c]);
                if i + j + 1 < n {
                    let d = p(&mut point, i + 1, j + 1);
                    tris.push([b, d, c]);
                }
            }
        }
    }
    SurfaceBuilder::new(pos.len(), tris).positions(pos).build_embedded()
}

/// Surface of revolution of `z = √r`, `0 ≤ r ≤ 1`, inscribed as a polyhedron.
/// The apex is truncated at radius `h/10` and capped by a fan to the origin.
pub fn sqrt_horn(h: f64) -> Result<TriSurface> {
    positive("h", h)?;
    let mut radii = vec![h / 10.0];
    loop {
        let r = *radii.last().unwrap();
        let dr = h / (1.0 + 1.0 / (4.0 * r)).sqrt();
        let next = r + dr;
        if next >= 1.0 - 0.3 * dr {
            radii.push(1.0);
            break;
        }
        radii.push(next);
    }
    let rings: Vec<(f64, usize)> = radii
        .iter()
        .map(|&r| (r, ((2.0 * PI * r / h).round() as usize).max(6)))
        .collect();
    let (n, tris, polar) = ring_mesh(&rings);
    let pos: Vec<[f64; 3]> = polar
        .iter()
        .map(|&(r, t)| [r * t.cos(), r * t.sin(), r.sqrt()])
        .collect();
    SurfaceBuilder::new(n, tris).positions(pos).build_embedded()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::gauss_bonnet_residual;

    fn check_h(s: &TriSurface, h: f64) {
        let m = s.mean_edge_length();
        assert!(m > h / 2.0 && m < 2.0 * h, "mean edge {m} vs target {h}");
    }

    #[test]
    fn flat_torus_is_flat_and_closed() {
        let t = flat_torus(1.0, 0.05).unwrap();
        check_h(&t, 0.05);
        assert!(t.is_closed());
        assert_eq!(t.euler_characteristic(), 0);
        for v in 0..t.n_vertices() as u32 {
            assert!((t.cone_angle(v) - 2.0 * PI).abs() < 1e-9);
        }
    }

    #[test]
    fn sphere_is_closed_with_chi_two() {
        let s = sphere(1.0, 0.05).unwrap();
        check_h(&s, 0.05);
        assert!(s.is_closed());
        assert_eq!(s.euler_characteristic(), 2);
        assert!(gauss_bonnet_residual(&s).abs() < 1e-9);
        let p = s.positions().unwrap();
        assert_eq!(p[0], [0.0, 0.0, 1.0]);
        assert!(p.iter().any(|q| q[2] == -1.0));
    }

    #[test]
    fn disk_and_cone() {
        let d = flat_disk(1.0, 0.05).unwrap();
        check_h(&d, 0.05);
        assert_eq!(d.euler_characteristic(), 1);
        assert!((d.cone_angle(0) - 2.0 * PI).abs() < 1e-9);
        let c = cone(1.5 * PI, 1.0, 0.05).unwrap();
        assert!((c.cone_angle(0) - 1.5 * PI).abs() < 1e-9);
        for v in 1..c.n_vertices() as u32 {
            if !c.is_boundary_vertex(v) {
                assert!((c.cone_angle(v) - 2.0 * PI).abs() < 1e-9);
            }
        }
        assert!(gauss_bonnet_residual(&c).abs() < 1e-9);
    }

    #[test]
    fn rect_is_flat() {
        let r = flat_rect(2.0, 1.0, 0.1).unwrap();
        check_h(&r, 0.1);
        assert!((r.total_area() - 2.0).abs() < 1e-9);
        assert!(gauss_bonnet_residual(&r).abs() < 1e-9);
    }

    #[test]
    fn sqrt_horn_builds() {
        let s = sqrt_horn(0.05).unwrap();
        assert_eq!(s.euler_characteristic(), 1);
        assert_eq!(s.boundary_loops().len(), 1);
        assert!(gauss_bonnet_residual(&s).abs() < 1e-9);
    }

    #[test]
    fn unknown_generator() {
        assert!(matches!(
            SurfaceDescriptor::from_name("klein_bottle"),
            Err(Error::UnknownGenerator(_))
        ));
    }

    #[test]
    fn descriptor_json_is_strict() {
        let d: SurfaceDescriptor =
            serde_json::from_str(r#"{"generator":"cone","total_angle":3.0}"#).unwrap();
        assert_eq!(d, SurfaceDescriptor::Cone { total_angle: 3.0, radius: 1.0 });
        assert!(serde_json::from_str::<SurfaceDescriptor>(r#"{"generator":"sphere","radius":1,"bogus":2}"#).is_err());
        assert!(serde_json::from_str::<SurfaceDescriptor>(r#"{"generator":"mobius"}"#).is_err());
    }
}
