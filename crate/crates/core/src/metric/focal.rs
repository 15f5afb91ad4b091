use crate::error::{Error, Result};
use crate::geom::{barycentric, point_in_polygon, Vec2};
use crate::surface::{SurfacePoint, TriSurface};

/// One connected piece of a focal set.
#[derive(Clone, Debug, PartialEq)]
pub enum FocalItem {
    Point(SurfacePoint),
    /// Closed polygonal region in the plane `z = 0` of a planar surface.
    Polygon(Vec<Vec2>),
    /// Union of closed faces.
    Faces(Vec<u32>),
}

/// A compact focal set resolved onto a surface.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FocalSet {
    pub items: Vec<FocalItem>,
}

impl FocalSet {
    pub fn new(items: Vec<FocalItem>) -> Result<FocalSet> {
        if items.is_empty() {
            return Err(Error::EmptyFocalSet);
        }
        for it in &items {
            match it {
                FocalItem::Polygon(p) if p.len() < 3 => {
                    return Err(Error::InvalidParameter("polygon needs three vertices".into()))
                }
                FocalItem::Faces(f) if f.is_empty() => return Err(Error::EmptyFocalSet),
                _ => {}
            }
        }
        Ok(FocalSet { items })
    }

    pub fn points(pts: impl IntoIterator<Item = SurfacePoint>) -> Result<FocalSet> {
        FocalSet::new(pts.into_iter().map(FocalItem::Point).collect())
    }

    pub fn has_polygons(&self) -> bool {
        self.items.iter().any(|i| matches!(i, FocalItem::Polygon(_)))
    }
}

/// Planar coordinates of a surface point (requires an embedding).
pub fn world_xy(s: &TriSurface, p: &SurfacePoint) -> Option<Vec2> {
    s.embed(p).map(|w| Vec2::new(w[0], w[1]))
}

/// Layout coordinates in face `f` of a planar world point.
pub fn world_to_face(s: &TriSurface, f: u32, w: Vec2) -> Option<Vec2> {
    let pos = s.positions()?;
    let t = s.triangle(f);
    let tri = [
        Vec2::new(pos[t[0] as usize][0], pos[t[0] as usize][1]),
        Vec2::new(pos[t[1] as usize][0], pos[t[1] as usize][1]),
        Vec2::new(pos[t[2] as usize][0], pos[t[2] as usize][1]),
    ];
    let b = barycentric(&tri, w);
    let l = s.layout(f);
    Some(l[0] * b[0] + l[1] * b[1] + l[2] * b[2])
}

/// Whether a point lies in the closed polygonal region.
pub fn in_polygon(p: Vec2, poly: &[Vec2]) -> bool {
    point_in_polygon(p, poly) || crate::geom::polygon_distance(p, poly) < 1e-12
}
