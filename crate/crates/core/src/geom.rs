//! Small planar toolkit used for face layouts and unfoldings.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn from_angle(a: f64) -> Self {
        Vec2::new(a.cos(), a.sin())
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        if n > 0.0 {
            self * (1.0 / n)
        } else {
            self
        }
    }

    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    #[inline]
    pub fn lerp(self, o: Vec2, t: f64) -> Vec2 {
        self + (o - self) * t
    }

    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Orientation-preserving rigid motion of the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rigid2 {
    cos: f64,
    sin: f64,
    t: Vec2,
}

impl Rigid2 {
    pub const IDENTITY: Rigid2 = Rigid2 {
        cos: 1.0,
        sin: 0.0,
        t: Vec2::ZERO,
    };

    /// Motion taking segment `a0 -> a1` onto `b0 -> b1` (the segments must
    /// have equal length; only their directions are matched).
    pub fn matching(a0: Vec2, a1: Vec2, b0: Vec2, b1: Vec2) -> Rigid2 {
        let da = (a1 - a0).normalized();
        let db = (b1 - b0).normalized();
        let cos = da.dot(db);
        let sin = da.cross(db);
        let r = Rigid2 {
            cos,
            sin,
            t: Vec2::ZERO,
        };
        let t = b0 - r.rotate(a0);
        Rigid2 { cos, sin, t }
    }

    #[inline]
    pub fn rotate(&self, v: Vec2) -> Vec2 {
        Vec2::new(self.cos * v.x - self.sin * v.y, self.sin * v.x + self.cos * v.y)
    }

    #[inline]
    pub fn apply(&self, p: Vec2) -> Vec2 {
        self.rotate(p) + self.t
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Rigid2) -> Rigid2 {
        Rigid2 {
            cos: self.cos * other.cos - self.sin * other.sin,
            sin: self.sin * other.cos + self.cos * other.sin,
            t: self.apply(other.t),
        }
    }

    pub fn inverse(&self) -> Rigid2 {
        let r = Rigid2 {
            cos: self.cos,
            sin: -self.sin,
            t: Vec2::ZERO,
        };
        let t = -r.rotate(self.t);
        Rigid2 { t, ..r }
    }
}

/// Planar triangle with side lengths `l01`, `l12`, `l20`, placed with corner 0
/// at the origin, corner 1 on the positive x axis and corner 2 above it.
pub fn layout_triangle(l01: f64, l12: f64, l20: f64) -> [Vec2; 3] {
    let x = (l01 * l01 + l20 * l20 - l12 * l12) / (2.0 * l01);
    let y = (l20 * l20 - x * x).max(0.0).sqrt();
    [Vec2::ZERO, Vec2::new(l01, 0.0), Vec2::new(x, y)]
}

/// Interior angle opposite side `c` in a triangle with sides `a`, `b`, `c`.
pub fn angle_from_sides(a: f64, b: f64, c: f64) -> f64 {
    let cos = ((a * a + b * b - c * c) / (2.0 * a * b)).clamp(-1.0, 1.0);
    cos.acos()
}

/// Barycentric coordinates of `p` with respect to the triangle `t`.
pub fn barycentric(t: &[Vec2; 3], p: Vec2) -> [f64; 3] {
    let d = (t[1] - t[0]).cross(t[2] - t[0]);
    let l1 = (p - t[0]).cross(t[2] - t[0]) / d;
    let l2 = (t[1] - t[0]).cross(p - t[0]) / d;
    [1.0 - l1 - l2, l1, l2]
}

/// Parameters `(s, u)` with `p + s*d = a + u*(b - a)`, if the lines are not parallel.
pub fn ray_segment(p: Vec2, d: Vec2, a: Vec2, b: Vec2) -> Option<(f64, f64)> {
    let e = b - a;
    let den = d.cross(e);
    if den.abs() < 1e-300 {
        return None;
    }
    let w = a - p;
    Some((w.cross(e) / den, w.cross(d) / den))
}

/// Euclidean distance from `p` to the segment `a`–`b`.
pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let e = b - a;
    let l2 = e.norm2();
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(e) / l2).clamp(0.0, 1.0);
    p.dist(a + e * t)
}

pub fn point_in_polygon(p: Vec2, poly: &[Vec2]) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Distance from `p` to a closed polygonal region (zero inside).
pub fn polygon_distance(p: Vec2, poly: &[Vec2]) -> f64 {
    if point_in_polygon(p, poly) {
        return 0.0;
    }
    let n = poly.len();
    (0..n)
        .map(|i| point_segment_distance(p, poly[i], poly[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Nearest point of the polygon outline to `p`.
pub fn nearest_on_polygon(p: Vec2, poly: &[Vec2]) -> Vec2 {
    let n = poly.len();
    let mut best = (f64::INFINITY, poly[0]);
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let e = b - a;
        let l2 = e.norm2();
        let t = if l2 == 0.0 { 0.0 } else { ((p - a).dot(e) / l2).clamp(0.0, 1.0) };
        let q = a + e * t;
        let d = p.dist(q);
        if d < best.0 {
            best = (d, q);
        }
    }
    best.1
}

pub fn dist3(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}
