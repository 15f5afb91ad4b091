//! Equidistant sets of two points on the real line under a few metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Threshold below which `d(x,p) − d(x,q)` counts as exactly zero.
pub const FLAT_ZERO: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineMetric {
    Standard,
    /// `|x−y| / (1 + |x−y|)`.
    BoundedRatio,
    /// `min(|x−y|, 1)`.
    Truncated,
}

impl LineMetric {
    pub fn dist(self, x: f64, y: f64) -> f64 {
        let d = (x - y).abs();
        match self {
            LineMetric::Standard => d,
            LineMetric::BoundedRatio => d / (1.0 + d),
            LineMetric::Truncated => d.min(1.0),
        }
    }

    pub fn parse(name: &str) -> Result<LineMetric> {
        match name {
            "standard" => Ok(LineMetric::Standard),
            "d1" | "bounded_ratio" => Ok(LineMetric::BoundedRatio),
            "d2" | "truncated" => Ok(LineMetric::Truncated),
            _ => Err(Error::InvalidParameter(format!("unknown line metric `{name}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Root {
    Point { x: f64 },
    Interval { lo: f64, hi: f64 },
}

/// Maximal points and intervals of `[lo, hi]` equidistant from `p` and `q`.
///
/// The line is sampled every `resolution`; runs of at least three samples
/// with `|g| < FLAT_ZERO` become intervals, other zeros and sign changes
/// become points, all refined by bisection.
pub fn line_equidistant(m: LineMetric, p: f64, q: f64, lo: f64, hi: f64, resolution: f64) -> Result<Vec<Root>> {
    if p == q {
        return Err(Error::InvalidParameter("p and q coincide".into()));
    }
    if !(lo < hi) || !(lo..=hi).contains(&p) || !(lo..=hi).contains(&q) {
        return Err(Error::InvalidParameter("domain must contain p and q".into()));
    }
    if !(resolution > 0.0) {
        return Err(Error::InvalidParameter("resolution must be positive".into()));
    }
    let g = |x: f64| m.dist(x, p) - m.dist(x, q);
    let flat = |x: f64| g(x).abs() < FLAT_ZERO;
    let n = ((hi - lo) / resolution).ceil() as usize;
    let xs: Vec<f64> = (0..=n).map(|i| (lo + i as f64 * resolution).min(hi)).collect();
    let gs: Vec<f64> = xs.iter().map(|&x| g(x)).collect();

    // boundary between a flat and a non-flat sample
    let edge = |mut a: f64, mut b: f64| {
        let fa = flat(a);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if flat(mid) == fa {
                a = mid;
            } else {
                b = mid;
            }
        }
        if fa {
            a
        } else {
            b
        }
    };
    let root = |mut a: f64, mut b: f64| {
        let sa = g(a) < 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if (g(mid) < 0.0) == sa {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    };

    let mut out = Vec::new();
    let mut i = 0;
    while i <= n {
        if gs[i].abs() < FLAT_ZERO {
            let start = i;
            while i < n && gs[i + 1].abs() < FLAT_ZERO {
                i += 1;
            }
            let end = i;
            if end - start + 1 >= 3 {
                let a = if start == 0 { xs[0] } else { edge(xs[start], xs[start - 1]) };
                let b = if end == n { xs[n] } else { edge(xs[end], xs[end + 1]) };
                out.push(Root::Interval { lo: a, hi: b });
            } else {
                out.push(Root::Point {
                    x: 0.5 * (xs[start] + xs[end]),
                });
            }
            i += 1;
            continue;
        }
        if i < n && gs[i + 1].abs() >= FLAT_ZERO && (gs[i] < 0.0) != (gs[i + 1] < 0.0) {
            out.push(Root::Point { x: root(xs[i], xs[i + 1]) });
        }
        i += 1;
    }
    Ok(out)
}
