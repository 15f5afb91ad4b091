//! Length of extracted complexes and box-counting dimension of planar
//! equidistant sets, with the Koch snowflake and interlocking comb scenes.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::equidistant::EquidistantComplex;
use crate::error::{Error, Result};
use crate::geom::{polygon_distance, Vec2};

/// Minimum number of points for a box-counting estimate.
pub const MIN_POINTS: usize = 10_000;

/// Total length of the complex.
pub fn hausdorff_length(c: &EquidistantComplex) -> Result<f64> {
    if c.is_empty() {
        return Err(Error::EmptyComplex);
    }
    Ok(c.length())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionEstimate {
    /// Strictly decreasing.
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
    /// Index range `[lo, hi)` of the scales used in the fit.
    pub fit: (usize, usize),
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in `ln N`.
    pub residual: f64,
    /// Half-width of the 95% confidence interval of the slope.
    pub ci_half_width: f64,
}

impl DimensionEstimate {
    /// Refits using only the scales in `[min_scale, max_scale]`, again dropping
    /// the coarsest and finest of them.
    pub fn refit(&self, min_scale: f64, max_scale: f64) -> Result<DimensionEstimate> {
        let idx: Vec<usize> = (0..self.scales.len())
            .filter(|&i| self.scales[i] >= min_scale * (1.0 - 1e-12) && self.scales[i] <= max_scale * (1.0 + 1e-12))
            .collect();
        if idx.len() < 4 {
            return Err(Error::Insufficient(format!("{} scales in window", idx.len())));
        }
        let (lo, hi) = (idx[0] + 1, idx[idx.len() - 1]);
        Ok(fit(&self.scales, &self.counts, lo, hi))
    }
}

fn fit(scales: &[f64], counts: &[usize], lo: usize, hi: usize) -> DimensionEstimate {
    let xs: Vec<f64> = scales[lo..hi].iter().map(|s| (1.0 / s).ln()).collect();
    let ys: Vec<f64> = counts[lo..hi].iter().map(|&c| (c.max(1) as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let se = if n > 2.0 { (sse / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    DimensionEstimate {
        scales: scales.to_vec(),
        counts: counts.to_vec(),
        fit: (lo, hi),
        slope,
        intercept,
        residual: (sse / n).sqrt(),
        ci_half_width: 1.96 * se,
    }
}

/// `top, top/2, …` (`n` scales).
pub fn dyadic_scales(top: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| top / 2f64.powi(k as i32)).collect()
}

fn extent(points: &[[f64; 2]]) -> ([f64; 2], f64) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in points {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, (hi[0] - lo[0]).max(hi[1] - lo[1]))
}

/// Box counts on grids anchored at the lower-left corner of the points, and
/// the least-squares slope of `ln N` against `ln(1/δ)` over all but the
/// coarsest and finest scale.
pub fn box_counting_dimension(points: &[[f64; 2]], scales: &[f64]) -> Result<DimensionEstimate> {
    if points.len() < MIN_POINTS {
        return Err(Error::Insufficient(format!("{} points, need {MIN_POINTS}", points.len())));
    }
    if scales.len() < 6 || scales.windows(2).any(|w| !(w[1] < w[0])) || !(scales[scales.len() - 1] > 0.0) {
        return Err(Error::Insufficient("need at least 6 strictly decreasing positive scales".into()));
    }
    let (origin, ext) = extent(points);
    if scales[scales.len() - 1] > ext / 100.0 {
        return Err(Error::Insufficient(format!(
            "scales reach {} but must reach two decades below the extent {ext}",
            scales[scales.len() - 1]
        )));
    }
    let counts: Vec<usize> = scales
        .par_iter()
        .map(|&d| {
            let set: HashSet<(i64, i64)> = points
                .iter()
                .map(|p| (((p[0] - origin[0]) / d).floor() as i64, ((p[1] - origin[1]) / d).floor() as i64))
                .collect();
            set.len()
        })
        .collect();
    Ok(fit(scales, &counts, 1, scales.len() - 1))
}

/// Resamples polylines at a uniform spacing fine enough to give at least
/// `min_points` points in total.
pub fn densify(polylines: &[Vec<[f64; 2]>], min_points: usize) -> Vec<[f64; 2]> {
    let seg_len = |a: [f64; 2], b: [f64; 2]| (b[0] - a[0]).hypot(b[1] - a[1]);
    let total: f64 = polylines
        .iter()
        .flat_map(|p| p.windows(2).map(|w| seg_len(w[0], w[1])))
        .sum();
    if total <= 0.0 {
        return polylines.iter().flatten().copied().collect();
    }
    let step = total / min_points as f64 / 1.5;
    let mut out = Vec::new();
    for p in polylines {
        if let Some(&first) = p.first() {
            out.push(first);
        }
        for w in p.windows(2) {
            let n = (seg_len(w[0], w[1]) / step).ceil().max(1.0) as usize;
            for k in 1..=n {
                let t = k as f64 / n as f64;
                out.push([w[0][0] + (w[1][0] - w[0][0]) * t, w[0][1] + (w[1][1] - w[0][1]) * t]);
            }
        }
    }
    out
}

/// Points of a uniformly sampled segment, square, etc. are built by callers;
/// this samples grid-cell boundaries where a predicate changes value.
///
/// The grid has `nx × ny` cells of side `cell` starting at `origin`; the
/// predicate is evaluated at cell centres, row by row.
pub fn sign_change_points(
    origin: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    inside: impl Fn(usize) -> Vec<bool> + Sync,
) -> Vec<[f64; 2]> {
    let rows: Vec<Vec<bool>> = (0..ny).into_par_iter().map(&inside).collect();
    let mut out = Vec::new();
    for j in 0..ny {
        let y = origin.y + (j as f64 + 0.5) * cell;
        for i in 0..nx {
            let x = origin.x + (i as f64 + 0.5) * cell;
            if i + 1 < nx && rows[j][i] != rows[j][i + 1] {
                out.push([x + 0.5 * cell, y]);
            }
            if j + 1 < ny && rows[j][i] != rows[j + 1][i] {
                out.push([x, y + 0.5 * cell]);
            }
        }
    }
    out
}

/// Cells of one grid row whose centres lie inside a polygon (even-odd rule).
pub fn scanline_row(poly: &[Vec2], origin: Vec2, cell: f64, nx: usize, j: usize) -> Vec<bool> {
    let y = origin.y + (j as f64 + 0.5) * cell;
    let mut xs: Vec<f64> = Vec::new();
    for k in 0..poly.len() {
        let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
        if (a.y > y) != (b.y > y) {
            xs.push(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
        }
    }
    xs.sort_by(f64::total_cmp);
    let mut row = vec![false; nx];
    for pair in xs.chunks(2) {
        if pair.len() < 2 {
            break;
        }
        let i0 = ((pair[0] - origin.x) / cell - 0.5).ceil().max(0.0) as usize;
        let i1 = ((pair[1] - origin.x) / cell - 0.5).floor();
        if i1 < 0.0 {
            continue;
        }
        for cell_in in row.iter_mut().take((i1 as usize + 1).min(nx)).skip(i0) {
            *cell_in = true;
        }
    }
    row
}

/// Koch snowflake of the given level on a unit-side triangle, counterclockwise.
pub fn koch_polygon(level: u32) -> Result<Vec<Vec2>> {
    if level > 8 {
        return Err(Error::InvalidParameter(format!("Koch level {level} outside 0..=8")));
    }
    let h = 3f64.sqrt() / 2.0;
    let mut pts = vec![Vec2::new(-0.5, -h / 3.0), Vec2::new(0.5, -h / 3.0), Vec2::new(0.0, 2.0 * h / 3.0)];
    for _ in 0..level {
        let mut next = Vec::with_capacity(pts.len() * 4);
        for k in 0..pts.len() {
            let (a, b) = (pts[k], pts[(k + 1) % pts.len()]);
            let d = (b - a) * (1.0 / 3.0);
            let p1 = a + d;
            let p3 = a + d * 2.0;
            // outward is to the right of a counterclockwise boundary
            let out = Vec2::new(d.y, -d.x) * (3f64.sqrt() / 2.0);
            next.extend([a, p1, p1 + d * 0.5 + out, p3]);
        }
        pts = next;
    }
    Ok(pts)
}

/// The Koch scene: `A` is the bounded complementary region of the curve, `B`
/// the unbounded one. Their closures meet, so `E` is found by grid sign
/// analysis rather than extraction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KochScene {
    pub level: u32,
    #[serde(skip)]
    pub polygon: Vec<Vec2>,
    pub grid: usize,
    /// Sample points of `E`.
    #[serde(skip)]
    pub points: Vec<[f64; 2]>,
}

pub fn koch_scene(level: u32, grid: usize, swapped: bool) -> Result<KochScene> {
    let polygon = koch_polygon(level)?;
    let (origin, side) = bbox(&polygon, 0.02);
    let cell = side / grid as f64;
    let points = sign_change_points(origin, cell, grid, grid, |j| {
        let row = scanline_row(&polygon, origin, cell, grid, j);
        if swapped {
            row.into_iter().map(|b| !b).collect()
        } else {
            row
        }
    });
    Ok(KochScene {
        level,
        polygon,
        grid,
        points,
    })
}

/// Square bounding box with relative margin: `(lower-left, side)`.
pub fn bbox(pts: &[Vec2], margin: f64) -> (Vec2, f64) {
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let side = (hi.x - lo.x).max(hi.y - lo.y) * (1.0 + 2.0 * margin);
    let c = (lo + hi) * 0.5;
    (c - Vec2::new(side / 2.0, side / 2.0), side)
}

/// Box-counting estimate for a Koch scene over scales `extent/4 … extent/512`.
pub fn koch_dimension(scene: &KochScene) -> Result<DimensionEstimate> {
    let (_, side) = bbox(&scene.polygon, 0.02);
    box_counting_dimension(&scene.points, &dyadic_scales(side / 4.0, 8))
}

/// Two interlocking combs at distance `gap`, each with `teeth` teeth.
///
/// Teeth are `gap/2` wide and `4·gap` long at pitch `3·gap` on a spine
/// `gap` thick; the second comb is the first turned upside down and shifted
/// half a pitch.
pub fn comb_polygons(teeth: usize, gap: f64) -> Result<(Vec<Vec2>, Vec<Vec2>)> {
    if teeth < 2 {
        return Err(Error::InvalidParameter(format!("comb needs at least 2 teeth, got {teeth}")));
    }
    if !(gap > 0.0) {
        return Err(Error::InvalidParameter(format!("comb gap must be positive, got {gap}")));
    }
    let g = gap;
    let pitch = 3.0 * g;
    let w = 0.5 * g;
    let width = teeth as f64 * pitch;
    let mut a = vec![Vec2::new(0.0, 0.0), Vec2::new(width, 0.0), Vec2::new(width, g)];
    for k in (0..teeth).rev() {
        let x = k as f64 * pitch;
        a.extend([Vec2::new(x + w, g), Vec2::new(x + w, 5.0 * g), Vec2::new(x, 5.0 * g), Vec2::new(x, g)]);
    }
    let b: Vec<Vec2> = a.iter().rev().map(|p| Vec2::new(p.x + 1.5 * g, 7.0 * g - p.y)).collect();
    Ok((a, b))
}

/// Zero set of `d(·,A) − d(·,B)` for planar polygons by marching squares on
/// a grid of square cells covering both with a margin of `margin`. Returns
/// one segment per crossed cell side pair, with crossings interpolated
/// linearly between samples.
pub fn polygon_pair_contour(a: &[Vec2], b: &[Vec2], margin: f64, cells_long_side: usize) -> Vec<Vec<[f64; 2]>> {
    let all: Vec<Vec2> = a.iter().chain(b).copied().collect();
    let (mut lo, mut hi) = (Vec2::new(f64::INFINITY, f64::INFINITY), Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in &all {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let lo = lo - Vec2::new(margin, margin);
    let hi = hi + Vec2::new(margin, margin);
    let cell = (hi.x - lo.x).max(hi.y - lo.y) / cells_long_side as f64;
    let nx = ((hi.x - lo.x) / cell).ceil() as usize + 1;
    let ny = ((hi.y - lo.y) / cell).ceil() as usize + 1;
    let at = |i: usize, j: usize| Vec2::new(lo.x + i as f64 * cell, lo.y + j as f64 * cell);
    let f: Vec<Vec<f64>> = (0..ny)
        .into_par_iter()
        .map(|j| (0..nx).map(|i| polygon_distance(at(i, j), a) - polygon_distance(at(i, j), b)).collect())
        .collect();
    let rows: Vec<Vec<Vec<[f64; 2]>>> = (0..ny - 1)
        .into_par_iter()
        .map(|j| {
            let mut out = Vec::new();
            for i in 0..nx - 1 {
                let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
                let mut cross = Vec::with_capacity(4);
                for k in 0..4 {
                    let (p, q) = (corners[k], corners[(k + 1) % 4]);
                    let (fp, fq) = (f[p.1][p.0], f[q.1][q.0]);
                    if (fp < 0.0) != (fq < 0.0) {
                        let t = fp / (fp - fq);
                        let x = at(p.0, p.1).lerp(at(q.0, q.1), t);
                        cross.push([x.x, x.y]);
                    }
                }
                for pair in cross.chunks_exact(2) {
                    out.push(vec![pair[0], pair[1]]);
                }
            }
            out
        })
        .collect();
    rows.into_iter().flatten().collect()
}
