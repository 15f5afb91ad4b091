use rayon::prelude::*;
use serde::Serialize;

use super::extract::{arclength, point_at, EquidistantComplex, NodeKind};
use super::signed::SignedField;
use crate::error::{Error, Result};
use crate::metric::{directions_at, DirectionSet, TangentFrame};
use crate::surface::{LocalChart, SurfacePoint, TriSurface};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    A,
    B,
}

/// Which branch of the diameter-capped bisector rule applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BisectorCase {
    /// The wedge spans the short way between its sides: half the angle.
    Acute,
    /// The wedge spans the long way: diameter minus half the angle.
    Obtuse,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Wedge {
    pub base: SurfacePoint,
    /// Bounding directions in counterclockwise order.
    pub sides: [(Side, f64); 2],
    pub width: f64,
    pub bisector: f64,
    pub case: BisectorCase,
    /// Angle from either side to the bisector by the capped rule.
    pub half_angle: f64,
}

/// Wedges between angularly adjacent A- and B-directions.
pub fn wedges_at(frame: &TangentFrame, a: &DirectionSet, b: &DirectionSet) -> Result<Vec<Wedge>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Insufficient("wedges need directions to both sets".into()));
    }
    let mut all: Vec<(f64, Side)> = a.directions.iter().map(|d| (d.angle, Side::A)).collect();
    all.extend(b.directions.iter().map(|d| (d.angle, Side::B)));
    all.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1 as u8).cmp(&(y.1 as u8))));
    let n = all.len();
    let diam = frame.diameter();
    let mut out = Vec::new();
    for i in 0..n {
        let (j, wrap) = if i + 1 < n { (i + 1, false) } else { (0, true) };
        if wrap && frame.segment {
            break;
        }
        if all[i].1 == all[j].1 {
            continue;
        }
        let width = if wrap { all[j].0 + frame.total - all[i].0 } else { all[j].0 - all[i].0 };
        let ang = frame.separation(all[i].0, all[j].0);
        let (case, half_angle) = if (width - ang).abs() <= 1e-9 {
            (BisectorCase::Acute, ang / 2.0)
        } else {
            (BisectorCase::Obtuse, diam - ang / 2.0)
        };
        out.push(Wedge {
            base: frame.point,
            sides: [(all[i].1, all[i].0), (all[j].1, all[j].0)],
            width,
            bisector: (all[i].0 + width / 2.0).rem_euclid(frame.total),
            case,
            half_angle,
        });
    }
    Ok(out)
}

/// Angle between the discrete tangent of the complex at arc length `t` on
/// edge `edge` and the bisector of `wedge`.
///
/// The tangent is a central difference over a `3h` window on the polyline
/// developed into a local chart.
pub fn bisector_residual(
    s: &TriSurface,
    complex: &EquidistantComplex,
    edge: usize,
    t: f64,
    frame: &TangentFrame,
    wedge: &Wedge,
) -> Result<f64> {
    let arc = arclength(s, &complex.edges[edge].points, complex.h);
    residual_on(s, complex, edge, &arc, t, frame, wedge)
}

fn residual_on(
    s: &TriSurface,
    complex: &EquidistantComplex,
    edge: usize,
    arc: &[f64],
    t: f64,
    frame: &TangentFrame,
    wedge: &Wedge,
) -> Result<f64> {
    let h = complex.h;
    let e = &complex.edges[edge];
    let total = *arc.last().unwrap();
    let half = 1.5 * h;
    let closed = e.ends[0] == e.ends[1] && complex.nodes[e.ends[0]].kind == NodeKind::LoopMarker;
    let (lo, hi) = if closed {
        ((t - half).rem_euclid(total), (t + half).rem_euclid(total))
    } else {
        if t - half < 0.0 || t + half > total {
            return Err(Error::Insufficient("tangent window reaches a node".into()));
        }
        (t - half, t + half)
    };
    let x = frame.point;
    if matches!(x, SurfacePoint::Vertex(_)) {
        return Err(Error::Insufficient("tangent frame at a vertex".into()));
    }
    let chart = LocalChart::around(s, &x, 4.0 * h);
    let pm = chart.map(s, &point_at(s, &e.points, arc, lo));
    let pp = chart.map(s, &point_at(s, &e.points, arc, hi));
    let (Some(pm), Some(pp)) = (pm, pp) else {
        return Err(Error::Insufficient("tangent window leaves the chart".into()));
    };
    let tangent = frame
        .angle_of(chart.root, pp - pm)
        .ok_or_else(|| Error::Insufficient("tangent outside the frame".into()))?;
    let back = (tangent + std::f64::consts::PI).rem_euclid(frame.total);
    Ok(frame.separation(tangent, wedge.bisector).min(frame.separation(back, wedge.bisector)))
}

/// Wedge analysis at one sampled point of the complex.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WedgeSample {
    pub edge: usize,
    pub arc: f64,
    pub point: SurfacePoint,
    pub n_a: usize,
    pub n_b: usize,
    pub n_wedges: usize,
    pub acute: usize,
    pub obtuse: usize,
    /// Worst residual over the wedges; `None` near nodes.
    pub residual: Option<f64>,
    /// Set when the direction sets could not be separated.
    pub error: Option<String>,
}

/// Samples the complex every `spacing` and analyses wedges in parallel.
/// Samples on the surface boundary are skipped.
pub fn sample_wedges(sf: &SignedField, complex: &EquidistantComplex, spacing: f64) -> Vec<WedgeSample> {
    let s = sf.surface();
    // window points have a segment of directions; parity is not defined there
    let pts: Vec<_> = complex
        .sample_points(s, spacing)
        .into_iter()
        .filter(|(_, _, p)| !TangentFrame::at(s, p).segment)
        .collect();
    let arcs: Vec<Vec<f64>> = complex.edges.par_iter().map(|e| arclength(s, &e.points, complex.h)).collect();
    pts.par_iter()
        .map(|&(edge, arc, point)| {
            let mut out = WedgeSample {
                edge,
                arc,
                point,
                n_a: 0,
                n_b: 0,
                n_wedges: 0,
                acute: 0,
                obtuse: 0,
                residual: None,
                error: None,
            };
            match directions_at(sf.field_a(), sf.field_b(), &point) {
                Err(e) => out.error = Some(e.to_string()),
                Ok((a, b, frame)) => {
                    out.n_a = a.len();
                    out.n_b = b.len();
                    match wedges_at(&frame, &a, &b) {
                        Err(e) => out.error = Some(e.to_string()),
                        Ok(ws) => {
                            out.n_wedges = ws.len();
                            out.acute = ws.iter().filter(|w| w.case == BisectorCase::Acute).count();
                            out.obtuse = ws.len() - out.acute;
                            let r: Result<Vec<f64>> = ws
                                .iter()
                                .map(|w| residual_on(s, complex, edge, &arcs[edge], arc, &frame, w))
                                .collect();
                            out.residual = r.ok().map(|v| v.into_iter().fold(0.0, f64::max));
                        }
                    }
                }
            }
            out
        })
        .collect()
}
