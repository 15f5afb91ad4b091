use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use super::random::random_polygon_pair;
use super::{CheckName, FocalDesc, SceneKind, SceneSpec};
use crate::equidistant::{extract_equidistant, sample_wedges, EquidistantComplex, NodeKind, SignedField, WedgeSample};
use crate::error::{Error, Result};
use crate::geom::{polygon_distance, Vec2};
use crate::measure::{
    box_counting_dimension, comb_polygons, densify, dyadic_scales, koch_dimension, koch_scene,
    polygon_pair_contour, DimensionEstimate, MIN_POINTS,
};
use crate::metric::{
    directions_at, one_sided_derivative, trace_shortest_path, DistanceField, Domain, FocalItem, FocalSet,
};
use crate::metric_lab::{line_equidistant, Root};
use crate::surface::generators::{flat_disk, flat_rect};
use crate::surface::{load_surface, validate_alexandrov, SurfaceDescriptor, SurfacePoint, TriSurface, ValidationReport, TOL_ANGLE};
use crate::topology::{
    cycle_rank, homology_bound_check, minimal_separating_check, one_manifold_check, side_labeling, surface_h1_z2,
    SideLabeling, Verdict,
};

/// Overrides applied on top of a scene file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub resolution: Option<f64>,
    pub checks: Option<Vec<CheckName>>,
    pub seed: Option<u64>,
    pub require_cbb: bool,
}

impl RunOptions {
    /// The scene as it will actually run.
    pub fn apply(&self, spec: &SceneSpec) -> SceneSpec {
        let mut spec = spec.clone();
        if let Some(h) = self.resolution {
            spec.resolution = h;
        }
        if let Some(c) = &self.checks {
            spec.checks = Some(c.clone());
        }
        if let (Some(s), SceneKind::PlanarRandom { seed, .. }) = (self.seed, &mut spec.scene) {
            *seed = s;
        }
        spec
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurfaceSummary {
    pub vertices: usize,
    pub faces: usize,
    pub edges: usize,
    pub euler_characteristic: i64,
    pub closed: bool,
    pub mean_edge_length: f64,
    pub validation: ValidationReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtractionStats {
    pub nodes: usize,
    pub edges: usize,
    pub components: usize,
    pub beta1: i64,
    pub length: f64,
    /// Degree of every junction node, in node order.
    pub junction_degrees: Vec<usize>,
    pub degree_histogram: BTreeMap<usize, usize>,
    pub window_nodes: usize,
    pub loops: usize,
    pub separation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionReport {
    pub source: String,
    pub estimate: DimensionEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SceneReport {
    pub scene: String,
    pub schema_version: u32,
    pub spec_hash: String,
    pub resolution: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extraction: Option<ExtractionStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<Vec<Root>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub dimension: Vec<DimensionReport>,
    pub checks: Vec<Verdict>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SceneReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn verdict(&self, check: &str) -> Option<&Verdict> {
        self.checks.iter().find(|v| v.check == check)
    }
}

/// Everything a run produces; only `report` is deterministic output.
#[derive(Clone, Debug)]
pub struct SceneOutput {
    pub report: SceneReport,
    /// Embedded polylines of the extracted complex.
    pub polylines: Vec<Vec<[f64; 3]>>,
    /// Grid sign-change points of planar scenes.
    pub points: Vec<[f64; 2]>,
    /// Planar focal sets for drawing: polygons, or single points.
    pub focal: [Vec<Vec<[f64; 2]>>; 2],
    /// Wall-clock seconds per stage.
    pub timings: Vec<(String, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Window {
    Disk(f64),
    Rect(f64, f64),
}

impl Window {
    fn contains(self, p: Vec2) -> bool {
        match self {
            Window::Disk(r) => p.norm() < r,
            Window::Rect(w, h) => p.x.abs() < w / 2.0 && p.y.abs() < h / 2.0,
        }
    }

    fn half_extent(self) -> Vec2 {
        match self {
            Window::Disk(r) => Vec2::new(r, r),
            Window::Rect(w, h) => Vec2::new(w / 2.0, h / 2.0),
        }
    }

    fn boundary(self, spacing: f64) -> Vec<Vec2> {
        match self {
            Window::Disk(r) => {
                let n = ((2.0 * std::f64::consts::PI * r / spacing).ceil() as usize).max(16);
                (0..n)
                    .map(|k| Vec2::from_angle(2.0 * std::f64::consts::PI * k as f64 / n as f64) * r)
                    .collect()
            }
            Window::Rect(w, h) => {
                let c = [
                    Vec2::new(-w / 2.0, -h / 2.0),
                    Vec2::new(w / 2.0, -h / 2.0),
                    Vec2::new(w / 2.0, h / 2.0),
                    Vec2::new(-w / 2.0, h / 2.0),
                ];
                let mut out = Vec::new();
                for k in 0..4 {
                    let (a, b) = (c[k], c[(k + 1) % 4]);
                    let n = ((b - a).norm() / spacing).ceil().max(1.0) as usize;
                    out.extend((0..n).map(|i| a.lerp(b, i as f64 / n as f64)));
                }
                out
            }
        }
    }
}

struct Prepared {
    surface: TriSurface,
    a: Vec<FocalItem>,
    b: Vec<FocalItem>,
    window: Option<Window>,
    steiner: usize,
}

fn resolve(s: &TriSurface, d: &FocalDesc) -> Result<FocalItem> {
    Ok(match d {
        FocalDesc::Point { at, sheet } => {
            let w = match at.as_slice() {
                [x, y] => [*x, *y, 0.0],
                [x, y, z] => [*x, *y, *z],
                _ => return Err(Error::Scene(format!("point needs 2 or 3 coordinates, got {}", at.len()))),
            };
            FocalItem::Point(s.locate(w, *sheet)?)
        }
        FocalDesc::Vertex { index } => {
            if *index as usize >= s.n_vertices() {
                return Err(Error::Scene(format!("vertex {index} out of range")));
            }
            FocalItem::Point(SurfacePoint::Vertex(*index))
        }
        FocalDesc::Polygon { vertices } => {
            if s.positions().is_none() || s.period().is_some() {
                return Err(Error::Scene("polygons need a planar surface".into()));
            }
            FocalItem::Polygon(vertices.iter().map(|v| Vec2::new(v[0], v[1])).collect())
        }
        FocalDesc::Faces { faces } => {
            if let Some(f) = faces.iter().find(|&&f| f as usize >= s.n_faces()) {
                return Err(Error::Scene(format!("face {f} out of range")));
            }
            FocalItem::Faces(faces.clone())
        }
    })
}

fn window_of(desc: &SurfaceDescriptor) -> Option<Window> {
    match desc {
        SurfaceDescriptor::FlatDisk { radius } => Some(Window::Disk(*radius)),
        SurfaceDescriptor::FlatRect { width, height } => Some(Window::Rect(*width, *height)),
        _ => None,
    }
}

fn polygon_items(p: Vec<Vec2>) -> Vec<FocalItem> {
    vec![FocalItem::Polygon(p)]
}

/// Comb polygons centred in their window.
fn comb_setup(teeth: usize, gap: f64) -> Result<(Vec<Vec2>, Vec<Vec2>, Window)> {
    let (a, b) = comb_polygons(teeth, gap)?;
    let width = teeth as f64 * 3.0 * gap + 1.5 * gap;
    let height = 7.0 * gap;
    let margin = 3.0 * gap;
    let shift = Vec2::new(-width / 2.0, -height / 2.0);
    let mv = |p: &Vec<Vec2>| p.iter().map(|&q| q + shift).collect::<Vec<_>>();
    Ok((mv(&a), mv(&b), Window::Rect(width + 2.0 * margin, height + 2.0 * margin)))
}

fn prepare(spec: &SceneSpec) -> Result<Prepared> {
    let h = spec.resolution;
    match &spec.scene {
        SceneKind::Surface { surface, a, b, steiner } => {
            let s = load_surface(surface, h)?;
            let a = a.iter().map(|d| resolve(&s, d)).collect::<Result<Vec<_>>>()?;
            let b = b.iter().map(|d| resolve(&s, d)).collect::<Result<Vec<_>>>()?;
            Ok(Prepared {
                window: window_of(surface),
                surface: s,
                a,
                b,
                steiner: *steiner,
            })
        }
        SceneKind::PlanarRandom { seed, index } => {
            let (a, b) = random_polygon_pair(*seed, *index);
            Ok(Prepared {
                surface: flat_disk(2.0, h)?,
                a: polygon_items(a),
                b: polygon_items(b),
                window: Some(Window::Disk(2.0)),
                steiner: crate::metric::DEFAULT_STEINER,
            })
        }
        SceneKind::Comb { teeth, gap, .. } => {
            let (a, b, w) = comb_setup(*teeth, *gap)?;
            let Window::Rect(ww, wh) = w else { unreachable!() };
            Ok(Prepared {
                surface: flat_rect(ww, wh, h)?,
                a: polygon_items(a),
                b: polygon_items(b),
                window: Some(w),
                steiner: crate::metric::DEFAULT_STEINER,
            })
        }
        _ => Err(Error::Scene("scene has no surface".into())),
    }
}

fn focal_xy(s: &TriSurface, items: &[FocalItem]) -> Vec<Vec<[f64; 2]>> {
    items
        .iter()
        .filter_map(|it| match it {
            FocalItem::Point(p) => s.embed(p).map(|w| vec![[w[0], w[1]]]),
            FocalItem::Polygon(p) => Some(p.iter().map(|q| [q.x, q.y]).collect()),
            FocalItem::Faces(_) => None,
        })
        .collect()
}

fn empty_report(spec: &SceneSpec) -> SceneReport {
    SceneReport {
        scene: spec.id.clone(),
        schema_version: spec.version,
        spec_hash: spec.hash(),
        resolution: spec.resolution,
        surface: None,
        extraction: None,
        line: None,
        dimension: Vec::new(),
        checks: Vec::new(),
        pass: true,
        error: None,
    }
}

struct Timer(Instant, Vec<(String, f64)>);

impl Timer {
    fn lap(&mut self, name: &str) {
        let now = Instant::now();
        self.1.push((name.to_string(), (now - self.0).as_secs_f64()));
        self.0 = now;
    }
}

/// Runs a scene end to end. `Err` means the scene could not be run at all;
/// failed checks are reported in the returned report.
pub fn run_scene(spec: &SceneSpec, opts: &RunOptions) -> Result<SceneOutput> {
    let spec = opts.apply(spec);
    spec.check()?;
    let mut out = SceneOutput {
        report: empty_report(&spec),
        polylines: Vec::new(),
        points: Vec::new(),
        focal: [Vec::new(), Vec::new()],
        timings: Vec::new(),
    };
    let mut timer = Timer(Instant::now(), Vec::new());
    let checks = spec.checks();
    match &spec.scene {
        SceneKind::Line { metric, p, q, lo, hi, step } => {
            out.report.line = Some(line_equidistant(*metric, *p, *q, *lo, *hi, *step)?);
            timer.lap("line");
        }
        SceneKind::Koch { level, grid, swapped } => {
            let k = koch_scene(*level, *grid, *swapped)?;
            timer.lap("grid");
            let est = koch_dimension(&k)?;
            timer.lap("dimension");
            if checks.contains(&CheckName::Dimension) {
                out.report.checks.push(koch_verdict(*level, &est));
            }
            out.report.dimension.push(DimensionReport {
                source: "grid".into(),
                estimate: est,
            });
            out.points = k.points;
            out.focal[0] = vec![k.polygon.iter().map(|p| [p.x, p.y]).collect()];
        }
        SceneKind::Comb { teeth, gap, extract, grid } => {
            let (a, b, w) = comb_setup(*teeth, *gap)?;
            let pts = densify(&polygon_pair_contour(&a, &b, 3.0 * gap, *grid), MIN_POINTS);
            timer.lap("grid");
            let cell = {
                let e = w.half_extent();
                2.0 * e.x.max(e.y) / *grid as f64
            };
            let (full, windowed) = comb_dimension(&pts, *gap, cell)?;
            timer.lap("dimension");
            out.points = pts;
            out.focal = [
                vec![a.iter().map(|p| [p.x, p.y]).collect()],
                vec![b.iter().map(|p| [p.x, p.y]).collect()],
            ];
            out.report.dimension.push(DimensionReport {
                source: "grid".into(),
                estimate: full,
            });
            out.report.dimension.push(DimensionReport {
                source: "grid_windowed".into(),
                estimate: windowed.clone(),
            });
            if *extract {
                surface_pipeline(&spec, opts, &checks, &mut out, &mut timer)?;
            } else if checks.contains(&CheckName::Dimension) {
                out.report.checks.push(dimension_verdict("grid_windowed", &windowed, 1.0, 0.05));
            }
        }
        SceneKind::Surface { .. } | SceneKind::PlanarRandom { .. } => {
            surface_pipeline(&spec, opts, &checks, &mut out, &mut timer)?;
        }
    }
    for v in &mut out.report.checks {
        v.scene = spec.id.clone();
    }
    out.report.pass = out.report.error.is_none() && out.report.checks.iter().all(|v| v.pass || v.inconclusive);
    out.timings = timer.1;
    Ok(out)
}

/// Slope tolerance for Koch curves of level 6 and above.
pub const KOCH_TOL: f64 = 0.04;

fn koch_verdict(level: u32, est: &DimensionEstimate) -> Verdict {
    match level {
        0 => dimension_verdict("grid", est, 1.0, 0.03),
        6.. => dimension_verdict("grid", est, 4f64.ln() / 3f64.ln(), KOCH_TOL),
        _ => Verdict::inconclusive(
            "dimension",
            json!({ "slope": est.slope }),
            "only levels 0 and 6 and above carry a tolerance",
        ),
    }
}

fn dimension_verdict(source: &str, est: &DimensionEstimate, expected: f64, tol: f64) -> Verdict {
    Verdict::new(
        "dimension",
        (est.slope - expected).abs() <= tol,
        json!({ "source": source, "slope": est.slope, "residual": est.residual, "ci": est.ci_half_width }),
        json!({ "expected": expected, "tolerance": tol }),
    )
}

/// Full-range estimate and the refit restricted to scales below half the gap.
fn comb_dimension(pts: &[[f64; 2]], gap: f64, cell: f64) -> Result<(DimensionEstimate, DimensionEstimate)> {
    let ext = planar_extent(pts);
    let finest = (gap / 64.0).max(2.0 * cell);
    let mut n = 8;
    while ext / 4.0 / 2f64.powi(n as i32) >= finest {
        n += 1;
    }
    let full = box_counting_dimension(pts, &dyadic_scales(ext / 4.0, n))?;
    let windowed = full.refit(finest, gap / 2.0)?;
    Ok((full, windowed))
}

fn planar_extent(pts: &[[f64; 2]]) -> f64 {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (hi[0] - lo[0]).max(hi[1] - lo[1])
}

fn surface_pipeline(
    spec: &SceneSpec,
    opts: &RunOptions,
    checks: &[CheckName],
    out: &mut SceneOutput,
    timer: &mut Timer,
) -> Result<()> {
    let h = spec.resolution;
    let prep = prepare(spec)?;
    let s = &prep.surface;
    let validation = validate_alexandrov(s, TOL_ANGLE);
    out.report.surface = Some(SurfaceSummary {
        vertices: s.n_vertices(),
        faces: s.n_faces(),
        edges: s.n_edges(),
        euler_characteristic: s.euler_characteristic(),
        closed: s.is_closed(),
        mean_edge_length: s.mean_edge_length(),
        validation: validation.clone(),
    });
    out.focal = [focal_xy(s, &prep.a), focal_xy(s, &prep.b)];
    timer.lap("surface");
    if opts.require_cbb && !validation.pass {
        out.report.error = Some(format!(
            "surface fails the curvature check at {} vertices (max angle {:.6})",
            validation.failures.len(),
            validation.max_interior_angle
        ));
        return Ok(());
    }

    let Prepared {
        surface, a, b, window, steiner, ..
    } = prep;
    let domain = Arc::new(Domain::new(Arc::new(surface), steiner));
    let (fa, fb) = rayon::join(
        || DistanceField::compute(domain.clone(), FocalSet::new(a)?),
        || DistanceField::compute(domain.clone(), FocalSet::new(b)?),
    );
    let sf = SignedField::new(Arc::new(fa?), Arc::new(fb?))?;
    timer.lap("fields");
    let c = extract_equidistant(&sf)?;
    timer.lap("extract");
    let s = sf.surface();
    let topo = cycle_rank(&c);
    out.report.extraction = Some(ExtractionStats {
        nodes: topo.v,
        edges: topo.eg,
        components: topo.c,
        beta1: topo.beta1,
        length: c.length(),
        junction_degrees: c
            .nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Junction)
            .map(|n| n.degree)
            .collect(),
        degree_histogram: topo.degree_histogram.clone(),
        window_nodes: topo.window_nodes,
        loops: c.count(NodeKind::LoopMarker),
        separation: sf.separation(),
    });
    out.polylines = c.embedded_polylines(s);

    let mut labeling: Option<SideLabeling> = None;
    let mut lab = |sf: &SignedField, c: &EquidistantComplex| labeling.get_or_insert_with(|| side_labeling(sf, c)).clone();
    let mut wedge_cache: Option<Vec<WedgeSample>> = None;
    let spacing = c.length() / (220 + 2 * c.edges.len()) as f64;
    let closed = s.is_closed();

    for &check in checks {
        let v = match check {
            CheckName::Length => {
                let len = c.length();
                Verdict::new(
                    "length",
                    len > 0.0 && len.is_finite(),
                    json!(len),
                    json!({ "lower": 0.0, "finite": true }),
                )
            }
            CheckName::HomologyBound => {
                if !closed {
                    Verdict::inconclusive("homology_bound", json!(null), "scene is not a closed surface")
                } else {
                    homology_bound_check(&topo, surface_h1_z2(s)?, &lab(&sf, &c))
                }
            }
            CheckName::MinimalSeparating => {
                if !closed {
                    Verdict::inconclusive("minimal_separating", json!(null), "scene is not a closed surface")
                } else {
                    minimal_separating_check(&sf, &c, &lab(&sf, &c))
                }
            }
            CheckName::OneManifold => match window {
                Some(_) => one_manifold_check(s, &c),
                None => Verdict::inconclusive("one_manifold", json!(null), "scene is not a planar window"),
            },
            CheckName::GridCrossCheck => match window {
                Some(w) => grid_cross_check(&sf, &c, w, h, &lab(&sf, &c)),
                None => Verdict::inconclusive("grid_cross_check", json!(null), "scene is not a planar window"),
            },
            CheckName::Wedges => {
                let ws = wedge_cache.get_or_insert_with(|| sample_wedges(&sf, &c, spacing));
                wedge_verdict(s, ws)
            }
            CheckName::Bisector => {
                let ws = wedge_cache.get_or_insert_with(|| sample_wedges(&sf, &c, spacing));
                bisector_verdict(ws)
            }
            CheckName::StrictSides => strict_sides_check(&sf, &c, h),
            CheckName::Relabel => {
                let d = extract_equidistant(&sf.swapped())?;
                Verdict::new(
                    "relabel",
                    d == c,
                    json!({ "edges": d.edges.len(), "nodes": d.nodes.len(), "length": d.length() }),
                    json!({ "edges": c.edges.len(), "nodes": c.nodes.len(), "length": c.length() }),
                )
            }
            CheckName::Derivative => derivative_check(&sf, &c, h, window.is_some()),
            CheckName::Dimension => match window {
                Some(_) => {
                    let polys: Vec<Vec<[f64; 2]>> = out
                        .polylines
                        .iter()
                        .map(|p| p.iter().map(|w| [w[0], w[1]]).collect())
                        .collect();
                    let pts = densify(&polys, MIN_POINTS);
                    let ext = planar_extent(&pts);
                    // the window runs from the focal gap down to below the mesh
                    let (lo, hi) = (h / 4.0, (sf.separation() / 2.0).min(ext / 8.0));
                    let mut n = 8;
                    while ext / 4.0 / 2f64.powi(n as i32 - 1) > lo.min(ext / 100.0) {
                        n += 1;
                    }
                    let est = box_counting_dimension(&pts, &dyadic_scales(ext / 4.0, n))?;
                    let win = est.refit(lo, hi)?;
                    let v = dimension_verdict("extracted_windowed", &win, 1.0, 0.05);
                    out.report.dimension.push(DimensionReport {
                        source: "extracted".into(),
                        estimate: est,
                    });
                    out.report.dimension.push(DimensionReport {
                        source: "extracted_windowed".into(),
                        estimate: win,
                    });
                    v
                }
                None => Verdict::inconclusive("dimension", json!(null), "scene is not planar"),
            },
        };
        out.report.checks.push(v);
        timer.lap(check.as_str());
    }
    Ok(())
}

fn median(v: &mut [f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Minimum number of analysed points for the wedge check.
pub const MIN_WEDGE_SAMPLES: usize = 200;

/// Median residual bound for the bisector check.
pub const BISECTOR_TOL: f64 = 0.05;

fn wedge_verdict(s: &TriSurface, ws: &[WedgeSample]) -> Verdict {
    let analysed: Vec<&WedgeSample> = ws.iter().filter(|w| w.error.is_none()).collect();
    let odd_at: Vec<_> = analysed
        .iter()
        .filter(|w| w.n_wedges % 2 == 1)
        .map(|w| json!({ "edge": w.edge, "arc": w.arc, "at": s.embed(&w.point), "n_a": w.n_a, "n_b": w.n_b }))
        .collect();
    let odd = odd_at.len();
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for w in &analysed {
        *hist.entry(w.n_wedges).or_default() += 1;
    }
    Verdict::new(
        "wedges",
        analysed.len() >= MIN_WEDGE_SAMPLES && odd == 0,
        json!({ "sampled": ws.len(), "analysed": analysed.len(), "odd": odd, "counts": hist, "odd_at": &odd_at[..odd.min(8)] }),
        json!({ "min_samples": MIN_WEDGE_SAMPLES, "parity": "even" }),
    )
}

fn bisector_verdict(ws: &[WedgeSample]) -> Verdict {
    let mut r: Vec<f64> = ws.iter().filter_map(|w| w.residual).collect();
    let n = r.len();
    match median(&mut r) {
        None => Verdict::inconclusive("bisector", json!({ "residuals": 0 }), "no residual could be measured"),
        Some(m) => Verdict::new(
            "bisector",
            m < BISECTOR_TOL,
            json!({ "median": m, "p90": r[(n * 9) / 10], "max": r[n - 1], "residuals": n }),
            json!({ "median_below": BISECTOR_TOL }),
        ),
    }
}

/// Along a shortest path from a point of `E` to `A`, points further than
/// `2h` from the start are strictly closer to `A` than to `B`; likewise for
/// `B`.
fn strict_sides_check(sf: &SignedField, c: &EquidistantComplex, h: f64) -> Verdict {
    let s = sf.surface();
    let samples = c.sample_points(s, c.length() / 24.0);
    let (mut paths, mut probes, mut violations, mut failures) = (0usize, 0usize, 0usize, 0usize);
    let mut worst = f64::NEG_INFINITY;
    for (_, _, p) in &samples {
        for (field, sign) in [(sf.field_a(), 1.0), (sf.field_b(), -1.0)] {
            let Ok(path) = trace_shortest_path(field, p) else {
                failures += 1;
                continue;
            };
            paths += 1;
            for (q, &t) in path.points.iter().zip(&path.arclength) {
                if t <= 2.0 * h {
                    continue;
                }
                probes += 1;
                // negative on the side being approached
                let f = sign * (sf.field_a().eval(q) - sf.field_b().eval(q));
                worst = worst.max(f);
                if f >= 0.0 {
                    violations += 1;
                }
            }
        }
    }
    let pass = violations == 0 && paths > 0 && failures == 0;
    Verdict::new(
        "strict_sides",
        pass,
        json!({ "paths": paths, "probes": probes, "violations": violations, "trace_failures": failures, "worst": worst }),
        json!({ "band": 2.0 * h, "strict": true }),
    )
}

/// Relative angles at which the one-sided derivative is probed.
pub const DERIVATIVE_ANGLES: [f64; 5] = [
    0.0,
    std::f64::consts::FRAC_PI_4,
    std::f64::consts::FRAC_PI_2,
    2.0 * std::f64::consts::FRAC_PI_3,
    std::f64::consts::PI,
];

fn derivative_check(sf: &SignedField, c: &EquidistantComplex, h: f64, flat: bool) -> Verdict {
    if !flat {
        return Verdict::inconclusive("derivative", json!(null), "scene is not flat");
    }
    let s = sf.surface();
    let samples = c.sample_points(s, c.length() / 8.0);
    let Some((_, _, p)) = samples.get(samples.len() / 2) else {
        return Verdict::inconclusive("derivative", json!(null), "no sample point");
    };
    let (a, _, frame) = match directions_at(sf.field_a(), sf.field_b(), p) {
        Ok(x) => x,
        Err(e) => return Verdict::inconclusive("derivative", json!(null), &e.to_string()),
    };
    let base = a.directions[0].angle;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for phi in DERIVATIVE_ANGLES {
        let angle = (base + phi).rem_euclid(frame.total);
        match one_sided_derivative(sf.field_a(), p, angle, &[4.0 * h, 2.0 * h]) {
            Ok(d) => {
                worst = worst.max((d.estimate - d.predicted).abs());
                rows.push(json!({ "angle": phi, "estimate": d.estimate, "predicted": d.predicted, "angle_min": d.angle_min }));
            }
            Err(e) => return Verdict::inconclusive("derivative", json!(rows), &e.to_string()),
        }
    }
    Verdict::new(
        "derivative",
        worst < 0.05,
        json!({ "worst": worst, "probes": rows }),
        json!({ "tolerance": 0.05 }),
    )
}

fn planar_distance(item: &FocalItem, s: &TriSurface, p: Vec2) -> f64 {
    match item {
        FocalItem::Point(q) => s.embed(q).map_or(f64::INFINITY, |w| p.dist(Vec2::new(w[0], w[1]))),
        FocalItem::Polygon(poly) => polygon_distance(p, poly),
        FocalItem::Faces(_) => f64::INFINITY,
    }
}

/// Sign analysis of `d(·,A) − d(·,B)` with straight-line distances on a
/// grid of cells of side `h/2` inside the window, compared with the
/// extracted complex: side components against `ℓ_A`, `ℓ_B`, and sign
/// changes along the window boundary against window nodes.
fn grid_cross_check(sf: &SignedField, c: &EquidistantComplex, w: Window, h: f64, lab: &SideLabeling) -> Verdict {
    use rayon::prelude::*;
    let s = sf.surface();
    let (ia, ib) = (&sf.field_a().focal().items, &sf.field_b().focal().items);
    let f = |p: Vec2| {
        let da = ia.iter().map(|i| planar_distance(i, s, p)).fold(f64::INFINITY, f64::min);
        let db = ib.iter().map(|i| planar_distance(i, s, p)).fold(f64::INFINITY, f64::min);
        da - db
    };
    let e = w.half_extent();
    let cell = h / 2.0;
    let (nx, ny) = ((2.0 * e.x / cell).ceil() as usize, (2.0 * e.y / cell).ceil() as usize);
    // 0 outside, 1 A side, 2 B side
    let grid: Vec<u8> = (0..nx * ny)
        .into_par_iter()
        .map(|k| {
            let p = Vec2::new(-e.x + (k % nx) as f64 * cell + cell / 2.0, -e.y + (k / nx) as f64 * cell + cell / 2.0);
            if !w.contains(p) {
                0
            } else if f(p) < 0.0 {
                1
            } else {
                2
            }
        })
        .collect();
    let mut uf = crate::topology::UnionFind::new(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            if grid[k] == 0 {
                continue;
            }
            if i + 1 < nx && grid[k + 1] == grid[k] {
                uf.union(k, k + 1);
            }
            if j + 1 < ny && grid[k + nx] == grid[k] {
                uf.union(k, k + nx);
            }
        }
    }
    let (mut ga, mut gb) = (0, 0);
    for k in 0..nx * ny {
        if grid[k] != 0 && uf.find(k) == k {
            if grid[k] == 1 {
                ga += 1;
            } else {
                gb += 1;
            }
        }
    }
    let ring: Vec<bool> = w.boundary(h / 4.0).into_iter().map(|p| f(p) < 0.0).collect();
    let changes = (0..ring.len()).filter(|&k| ring[k] != ring[(k + 1) % ring.len()]).count();
    let windows = c.count(NodeKind::WindowClipped);
    let pass = ga == lab.l_a && gb == lab.l_b && changes == windows;
    Verdict::new(
        "grid_cross_check",
        pass,
        json!({ "l_a": lab.l_a, "l_b": lab.l_b, "window_nodes": windows }),
        json!({ "grid_a": ga, "grid_b": gb, "boundary_changes": changes, "cell": cell }),
    )
}
