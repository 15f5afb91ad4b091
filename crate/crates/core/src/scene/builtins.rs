use super::{CheckName, FocalDesc, SceneKind, SceneSpec, DEFAULT_RESOLUTION, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::metric::DEFAULT_STEINER;
use crate::metric_lab::LineMetric;
use crate::surface::SurfaceDescriptor;

const NAMES: &[&str] = &[
    "doubled-disk-centers",
    "doubled-disk-three",
    "sphere-antipodal",
    "sphere-square",
    "sphere-one-two",
    "torus-diamond",
    "torus-bands",
    "torus-two-a",
    "disk-two-points",
    "disk-square",
    "disk-polygons",
    "cone-points",
    "sqrt-horn",
    "line-d1",
    "line-d2",
    "line-standard",
    "koch-0",
    "koch-6",
    "koch-6-swapped",
    "comb-pair",
    "comb-coarse",
    "comb-fine",
    "planar-random",
];

pub fn builtin_names() -> &'static [&'static str] {
    NAMES
}

fn pt(at: &[f64]) -> FocalDesc {
    FocalDesc::Point { at: at.to_vec(), sheet: None }
}

fn on_sheet(at: &[f64], sheet: u8) -> FocalDesc {
    FocalDesc::Point {
        at: at.to_vec(),
        sheet: Some(sheet),
    }
}

fn poly(v: &[[f64; 2]]) -> FocalDesc {
    FocalDesc::Polygon { vertices: v.to_vec() }
}

fn surface(surface: SurfaceDescriptor, a: Vec<FocalDesc>, b: Vec<FocalDesc>) -> SceneKind {
    SceneKind::Surface {
        surface,
        a,
        b,
        steiner: DEFAULT_STEINER,
    }
}

fn line(metric: LineMetric, p: f64, q: f64) -> SceneKind {
    SceneKind::Line {
        metric,
        p,
        q,
        lo: -10.0,
        hi: 10.0,
        step: 1e-4,
    }
}

/// Point at geodesic distance `rho` from the apex of the standard cone.
fn cone_point(total_angle: f64, rho: f64, t: f64) -> Vec<f64> {
    let s = total_angle / (2.0 * std::f64::consts::PI);
    vec![rho * s * t.cos(), rho * s * t.sin(), -rho * (1.0 - s * s).sqrt()]
}

fn unit(lat_deg: f64, lon_deg: f64) -> Vec<f64> {
    let (la, lo) = (lat_deg.to_radians(), lon_deg.to_radians());
    vec![la.cos() * lo.cos(), la.cos() * lo.sin(), la.sin()]
}

pub fn builtin(name: &str) -> Result<SceneSpec> {
    use SurfaceDescriptor as S;
    let disk2 = || S::FlatDisk { radius: 2.0 };
    let (description, scene) = match name {
        "doubled-disk-centers" => (
            "centres of the two faces of a doubled unit disk",
            surface(
                S::DoubledDisk { radius: 1.0 },
                vec![on_sheet(&[0.0, 0.0], 0)],
                vec![on_sheet(&[0.0, 0.0], 1)],
            ),
        ),
        "doubled-disk-three" => (
            "one point on the top face against two on the bottom face",
            surface(
                S::DoubledDisk { radius: 1.0 },
                vec![on_sheet(&[0.0, 0.0], 0)],
                vec![on_sheet(&[0.5, 0.0], 1), on_sheet(&[-0.5, 0.0], 1)],
            ),
        ),
        "sphere-antipodal" => (
            "north and south pole of the unit sphere",
            surface(S::Sphere { radius: 1.0 }, vec![pt(&[0.0, 0.0, 1.0])], vec![pt(&[0.0, 0.0, -1.0])]),
        ),
        "sphere-square" => (
            "poles against two antipodal equator points",
            surface(
                S::Sphere { radius: 1.0 },
                vec![pt(&[0.0, 0.0, 1.0]), pt(&[0.0, 0.0, -1.0])],
                vec![pt(&[1.0, 0.0, 0.0]), pt(&[-1.0, 0.0, 0.0])],
            ),
        ),
        "sphere-one-two" => (
            "north pole against two southern points",
            surface(
                S::Sphere { radius: 1.0 },
                vec![pt(&[0.0, 0.0, 1.0])],
                vec![pt(&unit(-20.0, 0.0)), pt(&unit(-20.0, 150.0))],
            ),
        ),
        "torus-diamond" => (
            "square flat torus, points at (0,0) and (1/2,1/2)",
            surface(S::FlatTorus { side: 1.0 }, vec![pt(&[0.0, 0.0])], vec![pt(&[0.5, 0.5])]),
        ),
        "torus-bands" => (
            "square flat torus, points half a period apart along x",
            surface(S::FlatTorus { side: 1.0 }, vec![pt(&[0.1, 0.2])], vec![pt(&[0.6, 0.2])]),
        ),
        "torus-two-a" => (
            "square flat torus, two A points against one B point",
            surface(
                S::FlatTorus { side: 1.0 },
                vec![pt(&[0.1, 0.1]), pt(&[0.55, 0.62])],
                vec![pt(&[0.63, 0.12])],
            ),
        ),
        "disk-two-points" => (
            "points (-1,0) and (1,0) in a disk window of radius 2",
            surface(disk2(), vec![pt(&[-1.0, 0.0])], vec![pt(&[1.0, 0.0])]),
        ),
        "disk-square" => (
            "alternating square corners in a disk window",
            surface(
                disk2(),
                vec![pt(&[1.0, 0.0]), pt(&[-1.0, 0.0])],
                vec![pt(&[0.0, 1.0]), pt(&[0.0, -1.0])],
            ),
        ),
        "disk-polygons" => (
            "a triangle and a square in a disk window",
            surface(
                disk2(),
                vec![poly(&[[-1.3, -0.3], [-0.6, -0.2], [-1.0, 0.45]])],
                vec![poly(&[[0.5, -0.3], [1.1, -0.3], [1.1, 0.3], [0.5, 0.3]])],
            ),
        ),
        "cone-points" => {
            let th = 1.5 * std::f64::consts::PI;
            (
                "two points on a cone of total angle 3pi/2",
                surface(
                    S::Cone { total_angle: th, radius: 1.0 },
                    vec![pt(&cone_point(th, 0.5, 0.0))],
                    vec![pt(&cone_point(th, 0.5, std::f64::consts::PI))],
                ),
            )
        }
        "sqrt-horn" => (
            "surface of revolution of z = sqrt(r); no lower curvature bound",
            surface(
                S::SqrtHorn {},
                vec![pt(&[0.5, 0.0, 0.5f64.sqrt()])],
                vec![pt(&[-0.5, 0.0, 0.5f64.sqrt()])],
            ),
        ),
        "line-d1" => ("p=0, q=4 under |x-y|/(1+|x-y|)", line(LineMetric::BoundedRatio, 0.0, 4.0)),
        "line-d2" => ("p=2, q=-2 under min(|x-y|, 1)", line(LineMetric::Truncated, 2.0, -2.0)),
        "line-standard" => ("p=-1, q=3 under |x-y|", line(LineMetric::Standard, -1.0, 3.0)),
        "koch-0" => (
            "triangle: inside against outside",
            SceneKind::Koch {
                level: 0,
                grid: 4096,
                swapped: false,
            },
        ),
        "koch-6" => (
            "Koch snowflake of level 6: inside against outside",
            SceneKind::Koch {
                level: 6,
                grid: 2048,
                swapped: false,
            },
        ),
        "koch-6-swapped" => (
            "Koch snowflake of level 6 with the sides exchanged",
            SceneKind::Koch {
                level: 6,
                grid: 2048,
                swapped: true,
            },
        ),
        "comb-pair" => (
            "two interlocking combs with two teeth each",
            SceneKind::Comb {
                teeth: 2,
                gap: 0.2,
                extract: true,
                grid: 2048,
            },
        ),
        "comb-coarse" => (
            "interlocking combs, 8 teeth, gap 0.2",
            SceneKind::Comb {
                teeth: 8,
                gap: 0.2,
                extract: true,
                grid: 2048,
            },
        ),
        "comb-fine" => (
            "interlocking combs, 16 teeth, gap 0.05, grid analysis only",
            SceneKind::Comb {
                teeth: 16,
                gap: 0.05,
                extract: false,
                grid: 4096,
            },
        ),
        "planar-random" => (
            "random star-shaped polygons in a disk window",
            SceneKind::PlanarRandom { seed: 0, index: 0 },
        ),
        other => return Err(Error::UnknownScene(other.to_string())),
    };
    // theorem checks assume a lower curvature bound
    // the comb gap must clear the separation guard of 10 mesh edges
    let resolution = if name.starts_with("comb-") { 0.015 } else { DEFAULT_RESOLUTION };
    let checks = (name == "sqrt-horn").then(|| vec![CheckName::Length]);
    Ok(SceneSpec {
        version: SCHEMA_VERSION,
        id: name.to_string(),
        description: description.to_string(),
        resolution,
        checks,
        scene,
    })
}
