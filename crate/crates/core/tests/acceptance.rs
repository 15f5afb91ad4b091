//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one line, pass or fail.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use mediatrix::metric_lab::{line_equidistant, LineMetric, Root};
use mediatrix::scene::{
    builtin, random_polygon_pair, run_scene, run_suite, CheckName, FocalDesc, RunOptions, SceneKind, SceneOutput,
    SceneReport, SceneSpec,
};
use mediatrix::surface::generators::{cone, flat_disk, flat_rect, flat_torus, sphere, sqrt_horn};
use mediatrix::surface::{validate_alexandrov, TOL_ANGLE};
use mediatrix::topology::UnionFind;

const H: f64 = 0.02;
/// log₃ 4 as quoted for the Koch curve.
const KOCH_PAPER: f64 = 1.26186;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn run(spec: &SceneSpec, checks: Option<Vec<CheckName>>) -> SceneOutput {
    let opts = RunOptions {
        checks,
        ..RunOptions::default()
    };
    run_scene(spec, &opts).unwrap()
}

fn passed(r: &SceneReport, check: &str) -> bool {
    r.verdict(check).is_some_and(|v| v.pass)
}

type Focal = (Vec<f64>, u8);
type Criterion = fn() -> Outcome;

fn focal_points(spec: &SceneSpec) -> (Vec<Focal>, Vec<Focal>) {
    let SceneKind::Surface { a, b, .. } = &spec.scene else { panic!("{}", spec.id) };
    let pts = |k: &[FocalDesc]| {
        k.iter()
            .map(|d| match d {
                FocalDesc::Point { at, sheet } => (at.clone(), sheet.unwrap_or(0)),
                other => panic!("{other:?}"),
            })
            .collect()
    };
    (pts(a), pts(b))
}

// ---- geometry oracles, written independently of the library ----

fn seg_dist2(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let l2 = dx * dx + dy * dy;
    let t = if l2 > 0.0 {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (ex, ey) = (p[0] - a[0] - t * dx, p[1] - a[1] - t * dy);
    (ex * ex + ey * ey).sqrt()
}

fn polygon_dist(p: [f64; 2], poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    let mut inside = false;
    let mut d = f64::INFINITY;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        d = d.min(seg_dist2(p, a, b));
        if (a[1] > p[1]) != (b[1] > p[1]) && p[0] < a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]) {
            inside = !inside;
        }
    }
    if inside {
        0.0
    } else {
        d
    }
}

fn dist3(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn seg_dist3(p: [f64; 3], a: [f64; 3], b: [f64; 3]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let l2 = d.iter().map(|x| x * x).sum::<f64>();
    let t = if l2 > 0.0 {
        ((0..3).map(|i| (p[i] - a[i]) * d[i]).sum::<f64>() / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    dist3(p, [a[0] + t * d[0], a[1] + t * d[1], a[2] + t * d[2]])
}

/// Hausdorff distance between the polylines and a sampled curve, with the
/// curve-to-set direction measured against polyline segments.
fn hausdorff_to_curve(
    polylines: &[Vec<[f64; 3]>],
    curve: &[[f64; 3]],
    dist_to_curve: impl Fn([f64; 3]) -> f64,
) -> f64 {
    let out = polylines.iter().flatten().map(|&p| dist_to_curve(p)).fold(0.0, f64::max);
    let back = curve
        .iter()
        .map(|&c| {
            polylines
                .iter()
                .flat_map(|l| l.windows(2))
                .map(|w| seg_dist3(c, w[0], w[1]))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    out.max(back)
}

fn circle(n: usize, z: f64) -> Vec<[f64; 3]> {
    (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            [t.cos(), t.sin(), z]
        })
        .collect()
}

/// Components of the cells marked `Some(sign)`, joined along `links`.
fn regions(labels: &[Option<bool>], links: impl IntoIterator<Item = (usize, usize)>) -> usize {
    let mut uf = UnionFind::new(labels.len());
    for (i, j) in links {
        if let (Some(a), Some(b)) = (labels[i], labels[j]) {
            if a == b {
                uf.union(i, j);
            }
        }
    }
    (0..labels.len()).filter(|&i| labels[i].is_some() && uf.find(i) == i).count()
}

/// Band half-width, in cells, of the thickened equidistant set. With
/// |∇(d_A − d_B)| ≤ 2 the band is at least this many cells wide.
const BAND_CELLS: f64 = 4.0;

fn unit(v: &[f64]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// β₁ of E on the round sphere: E is a graph on a sphere, so
/// β₁ = (complement regions) − 1.
fn sphere_beta1(a: &[[f64; 3]], b: &[[f64; 3]]) -> i64 {
    let (nt, np) = (360, 720);
    let cell = PI / nt as f64;
    let delta = BAND_CELLS * cell;
    let d = |x: [f64; 3], k: &[[f64; 3]]| {
        k.iter()
            .map(|q| (x[0] * q[0] + x[1] * q[1] + x[2] * q[2]).clamp(-1.0, 1.0).acos())
            .fold(f64::INFINITY, f64::min)
    };
    let label = |x: [f64; 3]| {
        let f = d(x, a) - d(x, b);
        (f.abs() > delta).then_some(f < 0.0)
    };
    let mut labels = vec![None; nt * np];
    for i in 0..nt {
        let th = (i as f64 + 0.5) * cell;
        for j in 0..np {
            let ph = (j as f64 + 0.5) * 2.0 * PI / np as f64;
            labels[i * np + j] = label([th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]);
        }
    }
    let mut links = Vec::new();
    for i in 0..nt {
        for j in 0..np {
            links.push((i * np + j, i * np + (j + 1) % np));
            if i + 1 < nt {
                links.push((i * np + j, (i + 1) * np + j));
            }
        }
    }
    // cells around a pole meet there unless the pole lies in the band
    for (row, pole) in [(0, [0.0, 0.0, 1.0]), (nt - 1, [0.0, 0.0, -1.0])] {
        if label(pole).is_some() {
            for j in 1..np {
                links.push((row * np, row * np + j));
            }
        }
    }
    regions(&labels, links) as i64 - 1
}

/// Shortest path between the two sheets of the doubled unit disk.
fn across_seam(x: [f64; 2], p: [f64; 2]) -> f64 {
    let g = |t: f64| {
        let y = [t.cos(), t.sin()];
        (x[0] - y[0]).hypot(x[1] - y[1]) + (p[0] - y[0]).hypot(p[1] - y[1])
    };
    let n = 256;
    let step = 2.0 * PI / n as f64;
    let k = (0..n).min_by(|&i, &j| g(i as f64 * step).total_cmp(&g(j as f64 * step))).unwrap();
    let (mut lo, mut hi) = ((k as f64 - 1.0) * step, (k as f64 + 1.0) * step);
    for _ in 0..60 {
        let (m1, m2) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
        if g(m1) < g(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    g((lo + hi) / 2.0)
}

/// β₁ on the doubled unit disk, which is a topological sphere.
fn doubled_disk_beta1(a: &[([f64; 2], u8)], b: &[([f64; 2], u8)]) -> i64 {
    let n = 400;
    let cell = 2.0 / n as f64;
    let delta = BAND_CELLS * cell;
    let centre = |i: usize| -1.0 + (i as f64 + 0.5) * cell;
    let inside = |i: usize, j: usize| centre(i).hypot(centre(j)) <= 1.0;
    let d = |x: [f64; 2], sheet: u8, k: &[([f64; 2], u8)]| {
        k.iter()
            .map(|&(p, s)| {
                if s == sheet {
                    (x[0] - p[0]).hypot(x[1] - p[1])
                } else {
                    across_seam(x, p)
                }
            })
            .fold(f64::INFINITY, f64::min)
    };
    let id = |s: usize, i: usize, j: usize| (s * n + i) * n + j;
    let mut labels = vec![None; 2 * n * n];
    for s in 0..2 {
        for i in 0..n {
            for j in 0..n {
                if inside(i, j) {
                    let x = [centre(i), centre(j)];
                    let f = d(x, s as u8, a) - d(x, s as u8, b);
                    labels[id(s, i, j)] = (f.abs() > delta).then_some(f < 0.0);
                }
            }
        }
    }
    let mut links = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if !inside(i, j) {
                continue;
            }
            let mut rim = false;
            for (di, dj) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
                let (u, v) = (i as i64 + di, j as i64 + dj);
                if u < 0 || v < 0 || u >= n as i64 || v >= n as i64 || !inside(u as usize, v as usize) {
                    rim = true;
                } else if di + dj > 0 {
                    for s in 0..2 {
                        links.push((id(s, i, j), id(s, u as usize, v as usize)));
                    }
                }
            }
            if rim {
                links.push((id(0, i, j), id(1, i, j)));
            }
        }
    }
    regions(&labels, links) as i64 - 1
}

/// β₁ of E on the unit flat torus from the thickened band N = {|f| ≤ δ} as a
/// union of closed grid cells: β₁ = β₀ − χ.
fn torus_beta1(a: &[[f64; 2]], b: &[[f64; 2]]) -> i64 {
    let n = 512usize;
    let cell = 1.0 / n as f64;
    let delta = BAND_CELLS * cell;
    let wrap = |t: f64| {
        let t = t.rem_euclid(1.0);
        t.min(1.0 - t)
    };
    let d = |x: [f64; 2], k: &[[f64; 2]]| {
        k.iter()
            .map(|p| wrap(x[0] - p[0]).hypot(wrap(x[1] - p[1])))
            .fold(f64::INFINITY, f64::min)
    };
    let mut band = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            let x = [(i as f64 + 0.5) * cell, (j as f64 + 0.5) * cell];
            band[i * n + j] = (d(x, a) - d(x, b)).abs() <= delta;
        }
    }
    let at = |i: usize, j: usize| band[(i % n) * n + j % n];
    let faces = band.iter().filter(|&&x| x).count() as i64;
    let mut verts = 0i64;
    let mut edges = 0i64;
    for i in 0..n {
        for j in 0..n {
            // vertex (i, j) is the lower-left corner of cell (i, j)
            let (im, jm) = ((i + n - 1) % n, (j + n - 1) % n);
            if at(i, j) || at(im, j) || at(i, jm) || at(im, jm) {
                verts += 1;
            }
            // horizontal edge below cell (i, j), vertical edge left of it
            if at(i, j) || at(i, jm) {
                edges += 1;
            }
            if at(i, j) || at(im, j) {
                edges += 1;
            }
        }
    }
    let chi = verts - edges + faces;
    let mut uf = UnionFind::new(n * n);
    for i in 0..n {
        for j in 0..n {
            if !at(i, j) {
                continue;
            }
            for (di, dj) in [(1, 0), (0, 1), (1, 1), (1, n - 1)] {
                let (u, v) = ((i + di) % n, (j + dj) % n);
                if at(u, v) {
                    uf.union(i * n + j, u * n + v);
                }
            }
        }
    }
    let b0 = (0..n * n).filter(|&k| band[k] && uf.find(k) == k).count() as i64;
    b0 - chi
}

fn grid_beta1(spec: &SceneSpec) -> i64 {
    let SceneKind::Surface { surface, .. } = &spec.scene else { panic!() };
    let (a, b) = focal_points(spec);
    let name = serde_json::to_value(surface).unwrap()["generator"].as_str().unwrap().to_string();
    match name.as_str() {
        "sphere" => {
            let u = |k: &[(Vec<f64>, u8)]| k.iter().map(|(p, _)| unit(p)).collect::<Vec<_>>();
            sphere_beta1(&u(&a), &u(&b))
        }
        "flat_torus" => {
            let u = |k: &[(Vec<f64>, u8)]| k.iter().map(|(p, _)| [p[0], p[1]]).collect::<Vec<_>>();
            torus_beta1(&u(&a), &u(&b))
        }
        "doubled_disk" => {
            let u = |k: &[(Vec<f64>, u8)]| k.iter().map(|(p, s)| ([p[0], p[1]], *s)).collect::<Vec<_>>();
            doubled_disk_beta1(&u(&a), &u(&b))
        }
        other => panic!("no grid oracle for {other}"),
    }
}

// ---- criteria ----

fn c1_line_examples() -> Outcome {
    let res = 1e-4;
    let t = Instant::now();
    let d1 = line_equidistant(LineMetric::BoundedRatio, 0.0, 4.0, -10.0, 10.0, res).map_err(|e| e.to_string())?;
    let d1b = line_equidistant(LineMetric::BoundedRatio, -3.5, 1.25, -10.0, 10.0, res).map_err(|e| e.to_string())?;
    let d2 = line_equidistant(LineMetric::Truncated, 2.0, -2.0, -10.0, 10.0, res).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    let point = |r: &[Root], want: f64| matches!(r, [Root::Point { x }] if (x - want).abs() < res);
    ensure(point(&d1, 2.0), format!("d1 p=0 q=4: {d1:?}"))?;
    ensure(point(&d1b, -1.125), format!("d1 p=-3.5 q=1.25: {d1b:?}"))?;
    // (−∞,−3] ∪ [−1,1] ∪ [3,∞) clipped to the window [−10, 10]
    let want = [(-10.0, -3.0), (-1.0, 1.0), (3.0, 10.0)];
    let mut worst: f64 = 0.0;
    ensure(d2.len() == 3, format!("d2: {d2:?}"))?;
    for (r, (lo0, hi0)) in d2.iter().zip(want) {
        let Root::Interval { lo, hi } = *r else { return Err(format!("d2: {r:?}")) };
        worst = worst.max((lo - lo0).abs()).max((hi - hi0).abs());
    }
    ensure(worst < res, format!("d2 endpoint error {worst:e}"))?;
    ensure(secs < 1.0, format!("runtime {secs:.2} s"))?;
    Ok(format!("d2 endpoint error {worst:.1e}, {secs:.3} s"))
}

fn c2_doubled_disk() -> Outcome {
    let t = Instant::now();
    let out = run(&builtin("doubled-disk-centers").unwrap(), None);
    let secs = t.elapsed().as_secs_f64();
    let r = &out.report;
    let e = r.extraction.as_ref().ok_or("no extraction")?;
    let seam = circle(3600, 0.0);
    let hd = hausdorff_to_curve(&out.polylines, &seam, |p| (p[0].hypot(p[1]) - 1.0).hypot(p[2]));
    let rel = (e.length - 2.0 * PI).abs() / (2.0 * PI);
    ensure(hd <= 2.0 * H, format!("hausdorff {hd:.4} > 2h"))?;
    ensure(rel <= 0.03, format!("length {:.4}", e.length))?;
    ensure(e.beta1 == 1, format!("beta1 {}", e.beta1))?;
    ensure(passed(r, "minimal_separating"), "minimal_separating failed")?;
    ensure(secs < 30.0, format!("runtime {secs:.1} s"))?;
    Ok(format!("hausdorff {hd:.4}, length {:.4}, beta1 1, {secs:.1} s", e.length))
}

fn c3_sphere() -> Outcome {
    let out = run(&builtin("sphere-antipodal").unwrap(), None);
    let r = &out.report;
    let e = r.extraction.as_ref().ok_or("no extraction")?;
    let equator = circle(3600, 0.0);
    let hd = hausdorff_to_curve(&out.polylines, &equator, |p| {
        let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        (p[2] / n).asin().abs()
    });
    let rel = (e.length - 2.0 * PI).abs() / (2.0 * PI);
    ensure(hd <= 2.0 * H, format!("hausdorff {hd:.4} > 2h"))?;
    ensure(rel <= 0.03, format!("length {:.4}", e.length))?;
    ensure(e.beta1 == 1, format!("beta1 {}", e.beta1))?;
    let v = r.verdict("homology_bound").ok_or("no homology verdict")?;
    // 1 ≤ β1 ≤ h0(A) + h0(B) + h1(S²) − 1 = 1 + 1 + 0 − 1
    ensure(v.pass && v.bound["lower"] == 1 && v.bound["upper"] == 1, format!("bound {}", v.bound))?;
    Ok(format!("hausdorff {hd:.4}, length {:.4}, 1 <= beta1 = 1 <= 1", e.length))
}

fn c4_homology() -> Outcome {
    let suite = run_suite("homology", &RunOptions::default()).map_err(|e| e.to_string())?;
    let mut lines = Vec::new();
    let mut ok = 0;
    for r in &suite.scenes {
        let spec = builtin(&r.scene).unwrap();
        let oracle = grid_beta1(&spec);
        let beta1 = r.extraction.as_ref().map_or(-1, |e| e.beta1);
        ensure(passed(r, "homology_bound"), format!("{}: homology_bound failed", r.scene))?;
        ensure(beta1 == oracle, format!("{}: beta1 {beta1}, grid oracle {oracle}", r.scene))?;
        ok += 1;
        lines.push(format!("{}={beta1}", r.scene));
    }
    ensure(ok >= 6, format!("only {ok} scenes"))?;
    let multi = suite.scenes.iter().filter(|r| {
        let (a, b) = focal_points(&builtin(&r.scene).unwrap());
        a.len() > 1 || b.len() > 1
    });
    ensure(multi.count() >= 3, "too few multi-component scenes")?;
    Ok(format!("{ok} scenes match the grid oracle: {}", lines.join(" ")))
}

fn c5_planar() -> Outcome {
    let suite = run_suite("planar-bell", &RunOptions::default()).map_err(|e| e.to_string())?;
    ensure(suite.scenes.len() == 20, format!("{} scenes", suite.scenes.len()))?;
    let (n, rad) = (800usize, 2.0);
    let cell = 2.0 * rad / n as f64;
    let centre = |i: usize| -rad + (i as f64 + 0.5) * cell;
    for (i, r) in suite.scenes.iter().enumerate() {
        let (a, b) = random_polygon_pair(0, i as u64);
        let (a, b): (Vec<[f64; 2]>, Vec<[f64; 2]>) =
            (a.iter().map(|p| [p.x, p.y]).collect(), b.iter().map(|p| [p.x, p.y]).collect());
        let f = |x: [f64; 2]| polygon_dist(x, &a) - polygon_dist(x, &b);
        // sign changes along the window circle
        let m = 20_000;
        let signs: Vec<bool> = (0..m)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / m as f64;
                f([rad * t.cos(), rad * t.sin()]) < 0.0
            })
            .collect();
        let changes = (0..m).filter(|&k| signs[k] != signs[(k + 1) % m]).count();
        // complement components away from a band around E
        let delta = BAND_CELLS * cell;
        let mut labels = vec![None; n * n];
        for u in 0..n {
            for v in 0..n {
                let x = [centre(u), centre(v)];
                if x[0].hypot(x[1]) < rad - cell {
                    let g = f(x);
                    labels[u * n + v] = (g.abs() > delta).then_some(g < 0.0);
                }
            }
        }
        let links = (0..n).flat_map(|u| (0..n).flat_map(move |v| [(u, v, u + 1, v), (u, v, u, v + 1)]));
        let links = links.filter(|l| l.2 < n && l.3 < n).map(|(u, v, x, y)| (u * n + v, x * n + y));
        let comps = regions(&labels, links);
        let e = r.extraction.as_ref().ok_or(format!("{}: no extraction", r.scene))?;
        ensure(passed(r, "one_manifold"), format!("{}: one_manifold failed", r.scene))?;
        ensure(passed(r, "grid_cross_check"), format!("{}: grid_cross_check failed", r.scene))?;
        ensure(e.components == 1, format!("{}: {} components", r.scene, e.components))?;
        ensure(comps == 2, format!("{}: grid oracle sees {comps} regions", r.scene))?;
        ensure(
            e.window_nodes == changes,
            format!("{}: {} window nodes, oracle {changes} sign changes", r.scene, e.window_nodes),
        )?;
    }
    Ok("20/20 one-manifold, window nodes and regions match the grid oracle".into())
}

fn c6_bisector() -> Outcome {
    let suite = run_suite("wedges", &RunOptions::default()).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for r in &suite.scenes {
        let v = r.verdict("bisector").ok_or("missing bisector verdict")?;
        let m = v.measured["median"].as_f64().ok_or(format!("{}: no median", r.scene))?;
        ensure(m < 0.05, format!("{}: median {m}", r.scene))?;
        worst = worst.max(m);
    }
    let refine = suite.aggregate.iter().find(|v| v.check == "bisector_refinement").ok_or("no refinement")?;
    ensure(refine.pass, format!("refinement {}", refine.measured))?;
    Ok(format!("largest median {worst:.4} rad over {} scenes, decreasing under h/2", suite.scenes.len()))
}

fn c7_derivative() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for name in ["disk-two-points", "disk-polygons"] {
        let out = run(&builtin(name).unwrap(), Some(vec![CheckName::Derivative]));
        let v = out.report.verdict("derivative").ok_or("no derivative verdict")?;
        for p in v.measured["probes"].as_array().ok_or("no probes")? {
            let (angle, est) = (p["angle_min"].as_f64().unwrap(), p["estimate"].as_f64().unwrap());
            worst = worst.max((est + angle.cos()).abs());
            n += 1;
        }
    }
    ensure(n >= 10, format!("{n} probes"))?;
    ensure(worst < 0.05, format!("worst |FD + cos| {worst:.4}"))?;
    Ok(format!("{n} probes, worst |FD + cos angle| {worst:.4}"))
}

fn c8_dimension() -> Outcome {
    let t = Instant::now();
    let koch = run(&builtin("koch-6").unwrap(), None);
    let secs = t.elapsed().as_secs_f64();
    let slope = koch.report.dimension[0].estimate.slope;
    ensure((KOCH_PAPER - 4f64.ln() / 3f64.ln()).abs() < 1e-5, "paper constant")?;
    ensure((slope - KOCH_PAPER).abs() <= 0.04, format!("koch-6 slope {slope:.4}"))?;
    ensure(secs < 60.0, format!("koch-6 runtime {secs:.1} s"))?;
    let mut worst: f64 = 0.0;
    for name in ["comb-pair", "comb-coarse", "comb-fine", "disk-two-points", "disk-polygons", "koch-0"] {
        let t = Instant::now();
        let out = run(&builtin(name).unwrap(), Some(vec![CheckName::Dimension]));
        let secs = t.elapsed().as_secs_f64();
        ensure(passed(&out.report, "dimension"), format!("{name}: dimension verdict failed"))?;
        let v = out.report.verdict("dimension").unwrap();
        let s = v.measured["slope"].as_f64().ok_or(format!("{name}: no slope"))?;
        ensure((s - 1.0).abs() <= 0.05, format!("{name}: slope {s:.4}"))?;
        ensure(secs < 60.0, format!("{name}: runtime {secs:.1} s"))?;
        worst = worst.max((s - 1.0).abs());
    }
    Ok(format!("koch-6 slope {slope:.4} in {secs:.1} s, disjoint scenes within {worst:.4} of 1"))
}

fn c9_length() -> Outcome {
    // exact lengths of E: chord of the radius-2 window, seam circle, equator,
    // and two meridian circles of the unit torus
    let smooth = [
        ("disk-two-points", 4.0),
        ("doubled-disk-centers", 2.0 * PI),
        ("sphere-antipodal", 2.0 * PI),
        ("torus-bands", 2.0),
    ];
    let mut worst: f64 = 0.0;
    for (name, exact) in smooth {
        let spec = builtin(name).unwrap();
        let mut fine = spec.clone();
        fine.resolution /= 2.0;
        let lc = run(&spec, Some(vec![CheckName::Length])).report.extraction.ok_or("no extraction")?.length;
        let lf = run(&fine, Some(vec![CheckName::Length])).report.extraction.ok_or("no extraction")?.length;
        let rel = (lf - lc).abs() / lc;
        ensure(rel < 0.05, format!("{name}: {lc:.4} -> {lf:.4}"))?;
        ensure((lc - exact).abs() / exact < 0.05, format!("{name}: length {lc:.4}, exact {exact:.4}"))?;
        worst = worst.max(rel);
    }
    let mut n = 0;
    for name in mediatrix::scene::builtin_names() {
        let spec = builtin(name).unwrap();
        if !matches!(spec.scene, SceneKind::Surface { .. } | SceneKind::PlanarRandom { .. }) {
            continue;
        }
        let out = run(&spec, Some(vec![CheckName::Length]));
        let l = out.report.extraction.as_ref().ok_or(format!("{name}: no extraction"))?.length;
        ensure(l > 0.0 && l.is_finite(), format!("{name}: length {l}"))?;
        ensure(passed(&out.report, "length"), format!("{name}: length verdict failed"))?;
        n += 1;
    }
    Ok(format!("{n} complexes with finite positive length, worst h/2 change {:.2}%", 100.0 * worst))
}

fn c10_structure() -> Outcome {
    let names = ["disk-two-points", "doubled-disk-centers", "sphere-antipodal", "disk-square", "torus-diamond", "cone-points"];
    let checks = vec![CheckName::Wedges, CheckName::StrictSides, CheckName::Relabel];
    let mut samples = usize::MAX;
    for name in names {
        let spec = builtin(name).unwrap();
        let a = run(&spec, Some(checks.clone())).report;
        let w = a.verdict("wedges").ok_or("no wedges verdict")?;
        let analysed = w.measured["analysed"].as_u64().unwrap() as usize;
        ensure(w.pass && analysed >= 200, format!("{name}: wedges {}", w.measured))?;
        ensure(passed(&a, "strict_sides"), format!("{name}: strict_sides failed"))?;
        ensure(passed(&a, "relabel"), format!("{name}: relabel failed"))?;
        let b = run(&spec, Some(checks.clone())).report;
        ensure(a.to_json() == b.to_json(), format!("{name}: reports differ between runs"))?;
        samples = samples.min(analysed);
    }
    Ok(format!("{} scenes: even wedges (>= {samples} samples each), strict sides, relabel, byte-identical", names.len()))
}

fn c11_validator() -> Outcome {
    let horn = validate_alexandrov(&sqrt_horn(H).unwrap(), TOL_ANGLE);
    ensure(!horn.pass, "sqrt-horn passed validation")?;
    ensure(horn.failures.iter().any(|f| f.total_angle > 2.0 * PI), "no vertex above 2π")?;
    let good = [
        ("disk", flat_disk(1.0, H).unwrap()),
        ("rect", flat_rect(2.0, 1.0, H).unwrap()),
        ("sphere", sphere(1.0, H).unwrap()),
        ("torus", flat_torus(1.0, H).unwrap()),
        ("cone-pi", cone(PI, 1.0, H).unwrap()),
        ("cone-1.5pi", cone(1.5 * PI, 1.0, H).unwrap()),
        ("cone-2pi", cone(2.0 * PI, 1.0, H).unwrap()),
    ];
    for (name, s) in &good {
        ensure(validate_alexandrov(s, TOL_ANGLE).pass, format!("{name} failed validation"))?;
    }
    Ok(format!(
        "sqrt-horn fails at {} vertices (max {:.4} rad), {} CBB surfaces pass",
        horn.failures.len(),
        horn.max_interior_angle,
        good.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 11] = [
        ("line examples", c1_line_examples),
        ("doubled disk", c2_doubled_disk),
        ("sphere antipodal", c3_sphere),
        ("homology bound", c4_homology),
        ("planar 1-manifold", c5_planar),
        ("bisector", c6_bisector),
        ("one-sided derivative", c7_derivative),
        ("box-counting dimension", c8_dimension),
        ("length", c9_length),
        ("structural invariants", c10_structure),
        ("validator", c11_validator),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {:>2} PASS  {name:<24} {detail} [{secs:.1} s]", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name:<24} {why} [{secs:.1} s]", k + 1)
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
