use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use serde::Serialize;

use super::signed::SignedField;
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::surface::{local_distance, LocalChart, SurfacePoint, TriSurface};

/// Required separation of the focal sets, in units of `h`.
pub const MIN_SEPARATION: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Junction,
    WindowClipped,
    LoopMarker,
    /// Dangling end away from the window; never expected on valid scenes.
    Endpoint,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Node {
    pub point: SurfacePoint,
    pub kind: NodeKind,
    pub degree: usize,
}

/// Polyline between two nodes (equal for loops).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polyline {
    pub ends: [usize; 2],
    pub points: Vec<SurfacePoint>,
    pub length: f64,
    /// Faces crossed, one per zero-crossing segment.
    pub faces: Vec<u32>,
}

/// The extracted equidistant set as an embedded graph.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquidistantComplex {
    pub nodes: Vec<Node>,
    pub edges: Vec<Polyline>,
    pub h: f64,
    /// Faces swallowed by junction clusters.
    pub junction_faces: Vec<u32>,
}

impl EquidistantComplex {
    pub fn length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn count(&self, kind: NodeKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }

    /// Points spaced about `spacing` apart along every edge, with the edge
    /// index and arc length. Edge ends are not included.
    pub fn sample_points(&self, s: &TriSurface, spacing: f64) -> Vec<(usize, f64, SurfacePoint)> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            let arc = arclength(s, &e.points, self.h);
            let total = *arc.last().unwrap();
            let n = (total / spacing).floor() as usize;
            for k in 1..=n {
                let t = k as f64 * total / (n + 1) as f64;
                out.push((i, t, point_at(s, &e.points, &arc, t)));
            }
        }
        out
    }

    /// Embedding coordinates of every polyline point.
    pub fn embedded_polylines(&self, s: &TriSurface) -> Vec<Vec<[f64; 3]>> {
        self.edges
            .iter()
            .map(|e| {
                let mut out: Vec<[f64; 3]> = Vec::with_capacity(e.points.len());
                for p in &e.points {
                    if let Some(w) = s.embed(p) {
                        let w = match out.last() {
                            Some(&prev) => s.unwrap_near(w, prev),
                            None => w,
                        };
                        out.push(w);
                    }
                }
                out
            })
            .collect()
    }
}

/// Cumulative intrinsic arc length along a polyline.
pub fn arclength(s: &TriSurface, pts: &[SurfacePoint], h: f64) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(pts.len());
    out.push(0.0);
    for w in pts.windows(2) {
        acc += local_distance(s, &w[0], &w[1], 4.0 * h);
        out.push(acc);
    }
    out
}

/// Point at arc length `t` along a polyline.
pub fn point_at(s: &TriSurface, pts: &[SurfacePoint], arc: &[f64], t: f64) -> SurfacePoint {
    let i = arc.partition_point(|&a| a <= t).clamp(1, pts.len() - 1);
    let (a, b) = (&pts[i - 1], &pts[i]);
    let w = if arc[i] > arc[i - 1] {
        ((t - arc[i - 1]) / (arc[i] - arc[i - 1])).clamp(0.0, 1.0)
    } else {
        0.0
    };
    for f in s.incident_faces(a) {
        if let (Some(pa), Some(pb)) = (s.point_in_face(a, f), s.point_in_face(b, f)) {
            return s.face_point(f, pa.lerp(pb, w), 1e-12);
        }
    }
    if w < 0.5 {
        *a
    } else {
        *b
    }
}

#[derive(Clone, Copy, Debug)]
struct Raw {
    edge: u32,
    point: SurfacePoint,
    window: bool,
}

#[derive(Clone, Copy, Debug)]
struct Segment {
    a: usize,
    b: usize,
    face: u32,
    length: f64,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        // smaller id stays root, keeping clusters independent of merge order
        match a.cmp(&b) {
            Ordering::Less => self.0[b] = a,
            Ordering::Greater => self.0[a] = b,
            Ordering::Equal => {}
        }
    }
}

/// Crossing parameter on an edge, refined by the edge's samples: the middle
/// sign change, linearly interpolated.
fn crossing(sf: &SignedField, s: &TriSurface, e: u32) -> f64 {
    let dom = sf.field_a().domain();
    let ed = s.edge(e);
    let m = dom.steiner();
    let nv = s.n_vertices() as u32;
    let mut ts = Vec::with_capacity(m + 2);
    let mut fs = Vec::with_capacity(m + 2);
    ts.push(0.0);
    fs.push(sf.sign_value(ed.v[0]));
    for k in 0..m {
        ts.push(dom.steiner_t(k));
        fs.push(sf.sign_value(nv + e * m as u32 + k as u32));
    }
    ts.push(1.0);
    fs.push(sf.sign_value(ed.v[1]));
    let changes: Vec<usize> = (0..fs.len() - 1).filter(|&i| (fs[i] < 0.0) != (fs[i + 1] < 0.0)).collect();
    let i = changes[changes.len() / 2];
    let w = fs[i] / (fs[i] - fs[i + 1]);
    (ts[i] + (ts[i + 1] - ts[i]) * w).clamp(1e-12, 1.0 - 1e-12)
}

/// Extracts `{f = 0}` as an embedded graph.
pub fn extract_equidistant(sf: &SignedField) -> Result<EquidistantComplex> {
    let s = sf.surface();
    let dom = sf.field_a().domain();
    let h = dom.h();
    let separation = sf.separation();
    if separation < MIN_SEPARATION * h {
        return Err(Error::SeparationTooSmall {
            separation,
            required: MIN_SEPARATION * h,
        });
    }
    let neg = |v: u32| sf.sign_value(v) < 0.0;

    // crossings, one per edge with differently signed ends
    let mut raw: Vec<Raw> = Vec::new();
    let mut node_of_edge = vec![usize::MAX; s.n_edges()];
    for e in 0..s.n_edges() as u32 {
        let ed = s.edge(e);
        if neg(ed.v[0]) != neg(ed.v[1]) {
            node_of_edge[e as usize] = raw.len();
            raw.push(Raw {
                edge: e,
                point: SurfacePoint::Edge {
                    edge: e,
                    t: crossing(sf, s, e),
                },
                window: ed.is_boundary(),
            });
        }
    }
    let mut segs: Vec<Segment> = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); raw.len()];
    for f in 0..s.n_faces() as u32 {
        let ends: Vec<usize> = s
            .face_edges(f)
            .iter()
            .map(|&e| node_of_edge[e as usize])
            .filter(|&i| i != usize::MAX)
            .collect();
        if ends.len() == 2 {
            let (a, b) = (ends[0].min(ends[1]), ends[0].max(ends[1]));
            let pa = s.point_in_face(&raw[a].point, f).unwrap();
            let pb = s.point_in_face(&raw[b].point, f).unwrap();
            adj[a].push(segs.len());
            adj[b].push(segs.len());
            segs.push(Segment {
                a,
                b,
                face: f,
                length: pa.dist(pb),
            });
        }
    }
    if segs.is_empty() {
        return Err(Error::EmptyComplex);
    }

    let clusters = cluster(s, h, &raw, &segs, &adj, &node_of_edge);
    assemble(s, h, &raw, &segs, clusters)
}

/// Groups crossings into node clusters: crossings within `h/4` of each
/// other, and arcs that pass within one edge length of each other while far
/// apart along the zero set (a resolved junction).
fn cluster(
    s: &TriSurface,
    h: f64,
    raw: &[Raw],
    segs: &[Segment],
    adj: &[Vec<usize>],
    node_of_edge: &[usize],
) -> Vec<usize> {
    let snap = h / 4.0;
    let pass = s.max_edge_length();
    let far = 4.0 * pass;
    let mut dsu = Dsu((0..raw.len()).collect());
    let mut pass_pairs: Vec<(usize, usize)> = Vec::new();
    for u in 0..raw.len() {
        let chart = LocalChart::around(s, &raw[u].point, pass);
        let mut near: Vec<(usize, f64)> = Vec::new();
        for f in chart.faces() {
            for &e in &s.face_edges(f) {
                let v = node_of_edge[e as usize];
                if v == usize::MAX || v <= u {
                    continue;
                }
                let q = chart.place(f, s.point_in_face(&raw[v].point, f).unwrap()).unwrap();
                near.push((v, q.dist(chart.center)));
            }
        }
        near.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        near.dedup_by_key(|x| x.0);
        let mut candidates = Vec::new();
        for (v, d) in near {
            if d < snap {
                dsu.union(u, v);
            } else if d < pass {
                candidates.push(v);
            }
        }
        if !candidates.is_empty() {
            let reach = graph_ball(segs, adj, u, far);
            for v in candidates {
                if !reach.contains_key(&v) {
                    pass_pairs.push((u, v));
                }
            }
        }
    }
    // near passes take the stretch of both arcs around the pass with them
    for (u, v) in pass_pairs {
        for w in [u, v] {
            for &x in graph_ball(segs, adj, w, pass).keys() {
                dsu.union(w, x);
            }
        }
        dsu.union(u, v);
    }
    // absorb crossings whose two neighbours already belong to one cluster
    loop {
        let mut changed = false;
        for x in 0..raw.len() {
            if adj[x].len() != 2 {
                continue;
            }
            let nb: Vec<usize> = adj[x]
                .iter()
                .map(|&i| if segs[i].a == x { segs[i].b } else { segs[i].a })
                .collect();
            let (ra, rb, rx) = (dsu.find(nb[0]), dsu.find(nb[1]), dsu.find(x));
            if ra == rb && ra != rx {
                dsu.union(x, nb[0]);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (0..raw.len()).map(|x| dsu.find(x)).collect()
}

/// Crossings within graph distance `radius` of `start`.
fn graph_ball(segs: &[Segment], adj: &[Vec<usize>], start: usize, radius: f64) -> BTreeMap<usize, f64> {
    #[derive(PartialEq)]
    struct Item(f64, usize);
    impl Eq for Item {}
    impl PartialOrd for Item {
        fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
            Some(self.cmp(o))
        }
    }
    impl Ord for Item {
        fn cmp(&self, o: &Self) -> Ordering {
            o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
        }
    }
    let mut dist: BTreeMap<usize, f64> = BTreeMap::new();
    let mut heap = BinaryHeap::from([Item(0.0, start)]);
    dist.insert(start, 0.0);
    while let Some(Item(d, x)) = heap.pop() {
        if d > dist[&x] {
            continue;
        }
        for &i in &adj[x] {
            let y = if segs[i].a == x { segs[i].b } else { segs[i].a };
            let nd = d + segs[i].length;
            if nd <= radius && dist.get(&y).map_or(true, |&o| nd < o) {
                dist.insert(y, nd);
                heap.push(Item(nd, y));
            }
        }
    }
    dist
}

fn assemble(s: &TriSurface, h: f64, raw: &[Raw], segs: &[Segment], root: Vec<usize>) -> Result<EquidistantComplex> {
    // cluster-level incidences, in segment order
    let mut inc: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut junction_faces = Vec::new();
    for (i, sg) in segs.iter().enumerate() {
        let (ca, cb) = (root[sg.a], root[sg.b]);
        if ca == cb {
            junction_faces.push(sg.face);
            continue;
        }
        inc.entry(ca).or_default().push(i);
        inc.entry(cb).or_default().push(i);
    }
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (x, &r) in root.iter().enumerate() {
        members.entry(r).or_default().push(x);
    }
    let window = |c: usize| members[&c].iter().any(|&x| raw[x].window);
    let degree = |c: usize| inc.get(&c).map_or(0, |v| v.len());
    let special = |c: usize| window(c) || degree(c) != 2;

    let rep = |c: usize| -> SurfacePoint {
        let m = &members[&c];
        if m.len() == 1 || !special(c) || window(c) {
            return raw[m[0]].point;
        }
        let chart = LocalChart::around(s, &raw[m[0]].point, 4.0 * s.max_edge_length());
        let pts: Vec<Vec2> = m.iter().filter_map(|&x| chart.map(s, &raw[x].point)).collect();
        let c = pts.iter().fold(Vec2::new(0.0, 0.0), |a, &p| a + p) * (1.0 / pts.len() as f64);
        chart.locate(s, c).unwrap_or(raw[m[0]].point)
    };

    let mut node_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    for &c in members.keys() {
        if degree(c) == 0 || !special(c) {
            continue;
        }
        let kind = if window(c) {
            NodeKind::WindowClipped
        } else if degree(c) >= 3 {
            NodeKind::Junction
        } else {
            NodeKind::Endpoint
        };
        node_of.insert(c, nodes.len());
        nodes.push(Node {
            point: rep(c),
            kind,
            degree: degree(c),
        });
    }

    let mut used = vec![false; segs.len()];
    let mut edges: Vec<Polyline> = Vec::new();
    let other = |i: usize, c: usize| if root[segs[i].a] == c { root[segs[i].b] } else { root[segs[i].a] };
    let trace = |start: usize, first: usize, used: &mut Vec<bool>, edges: &mut Vec<Polyline>, nodes: &[Node], node_of: &BTreeMap<usize, usize>| {
        let mut points = vec![nodes[node_of[&start]].point];
        let mut faces = Vec::new();
        let (mut c, mut i) = (start, first);
        loop {
            used[i] = true;
            faces.push(segs[i].face);
            let n = other(i, c);
            if let Some(&k) = node_of.get(&n) {
                points.push(nodes[k].point);
                let arc = arclength(s, &points, h);
                edges.push(Polyline {
                    ends: [node_of[&start], k],
                    length: *arc.last().unwrap(),
                    points,
                    faces,
                });
                return;
            }
            points.push(rep(n));
            let next = inc[&n].iter().copied().find(|&j| !used[j]).expect("pass-through cluster has two segments");
            c = n;
            i = next;
        }
    };
    let starts: Vec<usize> = node_of.keys().copied().collect();
    for c in starts {
        for &i in &inc[&c].clone() {
            if !used[i] {
                trace(c, i, &mut used, &mut edges, &nodes, &node_of);
            }
        }
    }
    // remaining segments form closed loops; mark each at its lowest edge id
    loop {
        let mut best: Option<(u32, usize)> = None;
        for (i, sg) in segs.iter().enumerate() {
            if used[i] || root[sg.a] == root[sg.b] {
                continue;
            }
            for c in [root[sg.a], root[sg.b]] {
                let e = members[&c].iter().map(|&x| raw[x].edge).min().unwrap();
                if best.map_or(true, |b| e < b.0) {
                    best = Some((e, c));
                }
            }
        }
        let Some((_, c)) = best else { break };
        node_of.insert(c, nodes.len());
        nodes.push(Node {
            point: rep(c),
            kind: NodeKind::LoopMarker,
            degree: 2,
        });
        let first = inc[&c].iter().copied().find(|&j| !used[j]).unwrap();
        trace(c, first, &mut used, &mut edges, &nodes, &node_of);
    }
    if edges.is_empty() {
        return Err(Error::EmptyComplex);
    }
    junction_faces.sort_unstable();
    junction_faces.dedup();
    Ok(EquidistantComplex {
        nodes,
        edges,
        h,
        junction_faces,
    })
}
