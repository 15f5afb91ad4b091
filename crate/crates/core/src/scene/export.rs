use std::fmt::Write as _;

use super::pipeline::{DimensionReport, SceneOutput};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExportFormat {
    Svg,
    Obj,
    Csv,
}

impl ExportFormat {
    pub fn parse(s: &str) -> Result<ExportFormat> {
        match s {
            "svg" => Ok(ExportFormat::Svg),
            "obj" => Ok(ExportFormat::Obj),
            "csv" => Ok(ExportFormat::Csv),
            _ => Err(Error::Scene(format!("unknown export format `{s}`"))),
        }
    }

    pub fn file_name(self) -> &'static str {
        match self {
            ExportFormat::Svg => "complex.svg",
            ExportFormat::Obj => "complex.obj",
            ExportFormat::Csv => "boxcount.csv",
        }
    }

    pub fn render(self, out: &SceneOutput) -> String {
        match self {
            ExportFormat::Svg => complex_svg(out),
            ExportFormat::Obj => complex_obj(&out.polylines),
            ExportFormat::Csv => boxcount_csv(&out.report.dimension),
        }
    }
}

const SIZE: f64 = 800.0;

/// Top view (x, y) of the complex, the focal sets and any grid points.
pub fn complex_svg(out: &SceneOutput) -> String {
    let mut xs: Vec<[f64; 2]> = out.polylines.iter().flatten().map(|w| [w[0], w[1]]).collect();
    xs.extend(out.points.iter().copied());
    xs.extend(out.focal.iter().flatten().flatten().copied());
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &xs {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    if xs.is_empty() {
        lo = [0.0; 2];
        hi = [1.0; 2];
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9) * 1.1;
    let c = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let tx = |p: [f64; 2]| {
        (
            (p[0] - c[0]) / span * SIZE + SIZE / 2.0,
            SIZE / 2.0 - (p[1] - c[1]) / span * SIZE,
        )
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (set, colour) in out.focal.iter().zip(["#2b6cb0", "#c53030"]) {
        for item in set {
            if item.len() == 1 {
                let (x, y) = tx(item[0]);
                let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{colour}"/>"#);
            } else {
                let pts: Vec<String> = item
                    .iter()
                    .map(|&p| {
                        let (x, y) = tx(p);
                        format!("{x:.2},{y:.2}")
                    })
                    .collect();
                let _ = writeln!(
                    s,
                    r#"<polygon points="{}" fill="{colour}" fill-opacity="0.3" stroke="{colour}"/>"#,
                    pts.join(" ")
                );
            }
        }
    }
    for &p in &out.points {
        let (x, y) = tx(p);
        let _ = writeln!(s, r#"<rect x="{:.2}" y="{:.2}" width="0.6" height="0.6" fill="black"/>"#, x - 0.3, y - 0.3);
    }
    for line in &out.polylines {
        let d: Vec<String> = line
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let (x, y) = tx([w[0], w[1]]);
                format!("{}{x:.2},{y:.2}", if i == 0 { "M" } else { "L" })
            })
            .collect();
        let _ = writeln!(s, r#"<path d="{}" fill="none" stroke="black" stroke-width="1.5"/>"#, d.join(" "));
    }
    s.push_str("</svg>\n");
    s
}

/// Polylines as OBJ line elements.
pub fn complex_obj(polylines: &[Vec<[f64; 3]>]) -> String {
    let mut s = String::from("# equidistant complex\n");
    let mut base = 1usize;
    for line in polylines {
        for w in line {
            let _ = writeln!(s, "v {} {} {}", w[0], w[1], w[2]);
        }
        if line.len() >= 2 {
            let idx: Vec<String> = (base..base + line.len()).map(|i| i.to_string()).collect();
            let _ = writeln!(s, "l {}", idx.join(" "));
        }
        base += line.len();
    }
    s
}

/// `source,scale,count,fitted` rows for every estimate.
pub fn boxcount_csv(dims: &[DimensionReport]) -> String {
    let mut s = String::from("source,scale,count,fitted\n");
    for d in dims {
        let e = &d.estimate;
        for (i, (sc, n)) in e.scales.iter().zip(&e.counts).enumerate() {
            let fitted = i >= e.fit.0 && i < e.fit.1;
            let _ = writeln!(s, "{},{},{},{}", d.source, sc, n, fitted);
        }
    }
    s
}
