//! SVG figures, JSON documents and CSV sweep tables.
//!
//! Numbers in JSON and CSV are rounded to 12 significant digits, so output is
//! stable across runs and platforms.

use std::fmt::Write as _;

use serde::Serialize;

use crate::analysis::{Scenario2Report, SweepRow, VerificationReport};
use crate::geometry::{ConvexPolygon, Point2};
use crate::optimizer::OptResult;
use crate::placement::{footprint, laptop_polygon, FootprintReport, LaptopSpec, PlacementError, Pose, TableSpec};

pub const DEFAULT_SCALE: f64 = 200.0;

const TABLE_FILL: &str = "#DDDDDD";
const LAPTOP_STROKE: &str = "#333333";
const FOOTPRINT_FILL: &str = "#4477AA";
const FOOTPRINT_OPACITY: f64 = 0.7;

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn num(x: f64) -> String {
    format!("{}", sig12(x))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub table: TableSpec,
    pub laptop: LaptopSpec,
    pub pose: Pose,
    pub footprint: FootprintReport,
    pub annotations: Vec<(String, Point2)>,
}

impl Scene {
    pub fn new(laptop: LaptopSpec, table: TableSpec, pose: Pose) -> Result<Self, PlacementError> {
        Ok(Self {
            footprint: footprint(&laptop, &table, &pose)?,
            table,
            laptop,
            pose,
            annotations: Vec::new(),
        })
    }

    pub fn annotate(mut self, text: impl Into<String>, at: Point2) -> Self {
        self.annotations.push((text.into(), at));
        self
    }
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Table in light gray, the footprint filled, the laptop outlined, the
/// midpoint as a dot and the footprint area as text. The y axis points up.
pub fn render_svg(scene: &Scene, scale_px_per_unit: f64) -> String {
    let s = scale_px_per_unit;
    let laptop = laptop_polygon(&scene.laptop, &scene.pose);
    let (llo, lhi) = laptop.bbox().expect("laptop polygon is never empty");
    let lo = Point2::new(llo.x.min(0.0), llo.y.min(0.0));
    let hi = Point2::new(lhi.x.max(scene.table.width()), lhi.y.max(scene.table.height()));
    let (mx, my) = (0.1 * (hi.x - lo.x), 0.1 * (hi.y - lo.y));
    let (x0, y1) = (lo.x - mx, hi.y + my);
    let width = (hi.x - lo.x + 2.0 * mx) * s;
    let height = (hi.y - lo.y + 2.0 * my) * s;
    let px = |p: Point2| ((p.x - x0) * s, (y1 - p.y) * s);
    let points = |poly: &ConvexPolygon| {
        poly.vertices()
            .iter()
            .map(|&p| {
                let (x, y) = px(p);
                format!("{x:.3},{y:.3}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width:.3}\" height=\"{height:.3}\" viewBox=\"0 0 {width:.3} {height:.3}\">"
    );
    let (tx, ty) = px(Point2::new(0.0, scene.table.height()));
    let _ = writeln!(
        out,
        "  <rect x=\"{tx:.3}\" y=\"{ty:.3}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"{TABLE_FILL}\" stroke=\"none\"/>",
        scene.table.width() * s,
        scene.table.height() * s
    );
    if !scene.footprint.polygon.is_empty() {
        let _ = writeln!(
            out,
            "  <polygon points=\"{}\" fill=\"{FOOTPRINT_FILL}\" fill-opacity=\"{FOOTPRINT_OPACITY}\" stroke=\"none\"/>",
            points(&scene.footprint.polygon)
        );
    }
    let _ = writeln!(
        out,
        "  <polygon points=\"{}\" fill=\"none\" stroke=\"{LAPTOP_STROKE}\" stroke-width=\"2\"/>",
        points(&laptop)
    );
    let (cx, cy) = px(scene.pose.midpoint());
    let _ = writeln!(out, "  <circle cx=\"{cx:.3}\" cy=\"{cy:.3}\" r=\"4\" fill=\"{LAPTOP_STROKE}\"/>");
    let _ = writeln!(
        out,
        "  <text x=\"{:.3}\" y=\"{:.3}\" font-family=\"sans-serif\" font-size=\"14\" fill=\"{LAPTOP_STROKE}\">area = {:.4}</text>",
        0.5 * mx * s,
        0.5 * my * s + 7.0,
        scene.footprint.area
    );
    for (text, at) in &scene.annotations {
        let (ax, ay) = px(*at);
        let _ = writeln!(
            out,
            "  <text x=\"{ax:.3}\" y=\"{ay:.3}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{LAPTOP_STROKE}\">{}</text>",
            xml_escape(text)
        );
    }
    out.push_str("</svg>\n");
    out
}

#[derive(Serialize)]
struct PoseArea {
    cx: f64,
    cy: f64,
    theta: f64,
    area: f64,
}

#[derive(Serialize)]
struct OptJson {
    min_area: f64,
    argmin: Vec<PoseArea>,
    tie_family: bool,
    evaluations: usize,
}

#[derive(Serialize)]
struct DetailJson {
    cx: f64,
    cy: f64,
    theta: f64,
    measured: f64,
    expected: f64,
}

#[derive(Serialize)]
struct VerificationJson<'a> {
    name: &'a str,
    passed: bool,
    max_deviation: f64,
    samples: usize,
    details: Vec<DetailJson>,
}

#[derive(Serialize)]
struct SweepJson {
    table_w: f64,
    table_h: f64,
    min_area: f64,
    cx: f64,
    cy: f64,
    theta: f64,
    regime: &'static str,
    shape: &'static str,
}

#[derive(Serialize)]
struct Scenario2Json {
    regime: &'static str,
    table_w: f64,
    table_h: f64,
    cx: f64,
    cy: f64,
    theta: f64,
    min_area: f64,
    legs: [f64; 2],
    leg_difference: f64,
    isosceles: bool,
    single_triangle: bool,
    diagonal_to_long_axis_deg: f64,
    full_solve_min_area: f64,
    restriction_consistent: bool,
}

/// Documents the JSON emitter understands.
#[derive(Debug, Clone, Copy)]
pub enum JsonDoc<'a> {
    Opt(&'a OptResult),
    Verification(&'a VerificationReport),
    Sweep(&'a [SweepRow]),
    /// Scenario-2 report together with the table it was computed on.
    Scenario2(&'a Scenario2Report, &'a TableSpec),
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

fn sweep_json(r: &SweepRow) -> SweepJson {
    SweepJson {
        table_w: sig12(r.table_w),
        table_h: sig12(r.table_h),
        min_area: sig12(r.min_area),
        cx: sig12(r.argmin_pose.cx),
        cy: sig12(r.argmin_pose.cy),
        theta: sig12(r.argmin_pose.theta),
        regime: r.regime.name(),
        shape: r.footprint_shape.name(),
    }
}

pub fn emit_json(doc: JsonDoc<'_>) -> String {
    match doc {
        JsonDoc::Opt(r) => to_json(&OptJson {
            min_area: sig12(r.min_area),
            argmin: r
                .argmin
                .iter()
                .map(|c| PoseArea {
                    cx: sig12(c.pose.cx),
                    cy: sig12(c.pose.cy),
                    theta: sig12(c.pose.theta),
                    area: sig12(c.area),
                })
                .collect(),
            tie_family: r.is_tie_family,
            evaluations: r.evaluations,
        }),
        JsonDoc::Verification(r) => to_json(&VerificationJson {
            name: &r.name,
            passed: r.passed,
            max_deviation: sig12(r.max_deviation),
            samples: r.samples,
            details: r
                .details
                .iter()
                .map(|d| DetailJson {
                    cx: sig12(d.pose.cx),
                    cy: sig12(d.pose.cy),
                    theta: sig12(d.pose.theta),
                    measured: sig12(d.measured),
                    expected: sig12(d.expected),
                })
                .collect(),
        }),
        JsonDoc::Sweep(rows) => to_json(&rows.iter().map(sweep_json).collect::<Vec<_>>()),
        JsonDoc::Scenario2(r, t) => to_json(&Scenario2Json {
            regime: r.regime.name(),
            table_w: sig12(t.width()),
            table_h: sig12(t.height()),
            cx: sig12(r.pose.cx),
            cy: sig12(r.pose.cy),
            theta: sig12(r.pose.theta),
            min_area: sig12(r.min_area),
            legs: r.legs.map(sig12),
            leg_difference: sig12(r.leg_difference),
            isosceles: r.isosceles,
            single_triangle: r.single_triangle,
            diagonal_to_long_axis_deg: sig12(r.diagonal_to_long_axis_deg),
            full_solve_min_area: sig12(r.full_solve_min_area),
            restriction_consistent: r.restriction_consistent,
        }),
    }
}

pub const CSV_HEADER: [&str; 8] = ["table_w", "table_h", "min_area", "cx", "cy", "theta", "regime", "shape"];

pub fn emit_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            num(r.table_w),
            num(r.table_h),
            num(r.min_area),
            num(r.argmin_pose.cx),
            num(r.argmin_pose.cy),
            num(r.argmin_pose.theta),
            r.regime.name().to_owned(),
            r.footprint_shape.name().to_owned(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}
