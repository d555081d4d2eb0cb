//! Laptop/table model, the stability predicate and footprint evaluation.
//!
//! The table is fixed at `[0, W] × [0, H]` and the laptop moves. Lengths are
//! in laptop-width units, so the laptop's short side is exactly 1.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    canonical_angle, clip_convex, clip_halfplane, convex_hull, rect_polygon, ConvexPolygon, HalfPlane,
    OrientedRect, Point2,
};

/// Tolerance for the isosceles right triangle test (lengths and radians).
pub const ISOSCELES_TOL: f64 = 1e-6;

/// Vertices closer than this are merged before counting polygon sides.
pub const SLIVER_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlacementError {
    #[error("laptop length must be finite and at least 1 (got {0})")]
    InvalidLaptop(f64),
    #[error("table sides must be finite and positive (got {width} x {height})")]
    InvalidTable { width: f64, height: f64 },
    #[error("unstable pose: midpoint ({cx}, {cy}) is not on the table")]
    Unstable { cx: f64, cy: f64 },
}

/// Laptop of width 1 and the given long-side length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaptopSpec {
    length: f64,
}

impl LaptopSpec {
    pub fn new(length: f64) -> Result<Self, PlacementError> {
        if !length.is_finite() || length < 1.0 {
            return Err(PlacementError::InvalidLaptop(length));
        }
        Ok(Self { length })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn is_square(&self) -> bool {
        self.length == 1.0
    }

    pub fn area(&self) -> f64 {
        self.length
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableSpec {
    width: f64,
    height: f64,
}

impl TableSpec {
    pub fn new(width: f64, height: f64) -> Result<Self, PlacementError> {
        if !(width.is_finite() && height.is_finite() && width > 0.0 && height > 0.0) {
            return Err(PlacementError::InvalidTable { width, height });
        }
        Ok(Self { width, height })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn min_side(&self) -> f64 {
        self.width.min(self.height)
    }

    pub fn diagonal(&self) -> f64 {
        self.width.hypot(self.height)
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn is_square(&self) -> bool {
        self.width == self.height
    }

    pub fn swapped(&self) -> Self {
        Self {
            width: self.height,
            height: self.width,
        }
    }

    pub fn polygon(&self) -> ConvexPolygon {
        ConvexPolygon::new(Corner::ALL.iter().map(|c| c.point(self)).collect())
            .expect("a table with positive sides is a valid polygon")
    }

    pub fn corner_points(&self) -> [Point2; 4] {
        Corner::ALL.map(|c| c.point(self))
    }
}

/// Table corners, counterclockwise from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Corner {
    LowerLeft,
    LowerRight,
    UpperRight,
    UpperLeft,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::LowerLeft, Corner::LowerRight, Corner::UpperRight, Corner::UpperLeft];

    pub fn point(self, table: &TableSpec) -> Point2 {
        match self {
            Corner::LowerLeft => Point2::new(0.0, 0.0),
            Corner::LowerRight => Point2::new(table.width, 0.0),
            Corner::UpperRight => Point2::new(table.width, table.height),
            Corner::UpperLeft => Point2::new(0.0, table.height),
        }
    }

    pub fn opposite(self) -> Corner {
        match self {
            Corner::LowerLeft => Corner::UpperRight,
            Corner::LowerRight => Corner::UpperLeft,
            Corner::UpperRight => Corner::LowerLeft,
            Corner::UpperLeft => Corner::LowerRight,
        }
    }

    /// Long-axis angle that puts the table quadrant against a long laptop
    /// side. The axis runs perpendicular to the corner's interior bisector.
    pub fn symmetric_theta(self) -> f64 {
        match self {
            Corner::LowerLeft | Corner::UpperRight => 3.0 * FRAC_PI_4,
            Corner::LowerRight | Corner::UpperLeft => FRAC_PI_4,
        }
    }
}

/// Laptop midpoint and long-axis angle in `[0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub cx: f64,
    pub cy: f64,
    pub theta: f64,
}

impl Pose {
    pub fn new(cx: f64, cy: f64, theta: f64) -> Self {
        Self {
            cx,
            cy,
            theta: canonical_angle(theta),
        }
    }

    pub fn midpoint(&self) -> Point2 {
        Point2::new(self.cx, self.cy)
    }

    /// Mirror image under `x -> W - x`.
    pub fn reflect_x(&self, table: &TableSpec) -> Self {
        Self::new(table.width - self.cx, self.cy, std::f64::consts::PI - self.theta)
    }

    /// Mirror image under `y -> H - y`.
    pub fn reflect_y(&self, table: &TableSpec) -> Self {
        Self::new(self.cx, table.height - self.cy, std::f64::consts::PI - self.theta)
    }
}

impl fmt::Display for Pose {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.cx, self.cy, self.theta)
    }
}

/// Midpoint at `corner`, long axis at 45° to both table edges, a long side
/// facing the table.
pub fn symmetric_corner_pose(table: &TableSpec, corner: Corner) -> Pose {
    let p = corner.point(table);
    Pose::new(p.x, p.y, corner.symmetric_theta())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ShapeClass {
    Empty,
    Triangle,
    Quadrilateral,
    Pentagon,
    Hexagon,
    Heptagon,
    Octagon,
}

impl ShapeClass {
    /// Two convex quadrilaterals meet in at most eight vertices; larger
    /// counts saturate at `Octagon`.
    pub fn from_vertex_count(n: usize) -> Self {
        match n {
            0..=2 => ShapeClass::Empty,
            3 => ShapeClass::Triangle,
            4 => ShapeClass::Quadrilateral,
            5 => ShapeClass::Pentagon,
            6 => ShapeClass::Hexagon,
            7 => ShapeClass::Heptagon,
            _ => ShapeClass::Octagon,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ShapeClass::Empty => "Empty",
            ShapeClass::Triangle => "Triangle",
            ShapeClass::Quadrilateral => "Quadrilateral",
            ShapeClass::Pentagon => "Pentagon",
            ShapeClass::Hexagon => "Hexagon",
            ShapeClass::Heptagon => "Heptagon",
            ShapeClass::Octagon => "Octagon",
        }
    }
}

impl fmt::Display for ShapeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FootprintReport {
    pub polygon: ConvexPolygon,
    pub area: f64,
    pub vertex_count: usize,
    pub shape_class: ShapeClass,
    pub is_isosceles_right_triangle: bool,
    pub protruding_pieces: Vec<ConvexPolygon>,
}

impl FootprintReport {
    pub fn protruding_area(&self) -> f64 {
        self.protruding_pieces.iter().map(ConvexPolygon::area).sum()
    }
}

/// Closed stability condition: the midpoint lies on the table.
pub fn is_stable(pose: &Pose, table: &TableSpec) -> bool {
    (0.0..=table.width).contains(&pose.cx) && (0.0..=table.height).contains(&pose.cy)
}

pub fn laptop_rect(laptop: &LaptopSpec, pose: &Pose) -> OrientedRect {
    OrientedRect::new(pose.midpoint(), 0.5 * laptop.length, 0.5, pose.theta)
        .expect("laptop spec and finite pose give a valid rectangle")
}

pub fn laptop_polygon(laptop: &LaptopSpec, pose: &Pose) -> ConvexPolygon {
    rect_polygon(&laptop_rect(laptop, pose))
}

/// Footprint area without the stability check or the report bookkeeping.
/// This is the objective the optimizer evaluates.
pub fn overlap_area(laptop: &LaptopSpec, table: &TableSpec, pose: &Pose) -> f64 {
    clip_convex(&laptop_polygon(laptop, pose), &table.polygon()).area()
}

fn check_stable(pose: &Pose, table: &TableSpec) -> Result<(), PlacementError> {
    if is_stable(pose, table) && pose.theta.is_finite() {
        Ok(())
    } else {
        Err(PlacementError::Unstable { cx: pose.cx, cy: pose.cy })
    }
}

pub fn footprint(laptop: &LaptopSpec, table: &TableSpec, pose: &Pose) -> Result<FootprintReport, PlacementError> {
    check_stable(pose, table)?;
    let laptop_poly = laptop_polygon(laptop, pose);
    let polygon = clip_convex(&laptop_poly, &table.polygon());
    let mut report = FootprintReport {
        area: polygon.area(),
        vertex_count: polygon.len(),
        polygon,
        shape_class: ShapeClass::Empty,
        is_isosceles_right_triangle: false,
        protruding_pieces: table_minus(table, &laptop_poly),
    };
    let (shape, iso) = classify_footprint(&report);
    report.shape_class = shape;
    report.is_isosceles_right_triangle = iso;
    Ok(report)
}

/// Convex pieces of the table left uncovered by the laptop.
pub fn protruding_pieces(
    laptop: &LaptopSpec,
    table: &TableSpec,
    pose: &Pose,
) -> Result<Vec<ConvexPolygon>, PlacementError> {
    check_stable(pose, table)?;
    Ok(table_minus(table, &laptop_polygon(laptop, pose)))
}

fn table_minus(table: &TableSpec, laptop_poly: &ConvexPolygon) -> Vec<ConvexPolygon> {
    let mut remaining = table.polygon();
    let mut pieces = Vec::new();
    for (a, b) in laptop_poly.edges() {
        if remaining.is_empty() {
            break;
        }
        let h = HalfPlane::left_of(a, b);
        let outside = clip_halfplane(&remaining, &h, false);
        if !outside.is_empty() {
            pieces.push(outside);
        }
        remaining = clip_halfplane(&remaining, &h, true);
    }
    merge_convex_neighbours(pieces)
}

/// Repeatedly merges pairs of pieces that share a boundary segment and whose
/// union is convex.
fn merge_convex_neighbours(mut pieces: Vec<ConvexPolygon>) -> Vec<ConvexPolygon> {
    'outer: loop {
        for i in 0..pieces.len() {
            for j in (i + 1)..pieces.len() {
                if !share_segment(&pieces[i], &pieces[j]) {
                    continue;
                }
                let mut pts = pieces[i].vertices().to_vec();
                pts.extend_from_slice(pieces[j].vertices());
                let hull = convex_hull(&pts);
                let sum = pieces[i].area() + pieces[j].area();
                if (hull.area() - sum).abs() <= 1e-12 * sum.max(1.0) {
                    pieces[i] = hull;
                    pieces.remove(j);
                    continue 'outer;
                }
            }
        }
        return pieces;
    }
}

fn share_segment(a: &ConvexPolygon, b: &ConvexPolygon) -> bool {
    for (p, q) in a.edges() {
        let d = q - p;
        let len = d.norm();
        let dir = d * (1.0 / len);
        for (r, s) in b.edges() {
            let off_r = dir.cross(r - p).abs();
            let off_s = dir.cross(s - p).abs();
            if off_r > SLIVER_TOL || off_s > SLIVER_TOL {
                continue;
            }
            let (t0, t1) = {
                let tr = dir.dot(r - p);
                let ts = dir.dot(s - p);
                (tr.min(ts), tr.max(ts))
            };
            if t1.min(len) - t0.max(0.0) > SLIVER_TOL {
                return true;
            }
        }
    }
    false
}

/// Shape class after sliver removal, and whether the footprint is an
/// isosceles right triangle.
pub fn classify_footprint(report: &FootprintReport) -> (ShapeClass, bool) {
    let simple = report.polygon.simplified(SLIVER_TOL);
    let shape = ShapeClass::from_vertex_count(simple.len());
    let iso = shape == ShapeClass::Triangle && is_isosceles_right(simple.vertices());
    (shape, iso)
}

fn is_isosceles_right(v: &[Point2]) -> bool {
    (0..3).any(|i| {
        let apex = v[i];
        let a = v[(i + 1) % 3] - apex;
        let b = v[(i + 2) % 3] - apex;
        let angle = a.cross(b).abs().atan2(a.dot(b));
        (a.norm() - b.norm()).abs() <= ISOSCELES_TOL && (angle - FRAC_PI_2).abs() <= ISOSCELES_TOL
    })
}
