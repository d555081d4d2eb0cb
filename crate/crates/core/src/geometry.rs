//! Planar primitives: points, oriented rectangles, convex polygons and
//! half-plane clipping.
//!
//! Everything is plain `f64`. Magnitudes in this crate are O(1) (laptop-width
//! units), so fixed absolute tolerances are used throughout:
//!
//! - [`EPS`] decides on-line classification and collinearity,
//! - [`MIN_AREA`] is the area below which a clipping result collapses to the
//!   empty polygon.
//!
//! Clipping results are canonicalized: counterclockwise, no repeated or
//! collinear vertices, starting at the lexicographically smallest vertex.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Collinearity / on-line tolerance.
pub const EPS: f64 = 1e-12;

/// Polygons with less area than this are treated as empty.
pub const MIN_AREA: f64 = 1e-15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("rectangle half extents must satisfy half_long >= half_short > 0 (got {half_long}, {half_short})")]
    BadExtents { half_long: f64, half_short: f64 },
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon is not convex and counterclockwise at vertex {0}")]
    NotConvex(usize),
    #[error("consecutive vertices {0} and {1} coincide")]
    DuplicateVertex(usize, usize),
    #[error("half-plane normal must be a unit vector (norm {0})")]
    NonUnitNormal(f64),
    #[error("Monte Carlo estimate needs at least one sample")]
    ZeroSamples,
    #[error("Monte Carlo sampling domain is empty")]
    EmptyDomain,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Self) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Self) -> f64 {
        (self - o).norm()
    }

    /// Rotation by `angle` radians about the origin.
    pub fn rotated(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    fn lex_cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.x.total_cmp(&o.x).then(self.y.total_cmp(&o.y))
    }
}

impl Add for Point2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

impl Neg for Point2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Maps any angle into `[0, π)`.
pub fn canonical_angle(angle: f64) -> f64 {
    let r = angle.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// Distance between two undirected axis angles, in `[0, π/2]`.
pub fn axis_angle_distance(a: f64, b: f64) -> f64 {
    let d = canonical_angle(a - b);
    d.min(PI - d)
}

/// Rectangle with arbitrary orientation. `angle` is the direction of the long
/// axis, kept in `[0, π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedRect {
    center: Point2,
    half_long: f64,
    half_short: f64,
    angle: f64,
}

impl OrientedRect {
    pub fn new(
        center: Point2,
        half_long: f64,
        half_short: f64,
        angle: f64,
    ) -> Result<Self, GeometryError> {
        if !center.is_finite() || !half_long.is_finite() || !half_short.is_finite() || !angle.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        if !(half_short > 0.0 && half_long >= half_short) {
            return Err(GeometryError::BadExtents { half_long, half_short });
        }
        Ok(Self {
            center,
            half_long,
            half_short,
            angle: canonical_angle(angle),
        })
    }

    pub fn center(&self) -> Point2 {
        self.center
    }

    pub fn half_long(&self) -> f64 {
        self.half_long
    }

    pub fn half_short(&self) -> f64 {
        self.half_short
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// Unit vectors along the long and short axes.
    pub fn axes(&self) -> (Point2, Point2) {
        let (s, c) = self.angle.sin_cos();
        (Point2::new(c, s), Point2::new(-s, c))
    }
}

/// Corner polygon of `r`, counterclockwise.
pub fn rect_polygon(r: &OrientedRect) -> ConvexPolygon {
    let (u, v) = r.axes();
    let a = u * r.half_long;
    let b = v * r.half_short;
    let c = r.center;
    ConvexPolygon::from_raw(vec![c - a - b, c + a - b, c + a + b, c - a + b])
}

/// Closed half-plane `{p : normal·p <= offset}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    normal: Point2,
    offset: f64,
}

impl HalfPlane {
    pub fn new(normal: Point2, offset: f64) -> Result<Self, GeometryError> {
        if !normal.is_finite() || !offset.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        let n = normal.norm();
        if (n - 1.0).abs() > EPS {
            return Err(GeometryError::NonUnitNormal(n));
        }
        Ok(Self { normal, offset })
    }

    /// Half-plane to the left of the directed line `a -> b`.
    ///
    /// `a` and `b` must be distinct.
    pub fn left_of(a: Point2, b: Point2) -> Self {
        let d = b - a;
        let len = d.norm();
        let normal = Point2::new(d.y / len, -d.x / len);
        Self {
            normal,
            offset: normal.dot(a),
        }
    }

    pub fn normal(&self) -> Point2 {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Positive outside, negative inside.
    pub fn signed_distance(&self, p: Point2) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

/// Convex polygon with counterclockwise vertices. May be empty.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    pub fn empty() -> Self {
        Self { vertices: Vec::new() }
    }

    /// Validating constructor. The vertex order is preserved apart from
    /// rotating the start to the lexicographically smallest vertex.
    pub fn new(vertices: Vec<Point2>) -> Result<Self, GeometryError> {
        if vertices.is_empty() {
            return Ok(Self::empty());
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let n = vertices.len();
        if n < 3 {
            return Err(GeometryError::TooFewVertices(n));
        }
        for i in 0..n {
            let j = (i + 1) % n;
            if vertices[i].dist(vertices[j]) < EPS {
                return Err(GeometryError::DuplicateVertex(i, j));
            }
        }
        for i in 0..n {
            let a = vertices[(i + n - 1) % n];
            let b = vertices[i];
            let c = vertices[(i + 1) % n];
            if (b - a).cross(c - b) < -EPS {
                return Err(GeometryError::NotConvex(i));
            }
        }
        if signed_area(&vertices) <= 0.0 {
            return Err(GeometryError::NotConvex(0));
        }
        Ok(Self {
            vertices: rotate_to_min(vertices),
        })
    }

    /// Builds a polygon from vertices known to be in convex position and
    /// counterclockwise (up to rounding), cleaning up clipping artifacts.
    pub(crate) fn from_raw(vertices: Vec<Point2>) -> Self {
        let cleaned = simplify(vertices, EPS);
        if cleaned.len() < 3 || signed_area(&cleaned) < MIN_AREA {
            return Self::empty();
        }
        Self {
            vertices: rotate_to_min(cleaned),
        }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        polygon_area(self)
    }

    /// Closed containment test with slack `tol`.
    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        if self.is_empty() {
            return false;
        }
        self.edges().all(|(a, b)| {
            let e = b - a;
            e.cross(p - a) >= -tol * e.norm()
        })
    }

    /// Axis-aligned bounding box as (min, max). `None` when empty.
    pub fn bbox(&self) -> Option<(Point2, Point2)> {
        let first = *self.vertices.first()?;
        Some(self.vertices.iter().fold((first, first), |(lo, hi), p| {
            (
                Point2::new(lo.x.min(p.x), lo.y.min(p.y)),
                Point2::new(hi.x.max(p.x), hi.y.max(p.y)),
            )
        }))
    }

    pub fn centroid_of_vertices(&self) -> Option<Point2> {
        if self.is_empty() {
            return None;
        }
        let n = self.vertices.len() as f64;
        let s = self.vertices.iter().fold(Point2::default(), |acc, &p| acc + p);
        Some(s * (1.0 / n))
    }

    /// Rotation about the origin followed by a translation.
    pub fn transformed(&self, angle: f64, shift: Point2) -> Self {
        Self::from_raw(self.vertices.iter().map(|p| p.rotated(angle) + shift).collect())
    }

    /// Copy with vertices merged at tolerance `tol` (near-duplicate and
    /// near-collinear vertices dropped). Used for shape classification.
    pub fn simplified(&self, tol: f64) -> Self {
        Self::from_raw(simplify(self.vertices.clone(), tol))
    }
}

fn signed_area(v: &[Point2]) -> f64 {
    let n = v.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        s += v[i].cross(v[(i + 1) % n]);
    }
    0.5 * s
}

fn rotate_to_min(mut v: Vec<Point2>) -> Vec<Point2> {
    if let Some(k) = (0..v.len()).min_by(|&i, &j| v[i].lex_cmp(&v[j])) {
        v.rotate_left(k);
    }
    v
}

/// Drops repeated vertices and vertices whose turn is below `tol`, until stable.
fn simplify(mut v: Vec<Point2>, tol: f64) -> Vec<Point2> {
    loop {
        v.dedup_by(|b, a| a.dist(*b) < tol);
        while v.len() > 1 && v[0].dist(v[v.len() - 1]) < tol {
            v.pop();
        }
        if v.len() < 3 {
            return v;
        }
        let n = v.len();
        let keep: Vec<bool> = (0..n)
            .map(|i| {
                let a = v[(i + n - 1) % n];
                let b = v[i];
                let c = v[(i + 1) % n];
                (b - a).cross(c - b) > tol
            })
            .collect();
        if keep.iter().all(|&k| k) {
            return v;
        }
        // Remove one flat vertex per pass so neighbours are re-evaluated.
        if let Some(i) = keep.iter().position(|&k| !k) {
            v.remove(i);
        }
    }
}

/// Shoelace area; zero for the empty polygon.
pub fn polygon_area(p: &ConvexPolygon) -> f64 {
    signed_area(&p.vertices).max(0.0)
}

/// Restricts `subject` to the inside of `h` (or the closed outside when
/// `keep_inside` is false).
pub fn clip_halfplane(subject: &ConvexPolygon, h: &HalfPlane, keep_inside: bool) -> ConvexPolygon {
    if subject.is_empty() {
        return ConvexPolygon::empty();
    }
    let sign = if keep_inside { 1.0 } else { -1.0 };
    ConvexPolygon::from_raw(cut(&subject.vertices, |p| sign * h.signed_distance(p)))
}

fn cut(vertices: &[Point2], dist: impl Fn(Point2) -> f64) -> Vec<Point2> {
    let n = vertices.len();
    let mut out = Vec::with_capacity(n + 2);
    for i in 0..n {
        let p = vertices[i];
        let q = vertices[(i + 1) % n];
        let dp = dist(p);
        let dq = dist(q);
        if dp <= EPS {
            out.push(p);
        }
        if (dp < -EPS && dq > EPS) || (dp > EPS && dq < -EPS) {
            let t = dp / (dp - dq);
            out.push(p + (q - p) * t);
        }
    }
    out
}

/// Intersection of two convex polygons by successive half-plane cuts along
/// the clipper's edges.
pub fn clip_convex(subject: &ConvexPolygon, clipper: &ConvexPolygon) -> ConvexPolygon {
    if subject.is_empty() || clipper.is_empty() {
        return ConvexPolygon::empty();
    }
    let mut verts = subject.vertices.clone();
    for (a, b) in clipper.edges() {
        let h = HalfPlane::left_of(a, b);
        verts = cut(&verts, |p| h.signed_distance(p));
        if verts.len() < 3 {
            return ConvexPolygon::empty();
        }
    }
    ConvexPolygon::from_raw(verts)
}

/// Convex hull (Andrew's monotone chain), counterclockwise.
pub fn convex_hull(points: &[Point2]) -> ConvexPolygon {
    let mut pts: Vec<Point2> = points.iter().copied().filter(|p| p.is_finite()).collect();
    pts.sort_by(|a, b| a.lex_cmp(b));
    pts.dedup_by(|b, a| a.dist(*b) < EPS);
    if pts.len() < 3 {
        return ConvexPolygon::empty();
    }
    let turn = |o: Point2, a: Point2, b: Point2| (a - o).cross(b - o);
    let mut lower: Vec<Point2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= EPS {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= EPS {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    ConvexPolygon::from_raw(lower)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// Estimates `area(a ∩ b)` by uniform sampling over the bounding box of `a`.
pub fn monte_carlo_overlap(
    a: &ConvexPolygon,
    b: &ConvexPolygon,
    samples: u64,
    seed: u64,
) -> Result<McEstimate, GeometryError> {
    if samples == 0 {
        return Err(GeometryError::ZeroSamples);
    }
    let (lo, hi) = a.bbox().ok_or(GeometryError::EmptyDomain)?;
    let box_area = (hi.x - lo.x) * (hi.y - lo.y);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        let p = Point2::new(
            lo.x + (hi.x - lo.x) * rng.gen::<f64>(),
            lo.y + (hi.y - lo.y) * rng.gen::<f64>(),
        );
        if a.contains(p, 0.0) && b.contains(p, 0.0) {
            hits += 1;
        }
    }
    let n = samples as f64;
    let frac = hits as f64 / n;
    Ok(McEstimate {
        estimate: box_area * frac,
        std_error: box_area * (frac * (1.0 - frac) / n).sqrt(),
    })
}
