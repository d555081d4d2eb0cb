use std::f64::consts::PI;

use proptest::prelude::*;

use footprint::geometry::{clip_convex, clip_halfplane, rect_polygon, ConvexPolygon, HalfPlane, OrientedRect, Point2};
use footprint::placement::{footprint, overlap_area, LaptopSpec, Pose, TableSpec};

const TOL: f64 = 1e-9;

fn rect() -> impl Strategy<Value = ConvexPolygon> {
    (-2.0..2.0f64, -2.0..2.0f64, 0.05..2.0f64, 0.05..2.0f64, 0.0..PI).prop_map(|(x, y, a, b, t)| {
        rect_polygon(&OrientedRect::new(Point2::new(x, y), a.max(b), a.min(b), t).unwrap())
    })
}

/// Laptop, table and a stable pose on it.
fn placement() -> impl Strategy<Value = (LaptopSpec, TableSpec, Pose)> {
    (1.0..3.0f64, 0.1..3.0f64, 0.1..3.0f64, 0.0..=1.0f64, 0.0..=1.0f64, 0.0..PI).prop_map(|(l, w, h, u, v, t)| {
        (
            LaptopSpec::new(l).unwrap(),
            TableSpec::new(w, h).unwrap(),
            Pose::new(u * w, v * h, t),
        )
    })
}

proptest! {
    #[test]
    fn clip_is_idempotent(a in rect(), b in rect()) {
        let once = clip_convex(&a, &b);
        let twice = clip_convex(&once, &b);
        prop_assert!((once.area() - twice.area()).abs() <= TOL);
    }

    #[test]
    fn intersection_is_bounded_by_both(a in rect(), b in rect()) {
        let i = clip_convex(&a, &b).area();
        prop_assert!(i >= 0.0);
        prop_assert!(i <= a.area().min(b.area()) + TOL);
    }

    #[test]
    fn intersection_is_symmetric(a in rect(), b in rect()) {
        prop_assert!((clip_convex(&a, &b).area() - clip_convex(&b, &a).area()).abs() <= TOL);
    }

    #[test]
    fn rigid_motions_preserve_overlap(a in rect(), b in rect(), angle in 0.0..(2.0 * PI), dx in -5.0..5.0f64, dy in -5.0..5.0f64) {
        let shift = Point2::new(dx, dy);
        let moved = clip_convex(&a.transformed(angle, shift), &b.transformed(angle, shift)).area();
        prop_assert!((clip_convex(&a, &b).area() - moved).abs() <= TOL);
    }

    #[test]
    fn halfplane_splits_area(a in rect(), angle in 0.0..(2.0 * PI), offset in -2.0..2.0f64) {
        let h = HalfPlane::new(Point2::new(angle.cos(), angle.sin()), offset).unwrap();
        let inside = clip_halfplane(&a, &h, true).area();
        let outside = clip_halfplane(&a, &h, false).area();
        prop_assert!((inside + outside - a.area()).abs() <= TOL);
    }

    #[test]
    fn footprint_and_uncovered_table_partition_it((l, t, p) in placement()) {
        let r = footprint(&l, &t, &p).unwrap();
        prop_assert!((r.area + r.protruding_area() - t.area()).abs() <= TOL);
        for piece in &r.protruding_pieces {
            prop_assert!(piece.area() > 0.0);
        }
    }

    #[test]
    fn table_reflections_preserve_area((l, t, p) in placement()) {
        let a = overlap_area(&l, &t, &p);
        prop_assert!((overlap_area(&l, &t, &p.reflect_x(&t)) - a).abs() <= TOL);
        prop_assert!((overlap_area(&l, &t, &p.reflect_y(&t)) - a).abs() <= TOL);
        let swapped = Pose::new(p.cy, p.cx, PI / 2.0 - p.theta);
        prop_assert!((overlap_area(&l, &t.swapped(), &swapped) - a).abs() <= TOL);
    }

    #[test]
    fn objective_is_bounded((l, t, p) in placement()) {
        let a = overlap_area(&l, &t, &p);
        prop_assert!(a >= 0.0);
        prop_assert!(a <= l.area().min(t.area()) + TOL);
        // the midpoint is on the table, so some neighbourhood of it is covered
        prop_assert!(a > 0.0);
    }

    #[test]
    fn wide_tables_never_beat_a_quarter(l in 1.0..3.0f64, w in 1.0..3.0f64, h in 1.0..3.0f64, u in 0.0..=1.0f64, v in 0.0..=1.0f64, t in 0.0..PI) {
        let table = TableSpec::new(w, h).unwrap();
        let a = overlap_area(&LaptopSpec::new(l).unwrap(), &table, &Pose::new(u * w, v * h, t));
        prop_assert!(a >= 0.25 - TOL, "area {a}");
    }
}
