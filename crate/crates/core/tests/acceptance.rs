//! End-to-end acceptance checks. Run with
//! `cargo test -p footprint --test acceptance -- --nocapture` to see one
//! PASS/FAIL line per criterion.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, SQRT_2};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use footprint::analysis::{
    scenario2_analyze, sweep_tables, verify_bounds, verify_corner_constancy, verify_corner_sweep,
};
use footprint::geometry::{axis_angle_distance, monte_carlo_overlap};
use footprint::optimizer::{solve, SearchConfig};
use footprint::placement::{footprint, laptop_polygon, overlap_area, Corner, LaptopSpec, Pose, TableSpec};
use footprint::report::{emit_csv, emit_json, JsonDoc};

const SEED: u64 = 0;

struct Outcome {
    passed: bool,
    detail: String,
    /// Serialized outputs, compared byte for byte across reruns.
    artifacts: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            passed: true,
            detail: String::new(),
            artifacts: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl AsRef<str>) {
        if !ok {
            self.passed = false;
            if !self.detail.is_empty() {
                self.detail.push_str("; ");
            }
            self.detail.push_str(what.as_ref());
        }
    }

    fn note(&mut self, what: impl AsRef<str>) {
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        self.detail.push_str(what.as_ref());
    }
}

fn laptop(l: f64) -> LaptopSpec {
    LaptopSpec::new(l).unwrap()
}

fn table(w: f64, h: f64) -> TableSpec {
    TableSpec::new(w, h).unwrap()
}

fn config() -> SearchConfig {
    SearchConfig {
        seed: SEED,
        ..SearchConfig::default()
    }
}

fn random_stable_pose(rng: &mut ChaCha8Rng, t: &TableSpec) -> Pose {
    Pose::new(
        rng.gen_range(0.0..=t.width()),
        rng.gen_range(0.0..=t.height()),
        rng.gen_range(0.0..std::f64::consts::PI),
    )
}

fn c1_constancy() -> Outcome {
    let mut o = Outcome::new();
    let r = verify_corner_constancy(&laptop(1.0), &table(2.0, 2.0), 360).unwrap();
    o.check(r.passed && r.max_deviation <= 1e-9, format!("max deviation {:e}", r.max_deviation));
    o.note(format!("max |area-0.25| = {:.3e}", r.max_deviation));
    o.artifacts.push(emit_json(JsonDoc::Verification(&r)));
    o
}

fn c2_boundary_table() -> Outcome {
    let mut o = Outcome::new();
    let r = verify_corner_constancy(&laptop(1.0), &table(FRAC_1_SQRT_2, FRAC_1_SQRT_2), 360).unwrap();
    o.check(r.passed, format!("1/sqrt2 table deviates by {:e}", r.max_deviation));
    let r2 = verify_corner_constancy(&laptop(1.0), &table(0.6, 0.6), 360).unwrap();
    o.check(!r2.passed, "0.6 table unexpectedly passes");
    let worst = r2.worst_row().unwrap();
    o.check(
        (worst.pose.theta - FRAC_PI_4).abs() <= 1e-9,
        format!("worst deviation at theta {} instead of pi/4", worst.pose.theta),
    );
    o.note(format!(
        "1/sqrt2: {:.3e}; 0.6: {:.3e} at theta={:.6}",
        r.max_deviation, r2.max_deviation, worst.pose.theta
    ));
    o.artifacts.push(emit_json(JsonDoc::Verification(&r)));
    o.artifacts.push(emit_json(JsonDoc::Verification(&r2)));
    o
}

fn c3_corner_sweep() -> Outcome {
    let mut o = Outcome::new();
    let (l, t) = (laptop(1.5), table(2.0, 2.0));
    let a0 = overlap_area(&l, &t, &Pose::new(0.0, 0.0, 0.0));
    o.check((a0 - 0.375).abs() <= 1e-9, format!("area(0) = {a0}"));
    let r = verify_corner_sweep(&l, &t, 360).unwrap();
    o.check(r.passed, format!("sweep deviation {:e}", r.max_deviation));
    let min = r.details.iter().map(|d| d.measured).fold(f64::INFINITY, f64::min);
    o.check((min - 0.25).abs() <= 1e-9, format!("min {min}"));
    for d in r.details.iter().filter(|d| d.measured <= 0.25 + 1e-9) {
        let near = axis_angle_distance(d.pose.theta, FRAC_PI_4).min(axis_angle_distance(d.pose.theta, 3.0 * FRAC_PI_4));
        o.check(near <= 1e-3, format!("minimum attained at theta {}", d.pose.theta));
    }
    o.note(format!("area(0)={a0:.12}, min={min:.12}"));
    o.artifacts.push(emit_json(JsonDoc::Verification(&r)));
    o
}

fn c4_main_theorem() -> Outcome {
    let mut o = Outcome::new();
    let mut worst = 0.0f64;
    for l in [1.2, 1.5, 2.0] {
        for (w, h) in [(1.0, 1.0), (1.0, 1.5), (1.4, 2.0)] {
            let (lap, t) = (laptop(l), table(w, h));
            let res = solve(&lap, &t, &config()).unwrap();
            let tag = format!("L={l} {w}x{h}");
            worst = worst.max((res.min_area - 0.25).abs());
            o.check((res.min_area - 0.25).abs() <= 5e-4, format!("{tag}: min {}", res.min_area));
            let best = res.best().pose;
            let corner = Corner::ALL
                .into_iter()
                .min_by(|a, b| a.point(&t).dist(best.midpoint()).total_cmp(&b.point(&t).dist(best.midpoint())))
                .unwrap();
            o.check(corner.point(&t).dist(best.midpoint()) <= 1e-3, format!("{tag}: midpoint {best}"));
            o.check(
                axis_angle_distance(best.theta, corner.symmetric_theta()) <= 1e-3,
                format!("{tag}: theta {} at {corner:?}", best.theta),
            );
            let fp = footprint(&lap, &t, &best).unwrap();
            o.check(fp.is_isosceles_right_triangle, format!("{tag}: footprint {}", fp.shape_class));
            o.artifacts.push(emit_json(JsonDoc::Opt(&res)));
        }
    }
    o.note(format!("9 cases, max |min-0.25| = {worst:.3e}"));
    o
}

fn c5_square_laptop_ties() -> Outcome {
    let mut o = Outcome::new();
    let res = solve(&laptop(1.0), &table(2.0, 2.0), &config()).unwrap();
    o.check((res.min_area - 0.25).abs() <= 5e-4, format!("min {}", res.min_area));
    o.check(res.is_tie_family, "tie family not detected");
    o.note(format!("min={:.12} tie_family={}", res.min_area, res.is_tie_family));
    o.artifacts.push(emit_json(JsonDoc::Opt(&res)));
    o
}

fn c6_lower_bound() -> Outcome {
    let mut o = Outcome::new();
    for (w, h) in [(1.0, 1.0), (1.0, 1.5), (SQRT_2, SQRT_2)] {
        let r = verify_bounds(&laptop(1.5), &table(w, h), 100_000, SEED).unwrap();
        let min = r.details.iter().skip(1).map(|d| d.measured).fold(f64::INFINITY, f64::min);
        o.check(r.passed && min >= 0.25 - 1e-9, format!("{w}x{h}: min sample {min}"));
        o.note(format!("{w:.4}x{h:.4} min={min:.6}"));
        o.artifacts.push(emit_json(JsonDoc::Verification(&r)));
    }
    o
}

fn c7_upper_bound() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let lap = laptop(1.5);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..50 {
        let t = table(rng.gen_range(0.2..=3.0), rng.gen_range(0.2..=3.0));
        let res = solve(&lap, &t, &config()).unwrap();
        worst = worst.max(res.min_area);
        o.check(
            res.min_area <= 0.25 + 1e-9,
            format!("{}x{}: min {}", t.width(), t.height(), res.min_area),
        );
        o.artifacts.push(emit_json(JsonDoc::Opt(&res)));
    }
    o.note(format!("50 tables, largest min_area {worst:.12}"));
    o
}

fn c8_full_table() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let lap = laptop(1.5);
    for (w, h) in [(0.3, 0.4), (0.2, 0.45)] {
        let t = table(w, h);
        let worst = (0..10_000)
            .map(|_| (overlap_area(&lap, &t, &random_stable_pose(&mut rng, &t)) - w * h).abs())
            .fold(0.0, f64::max);
        o.check(worst <= 1e-9, format!("{w}x{h}: sample deviation {worst:e}"));
        let res = solve(&lap, &t, &config()).unwrap();
        o.check((res.min_area - w * h).abs() <= 1e-9, format!("{w}x{h}: solve min {}", res.min_area));
        o.artifacts.push(emit_json(JsonDoc::Opt(&res)));
        o.note(format!("{w}x{h}: max sample deviation {worst:.1e}, solve min {:.12}", res.min_area));
        o.artifacts.push(format!("{worst:e}"));
    }
    o
}

fn c9_scenario2() -> Outcome {
    let mut o = Outcome::new();
    let lap = laptop(1.5);
    let square = table(0.37, 0.37);
    let r = scenario2_analyze(&lap, &square, &config()).unwrap();
    o.check(r.leg_difference <= 1e-3, format!("square leg difference {}", r.leg_difference));
    let thin = table(0.06, 0.52);
    let r2 = scenario2_analyze(&lap, &thin, &config()).unwrap();
    o.check(r2.leg_difference > 1e-2, format!("thin leg difference {}", r2.leg_difference));
    o.note(format!(
        "square legs {:.6}/{:.6}, thin legs {:.6}/{:.6}",
        r.legs[0], r.legs[1], r2.legs[0], r2.legs[1]
    ));
    o.artifacts.push(emit_json(JsonDoc::Scenario2(&r, &square)));
    o.artifacts.push(emit_json(JsonDoc::Scenario2(&r2, &thin)));
    o
}

fn c10_monte_carlo() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst_z = 0.0f64;
    for i in 0..20u64 {
        let lap = laptop(rng.gen_range(1.0..=3.0));
        let t = table(rng.gen_range(0.2..=3.0), rng.gen_range(0.2..=3.0));
        let pose = random_stable_pose(&mut rng, &t);
        let exact = overlap_area(&lap, &t, &pose);
        let mc = monte_carlo_overlap(&laptop_polygon(&lap, &pose), &t.polygon(), 1_000_000, SEED + i).unwrap();
        let diff = (exact - mc.estimate).abs();
        o.check(diff <= 4.0 * mc.std_error, format!("case {i}: |{exact} - {}| > 4 x {}", mc.estimate, mc.std_error));
        if mc.std_error > 0.0 {
            worst_z = worst_z.max(diff / mc.std_error);
        }
        o.artifacts.push(format!("{exact:e} {:e} {:e}", mc.estimate, mc.std_error));
    }
    o.note(format!("20 triples, largest |diff|/std_error = {worst_z:.2}"));
    o
}

fn c11_sweep() -> Outcome {
    let mut o = Outcome::new();
    let sizes: Vec<(f64, f64)> = [0.71, 0.75, 0.8, 0.9, 0.99].iter().map(|&s| (s, s)).collect();
    let rows = sweep_tables(&laptop(1.5), &sizes, &config()).unwrap();
    o.check(rows.len() == sizes.len(), "missing rows");
    let csv = emit_csv(&rows);
    let json = emit_json(JsonDoc::Sweep(&rows));
    o.check(csv.lines().count() == sizes.len() + 1, "csv row count");
    o.check(serde_json::from_str::<serde_json::Value>(&json).is_ok(), "json does not parse");
    let summary: Vec<String> = rows
        .iter()
        .map(|r| format!("{}: {:.9} ({:+.2e})", r.table_w, r.min_area, r.min_area - 0.25))
        .collect();
    o.note(summary.join(", "));
    o.artifacts.push(csv);
    o.artifacts.push(json);
    o
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

const CRITERIA: [Criterion; 11] = [
    ("corner constancy", c1_constancy, Duration::from_secs(1)),
    ("boundary table", c2_boundary_table, Duration::from_secs(1)),
    ("corner sweep", c3_corner_sweep, Duration::from_secs(1)),
    ("main theorem", c4_main_theorem, Duration::from_secs(60)),
    ("square-laptop ties", c5_square_laptop_ties, Duration::from_secs(10)),
    ("lower bound sampling", c6_lower_bound, Duration::from_secs(30)),
    ("universal upper bound", c7_upper_bound, Duration::from_secs(120)),
    ("whole-table regime", c8_full_table, Duration::from_secs(10)),
    ("corner-triangle legs", c9_scenario2, Duration::from_secs(30)),
    ("Monte Carlo oracle", c10_monte_carlo, Duration::from_secs(60)),
    ("small-table sweep", c11_sweep, Duration::from_secs(60)),
];

#[test]
fn acceptance_criteria() {
    let mut all_passed = true;
    let mut first_artifacts = Vec::new();
    for (i, (name, run, limit)) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        outcome.check(elapsed <= *limit, format!("took {elapsed:?}, limit {limit:?}"));
        all_passed &= outcome.passed;
        println!(
            "[{}] {:>2}. {name} ({:.2?}): {}",
            if outcome.passed { "PASS" } else { "FAIL" },
            i + 1,
            elapsed,
            outcome.detail
        );
        first_artifacts.push(outcome.artifacts);
    }

    let start = Instant::now();
    let mismatched: Vec<&str> = CRITERIA
        .iter()
        .zip(&first_artifacts)
        .filter(|((_, run, _), first)| run().artifacts != **first)
        .map(|((name, _, _), _)| *name)
        .collect();
    let deterministic = mismatched.is_empty() && first_artifacts.iter().all(|a| !a.is_empty());
    all_passed &= deterministic;
    println!(
        "[{}] 12. determinism ({:.2?}): {}",
        if deterministic { "PASS" } else { "FAIL" },
        start.elapsed(),
        if deterministic {
            format!("{} artifacts byte-identical on rerun", first_artifacts.iter().map(Vec::len).sum::<usize>())
        } else {
            format!("differs: {}", mismatched.join(", "))
        }
    );

    assert!(all_passed, "some acceptance criteria failed");
}
