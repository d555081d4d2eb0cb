//! Numerical checks of the corner results, the table-size regime classifier,
//! the single-exposed-corner analyzer and table-size sweeps.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI, SQRT_2};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{axis_angle_distance, ConvexPolygon, Point2};
use crate::optimizer::{refine_theta, solve, OptimizeError, SearchConfig};
use crate::placement::{
    footprint, overlap_area, protruding_pieces, symmetric_corner_pose, Corner, LaptopSpec, PlacementError, Pose,
    ShapeClass, TableSpec, SLIVER_TOL,
};

/// Area of the optimal corner footprint.
pub const QUARTER: f64 = 0.25;

/// Tolerance of the exact-area checks.
pub const AREA_TOL: f64 = 1e-9;

/// Half-width (radians) of the windows around the 45° orientations.
pub const ORIENTATION_WINDOW: f64 = 1e-3;

/// Leg difference below which a protruding triangle counts as isosceles.
pub const LEG_TOL: f64 = 1e-3;

pub const DEFAULT_PROBES: usize = 20_000;

/// Rows kept in the detail list of sampled checks.
const WORST_ROWS: usize = 16;

pub struct RegimeThresholds;

impl RegimeThresholds {
    /// Half the laptop width; tables with a shorter diagonal are always
    /// fully covered.
    pub const HALF_WIDTH: f64 = 0.5;
    /// Smallest table side for which a square laptop over a corner never
    /// reaches another table edge.
    pub const CORNER_LEG: f64 = FRAC_1_SQRT_2;
    pub const THEOREM_MIN_SIDE: f64 = 1.0;
    pub const BIG_SQUARE_SIDE: f64 = SQRT_2;
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Placement(#[from] PlacementError),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Regime {
    FullTable,
    CornerTriangle,
    Complex,
    ConjecturedQuarter,
    TheoremRegime,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::FullTable => "FullTable",
            Regime::CornerTriangle => "CornerTriangle",
            Regime::Complex => "Complex",
            Regime::ConjecturedQuarter => "ConjecturedQuarter",
            Regime::TheoremRegime => "TheoremRegime",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetailRow {
    pub pose: Pose,
    pub measured: f64,
    pub expected: f64,
}

/// Outcome of one numerical check. `passed` holds exactly when
/// `max_deviation <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub passed: bool,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub details: Vec<DetailRow>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    fn new(name: &str, max_deviation: f64, tolerance: f64, samples: usize, details: Vec<DetailRow>, notes: Vec<String>) -> Self {
        Self {
            name: name.to_owned(),
            passed: max_deviation <= tolerance,
            max_deviation,
            tolerance,
            samples,
            details,
            notes,
        }
    }

    /// The detail row with the largest `|measured - expected|`, first wins.
    pub fn worst_row(&self) -> Option<&DetailRow> {
        self.details.iter().fold(None, |best: Option<&DetailRow>, r| match best {
            Some(b) if (b.measured - b.expected).abs() >= (r.measured - r.expected).abs() => Some(b),
            _ => Some(r),
        })
    }
}

fn theta_grid(samples: usize) -> impl IndexedParallelIterator<Item = f64> {
    (0..samples).into_par_iter().map(move |k| k as f64 * PI / samples as f64)
}

fn corner_leg_note(table: &TableSpec) -> String {
    let holds = table.min_side() >= RegimeThresholds::CORNER_LEG;
    format!(
        "table min side {} {} 1/sqrt(2): corner claim {}",
        table.min_side(),
        if holds { ">=" } else { "<" },
        if holds { "applies" } else { "does not apply" }
    )
}

/// A square laptop centred on the corner `(0, 0)` covers area 1/4 whatever
/// its orientation.
pub fn verify_corner_constancy(
    laptop: &LaptopSpec,
    table: &TableSpec,
    theta_samples: usize,
) -> Result<VerificationReport, AnalysisError> {
    if !laptop.is_square() {
        return Err(AnalysisError::Precondition("corner constancy needs a square laptop".into()));
    }
    if theta_samples < 4 {
        return Err(AnalysisError::Precondition("need at least 4 orientation samples".into()));
    }
    let details: Vec<DetailRow> = theta_grid(theta_samples)
        .map(|theta| {
            let pose = Pose::new(0.0, 0.0, theta);
            DetailRow {
                pose,
                measured: overlap_area(laptop, table, &pose),
                expected: QUARTER,
            }
        })
        .collect();
    let max_dev = details.iter().map(|r| (r.measured - r.expected).abs()).fold(0.0, f64::max);
    Ok(VerificationReport::new(
        "corner-constancy",
        max_dev,
        AREA_TOL,
        theta_samples,
        details,
        vec![corner_leg_note(table)],
    ))
}

fn in_symmetric_window(theta: f64) -> bool {
    axis_angle_distance(theta, FRAC_PI_4) <= ORIENTATION_WINDOW || axis_angle_distance(theta, 3.0 * FRAC_PI_4) <= ORIENTATION_WINDOW
}

/// Orientation sweep of a non-square laptop centred on the corner `(0, 0)`.
///
/// Every sample must cover at least 1/4, the smallest sample must equal 1/4,
/// and samples outside the windows around the 45° orientations must exceed
/// 1/4 by more than the tolerance. Each condition contributes a deviation
/// that is compared against [`AREA_TOL`].
pub fn verify_corner_sweep(
    laptop: &LaptopSpec,
    table: &TableSpec,
    theta_samples: usize,
) -> Result<VerificationReport, AnalysisError> {
    if laptop.is_square() {
        return Err(AnalysisError::Precondition(
            "square laptop: use the corner constancy check".into(),
        ));
    }
    if table.min_side() < RegimeThresholds::CORNER_LEG {
        return Err(AnalysisError::Precondition("table min side must be at least 1/sqrt(2)".into()));
    }
    if theta_samples < 4 {
        return Err(AnalysisError::Precondition("need at least 4 orientation samples".into()));
    }
    let details: Vec<DetailRow> = theta_grid(theta_samples)
        .map(|theta| {
            let pose = Pose::new(0.0, 0.0, theta);
            DetailRow {
                pose,
                measured: overlap_area(laptop, table, &pose),
                expected: QUARTER,
            }
        })
        .collect();
    let min_area = details.iter().map(|r| r.measured).fold(f64::INFINITY, f64::min);
    let mut max_dev = (min_area - QUARTER).abs();
    let mut outside_hits = 0;
    for r in &details {
        let below = (QUARTER - r.measured).max(0.0);
        let dev = if in_symmetric_window(r.pose.theta) {
            below
        } else {
            if r.measured <= QUARTER + AREA_TOL {
                outside_hits += 1;
            }
            (QUARTER + 2.0 * AREA_TOL - r.measured).max(0.0)
        };
        max_dev = max_dev.max(dev);
    }
    let notes = vec![
        format!("minimum area {min_area}"),
        format!("{outside_hits} samples outside the 45-degree windows within tolerance of 1/4"),
    ];
    Ok(VerificationReport::new("corner-sweep", max_dev, AREA_TOL, theta_samples, details, notes))
}

fn random_poses(table: &TableSpec, n: usize, seed: u64) -> Vec<Pose> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let cx = rng.gen_range(0.0..=table.width());
            let cy = rng.gen_range(0.0..=table.height());
            let theta = rng.gen_range(0.0..PI);
            Pose::new(cx, cy, theta)
        })
        .collect()
}

/// Random stable poses on a table at least 1 wide never cover less than
/// 1/4, and the symmetric corner pose covers exactly 1/4.
pub fn verify_bounds(
    laptop: &LaptopSpec,
    table: &TableSpec,
    pose_samples: usize,
    seed: u64,
) -> Result<VerificationReport, AnalysisError> {
    if table.min_side() < RegimeThresholds::THEOREM_MIN_SIDE {
        return Err(AnalysisError::Precondition(
            "lower bound only holds for tables at least 1 wide; use a sweep instead".into(),
        ));
    }
    let poses = random_poses(table, pose_samples, seed);
    let mut rows: Vec<DetailRow> = poses
        .par_iter()
        .map(|pose| DetailRow {
            pose: *pose,
            measured: overlap_area(laptop, table, pose),
            expected: QUARTER,
        })
        .collect();
    let mut max_dev = rows.iter().map(|r| (QUARTER - r.measured).max(0.0)).fold(0.0, f64::max);

    let sym = symmetric_corner_pose(table, Corner::LowerLeft);
    let sym_area = overlap_area(laptop, table, &sym);
    max_dev = max_dev.max((sym_area - QUARTER).max(0.0));

    rows.sort_by(|a, b| a.measured.total_cmp(&b.measured));
    rows.truncate(WORST_ROWS);
    let mut details = vec![DetailRow {
        pose: sym,
        measured: sym_area,
        expected: QUARTER,
    }];
    details.extend(rows);
    let notes = vec![format!("symmetric corner pose area {sym_area}")];
    Ok(VerificationReport::new("bounds", max_dev, AREA_TOL, pose_samples, details, notes))
}

/// Whether the uncovered table at `pose` is empty or a single triangle
/// holding exactly one table corner.
fn is_single_corner_triangle(pieces: &[ConvexPolygon], corners: &[Point2; 4]) -> bool {
    match pieces {
        [] => true,
        [piece] => {
            piece.simplified(SLIVER_TOL).len() == 3 && corners.iter().filter(|c| piece.contains(**c, SLIVER_TOL)).count() == 1
        }
        _ => false,
    }
}

pub fn classify_regime(laptop: &LaptopSpec, table: &TableSpec, probe_samples: usize, seed: u64) -> Regime {
    if table.diagonal() <= RegimeThresholds::HALF_WIDTH + 1e-12 {
        return Regime::FullTable;
    }
    if table.min_side() >= RegimeThresholds::THEOREM_MIN_SIDE {
        return Regime::TheoremRegime;
    }
    if table.min_side() >= RegimeThresholds::CORNER_LEG {
        return Regime::ConjecturedQuarter;
    }
    let corners = table.corner_points();
    let all_single = random_poses(table, probe_samples, seed).par_iter().all(|pose| {
        protruding_pieces(laptop, table, pose)
            .map(|pieces| is_single_corner_triangle(&pieces, &corners))
            .unwrap_or(false)
    });
    if all_single {
        Regime::CornerTriangle
    } else {
        Regime::Complex
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario2Report {
    pub regime: Regime,
    /// Table corner under the laptop midpoint.
    pub corner: Corner,
    pub pose: Pose,
    pub min_area: f64,
    /// Corner diagonally opposite the midpoint.
    pub exposed_corner: Corner,
    /// Extent of the uncovered piece along the horizontal and vertical table
    /// edges through the exposed corner.
    pub legs: [f64; 2],
    pub leg_difference: f64,
    pub isosceles: bool,
    /// The uncovered table is one triangle holding one corner.
    pub single_triangle: bool,
    /// Acute angle in degrees between the table diagonal through the exposed
    /// corner and the laptop's long axis.
    pub diagonal_to_long_axis_deg: f64,
    /// Minimum from an unrestricted lower-resolution search.
    pub full_solve_min_area: f64,
    /// The unrestricted search found nothing better than the corner search.
    pub restriction_consistent: bool,
}

/// Configuration of the unrestricted cross-check.
fn cross_check_config(config: &SearchConfig) -> SearchConfig {
    SearchConfig {
        grid_xy: config.grid_xy.min(24),
        grid_theta: config.grid_theta.min(48),
        top_k_seeds: config.top_k_seeds.min(8),
        refine_initial_step_xy: None,
        refine_initial_step_theta: None,
        ..config.clone()
    }
}

/// Best placement with the midpoint on a table corner, for tables small
/// enough that some of the table sticks out from under the laptop.
///
/// Moving the midpoint to the corner opposite an exposed table corner never
/// increases the footprint, so only the four corner families are searched,
/// each over θ. An unrestricted coarse solve guards that restriction.
pub fn scenario2_analyze(
    laptop: &LaptopSpec,
    table: &TableSpec,
    config: &SearchConfig,
) -> Result<Scenario2Report, AnalysisError> {
    config.validate()?;
    let regime = classify_regime(laptop, table, DEFAULT_PROBES, config.seed);
    if !matches!(regime, Regime::CornerTriangle | Regime::Complex) {
        return Err(AnalysisError::Precondition(format!(
            "regime is {regime}; an exposed table corner needs a diagonal above 1/2 and a min side below 1/sqrt(2)"
        )));
    }

    let samples = config.grid_theta.max(360);
    let mut best: Option<(Corner, Pose, f64)> = None;
    for corner in Corner::ALL {
        let p = corner.point(table);
        let seed_pose = theta_grid(samples)
            .map(|theta| {
                let pose = Pose::new(p.x, p.y, theta);
                (overlap_area(laptop, table, &pose), pose)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, pose)| pose)
            .expect("non-empty orientation grid");
        let r = refine_theta(laptop, table, &seed_pose, config)?;
        if best.as_ref().is_none_or(|b| r.area < b.2) {
            best = Some((corner, r.pose, r.area));
        }
    }
    let (corner, pose, min_area) = best.expect("four corners searched");

    let exposed_corner = corner.opposite();
    let e = exposed_corner.point(table);
    let pieces = protruding_pieces(laptop, table, &pose)?;
    let piece = pieces
        .iter()
        .find(|p| p.contains(e, SLIVER_TOL))
        .ok_or_else(|| AnalysisError::Precondition("no table corner is exposed at the optimum".into()))?;
    let leg_along = |horizontal: bool| {
        piece
            .vertices()
            .iter()
            .filter(|v| if horizontal { (v.y - e.y).abs() <= SLIVER_TOL } else { (v.x - e.x).abs() <= SLIVER_TOL })
            .map(|v| if horizontal { (v.x - e.x).abs() } else { (v.y - e.y).abs() })
            .fold(0.0, f64::max)
    };
    let legs = [leg_along(true), leg_along(false)];
    let leg_difference = (legs[0] - legs[1]).abs();

    let diag = e - corner.point(table);
    let diagonal_to_long_axis_deg = axis_angle_distance(diag.y.atan2(diag.x), pose.theta).to_degrees();

    let full = solve(laptop, table, &cross_check_config(config))?;
    Ok(Scenario2Report {
        regime,
        corner,
        pose,
        min_area,
        exposed_corner,
        legs,
        leg_difference,
        isosceles: leg_difference <= LEG_TOL,
        single_triangle: pieces.len() == 1 && piece.simplified(SLIVER_TOL).len() == 3,
        diagonal_to_long_axis_deg,
        full_solve_min_area: full.min_area,
        restriction_consistent: full.min_area >= min_area - config.tie_tolerance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub table_w: f64,
    pub table_h: f64,
    pub min_area: f64,
    pub argmin_pose: Pose,
    pub regime: Regime,
    pub footprint_shape: ShapeClass,
}

/// One solve per table size.
pub fn sweep_tables(
    laptop: &LaptopSpec,
    sizes: &[(f64, f64)],
    config: &SearchConfig,
) -> Result<Vec<SweepRow>, AnalysisError> {
    if sizes.is_empty() {
        return Err(AnalysisError::Precondition("no table sizes given".into()));
    }
    sizes
        .iter()
        .map(|&(w, h)| {
            let table = TableSpec::new(w, h)?;
            let result = solve(laptop, &table, config)?;
            let best = result.best().pose;
            let fp = footprint(laptop, &table, &best)?;
            Ok(SweepRow {
                table_w: w,
                table_h: h,
                min_area: result.min_area,
                argmin_pose: best,
                regime: classify_regime(laptop, &table, DEFAULT_PROBES, config.seed),
                footprint_shape: fp.shape_class,
            })
        })
        .collect()
}
