//! Global minimization of the footprint area over stable poses.
//!
//! A deterministic coarse grid over `(cx, cy, θ)` supplies seeds, each seed is
//! polished by a compass (pattern) search, and the polished optima are
//! clustered into distinct representatives. Objective evaluations run in
//! parallel; every reduction is ordered, so results do not depend on
//! scheduling.

use std::cmp::Ordering;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::axis_angle_distance;
use crate::placement::{is_stable, overlap_area, LaptopSpec, PlacementError, Pose, TableSpec};

/// Poses closer than this (max-norm over `cx`, `cy` and axis angle) belong to
/// the same optimum.
pub const CLUSTER_RADIUS: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizeError {
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Placement(#[from] PlacementError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub grid_xy: usize,
    pub grid_theta: usize,
    /// Defaults to `min(W, H) / grid_xy` when unset.
    pub refine_initial_step_xy: Option<f64>,
    /// Defaults to `π / grid_theta` when unset.
    pub refine_initial_step_theta: Option<f64>,
    pub refine_min_step: f64,
    pub refine_max_iters: usize,
    pub tie_tolerance: f64,
    pub top_k_seeds: usize,
    pub use_symmetry_reduction: bool,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid_xy: 64,
            grid_theta: 96,
            refine_initial_step_xy: None,
            refine_initial_step_theta: None,
            refine_min_step: 1e-10,
            refine_max_iters: 200,
            tie_tolerance: 1e-6,
            top_k_seeds: 16,
            use_symmetry_reduction: true,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), OptimizeError> {
        let bad = |m: &str| Err(OptimizeError::InvalidConfig(m.to_owned()));
        if self.grid_xy == 0 || self.grid_theta == 0 || self.top_k_seeds == 0 || self.refine_max_iters == 0 {
            return bad("grid sizes, top_k_seeds and refine_max_iters must be positive");
        }
        if !(self.refine_min_step > 0.0 && self.refine_min_step.is_finite()) {
            return bad("refine_min_step must be positive");
        }
        if !(self.tie_tolerance >= 0.0 && self.tie_tolerance.is_finite()) {
            return bad("tie_tolerance must be non-negative");
        }
        for step in [self.refine_initial_step_xy, self.refine_initial_step_theta].into_iter().flatten() {
            if !(step.is_finite() && step > self.refine_min_step) {
                return bad("initial refinement steps must exceed refine_min_step");
            }
        }
        Ok(())
    }

    fn steps(&self, table: &TableSpec) -> (f64, f64) {
        (
            self.refine_initial_step_xy.unwrap_or(table.min_side() / self.grid_xy as f64),
            self.refine_initial_step_theta.unwrap_or(PI / self.grid_theta as f64),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub pose: Pose,
    pub area: f64,
}

/// Orders by `(area, cx, cy, θ)`.
pub fn candidate_order(a: &Candidate, b: &Candidate) -> Ordering {
    a.area
        .total_cmp(&b.area)
        .then_with(|| pose_order(&a.pose, &b.pose))
}

fn pose_order(a: &Pose, b: &Pose) -> Ordering {
    a.cx.total_cmp(&b.cx)
        .then(a.cy.total_cmp(&b.cy))
        .then(a.theta.total_cmp(&b.theta))
}

/// Max-norm distance between poses, with θ measured as an axis angle.
pub fn pose_distance(a: &Pose, b: &Pose) -> f64 {
    (a.cx - b.cx)
        .abs()
        .max((a.cy - b.cy).abs())
        .max(axis_angle_distance(a.theta, b.theta))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearch {
    /// Best `top_k_seeds` nodes in `(area, cx, cy, θ)` order.
    pub candidates: Vec<Candidate>,
    pub evaluations: usize,
}

fn node(i: usize, n: usize, extent: f64) -> f64 {
    if n == 1 {
        0.0
    } else if i == n - 1 {
        // `extent * i / i` need not round back to `extent`
        extent
    } else {
        extent * i as f64 / (n - 1) as f64
    }
}

fn theta_node(k: usize, m: usize) -> f64 {
    k as f64 * PI / m as f64
}

/// Coarse pass over `[0, W] × [0, H] × [0, π)`.
///
/// With symmetry reduction only nodes in the lower-left quadrant are
/// evaluated; every other node takes the value of its mirror image, which is
/// itself a grid node.
pub fn grid_search(laptop: &LaptopSpec, table: &TableSpec, config: &SearchConfig) -> Result<GridSearch, OptimizeError> {
    config.validate()?;
    let n = config.grid_xy;
    let m = config.grid_theta;
    let (w, h) = (table.width(), table.height());
    let eval = |i: usize, j: usize, k: usize| overlap_area(laptop, table, &Pose::new(node(i, n, w), node(j, n, h), theta_node(k, m)));

    let (all, evaluations) = if config.use_symmetry_reduction {
        let half = (n - 1) / 2 + 1;
        let quadrant: Vec<f64> = (0..half * half * m)
            .into_par_iter()
            .map(|idx| eval(idx / (half * m), (idx / m) % half, idx % m))
            .collect();
        let all: Vec<Candidate> = (0..n * n * m)
            .into_par_iter()
            .map(|idx| {
                let (i, j, k) = (idx / (n * m), (idx / m) % n, idx % m);
                let (ri, fx) = if i >= half { (n - 1 - i, true) } else { (i, false) };
                let (rj, fy) = if j >= half { (n - 1 - j, true) } else { (j, false) };
                let rk = if fx != fy { (m - k) % m } else { k };
                Candidate {
                    pose: Pose::new(node(i, n, w), node(j, n, h), theta_node(k, m)),
                    area: quadrant[(ri * half + rj) * m + rk],
                }
            })
            .collect();
        (all, half * half * m)
    } else {
        let all: Vec<Candidate> = (0..n * n * m)
            .into_par_iter()
            .map(|idx| {
                let (i, j, k) = (idx / (n * m), (idx / m) % n, idx % m);
                Candidate {
                    pose: Pose::new(node(i, n, w), node(j, n, h), theta_node(k, m)),
                    area: eval(i, j, k),
                }
            })
            .collect();
        (all, n * n * m)
    };

    Ok(GridSearch {
        candidates: top_k(all, config.top_k_seeds),
        evaluations,
    })
}

fn top_k(mut all: Vec<Candidate>, k: usize) -> Vec<Candidate> {
    if all.len() > k {
        all.select_nth_unstable_by(k - 1, candidate_order);
        all.truncate(k);
    }
    all.sort_by(candidate_order);
    all
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub pose: Pose,
    pub area: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// Objective value after each iteration.
    pub trace: Vec<f64>,
}

/// Compass search over `(cx, cy, θ)` from `seed_pose`.
pub fn refine(
    laptop: &LaptopSpec,
    table: &TableSpec,
    seed_pose: &Pose,
    config: &SearchConfig,
) -> Result<Refinement, OptimizeError> {
    config.validate()?;
    pattern_search(laptop, table, seed_pose, config, true)
}

/// Compass search over θ alone, the midpoint held at `seed_pose`.
pub fn refine_theta(
    laptop: &LaptopSpec,
    table: &TableSpec,
    seed_pose: &Pose,
    config: &SearchConfig,
) -> Result<Refinement, OptimizeError> {
    config.validate()?;
    pattern_search(laptop, table, seed_pose, config, false)
}

fn pattern_search(
    laptop: &LaptopSpec,
    table: &TableSpec,
    seed_pose: &Pose,
    config: &SearchConfig,
    move_midpoint: bool,
) -> Result<Refinement, OptimizeError> {
    if !is_stable(seed_pose, table) || !seed_pose.theta.is_finite() {
        return Err(PlacementError::Unstable {
            cx: seed_pose.cx,
            cy: seed_pose.cy,
        }
        .into());
    }
    let (mut step_xy, mut step_theta) = config.steps(table);
    if !move_midpoint {
        step_xy = 0.0;
    }
    let mut pose = *seed_pose;
    let mut area = overlap_area(laptop, table, &pose);
    let mut evaluations = 1;
    let mut trace = Vec::new();
    let mut iterations = 0;

    while iterations < config.refine_max_iters && (step_xy >= config.refine_min_step || step_theta >= config.refine_min_step) {
        iterations += 1;
        let mut moved = false;
        for (axis, sign) in [(0, 1.0), (0, -1.0), (1, 1.0), (1, -1.0), (2, 1.0), (2, -1.0)] {
            let trial = match axis {
                0 if move_midpoint => Pose::new((pose.cx + sign * step_xy).clamp(0.0, table.width()), pose.cy, pose.theta),
                1 if move_midpoint => Pose::new(pose.cx, (pose.cy + sign * step_xy).clamp(0.0, table.height()), pose.theta),
                2 => Pose::new(pose.cx, pose.cy, pose.theta + sign * step_theta),
                _ => continue,
            };
            if trial == pose {
                continue;
            }
            let a = overlap_area(laptop, table, &trial);
            evaluations += 1;
            if a < area {
                pose = trial;
                area = a;
                moved = true;
                break;
            }
        }
        if !moved {
            step_xy *= 0.5;
            step_theta *= 0.5;
        }
        trace.push(area);
    }

    Ok(Refinement {
        pose,
        area,
        iterations,
        evaluations,
        trace,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub min_area: f64,
    /// One representative per distinct optimum, in `(cx, cy, θ)` order.
    pub argmin: Vec<Candidate>,
    pub is_tie_family: bool,
    pub evaluations: usize,
    /// Whether refinement improved on the best grid node.
    pub refined: bool,
}

impl OptResult {
    pub fn best(&self) -> &Candidate {
        &self.argmin[0]
    }

    pub fn argmin_poses(&self) -> impl Iterator<Item = &Pose> {
        self.argmin.iter().map(|c| &c.pose)
    }
}

/// Grid search, refinement of every seed, clustering of the optima and a θ
/// sweep at the best midpoint to detect a continuous family of optima.
pub fn solve(laptop: &LaptopSpec, table: &TableSpec, config: &SearchConfig) -> Result<OptResult, OptimizeError> {
    let grid = grid_search(laptop, table, config)?;
    let refinements = grid
        .candidates
        .par_iter()
        .map(|c| pattern_search(laptop, table, &c.pose, config, true))
        .collect::<Result<Vec<_>, _>>()?;

    let grid_best = grid.candidates[0].area;
    let mut evaluations = grid.evaluations + refinements.iter().map(|r| r.evaluations).sum::<usize>();

    let mut pool: Vec<Candidate> = refinements
        .iter()
        .map(|r| Candidate { pose: r.pose, area: r.area })
        .chain(grid.candidates.iter().copied())
        .collect();
    pool.sort_by(candidate_order);
    let min_area = pool[0].area;

    let mut argmin: Vec<Candidate> = Vec::new();
    for c in pool.iter().take_while(|c| c.area <= min_area + config.tie_tolerance) {
        if argmin.iter().all(|r| pose_distance(&r.pose, &c.pose) > CLUSTER_RADIUS) {
            argmin.push(*c);
        }
    }
    argmin.sort_by(|a, b| pose_order(&a.pose, &b.pose));

    let best = pool[0].pose;
    let m = config.grid_theta;
    let is_tie_family = (0..m)
        .into_par_iter()
        .map(|k| overlap_area(laptop, table, &Pose::new(best.cx, best.cy, theta_node(k, m))))
        .collect::<Vec<_>>()
        .iter()
        .all(|a| (a - min_area).abs() <= config.tie_tolerance);
    evaluations += m;

    Ok(OptResult {
        min_area,
        argmin,
        is_tie_family,
        evaluations,
        refined: min_area < grid_best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::placement::{symmetric_corner_pose, Corner};
    use std::f64::consts::FRAC_PI_4;

    fn specs(l: f64, w: f64, h: f64) -> (LaptopSpec, TableSpec) {
        (LaptopSpec::new(l).unwrap(), TableSpec::new(w, h).unwrap())
    }

    #[test]
    fn last_grid_node_is_the_table_edge() {
        for extent in [0.907569723859485, 0.1, 0.3, 2.9999, 1.0 / 3.0] {
            for n in 2..200 {
                assert_eq!(node(n - 1, n, extent), extent);
            }
        }
    }

    /// Brute-force evaluation of the same grid, no symmetry shortcuts.
    fn brute_grid(l: &LaptopSpec, t: &TableSpec, n: usize, m: usize) -> Vec<Candidate> {
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..m {
                    let pose = Pose::new(node(i, n, t.width()), node(j, n, t.height()), theta_node(k, m));
                    out.push(Candidate { area: overlap_area(l, t, &pose), pose });
                }
            }
        }
        out.sort_by(candidate_order);
        out
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::default().validate().is_ok());
        let c = SearchConfig { grid_xy: 0, ..SearchConfig::default() };
        assert!(c.validate().is_err());
        let c = SearchConfig {
            refine_initial_step_xy: Some(1e-12),
            ..SearchConfig::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn coarse_grid_lands_near_quarter() {
        let (l, t) = specs(1.5, 2.0, 2.0);
        let cfg = SearchConfig {
            grid_xy: 17,
            grid_theta: 36,
            ..SearchConfig::default()
        };
        let g = grid_search(&l, &t, &cfg).unwrap();
        assert_eq!(g.candidates.len(), 16);
        assert!(g.candidates[0].area <= 0.26);
        let brute = brute_grid(&l, &t, 17, 36);
        assert!((g.candidates[0].area - brute[0].area).abs() < 1e-12);
    }

    #[test]
    fn symmetry_reduction_matches_full_grid() {
        let (l, t) = specs(1.3, 0.9, 0.6);
        for n in [7, 8] {
            let base = SearchConfig {
                grid_xy: n,
                grid_theta: 12,
                top_k_seeds: 40,
                ..SearchConfig::default()
            };
            let full = grid_search(&l, &t, &SearchConfig { use_symmetry_reduction: false, ..base.clone() }).unwrap();
            let reduced = grid_search(&l, &t, &base).unwrap();
            assert!(reduced.evaluations < full.evaluations);
            for (a, b) in full.candidates.iter().zip(&reduced.candidates) {
                assert!((a.area - b.area).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tiny_table_grid_is_flat() {
        let (l, t) = specs(1.2, 0.3, 0.4);
        let g = grid_search(&l, &t, &SearchConfig::default()).unwrap();
        for c in &g.candidates {
            assert!((c.area - 0.12).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_search_is_deterministic() {
        let (l, t) = specs(1.5, 1.1, 0.8);
        let cfg = SearchConfig::default();
        assert_eq!(grid_search(&l, &t, &cfg).unwrap(), grid_search(&l, &t, &cfg).unwrap());
    }

    #[test]
    fn refine_from_nearby_seed_reaches_corner() {
        let (l, t) = specs(1.5, 2.0, 2.0);
        let r = refine(&l, &t, &Pose::new(0.02, 0.03, 0.7), &SearchConfig::default()).unwrap();
        assert!((r.area - 0.25).abs() < 5e-4, "{r:?}");
        assert!(r.pose.cx < 1e-3 && r.pose.cy < 1e-3);
        assert!(axis_angle_distance(r.pose.theta, 3.0 * FRAC_PI_4) < 1e-3);
        assert!(r.iterations <= 200);
        assert!(r.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn refine_keeps_optimum_fixed() {
        let (l, t) = specs(1.5, 2.0, 2.0);
        let seed = symmetric_corner_pose(&t, Corner::LowerLeft);
        let r = refine(&l, &t, &seed, &SearchConfig::default()).unwrap();
        assert!(pose_distance(&r.pose, &seed) < 1e-6, "{r:?}");
        assert!((r.area - 0.25).abs() < 1e-12);
        assert!(r.area <= overlap_area(&l, &t, &seed));
    }

    #[test]
    fn refine_rejects_unstable_seed() {
        let (l, t) = specs(1.5, 2.0, 2.0);
        assert!(matches!(
            refine(&l, &t, &Pose::new(-0.1, 0.0, 0.0), &SearchConfig::default()),
            Err(OptimizeError::Placement(PlacementError::Unstable { .. }))
        ));
    }

    #[test]
    fn solve_rectangle_table() {
        let (l, t) = specs(1.6, 1.2, 1.8);
        let r = solve(&l, &t, &SearchConfig::default()).unwrap();
        assert!((r.min_area - 0.25).abs() < 5e-4);
        assert!(!r.is_tie_family);
        for c in &r.argmin {
            let corner = Corner::ALL
                .into_iter()
                .min_by(|a, b| a.point(&t).dist(c.pose.midpoint()).total_cmp(&b.point(&t).dist(c.pose.midpoint())))
                .unwrap();
            assert!(corner.point(&t).dist(c.pose.midpoint()) < 1e-3);
            assert!(axis_angle_distance(c.pose.theta, corner.symmetric_theta()) < 1e-3);
        }
    }

    #[test]
    fn square_laptop_is_a_tie_family() {
        let (l, t) = specs(1.0, 2.0, 2.0);
        let r = solve(&l, &t, &SearchConfig::default()).unwrap();
        assert!((r.min_area - 0.25).abs() < 5e-4);
        assert!(r.is_tie_family);
    }

    #[test]
    fn tiny_table_is_a_tie_family() {
        let (l, t) = specs(1.2, 0.3, 0.4);
        let r = solve(&l, &t, &SearchConfig::default()).unwrap();
        assert!((r.min_area - 0.12).abs() < 1e-9);
        assert!(r.is_tie_family);
    }
}
