//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a verification ran and failed, 2 on
//! invalid arguments or inputs that violate a check's preconditions.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use crate::analysis::{
    classify_regime, scenario2_analyze, sweep_tables, verify_bounds, verify_corner_constancy, verify_corner_sweep,
    AnalysisError, DEFAULT_PROBES,
};
use crate::optimizer::{solve, SearchConfig};
use crate::placement::{LaptopSpec, Pose, TableSpec};
use crate::report::{emit_csv, emit_json, render_svg, sig12, JsonDoc, Scene, DEFAULT_SCALE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "footprint", about = "Minimal-footprint laptop placement", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Find the stable placement with the smallest footprint
    Solve(SolveArgs),
    /// Run a numerical check
    Verify(VerifyArgs),
    /// Print the table-size regime
    Classify(ClassifyArgs),
    /// Solve a list of table sizes
    Sweep(SweepArgs),
    /// Draw a placement as SVG
    Render(RenderArgs),
}

#[derive(Debug, Args)]
struct ProblemArgs {
    /// Laptop long side, in laptop widths (>= 1)
    #[arg(long, value_name = "L")]
    laptop_length: f64,
    /// Table width, in laptop widths
    #[arg(long, value_name = "W")]
    table_w: f64,
    /// Table height, in laptop widths
    #[arg(long, value_name = "H")]
    table_h: f64,
}

impl ProblemArgs {
    fn specs(&self) -> Result<(LaptopSpec, TableSpec), String> {
        let laptop = LaptopSpec::new(self.laptop_length).map_err(|e| e.to_string())?;
        let table = TableSpec::new(self.table_w, self.table_h).map_err(|e| e.to_string())?;
        Ok((laptop, table))
    }
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Grid nodes per table axis
    #[arg(long, value_name = "N", default_value_t = 64)]
    grid_xy: usize,
    /// Grid orientations over [0, pi)
    #[arg(long, value_name = "N", default_value_t = 96)]
    grid_theta: usize,
    /// Grid nodes refined by pattern search
    #[arg(long, value_name = "N", default_value_t = 16)]
    top_k: usize,
    /// Pattern-search step at which refinement stops
    #[arg(long, value_name = "STEP", default_value = "1e-10")]
    refine_min_step: f64,
    /// Pattern-search iteration cap
    #[arg(long, value_name = "N", default_value_t = 200)]
    refine_max_iters: usize,
    /// Area difference under which optima tie
    #[arg(long, value_name = "TOL", default_value = "1e-6")]
    tie_tolerance: f64,
    /// Evaluate the whole grid instead of one quadrant
    #[arg(long)]
    no_symmetry: bool,
    /// Random seed
    #[arg(long, value_name = "SEED", default_value_t = 0)]
    seed: u64,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            grid_xy: self.grid_xy,
            grid_theta: self.grid_theta,
            top_k_seeds: self.top_k,
            refine_min_step: self.refine_min_step,
            refine_max_iters: self.refine_max_iters,
            tie_tolerance: self.tie_tolerance,
            use_symmetry_reduction: !self.no_symmetry,
            seed: self.seed,
            ..SearchConfig::default()
        }
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    search: SearchArgs,
    /// Write the result as JSON
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Draw the best placement as SVG
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyKind {
    Constancy,
    CornerSweep,
    Bounds,
    Scenario2,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Which check to run
    #[arg(long, value_enum)]
    kind: VerifyKind,
    #[command(flatten)]
    problem: ProblemArgs,
    /// Samples (orientations or poses) [default: 360 for constancy and corner-sweep, 100000 for bounds]
    #[arg(long, value_name = "N")]
    samples: Option<usize>,
    #[command(flatten)]
    search: SearchArgs,
    /// Write the report as JSON
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Random poses probed for small tables
    #[arg(long, value_name = "N", default_value_t = DEFAULT_PROBES)]
    probe_samples: usize,
    /// Random seed
    #[arg(long, value_name = "SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Laptop long side, in laptop widths (>= 1)
    #[arg(long, value_name = "L")]
    laptop_length: f64,
    /// Comma-separated table sizes, each S (square) or WxH
    #[arg(long, value_name = "LIST", value_parser = parse_sizes)]
    sizes: Sizes,
    #[command(flatten)]
    search: SearchArgs,
    /// Write the rows as CSV
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Write the rows as JSON
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Midpoint x [default: solved optimum]
    #[arg(long, value_name = "X")]
    cx: Option<f64>,
    /// Midpoint y [default: solved optimum]
    #[arg(long, value_name = "Y")]
    cy: Option<f64>,
    /// Long-axis angle in radians [default: solved optimum]
    #[arg(long, value_name = "RAD")]
    theta: Option<f64>,
    /// Pixels per laptop width
    #[arg(long, value_name = "PX", default_value_t = DEFAULT_SCALE)]
    scale: f64,
    /// Output path
    #[arg(long, value_name = "PATH")]
    svg: PathBuf,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Debug, Clone, PartialEq)]
struct Sizes(Vec<(f64, f64)>);

fn parse_sizes(s: &str) -> Result<Sizes, String> {
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("bad size {v:?}: {e}"));
    let sizes = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|item| match item.split_once(['x', 'X']) {
            Some((w, h)) => Ok((parse(w)?, parse(h)?)),
            None => parse(item).map(|v| (v, v)),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if sizes.is_empty() {
        return Err("no sizes given".into());
    }
    Ok(Sizes(sizes))
}

/// Usage text listing every subcommand and flag with its default.
pub fn print_usage() -> String {
    let cmd = Cli::command();
    let mut out = String::new();
    let _ = writeln!(out, "Usage: footprint <COMMAND> [FLAGS]");
    let _ = writeln!(out);
    let _ = writeln!(out, "All lengths are in laptop widths. Exit codes: 0 ok, 1 failed verification, 2 invalid arguments.");
    for sub in cmd.get_subcommands() {
        let _ = writeln!(out);
        let about = sub.get_about().map(|a| a.to_string()).unwrap_or_default();
        let _ = writeln!(out, "footprint {}  {}", sub.get_name(), about);
        for arg in sub.get_arguments() {
            let Some(long) = arg.get_long() else { continue };
            if long == "help" {
                continue;
            }
            let takes_value = arg.get_action().takes_values();
            let mut flag = format!("--{long}");
            if takes_value {
                let value = arg
                    .get_value_names()
                    .and_then(|v| v.first().map(|s| s.to_string()))
                    .unwrap_or_else(|| long.to_uppercase().replace('-', "_"));
                let _ = write!(flag, " <{value}>");
            }
            let help = arg.get_help().map(|h| h.to_string()).unwrap_or_default();
            let mut line = format!("    {flag:<28} {help}");
            let possible: Vec<String> = arg.get_possible_values().iter().map(|p| p.get_name().to_owned()).collect();
            if takes_value && !possible.is_empty() {
                let _ = write!(line, " [{}]", possible.join("|"));
            }
            if arg.is_required_set() {
                line.push_str(" (required)");
            } else if let Some(d) = arg.get_default_values().first() {
                if takes_value {
                    let _ = write!(line, " [default: {}]", d.to_string_lossy());
                }
            }
            let _ = writeln!(out, "{}", line.trim_end());
        }
    }
    out
}

enum Failure {
    Usage(String),
    Io(String),
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

/// Runs the CLI on `args` (without the program name), printing to the
/// process's standard streams.
pub fn run(args: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_io(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with_io(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if args.is_empty() {
        let _ = write!(err, "{}", print_usage());
        return EXIT_USAGE;
    }
    if args.iter().any(|a| a == "--help" || a == "-h" || a == "help") {
        let _ = write!(out, "{}", print_usage());
        return EXIT_OK;
    }
    let cli = match Cli::try_parse_from(std::iter::once("footprint".to_owned()).chain(args.iter().cloned())) {
        Ok(cli) => cli,
        Err(e) => {
            let msg = e.render().to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            let _ = writeln!(err, "{first}\n");
            let _ = write!(err, "{}", print_usage());
            return EXIT_USAGE;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}\n");
            let _ = write!(err, "{}", print_usage());
            EXIT_USAGE
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Solve(a) => {
            let (laptop, table) = a.problem.specs().map_err(Failure::Usage)?;
            let config = a.search.config();
            let result = solve(&laptop, &table, &config).map_err(|e| Failure::Usage(e.to_string()))?;
            if let Some(path) = &a.json {
                write_file(path, &emit_json(JsonDoc::Opt(&result)))?;
            }
            let best = result.best().pose;
            if let Some(path) = &a.svg {
                let scene = Scene::new(laptop, table, best).map_err(|e| Failure::Usage(e.to_string()))?;
                write_file(path, &render_svg(&scene, DEFAULT_SCALE))?;
            }
            let _ = writeln!(
                out,
                "min_area={} pose=({},{},{})",
                sig12(result.min_area),
                sig12(best.cx),
                sig12(best.cy),
                sig12(best.theta)
            );
            Ok(EXIT_OK)
        }
        Command::Verify(a) => {
            let (laptop, table) = a.problem.specs().map_err(Failure::Usage)?;
            if a.kind == VerifyKind::Scenario2 {
                let config = a.search.config();
                let r = scenario2_analyze(&laptop, &table, &config)?;
                if let Some(path) = &a.json {
                    write_file(path, &emit_json(JsonDoc::Scenario2(&r, &table)))?;
                }
                // the isosceles claim is made for square tables only
                let passed = !table.is_square() || r.isosceles;
                let _ = writeln!(
                    out,
                    "scenario2: {} legs=({},{}) leg_difference={} regime={}",
                    if passed { "PASS" } else { "FAIL" },
                    sig12(r.legs[0]),
                    sig12(r.legs[1]),
                    sig12(r.leg_difference),
                    r.regime
                );
                return Ok(if passed { EXIT_OK } else { EXIT_FAILED });
            }
            let report = match a.kind {
                VerifyKind::Constancy => verify_corner_constancy(&laptop, &table, a.samples.unwrap_or(360))?,
                VerifyKind::CornerSweep => verify_corner_sweep(&laptop, &table, a.samples.unwrap_or(360))?,
                VerifyKind::Bounds => verify_bounds(&laptop, &table, a.samples.unwrap_or(100_000), a.search.seed)?,
                VerifyKind::Scenario2 => unreachable!("handled above"),
            };
            if let Some(path) = &a.json {
                write_file(path, &emit_json(JsonDoc::Verification(&report)))?;
            }
            let _ = writeln!(
                out,
                "{}: {} max_deviation={} samples={}",
                report.name,
                if report.passed { "PASS" } else { "FAIL" },
                sig12(report.max_deviation),
                report.samples
            );
            Ok(if report.passed { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Classify(a) => {
            let (laptop, table) = a.problem.specs().map_err(Failure::Usage)?;
            let regime = classify_regime(&laptop, &table, a.probe_samples, a.seed);
            let _ = writeln!(out, "{regime}");
            Ok(EXIT_OK)
        }
        Command::Sweep(a) => {
            let laptop = LaptopSpec::new(a.laptop_length).map_err(|e| Failure::Usage(e.to_string()))?;
            let rows = sweep_tables(&laptop, &a.sizes.0, &a.search.config())?;
            if let Some(path) = &a.csv {
                write_file(path, &emit_csv(&rows))?;
            }
            if let Some(path) = &a.json {
                write_file(path, &emit_json(JsonDoc::Sweep(&rows)))?;
            }
            let lo = rows.iter().map(|r| r.min_area).fold(f64::INFINITY, f64::min);
            let hi = rows.iter().map(|r| r.min_area).fold(f64::NEG_INFINITY, f64::max);
            let _ = writeln!(out, "sweep: {} rows min_area in [{}, {}]", rows.len(), sig12(lo), sig12(hi));
            Ok(EXIT_OK)
        }
        Command::Render(a) => {
            let (laptop, table) = a.problem.specs().map_err(Failure::Usage)?;
            if !(a.scale.is_finite() && a.scale > 0.0) {
                return Err(Failure::Usage("--scale must be positive".into()));
            }
            let pose = match (a.cx, a.cy, a.theta) {
                (Some(cx), Some(cy), Some(theta)) => Pose::new(cx, cy, theta),
                (None, None, None) => {
                    solve(&laptop, &table, &a.search.config())
                        .map_err(|e| Failure::Usage(e.to_string()))?
                        .best()
                        .pose
                }
                _ => return Err(Failure::Usage("--cx, --cy and --theta go together".into())),
            };
            let scene = Scene::new(laptop, table, pose).map_err(|e| Failure::Usage(e.to_string()))?;
            write_file(&a.svg, &render_svg(&scene, a.scale))?;
            let _ = writeln!(out, "wrote {} area={}", a.svg.display(), sig12(scene.footprint.area));
            Ok(EXIT_OK)
        }
    }
}
