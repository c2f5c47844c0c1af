//! Batch command-line interface: schemes, window builders, projections and
//! dynamical diagnostics, with reproducible run manifests and SVG output.
//!
//! Exit codes: 0 ok, 1 analysis inconclusive, 2 usage or configuration
//! error, 3 internal invariant violation (e.g. a replay that diverges).

mod config;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cantorcut_core::cps::{cut_and_project, reference_scheme, CpsScheme};
use cantorcut_core::deterministic::{deterministic_window, weak_window};
use cantorcut_core::dynamics::{
    density_estimate, entropy_lower_estimate, free_points, genericity_check,
    metric_independence_check, pattern_scan, topological_independence_check,
    unique_ergodicity_diagnostic, verify_pattern_at, ErgodicityVerdict, GenericityVerdict,
    PatternQuery,
};
use cantorcut_core::error::{ProjectError, SearchError};
use cantorcut_core::interval::{Interval, IntervalSet};
use cantorcut_core::manifest::{sha256_hex, RunManifest};
use cantorcut_core::random_window::{build_window, properness_report, BuiltWindow, GapSelection};
use cantorcut_core::rat::{fmt_rat, Rat};
use cantorcut_core::real::Real;
use cantorcut_core::svg::{point_ticks_svg, window_bars_svg};
use cantorcut_core::window::{CantorScheme, WindowApprox};
use num_traits::ToPrimitive;

use config::{BuilderSpec, Config};

// ---------------------------------------------------------------------------
// Error taxonomy → exit codes
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub enum CliError {
    /// Wrong invocation or unreadable input: exit 2.
    Usage(String),
    /// Configuration schema violation, located by JSON pointer: exit 2.
    Config { pointer: String, detail: String },
    /// The analysis could not reach a verdict with the given resources
    /// (radius, depth, budget): exit 1.
    Inconclusive(String),
    /// An invariant the tool itself guarantees was violated: exit 3.
    Internal(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 2,
            CliError::Inconclusive(_) => 1,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "error: {s}"),
            CliError::Config { pointer, detail } => {
                let p = if pointer.is_empty() { "/" } else { pointer };
                write!(f, "config error at {p}: {detail}")
            }
            CliError::Inconclusive(s) => write!(f, "inconclusive: {s}"),
            CliError::Internal(s) => write!(f, "invariant violation: {s}"),
        }
    }
}

fn inconclusive(e: SearchError) -> CliError {
    CliError::Inconclusive(e.to_string())
}

fn project_err(e: ProjectError) -> CliError {
    match e {
        ProjectError::Window(w) => CliError::Config {
            pointer: "/window".into(),
            detail: w.to_string(),
        },
        ProjectError::Search(s) => inconclusive(s),
    }
}

fn io_err(what: &str, path: &Path, e: std::io::Error) -> CliError {
    CliError::Usage(format!("cannot {what} {}: {e}", path.display()))
}

// ---------------------------------------------------------------------------
// Command line
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(
    name = "cantorcut",
    version,
    about = "Cut-and-project model sets with fractal windows: build, project, analyze",
    after_help = "Exit codes: 0 ok, 1 analysis inconclusive, 2 usage/config error, \
                  3 internal invariant violation."
)]
struct Cli {
    /// JSON configuration file (all keys optional).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for artifacts and the run manifest.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Root seed override; all randomness derives from it per component.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Window truncation depth override.
    #[arg(long, global = true)]
    depth: Option<u32>,
    /// Scan radius override (rounded to an integer).
    #[arg(long, global = true)]
    radius: Option<f64>,
    /// Box radii override, comma-separated (rounded to integers).
    #[arg(long, global = true, value_delimiter = ',')]
    t: Option<Vec<f64>>,
    /// Replay a recorded run manifest and verify all artifacts byte-for-byte.
    #[arg(long, global = true, value_name = "MANIFEST")]
    replay: Option<PathBuf>,
    /// Also write tabular artifacts as CSV.
    #[arg(long, global = true, value_enum)]
    format: Option<OutFormat>,
    /// Copy the window SVG to this path (render subcommand).
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Projection-scheme checks.
    Scheme {
        #[command(subcommand)]
        cmd: SchemeCmd,
    },
    /// Build and audit windows over Cantor-type carriers.
    Window {
        #[command(subcommand)]
        cmd: WindowCmd,
    },
    /// Cut a box patch out of the projected point set.
    Project,
    /// Empirical point densities over growing boxes vs. the measure targets.
    Density,
    /// Local independence certificates for pattern translates.
    Independence {
        #[command(subcommand)]
        cmd: IndependenceCmd,
    },
    /// Hunt verified witnesses for every pattern on the free base points.
    Witness,
    /// Certified configurational-entropy lower bounds from pattern counts.
    Entropy,
    /// Boundary-vs-generic dichotomy for the window translate h.
    Generic,
    /// Density-surplus diagnostic against unique ergodicity.
    Ergodicity,
    /// Deterministic SVG figures: window sandwich bars and point ticks.
    Render,
}

#[derive(Subcommand, Debug)]
enum SchemeCmd {
    /// Validate the scheme and print its determinant.
    Validate,
}

#[derive(Subcommand, Debug)]
enum WindowCmd {
    /// Build the window and write its full descriptor.
    Build,
    /// Exact inner/outer measures of the window sandwich.
    Measure,
    /// Audit the two-sided (properness) approximation of gap endpoints.
    Properness,
}

#[derive(Subcommand, Debug)]
enum IndependenceCmd {
    /// Nested open-interval witnesses for every pattern (topological).
    Top,
    /// Exact positive measures for every pattern (metric).
    Metric,
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(run(args));
}

fn run(args: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    if let Some(manifest_path) = cli.replay.clone() {
        return match replay_run(&manifest_path, &cli) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("{e}");
                e.code()
            }
        };
    }
    if cli.cmd.is_none() {
        eprintln!("error: a subcommand or --replay MANIFEST is required (see --help)");
        return 2;
    }
    let record_args: Vec<String> = args.iter().skip(1).cloned().collect();
    match execute(cli, record_args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.code()
        }
    }
}

// ---------------------------------------------------------------------------
// Artifact plumbing
// ---------------------------------------------------------------------------

const MANIFEST_NAME: &str = "manifest.json";

struct Runner {
    out: PathBuf,
    manifest: RunManifest,
    csv_requested: bool,
    clock: Instant,
}

impl Runner {
    fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        self.manifest.record_artifact(name, bytes);
        let path = self.out.join(name);
        std::fs::write(&path, bytes).map_err(|e| io_err("write", &path, e))
    }

    /// JSON artifact; a `manifest` field naming the run manifest is added.
    fn write_json(&mut self, name: &str, value: &impl serde::Serialize) -> Result<(), CliError> {
        let mut v = serde_json::to_value(value)
            .map_err(|e| CliError::Internal(format!("serialization failed: {e}")))?;
        if let Some(obj) = v.as_object_mut() {
            obj.insert("manifest".into(), Value::String(MANIFEST_NAME.into()));
        }
        let mut bytes = serde_json::to_vec_pretty(&v)
            .map_err(|e| CliError::Internal(format!("serialization failed: {e}")))?;
        bytes.push(b'\n');
        self.write_bytes(name, &bytes)
    }

    /// CSV artifact; the first line names the run manifest.
    fn write_csv(&mut self, name: &str, header: &str, rows: &[String]) -> Result<(), CliError> {
        let mut s = format!("# manifest: {MANIFEST_NAME}\n{header}\n");
        for row in rows {
            s.push_str(row);
            s.push('\n');
        }
        self.write_bytes(name, s.as_bytes())
    }

    /// SVG artifact; a leading comment names the run manifest.
    fn write_svg(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let s = format!("<!-- manifest: {MANIFEST_NAME} -->\n{body}");
        self.write_bytes(name, s.as_bytes())
    }

    fn finish(mut self, stage: &str) -> Result<(), CliError> {
        self.manifest
            .record_stage(stage, self.clock.elapsed().as_millis() as u64);
        let path = self.out.join(MANIFEST_NAME);
        std::fs::write(&path, self.manifest.to_json_pretty())
            .map_err(|e| io_err("write", &path, e))
    }
}

// ---------------------------------------------------------------------------
// Window assembly from the configuration
// ---------------------------------------------------------------------------

enum WindowBuild {
    Selection {
        built: BuiltWindow,
        selection: GapSelection,
    },
    /// Residual or exactly given windows: nothing beyond the sandwich.
    Plain(WindowApprox),
    Deterministic(cantorcut_core::deterministic::DeterministicWindow),
    Weak(cantorcut_core::deterministic::WeakWindow),
}

impl WindowBuild {
    fn approx(&self) -> &WindowApprox {
        match self {
            WindowBuild::Selection { built, .. } => &built.approx,
            WindowBuild::Plain(w) => w,
            WindowBuild::Deterministic(dw) => &dw.window,
            WindowBuild::Weak(ww) => &ww.window,
        }
    }

    /// Full JSON descriptor of the built window.
    fn descriptor(&self) -> Result<Value, CliError> {
        let v = match self {
            WindowBuild::Selection { built, .. } => serde_json::to_value(built),
            WindowBuild::Plain(w) => serde_json::to_value(w),
            WindowBuild::Deterministic(dw) => serde_json::to_value(dw),
            WindowBuild::Weak(ww) => serde_json::to_value(ww),
        };
        v.map_err(|e| CliError::Internal(format!("serialization failed: {e}")))
    }

    /// Anchor base stars, when the builder provides them.
    fn anchor_stars(&self, n: usize) -> Option<Vec<Rat>> {
        let base = match self {
            WindowBuild::Deterministic(dw) => &dw.base,
            WindowBuild::Weak(ww) => &ww.base,
            _ => return None,
        };
        if base.intervals.len() < n {
            return None;
        }
        Some(base.intervals[..n].iter().map(|iv| iv.lo.clone()).collect())
    }
}

fn carrier_scheme(cfg: &Config) -> CantorScheme {
    CantorScheme::new(cfg.carrier.clone()).expect("carrier was validated while loading")
}

fn assemble_window(
    s: &CpsScheme,
    cfg: &Config,
    manifest: &mut RunManifest,
) -> Result<WindowBuild, CliError> {
    let carrier = carrier_scheme(cfg);
    match &cfg.builder {
        BuilderSpec::Residual => Ok(WindowBuild::Plain(carrier.residual_approx(cfg.depth))),
        BuilderSpec::Exact { parts } => {
            let set = IntervalSet::from_parts(
                parts
                    .iter()
                    .map(|(lo, hi)| Interval::closed(lo.clone(), hi.clone()))
                    .collect(),
            );
            let label = format!("exact ({} parts)", parts.len());
            Ok(WindowBuild::Plain(WindowApprox::exact(&set, label)))
        }
        BuilderSpec::Random { seed, p } => {
            let seed = seed.unwrap_or_else(|| manifest.seed_for("window-builder"));
            let selection = GapSelection::Bernoulli {
                seed,
                p: p.clone(),
            };
            let built = build_window(&carrier, &selection, cfg.depth);
            Ok(WindowBuild::Selection { built, selection })
        }
        BuilderSpec::Explicit { bits } => {
            let selection = GapSelection::Explicit { bits: bits.clone() };
            let built = build_window(&carrier, &selection, cfg.depth);
            Ok(WindowBuild::Selection { built, selection })
        }
        BuilderSpec::Family { j } => {
            let selection = GapSelection::Family { j: *j };
            let built = build_window(&carrier, &selection, cfg.depth);
            Ok(WindowBuild::Selection { built, selection })
        }
        BuilderSpec::Deterministic { anchors } => deterministic_window(s, *anchors, cfg.depth)
            .map(WindowBuild::Deterministic)
            .map_err(inconclusive),
        BuilderSpec::Weak { anchors, insert } => {
            let m = CantorScheme::new(insert.clone()).expect("validated while loading");
            weak_window(s, *anchors, cfg.depth, &m)
                .map(WindowBuild::Weak)
                .map_err(inconclusive)
        }
    }
}

/// Free base points for pattern analyses: the first `basePoints` free
/// points in the ±freeT box.
fn base_points(
    s: &CpsScheme,
    cfg: &Config,
) -> Result<(Vec<Vec<i64>>, Vec<Rat>), CliError> {
    let carrier = carrier_scheme(cfg);
    let pool = free_points(s, &carrier, &cfg.h, cfg.free_t, cfg.depth).map_err(inconclusive)?;
    if pool.points.len() < cfg.base_points {
        return Err(CliError::Inconclusive(format!(
            "only {} free points within ±{}; raise freeT or lower basePoints",
            pool.points.len(),
            cfg.free_t
        )));
    }
    Ok((
        pool.points[..cfg.base_points].to_vec(),
        pool.stars[..cfg.base_points].to_vec(),
    ))
}

fn f64_of(x: &Rat) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

fn execute(cli: Cli, record_args: Vec<String>) -> Result<i32, CliError> {
    let config_bytes = config::load_bytes(cli.config.as_deref())?;
    let mut cfg = config::from_bytes(&config_bytes)?;

    // Flags override the file.
    if let Some(seed) = cli.seed {
        cfg.root_seed = seed;
    }
    if let Some(depth) = cli.depth {
        if depth > 24 {
            return Err(CliError::Usage("depth above 24 is not materializable".into()));
        }
        cfg.depth = depth;
    }
    if let Some(radius) = cli.radius {
        let r = radius.round() as i64;
        if r < 1 {
            return Err(CliError::Usage("scan radius must be ≥ 1".into()));
        }
        cfg.radius = r;
    }
    if let Some(ts) = &cli.t {
        if ts.is_empty() {
            return Err(CliError::Usage("expected at least one box radius".into()));
        }
        let mut out = Vec::with_capacity(ts.len());
        for &x in ts {
            let t = x.round() as i64;
            if t < 1 {
                return Err(CliError::Usage("box radii must be ≥ 1".into()));
            }
            out.push(t);
        }
        cfg.t = out;
    }

    let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out_dir).map_err(|e| io_err("create", &out_dir, e))?;

    let mut manifest = RunManifest::new(record_args, &config_bytes, cfg.root_seed);
    manifest.set_parameter("depth", cfg.depth.to_string());
    manifest.set_parameter("radius", cfg.radius.to_string());
    manifest.set_parameter(
        "t",
        cfg.t.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","),
    );
    manifest.set_parameter("theta", fmt_rat(&cfg.theta));
    manifest.set_parameter("h", fmt_rat(&cfg.h));
    manifest.set_parameter("freeT", cfg.free_t.to_string());
    manifest.set_parameter("basePoints", cfg.base_points.to_string());
    manifest.set_parameter("levels", cfg.levels.to_string());
    manifest.set_parameter("tolerance", fmt_rat(&cfg.tolerance));
    manifest.set_parameter("margin", cfg.margin.to_string());
    manifest.set_parameter(
        "carrier",
        serde_json::to_string(&cfg.carrier).expect("carrier serializes"),
    );
    manifest.set_parameter("builder", cfg.builder.name());

    let mut runner = Runner {
        out: out_dir,
        manifest,
        csv_requested: cli.format == Some(OutFormat::Csv),
        clock: Instant::now(),
    };

    let cmd = cli.cmd.expect("checked by the caller");
    let stage = stage_name(&cmd);
    let s = reference_scheme();
    let code = match &cmd {
        Command::Scheme { cmd: SchemeCmd::Validate } => cmd_scheme_validate(&s, &mut runner)?,
        Command::Window { cmd: which } => cmd_window(&s, &cfg, &mut runner, which)?,
        Command::Project => cmd_project(&s, &cfg, &mut runner)?,
        Command::Density => cmd_density(&s, &cfg, &mut runner)?,
        Command::Independence { cmd: which } => cmd_independence(&s, &cfg, &mut runner, which)?,
        Command::Witness => cmd_witness(&s, &cfg, &mut runner)?,
        Command::Entropy => cmd_entropy(&s, &cfg, &mut runner)?,
        Command::Generic => cmd_generic(&s, &cfg, &mut runner)?,
        Command::Ergodicity => cmd_ergodicity(&s, &cfg, &mut runner)?,
        Command::Render => cmd_render(&s, &cfg, &mut runner, cli.svg.as_deref())?,
    };
    runner.finish(stage)?;
    Ok(code)
}

fn stage_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Scheme { .. } => "scheme",
        Command::Window { cmd: WindowCmd::Build } => "window-build",
        Command::Window { cmd: WindowCmd::Measure } => "window-measure",
        Command::Window { cmd: WindowCmd::Properness } => "window-properness",
        Command::Project => "project",
        Command::Density => "density",
        Command::Independence { cmd: IndependenceCmd::Top } => "independence-top",
        Command::Independence { cmd: IndependenceCmd::Metric } => "independence-metric",
        Command::Witness => "witness",
        Command::Entropy => "entropy",
        Command::Generic => "generic",
        Command::Ergodicity => "ergodicity",
        Command::Render => "render",
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_scheme_validate(s: &CpsScheme, r: &mut Runner) -> Result<i32, CliError> {
    let det = s.det();
    let det_f = f64_of(det);
    let report = json!({
        "schema": "scheme/1",
        "dim": s.n(),
        "det": fmt_rat(det),
        "detAbsF64": det_f.abs(),
        "covolumeInverse": 1.0 / det_f.abs(),
        "tau": s.phys_of(&[0, 1])[0].to_string(),
        "alpha": s.star_of(&[1, 0]).to_string(),
        "valid": true,
    });
    r.write_json("scheme.json", &report)?;
    println!(
        "scheme ok: N={}, det A = {:.10} (1/|det A| = {:.10})",
        s.n(),
        det_f,
        1.0 / det_f.abs()
    );
    Ok(0)
}

fn cmd_window(
    s: &CpsScheme,
    cfg: &Config,
    r: &mut Runner,
    which: &WindowCmd,
) -> Result<i32, CliError> {
    let build = assemble_window(s, cfg, &mut r.manifest)?;
    let w = build.approx();
    w.validate()
        .map_err(|e| CliError::Internal(format!("built window failed validation: {e}")))?;
    match which {
        WindowCmd::Build => {
            let wrapper = json!({
                "schema": "window-build/1",
                "builder": cfg.builder.name(),
                "carrier": cfg.carrier,
                "depth": cfg.depth,
                "label": w.label,
                "window": build.descriptor()?,
            });
            r.write_json("window.json", &wrapper)?;
            println!(
                "window built: {} — inner measure {:.6}, outer measure {:.6}",
                w.label,
                f64_of(&w.meas_inner()),
                f64_of(&w.meas_outer())
            );
            Ok(0)
        }
        WindowCmd::Measure => {
            let carrier = carrier_scheme(cfg);
            let inner = w.meas_inner();
            let outer = w.meas_outer();
            let report = json!({
                "schema": "window-measure/1",
                "label": w.label,
                "depth": w.depth,
                "measInner": fmt_rat(&inner),
                "measInnerF64": f64_of(&inner),
                "measOuter": fmt_rat(&outer),
                "measOuterF64": f64_of(&outer),
                "undecided": fmt_rat(&(&outer - &inner)),
                "carrierLimitMeasure": fmt_rat(&carrier.limit_measure()),
            });
            r.write_json("measures.json", &report)?;
            if r.csv_requested {
                let row = format!(
                    "{},{},{},{:.12},{:.12}",
                    w.depth,
                    fmt_rat(&inner),
                    fmt_rat(&outer),
                    f64_of(&inner),
                    f64_of(&outer)
                );
                r.write_csv(
                    "measures.csv",
                    "depth,measInner,measOuter,measInnerF64,measOuterF64",
                    &[row],
                )?;
            }
            println!(
                "measures: inner {} = {:.6}, outer {} = {:.6} (undecided {:.6})",
                fmt_rat(&inner),
                f64_of(&inner),
                fmt_rat(&outer),
                f64_of(&outer),
                f64_of(&(&outer - &inner))
            );
            Ok(0)
        }
        WindowCmd::Properness => {
            let WindowBuild::Selection { built, selection } = &build else {
                return Err(CliError::Config {
                    pointer: "/window/builder/type".into(),
                    detail: "the properness audit needs a gap-selection builder \
                             (random, explicit, or family)"
                        .into(),
                });
            };
            let carrier = carrier_scheme(cfg);
            let report = properness_report(&carrier, built, selection);
            let complete = report.endpoints_ok == report.endpoints_total;
            let wrapper = json!({
                "schema": "window-properness/1",
                "label": w.label,
                "report": report,
                "complete": complete,
            });
            r.write_json("properness.json", &wrapper)?;
            println!(
                "properness audit: {}/{} endpoints approximated from both sides \
                 (stage {}, audit distance {})",
                report.endpoints_ok,
                report.endpoints_total,
                report.audited_stage,
                fmt_rat(&report.audit_distance)
            );
            Ok(if complete { 0 } else { 1 })
        }
    }
}

fn cmd_project(s: &CpsScheme, cfg: &Config, r: &mut Runner) -> Result<i32, CliError> {
    let build = assemble_window(s, cfg, &mut r.manifest)?;
    let t = cfg.t[0];
    let proj = cut_and_project(s, build.approx(), &Real::from_rat(&cfg.theta), t)
        .map_err(project_err)?;
    r.write_json("points.json", &proj)?;
    if r.csv_requested {
        let rows: Vec<String> = proj
            .points
            .iter()
            .map(|p| {
                format!(
                    "{},{},{},{:?}",
                    p.u[0],
                    p.u[1],
                    p.star,
                    p.verdict
                )
            })
            .collect();
        r.write_csv("points.csv", "u0,u1,star,verdict", &rows)?;
    }
    println!(
        "projected {} points at t={t}: {} certified, {} boundary-undecided",
        proj.points.len(),
        proj.certified_in,
        proj.boundary
    );
    Ok(0)
}

fn density_csv_rows(table: &cantorcut_core::dynamics::DensityTable) -> Vec<String> {
    table
        .rows
        .iter()
        .map(|row| {
            format!(
                "{},{},{},{:.12},{:.12},{:.12},{:.12}",
                row.t,
                row.count_inner,
                row.count_outer,
                row.dens_inner,
                row.dens_outer,
                row.target_lower,
                row.target_upper
            )
        })
        .collect()
}

fn cmd_density(s: &CpsScheme, cfg: &Config, r: &mut Runner) -> Result<i32, CliError> {
    let build = assemble_window(s, cfg, &mut r.manifest)?;
    let table = density_estimate(s, build.approx(), &cfg.theta, &cfg.t).map_err(project_err)?;
    r.write_json("density.json", &table)?;
    if r.csv_requested {
        r.write_csv(
            "density.csv",
            "t,countInner,countOuter,densInner,densOuter,targetLower,targetUpper",
            &density_csv_rows(&table),
        )?;
    }
    for row in &table.rows {
        println!(
            "t={}: density in [{:.6}, {:.6}], target [{:.6}, {:.6}]",
            row.t, row.dens_inner, row.dens_outer, row.target_lower, row.target_upper
        );
    }
    Ok(0)
}

fn cmd_independence(
    s: &CpsScheme,
    cfg: &Config,
    r: &mut Runner,
    which: &IndependenceCmd,
) -> Result<i32, CliError> {
    let build = assemble_window(s, cfg, &mut r.manifest)?;
    // Anchored builders carry their own base stars; otherwise use the free
    // points of the carrier.
    let stars = match build.anchor_stars(cfg.base_points) {
        Some(stars) => stars,
        None => base_points(s, cfg)?.1,
    };
    match which {
        IndependenceCmd::Top => {
            let report =
                topological_independence_check(build.approx(), &cfg.h, &stars, cfg.levels);
            r.write_json("independence-top.json", &report)?;
            let witnessed = report
                .patterns
                .iter()
                .filter(|p| p.failed_level.is_none())
                .count();
            println!(
                "topological independence: {}/{} patterns witnessed to level {}",
                witnessed,
                report.patterns.len(),
                report.levels
            );
            Ok(if report.all_witnessed { 0 } else { 1 })
        }
        IndependenceCmd::Metric => {
            let report = metric_independence_check(build.approx(), &cfg.h, &stars);
            r.write_json("independence-metric.json", &report)?;
            let positive = report.rows.iter().filter(|row| row.positive).count();
            let min = report
                .rows
                .iter()
                .map(|row| row.measure_f64)
                .fold(f64::INFINITY, f64::min);
            println!(
                "metric independence: {}/{} pattern measures positive (min {:.3e}); \
                 verdict is exact either way",
                positive,
                report.rows.len(),
                min
            );
            Ok(0)
        }
    }
}

fn cmd_witness(s: &CpsScheme, cfg: &Config, r: &mut Runner) -> Result<i32, CliError> {
    let build = assemble_window(s, cfg, &mut r.manifest)?;
    let w = build.approx();
    let (f_pts, f_stars) = base_points(s, cfg)?;
    let scan = pattern_scan(s, w, &cfg.h, &cfg.theta, &f_stars, cfg.radius)
        .map_err(inconclusive)?;
    let n = f_stars.len();
    let mut rows = Vec::with_capacity(1 << n);
    let mut found = 0usize;
    let mut verified = 0usize;
    for code in 0u64..(1u64 << n) {
        let bits: Vec<bool> = (0..n).map(|i| code >> i & 1 == 1).collect();
        match scan.buckets.get(&bits) {
            Some((m, mbar)) => {
                let q = PatternQuery {
                    f: f_pts.clone(),
                    a: bits.clone(),
                    h: cfg.h.clone(),
                    theta: cfg.theta.clone(),
                };
                let (ok, mbar_star) = verify_pattern_at(s, w, &q, m);
                let confirmed = ok && &mbar_star == mbar;
                found += 1;
                if confirmed {
                    verified += 1;
                }
                rows.push(json!({
                    "bits": bits,
                    "found": true,
                    "m": m,
                    "mbarStar": fmt_rat(&mbar_star),
                    "verified": confirmed,
                }));
            }
            None => rows.push(json!({ "bits": bits, "found": false })),
        }
    }
    let all = 1usize << n;
    let report = json!({
        "schema": "fullshift-witness/1",
        "radius": cfg.radius,
        "basePoints": f_pts,
        "baseStars": f_stars.iter().map(fmt_rat).collect::<Vec<_>>(),
        "tested": scan.tested,
        "uncertain": scan.uncertain,
        "patterns": rows,
        "patternsFound": found,
        "patternsTotal": all,
        "allFoundAndVerified": found == all && verified == all,
    });
    r.write_json("witnesses.json", &report)?;
    println!(
        "fullshift witnesses: {found}/{all} patterns realized within radius {} \
         ({verified} re-verified; {} candidates, {} undecided)",
        cfg.radius, scan.tested, scan.uncertain
    );
    Ok(if found == all && verified == all { 0 } else { 1 })
}

fn cmd_entropy(s: &CpsScheme, cfg: &Config, r: &mut Runner) -> Result<i32, CliError> {
    let build = assemble_window(s, cfg, &mut r.manifest)?;
    let carrier = carrier_scheme(cfg);
    let free =
        free_points(s, &carrier, &cfg.h, cfg.free_t, cfg.depth).map_err(inconclusive)?;
    let report = entropy_lower_estimate(
        s,
        build.approx(),
        &cfg.theta,
        &free,
        &carrier,
        &cfg.t,
        cfg.radius,
    )
    .map_err(inconclusive)?;
    r.write_json("entropy.json", &report)?;
    let rows: Vec<String> = report
        .rows
        .iter()
        .map(|row| {
            format!(
                "{},{},{},{:.12},{:.12},{:.12},{:.12}",
                row.t,
                row.f_count,
                row.patterns_realized,
                row.lower_bound_nats,
                row.lower_bound_bits,
                row.target_free_density_nats,
                row.target_carrier_nats
            )
        })
        .collect();
    r.write_csv(
        "entropy.csv",
        "t,fCount,patternsRealized,lowerBoundNats,lowerBoundBits,\
         targetFreeDensityNats,targetCarrierNats",
        &rows,
    )?;
    for row in &report.rows {
        println!(
            "t={}: {} base points, {} patterns realized, lower bound {:.4} nats \
             (free-density target {:.4}, carrier ceiling {:.4})",
            row.t,
            row.f_count,
            row.patterns_realized,
            row.lower_bound_nats,
            row.target_free_density_nats,
            row.target_carrier_nats
        );
    }
    Ok(0)
}

fn cmd_generic(s: &CpsScheme, cfg: &Config, r: &mut Runner) -> Result<i32, CliError> {
    let build = assemble_window(s, cfg, &mut r.manifest)?;
    let h = match &cfg.h_from_lattice {
        Some((l, offset)) => s.star_of(l).to_rat() - offset,
        None => cfg.h.clone(),
    };
    r.manifest.set_parameter("hEffective", fmt_rat(&h));
    let report = genericity_check(s, build.approx(), &h, cfg.radius, &cfg.tolerance)
        .map_err(inconclusive)?;
    r.write_json("generic.json", &report)?;
    let code = match &report.verdict {
        GenericityVerdict::NonGeneric { l, l_star } => {
            println!(
                "non-generic: lattice point {l:?} has star value {l_star} inside the \
                 depth-{} boundary enclosure ({} stars scanned)",
                report.depth, report.scanned
            );
            0
        }
        GenericityVerdict::GenericAtDepth => {
            println!(
                "generic at this depth: no boundary hit within tolerance {} over {} \
                 scanned stars (radius {})",
                fmt_rat(&cfg.tolerance),
                report.scanned,
                cfg.radius
            );
            0
        }
        GenericityVerdict::Uncertain { near_misses } => {
            println!(
                "uncertain: {near_misses} star values within tolerance of a boundary \
                 endpoint; refine the depth or tolerance"
            );
            1
        }
    };
    Ok(code)
}

fn cmd_ergodicity(s: &CpsScheme, cfg: &Config, r: &mut Runner) -> Result<i32, CliError> {
    let build = assemble_window(s, cfg, &mut r.manifest)?;
    let carrier = carrier_scheme(cfg);
    let free =
        free_points(s, &carrier, &cfg.h, cfg.free_t, cfg.depth).map_err(inconclusive)?;
    let nu_u = cfg
        .nu_max
        .unwrap_or_else(|| 1.0 / f64_of(s.det()).abs());
    let report = unique_ergodicity_diagnostic(
        s,
        build.approx(),
        &cfg.theta,
        &free,
        free.t,
        cfg.radius,
        nu_u,
        cfg.margin,
    )
    .map_err(inconclusive)?;
    r.write_json("ergodicity.json", &report)?;
    let code = match report.verdict {
        ErgodicityVerdict::NotUniquelyErgodic => {
            println!(
                "not uniquely ergodic: free-point density {:.4} exceeds {:.4}/2 + {:.2} \
                 (ones/zeros counts {} vs {}, gap {})",
                report.nu_s,
                report.nu_u,
                report.margin,
                report.ones_count,
                report.zeros_count,
                report.count_gap
            );
            0
        }
        _ => {
            println!(
                "inconclusive: free-point density {:.4} does not clear {:.4}/2 + {:.2}",
                report.nu_s, report.nu_u, report.margin
            );
            1
        }
    };
    Ok(code)
}

fn cmd_render(
    s: &CpsScheme,
    cfg: &Config,
    r: &mut Runner,
    svg_copy: Option<&Path>,
) -> Result<i32, CliError> {
    let build = assemble_window(s, cfg, &mut r.manifest)?;
    let w = build.approx();
    r.write_svg("window.svg", &window_bars_svg(w, 800, 120))?;
    let t = cfg.t[0];
    let proj = cut_and_project(s, w, &Real::from_rat(&cfg.theta), t).map_err(project_err)?;
    let phys: Vec<f64> = proj
        .points
        .iter()
        .map(|p| s.phys_of(&p.u)[0].to_f64())
        .collect();
    r.write_svg("points.svg", &point_ticks_svg(&phys, t as f64, 800, 80))?;
    if let Some(dest) = svg_copy {
        let src = r.out.join("window.svg");
        std::fs::copy(&src, dest).map_err(|e| io_err("copy window.svg to", dest, e))?;
    }
    println!(
        "rendered window.svg and points.svg ({} ticks at t={t})",
        phys.len()
    );
    Ok(0)
}

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

fn replay_run(manifest_path: &Path, outer: &Cli) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(manifest_path)
        .map_err(|e| io_err("read", manifest_path, e))?;
    let recorded = RunManifest::from_json(&text)
        .map_err(|e| CliError::Usage(format!("bad manifest: {e}")))?;

    let mut argv = vec!["cantorcut".to_string()];
    argv.extend(recorded.command_line.iter().cloned());
    let mut rcli = Cli::try_parse_from(&argv).map_err(|e| {
        CliError::Usage(format!("recorded command line does not parse: {e}"))
    })?;
    if rcli.replay.is_some() {
        return Err(CliError::Usage(
            "recorded command line itself contains --replay".into(),
        ));
    }
    if rcli.cmd.is_none() {
        return Err(CliError::Usage("recorded command line has no subcommand".into()));
    }

    // The configuration must be the one that was recorded.
    let config_bytes = config::load_bytes(rcli.config.as_deref())?;
    if sha256_hex(&config_bytes) != recorded.config_digest {
        return Err(CliError::Usage(
            "configuration changed since the recorded run (digest mismatch); \
             replay would not be meaningful"
                .into(),
        ));
    }

    let scratch = outer
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out"))
        .join("replay");
    rcli.out = Some(scratch.clone());
    rcli.svg = None;
    let code = execute(rcli, recorded.command_line.clone())?;

    let mut reproduced = BTreeMap::new();
    for a in &recorded.artifacts {
        let path = scratch.join(&a.name);
        let bytes = std::fs::read(&path).map_err(|e| {
            CliError::Internal(format!("replay did not produce artifact {}: {e}", a.name))
        })?;
        recorded
            .verify_artifact(&a.name, &bytes)
            .map_err(|e| CliError::Internal(format!("replay diverged: {e}")))?;
        reproduced.insert(a.name.clone(), bytes.len());
    }
    println!(
        "replay ok: {} artifacts reproduced bit-identically in {}",
        reproduced.len(),
        scratch.display()
    );
    Ok(code)
}
