//! The `mcmullen` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand};
use mcmullen_core::cantor::CantorIfs;
use mcmullen_core::geometry::{carpet_report, extract_peripheral_with, ExtractOptions, GeometryError};
use mcmullen_core::surgery::{SurgeryConfig, SurgeryMap};
use mcmullen_core::trichotomy::{bracket_real, classify, verdict_code, TrichotomyError};
use mcmullen_core::{Bounds, ClassifierConfig, Complex64, Exponents, MapParams, PayloadKind, VerdictClass};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{parse_bounds, parse_complex, Config};
use crate::error::exit;
use crate::gridio::{grid_sha256, read_grid, write_grid};
use crate::image::{encode_png, ImageSpec};
use crate::render::{render_julia, render_param, resolve_jobs, with_workers};
use crate::{report, LabError};

pub const DEFAULT_RESOLUTION: usize = 512;
pub const DEFAULT_CLASSIFY_ITER: usize = 10_000;
pub const DEFAULT_RENDER_ITER: usize = 500;
pub const DEFAULT_GAMMA: f64 = 1.0;
/// Dynamical-plane renders default to this multiple of the escape radius.
pub const JULIA_MARGIN: f64 = 1.02;
pub const PARAM_HALF_WIDTH: f64 = 0.1;

#[derive(Debug, Parser)]
#[command(name = "mcmullen", version, about = "Numerical experiments on the family f(z) = z^m + lambda / z^l")]
pub struct Cli {
    /// `key = value` file; explicit flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for grid operations [default: MCM_JOBS, else all cores]
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify one parameter and print the verdict as JSON
    Classify(ClassifyArgs),
    /// Sweep the positive real axis and bracket the non-escaping window
    ScanRay(ScanRayArgs),
    /// Escape-depth grid of the dynamical plane
    RenderJulia(RenderJuliaArgs),
    /// Verdict-code grid of the parameter plane
    RenderParam(RenderParamArgs),
    /// Peripheral curves of an escape-depth grid with their constants
    Metrics(MetricsArgs),
    /// Build the model map and verify it numerically
    Surgery(SurgeryArgs),
    /// Level sets of the interval model as exact rationals
    Cantor(CantorArgs),
}

#[derive(Debug, Args)]
struct ExpArgs {
    /// Sets l = m = n
    #[arg(long, conflicts_with_all = ["l", "m"])]
    n: Option<u32>,
    /// Pole order [default: 3]
    #[arg(long)]
    l: Option<u32>,
    /// Degree at infinity [default: 3]
    #[arg(long)]
    m: Option<u32>,
}

impl ExpArgs {
    fn resolve(&self, cfg: &Config) -> Result<Exponents, LabError> {
        let (l, m) = match self.n {
            Some(n) => (n, n),
            None => (self.l.or(cfg.l).unwrap_or(3), self.m.or(cfg.m).unwrap_or(3)),
        };
        Ok(Exponents::new(l, m)?)
    }
}

#[derive(Debug, Args)]
struct ClassifierArgs {
    /// Iteration cap [default: 10000]
    #[arg(long)]
    max_iter: Option<usize>,
    /// Relative half-width of the undecided band [default: 0.05]
    #[arg(long)]
    ambiguity_band: Option<f64>,
}

impl ClassifierArgs {
    fn resolve(&self, cfg: &Config) -> Result<ClassifierConfig, LabError> {
        let c = ClassifierConfig {
            max_iter: self.max_iter.or(cfg.max_iter).unwrap_or(DEFAULT_CLASSIFY_ITER),
            ambiguity_band: self.ambiguity_band.or(cfg.ambiguity_band).unwrap_or(ClassifierConfig::default().ambiguity_band),
            ..ClassifierConfig::default()
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[command(flatten)]
    exp: ExpArgs,
    /// Parameter as `a`, `a+bi` or `a,b`
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    lambda: Option<Complex64>,
    #[command(flatten)]
    classifier: ClassifierArgs,
}

#[derive(Debug, Args)]
struct ScanRayArgs {
    #[command(flatten)]
    exp: ExpArgs,
    /// Bisection tolerance for the window endpoints
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Log-spaced sample count of the sweep
    #[arg(long, default_value_t = 1000)]
    points: usize,
    #[arg(long, default_value_t = 1e-6)]
    lo: f64,
    #[arg(long, default_value_t = 1.0)]
    hi: f64,
    /// Sweep table `lambda,verdictCode`
    #[arg(long, default_value = "scan-ray.csv")]
    csv: PathBuf,
    #[command(flatten)]
    classifier: ClassifierArgs,
}

#[derive(Debug, Args)]
struct RasterArgs {
    /// `re_min,re_max,im_min,im_max`
    #[arg(long, allow_hyphen_values = true, value_parser = parse_bounds)]
    bounds: Option<Bounds>,
    /// Pixels per side [default: 512]
    #[arg(long, alias = "resolution")]
    res: Option<usize>,
    /// Grid file to write
    #[arg(long)]
    out: PathBuf,
    /// Optional PNG rendering of the grid
    #[arg(long)]
    png: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RenderJuliaArgs {
    #[command(flatten)]
    exp: ExpArgs,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    lambda: Option<Complex64>,
    /// Iteration cap [default: 500]
    #[arg(long)]
    max_iter: Option<usize>,
    /// Shading exponent for escape depths [default: 1.0]
    #[arg(long)]
    gamma: Option<f64>,
    #[command(flatten)]
    raster: RasterArgs,
}

#[derive(Debug, Args)]
struct RenderParamArgs {
    #[command(flatten)]
    exp: ExpArgs,
    #[command(flatten)]
    classifier: ClassifierArgs,
    #[command(flatten)]
    raster: RasterArgs,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    /// Escape-depth grid file
    #[arg(long)]
    grid: PathBuf,
    #[arg(long, default_value_t = 3)]
    max_depth: u32,
    /// Components smaller than this are skipped
    #[arg(long, default_value_t = 16)]
    min_pixels: usize,
    /// Vertex pairs sampled per curve for kEstimate
    #[arg(long, default_value_t = 10_000)]
    pairs: usize,
    /// Per-curve table
    #[arg(long, default_value = "curves.csv")]
    csv: PathBuf,
}

#[derive(Debug, Args)]
struct SurgeryArgs {
    #[command(flatten)]
    exp: ExpArgs,
    /// Inner radius of the model annulus [default: 0.5]
    #[arg(long)]
    r0: Option<f64>,
    /// Sample budget per check
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Write the report here instead of standard output
    #[arg(long)]
    report: Option<PathBuf>,
    /// Cell complex as a CSV of vertices and edges
    #[arg(long)]
    mesh_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CantorArgs {
    #[command(flatten)]
    exp: ExpArgs,
    /// Generation of the interval model
    #[arg(long)]
    level: u32,
    /// Write the table here instead of standard output
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = write!(err, "{e}");
            return exit::USAGE;
        }
        Err(e) => {
            let _ = write!(out, "{e}");
            return exit::SUCCESS;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.exit_code() == exit::USAGE {
                let mut cmd = Cli::command();
                cmd.build();
                let name = subcommand_name(&cli.command);
                if let Some(sub) = cmd.find_subcommand_mut(name) {
                    let _ = writeln!(err, "\n{}", sub.render_usage());
                }
            }
            e.exit_code()
        }
    }
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Classify(_) => "classify",
        Command::ScanRay(_) => "scan-ray",
        Command::RenderJulia(_) => "render-julia",
        Command::RenderParam(_) => "render-param",
        Command::Metrics(_) => "metrics",
        Command::Surgery(_) => "surgery",
        Command::Cantor(_) => "cantor",
    }
}

fn usage(msg: impl Into<String>) -> LabError {
    LabError::Usage(msg.into())
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<(), LabError> {
    out.write_all(report::pretty(v).as_bytes()).map_err(|e| LabError::io("<stdout>", e))
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn exponents_json(exp: Exponents) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("l".into(), json!(exp.l()));
    m.insert("m".into(), json!(exp.m()));
    m
}

fn classifier_json(m: &mut Map<String, Value>, c: &ClassifierConfig) {
    m.insert("maxIter".into(), json!(c.max_iter));
    m.insert("ambiguityBand".into(), json!(c.ambiguity_band));
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, LabError> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match &cli.command {
        Command::Classify(a) => cmd_classify(a, &cfg, out),
        Command::ScanRay(a) => cmd_scan_ray(a, &cfg, cli.jobs, out),
        Command::RenderJulia(a) => cmd_render_julia(a, &cfg, cli.jobs, out),
        Command::RenderParam(a) => cmd_render_param(a, &cfg, cli.jobs, out),
        Command::Metrics(a) => cmd_metrics(a, out),
        Command::Surgery(a) => cmd_surgery(a, &cfg, out),
        Command::Cantor(a) => cmd_cantor(a, &cfg, out),
    }
}

fn cmd_classify(a: &ClassifyArgs, cfg: &Config, out: &mut dyn Write) -> Result<i32, LabError> {
    let exp = a.exp.resolve(cfg)?;
    let lambda = a.lambda.or(cfg.lambda()).ok_or_else(|| usage("--lambda is required"))?;
    let ccfg = a.classifier.resolve(cfg)?;
    let v = classify(&MapParams::new(lambda, exp)?, &ccfg);
    let mut effective = exponents_json(exp);
    effective.insert("lambda".into(), report::complex(lambda));
    classifier_json(&mut effective, &ccfg);
    let mut j = report::verdict(&v);
    j["config"] = Value::Object(effective);
    emit(out, &j)?;
    Ok(if v.class == VerdictClass::Indeterminate { exit::INDETERMINATE } else { exit::SUCCESS })
}

fn cmd_scan_ray(a: &ScanRayArgs, cfg: &Config, jobs: Option<usize>, out: &mut dyn Write) -> Result<i32, LabError> {
    let exp = a.exp.resolve(cfg)?;
    let ccfg = a.classifier.resolve(cfg)?;
    if !(a.lo > 0.0 && a.lo < a.hi && a.hi.is_finite()) || a.points < 2 {
        return Err(usage("scan needs 0 < lo < hi and at least 2 points"));
    }
    let jobs = resolve_jobs(jobs)?;
    let ratio = (a.hi / a.lo).ln();
    let rows: Vec<(f64, i32)> = with_workers(jobs, || {
        (0..a.points)
            .into_par_iter()
            .map(|k| {
                let x = a.lo * (ratio * k as f64 / (a.points - 1) as f64).exp();
                (x, verdict_code(exp, Complex64::new(x, 0.0), &ccfg))
            })
            .collect()
    })?;
    report::write_text(&a.csv, &report::scan_csv(&rows))?;
    let mut counts = Map::new();
    for c in VerdictClass::ALL {
        counts.insert(c.name().into(), json!(rows.iter().filter(|r| r.1 == c.code()).count()));
    }
    let mut effective = exponents_json(exp);
    classifier_json(&mut effective, &ccfg);
    effective.insert("tol".into(), json!(a.tol));
    let mut j = json!({
        "scan": { "points": a.points, "lo": a.lo, "hi": a.hi, "counts": counts, "csv": path_str(&a.csv) },
        "config": effective,
    });
    match bracket_real(exp, a.tol, &ccfg) {
        Ok(b) => {
            j["bracket"] = report::bracket(&b);
            emit(out, &j)?;
            Ok(exit::SUCCESS)
        }
        Err(TrichotomyError::BracketingFailed { reason, log }) => {
            j["bracket"] = json!({ "error": reason, "samples": log.len() });
            emit(out, &j)?;
            Ok(exit::INDETERMINATE)
        }
        Err(e) => Err(e.into()),
    }
}

fn raster_common(
    r: &RasterArgs,
    cfg: &Config,
    default_bounds: impl FnOnce() -> Result<Bounds, LabError>,
) -> Result<(Bounds, usize), LabError> {
    let bounds = match r.bounds.or(cfg.bounds) {
        Some(b) => b,
        None => default_bounds()?,
    };
    Ok((bounds, r.res.or(cfg.resolution).unwrap_or(DEFAULT_RESOLUTION)))
}

fn finish_raster(
    g: &mcmullen_core::FieldGrid,
    r: &RasterArgs,
    spec: &ImageSpec,
    effective: Map<String, Value>,
    summary: Value,
    out: &mut dyn Write,
) -> Result<i32, LabError> {
    write_grid(g, &r.out)?;
    if let Some(p) = &r.png {
        encode_png(g, spec, p)?;
    }
    let j = json!({
        "grid": path_str(&r.out),
        "png": r.png.as_deref().map(path_str),
        "sha256": grid_sha256(g),
        "width": g.width(),
        "height": g.height(),
        "bounds": report::bounds(&g.bounds()),
        "summary": summary,
        "config": effective,
    });
    emit(out, &j)?;
    Ok(exit::SUCCESS)
}

fn cmd_render_julia(a: &RenderJuliaArgs, cfg: &Config, jobs: Option<usize>, out: &mut dyn Write) -> Result<i32, LabError> {
    let exp = a.exp.resolve(cfg)?;
    let lambda = a.lambda.or(cfg.lambda()).ok_or_else(|| usage("--lambda is required"))?;
    let map = MapParams::new(lambda, exp)?;
    let (bounds, res) = raster_common(&a.raster, cfg, || {
        Ok(Bounds::centered(Complex64::new(0.0, 0.0), JULIA_MARGIN * map.escape_radius())?)
    })?;
    let max_iter = a.max_iter.or(cfg.max_iter).unwrap_or(DEFAULT_RENDER_ITER);
    let gamma = a.gamma.or(cfg.gamma).unwrap_or(DEFAULT_GAMMA);
    let jobs = resolve_jobs(jobs)?;
    let g = render_julia(&map, bounds, res, res, max_iter, jobs)?;
    let spec = ImageSpec::for_kind(PayloadKind::EscapeDepth, gamma).with_entries(&cfg.palette);
    let mut effective = exponents_json(exp);
    effective.insert("lambda".into(), report::complex(lambda));
    effective.insert("maxIter".into(), json!(max_iter));
    effective.insert("resolution".into(), json!(res));
    effective.insert("bounds".into(), report::bounds(&bounds));
    effective.insert("gamma".into(), json!(gamma));
    effective.insert("jobs".into(), json!(jobs));
    let bounded = g.data().iter().filter(|&&v| v < 0).count();
    let deepest = g.data().iter().copied().max().unwrap_or(0);
    finish_raster(&g, &a.raster, &spec, effective, json!({ "boundedPixels": bounded, "maxDepth": deepest }), out)
}

fn cmd_render_param(a: &RenderParamArgs, cfg: &Config, jobs: Option<usize>, out: &mut dyn Write) -> Result<i32, LabError> {
    let exp = a.exp.resolve(cfg)?;
    let ccfg = a.classifier.resolve(cfg)?;
    let (bounds, res) = raster_common(&a.raster, cfg, || {
        Ok(Bounds::centered(Complex64::new(0.0, 0.0), PARAM_HALF_WIDTH)?)
    })?;
    let jobs = resolve_jobs(jobs)?;
    let g = render_param(exp, bounds, res, res, &ccfg, jobs)?;
    let spec = ImageSpec::verdict().with_entries(&cfg.palette);
    let mut effective = exponents_json(exp);
    classifier_json(&mut effective, &ccfg);
    effective.insert("resolution".into(), json!(res));
    effective.insert("bounds".into(), report::bounds(&bounds));
    effective.insert("jobs".into(), json!(jobs));
    let mut counts = Map::new();
    counts.insert("undefined".into(), json!(g.data().iter().filter(|&&v| v == 0).count()));
    for c in VerdictClass::ALL {
        counts.insert(c.name().into(), json!(g.data().iter().filter(|&&v| v == c.code()).count()));
    }
    finish_raster(&g, &a.raster, &spec, effective, Value::Object(counts), out)
}

fn cmd_metrics(a: &MetricsArgs, out: &mut dyn Write) -> Result<i32, LabError> {
    let g = read_grid(&a.grid)?;
    let ex = extract_peripheral_with(&g, &ExtractOptions::new(a.max_depth, a.min_pixels))?;
    let effective = json!({
        "grid": path_str(&a.grid),
        "maxDepth": a.max_depth,
        "minPixels": a.min_pixels,
        "pairs": a.pairs,
    });
    let extraction = json!({
        "components": ex.components,
        "openDropped": ex.open_dropped,
        "smallDropped": ex.small_dropped,
    });
    if ex.curves.is_empty() {
        emit(out, &json!({ "curves": 0, "extraction": extraction, "config": effective }))?;
        return Ok(exit::INDETERMINATE);
    }
    let r = match carpet_report(&ex.curves, a.pairs) {
        Ok(r) => r,
        Err(GeometryError::Intersecting(i, k)) => {
            let j = json!({ "curves": ex.curves.len(), "error": format!("curves {i} and {k} intersect"), "config": effective });
            emit(out, &j)?;
            return Ok(exit::INDETERMINATE);
        }
        Err(e) => return Err(e.into()),
    };
    report::write_text(&a.csv, &report::curves_csv(&ex.curves, &r))?;
    let mut j = report::carpet_summary(&r);
    j["csv"] = json!(path_str(&a.csv));
    j["extraction"] = extraction;
    j["config"] = effective;
    emit(out, &j)?;
    Ok(exit::SUCCESS)
}

fn cmd_surgery(a: &SurgeryArgs, cfg: &Config, out: &mut dyn Write) -> Result<i32, LabError> {
    let exp = a.exp.resolve(cfg)?;
    let r0 = a.r0.or(cfg.r0).unwrap_or(mcmullen_core::cantor::DEFAULT_R0);
    let f = SurgeryMap::new(SurgeryConfig::new(exp, r0))?;
    let r = f.verify(a.samples)?;
    if let Some(p) = &a.mesh_out {
        let (verts, edges) = f.complex().mesh();
        report::write_text(p, &report::mesh_csv(&verts, &edges))?;
    }
    let mut j = report::quasiregular(&r);
    let mut effective = exponents_json(exp);
    effective.insert("r0".into(), json!(r0));
    effective.insert("samples".into(), json!(a.samples));
    j["radii"] = json!({ "r0": f.r0(), "r1": f.r1(), "r2": f.r2() });
    j["config"] = Value::Object(effective);
    match &a.report {
        Some(p) => report::write_text(p, &report::pretty(&j))?,
        None => emit(out, &j)?,
    }
    let stable = r.degree_count == r.degree_max && r.inversion_failures == 0;
    Ok(if stable { exit::SUCCESS } else { exit::INDETERMINATE })
}

fn cmd_cantor(a: &CantorArgs, cfg: &Config, out: &mut dyn Write) -> Result<i32, LabError> {
    let exp = a.exp.resolve(cfg)?;
    let set = CantorIfs::new(exp).level_set(a.level)?;
    let table = report::intervals_csv(&set);
    match &a.csv {
        Some(p) => report::write_text(p, &table)?,
        None => out.write_all(table.as_bytes()).map_err(|e| LabError::io("<stdout>", e))?,
    }
    Ok(exit::SUCCESS)
}
