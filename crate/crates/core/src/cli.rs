//! Command-line front end: flag and config-file parsing, dispatch to the
//! library, artifact writing and exit codes.
//!
//! Exit codes: `0` success, `1` invalid input, `2` computational failure,
//! `3` when `verify` finds a violated invariant.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::float::Constant;
use rug::Float;

use crate::curve::{
    attractor_json, attractor_set, circle_transitions, curves_json, seed_on_circle, trace, write_curves_csv,
    AttractorSet, BoundaryPair, CurvePolyline, Direction, TraceControls,
};
use crate::error::Error;
use crate::harness::{asymptotic_report, phase_grid, write_point_cloud_csv, AsymptoticCheck};
use crate::partition::{coefficients_json, generate, generate_one, write_coefficients_csv, ExponentSequence};
use crate::phase::{candidate_functions, phase_function, write_phase_map_csv, PhaseIndex, DEFAULT_BOUNDARY_TOL};
use crate::roots::{find_roots_many, roots_json, write_roots_csv, RootOptions};
use crate::specfun::{clausen2, complex, dilog, root_dilog, PrecisionPolicy};
use crate::verify::run_suite;

/// Input rejected before any computation.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ValidationError(pub String);

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    ValidationError(msg.into()).into()
}

#[derive(Debug, Parser)]
#[command(name = "zero-attractor", version, about = "Zeros of partition polynomials and their attractors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact coefficients of F_n.
    GenPoly(GenPolyArgs),
    /// All zeros of F_n for each weight.
    Roots(RootsArgs),
    /// Winning phase function on a polar grid.
    PhaseMap(PhaseMapArgs),
    /// Boundary curves from their seeds on the unit circle.
    Trace(TraceArgs),
    /// The assembled zero attractor.
    Attractor(Common),
    /// The full invariant suite; exits 3 on any violation.
    Verify(VerifyArgs),
    /// Leading-order estimate against exact values.
    Asymptotics(AsymptoticsArgs),
    /// One special-function evaluation.
    Dilog(DilogArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    AllParts,
    Odd,
    Residue,
    Quadratic,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpecialFunction {
    Li2,
    Cl2,
    RootDilog,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Exponent-sequence family.
    #[arg(long, value_enum)]
    pub family: Option<FamilyKind>,
    /// Residue class for `residue`.
    #[arg(long)]
    pub a: Option<u64>,
    /// Modulus for `residue` and `quadratic`.
    #[arg(long)]
    pub p: Option<u64>,
    /// Comma-separated parts for `explicit`.
    #[arg(long)]
    pub parts: Option<String>,
    /// Working precision in bits.
    #[arg(long)]
    pub precision: Option<u32>,
    /// Absolute error target for special functions.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, env = "ATTRACTOR_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory receiving `<subcommand>.<format>`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// `key = value` file with `[family]`, `[run]`, `[grid]`, `[output]` sections.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GenPolyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Single weight.
    #[arg(long)]
    pub n: Option<u64>,
    /// Every weight from 0 through this one.
    #[arg(long)]
    pub max_n: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct RootsArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub n: Option<u64>,
    /// Comma-separated weights.
    #[arg(long)]
    pub weights: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct PhaseMapArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub radial: Option<usize>,
    #[arg(long)]
    pub angular: Option<usize>,
    #[arg(long)]
    pub boundary_tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub common: Common,
    /// Trace one pair, given as `h/k,h/k`; otherwise every traced curve of the family.
    #[arg(long)]
    pub pair: Option<String>,
    /// Angular bracket `lo,hi` on the unit circle holding the seed for `--pair`.
    #[arg(long)]
    pub bracket: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub max_n: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct AsymptoticsArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub weights: Option<String>,
    /// Semicolon-separated `re,im` points.
    #[arg(long)]
    pub points: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct DilogArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value = "li2")]
    pub function: SpecialFunction,
    /// Real part of the argument (the angle for `cl2`).
    #[arg(long, allow_hyphen_values = true)]
    pub re: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub im: f64,
    /// Index `k` for `root-dilog`.
    #[arg(long, default_value_t = 1)]
    pub k: u32,
}

const CONFIG_KEYS: &[&str] = &[
    "family.kind",
    "family.a",
    "family.p",
    "family.parts",
    "run.n",
    "run.max_n",
    "run.weights",
    "run.precision",
    "run.tolerance",
    "run.seed",
    "run.threads",
    "run.points",
    "grid.radial",
    "grid.angular",
    "grid.boundary_tol",
    "output.format",
    "output.out",
    "output.dir",
];

/// Parses the config format: `[section]` headers, `key = value` lines, `#` comments.
///
/// Keys are returned as `section.key`; unknown keys, keys outside a section
/// and repeated keys are rejected.
pub fn parse_config(text: &str) -> anyhow::Result<BTreeMap<String, String>> {
    let mut section: Option<String> = None;
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = lineno + 1;
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = Some(name.trim().to_string());
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| invalid(format!("config line {at}: expected key = value")))?;
        let section = section.as_deref().ok_or_else(|| invalid(format!("config line {at}: key outside a section")))?;
        let full = format!("{section}.{}", key.trim().replace('-', "_"));
        if !CONFIG_KEYS.contains(&full.as_str()) {
            return Err(invalid(format!("config line {at}: unknown key `{full}`")));
        }
        if out.insert(full.clone(), value.trim().to_string()).is_some() {
            return Err(invalid(format!("config line {at}: `{full}` given twice")));
        }
    }
    Ok(out)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> anyhow::Result<T> {
    value.parse().map_err(|_| invalid(format!("`{key}`: cannot parse `{value}`")))
}

fn parse_list(key: &str, value: &str) -> anyhow::Result<Vec<u64>> {
    value.split(',').map(|v| parse_value(key, v.trim())).collect()
}

/// Fully resolved settings: config file first, flags on top, then validated.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub family: ExponentSequence,
    pub policy: PrecisionPolicy,
    pub seed: u64,
    pub threads: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    /// Values from the file that a subcommand may read (`run.n`, `grid.radial`, ...).
    pub extra: BTreeMap<String, String>,
}

impl RunConfig {
    /// Merges `common` over its config file and validates the result.
    pub fn resolve(common: &Common) -> anyhow::Result<Self> {
        let mut file = match &common.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
                    .map_err(|e| invalid(format!("{e:#}")))?;
                parse_config(&text)?
            }
            None => BTreeMap::new(),
        };
        let mut take = |key: &str| file.remove(key);

        let kind = match (common.family, take("family.kind")) {
            (Some(k), _) => k,
            (None, Some(v)) => FamilyKind::from_str(&v, true).map_err(|_| invalid(format!("unknown family `{v}`")))?,
            (None, None) => FamilyKind::AllParts,
        };
        let a = match common.a {
            Some(a) => Some(a),
            None => take("family.a").map(|v| parse_value("family.a", &v)).transpose()?,
        };
        let p = match common.p {
            Some(p) => Some(p),
            None => take("family.p").map(|v| parse_value("family.p", &v)).transpose()?,
        };
        let parts = match &common.parts {
            Some(s) => Some(parse_list("parts", s)?),
            None => take("family.parts").map(|v| parse_list("family.parts", &v)).transpose()?,
        };
        let family = build_family(kind, a, p, parts)?;

        let bits = match common.precision {
            Some(b) => b,
            None => take("run.precision").map(|v| parse_value("run.precision", &v)).transpose()?.unwrap_or(128),
        };
        let tol: Option<f64> = match common.tolerance {
            Some(t) => Some(t),
            None => take("run.tolerance").map(|v| parse_value("run.tolerance", &v)).transpose()?,
        };
        let policy = match tol {
            Some(t) => PrecisionPolicy::new(bits, t),
            None if bits == 128 => Ok(PrecisionPolicy::default()),
            None => PrecisionPolicy::with_bits(bits),
        }
        .map_err(|e| invalid(e.to_string()))?;

        let seed = match common.seed {
            Some(s) => s,
            None => take("run.seed").map(|v| parse_value("run.seed", &v)).transpose()?.unwrap_or(0x5eed),
        };
        let threads = match common.threads {
            Some(t) => Some(t),
            None => take("run.threads").map(|v| parse_value("run.threads", &v)).transpose()?,
        };
        if threads == Some(0) {
            return Err(invalid("thread count must be positive"));
        }
        let format = match (common.format, take("output.format")) {
            (Some(f), _) => f,
            (None, Some(v)) => Format::from_str(&v, true).map_err(|_| invalid(format!("unknown format `{v}`")))?,
            (None, None) => Format::Json,
        };
        let out = common.out.clone().or_else(|| take("output.out").map(PathBuf::from));
        let out_dir = common.out_dir.clone().or_else(|| take("output.dir").map(PathBuf::from));
        if out.is_some() && out_dir.is_some() {
            return Err(invalid("give at most one of --out and --out-dir"));
        }
        Ok(RunConfig { family, policy, seed, threads, format, out, out_dir, extra: file })
    }

    fn extra<T: std::str::FromStr>(&self, key: &str) -> anyhow::Result<Option<T>> {
        self.extra.get(key).map(|v| parse_value(key, v)).transpose()
    }

    fn root_options(&self) -> RootOptions {
        RootOptions { policy: self.policy.clone(), seed: self.seed, ..RootOptions::default() }
    }
}

fn build_family(kind: FamilyKind, a: Option<u64>, p: Option<u64>, parts: Option<Vec<u64>>) -> anyhow::Result<ExponentSequence> {
    let need = |v: Option<u64>, flag: &str| v.ok_or_else(|| invalid(format!("this family needs --{flag}")));
    let seq = match kind {
        FamilyKind::AllParts => Ok(ExponentSequence::all_parts()),
        FamilyKind::Odd => Ok(ExponentSequence::odd_parts()),
        FamilyKind::Residue => ExponentSequence::residue(need(a, "a")?, need(p, "p")?),
        FamilyKind::Quadratic => ExponentSequence::quadratic_units(need(p, "p")?),
        FamilyKind::Explicit => {
            ExponentSequence::explicit(&parts.ok_or_else(|| invalid("this family needs --parts"))?)
        }
    };
    seq.map_err(|e| invalid(e.to_string()))
}

fn weights_from(
    n: Option<u64>,
    list: Option<&str>,
    config: &RunConfig,
    default: &[u64],
) -> anyhow::Result<Vec<u64>> {
    let weights = match (n, list) {
        (Some(_), Some(_)) => return Err(invalid("give at most one of --n and --weights")),
        (Some(n), None) => vec![n],
        (None, Some(l)) => parse_list("weights", l)?,
        (None, None) => match (config.extra::<u64>("run.n")?, config.extra.get("run.weights")) {
            (Some(n), _) => vec![n],
            (None, Some(l)) => parse_list("run.weights", l)?,
            (None, None) => default.to_vec(),
        },
    };
    if weights.is_empty() {
        return Err(invalid("no weights given: use --n or --weights"));
    }
    if weights.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("weights must be strictly increasing"));
    }
    Ok(weights)
}

fn parse_index(s: &str) -> anyhow::Result<PhaseIndex> {
    let (h, k) = s.trim().split_once('/').ok_or_else(|| invalid(format!("phase index `{s}` is not h/k")))?;
    Ok(PhaseIndex::new(parse_value("pair", h.trim())?, parse_value("pair", k.trim())?))
}

fn parse_pair(s: &str) -> anyhow::Result<(f64, f64)> {
    let (x, y) = s.split_once(',').ok_or_else(|| invalid(format!("`{s}` is not two comma-separated numbers")))?;
    Ok((parse_value("pair", x.trim())?, parse_value("pair", y.trim())?))
}

/// Wraps library failures so the exit code reflects their cause.
fn compute<T>(r: crate::Result<T>) -> anyhow::Result<T> {
    r.map_err(|e| match e {
        Error::InvalidSequence(_) | Error::Gcd { .. } | Error::Config(_) | Error::UnsupportedFamily(_) => {
            invalid(e.to_string())
        }
        other => anyhow::Error::new(other),
    })
}

/// Destination for one artifact.
struct Sink {
    path: Option<PathBuf>,
}

impl Sink {
    fn new(config: &RunConfig, stem: &str) -> anyhow::Result<Self> {
        let ext = match config.format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        let path = match (&config.out, &config.out_dir) {
            (Some(p), _) => Some(p.clone()),
            (None, Some(dir)) => {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                Some(dir.join(format!("{stem}.{ext}")))
            }
            (None, None) => None,
        };
        Ok(Sink { path })
    }

    fn write(&self, body: impl FnOnce(&mut dyn Write) -> anyhow::Result<()>) -> anyhow::Result<()> {
        match &self.path {
            Some(p) => {
                let mut w = BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?);
                body(&mut w)?;
                w.flush()?;
            }
            None => {
                let stdout = io::stdout();
                let mut w = stdout.lock();
                body(&mut w)?;
                w.flush()?;
            }
        }
        Ok(())
    }

    fn json(&self, mut value: serde_json::Value, policy: &PrecisionPolicy) -> anyhow::Result<()> {
        if let Some(obj) = value.as_object_mut() {
            obj.insert("precision_bits".into(), policy.bits().into());
        }
        self.write(|w| {
            serde_json::to_writer_pretty(&mut *w, &value)?;
            writeln!(w)?;
            Ok(())
        })
    }
}

fn gen_poly(args: &GenPolyArgs, config: &RunConfig) -> anyhow::Result<()> {
    let polys = match (args.n.or(config.extra("run.n")?), args.max_n.or(config.extra("run.max_n")?)) {
        (Some(_), Some(_)) => return Err(invalid("give at most one of --n and --max-n")),
        (Some(n), None) => vec![compute(generate_one(&config.family, n))?],
        (None, Some(m)) => compute(generate(&config.family, m))?,
        (None, None) => return Err(invalid("gen-poly needs --n or --max-n")),
    };
    let sink = Sink::new(config, "gen-poly")?;
    match config.format {
        Format::Csv => sink.write(|w| Ok(write_coefficients_csv(&polys, w)?)),
        Format::Json => sink.json(coefficients_json(&config.family, &polys), &config.policy),
    }
}

fn roots(args: &RootsArgs, config: &RunConfig) -> anyhow::Result<()> {
    let weights = weights_from(args.n, args.weights.as_deref(), config, &[])?;
    let polys = weights.iter().map(|&n| generate_one(&config.family, n)).collect::<crate::Result<Vec<_>>>();
    let sets = compute(find_roots_many(&compute(polys)?, &config.root_options()))?;
    let sink = Sink::new(config, "roots")?;
    match config.format {
        Format::Csv => sink.write(|w| Ok(write_roots_csv(&sets, w)?)),
        Format::Json => {
            let mut v = roots_json(&sets);
            v["family"] = config.family.label().into();
            sink.json(v, &config.policy)
        }
    }
}

fn phase_map(args: &PhaseMapArgs, config: &RunConfig) -> anyhow::Result<()> {
    let radial = args.radial.or(config.extra("grid.radial")?).unwrap_or(100);
    let angular = args.angular.or(config.extra("grid.angular")?).unwrap_or(200);
    let tol = args.boundary_tol.or(config.extra("grid.boundary_tol")?).unwrap_or(DEFAULT_BOUNDARY_TOL);
    if !(tol > 0.0) {
        return Err(invalid("boundary tolerance must be positive"));
    }
    if radial == 0 || angular == 0 {
        return Err(invalid("grid resolution must be positive"));
    }
    let grid = compute(phase_grid(&config.family, radial, angular, tol, &config.policy))?;
    let sink = Sink::new(config, "phase-map")?;
    match config.format {
        Format::Csv => sink.write(|w| Ok(write_phase_map_csv(&grid.samples, w)?)),
        Format::Json => sink.json(
            serde_json::json!({
                "family": config.family.label(),
                "radial": radial,
                "angular": angular,
                "boundary_tol": tol,
                "samples": grid.samples,
                "boundary": grid.boundary_cloud().into_iter().map(|(x, y)| [x, y]).collect::<Vec<_>>(),
            }),
            &config.policy,
        ),
    }
}

fn trace_curves(args: &TraceArgs, config: &RunConfig) -> anyhow::Result<Vec<CurvePolyline>> {
    let seq = &config.family;
    let Some(pair) = &args.pair else {
        if args.bracket.is_some() {
            return Err(invalid("--bracket needs --pair"));
        }
        return Ok(compute(attractor_set(seq, &config.policy))?.curves);
    };
    let (a, b) = pair.split_once(',').ok_or_else(|| invalid("--pair expects h/k,h/k"))?;
    let (a, b) = (parse_index(a)?, parse_index(b)?);
    let (lo, hi) = match &args.bracket {
        Some(s) => parse_pair(s)?,
        None => {
            // First circle transition between the two indices.
            let functions = vec![compute(phase_function(seq, a.h, a.k))?, compute(phase_function(seq, b.h, b.k))?];
            let scan = PrecisionPolicy::new(64, 1e-15).expect("valid scan policy");
            compute(circle_transitions(&functions, (1e-3, std::f64::consts::PI - 1e-3), 4096, &scan))?
                .into_iter()
                .next()
                .map(|t| (t.2, t.3))
                .ok_or_else(|| invalid("the two phase functions never exchange dominance on the upper half circle"))?
        }
    };
    let boundary = compute(BoundaryPair::from_indices(seq, a, b))?;
    let circle = PrecisionPolicy::new(config.policy.bits(), 1e-15).map_err(|e| invalid(e.to_string()))?;
    let seed = compute(seed_on_circle(&boundary, (lo, hi), &circle))?;
    let third: Vec<_> = compute(candidate_functions(seq))?
        .into_iter()
        .filter(|f| f.index() != a && f.index() != b)
        .collect();
    let curve = compute(trace(&seed, &boundary, &third, &TraceControls::with_direction(Direction::Inward), &config.policy))?;
    Ok(vec![curve])
}

fn trace_cmd(args: &TraceArgs, config: &RunConfig) -> anyhow::Result<()> {
    let curves = trace_curves(args, config)?;
    let sink = Sink::new(config, "trace")?;
    match config.format {
        Format::Csv => sink.write(|w| Ok(write_curves_csv(&curves, w)?)),
        Format::Json => sink.json(curves_json(&config.family, &curves), &config.policy),
    }
}

/// Labelled point cloud of an attractor: circle, curves, spokes and segments.
pub fn attractor_cloud(set: &AttractorSet) -> Vec<(f64, f64, String)> {
    let mut out = Vec::new();
    for j in 0..1024 {
        let t = 2.0 * std::f64::consts::PI * j as f64 / 1024.0;
        out.push((t.cos(), t.sin(), "circle".to_string()));
    }
    for (i, c) in set.curves.iter().enumerate() {
        out.extend(c.points_f64().into_iter().map(|(x, y)| (x, y, format!("curve{i}"))));
    }
    for (i, c) in set.spokes.iter().enumerate() {
        out.extend(c.points_f64().into_iter().map(|(x, y)| (x, y, format!("spoke{i}"))));
    }
    for (i, s) in set.segments.iter().enumerate() {
        out.push((s.start.0, s.start.1, format!("segment{i}")));
        out.push((s.end.0, s.end.1, format!("segment{i}")));
    }
    out
}

fn attractor(config: &RunConfig) -> anyhow::Result<()> {
    let set = compute(attractor_set(&config.family, &config.policy))?;
    let sink = Sink::new(config, "attractor")?;
    match config.format {
        Format::Csv => sink.write(|w| Ok(write_point_cloud_csv(&attractor_cloud(&set), w)?)),
        Format::Json => sink.json(attractor_json(&set), &config.policy),
    }
}

/// Runs the suite and writes the report; returns whether every check passed.
fn verify(args: &VerifyArgs, config: &RunConfig) -> anyhow::Result<bool> {
    let max_n = args.max_n.or(config.extra("run.max_n")?).unwrap_or(200);
    if max_n == 0 {
        return Err(invalid("--max-n must be positive"));
    }
    let report = compute(run_suite(&config.family, max_n, &config.policy))?;
    let sink = Sink::new(config, "verify")?;
    match config.format {
        Format::Csv => sink.write(|w| {
            let mut writer = csv::Writer::from_writer(w);
            writer.write_record(["group", "name", "evaluated", "violations", "worst"])?;
            for c in &report.checks {
                writer.write_record([
                    c.group.clone(),
                    c.name.clone(),
                    c.evaluated.to_string(),
                    c.violations.to_string(),
                    format!("{:.6e}", c.worst),
                ])?;
            }
            writer.flush()?;
            Ok(())
        })?,
        Format::Json => sink.json(serde_json::to_value(&report)?, &config.policy)?,
    }
    for c in report.failures() {
        eprintln!("violation: [{}] {} ({} of {})", c.group, c.name, c.violations, c.evaluated);
    }
    eprintln!("{} checks, {} failed", report.checks.len(), report.failures().len());
    Ok(report.passed())
}

fn asymptotics(args: &AsymptoticsArgs, config: &RunConfig) -> anyhow::Result<()> {
    let weights = weights_from(None, args.weights.as_deref(), config, &[100, 200, 400])?;
    let points_src = args.points.clone().or_else(|| config.extra.get("run.points").cloned());
    let points: Vec<(f64, f64)> = match points_src {
        Some(s) => s.split(';').map(parse_pair).collect::<anyhow::Result<_>>()?,
        None => {
            let t = std::f64::consts::PI / 8.0;
            vec![(0.5, 0.0), (0.3 * t.cos(), 0.3 * t.sin())]
        }
    };
    if points.iter().any(|&(x, y)| !(x.hypot(y) < 1.0) || x.hypot(y) == 0.0) {
        return Err(invalid("points must lie in the punctured open unit disk"));
    }
    let report: Vec<AsymptoticCheck> = compute(asymptotic_report(&config.family, &points, &weights, &config.policy))?;
    let sink = Sink::new(config, "asymptotics")?;
    match config.format {
        Format::Csv => sink.write(|w| {
            let mut writer = csv::Writer::from_writer(w);
            writer.write_record(["re", "im", "n", "winner_h", "winner_k", "log_error"])?;
            for c in &report {
                writer.write_record([
                    format!("{:.17e}", c.z.0),
                    format!("{:.17e}", c.z.1),
                    c.n.to_string(),
                    c.winner.h.to_string(),
                    c.winner.k.to_string(),
                    format!("{:.17e}", c.log_error),
                ])?;
            }
            writer.flush()?;
            Ok(())
        }),
        Format::Json => sink.json(
            serde_json::json!({ "family": config.family.label(), "weights": weights, "checks": report }),
            &config.policy,
        ),
    }
}

fn decimal(x: &Float) -> String {
    // Enough digits to carry the working precision.
    let digits = (x.prec() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1;
    x.to_string_radix(10, Some(digits))
}

fn dilog_cmd(args: &DilogArgs, config: &RunConfig) -> anyhow::Result<()> {
    let p = &config.policy;
    let b = p.bits();
    let (re, im) = match args.function {
        SpecialFunction::Li2 => {
            let v = compute(dilog(&complex(args.re, args.im, b), p))?;
            (decimal(v.real()), Some(decimal(v.imag())))
        }
        SpecialFunction::Cl2 => {
            if args.im != 0.0 {
                return Err(invalid("cl2 takes a real angle"));
            }
            (decimal(&compute(clausen2(&Float::with_val(b, args.re), p))?), None)
        }
        SpecialFunction::RootDilog => {
            if args.k == 0 {
                return Err(invalid("--k must be positive"));
            }
            (decimal(&compute(root_dilog(args.k, &complex(args.re, args.im, b), p))?), None)
        }
    };
    let name = match args.function {
        SpecialFunction::Li2 => "li2",
        SpecialFunction::Cl2 => "cl2",
        SpecialFunction::RootDilog => "root_dilog",
    };
    let sink = Sink::new(config, "dilog")?;
    match config.format {
        Format::Csv => sink.write(|w| {
            writeln!(w, "function,arg_re,arg_im,k,value_re,value_im,precision_bits")?;
            writeln!(w, "{name},{:e},{:e},{},{re},{},{b}", args.re, args.im, args.k, im.clone().unwrap_or_default())?;
            Ok(())
        }),
        Format::Json => sink.json(
            serde_json::json!({
                "function": name,
                "argument": [args.re, args.im],
                "k": args.k,
                "value": { "re": re, "im": im },
                "pi": decimal(&Float::with_val(b, Constant::Pi)),
            }),
            p,
        ),
    }
}

fn common(command: &Command) -> &Common {
    match command {
        Command::GenPoly(a) => &a.common,
        Command::Roots(a) => &a.common,
        Command::PhaseMap(a) => &a.common,
        Command::Trace(a) => &a.common,
        Command::Attractor(c) => c,
        Command::Verify(a) => &a.common,
        Command::Asymptotics(a) => &a.common,
        Command::Dilog(a) => &a.common,
    }
}

/// Exit code for a failed run.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ValidationError>().is_some() {
        1
    } else {
        2
    }
}

/// Executes one parsed command; `Ok(false)` means `verify` found a violation.
pub fn execute(cli: &Cli) -> anyhow::Result<bool> {
    let config = RunConfig::resolve(common(&cli.command))?;
    let work = || -> anyhow::Result<bool> {
        match &cli.command {
            Command::GenPoly(a) => gen_poly(a, &config).map(|_| true),
            Command::Roots(a) => roots(a, &config).map(|_| true),
            Command::PhaseMap(a) => phase_map(a, &config).map(|_| true),
            Command::Trace(a) => trace_cmd(a, &config).map(|_| true),
            Command::Attractor(_) => attractor(&config).map(|_| true),
            Command::Verify(a) => verify(a, &config),
            Command::Asymptotics(a) => asymptotics(a, &config).map(|_| true),
            Command::Dilog(a) => dilog_cmd(a, &config).map(|_| true),
        }
    };
    match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| anyhow!("thread pool: {e}"))?
            .install(work),
        None => work(),
    }
}

/// Parses `args` and runs them, reporting errors on standard error.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_sections_and_comments() {
        let m = parse_config("# c\n[family]\nkind = residue\np = 3\n[run]\nmax-n = 40 # trailing\n").unwrap();
        assert_eq!(m["family.kind"], "residue");
        assert_eq!(m["run.max_n"], "40");
    }

    #[test]
    fn config_rejects_unknown_and_orphan_keys() {
        assert!(parse_config("[run]\nspeed = 3\n").is_err());
        assert!(parse_config("n = 3\n").is_err());
        assert!(parse_config("[run]\nn = 1\nn = 2\n").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "[family]\nkind = odd\n[run]\nprecision = 96\n").unwrap();
        let common = Common { config: Some(path), precision: Some(160), ..Common::default() };
        let cfg = RunConfig::resolve(&common).unwrap();
        assert_eq!(cfg.family, ExponentSequence::odd_parts());
        assert_eq!(cfg.policy.bits(), 160);
    }

    #[test]
    fn invalid_family_is_a_validation_error() {
        let common = Common { family: Some(FamilyKind::Residue), p: Some(3), ..Common::default() };
        let err = RunConfig::resolve(&common).unwrap_err();
        assert_eq!(exit_code(&err), 1);
    }
}
