//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a sweep or check verdict failed (outputs are
//! still written), 2 invalid configuration, 3 I/O failure. Every command is a
//! pure function of its arguments, so re-runs produce byte-identical files.

use std::ffi::OsString;
use std::f64::consts::PI;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::basis::EigenBasis;
use crate::diag::{idempotency_grid, run_sweep, SweepConfig, EDGE_P_TOL};
use crate::error::{Error, Result};
use crate::export::{fmt_g17, to_json_string, write_file};
use crate::limits::{edge_profile_p, edge_profile_x};
use crate::moyal::{moyal_direct_row, moyal_via_composition};
use crate::scale::{PhaseGrid, SymbolField};
use crate::truncate::{box_multiplication_matrix, ladder_matrices, OperatorMatrix};
use crate::weyl::{symbol_of_matrix, symbol_projection_box, symbol_truncated_momentum_box};
use crate::VERSION;

#[derive(Debug, Parser)]
#[command(name = "weylsym", version, about = "Weyl symbols of truncated quantum observables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a symbol on a phase-space grid.
    Field(FieldArgs),
    /// Run a registered convergence experiment over a list of N.
    Sweep(SweepArgs),
    /// Compare finite-N symbols with a microscopic edge profile.
    Edge(EdgeArgs),
    /// Spot-check the direct Moyal product of Π_N with itself against composition.
    MoyalCheck(MoyalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ModelArg {
    Box,
    Oscillator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Observable {
    Projection,
    Momentum,
    Position,
    Multiplication,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum EdgeKind {
    X,
    P,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, value_enum, default_value = "box")]
    model: ModelArg,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    mu: f64,
    /// Box half-width.
    #[arg(long = "L", default_value_t = 1.0, allow_hyphen_values = true)]
    half_width: f64,
}

#[derive(Debug, Args)]
struct FieldArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long = "N")]
    n_levels: usize,
    #[arg(long, value_enum, default_value = "projection")]
    observable: Observable,
    /// `x_min:x_max:nx,p_min:p_max:np`, counting cells.
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    exp: String,
    #[arg(long = "N", value_delimiter = ',')]
    n_levels: Option<Vec<usize>>,
    /// Powers of `(a x + b p)` for the oscillator experiments.
    #[arg(long = "n", value_delimiter = ',')]
    powers: Option<Vec<usize>>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    #[arg(long = "L", allow_hyphen_values = true)]
    half_width: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Output prefix; writes `<prefix>.json`, `<prefix>.csv` and `<prefix>.manifest.json`.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EdgeArgs {
    #[arg(long, value_enum)]
    kind: EdgeKind,
    #[arg(long = "N")]
    n_levels: usize,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    mu: f64,
    #[arg(long = "L", default_value_t = 1.0, allow_hyphen_values = true)]
    half_width: f64,
    /// Wall distance `u`, a value or `min:max:count` (kind x).
    #[arg(long, allow_hyphen_values = true, default_value = "0:6:121")]
    u: String,
    /// Momentum for kind x.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    p: f64,
    /// Position for kind p.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    x: f64,
    /// Momentum offset `v`, a value or `min:max:count` (kind p).
    #[arg(long, allow_hyphen_values = true, default_value = "0.5")]
    v: String,
    /// Writes to standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MoyalArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long = "N")]
    n_levels: usize,
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long, default_value_t = 10)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Allowed `|direct − composition|` relative to `max(1, |composition|)`.
    #[arg(long, default_value_t = 0.02)]
    tol: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return 2;
    }
    let echo: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let outcome = match cli.command {
        Command::Field(a) => cmd_field(a, &echo),
        Command::Sweep(a) => cmd_sweep(a, &echo),
        Command::Edge(a) => cmd_edge(a, &echo),
        Command::MoyalCheck(a) => cmd_moyal_check(a, &echo),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_) => 3,
                _ => 2,
            }
        }
    }
}

/// Caps rayon's global pool at `WEYL_THREADS` when set.
fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("WEYL_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::InvalidParameter(format!("WEYL_THREADS must be a positive integer, got `{raw}`")))?;
    // A pool installed earlier in this process (e.g. a previous call) is kept.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

/// `min:max:count` per axis, comma separated: `x` first, then `p`.
pub fn parse_grid(spec: &str) -> Result<PhaseGrid> {
    let axes: Vec<&str> = spec.split(',').collect();
    if axes.len() != 2 {
        return Err(invalid(format!("grid `{spec}` must have two comma-separated axes")));
    }
    let (x0, x1, nx) = parse_axis(axes[0])?;
    let (p0, p1, np) = parse_axis(axes[1])?;
    PhaseGrid::new(x0, x1, p0, p1, nx, np)
}

fn parse_axis(s: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || invalid(format!("axis `{s}` must be min:max:count"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    Ok((lo, hi, count))
}

/// A single value, or `min:max:count` inclusive points.
pub fn parse_points(s: &str) -> Result<Vec<f64>> {
    if !s.contains(':') {
        return s.trim().parse().map(|v| vec![v]).map_err(|_| invalid(format!("`{s}` is not a number")));
    }
    let (lo, hi, count) = parse_axis(s)?;
    match count {
        0 => Err(invalid(format!("`{s}` has no points"))),
        1 => Ok(vec![lo]),
        _ => Ok((0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()),
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive, got {v}")))
    }
}

fn positive_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(invalid("N must be positive"))
    } else {
        Ok(())
    }
}

/// Provenance written next to every output.
#[derive(Debug, Serialize)]
struct Manifest<'a, C: Serialize> {
    version: &'static str,
    command: &'static str,
    args: &'a [String],
    config: C,
    outputs: Vec<String>,
}

fn write_manifest<C: Serialize>(
    path: &Path,
    command: &'static str,
    args: &[String],
    config: C,
    outputs: &[&Path],
) -> Result<()> {
    let manifest = Manifest {
        version: VERSION,
        command,
        args,
        config,
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
    };
    let text = to_json_string(&manifest)?;
    write_file(path, |w| writeln!(w, "{text}"))?;
    Ok(())
}

/// `<path>.manifest.json` alongside `path`.
fn manifest_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn basis_for(model: ModelArg, hbar: f64, half_width: f64) -> Result<EigenBasis> {
    match model {
        ModelArg::Box => EigenBasis::particle_in_box(hbar, half_width),
        ModelArg::Oscillator => EigenBasis::oscillator(hbar),
    }
}

#[derive(Debug, Serialize)]
struct FieldConfig {
    model: ModelArg,
    observable: Observable,
    #[serde(rename = "N")]
    n_levels: usize,
    hbar: f64,
    mu: f64,
    #[serde(rename = "L")]
    half_width: Option<f64>,
    grid: PhaseGrid,
    format: Format,
}

#[derive(Serialize)]
struct FieldJson<'a> {
    grid: &'a PhaseGrid,
    values: &'a [f64],
}

fn cmd_field(a: FieldArgs, echo: &[String]) -> Result<i32> {
    let Common { model, mu, half_width } = a.common;
    positive_n(a.n_levels)?;
    positive("mu", mu)?;
    positive("L", half_width)?;
    let grid = parse_grid(&a.grid)?;
    let n = a.n_levels;
    let hbar = mu / n as f64;
    let l = half_width;
    let field = match (model, a.observable) {
        (ModelArg::Box, Observable::Projection) => {
            SymbolField::from_fn(grid, |x, p| symbol_projection_box(n, hbar, l, x, p))?
        }
        (ModelArg::Box, Observable::Momentum) => {
            SymbolField::from_fn(grid, |x, p| symbol_truncated_momentum_box(n, hbar, l, x, p))?
        }
        (ModelArg::Box, Observable::Multiplication) => {
            let m = box_multiplication_matrix(n, l, hbar)?;
            SymbolField::try_from_fn(grid, |x, p| symbol_of_matrix(&m, x, p))?
        }
        (ModelArg::Oscillator, obs @ (Observable::Projection | Observable::Momentum | Observable::Position)) => {
            let m = match obs {
                Observable::Projection => OperatorMatrix::identity(EigenBasis::oscillator(hbar)?, n),
                Observable::Position => ladder_matrices(hbar, n, 0)?.0,
                _ => ladder_matrices(hbar, n, 0)?.1,
            };
            SymbolField::try_from_fn(grid, |x, p| symbol_of_matrix(&m, x, p))?
        }
        (model, obs) => {
            return Err(invalid(format!("observable {obs:?} is not available for the {model:?} model")));
        }
    };
    match a.format {
        Format::Csv => write_file(&a.output, |w| field.write_csv(w))?,
        Format::Json => {
            let text = to_json_string(&FieldJson { grid: &grid, values: field.values() })?;
            write_file(&a.output, |w| writeln!(w, "{text}"))?
        }
    }
    let config = FieldConfig {
        model,
        observable: a.observable,
        n_levels: n,
        hbar,
        mu,
        half_width: (model == ModelArg::Box).then_some(l),
        grid,
        format: a.format,
    };
    write_manifest(&manifest_path(&a.output), "field", echo, config, &[&a.output])?;
    Ok(0)
}

fn cmd_sweep(a: SweepArgs, echo: &[String]) -> Result<i32> {
    let mut config = SweepConfig::new(&a.exp)?;
    if let Some(ns) = a.n_levels {
        config.n_levels = ns;
    }
    if let Some(ks) = a.powers {
        config.powers = ks;
    }
    if let Some(mu) = a.mu {
        config.mu = mu;
    }
    config.half_width = a.half_width;
    if let Some(v) = a.a {
        config.a = v;
    }
    if let Some(v) = a.b {
        config.b = v;
    }
    if let Some(g) = a.grid {
        config.grid = Some(parse_grid(&g)?);
    }
    let report = run_sweep(&config)?;

    let prefix = a.output.unwrap_or_else(|| PathBuf::from(&config.experiment));
    let with_ext = |ext: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(ext);
        PathBuf::from(s)
    };
    let (json, csv) = (with_ext(".json"), with_ext(".csv"));
    let text = report.to_json()?;
    write_file(&json, |w| writeln!(w, "{text}"))?;
    write_file(&csv, |w| report.write_csv(w))?;
    write_manifest(&with_ext(".manifest.json"), "sweep", echo, &config, &[&json, &csv])?;

    let mut err = io::stderr().lock();
    for v in &report.verdicts {
        let _ = writeln!(err, "{} {}: {}", if v.passed { "PASS" } else { "FAIL" }, v.name, v.detail);
    }
    Ok(if report.passed() { 0 } else { 1 })
}

#[derive(Debug, Serialize)]
struct EdgeConfig {
    kind: EdgeKind,
    #[serde(rename = "N")]
    n_levels: usize,
    hbar: f64,
    mu: f64,
    #[serde(rename = "L")]
    half_width: f64,
    coordinates: Vec<f64>,
    fixed: f64,
}

fn cmd_edge(a: EdgeArgs, echo: &[String]) -> Result<i32> {
    positive_n(a.n_levels)?;
    positive("mu", a.mu)?;
    positive("L", a.half_width)?;
    let (n, mu, l) = (a.n_levels, a.mu, a.half_width);
    let hbar = mu / n as f64;
    let (coords, fixed) = match a.kind {
        EdgeKind::X => (parse_points(&a.u)?, a.p),
        EdgeKind::P => (parse_points(&a.v)?, a.x),
    };
    let mut rows = Vec::with_capacity(coords.len());
    for &c in &coords {
        let (finite, limit) = match a.kind {
            EdgeKind::X => {
                (symbol_projection_box(n, hbar, l, l - hbar * c, fixed), edge_profile_x(c, fixed, mu, l))
            }
            EdgeKind::P => {
                let limit = edge_profile_p(fixed, c, l, EDGE_P_TOL)?;
                let p = PI * mu / (2.0 * l) + hbar * PI * c / (2.0 * l);
                (symbol_projection_box(n, hbar, l, fixed, p), limit)
            }
        };
        rows.push([c, finite, limit, (finite - limit).abs()]);
    }
    let write = |w: &mut dyn Write| -> io::Result<()> {
        writeln!(w, "coordinate,finite_N_value,limit_value,abs_error")?;
        for r in &rows {
            writeln!(w, "{},{},{},{}", fmt_g17(r[0]), fmt_g17(r[1]), fmt_g17(r[2]), fmt_g17(r[3]))?;
        }
        Ok(())
    };
    match &a.output {
        Some(path) => {
            write_file(path, write)?;
            let config =
                EdgeConfig { kind: a.kind, n_levels: n, hbar, mu, half_width: l, coordinates: coords, fixed };
            write_manifest(&manifest_path(path), "edge", echo, config, &[path])?;
        }
        None => {
            let mut out = io::stdout().lock();
            write(&mut out)?;
            out.flush()?;
        }
    }
    Ok(0)
}

/// Default grid for the oscillator: the disk padded by `5√ħ`, resolved so the
/// Moyal phase advances less than `π` between neighbouring nodes.
fn oscillator_moyal_grid(n: usize, mu: f64) -> Result<PhaseGrid> {
    let hbar = mu / n as f64;
    let r = (2.0 * mu).sqrt() + 5.0 * hbar.sqrt();
    let cells = (8.0 * r * r / (PI * hbar)).ceil() as usize + 1;
    PhaseGrid::new(-r, r, -r, r, cells, cells)
}

#[derive(Debug, Serialize)]
struct MoyalConfig {
    model: ModelArg,
    #[serde(rename = "N")]
    n_levels: usize,
    hbar: f64,
    mu: f64,
    #[serde(rename = "L")]
    half_width: Option<f64>,
    grid: PhaseGrid,
    points: usize,
    seed: u64,
    tol: f64,
}

fn cmd_moyal_check(a: MoyalArgs, echo: &[String]) -> Result<i32> {
    let Common { model, mu, half_width } = a.common;
    positive_n(a.n_levels)?;
    positive("mu", mu)?;
    positive("L", half_width)?;
    positive("tol", a.tol)?;
    if a.points == 0 {
        return Err(invalid("points must be positive"));
    }
    let n = a.n_levels;
    let hbar = mu / n as f64;
    let basis = basis_for(model, hbar, half_width)?;
    let grid = match (&a.grid, model) {
        (Some(g), _) => parse_grid(g)?,
        (None, ModelArg::Box) => idempotency_grid(n, mu, half_width)?,
        (None, ModelArg::Oscillator) => oscillator_moyal_grid(n, mu)?,
    };
    let proj = OperatorMatrix::identity(basis, n);
    let field = match model {
        ModelArg::Box => SymbolField::from_fn(grid, |x, p| symbol_projection_box(n, hbar, half_width, x, p))?,
        ModelArg::Oscillator => SymbolField::try_from_fn(grid, |x, p| symbol_of_matrix(&proj, x, p))?,
    };

    // Points drawn from the inner half of the classically allowed region.
    let (xr, pr) = match model {
        ModelArg::Box => (0.5 * half_width, 0.5 * PI * mu / (2.0 * half_width)),
        ModelArg::Oscillator => {
            let r = 0.5 * (2.0 * mu).sqrt() / 2f64.sqrt();
            (r, r)
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let points: Vec<(f64, f64)> =
        (0..a.points).map(|_| (rng.gen_range(-xr..=xr), rng.gen_range(-pr..=pr))).collect();

    let mut rows = Vec::with_capacity(points.len());
    let mut all_ok = true;
    for &(x, p) in &points {
        let direct = moyal_direct_row(&field, &field, hbar, x, &[p])?[0];
        let exact: Complex64 = moyal_via_composition(&proj, &proj, x, p)?;
        let err = (direct.value - exact).norm();
        let ok = err <= a.tol * exact.norm().max(1.0);
        all_ok &= ok;
        rows.push((x, p, direct, exact, err, ok));
    }
    let write = |w: &mut dyn Write| -> io::Result<()> {
        writeln!(w, "x,p,direct_re,direct_im,composition_re,composition_im,abs_error,quality_ok,within_tol")?;
        for (x, p, d, e, err, ok) in &rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                fmt_g17(*x),
                fmt_g17(*p),
                fmt_g17(d.value.re),
                fmt_g17(d.value.im),
                fmt_g17(e.re),
                fmt_g17(e.im),
                fmt_g17(*err),
                d.quality_ok,
                ok
            )?;
        }
        Ok(())
    };
    match &a.output {
        Some(path) => {
            write_file(path, write)?;
            let config = MoyalConfig {
                model,
                n_levels: n,
                hbar,
                mu,
                half_width: (model == ModelArg::Box).then_some(half_width),
                grid,
                points: a.points,
                seed: a.seed,
                tol: a.tol,
            };
            write_manifest(&manifest_path(path), "moyal-check", echo, config, &[path])?;
        }
        None => {
            let mut out = io::stdout().lock();
            write(&mut out)?;
            out.flush()?;
        }
    }
    Ok(if all_ok { 0 } else { 1 })
}
