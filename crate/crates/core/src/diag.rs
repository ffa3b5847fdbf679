//! Norm and convergence diagnostics.
//!
//! Absolute symbol norms go through the trace identity
//! `‖σ_T‖²_{L²} = 2πħ Σ|M_jk|²`, which is exact for finite rank. Grids are
//! only used for distances to compactly supported targets, corrected by the
//! symbol mass that falls outside the window.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::basis::EigenBasis;
use crate::error::{ensure, Error, Result};
use crate::export::{fmt_g17, to_json_string};
use crate::kernel::KernelEval;
use crate::limits::{
    bulk_constant, bulk_hbar0, bulk_profile_box, edge_profile_x, edge_profile_p, ClassicalRegion, LimitProfile,
};
use crate::moyal::{compose, moyal_direct_row};
use crate::quad::pairwise_sum_by;
use crate::scale::{l2_norm_sq_grid, PhaseGrid, SymbolField};
use crate::truncate::{
    box_momentum_matrix, box_multiplication_matrix, matrix_linear_power, matrix_linear_power_padded, OperatorMatrix,
};
use crate::weyl::{rescaled_kernel_f2, symbol_of_matrix, symbol_projection_box};

/// `2πħ Σ_{j,k} |M_jk|²`, the exact `L²(ℝ²)` norm² of the symbol.
pub fn hs_norm_sq_symbol(matrix: &OperatorMatrix, hbar: f64) -> f64 {
    2.0 * PI * hbar * pairwise_sum_by(matrix.entries(), |m| m.norm_sqr())
}

/// `2πħ Σ_{k≤N, j>N} |M_jk|²`, the symbol norm² of `Π_N^⊥ H Π_N`.
///
/// `padded` must hold the exact entries of `H` for labels up to its dimension.
pub fn offdiag_block_norm_sq(padded: &OperatorMatrix, n: usize, hbar: f64) -> Result<f64> {
    let dim = padded.dim();
    if dim <= n {
        return Err(Error::DimensionMismatch(format!(
            "padded dimension {dim} must exceed the truncation level {n}"
        )));
    }
    let mut block = Vec::with_capacity((dim - n) * n);
    for j in n + 1..=dim {
        block.extend_from_slice(&padded.row(j)[..n]);
    }
    Ok(2.0 * PI * hbar * pairwise_sum_by(&block, |m| m.norm_sqr()))
}

/// `B = 2πħ Σ_{k≤N, j>N} |C_jk|²` for the box momentum, by Parseval:
/// `Σ_j |C_jk|² = ‖p̂u_k‖² = (πħk/2L)²`, minus the retained block.
pub fn box_momentum_leak_norm_sq(n: usize, half_width: f64, hbar: f64) -> Result<f64> {
    ensure(n >= 1, || "truncation level must be positive".into())?;
    let c = box_momentum_matrix(n, half_width, hbar)?;
    let full: Vec<f64> = (1..=n)
        .map(|k| {
            let e = PI * hbar * k as f64 / (2.0 * half_width);
            e * e
        })
        .collect();
    let full = full.iter().sum::<f64>();
    let kept = pairwise_sum_by(c.entries(), |m| m.norm_sqr());
    Ok(2.0 * PI * hbar * (full - kept).max(0.0))
}

/// Global squared distance between a symbol and a compactly supported target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailDistance {
    /// `∬_window (σ − target)²` by the midpoint rule.
    pub windowed_sq: f64,
    /// `‖σ‖² − ∬_window σ²`, clamped at zero.
    pub tail_sq: f64,
    /// Unclamped tail mass was below `−1e-3 ‖σ‖²`: the window or grid is too coarse.
    pub suspicious: bool,
}

impl TailDistance {
    pub fn distance_sq(&self) -> f64 {
        self.windowed_sq + self.tail_sq
    }
}

/// Windowed distance² plus the symbol mass outside the window.
///
/// `field` must sample the symbol of `matrix`; `target` must be supported in the window.
pub fn l2_distance_with_tail(
    field: &SymbolField,
    target: &dyn LimitProfile,
    matrix: &OperatorMatrix,
    hbar: f64,
) -> Result<TailDistance> {
    let g = field.grid();
    let [x0, x1, p0, p1] = target.support().ok_or(Error::SupportExceedsWindow)?;
    if !g.covers(x0, x1, p0, p1) {
        return Err(Error::SupportExceedsWindow);
    }
    let total = hs_norm_sq_symbol(matrix, hbar);
    let squares: Vec<f64> = (0..g.nx)
        .into_par_iter()
        .flat_map_iter(|i| {
            let x = g.x(i);
            field.row(i).iter().enumerate().map(move |(j, &s)| {
                let d = s - target.eval(x, g.p(j));
                d * d
            })
        })
        .collect();
    let windowed_sq = crate::quad::pairwise_sum(&squares) * g.cell_area();
    let raw_tail = total - l2_norm_sq_grid(field);
    Ok(TailDistance { windowed_sq, tail_sq: raw_tail.max(0.0), suspicious: raw_tail < -1e-3 * total })
}

/// `C_n = binom(2n, n)/(n + 1)`.
pub fn catalan_number(n: usize) -> f64 {
    central_binomial(n) / (n as f64 + 1.0)
}

fn central_binomial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * (n + i) as f64 / i as f64)
}

/// `2π μ^{n+1} ((a² + b²)/2)ⁿ C_n`, the limit of the symbol norm² of truncated `(ax̂ + bp̂)ⁿ`.
pub fn catalan_limit_value(n: usize, a: f64, b: f64, mu: f64) -> f64 {
    2.0 * PI * mu.powi(n as i32 + 1) * (0.5 * (a * a + b * b)).powi(n as i32) * catalan_number(n)
}

/// `∫₀^{2π} (a cos θ + b sin θ)^{2n} dθ = 2π (a² + b²)ⁿ binom(2n, n)/4ⁿ`.
pub fn angular_integral(n: usize, a: f64, b: f64) -> f64 {
    2.0 * PI * (a * a + b * b).powi(n as i32) * central_binomial(n) / 4f64.powi(n as i32)
}

/// Registered sweep experiments.
pub const EXPERIMENTS: [&str; 10] = [
    "box-projection-l2",
    "box-edge-x",
    "box-edge-p",
    "box-bulk-sup",
    "box-tridiag-norm",
    "box-momentum-norm",
    "osc-catalan",
    "osc-offdiag",
    "osc-origin-parity",
    "moyal-idempotency",
];

/// Largest `N · nx · np` a grid-based sweep row may request.
pub const SWEEP_BUDGET: f64 = 4e10;

/// Input of [`run_sweep`]. `None` fields take per-experiment defaults.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub experiment: String,
    pub n_levels: Vec<usize>,
    pub mu: f64,
    pub half_width: Option<f64>,
    /// Powers `n` of `(ax̂ + bp̂)ⁿ` for the oscillator experiments.
    pub powers: Vec<usize>,
    pub a: f64,
    pub b: f64,
    pub grid: Option<PhaseGrid>,
}

impl SweepConfig {
    /// The named experiment with its default `N` list and parameters.
    pub fn new(experiment: &str) -> Result<Self> {
        let n_levels = match experiment {
            "box-projection-l2" => vec![10, 20, 40, 80],
            "box-edge-x" => vec![100, 200, 400],
            "box-edge-p" => vec![250, 500, 1000],
            "box-bulk-sup" => vec![50, 100, 200, 400],
            "box-tridiag-norm" => vec![16, 32, 64, 128],
            "box-momentum-norm" => vec![128, 256, 512],
            "osc-catalan" | "osc-offdiag" => vec![64, 128, 256, 512],
            "osc-origin-parity" => vec![4, 5, 6, 7],
            "moyal-idempotency" => vec![8, 16, 32],
            other => return Err(Error::UnknownExperiment(other.to_string())),
        };
        Ok(Self {
            experiment: experiment.to_string(),
            n_levels,
            mu: 1.0,
            half_width: None,
            powers: vec![1, 2, 3],
            a: 0.0,
            b: 1.0,
            grid: None,
        })
    }

    fn box_half_width(&self) -> f64 {
        self.half_width.unwrap_or(if self.experiment == "box-projection-l2" { (PI / 2.0).sqrt() } else { 1.0 })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub n_levels: usize,
    pub hbar: f64,
    pub metric: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Per-`N` metrics of one experiment with their verdicts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub experiment: String,
    pub model: &'static str,
    pub observable: &'static str,
    pub mu: f64,
    pub half_width: Option<f64>,
    pub rows: Vec<SweepRow>,
    pub verdicts: Vec<Verdict>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    /// Values of one metric, in row (ascending `N`) order.
    pub fn series(&self, metric: &str) -> Vec<(usize, f64)> {
        self.rows.iter().filter(|r| r.metric == metric).map(|r| (r.n_levels, r.value)).collect()
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(to_json_string(self)?)
    }

    pub fn write_csv<W: Write + ?Sized>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "N,hbar,metric,value")?;
        for r in &self.rows {
            writeln!(w, "{},{},{},{}", r.n_levels, fmt_g17(r.hbar), r.metric, fmt_g17(r.value))?;
        }
        Ok(())
    }
}

type Metrics = Vec<(String, f64)>;

/// Runs a registered experiment. Rows are computed in parallel over `N`.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport> {
    if !EXPERIMENTS.contains(&config.experiment.as_str()) {
        return Err(Error::UnknownExperiment(config.experiment.clone()));
    }
    let ns = &config.n_levels;
    ensure(!ns.is_empty(), || "N list is empty".into())?;
    ensure(ns.windows(2).all(|w| w[0] < w[1]), || format!("N list must be strictly increasing, got {ns:?}"))?;
    ensure(ns[0] >= 1, || "N must be positive".into())?;
    ensure(config.mu.is_finite() && config.mu > 0.0, || format!("mu must be positive, got {}", config.mu))?;
    if let Some(l) = config.half_width {
        ensure(l.is_finite() && l > 0.0, || format!("L must be positive, got {l}"))?;
    }
    let is_box = config.experiment.starts_with("box") || config.experiment == "moyal-idempotency";
    let l = config.box_half_width();
    let mu = config.mu;
    if config.experiment.starts_with("osc-catalan") || config.experiment == "osc-offdiag" {
        ensure(!config.powers.is_empty(), || "power list is empty".into())?;
    }

    let grid = match config.experiment.as_str() {
        "box-projection-l2" => Some(match config.grid {
            Some(g) => g,
            None => PhaseGrid::new(-1.5 * l, 1.5 * l, -3.0, 3.0, 800, 800)?,
        }),
        _ => config.grid,
    };
    if let Some(g) = grid {
        let cost = *ns.last().unwrap() as f64 * g.len() as f64;
        if cost > SWEEP_BUDGET {
            return Err(Error::ResourceGuard(format!("N · grid = {cost:e} exceeds {SWEEP_BUDGET:e}")));
        }
    }

    let per_n: Vec<Metrics> = ns
        .par_iter()
        .map(|&n| {
            let hbar = mu / n as f64;
            match config.experiment.as_str() {
                "box-projection-l2" => row_projection_l2(n, hbar, mu, l, grid.unwrap()),
                "box-edge-x" => row_edge_x(n, hbar, mu, l),
                "box-edge-p" => row_edge_p(n, hbar, mu, l),
                "box-bulk-sup" => row_bulk_sup(n, hbar, mu, l),
                "box-tridiag-norm" => row_tridiag(n, hbar, mu, l),
                "box-momentum-norm" => row_momentum(n, hbar, mu, l),
                "osc-catalan" => row_catalan(n, hbar, mu, config),
                "osc-offdiag" => row_offdiag(n, hbar, config),
                "osc-origin-parity" => row_origin_parity(n, hbar),
                "moyal-idempotency" => row_idempotency(n, hbar, mu, l, config.grid),
                _ => unreachable!(),
            }
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (&n, metrics) in ns.iter().zip(per_n) {
        for (metric, value) in metrics {
            rows.push(SweepRow { n_levels: n, hbar: mu / n as f64, metric, value });
        }
    }
    let mut report = SweepReport {
        experiment: config.experiment.clone(),
        model: if is_box { "box" } else { "oscillator" },
        observable: observable(&config.experiment),
        mu,
        half_width: is_box.then_some(l),
        rows,
        verdicts: Vec::new(),
    };
    report.verdicts = verdicts(&report, config);
    Ok(report)
}

fn observable(experiment: &str) -> &'static str {
    match experiment {
        "box-tridiag-norm" => "multiplication by sin(pi x / 2L)/sqrt(L)",
        "box-momentum-norm" => "momentum",
        "osc-catalan" | "osc-offdiag" => "(a x + b p)^n",
        _ => "projection",
    }
}

fn row_projection_l2(n: usize, hbar: f64, mu: f64, l: f64, grid: PhaseGrid) -> Result<Metrics> {
    let basis = EigenBasis::particle_in_box(hbar, l)?;
    let field = SymbolField::from_fn(grid, |x, p| symbol_projection_box(n, hbar, l, x, p))?;
    let region = ClassicalRegion::rectangle(mu, l)?;
    let d = l2_distance_with_tail(&field, &region, &OperatorMatrix::identity(basis, n), hbar)?;
    Ok(vec![
        ("distance_sq".into(), d.distance_sq()),
        ("windowed_sq".into(), d.windowed_sq),
        ("tail_sq".into(), d.tail_sq),
        ("relative_distance_sq".into(), d.distance_sq() / region.area()),
        ("tail_suspicious".into(), if d.suspicious { 1.0 } else { 0.0 }),
    ])
}

/// Points `lo + i (hi − lo)/(count − 1)`.
fn linspace(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    (0..count).map(move |i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
}

fn row_edge_x(n: usize, hbar: f64, mu: f64, l: f64) -> Result<Metrics> {
    let mut worst = 0.0f64;
    for p in [0.0, PI * mu / (4.0 * l)] {
        for u in linspace(0.0, 6.0, 121) {
            let got = symbol_projection_box(n, hbar, l, l - hbar * u, p);
            worst = worst.max((got - edge_profile_x(u, p, mu, l)).abs());
        }
    }
    Ok(vec![("max_abs_error".into(), worst)])
}

/// Tolerance handed to [`edge_profile_p`] by the sweeps.
pub const EDGE_P_TOL: f64 = 1e-9;

fn row_edge_p(n: usize, hbar: f64, mu: f64, l: f64) -> Result<Metrics> {
    let mut worst = 0.0f64;
    for x in [0.0, 0.5 * l] {
        for v in [0.25, 0.5, 1.5] {
            let p = PI * mu / (2.0 * l) + hbar * PI * v / (2.0 * l);
            let got = symbol_projection_box(n, hbar, l, x, p);
            worst = worst.max((got - edge_profile_p(x, v, l, EDGE_P_TOL)?).abs());
        }
    }
    Ok(vec![("max_abs_error".into(), worst)])
}

/// Bulk window `|x| ≤ ½`, `|y| ≤ 4` used by the bulk sweep.
pub const BULK_WINDOW: (f64, f64) = (0.5, 4.0);

fn row_bulk_sup(n: usize, hbar: f64, mu: f64, l: f64) -> Result<Metrics> {
    let (cu, cv) = BULK_WINDOW;
    let c = bulk_constant(mu, l, cu, cv)?;
    let eval = KernelEval::preferred(EigenBasis::particle_in_box(hbar, l)?, n);
    let sup = linspace(-cu, cu, 101)
        .flat_map(|x| linspace(-cv, cv, 161).map(move |y| (x, y)))
        .map(|(x, y)| (rescaled_kernel_f2(&eval, hbar, x, y) - bulk_profile_box(mu, l, y)).abs())
        .fold(0.0, f64::max);
    Ok(vec![
        ("sup_error".into(), sup),
        ("bound".into(), c * hbar),
        ("bound_ratio".into(), sup / (c * hbar)),
    ])
}

fn row_tridiag(n: usize, hbar: f64, mu: f64, l: f64) -> Result<Metrics> {
    let m = box_multiplication_matrix(n, l, hbar)?;
    let norm = hs_norm_sq_symbol(&m, hbar);
    let exact = PI * hbar * (n as f64 - 1.0) / l;
    let limit = PI * mu / l;
    Ok(vec![
        ("hs_norm_sq".into(), norm),
        ("exact_relative_error".into(), if exact == 0.0 { norm } else { (norm - exact).abs() / exact }),
        ("limit_gap".into(), (norm - limit).abs()),
    ])
}

fn row_momentum(n: usize, hbar: f64, mu: f64, l: f64) -> Result<Metrics> {
    let m = box_momentum_matrix(n, l, hbar)?;
    let norm = hs_norm_sq_symbol(&m, hbar);
    let limit = PI.powi(3) * mu.powi(3) / (6.0 * l * l);
    Ok(vec![
        ("hs_norm_sq".into(), norm),
        ("relative_error".into(), (norm - limit).abs() / limit),
        ("leak_norm_sq".into(), box_momentum_leak_norm_sq(n, l, hbar)?),
    ])
}

fn row_catalan(n: usize, hbar: f64, mu: f64, config: &SweepConfig) -> Result<Metrics> {
    config
        .powers
        .iter()
        .map(|&k| {
            let m = matrix_linear_power(config.a, config.b, k, hbar, n)?;
            let limit = catalan_limit_value(k, config.a, config.b, mu);
            Ok((format!("relative_error_n{k}"), (hs_norm_sq_symbol(&m, hbar) - limit).abs() / limit))
        })
        .collect()
}

fn row_offdiag(n: usize, hbar: f64, config: &SweepConfig) -> Result<Metrics> {
    config
        .powers
        .iter()
        .map(|&k| {
            let padded = matrix_linear_power_padded(config.a, config.b, k, hbar, n, k)?;
            Ok((format!("offdiag_n{k}"), offdiag_block_norm_sq(&padded, n, hbar)?))
        })
        .collect()
}

fn row_origin_parity(n: usize, hbar: f64) -> Result<Metrics> {
    let id = OperatorMatrix::identity(EigenBasis::oscillator(hbar)?, n);
    let value = symbol_of_matrix(&id, 0.0, 0.0)?;
    let want = if n % 2 == 1 { 2.0 } else { 0.0 };
    Ok(vec![("symbol_at_origin".into(), value), ("abs_error".into(), (value - want).abs())])
}

/// Grid for the direct Moyal route on `Π_N` in the box: the `x` window is the
/// box, the `p` window pads the rectangle by `2√(2μ)`, and both steps keep the
/// phase advance between neighbouring nodes below `π`.
pub fn idempotency_grid(n: usize, mu: f64, half_width: f64) -> Result<PhaseGrid> {
    let hbar = mu / n as f64;
    let pw = PI * mu / (2.0 * half_width) + 2.0 * (2.0 * mu).sqrt();
    let nx = (8.0 * half_width * pw / (PI * hbar)).ceil() as usize + 1;
    let np = (8.0 * half_width * pw / (PI * hbar)).ceil() as usize + 1;
    PhaseGrid::new(-half_width, half_width, -pw, pw, nx, np)
}

fn row_idempotency(n: usize, hbar: f64, mu: f64, l: f64, grid: Option<PhaseGrid>) -> Result<Metrics> {
    let basis = EigenBasis::particle_in_box(hbar, l)?;
    let proj = OperatorMatrix::identity(basis, n);
    let composition_defect = compose(&proj, &proj)?.sub(&proj)?.frobenius_norm();

    let g = match grid {
        Some(g) => g,
        None => idempotency_grid(n, mu, l)?,
    };
    let field = SymbolField::from_fn(g, |x, p| symbol_projection_box(n, hbar, l, x, p))?;
    let square_defect = l2_norm_sq_grid(&field.map(|s| s * s - s)?);

    // Interior sample points of the rectangle.
    let pmax = PI * mu / (2.0 * l);
    let ps: Vec<f64> = linspace(-0.75 * pmax, 0.75 * pmax, 7).collect();
    let xs: Vec<f64> = linspace(-0.75 * l, 0.75 * l, 7).collect();
    let mut sq = Vec::new();
    let mut quality = 1.0;
    for &x in &xs {
        for (e, &p) in moyal_direct_row(&field, &field, hbar, x, &ps)?.iter().zip(&ps) {
            let want = symbol_projection_box(n, hbar, l, x, p);
            sq.push((e.value - Complex64::new(want, 0.0)).norm_sqr());
            if !e.quality_ok {
                quality = 0.0;
            }
        }
    }
    let direct_defect = (sq.iter().sum::<f64>() / sq.len() as f64).sqrt();
    Ok(vec![
        ("composition_defect".into(), composition_defect),
        ("square_defect_sq".into(), square_defect),
        ("direct_rms_defect".into(), direct_defect),
        ("direct_quality_ok".into(), quality),
    ])
}

/// Strict decrease over the last two steps of the `N` list.
fn decreasing(report: &SweepReport, metric: &str) -> Option<Verdict> {
    let s = report.series(metric);
    if s.len() < 3 {
        return None;
    }
    let tail = &s[s.len() - 3..];
    let passed = tail[0].1 > tail[1].1 && tail[1].1 > tail[2].1;
    let detail = tail.iter().map(|(n, v)| format!("N={n}: {}", fmt_g17(*v))).collect::<Vec<_>>().join(", ");
    Some(Verdict { name: format!("{metric} decreasing"), passed, detail })
}

fn all_rows(report: &SweepReport, metric: &str, name: &str, ok: impl Fn(f64) -> bool) -> Verdict {
    let bad: Vec<String> = report
        .series(metric)
        .into_iter()
        .filter(|&(_, v)| !ok(v))
        .map(|(n, v)| format!("N={n}: {}", fmt_g17(v)))
        .collect();
    Verdict {
        name: name.to_string(),
        passed: bad.is_empty(),
        detail: if bad.is_empty() { "all rows".into() } else { bad.join(", ") },
    }
}

fn doubling_ratios(report: &SweepReport, metric: &str, lo: f64, hi: f64) -> Option<Verdict> {
    let s = report.series(metric);
    let pairs: Vec<(usize, f64)> =
        s.windows(2).filter(|w| w[1].0 == 2 * w[0].0).map(|w| (w[0].0, w[1].1 / w[0].1)).collect();
    if pairs.is_empty() {
        return None;
    }
    let passed = pairs.iter().all(|&(_, r)| (lo..=hi).contains(&r));
    let detail = pairs.iter().map(|(n, r)| format!("N={n}: {}", fmt_g17(*r))).collect::<Vec<_>>().join(", ");
    Some(Verdict { name: format!("{metric} doubling ratio in [{lo}, {hi}]"), passed, detail })
}

fn verdicts(report: &SweepReport, config: &SweepConfig) -> Vec<Verdict> {
    let mut out: Vec<Option<Verdict>> = Vec::new();
    match config.experiment.as_str() {
        "box-projection-l2" => {
            out.push(decreasing(report, "distance_sq"));
            out.push(Some(all_rows(report, "tail_suspicious", "tail mass consistent", |v| v == 0.0)));
        }
        "box-edge-x" | "box-edge-p" => out.push(decreasing(report, "max_abs_error")),
        "box-bulk-sup" => {
            let h0 = bulk_hbar0(config.box_half_width(), BULK_WINDOW.0, BULK_WINDOW.1);
            let ok = config.n_levels.iter().all(|&n| config.mu / (n as f64) < h0);
            out.push(Some(Verdict {
                name: "hbar below hbar0".into(),
                passed: ok,
                detail: format!("hbar0 = {}", fmt_g17(h0)),
            }));
            out.push(Some(all_rows(report, "bound_ratio", "sup error within C hbar", |v| v <= 1.0)));
        }
        "box-tridiag-norm" => {
            out.push(Some(all_rows(report, "exact_relative_error", "finite-N identity", |v| v <= 1e-12)));
            out.push(decreasing(report, "limit_gap"));
        }
        "box-momentum-norm" => {
            out.push(decreasing(report, "relative_error"));
            out.push(doubling_ratios(report, "leak_norm_sq", 0.0, 0.75));
        }
        "osc-catalan" => {
            for k in &config.powers {
                out.push(decreasing(report, &format!("relative_error_n{k}")));
            }
        }
        "osc-offdiag" => {
            for &k in &config.powers {
                let metric = format!("offdiag_n{k}");
                out.push(doubling_ratios(report, &metric, 0.4, 0.6));
                out.push(offdiag_bound(report, &metric, k, config));
            }
        }
        "osc-origin-parity" => {
            out.push(Some(all_rows(report, "abs_error", "origin value 1 + (-1)^(N+1)", |v| v <= 1e-4)));
        }
        "moyal-idempotency" => {
            out.push(Some(all_rows(report, "composition_defect", "composition idempotent", |v| v <= 1e-12)));
            out.push(decreasing(report, "square_defect_sq"));
        }
        _ => unreachable!(),
    }
    out.into_iter().flatten().collect()
}

/// `value ≤ 2 c (a² + b²)ⁿ ħ^{n+1} Nⁿ` with `c` calibrated on the first row.
fn offdiag_bound(report: &SweepReport, metric: &str, k: usize, config: &SweepConfig) -> Option<Verdict> {
    let s = report.series(metric);
    let scale = |n: usize| {
        let hbar = config.mu / n as f64;
        (config.a * config.a + config.b * config.b).powi(k as i32) * hbar.powi(k as i32 + 1) * (n as f64).powi(k as i32)
    };
    let &(n0, v0) = s.first()?;
    let c = v0 / scale(n0);
    let passed = s.iter().all(|&(n, v)| v <= 2.0 * c * scale(n));
    Some(Verdict {
        name: format!("{metric} within calibrated bound"),
        passed,
        detail: format!("c = {}", fmt_g17(c)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::gauss_legendre;
    use crate::truncate::ladder_matrices;

    #[test]
    fn identity_norm_is_exact() {
        for n in [1usize, 10, 100] {
            let hbar = 1.0 / n as f64;
            let id = OperatorMatrix::identity(EigenBasis::oscillator(hbar).unwrap(), n);
            assert_eq!(hs_norm_sq_symbol(&id, hbar), 2.0 * PI * hbar * n as f64);
            assert_eq!(hs_norm_sq_symbol(&OperatorMatrix::zeros(*id.basis(), n), hbar), 0.0);
        }
    }

    #[test]
    fn offdiag_blocks() {
        let basis = EigenBasis::oscillator(0.1).unwrap();
        let diag = OperatorMatrix::from_fn(basis, 8, |j, k| if j == k { Complex64::new(j as f64, 0.0) } else { Complex64::new(0.0, 0.0) });
        assert_eq!(offdiag_block_norm_sq(&diag, 5, 0.1).unwrap(), 0.0);
        assert!(offdiag_block_norm_sq(&diag, 8, 0.1).is_err());
        // Momentum couples N to N + 1 only: 2πħ · ħN/2.
        let hbar = 1.0 / 64.0;
        let (_, p) = ladder_matrices(hbar, 64, 1).unwrap();
        let v = offdiag_block_norm_sq(&p, 64, hbar).unwrap();
        assert!((v - PI * hbar * hbar * 64.0).abs() < 1e-15);
    }

    #[test]
    fn leak_matches_padded_sum() {
        let (n, l, hbar) = (12, 1.0, 1.0 / 12.0);
        let big = box_momentum_matrix(4000, l, hbar).unwrap();
        let direct = offdiag_block_norm_sq(&big, n, hbar).unwrap();
        let parseval = box_momentum_leak_norm_sq(n, l, hbar).unwrap();
        // The padded sum misses a tail of order Σ_{j>4000} k²/j².
        assert!(parseval > direct && parseval - direct < 1e-3 * parseval, "{parseval} {direct}");
    }

    #[test]
    fn catalan_values() {
        let c: Vec<f64> = (0..6).map(catalan_number).collect();
        assert_eq!(c, vec![1.0, 1.0, 2.0, 5.0, 14.0, 42.0]);
        assert!((catalan_limit_value(0, 0.3, 0.7, 1.3) - 2.0 * PI * 1.3).abs() < 1e-14);
        assert!((catalan_limit_value(1, 0.0, 1.0, 1.0) - PI).abs() < 1e-15);
        assert!((catalan_limit_value(2, 1.0, 1.0, 1.0) - 4.0 * PI).abs() < 1e-14);
        // Polar quadrature of ∫∫_{x²+p²≤2} (x + p)⁴.
        let rule = gauss_legendre(64);
        let r_max = 2f64.sqrt();
        let q = rule.integrate(0.0, r_max, |r| {
            r * rule.integrate(0.0, 2.0 * PI, |t| (r * t.cos() + r * t.sin()).powi(4))
        });
        assert!((q - 4.0 * PI).abs() < 1e-10, "{q}");
    }

    #[test]
    fn angular_values() {
        assert!((angular_integral(0, 0.4, 0.9) - 2.0 * PI).abs() < 1e-15);
        assert!((angular_integral(1, 1.0, 0.0) - PI).abs() < 1e-15);
        for (n, a, b) in [(3usize, 2.0, 1.0), (4, 0.5, -1.5)] {
            let m = 2000;
            let h = 2.0 * PI / m as f64;
            let trap: f64 = (0..m).map(|i| {
                let t = i as f64 * h;
                (a * t.cos() + b * t.sin()).powi(2 * n as i32)
            }).sum::<f64>() * h;
            let want = angular_integral(n, a, b);
            assert!((trap - want).abs() <= 1e-9 * want, "{trap} {want}");
        }
    }

    #[test]
    fn tail_distance_of_exact_target() {
        // A rank-one box state sampled on a window that holds almost all of its mass.
        let (l, hbar) = (1.0, 0.25);
        let basis = EigenBasis::particle_in_box(hbar, l).unwrap();
        let m = OperatorMatrix::identity(basis, 1);
        let g = PhaseGrid::new(-1.0, 1.0, -40.0, 40.0, 200, 2000).unwrap();
        let f = SymbolField::from_fn(g, |x, p| symbol_projection_box(1, hbar, l, x, p)).unwrap();
        struct Same;
        impl LimitProfile for Same {
            fn eval(&self, x: f64, p: f64) -> f64 {
                symbol_projection_box(1, 0.25, 1.0, x, p)
            }
            fn support(&self) -> Option<[f64; 4]> {
                Some([-1.0, 1.0, -1.0, 1.0])
            }
        }
        let d = l2_distance_with_tail(&f, &Same, &m, hbar).unwrap();
        assert_eq!(d.windowed_sq, 0.0);
        assert!(d.tail_sq < 0.01 * hs_norm_sq_symbol(&m, hbar), "{d:?}");
        assert!(!d.suspicious);

        let region = ClassicalRegion::rectangle(1.0, 1.0).unwrap();
        let small = PhaseGrid::new(-0.5, 0.5, -3.0, 3.0, 10, 10).unwrap();
        let f = SymbolField::from_fn(small, |_, _| 0.0).unwrap();
        assert!(matches!(l2_distance_with_tail(&f, &region, &m, hbar), Err(Error::SupportExceedsWindow)));
    }

    #[test]
    fn sweep_validation() {
        assert!(matches!(SweepConfig::new("no-such"), Err(Error::UnknownExperiment(_))));
        let mut c = SweepConfig::new("box-tridiag-norm").unwrap();
        c.n_levels.clear();
        assert!(run_sweep(&c).is_err());
        c.n_levels = vec![8, 4];
        assert!(run_sweep(&c).is_err());
        let mut c = SweepConfig::new("box-projection-l2").unwrap();
        c.n_levels = vec![100_000];
        assert!(matches!(run_sweep(&c), Err(Error::ResourceGuard(_))));
    }

    #[test]
    fn tridiag_sweep_is_deterministic() {
        let c = SweepConfig::new("box-tridiag-norm").unwrap();
        let a = run_sweep(&c).unwrap();
        let b = run_sweep(&c).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert!(a.passed(), "{:?}", a.verdicts);
        assert_eq!(a.series("hs_norm_sq").len(), 4);
        let mut csv = Vec::new();
        a.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), 1 + 12);
        assert!(text.starts_with("N,hbar,metric,value\n16,0.0625,hs_norm_sq,"));
    }
}
