//! Coefficient matrices of truncated observables `Π_N H Π_N`.
//!
//! A matrix `M` of dimension `n` stands for the operator `Σ_{j,k} M_jk |u_j⟩⟨u_k|`,
//! so `M_jk = ⟨u_j|H|u_k⟩`. Labels are 1-based in every public accessor.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{EigenBasis, Model};
use crate::error::{ensure, Error, Result};
use crate::export::to_json_string;
use crate::quad::composite_nodes;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest path length [`enumerate_paths`] will list.
pub const PATH_ENUMERATION_LIMIT: usize = 24;
/// Largest power [`matrix_linear_power`] will build.
pub const LINEAR_POWER_LIMIT: usize = 12;

/// Square complex coefficient matrix in an eigenbasis, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    basis: EigenBasis,
    n: usize,
    entries: Vec<Complex64>,
}

/// Finite-rank operator as consumed by the Moyal layer.
pub type FiniteRankOperator = OperatorMatrix;

impl OperatorMatrix {
    pub fn new(basis: EigenBasis, n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(format!("{} entries for a {n}×{n} matrix", entries.len())));
        }
        Ok(Self { basis, n, entries })
    }

    /// Builds `M_jk = f(j, k)` for `1 ≤ j, k ≤ n`.
    pub fn from_fn(basis: EigenBasis, n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for j in 1..=n {
            for k in 1..=n {
                entries.push(f(j, k));
            }
        }
        Self { basis, n, entries }
    }

    pub fn zeros(basis: EigenBasis, n: usize) -> Self {
        Self { basis, n, entries: vec![ZERO; n * n] }
    }

    pub fn identity(basis: EigenBasis, n: usize) -> Self {
        Self::from_fn(basis, n, |j, k| if j == k { ONE } else { ZERO })
    }

    /// `|u_j⟩⟨u_k|` embedded in dimension `n`.
    pub fn rank_one(basis: EigenBasis, n: usize, j: usize, k: usize) -> Result<Self> {
        ensure((1..=n).contains(&j) && (1..=n).contains(&k), || {
            format!("labels ({j}, {k}) outside 1..={n}")
        })?;
        let mut m = Self::zeros(basis, n);
        m.set(j, k, ONE);
        Ok(m)
    }

    pub fn basis(&self) -> &EigenBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// `M_jk`, 1-based.
    pub fn entry(&self, j: usize, k: usize) -> Complex64 {
        self.entries[(j - 1) * self.n + (k - 1)]
    }

    pub fn set(&mut self, j: usize, k: usize, v: Complex64) {
        self.entries[(j - 1) * self.n + (k - 1)] = v;
    }

    /// Row `j` (1-based) as a slice over `k = 1..=n`.
    pub fn row(&self, j: usize) -> &[Complex64] {
        &self.entries[(j - 1) * self.n..j * self.n]
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.n, other.n)));
        }
        if self.basis != other.basis {
            return Err(Error::DimensionMismatch("matrices live in different eigenbases".into()));
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let n = self.n;
        let mut entries = vec![ZERO; n * n];
        entries.par_chunks_mut(n).enumerate().for_each(|(i, out)| {
            for (l, &a) in self.entries[i * n..(i + 1) * n].iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, &b) in out.iter_mut().zip(&other.entries[l * n..(l + 1) * n]) {
                    *o += a * b;
                }
            }
        });
        Ok(Self { basis: self.basis, n, entries })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(Self { basis: self.basis, n: self.n, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(Self { basis: self.basis, n: self.n, entries })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { basis: self.basis, n: self.n, entries: self.entries.iter().map(|v| v * c).collect() }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.basis, self.n, |j, k| self.entry(k, j).conj())
    }

    /// Integer power by repeated multiplication; `pow(0)` is the identity.
    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::identity(self.basis, self.n);
        for _ in 0..e {
            acc = acc.matmul(self).expect("same shape");
        }
        acc
    }

    /// Leading `n × n` block.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        ensure(n <= self.n, || format!("cannot truncate a {}×{} matrix to {n}", self.n, self.n))?;
        Ok(Self::from_fn(self.basis, n, |j, k| self.entry(j, k)))
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.entries.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sq().sqrt()
    }

    /// `max |M_jk − conj(M_kj)| ≤ tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        (1..=self.n).all(|j| (j..=self.n).all(|k| (self.entry(j, k) - self.entry(k, j).conj()).norm() <= tol))
    }

    /// `{"n": N, "hbar": ħ, "entries": [[re, im], …]}`, row-major.
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Repr<'a> {
            n: usize,
            hbar: f64,
            model: &'a Model,
            entries: Vec<[f64; 2]>,
        }
        let repr = Repr {
            n: self.n,
            hbar: self.basis.hbar,
            model: &self.basis.model,
            entries: self.entries.iter().map(|c| [c.re, c.im]).collect(),
        };
        Ok(to_json_string(&repr)?)
    }

    pub fn write_json<W: Write + ?Sized>(&self, w: &mut W) -> Result<()> {
        w.write_all(self.to_json()?.as_bytes())?;
        Ok(())
    }
}

/// A path `k = j_0 → j_1 → … → j_n = ℓ` on the positive integers with unit steps.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticePath {
    nodes: Vec<usize>,
}

impl LatticePath {
    pub fn new(nodes: Vec<usize>) -> Result<Self> {
        ensure(!nodes.is_empty(), || "a path needs a starting index".into())?;
        ensure(nodes.iter().all(|&j| j >= 1), || "path indices start at 1".into())?;
        ensure(nodes.windows(2).all(|w| w[0].abs_diff(w[1]) == 1), || "path steps must be ±1".into())?;
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn start(&self) -> usize {
        self.nodes[0]
    }

    pub fn end(&self) -> usize {
        *self.nodes.last().expect("nonempty")
    }

    /// Number of steps `n`.
    pub fn len(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Consecutive pairs `(j_m, j_{m+1})`.
    pub fn steps(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nodes.windows(2).map(|w| (w[0], w[1]))
    }
}

/// All `n`-step paths from `k` to `l` that stay on indices `≥ 1`.
pub fn enumerate_paths(n: usize, k: usize, l: usize) -> Result<Vec<LatticePath>> {
    if n > PATH_ENUMERATION_LIMIT {
        return Err(Error::EnumerationRefused { steps: n, limit: PATH_ENUMERATION_LIMIT });
    }
    ensure(k >= 1 && l >= 1, || "path endpoints start at 1".into())?;
    let mut out = Vec::new();
    if k.abs_diff(l) <= n {
        let mut stack = Vec::with_capacity(n + 1);
        stack.push(k);
        walk_paths(&mut stack, n, l, &mut out);
    }
    Ok(out)
}

fn walk_paths(stack: &mut Vec<usize>, left: usize, l: usize, out: &mut Vec<LatticePath>) {
    let cur = *stack.last().expect("nonempty");
    if left == 0 {
        out.push(LatticePath { nodes: stack.clone() });
        return;
    }
    for next in [cur - 1, cur + 1] {
        if next >= 1 && next.abs_diff(l) < left {
            stack.push(next);
            walk_paths(stack, left - 1, l, out);
            stack.pop();
        }
    }
}

/// Which ladder index enters the square-root factor of a step weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexConvention {
    /// `√max(j_m, j_{m+1})` with the labels taken literally.
    Literal,
    /// `√min(j_m, j_{m+1})`, the value fixed by `⟨u_{k+1}|x̂|u_k⟩ = √(ħk/2)`.
    Ladder,
}

/// `Π_m (a + (j_{m+1} − j_m) i b) · √max(j_m, j_{m+1})`.
pub fn path_weight(path: &LatticePath, a: f64, b: f64) -> Complex64 {
    path_weight_with(path, a, b, IndexConvention::Literal)
}

pub fn path_weight_with(path: &LatticePath, a: f64, b: f64, convention: IndexConvention) -> Complex64 {
    path.steps().fold(ONE, |acc, (j, jn)| acc * step_factor(j, jn, a, b, convention))
}

fn step_factor(j: usize, jn: usize, a: f64, b: f64, convention: IndexConvention) -> Complex64 {
    let dir = if jn > j { 1.0 } else { -1.0 };
    let idx = match convention {
        IndexConvention::Literal => j.max(jn),
        IndexConvention::Ladder => j.min(jn),
    };
    Complex64::new(a, dir * b) * (idx as f64).sqrt()
}

/// `Π_N (a x̂ + b p̂)^n Π_N` for the oscillator at `ħ`, as a `dim × dim` matrix.
///
/// Every `n`-step path from each column index is walked explicitly with
/// ladder-convention weights, over indices up to `dim + n`, then cropped.
pub fn matrix_linear_power(a: f64, b: f64, n: usize, hbar: f64, dim: usize) -> Result<OperatorMatrix> {
    if n > LINEAR_POWER_LIMIT {
        return Err(Error::EnumerationRefused { steps: n, limit: LINEAR_POWER_LIMIT });
    }
    matrix_linear_power_padded(a, b, n, hbar, dim, n)?.truncate(dim)
}

/// As [`matrix_linear_power`] but returns the `(dim + pad) × (dim + pad)` block.
/// Entries with both labels `≤ dim + pad − n` are exact.
pub fn matrix_linear_power_padded(
    a: f64,
    b: f64,
    n: usize,
    hbar: f64,
    dim: usize,
    pad: usize,
) -> Result<OperatorMatrix> {
    if n > LINEAR_POWER_LIMIT {
        return Err(Error::EnumerationRefused { steps: n, limit: LINEAR_POWER_LIMIT });
    }
    let basis = EigenBasis::oscillator(hbar)?;
    let size = dim + pad;
    let scale = (0.5 * hbar).powf(0.5 * n as f64);
    let columns: Vec<Vec<Complex64>> = (1..=size)
        .into_par_iter()
        .map(|k| {
            let mut col = vec![ZERO; size];
            walk_weights(k, n, a, b, ONE, &mut col);
            col
        })
        .collect();
    let mut m = OperatorMatrix::zeros(basis, size);
    for (k, col) in columns.iter().enumerate() {
        for (l, v) in col.iter().enumerate() {
            m.set(l + 1, k + 1, v * scale);
        }
    }
    Ok(m)
}

fn walk_weights(cur: usize, left: usize, a: f64, b: f64, w: Complex64, col: &mut [Complex64]) {
    if left == 0 {
        if cur <= col.len() {
            col[cur - 1] += w;
        }
        return;
    }
    // Endpoints beyond the kept block cannot return within `left` steps.
    if cur > col.len() + left {
        return;
    }
    if cur > 1 {
        let f = step_factor(cur, cur - 1, a, b, IndexConvention::Ladder);
        walk_weights(cur - 1, left - 1, a, b, w * f, col);
    }
    let f = step_factor(cur, cur + 1, a, b, IndexConvention::Ladder);
    walk_weights(cur + 1, left - 1, a, b, w * f, col);
}

/// Oscillator position and momentum matrices of dimension `n + pad`.
pub fn ladder_matrices(hbar: f64, n: usize, pad: usize) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let basis = EigenBasis::oscillator(hbar)?;
    let dim = n + pad;
    let x = OperatorMatrix::from_fn(basis, dim, |j, k| {
        if j.abs_diff(k) == 1 {
            Complex64::new((0.5 * hbar * j.min(k) as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    });
    let p = OperatorMatrix::from_fn(basis, dim, |j, k| {
        let c = (0.5 * hbar * j.min(k) as f64).sqrt();
        if j == k + 1 {
            Complex64::new(0.0, c)
        } else if k == j + 1 {
            Complex64::new(0.0, -c)
        } else {
            ZERO
        }
    });
    Ok((x, p))
}

/// `Π_N g Π_N` for multiplication by `g(x) = sin(πx/2L)/√L` in the box:
/// `−1/(2√L)` on the first off-diagonals, zero elsewhere.
pub fn box_multiplication_matrix(n: usize, half_width: f64, hbar: f64) -> Result<OperatorMatrix> {
    let basis = EigenBasis::particle_in_box(hbar, half_width)?;
    let c = -0.5 / half_width.sqrt();
    Ok(OperatorMatrix::from_fn(basis, n, |j, k| {
        if j.abs_diff(k) == 1 {
            Complex64::new(c, 0.0)
        } else {
            ZERO
        }
    }))
}

/// `C_jk = ⟨u_j|p̂|u_k⟩` for the box: `−(iħ/L)[1 − (−1)^{j+k}] jk/(j² − k²)`.
pub fn box_momentum_entry(j: usize, k: usize, half_width: f64, hbar: f64) -> Complex64 {
    if (j + k).is_multiple_of(2) {
        return ZERO;
    }
    let (jf, kf) = (j as f64, k as f64);
    Complex64::new(0.0, -2.0 * hbar / half_width * (jf * kf / (jf * jf - kf * kf)))
}

pub fn box_momentum_matrix(n: usize, half_width: f64, hbar: f64) -> Result<OperatorMatrix> {
    let basis = EigenBasis::particle_in_box(hbar, half_width)?;
    Ok(OperatorMatrix::from_fn(basis, n, |j, k| box_momentum_entry(j, k, half_width, hbar)))
}

/// A phase-space function handed to [`generic_weyl_matrix`].
#[derive(Clone, Copy)]
pub enum PhaseFunction<'a> {
    /// `f(x, p) = g(x)`; the momentum integral is done exactly.
    PositionOnly(&'a (dyn Fn(f64) -> f64 + Sync)),
    General(&'a (dyn Fn(f64, f64) -> f64 + Sync)),
}

/// Base node count per axis for [`generic_weyl_matrix`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenericQuadSpec {
    pub nodes: usize,
    /// Momentum cutoff; `None` picks one from the basis.
    pub p_halfwidth: Option<f64>,
}

impl Default for GenericQuadSpec {
    fn default() -> Self {
        Self { nodes: 128, p_halfwidth: None }
    }
}

/// Result of [`generic_weyl_matrix`].
#[derive(Debug, Clone)]
pub struct GenericWeylMatrix {
    pub matrix: OperatorMatrix,
    /// Largest entry change between the base and refined rules.
    pub refinement_delta: f64,
    /// Whether `refinement_delta ≤ 1e-6`.
    pub converged: bool,
}

/// `⟨u_j|Op^ħ(f)|u_k⟩` by quadrature; a slow oracle.
///
/// Uses `M_jk = (1/2π) ∬ u_j(X + ħs/2) u_k(X − ħs/2) F(X, s) dX ds` with
/// `F(X, s) = ∫ f(X, p) e^{ips} dp`, evaluated at two resolutions.
pub fn generic_weyl_matrix(
    f: PhaseFunction<'_>,
    basis: EigenBasis,
    n: usize,
    spec: GenericQuadSpec,
) -> Result<GenericWeylMatrix> {
    ensure(n >= 1, || "matrix dimension must be positive".into())?;
    ensure(spec.nodes >= 16, || format!("at least 16 nodes per axis required, got {}", spec.nodes))?;
    let coarse = generic_weyl_once(f, basis, n, spec.nodes, 1.0, spec.p_halfwidth);
    let fine = generic_weyl_once(f, basis, n, spec.nodes, 1.5, spec.p_halfwidth);
    let refinement_delta = coarse
        .entries
        .iter()
        .zip(&fine.entries)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(GenericWeylMatrix { matrix: fine, refinement_delta, converged: refinement_delta <= 1e-6 })
}

fn generic_weyl_once(
    f: PhaseFunction<'_>,
    basis: EigenBasis,
    n: usize,
    nodes: usize,
    refine: f64,
    p_halfwidth: Option<f64>,
) -> OperatorMatrix {
    let hbar = basis.hbar;
    let (xa, xb) = basis.quadrature_window(n);
    let scaled = |m: usize| (m as f64 * refine).ceil() as usize;
    let xs = composite_nodes(xa, xb, scaled(nodes.max(6 * (n + 10))));
    match f {
        PhaseFunction::PositionOnly(g) => {
            let rows: Vec<(f64, Vec<f64>)> = xs.iter().map(|&(x, w)| (w * g(x), basis.eval_all(n, x))).collect();
            OperatorMatrix::from_fn(basis, n, |j, k| {
                Complex64::new(rows.iter().map(|(w, u)| w * u[j - 1] * u[k - 1]).sum(), 0.0)
            })
        }
        PhaseFunction::General(func) => {
            let w_half = 0.5 * (xb - xa);
            let pmax = p_halfwidth.unwrap_or_else(|| match basis.model {
                Model::Oscillator => (2.0 * hbar * (n as f64 + 10.0)).sqrt() + 10.0 * hbar.sqrt(),
                Model::Box { half_width } => 4.0 * hbar * PI * (n as f64 + 10.0) / (2.0 * half_width),
            });
            let smax = 2.0 * w_half / hbar;
            // Six nodes per period of e^{ips} over the box [-pmax, pmax] x [-smax, smax].
            let osc = (6.0 * pmax * smax / PI).ceil() as usize;
            let ss = composite_nodes(-smax, smax, scaled(nodes.max(osc)));
            let ps = composite_nodes(-pmax, pmax, scaled(nodes.max(osc)));
            let partial: Vec<Vec<Complex64>> = xs
                .par_iter()
                .map(|&(x, wx)| {
                    let fp: Vec<(f64, f64)> = ps.iter().map(|&(p, wp)| (p, wp * func(x, p))).collect();
                    let mut acc = vec![ZERO; n * n];
                    for &(s, ws) in &ss {
                        let (xp, xm) = (x + 0.5 * hbar * s, x - 0.5 * hbar * s);
                        if xp.abs() > w_half || xm.abs() > w_half {
                            continue;
                        }
                        let ft: Complex64 = fp.iter().map(|&(p, v)| Complex64::from_polar(v, p * s)).sum();
                        let c = ft * (wx * ws / (2.0 * PI));
                        let up = basis.eval_all(n, xp);
                        let um = basis.eval_all(n, xm);
                        for (j, &a) in up.iter().enumerate() {
                            if a == 0.0 {
                                continue;
                            }
                            let ca = c * a;
                            for (k, &b) in um.iter().enumerate() {
                                acc[j * n + k] += ca * b;
                            }
                        }
                    }
                    acc
                })
                .collect();
            let mut entries = vec![ZERO; n * n];
            for row in partial {
                for (e, v) in entries.iter_mut().zip(row) {
                    *e += v;
                }
            }
            OperatorMatrix { basis, n, entries }
        }
    }
}
