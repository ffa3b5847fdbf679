//! Moyal products `σ₁ ♯ σ₂`, by operator composition and by direct quadrature.
//!
//! The direct route samples both symbols at the cell centres of one grid and
//! evaluates
//!
//! ```text
//! (σ₁♯σ₂)(x, p) = (πħ)⁻² ∫ σ₁(x', p') σ₂(x'', p'')
//!                 · exp{(2i/ħ)[(x' − x)(p'' − p) − (x'' − x)(p' − p)]} dx' dp' dx'' dp''
//! ```
//!
//! by the midpoint rule. The `p'` and `p''` sums factor into two
//! `nx × nx` matrices per evaluation abscissa `x`, after which each `p` costs
//! `O(nx)`. No interpolation is needed because every symbol argument is a
//! grid node.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{ensure, Error, Result};
use crate::scale::SymbolField;
use crate::truncate::{FiniteRankOperator, OperatorMatrix};
use crate::weyl::symbol_of_matrix_complex;

/// `M_A M_B`, the coefficient matrix of the composed operator.
pub fn compose(a: &FiniteRankOperator, b: &FiniteRankOperator) -> Result<OperatorMatrix> {
    a.matmul(b)
}

/// `σ_A ♯ σ_B = σ_{AB}` at `(x, p)`, exact up to symbol evaluation error.
///
/// Complex in general; real when `AB` is Hermitian.
pub fn moyal_via_composition(a: &FiniteRankOperator, b: &FiniteRankOperator, x: f64, p: f64) -> Result<Complex64> {
    Ok(symbol_of_matrix_complex(&compose(a, b)?, x, p))
}

/// A direct-quadrature Moyal value with its quality diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoyalEval {
    pub value: Complex64,
    /// Largest `|σ|` on the outermost grid cells relative to the largest `|σ|` overall.
    pub edge_ratio: f64,
    /// Largest phase advance between neighbouring nodes of either inner sum.
    pub max_phase_step: f64,
    /// `edge_ratio ≤ 0.05` and `max_phase_step ≤ π`.
    pub quality_ok: bool,
}

fn edge_ratio(field: &SymbolField) -> f64 {
    let g = field.grid();
    let max = field.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return 0.0;
    }
    let mut edge = 0.0f64;
    for i in 0..g.nx {
        edge = edge.max(field.get(i, 0).abs()).max(field.get(i, g.np - 1).abs());
    }
    for j in 0..g.np {
        edge = edge.max(field.get(0, j).abs()).max(field.get(g.nx - 1, j).abs());
    }
    edge / max
}

/// `σ₁ ♯ σ₂` at every `(x, p)` with `p ∈ ps`, by direct quadrature.
pub fn moyal_direct_row(s1: &SymbolField, s2: &SymbolField, hbar: f64, x: f64, ps: &[f64]) -> Result<Vec<MoyalEval>> {
    if s1.grid() != s2.grid() {
        return Err(Error::IncompatibleGrids);
    }
    ensure(hbar.is_finite() && hbar > 0.0, || format!("hbar must be positive, got {hbar}"))?;
    let g = *s1.grid();
    for &p in ps {
        if !g.contains(x, p) {
            return Err(Error::OutsideWindow { x, p });
        }
    }
    let nx = g.nx;
    let (dx, dp) = (g.dx(), g.dp());
    let xs = g.xs();
    let pgrid = g.ps();

    // W[j][i] = e^{2i p_j (x − x_i)/ħ}; the second factor uses its conjugate.
    let w: Vec<Complex64> = pgrid
        .iter()
        .flat_map(|&pj| xs.iter().map(move |&xi| Complex64::from_polar(1.0, 2.0 * pj * (x - xi) / hbar)))
        .collect();
    let times_w = |field: &SymbolField, conj: bool| -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); nx * nx];
        out.par_chunks_mut(nx).enumerate().for_each(|(i, row)| {
            for (j, &s) in field.row(i).iter().enumerate() {
                if s == 0.0 {
                    continue;
                }
                let wrow = &w[j * nx..(j + 1) * nx];
                for (o, wv) in row.iter_mut().zip(wrow) {
                    *o += if conj { wv.conj() } else { *wv } * (s * dp);
                }
            }
        });
        out
    };
    // A[i'][i''] = Σ_j σ₁(x_i', p_j) W[j][i''],  B[i''][i'] = Σ_j σ₂(x_i'', p_j) conj(W[j][i']).
    let a = times_w(s1, false);
    let b = times_w(s2, true);
    // C[d] = Σ_{i''−i'=d} A[i'][i''] B[i''][i'], d ∈ [−(nx−1), nx−1].
    let c: Vec<Complex64> = (0..2 * nx - 1)
        .into_par_iter()
        .map(|m| {
            let d = m as isize - (nx as isize - 1);
            let mut acc = Complex64::new(0.0, 0.0);
            for i1 in 0..nx {
                let i2 = i1 as isize + d;
                if i2 < 0 || i2 >= nx as isize {
                    continue;
                }
                let i2 = i2 as usize;
                acc += a[i1 * nx + i2] * b[i2 * nx + i1];
            }
            acc
        })
        .collect();

    let norm = dx * dx / (PI * hbar).powi(2);
    let er = edge_ratio(s1).max(edge_ratio(s2));
    Ok(ps
        .iter()
        .map(|&p| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, cv) in c.iter().enumerate() {
                let d = m as f64 - (nx as f64 - 1.0);
                acc += cv * Complex64::from_polar(1.0, 2.0 * p * d * dx / hbar);
            }
            let reach_x = (x - g.x_min).max(g.x_max - x);
            let reach_p = (p - g.p_min).max(g.p_max - p);
            let step = (2.0 * dp * reach_x / hbar).max(2.0 * dx * reach_p / hbar);
            MoyalEval { value: acc * norm, edge_ratio: er, max_phase_step: step, quality_ok: er <= 0.05 && step <= PI }
        })
        .collect())
}

/// `σ₁ ♯ σ₂` at one point by direct quadrature over the shared grid.
pub fn moyal_direct(s1: &SymbolField, s2: &SymbolField, hbar: f64, x: f64, p: f64) -> Result<MoyalEval> {
    Ok(moyal_direct_row(s1, s2, hbar, x, &[p])?[0])
}
