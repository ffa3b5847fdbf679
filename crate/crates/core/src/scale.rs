//! Semiclassical scaling triple, phase-space grids and sampled symbol fields.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::export::fmt_g17;
use crate::quad::pairwise_sum;

/// The coupled triple `(ħ, N, μ)` with `ħ = μ / N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiclassicalScale {
    n_levels: usize,
    mu: f64,
    hbar: f64,
}

impl SemiclassicalScale {
    pub fn new(n_levels: usize, mu: f64) -> Result<Self> {
        ensure(n_levels >= 1, || format!("N must be at least 1, got {n_levels}"))?;
        ensure(mu.is_finite() && mu > 0.0, || format!("mu must be positive, got {mu}"))?;
        Ok(Self { n_levels, mu, hbar: mu / n_levels as f64 })
    }

    pub fn n_levels(&self) -> usize {
        self.n_levels
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }
}

/// A rectangular midpoint lattice on `[x_min, x_max] × [p_min, p_max]`.
///
/// Sample points are cell centres, `x_i = x_min + (i + ½)Δx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

impl PhaseGrid {
    pub fn new(x_min: f64, x_max: f64, p_min: f64, p_max: f64, nx: usize, np: usize) -> Result<Self> {
        ensure(x_min.is_finite() && x_max.is_finite() && x_min < x_max, || {
            format!("x window [{x_min}, {x_max}] is empty")
        })?;
        ensure(p_min.is_finite() && p_max.is_finite() && p_min < p_max, || {
            format!("p window [{p_min}, {p_max}] is empty")
        })?;
        ensure(nx >= 2 && np >= 2, || format!("grid needs at least 2×2 cells, got {nx}×{np}"))?;
        Ok(Self { x_min, x_max, p_min, p_max, nx, np })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / self.np as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dp()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + (j as f64 + 0.5) * self.dp()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn ps(&self) -> Vec<f64> {
        (0..self.np).map(|j| self.p(j)).collect()
    }

    pub fn len(&self) -> usize {
        self.nx * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether `(x, p)` lies in the closed window.
    pub fn contains(&self, x: f64, p: f64) -> bool {
        (self.x_min..=self.x_max).contains(&x) && (self.p_min..=self.p_max).contains(&p)
    }

    /// Whether the rectangle `[x0, x1] × [p0, p1]` lies inside the window.
    pub fn covers(&self, x0: f64, x1: f64, p0: f64, p1: f64) -> bool {
        self.x_min <= x0 && x1 <= self.x_max && self.p_min <= p0 && p1 <= self.p_max
    }
}

/// A real field sampled on a [`PhaseGrid`], row-major in `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolField {
    grid: PhaseGrid,
    values: Vec<f64>,
}

impl SymbolField {
    /// Samples `f` at every cell centre. Rows are filled in parallel; each
    /// value depends only on its own cell, so the result is thread-count independent.
    pub fn from_fn<F>(grid: PhaseGrid, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let ps = grid.ps();
        let mut values = vec![0.0; grid.len()];
        values
            .par_chunks_mut(grid.np)
            .enumerate()
            .for_each(|(i, row)| {
                let x = grid.x(i);
                for (v, &p) in row.iter_mut().zip(&ps) {
                    *v = f(x, p);
                }
            });
        Self::from_values(grid, values)
    }

    /// Fallible variant of [`SymbolField::from_fn`]; the first error (in row order) wins.
    pub fn try_from_fn<F>(grid: PhaseGrid, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Result<f64> + Sync,
    {
        let ps = grid.ps();
        let rows: Vec<Result<Vec<f64>>> = (0..grid.nx)
            .into_par_iter()
            .map(|i| {
                let x = grid.x(i);
                ps.iter().map(|&p| f(x, p)).collect()
            })
            .collect();
        let mut values = Vec::with_capacity(grid.len());
        for row in rows {
            values.extend(row?);
        }
        Self::from_values(grid, values)
    }

    pub fn from_values(grid: PhaseGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {}×{} grid",
                values.len(),
                grid.nx,
                grid.np
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite field value at cell ({}, {})",
                pos / grid.np,
                pos % grid.np
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.np + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.grid.np..(i + 1) * self.grid.np]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_values(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Writes `x,p,value` rows, `x` outer and `p` inner, in `%.17g` format.
    pub fn write_csv<W: Write + ?Sized>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "x,p,value")?;
        let ps: Vec<String> = self.grid.ps().into_iter().map(fmt_g17).collect();
        for i in 0..self.grid.nx {
            let x = fmt_g17(self.grid.x(i));
            for (j, p) in ps.iter().enumerate() {
                writeln!(w, "{x},{p},{}", fmt_g17(self.get(i, j)))?;
            }
        }
        Ok(())
    }
}

/// Midpoint-rule value of `∬ σ² dx dp` over the grid window.
pub fn l2_norm_sq_grid(field: &SymbolField) -> f64 {
    let squares: Vec<f64> = field.values.iter().map(|v| v * v).collect();
    pairwise_sum(&squares) * field.grid.cell_area()
}

/// Midpoint-rule value of `∬ (a − b)² dx dp` over the shared window.
pub fn l2_distance_sq_grid(a: &SymbolField, b: &SymbolField) -> Result<f64> {
    if a.grid != b.grid {
        return Err(Error::IncompatibleGrids);
    }
    let squares: Vec<f64> = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(u, v)| (u - v) * (u - v))
        .collect();
    Ok(pairwise_sum(&squares) * a.grid.cell_area())
}
