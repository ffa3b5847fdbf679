//! Eigenfunctions and eigenvalues of the two exactly solvable models.
//!
//! Labels start at 1: `u_1` is the ground state in both models.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::quad::composite_nodes;

/// Which reference operator the eigenbasis diagonalises.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Model {
    /// `A = (p̂² + x̂²)/2` on the real line.
    Oscillator,
    /// `A = p̂²/2` on `[-L, L]` with Dirichlet walls.
    Box { half_width: f64 },
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Oscillator => "oscillator",
            Model::Box { .. } => "box",
        }
    }
}

/// An eigenbasis at a fixed `ħ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenBasis {
    pub model: Model,
    pub hbar: f64,
}

impl EigenBasis {
    pub fn oscillator(hbar: f64) -> Result<Self> {
        ensure(hbar.is_finite() && hbar > 0.0, || format!("hbar must be positive, got {hbar}"))?;
        Ok(Self { model: Model::Oscillator, hbar })
    }

    pub fn particle_in_box(hbar: f64, half_width: f64) -> Result<Self> {
        ensure(hbar.is_finite() && hbar > 0.0, || format!("hbar must be positive, got {hbar}"))?;
        ensure(half_width.is_finite() && half_width > 0.0, || {
            format!("box half-width must be positive, got {half_width}")
        })?;
        Ok(Self { model: Model::Box { half_width }, hbar })
    }

    /// Box half-width `L`, if this is the box model.
    pub fn half_width(&self) -> Option<f64> {
        match self.model {
            Model::Box { half_width } => Some(half_width),
            Model::Oscillator => None,
        }
    }

    /// `u_k(x)`, `k ≥ 1`.
    pub fn eval(&self, k: usize, x: f64) -> f64 {
        match self.model {
            Model::Oscillator => eval_hermite_wavefunction(k, self.hbar, x),
            Model::Box { half_width } => eval_box_wavefunction(k, half_width, x),
        }
    }

    /// `[u_1(x), …, u_n(x)]`; entry `i` holds `u_{i+1}`.
    pub fn eval_all(&self, n: usize, x: f64) -> Vec<f64> {
        match self.model {
            Model::Oscillator => hermite_wavefunctions(n, self.hbar, x),
            Model::Box { half_width } => (1..=n).map(|k| eval_box_wavefunction(k, half_width, x)).collect(),
        }
    }

    /// `E_k`, `k ≥ 1`.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k >= 1, "eigenfunction labels start at 1");
        match self.model {
            Model::Oscillator => self.hbar * (k as f64 - 0.5),
            Model::Box { half_width } => {
                let q = k as f64 * PI / (2.0 * half_width);
                0.5 * self.hbar * self.hbar * q * q
            }
        }
    }

    /// Interval outside which `u_1, …, u_{k_max}` are negligible (box: exactly zero).
    pub fn quadrature_window(&self, k_max: usize) -> (f64, f64) {
        match self.model {
            Model::Oscillator => {
                let s = self.hbar.sqrt();
                let x = (2.0 * self.hbar * (k_max as f64 + 10.0)).sqrt() + 10.0 * s;
                (-x, x)
            }
            Model::Box { half_width } => (-half_width, half_width),
        }
    }

    /// Position-space quadrature nodes and weights resolving products `u_j u_k`, `j, k ≤ k_max`.
    pub fn quadrature_nodes(&self, k_max: usize) -> Vec<(f64, f64)> {
        let (a, b) = self.quadrature_window(k_max);
        composite_nodes(a, b, (6 * (k_max + 10)).max(400))
    }
}

/// Oscillator eigenfunction `u_k(x)` at Planck constant `ħ`.
///
/// Recurs on the normalised functions `φ_j = u_{j+1}` with the Gaussian
/// factored out and a running logarithmic scale, so neither `H_j` nor
/// `2^j j!` is ever formed. Returns 0 only when the true value underflows.
pub fn eval_hermite_wavefunction(k: usize, hbar: f64, x: f64) -> f64 {
    assert!(k >= 1, "eigenfunction labels start at 1");
    let mut last = 0.0;
    hermite_walk(k, hbar, x, |_, v| last = v);
    last
}

/// `[u_1(x), …, u_n(x)]` for the oscillator in one recurrence pass.
pub fn hermite_wavefunctions(n: usize, hbar: f64, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n];
    hermite_walk(n, hbar, x, |i, v| out[i] = v);
    out
}

fn hermite_walk(n: usize, hbar: f64, x: f64, mut emit: impl FnMut(usize, f64)) {
    const RESCALE_ABOVE: f64 = 1e150;
    if n == 0 {
        return;
    }
    let y = x / hbar.sqrt();
    let ln_pref = -0.25 * (PI * hbar).ln() - 0.5 * y * y;
    // value_j = cur · exp(log_scale + ln_pref)
    let mut prev = 0.0f64;
    let mut cur = 1.0f64;
    let mut log_scale = 0.0f64;
    let mut factor = ln_pref.exp();
    for j in 0..n {
        let value = if factor > 1e-280 && factor.is_finite() {
            cur * factor
        } else if cur == 0.0 {
            0.0
        } else {
            cur.signum() * (log_scale + ln_pref + cur.abs().ln()).exp()
        };
        emit(j, value);
        if j + 1 == n {
            break;
        }
        let jf = j as f64;
        let next = (2.0 / (jf + 1.0)).sqrt() * y * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_ABOVE {
            let s = cur.abs();
            cur /= s;
            prev /= s;
            log_scale += s.ln();
            factor = (log_scale + ln_pref).exp();
        }
    }
}

/// Box eigenfunction `χ_{[-L,L]}(x) sin(kπ(x+L)/2L)/√L`; exactly 0 for `|x| ≥ L`.
pub fn eval_box_wavefunction(k: usize, half_width: f64, x: f64) -> f64 {
    assert!(k >= 1, "eigenfunction labels start at 1");
    if x.abs() >= half_width {
        return 0.0;
    }
    (k as f64 * PI * (x + half_width) / (2.0 * half_width)).sin() / half_width.sqrt()
}

/// `u_k'(x)` for the box, zero outside `(-L, L)`.
pub fn eval_box_derivative(k: usize, half_width: f64, x: f64) -> f64 {
    assert!(k >= 1, "eigenfunction labels start at 1");
    if x.abs() >= half_width {
        return 0.0;
    }
    let q = k as f64 * PI / (2.0 * half_width);
    q * (q * (x + half_width)).cos() / half_width.sqrt()
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn chebyshev_u(n: usize, t: f64) -> f64 {
        let (mut a, mut b) = (1.0, 2.0 * t);
        if n == 0 {
            return a;
        }
        for _ in 1..n {
            let c = 2.0 * t * b - a;
            a = b;
            b = c;
        }
        b
    }

    #[test]
    fn ground_state_at_origin() {
        let v = eval_hermite_wavefunction(1, 1.0, 0.0);
        assert!((v - 0.751_125_544_464_942_5).abs() < 1e-15);
    }

    #[test]
    fn hermite_matches_extended_precision_oracle() {
        let cases = [
            (5, 0.5, 0.9, -0.482_000_802_825_387_413_4),
            (1001, 1.0, 10.0, -0.099_280_028_764_839_674_02),
            (4096, 1.0, 60.0, 0.043_739_673_487_647_274_99),
            (4096, 1.0, 95.0, 2.895_462_755_989_861_049_17e-39),
        ];
        for (k, hbar, x, want) in cases {
            let got = eval_hermite_wavefunction(k, hbar, x);
            let rel = ((got - want) / want).abs();
            let tol = if k < 100 { 1e-12 } else { 1e-9 };
            assert!(rel < tol, "u_{k}({x}) = {got}, want {want}, rel {rel:e}");
        }
    }

    #[test]
    fn hermite_underflow_is_zero_not_nan() {
        let v = eval_hermite_wavefunction(3, 0.01, 50.0);
        assert_eq!(v, 0.0);
        assert!(eval_hermite_wavefunction(4096, 1.0, 1e4).is_finite());
    }

    #[test]
    fn hermite_parity() {
        for k in 1..=8 {
            for x in [0.3, 1.7] {
                let s = if k % 2 == 1 { 1.0 } else { -1.0 };
                let a = eval_hermite_wavefunction(k, 0.7, x);
                let b = eval_hermite_wavefunction(k, 0.7, -x);
                assert!((b - s * a).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn batch_matches_single() {
        let all = hermite_wavefunctions(40, 0.3, 1.1);
        for (i, v) in all.iter().enumerate() {
            assert!((v - eval_hermite_wavefunction(i + 1, 0.3, 1.1)).abs() < 1e-15);
        }
    }

    #[test]
    fn box_values() {
        assert!((eval_box_wavefunction(1, 1.0, 0.0) - 1.0).abs() < 1e-15);
        for k in 1..6 {
            assert_eq!(eval_box_wavefunction(k, 1.3, 1.3), 0.0);
            assert_eq!(eval_box_wavefunction(k, 1.3, -1.3), 0.0);
            assert_eq!(eval_box_wavefunction(k, 1.3, 2.0), 0.0);
        }
    }

    #[test]
    fn box_chebyshev_identity() {
        let l = 0.8;
        for k in 1..=10 {
            for i in 0..50 {
                let x = -l + (i as f64 + 0.5) * 2.0 * l / 50.0;
                let th = PI * (x + l) / (2.0 * l);
                let want = th.sin() * chebyshev_u(k - 1, th.cos()) / l.sqrt();
                assert!((eval_box_wavefunction(k, l, x) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eigenvalues() {
        let osc = EigenBasis::oscillator(0.1).unwrap();
        assert!((osc.eigenvalue(1) - 0.05).abs() < 1e-16);
        let b = EigenBasis::particle_in_box(1.0, PI / 2.0).unwrap();
        assert!((b.eigenvalue(2) - 2.0).abs() < 1e-14);
        for k in 1..20 {
            assert!((b.eigenvalue(2 * k) / b.eigenvalue(k) - 4.0).abs() < 1e-13);
        }
    }

    #[test]
    fn orthonormality() {
        let bases = [
            EigenBasis::oscillator(0.4).unwrap(),
            EigenBasis::particle_in_box(0.4, 1.2).unwrap(),
        ];
        for basis in bases {
            let nodes = basis.quadrature_nodes(20);
            let table: Vec<Vec<f64>> = nodes.iter().map(|&(x, _)| basis.eval_all(20, x)).collect();
            for j in 0..20 {
                for k in 0..20 {
                    let ip: f64 = nodes.iter().zip(&table).map(|(&(_, w), u)| w * u[j] * u[k]).sum();
                    let want = if j == k { 1.0 } else { 0.0 };
                    assert!((ip - want).abs() < 1e-9, "{:?} <{},{}> = {ip}", basis.model, j + 1, k + 1);
                }
            }
        }
    }

    #[test]
    fn oscillator_eigen_equation_residual() {
        let hbar: f64 = 0.3;
        let h = hbar.sqrt() * 1e-3;
        for k in [1, 2, 5, 9] {
            let e = hbar * (k as f64 - 0.5);
            for i in 0..20 {
                let x = -2.0 + 4.0 * i as f64 / 19.0;
                let f = |t: f64| eval_hermite_wavefunction(k, hbar, t);
                let d2 = (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h))
                    / (12.0 * h * h);
                let r = -0.5 * hbar * hbar * d2 + 0.5 * x * x * f(x) - e * f(x);
                assert!(r.abs() <= 1e-6 * e, "k={k} x={x} residual {r:e}");
            }
        }
    }

    #[test]
    fn box_sign_changes() {
        let l = 1.0;
        for k in 1..=12 {
            let mut changes = 0;
            let mut last = 0.0f64;
            for i in 1..10_000 {
                let x = -l + 2.0 * l * i as f64 / 10_000.0;
                let v = eval_box_wavefunction(k, l, x);
                if last != 0.0 && v != 0.0 && last.signum() != v.signum() {
                    changes += 1;
                }
                if v != 0.0 {
                    last = v;
                }
            }
            assert_eq!(changes, k - 1);
        }
    }

    #[test]
    fn label_offset_is_one() {
        let basis = EigenBasis::particle_in_box(1.0, 1.0).unwrap();
        let all = basis.eval_all(3, 0.1);
        assert_eq!(all[0], basis.eval(1, 0.1));
        assert_eq!(all[2], basis.eval(3, 0.1));
    }
}
