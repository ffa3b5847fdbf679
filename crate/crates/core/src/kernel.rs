//! Position-space integral kernels and the Dirichlet and sine special kernels.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{EigenBasis, Model};
use crate::error::{Error, Result};
use crate::truncate::OperatorMatrix;

/// `D_N(x) = sin((2N+1)x/2) / sin(x/2)`, equal to `1 + 2 Σ_{k≤N} cos(kx)`.
pub fn dirichlet_kernel(n: usize, x: f64) -> f64 {
    let x = x.abs();
    let s = (0.5 * x).sin();
    if s.abs() < 1e-8 {
        return 1.0 + 2.0 * (1..=n).map(|k| (k as f64 * x).cos()).sum::<f64>();
    }
    ((n as f64 + 0.5) * x).sin() / s
}

/// `S(x) = sin(x/2) / (x/2)`, with `S(0) = 1`.
pub fn sine_kernel(x: f64) -> f64 {
    let t = 0.5 * x;
    if x.abs() < 1e-4 {
        let t2 = t * t;
        return 1.0 - t2 / 6.0 + t2 * t2 / 120.0 - t2 * t2 * t2 / 5040.0;
    }
    t.sin() / t
}

/// An integral kernel `K(x, y)` that the Weyl transform can consume.
pub trait Kernel: Sync {
    fn eval(&self, x: f64, y: f64) -> Complex64;

    /// Interval of `y` outside which `K(x − ħy/2, x + ħy/2)` vanishes
    /// identically, when such an interval is known. `None` means unbounded.
    fn y_support(&self, _x: f64, _hbar: f64) -> Option<(f64, f64)> {
        None
    }
}

impl<F> Kernel for F
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    fn eval(&self, x: f64, y: f64) -> Complex64 {
        self(x, y)
    }
}

fn box_y_support(half_width: f64, x: f64, hbar: f64) -> (f64, f64) {
    let y = (2.0 * (half_width - x.abs()) / hbar).max(0.0);
    (-y, y)
}

/// How the projection kernel is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelMode {
    /// `Σ_{k≤N} u_k(x) u_k(y)`.
    Sum,
    /// The two-term Dirichlet formula; box only.
    ClosedForm,
}

/// The kernel of `Π_N`, the projection onto `span{u_1, …, u_N}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEval {
    basis: EigenBasis,
    n_levels: usize,
    mode: KernelMode,
}

impl KernelEval {
    pub fn new(basis: EigenBasis, n_levels: usize, mode: KernelMode) -> Result<Self> {
        if mode == KernelMode::ClosedForm && basis.model == Model::Oscillator {
            return Err(Error::ClosedFormUnavailable("oscillator"));
        }
        Ok(Self { basis, n_levels, mode })
    }

    /// Closed form for the box, eigenfunction sum otherwise.
    pub fn preferred(basis: EigenBasis, n_levels: usize) -> Self {
        let mode = match basis.model {
            Model::Box { .. } => KernelMode::ClosedForm,
            Model::Oscillator => KernelMode::Sum,
        };
        Self { basis, n_levels, mode }
    }

    pub fn basis(&self) -> &EigenBasis {
        &self.basis
    }

    pub fn n_levels(&self) -> usize {
        self.n_levels
    }

    pub fn mode(&self) -> KernelMode {
        self.mode
    }
}

/// `K_{Π_N}(x, y)`.
pub fn projection_kernel(eval: &KernelEval, x: f64, y: f64) -> f64 {
    match (eval.mode, eval.basis.model) {
        (KernelMode::ClosedForm, Model::Box { half_width: l }) => {
            if x.abs() > l || y.abs() > l {
                return 0.0;
            }
            let n = eval.n_levels;
            let c = PI / (2.0 * l);
            (dirichlet_kernel(n, c * (x - y)) - dirichlet_kernel(n, c * (x + y + 2.0 * l))) / (4.0 * l)
        }
        (KernelMode::ClosedForm, Model::Oscillator) => unreachable!("rejected at construction"),
        (KernelMode::Sum, _) => {
            let ux = eval.basis.eval_all(eval.n_levels, x);
            let uy = eval.basis.eval_all(eval.n_levels, y);
            ux.iter().zip(&uy).map(|(a, b)| a * b).sum()
        }
    }
}

impl Kernel for KernelEval {
    fn eval(&self, x: f64, y: f64) -> Complex64 {
        Complex64::new(projection_kernel(self, x, y), 0.0)
    }

    fn y_support(&self, x: f64, hbar: f64) -> Option<(f64, f64)> {
        self.basis.half_width().map(|l| box_y_support(l, x, hbar))
    }
}

/// `Σ_{j,k} M_jk u_j(x) u_k(y)`, the kernel of `Σ M_jk |u_j⟩⟨u_k|`.
pub fn truncated_operator_kernel(matrix: &OperatorMatrix, x: f64, y: f64) -> Complex64 {
    let n = matrix.dim();
    let ux = matrix.basis().eval_all(n, x);
    let uy = matrix.basis().eval_all(n, y);
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, &a) in ux.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let row = matrix.row(j + 1);
        let mut inner = Complex64::new(0.0, 0.0);
        for (m, &b) in row.iter().zip(&uy) {
            inner += m * b;
        }
        acc += inner * a;
    }
    acc
}

/// Kernel of a finite-rank operator given by its coefficient matrix.
#[derive(Debug, Clone, Copy)]
pub struct TruncatedKernel<'a> {
    pub matrix: &'a OperatorMatrix,
}

impl Kernel for TruncatedKernel<'_> {
    fn eval(&self, x: f64, y: f64) -> Complex64 {
        truncated_operator_kernel(self.matrix, x, y)
    }

    fn y_support(&self, x: f64, hbar: f64) -> Option<(f64, f64)> {
        self.matrix.basis().half_width().map(|l| box_y_support(l, x, hbar))
    }
}

/// Kernel `u_j(x) u_k(y)` of the rank-one operator `|u_j⟩⟨u_k|`.
#[derive(Debug, Clone, Copy)]
pub struct RankOneKernel {
    pub basis: EigenBasis,
    pub j: usize,
    pub k: usize,
}

impl Kernel for RankOneKernel {
    fn eval(&self, x: f64, y: f64) -> Complex64 {
        Complex64::new(self.basis.eval(self.j, x) * self.basis.eval(self.k, y), 0.0)
    }

    fn y_support(&self, x: f64, hbar: f64) -> Option<(f64, f64)> {
        self.basis.half_width().map(|l| box_y_support(l, x, hbar))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::gauss_legendre;
    use crate::truncate::box_multiplication_matrix;

    #[test]
    fn dirichlet_values() {
        assert!((dirichlet_kernel(5, 0.0) - 11.0).abs() < 1e-14);
        assert!((dirichlet_kernel(3, 2.0 * PI) - 7.0).abs() < 1e-12);
        let want = 1.0 + 2.0 * (1..=4).map(|k| (0.73 * k as f64).cos()).sum::<f64>();
        assert!((dirichlet_kernel(4, 0.73) - want).abs() < 1e-13);
    }

    #[test]
    fn dirichlet_even_and_bounded() {
        for n in [0usize, 1, 7, 30] {
            for i in 0..1000 {
                let x = -10.0 + 20.0 * i as f64 / 999.0;
                let d = dirichlet_kernel(n, x);
                assert_eq!(d, dirichlet_kernel(n, -x));
                assert!(d.abs() <= (2 * n + 1) as f64 + 1e-9);
            }
        }
    }

    #[test]
    fn sine_kernel_values() {
        assert_eq!(sine_kernel(0.0), 1.0);
        assert!((sine_kernel(PI) - 2.0 / PI).abs() < 1e-15);
        let rule = gauss_legendre(50);
        let want: f64 = rule.integrate(-0.5, 0.5, |k| (k * 0.37).cos());
        assert!((sine_kernel(0.37) - want).abs() < 1e-12);
        // Series and direct branches agree across the switch.
        let x = 1e-4;
        assert!((sine_kernel(x * (1.0 - 1e-12)) - (0.5 * x).sin() / (0.5 * x)).abs() < 1e-15);
    }

    #[test]
    fn sine_kernel_envelope() {
        for i in 0..2000 {
            let x = -50.0 + 100.0 * i as f64 / 1999.0;
            let s = sine_kernel(x);
            assert!(s.abs() <= 1.0);
            if x.abs() >= 2.0 {
                assert!(s.abs() <= 2.0 / x.abs() + 1e-15);
            }
        }
    }

    #[test]
    fn oscillator_closed_form_is_rejected() {
        let b = EigenBasis::oscillator(0.1).unwrap();
        let err = KernelEval::new(b, 3, KernelMode::ClosedForm).unwrap_err();
        assert!(err.to_string().contains("closed form unavailable"));
    }

    #[test]
    fn box_closed_form_matches_sum() {
        let b = EigenBasis::particle_in_box(0.1, 1.0).unwrap();
        for n in 1..=12 {
            let cf = KernelEval::new(b, n, KernelMode::ClosedForm).unwrap();
            let sum = KernelEval::new(b, n, KernelMode::Sum).unwrap();
            for (x, y) in [(0.2, -0.4), (0.9, 0.91), (-0.99, 0.3), (0.0, 0.0)] {
                let d = projection_kernel(&cf, x, y) - projection_kernel(&sum, x, y);
                assert!(d.abs() < 1e-12, "N={n} ({x},{y}) {d:e}");
            }
            assert_eq!(projection_kernel(&cf, 1.2, 0.0), 0.0);
            assert_eq!(projection_kernel(&cf, 0.0, -1.01), 0.0);
        }
    }

    #[test]
    fn box_trace_is_n() {
        let b = EigenBasis::particle_in_box(0.1, 1.0).unwrap();
        let cf = KernelEval::preferred(b, 9);
        let cells = 4000;
        let h = 2.0 / cells as f64;
        let tr: f64 = (0..cells)
            .map(|i| {
                let x = -1.0 + (i as f64 + 0.5) * h;
                projection_kernel(&cf, x, x) * h
            })
            .sum();
        assert!((tr - 9.0).abs() < 1e-6, "{tr}");
    }

    #[test]
    fn reproducing_property() {
        let b = EigenBasis::particle_in_box(0.1, 1.0).unwrap();
        let rule = gauss_legendre(200);
        for n in [1, 4, 10] {
            let k = KernelEval::preferred(b, n);
            for (x, y) in [(0.1, 0.5), (-0.7, 0.2)] {
                let lhs: f64 = rule.integrate(-1.0, 1.0, |z| projection_kernel(&k, x, z) * projection_kernel(&k, z, y));
                assert!((lhs - projection_kernel(&k, x, y)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn identity_matrix_kernel_is_projection() {
        let b = EigenBasis::particle_in_box(0.2, 1.0).unwrap();
        let id = OperatorMatrix::identity(b, 5);
        let k = KernelEval::preferred(b, 5);
        let got = truncated_operator_kernel(&id, 0.3, -0.6);
        assert!((got.re - projection_kernel(&k, 0.3, -0.6)).abs() < 1e-13);
        assert_eq!(got.im, 0.0);
    }

    #[test]
    fn tridiagonal_kernel() {
        let l = 1.0;
        let b = EigenBasis::particle_in_box(0.2, l).unwrap();
        let m = box_multiplication_matrix(5, l, 0.2).unwrap();
        let (x, y) = (0.1, 0.3);
        let want: f64 = -(1.0 / (2.0 * l.sqrt()))
            * (1..=4)
                .map(|k| b.eval(k, x) * b.eval(k + 1, y) + b.eval(k + 1, x) * b.eval(k, y))
                .sum::<f64>();
        let got = truncated_operator_kernel(&m, x, y);
        assert!((got.re - want).abs() < 1e-13 && got.im == 0.0);
    }
}
