//! Weyl symbols: `σ(x, p) = ħ ∫ K(x − ħy/2, x + ħy/2) e^{ipy} dy`.
//!
//! The generic route integrates any [`Kernel`] by composite Gauss–Legendre
//! quadrature. The box model also has closed forms, built from the symbols
//! of the rank-one operators `|u_j⟩⟨u_k|`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::basis::{EigenBasis, Model};
use crate::error::{ensure, Error, Result};
use crate::kernel::{projection_kernel, Kernel, KernelEval, TruncatedKernel};
use crate::quad::composite;
use crate::truncate::{box_momentum_entry, OperatorMatrix};

/// Truncation and resolution of the `y`-integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylQuadratureSpec {
    y_halfwidth: f64,
    n_nodes: usize,
}

impl WeylQuadratureSpec {
    pub fn new(y_halfwidth: f64, n_nodes: usize) -> Result<Self> {
        ensure(y_halfwidth.is_finite() && y_halfwidth > 0.0, || {
            format!("y half-width must be positive, got {y_halfwidth}")
        })?;
        ensure(n_nodes >= 64, || format!("at least 64 nodes required, got {n_nodes}"))?;
        Ok(Self { y_halfwidth, n_nodes })
    }

    /// Covers the oscillator's allowed region plus Gaussian tails for `N` levels,
    /// with at least four nodes per period of `e^{ipy}`.
    pub fn oscillator_default(hbar: f64, n_levels: usize, p: f64) -> Self {
        let mu = hbar * n_levels as f64;
        let y = 2.0 * ((2.0 * hbar * n_levels as f64).sqrt() + 8.0 * hbar.sqrt()) / hbar;
        let nodes = (4.0 * y * (p.abs() + (2.0 * mu).sqrt()) / PI).ceil() as usize;
        Self { y_halfwidth: y, n_nodes: nodes.max(256) }
    }

    /// Covers the whole box support `|y| ≤ 2L/ħ` with six nodes per period
    /// of the fastest oscillation.
    pub fn box_default(hbar: f64, half_width: f64, n_levels: usize, p: f64) -> Self {
        let y = 2.0 * half_width / hbar;
        let freq = p.abs() + PI * hbar * (n_levels as f64 + 1.0) / (2.0 * half_width);
        let nodes = (6.0 * y * freq / PI).ceil() as usize;
        Self { y_halfwidth: y, n_nodes: nodes.max(256) }
    }

    /// Default for a basis: box or oscillator rule.
    pub fn for_basis(basis: &EigenBasis, n_levels: usize, p: f64) -> Self {
        match basis.model {
            Model::Oscillator => Self::oscillator_default(basis.hbar, n_levels, p),
            Model::Box { half_width } => Self::box_default(basis.hbar, half_width, n_levels, p),
        }
    }

    pub fn y_halfwidth(&self) -> f64 {
        self.y_halfwidth
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }
}

/// A quadrature symbol value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolEval<T> {
    pub value: T,
    /// The kernel's known `y`-support reaches beyond `±Y`.
    pub window_truncated: bool,
}

/// The complex symbol of an arbitrary kernel by quadrature.
pub fn symbol_from_kernel_complex<K: Kernel + ?Sized>(
    kernel: &K,
    hbar: f64,
    spec: WeylQuadratureSpec,
    x: f64,
    p: f64,
) -> SymbolEval<Complex64> {
    let big_y = spec.y_halfwidth;
    let (mut a, mut b) = (-big_y, big_y);
    let mut window_truncated = false;
    if let Some((lo, hi)) = kernel.y_support(x, hbar) {
        if lo >= hi {
            return SymbolEval { value: Complex64::new(0.0, 0.0), window_truncated: false };
        }
        window_truncated = lo < -big_y || hi > big_y;
        a = a.max(lo);
        b = b.min(hi);
    }
    let integral: Complex64 = composite(a, b, spec.n_nodes, |y| {
        kernel.eval(x - 0.5 * hbar * y, x + 0.5 * hbar * y) * Complex64::from_polar(1.0, p * y)
    });
    SymbolEval { value: integral * hbar, window_truncated }
}

/// The real symbol of a Hermitian kernel by quadrature.
///
/// Fails if the imaginary residue exceeds `1e-9 (1 + |Re|)`.
pub fn symbol_from_kernel<K: Kernel + ?Sized>(
    kernel: &K,
    hbar: f64,
    spec: WeylQuadratureSpec,
    x: f64,
    p: f64,
) -> Result<SymbolEval<f64>> {
    let s = symbol_from_kernel_complex(kernel, hbar, spec, x, p);
    let (re, im) = (s.value.re, s.value.im);
    if im.abs() > 1e-9 * (1.0 + re.abs()) {
        return Err(Error::NonHermitianKernel { real: re, imag: im });
    }
    Ok(SymbolEval { value: re, window_truncated: s.window_truncated })
}

/// `sin(a t) / t`, continuous at `t = 0` where it equals `a`.
pub fn sin_ratio(a: f64, t: f64) -> f64 {
    let z = a * t;
    if z.abs() < 1e-4 {
        let z2 = z * z;
        return a * (1.0 - z2 / 6.0 + z2 * z2 / 120.0 - z2 * z2 * z2 / 5040.0);
    }
    z.sin() / t
}

/// Symbol of `|u_j⟩⟨u_k|` in the box. Complex unless `j = k`.
pub fn symbol_rank_one_box_complex(j: usize, k: usize, hbar: f64, half_width: f64, x: f64, p: f64) -> Complex64 {
    let l = half_width;
    if x.abs() >= l {
        return Complex64::new(0.0, 0.0);
    }
    let a = 2.0 * (l - x.abs()) / hbar;
    let (jf, kf) = (j as f64, k as f64);
    let phase = PI / (2.0 * l) * (x + l);
    let shift = PI * hbar / (4.0 * l);
    let mut acc = Complex64::new(0.0, 0.0);
    for e1 in [1.0, -1.0] {
        let theta = phase * (jf - e1 * kf);
        let base = shift * (jf + e1 * kf);
        for e2 in [1.0, -1.0] {
            acc += Complex64::from_polar(e1, -e2 * theta) * sin_ratio(a, base + e2 * p);
        }
    }
    acc * (hbar / (2.0 * l))
}

/// Real part of [`symbol_rank_one_box_complex`].
pub fn symbol_rank_one_box(j: usize, k: usize, hbar: f64, half_width: f64, x: f64, p: f64) -> f64 {
    symbol_rank_one_box_complex(j, k, hbar, half_width, x, p).re
}

/// Symbol of `Π_N` in the box, `O(N)` per point.
pub fn symbol_projection_box(n: usize, hbar: f64, half_width: f64, x: f64, p: f64) -> f64 {
    let l = half_width;
    if x.abs() >= l {
        return 0.0;
    }
    let a = 2.0 * (l - x.abs()) / hbar;
    let s0 = sin_ratio(a, p);
    let mut acc = 0.0;
    for k in 1..=n {
        let kf = k as f64;
        let c = hbar * PI * kf / (2.0 * l);
        acc += sin_ratio(a, c + p) + sin_ratio(a, c - p) - 2.0 * (PI * kf * (l + x) / l).cos() * s0;
    }
    acc * hbar / (2.0 * l)
}

/// Symbol of `Π_N p̂ Π_N` in the box, `O(N²)` per point.
pub fn symbol_truncated_momentum_box(n: usize, hbar: f64, half_width: f64, x: f64, p: f64) -> f64 {
    let l = half_width;
    if x.abs() >= l {
        return 0.0;
    }
    let a = 2.0 * (l - x.abs()) / hbar;
    let phase = PI / (2.0 * l) * (x + l);
    let shift = PI * hbar / (4.0 * l);
    let mut acc = 0.0;
    for j in 2..=n {
        let jf = j as f64;
        // Only k of opposite parity to j couple.
        for k in ((1 + j % 2)..j).step_by(2) {
            let kf = k as f64;
            // 2 Re(C_jk σ_jk) with C_jk = iγ is 2γ · Σ ε1ε2 sin(θ_ε1) sinc-term.
            let gamma2 = 2.0 * box_momentum_entry(j, k, l, hbar).im;
            let mut inner = 0.0;
            for e1 in [1.0, -1.0] {
                let s = (phase * (jf - e1 * kf)).sin();
                let base = shift * (jf + e1 * kf);
                inner += e1 * s * (sin_ratio(a, base + p) - sin_ratio(a, base - p));
            }
            acc += gamma2 * inner;
        }
    }
    acc * hbar / (2.0 * l)
}

/// `2πħ K(x − ħy/2, x + ħy/2)`, the partial Fourier transform of the symbol in `p`.
pub fn rescaled_kernel_f2(eval: &KernelEval, hbar: f64, x: f64, y: f64) -> f64 {
    2.0 * PI * hbar * projection_kernel(eval, x - 0.5 * hbar * y, x + 0.5 * hbar * y)
}

/// Complex symbol of `Σ M_jk |u_j⟩⟨u_k|`: closed form for the box, quadrature for the oscillator.
pub fn symbol_of_matrix_complex(matrix: &OperatorMatrix, x: f64, p: f64) -> Complex64 {
    let basis = *matrix.basis();
    let n = matrix.dim();
    match basis.model {
        Model::Box { half_width } => {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=n {
                for (k, m) in matrix.row(j).iter().enumerate() {
                    if m.norm_sqr() != 0.0 {
                        acc += m * symbol_rank_one_box_complex(j, k + 1, basis.hbar, half_width, x, p);
                    }
                }
            }
            acc
        }
        Model::Oscillator => {
            let spec = WeylQuadratureSpec::oscillator_default(basis.hbar, n, p);
            symbol_from_kernel_complex(&TruncatedKernel { matrix }, basis.hbar, spec, x, p).value
        }
    }
}

/// Real symbol of a Hermitian coefficient matrix.
pub fn symbol_of_matrix(matrix: &OperatorMatrix, x: f64, p: f64) -> Result<f64> {
    let v = symbol_of_matrix_complex(matrix, x, p);
    if v.im.abs() > 1e-9 * (1.0 + v.re.abs()) {
        return Err(Error::NonHermitianKernel { real: v.re, imag: v.im });
    }
    Ok(v.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{truncated_operator_kernel, KernelMode, RankOneKernel};
    use crate::quad::composite;
    use crate::truncate::box_momentum_matrix;

    fn box_spec(hbar: f64, l: f64, n: usize, p: f64) -> WeylQuadratureSpec {
        WeylQuadratureSpec::box_default(hbar, l, n, p)
    }

    #[test]
    fn spec_validation() {
        assert!(WeylQuadratureSpec::new(1.0, 63).is_err());
        assert!(WeylQuadratureSpec::new(0.0, 64).is_err());
        assert!(WeylQuadratureSpec::new(1.0, 64).is_ok());
    }

    #[test]
    fn ground_state_symbol_is_gaussian() {
        let hbar = 0.5;
        let basis = EigenBasis::oscillator(hbar).unwrap();
        let k = KernelEval::new(basis, 1, KernelMode::Sum).unwrap();
        let (x, p) = (0.3, -0.2);
        let s = symbol_from_kernel(&k, hbar, WeylQuadratureSpec::oscillator_default(hbar, 1, p), x, p).unwrap();
        let want = 2.0 * (-(x * x + p * p) / hbar).exp();
        assert!((s.value - want).abs() < 1e-8, "{} vs {want}", s.value);
        assert!(!s.window_truncated);
    }

    #[test]
    fn rank_one_closed_form_matches_quadrature() {
        let (hbar, l) = (0.2, 1.0);
        let basis = EigenBasis::particle_in_box(hbar, l).unwrap();
        for &(j, k, x, p) in &[(2, 5, 0.4, 0.7), (1, 1, -0.3, 0.2), (3, 2, -0.75, -1.4), (4, 4, 0.0, 0.0)] {
            let kern = RankOneKernel { basis, j, k };
            let q = symbol_from_kernel_complex(&kern, hbar, box_spec(hbar, l, 6, p), x, p).value;
            let c = symbol_rank_one_box_complex(j, k, hbar, l, x, p);
            assert!((q - c).norm() < 1e-10, "({j},{k},{x},{p}): {q} vs {c}");
        }
        let v = symbol_rank_one_box_complex(2, 5, hbar, l, 0.4, 0.7);
        assert!((v - Complex64::new(0.572_037_485_960_90, 0.045_337_605_888_96)).norm() < 1e-12);
        assert_eq!(symbol_rank_one_box(1, 1, hbar, l, 1.2, 0.3), 0.0);
    }

    #[test]
    fn rank_one_marginal_in_p() {
        // ∫ σ_{11}(x, p) dp = 2πħ u_1(x)².
        let (hbar, l, x) = (0.1, 1.0, 0.2);
        let big_p = 50.0 * hbar / l + 10.0;
        let got: f64 = composite(-big_p, big_p, 20_000, |p| symbol_rank_one_box(1, 1, hbar, l, x, p));
        let u = crate::basis::eval_box_wavefunction(1, l, x);
        let want = 2.0 * PI * hbar * u * u;
        assert!((got - want).abs() < 2e-3 * want, "{got} vs {want}");
    }

    #[test]
    fn projection_symbol_is_diagonal_sum() {
        let (hbar, l) = (0.125, 1.3);
        for i in 0..30 {
            let x = -1.2 + 2.4 * ((i * 7) % 30) as f64 / 29.0;
            let p = -4.0 + 8.0 * ((i * 11) % 30) as f64 / 29.0;
            let diag: f64 = (1..=8).map(|k| symbol_rank_one_box(k, k, hbar, l, x, p)).sum();
            assert!((symbol_projection_box(8, hbar, l, x, p) - diag).abs() < 1e-10);
        }
        assert_eq!(symbol_projection_box(8, hbar, l, l, 0.7), 0.0);
    }

    #[test]
    fn projection_symbol_matches_quadrature_and_is_even() {
        let (n, l) = (6, 1.0);
        let hbar = 1.0 / n as f64;
        let basis = EigenBasis::particle_in_box(hbar, l).unwrap();
        let k = KernelEval::preferred(basis, n);
        let (x, p) = (0.25, 1.1);
        let q = symbol_from_kernel(&k, hbar, box_spec(hbar, l, n, p), x, p).unwrap().value;
        assert!((q - symbol_projection_box(n, hbar, l, x, p)).abs() < 1e-8);
        for &(x, p) in &[(0.3, 0.1), (0.77, -2.0), (0.01, 3.3)] {
            let d = symbol_projection_box(n, hbar, l, x, p) - symbol_projection_box(n, hbar, l, -x, p);
            assert!(d.abs() < 1e-12);
        }
    }

    #[test]
    fn momentum_symbol_matches_quadrature_and_is_odd() {
        let (n, l) = (6, 1.0);
        let hbar = 1.0 / n as f64;
        let c = box_momentum_matrix(n, l, hbar).unwrap();
        let kern = TruncatedKernel { matrix: &c };
        let (x, p) = (0.3, 1.0);
        let q = symbol_from_kernel(&kern, hbar, box_spec(hbar, l, n, p), x, p).unwrap().value;
        let cf = symbol_truncated_momentum_box(n, hbar, l, x, p);
        assert!((q - cf).abs() < 1e-7, "{q} vs {cf}");
        assert!((cf - 1.037_123_178_657_282_5).abs() < 1e-9);
        for i in 0..20 {
            let x = -0.95 + 0.1 * i as f64;
            let p = 0.2 + 0.3 * i as f64;
            let s = symbol_truncated_momentum_box(n, hbar, l, x, p);
            assert!((s + symbol_truncated_momentum_box(n, hbar, l, x, -p)).abs() < 1e-12);
        }
        assert_eq!(symbol_truncated_momentum_box(n, hbar, l, -1.5, 0.2), 0.0);
    }

    #[test]
    fn matrix_symbol_routes_agree() {
        let (n, l, hbar) = (5, 1.0, 0.2);
        let c = box_momentum_matrix(n, l, hbar).unwrap();
        let v = symbol_of_matrix(&c, -0.2, 0.9).unwrap();
        assert!((v - symbol_truncated_momentum_box(n, hbar, l, -0.2, 0.9)).abs() < 1e-12);
        let id = OperatorMatrix::identity(*c.basis(), n);
        let v = symbol_of_matrix(&id, 0.4, -0.3).unwrap();
        assert!((v - symbol_projection_box(n, hbar, l, 0.4, -0.3)).abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_kernel_is_rejected() {
        let basis = EigenBasis::particle_in_box(0.2, 1.0).unwrap();
        let kern = RankOneKernel { basis, j: 2, k: 5 };
        let err = symbol_from_kernel(&kern, 0.2, box_spec(0.2, 1.0, 5, 0.7), 0.4, 0.7).unwrap_err();
        assert!(matches!(err, Error::NonHermitianKernel { .. }));
    }

    #[test]
    fn truncation_flag() {
        let basis = EigenBasis::particle_in_box(0.1, 1.0).unwrap();
        let k = KernelEval::preferred(basis, 3);
        let narrow = WeylQuadratureSpec::new(1.0, 64).unwrap();
        assert!(symbol_from_kernel(&k, 0.1, narrow, 0.0, 0.0).unwrap().window_truncated);
        let r = symbol_from_kernel(&k, 0.1, narrow, 1.3, 0.0).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(!r.window_truncated);
    }

    #[test]
    fn f2_identity() {
        let (n, l) = (10, 1.0);
        let hbar = 0.1;
        let basis = EigenBasis::particle_in_box(hbar, l).unwrap();
        let cf = KernelEval::preferred(basis, n);
        let sum = KernelEval::new(basis, n, KernelMode::Sum).unwrap();
        let want = 2.0 * PI * hbar * projection_kernel(&sum, 0.0, 0.0);
        assert!((rescaled_kernel_f2(&cf, hbar, 0.0, 0.0) - want).abs() < 1e-12);
        assert_eq!(rescaled_kernel_f2(&cf, hbar, 1.5, 0.0), 0.0);
        let m = OperatorMatrix::identity(basis, n);
        let y = 0.7;
        let direct = 2.0 * PI * hbar * truncated_operator_kernel(&m, 0.2 - 0.5 * hbar * y, 0.2 + 0.5 * hbar * y).re;
        assert!((rescaled_kernel_f2(&cf, hbar, 0.2, y) - direct).abs() < 1e-12);
    }
}
