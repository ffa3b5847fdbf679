//! Semiclassical targets: classical regions, bulk sine profiles, hard-wall edge profiles.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::kernel::sine_kernel;
use crate::quad::adaptive_gk15;

/// Classically allowed region of phase-space area `2πμ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ClassicalRegion {
    /// `x² + p² ≤ 2μ`.
    Disk { mu: f64 },
    /// `|x| ≤ L`, `|p| ≤ πμ/2L`.
    Rectangle { mu: f64, half_width: f64 },
}

impl ClassicalRegion {
    pub fn disk(mu: f64) -> Result<Self> {
        ensure(mu.is_finite() && mu > 0.0, || format!("mu must be positive, got {mu}"))?;
        Ok(Self::Disk { mu })
    }

    pub fn rectangle(mu: f64, half_width: f64) -> Result<Self> {
        ensure(mu.is_finite() && mu > 0.0, || format!("mu must be positive, got {mu}"))?;
        ensure(half_width.is_finite() && half_width > 0.0, || {
            format!("box half-width must be positive, got {half_width}")
        })?;
        Ok(Self::Rectangle { mu, half_width })
    }

    pub fn mu(&self) -> f64 {
        match *self {
            Self::Disk { mu } | Self::Rectangle { mu, .. } => mu,
        }
    }

    pub fn area(&self) -> f64 {
        match *self {
            Self::Disk { mu } => PI * 2.0 * mu,
            Self::Rectangle { mu, half_width } => 2.0 * half_width * (PI * mu / half_width),
        }
    }

    /// Energy `E(μ)` bounding the region, for the oscillator `(x² + p²)/2` and box `p²/2` symbols.
    pub fn energy(&self) -> f64 {
        match *self {
            Self::Disk { mu } => mu,
            Self::Rectangle { mu, half_width } => 0.5 * (PI * mu / (2.0 * half_width)).powi(2),
        }
    }

    /// Momentum edge `πμ/2L` of the rectangle, radius `√(2μ)` of the disk.
    pub fn p_max(&self) -> f64 {
        match *self {
            Self::Disk { mu } => (2.0 * mu).sqrt(),
            Self::Rectangle { mu, half_width } => PI * mu / (2.0 * half_width),
        }
    }

    /// Bounding box `[x_min, x_max, p_min, p_max]`.
    pub fn bounds(&self) -> [f64; 4] {
        match *self {
            Self::Disk { mu } => {
                let r = (2.0 * mu).sqrt();
                [-r, r, -r, r]
            }
            Self::Rectangle { half_width, .. } => {
                let pm = self.p_max();
                [-half_width, half_width, -pm, pm]
            }
        }
    }

    pub fn contains(&self, x: f64, p: f64) -> bool {
        match *self {
            Self::Disk { mu } => x * x + p * p <= 2.0 * mu,
            Self::Rectangle { half_width, .. } => x.abs() <= half_width && p.abs() <= self.p_max(),
        }
    }

    /// `χ_Ω(x, p)` with the boundary included.
    pub fn indicator(&self, x: f64, p: f64) -> f64 {
        if self.contains(x, p) {
            1.0
        } else {
            0.0
        }
    }
}

/// A closed-form asymptotic target evaluable pointwise.
pub trait LimitProfile: Sync {
    fn eval(&self, a: f64, b: f64) -> f64;

    /// Compact support `[a_min, a_max, b_min, b_max]`, if any.
    fn support(&self) -> Option<[f64; 4]> {
        None
    }
}

impl LimitProfile for ClassicalRegion {
    fn eval(&self, x: f64, p: f64) -> f64 {
        self.indicator(x, p)
    }

    fn support(&self) -> Option<[f64; 4]> {
        Some(self.bounds())
    }
}

/// `f · χ_Ω`.
pub struct LimitSymbol<'a> {
    pub f: &'a (dyn Fn(f64, f64) -> f64 + Sync),
    pub region: ClassicalRegion,
}

impl LimitProfile for LimitSymbol<'_> {
    fn eval(&self, x: f64, p: f64) -> f64 {
        limit_symbol(self.f, &self.region, x, p)
    }

    fn support(&self) -> Option<[f64; 4]> {
        Some(self.region.bounds())
    }
}

pub fn limit_symbol(f: &dyn Fn(f64, f64) -> f64, region: &ClassicalRegion, x: f64, p: f64) -> f64 {
    if region.contains(x, p) {
        f(x, p)
    } else {
        0.0
    }
}

/// `(πμ/L) S(πμy/L)`, the bulk limit of `2πħ K_{Π_N}(x − ħy/2, x + ħy/2)` in the box.
pub fn bulk_profile_box(mu: f64, half_width: f64, y: f64) -> f64 {
    let c = PI * mu / half_width;
    c * sine_kernel(c * y)
}

/// Constant `C` in the bulk estimate `|2πħK − bulk| ≤ Cħ` on `|x| ≤ c_u`, `|y| ≤ c_v`,
/// valid for `ħ < ħ₀ = (L − c_u)/c_v`.
pub fn bulk_constant(mu: f64, half_width: f64, c_u: f64, c_v: f64) -> Result<f64> {
    let l = half_width;
    ensure(0.0 <= c_u && c_u < l, || format!("need 0 ≤ C_U < L, got C_U = {c_u}, L = {l}"))?;
    ensure(c_v >= 0.0, || format!("C_V must be nonnegative, got {c_v}"))?;
    Ok(PI / (2.0 * l) * (l / (l - c_u) + PI * mu / (2.0 * l) * c_v + 1.0))
}

/// `ħ₀ = (L − C_U)/C_V`.
pub fn bulk_hbar0(half_width: f64, c_u: f64, c_v: f64) -> f64 {
    (half_width - c_u) / c_v
}

fn si_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
        let add = term / (2.0 * k + 1.0);
        sum += add;
        if add.abs() < 1e-16 * sum.abs().max(1e-300) {
            return sum;
        }
    }
}

/// `Si(x) = ∫₀ˣ sin t / t dt`.
pub fn si(x: f64) -> f64 {
    if x < 0.0 {
        return -si(-x);
    }
    if x <= 6.0 {
        return si_series(x);
    }
    let integrand = |t: f64| t.sin() / t;
    let mut acc = si_series(6.0);
    let mut a = 6.0;
    while a < x {
        let b = (a + PI).min(x);
        acc += adaptive_gk15(a, b, 1e-15, integrand);
        a = b;
    }
    acc
}

fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        let z2 = z * z;
        return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
    }
    z.sin() / z
}

/// Microscopic profile at the wall `x = L − ħu`:
/// `(χ(u ≥ 0)/π)[Si(2u(p + a)) − Si(2u(p − a)) − (sin(2pu)/(pu)) sin(2au)]`, `a = πμ/2L`.
pub fn edge_profile_x(u: f64, p: f64, mu: f64, half_width: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    let a = PI * mu / (2.0 * half_width);
    let ratio = 2.0 * sinc(2.0 * p * u);
    (si(2.0 * u * (p + a)) - si(2.0 * u * (p - a)) - ratio * (PI * mu * u / half_width).sin()) / PI
}

/// Largest number of terms [`edge_profile_p`] will sum directly.
pub const EDGE_P_MAX_TERMS: usize = 50_000_000;

/// Microscopic profile across the momentum edge `p = πμ/2L + ħπv/2L`:
/// `(χ_{[−L,L]}(x)/π) Σ_{j≥0} sin(α(j + v))/(j + v)` with `α = π(L − |x|)/L`.
///
/// The series is summed directly up to an index `J`, then the leading
/// summation-by-parts tail term is added; `J` is the smallest index for
/// which the remaining bound is below `tol`.
pub fn edge_profile_p(x: f64, v: f64, half_width: f64, tol: f64) -> Result<f64> {
    if !v.is_finite() || v <= -1.0 || v == 0.0 {
        return Err(Error::Domain(format!("edge profile needs v > -1 and v != 0, got {v}")));
    }
    ensure(tol > 0.0, || format!("tolerance must be positive, got {tol}"))?;
    let l = half_width;
    if x.abs() >= l {
        return Ok(0.0);
    }
    let alpha = PI * (l - x.abs()) / l;
    let s = (0.5 * alpha).sin();
    // Remainder after the correction is at most c_{J+1} / (2π sin²(α/2)),
    // c_j = 1/((j + v − 1)(j + v)).
    let need = 1.0 / (2.0 * PI * s * s * tol);
    let guess = ((need + 0.25).sqrt() - v - 0.5).ceil().max(2.0);
    if guess > EDGE_P_MAX_TERMS as f64 {
        return Err(Error::ResourceGuard(format!(
            "edge series needs more than {EDGE_P_MAX_TERMS} terms at x = {x}"
        )));
    }
    let mut jj = guess as usize;
    while (jj as f64 + v) * (jj as f64 + 1.0 + v) < need {
        jj += 1;
    }
    let mut sum = 0.0;
    for j in 0..jj {
        let t = j as f64 + v;
        sum += (alpha * t).sin() / t;
    }
    let t = jj as f64 + v;
    let q = -(alpha * (t - 0.5)).cos() / (2.0 * s);
    sum -= q / t;
    Ok(sum / PI)
}

/// [`edge_profile_x`] as a [`LimitProfile`] in `(u, p)`.
#[derive(Debug, Clone, Copy)]
pub struct EdgeProfileX {
    pub mu: f64,
    pub half_width: f64,
}

impl LimitProfile for EdgeProfileX {
    fn eval(&self, u: f64, p: f64) -> f64 {
        edge_profile_x(u, p, self.mu, self.half_width)
    }
}

/// [`bulk_profile_box`] as a [`LimitProfile`] in `(x, y)`; independent of `x`.
#[derive(Debug, Clone, Copy)]
pub struct BulkProfile {
    pub mu: f64,
    pub half_width: f64,
}

impl LimitProfile for BulkProfile {
    fn eval(&self, _x: f64, y: f64) -> f64 {
        bulk_profile_box(self.mu, self.half_width, y)
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    #[test]
    fn regions() {
        for mu in [0.3, 1.0, 2.5] {
            let d = ClassicalRegion::disk(mu).unwrap();
            let r = ClassicalRegion::rectangle(mu, 1.7).unwrap();
            assert!((d.area() - 2.0 * PI * mu).abs() < 1e-14);
            assert!((r.area() - 2.0 * PI * mu).abs() < 1e-14);
        }
        let d = ClassicalRegion::disk(1.0).unwrap();
        assert_eq!(d.indicator(0.0, 0.0), 1.0);
        assert_eq!(d.indicator(1.0, 1.0), 1.0);
        let l = (PI / 2.0).sqrt();
        let r = ClassicalRegion::rectangle(1.0, l).unwrap();
        assert_eq!(r.indicator(0.0, PI / (2.0 * l) + 0.01), 0.0);
        assert!(ClassicalRegion::disk(0.0).is_err());
    }

    #[test]
    fn limit_symbols() {
        let r = ClassicalRegion::rectangle(1.0, 1.0).unwrap();
        let one = |_: f64, _: f64| 1.0;
        let pf = |_: f64, p: f64| p;
        for &(x, p) in &[(0.2, 0.5), (0.9, 1.6), (1.1, 0.0)] {
            assert_eq!(limit_symbol(&one, &r, x, p), r.indicator(x, p));
            assert_eq!(limit_symbol(&pf, &r, x, -p), -limit_symbol(&pf, &r, x, p));
        }
    }

    #[test]
    fn bulk_profile_values() {
        assert!((bulk_profile_box(1.0, 1.0, 0.0) - PI).abs() < 1e-15);
        assert!((bulk_profile_box(1.0, 1.0, 1.0) - 2.0).abs() < 1e-14);
        let c = bulk_constant(1.0, 1.0, 0.5, 2.0).unwrap();
        assert!((c - PI / 2.0 * (2.0 + PI + 1.0)).abs() < 1e-14);
        assert_eq!(bulk_hbar0(1.0, 0.5, 2.0), 0.25);
        assert!(bulk_constant(1.0, 1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn si_oracle_values() {
        let cases = [
            (PI, 1.851_937_051_982_466_170),
            (3.0 * PI, 1.674_761_798_979_961_266),
            (200.0, 1.568_382_339_339_469_833),
            (10.0, 1.658_347_594_218_874_049),
            (6.0, 1.424_687_551_280_506_536),
            (-2.5, -1.778_520_173_443_826_642),
            (50.5, 1.551_460_523_597_265_225),
        ];
        for (x, want) in cases {
            assert!((si(x) - want).abs() < 1e-13, "Si({x}) = {}", si(x));
        }
        assert_eq!(si(0.0), 0.0);
        assert!((si(200.0) - PI / 2.0).abs() <= 0.006);
        for x in [0.1, 5.9, 6.1, 77.0] {
            assert_eq!(si(-x), -si(x));
        }
    }

    #[test]
    fn si_matches_brute_force_trapezoid() {
        let n = 1_000_000;
        let h = PI / n as f64;
        let f = |t: f64| if t == 0.0 { 1.0 } else { t.sin() / t };
        let mut s = 0.5 * (f(0.0) + f(PI));
        for i in 1..n {
            s += f(i as f64 * h);
        }
        assert!((si(PI) - s * h).abs() < 1e-9);
    }

    #[test]
    fn edge_x_values() {
        assert_eq!(edge_profile_x(-1.0, 0.3, 1.0, 1.0), 0.0);
        assert_eq!(edge_profile_x(0.0, 0.3, 1.0, 1.0), 0.0);
        assert!(edge_profile_x(1e-9, 0.0, 1.0, 1.0).abs() < 1e-8);
        assert!((edge_profile_x(200.0, 0.3, 1.0, 1.0) - 1.0).abs() < 0.02);
        // u = 3, p = 0: (1/π)[2 Si(3π) − 2 sin(3π)].
        let want = (2.0 * si(3.0 * PI) - 2.0 * (3.0 * PI).sin()) / PI;
        assert!((edge_profile_x(3.0, 0.0, 1.0, 1.0) - want).abs() < 1e-14);
    }

    #[test]
    fn edge_p_values() {
        assert_eq!(edge_profile_p(1.2, 0.5, 1.0, 1e-6).unwrap(), 0.0);
        assert_eq!(edge_profile_p(1.0, 0.5, 1.0, 1e-6).unwrap(), 0.0);
        for v in [0.0, -1.0, -2.0, -1.5, f64::NAN] {
            assert!(matches!(edge_profile_p(0.0, v, 1.0, 1e-6), Err(Error::Domain(_))));
        }
        let mid = edge_profile_p(0.0, 0.5, 1.0, 1e-8).unwrap();
        assert!(0.0 < mid && mid < 1.0);
        assert!(edge_profile_p(0.0, 20.0, 1.0, 1e-8).unwrap().abs() <= 0.1);
    }

    #[test]
    fn edge_p_closed_form_at_centre() {
        // At x = 0, α = π and the series is Σ (−1)^j sin(πv)/(j + v),
        // which for v = 1/2 is Σ (−1)^j/(j + 1/2) = π/2, giving 1/2.
        let got = edge_profile_p(0.0, 0.5, 1.0, 1e-10).unwrap();
        assert!((got - 0.5).abs() < 1e-9, "{got}");
        // v = 1/4: Σ (−1)^j/(4j + 1) = (π + 2 ln(1 + √2))/(4√2).
        let got = edge_profile_p(0.0, 0.25, 1.0, 1e-10).unwrap();
        let want = (PI + 2.0 * (1.0 + 2f64.sqrt()).ln()) / (2.0 * PI);
        assert!((got - want).abs() < 1e-9, "{got}");
    }

    #[test]
    fn edge_p_tolerance_is_honoured() {
        let coarse = edge_profile_p(0.5, 1.5, 1.0, 1e-4).unwrap();
        let fine = edge_profile_p(0.5, 1.5, 1.0, 1e-11).unwrap();
        assert!((coarse - fine).abs() <= 1e-4);
    }
}
