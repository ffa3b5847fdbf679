//! Quadrature and summation primitives shared by the numerical modules.
//!
//! Gauss–Legendre rules are generated by Newton iteration on the Legendre
//! three-term recurrence and cached per order. Composite rules split an
//! interval into equal panels of a fixed-order rule, which keeps node
//! generation cheap while still resolving long oscillatory integrands.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::ops::{Add, Mul};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;

/// Panel order used by [`composite`] integration.
pub const PANEL_ORDER: usize = 32;

/// A Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        let nf = n as f64;
        for i in 0..m {
            let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&t, &w)| (mid + half * t, half * w))
    }

    pub fn integrate<T, F>(&self, a: f64, b: f64, mut f: F) -> T
    where
        T: Zero + Add<Output = T> + Mul<f64, Output = T>,
        F: FnMut(f64) -> T,
    {
        self.mapped(a, b).fold(T::zero(), |acc, (x, w)| acc + f(x) * w)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// Cached Gauss–Legendre rule of order `n`.
pub fn gauss_legendre(n: usize) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(GaussLegendre::new(n)))
        .clone()
}

/// Composite Gauss–Legendre quadrature on `[a, b]` using at least `min_nodes`
/// nodes, split into panels of [`PANEL_ORDER`] nodes each.
pub fn composite<T, F>(a: f64, b: f64, min_nodes: usize, mut f: F) -> T
where
    T: Zero + Add<Output = T> + Mul<f64, Output = T>,
    F: FnMut(f64) -> T,
{
    if b <= a {
        return T::zero();
    }
    let rule = gauss_legendre(PANEL_ORDER);
    let panels = min_nodes.div_ceil(PANEL_ORDER).max(1);
    let width = (b - a) / panels as f64;
    let mut acc = T::zero();
    for i in 0..panels {
        let lo = a + width * i as f64;
        let hi = if i + 1 == panels { b } else { lo + width };
        acc = acc + rule.integrate(lo, hi, &mut f);
    }
    acc
}

/// Nodes and weights of the composite rule used by [`composite`].
pub fn composite_nodes(a: f64, b: f64, min_nodes: usize) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(PANEL_ORDER);
    let panels = min_nodes.div_ceil(PANEL_ORDER).max(1);
    let width = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * PANEL_ORDER);
    for i in 0..panels {
        let lo = a + width * i as f64;
        let hi = if i + 1 == panels { b } else { lo + width };
        out.extend(rule.mapped(lo, hi));
    }
    out
}

const GK15_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK15_KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK15_GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(a: f64, b: f64, f: &mut impl FnMut(f64) -> f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = fc * GK15_KRONROD_WEIGHTS[7];
    let mut gauss = fc * GK15_GAUSS_WEIGHTS[3];
    for i in 0..7 {
        let dx = half * GK15_NODES[i];
        let s = f(mid - dx) + f(mid + dx);
        kronrod += GK15_KRONROD_WEIGHTS[i] * s;
        if i % 2 == 1 {
            gauss += GK15_GAUSS_WEIGHTS[i / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration of a smooth real integrand.
pub fn adaptive_gk15(a: f64, b: f64, tol: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    fn recurse(a: f64, b: f64, tol: f64, depth: u32, f: &mut impl FnMut(f64) -> f64) -> f64 {
        let (value, err) = gk15(a, b, f);
        if err <= tol.max(1e-15 * value.abs()) || depth == 0 {
            return value;
        }
        let mid = 0.5 * (a + b);
        recurse(a, mid, 0.5 * tol, depth - 1, f) + recurse(mid, b, 0.5 * tol, depth - 1, f)
    }
    recurse(a, b, tol, 24, &mut f)
}

/// Pairwise (tree) summation with a fixed block size, independent of threading.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise sum of `f(v)` over a slice.
pub fn pairwise_sum_by<T: Copy>(values: &[T], f: impl Fn(T) -> f64 + Copy) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        return values.iter().map(|&v| f(v)).sum();
    }
    let mid = values.len() / 2;
    pairwise_sum_by(&values[..mid], f) + pairwise_sum_by(&values[mid..], f)
}
