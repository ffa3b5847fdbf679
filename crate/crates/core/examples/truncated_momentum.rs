//! The truncated momentum `Π_N p̂ Π_N` in the box: its symbol near the
//! classical value `p`, its norm² approaching `π³μ³/6L²`, and the norm² `B` of
//! the part of `p̂Π_N` that leaves the first N levels.

use std::f64::consts::PI;

use weylsym::diag::{box_momentum_leak_norm_sq, hs_norm_sq_symbol};
use weylsym::truncate::box_momentum_matrix;
use weylsym::weyl::symbol_truncated_momentum_box;

pub fn run(ns: &[usize]) -> weylsym::Result<()> {
    let (mu, l): (f64, f64) = (1.0, 1.0);
    let limit = PI.powi(3) * mu.powi(3) / (6.0 * l * l);

    let n = 64;
    let hbar = mu / n as f64;
    println!("symbol at x = 0 (N = {n}); the limit is p inside |p| < πμ/2L");
    for p in [-1.2, -0.6, 0.0, 0.6, 1.2, 1.8] {
        println!("  p = {p:>5.2}: {:>9.5}", symbol_truncated_momentum_box(n, hbar, l, 0.0, p));
    }

    println!("\n{:>6} {:>12} {:>12} {:>12}", "N", "‖σ‖²", "rel. error", "B");
    for &n in ns {
        let hbar = mu / n as f64;
        let norm = hs_norm_sq_symbol(&box_momentum_matrix(n, l, hbar)?, hbar);
        let leak = box_momentum_leak_norm_sq(n, l, hbar)?;
        println!("{n:>6} {norm:>12.6} {:>12.3e} {leak:>12.3e}", (norm - limit).abs() / limit);
    }
    println!("limit π³/6 = {limit:.6}");
    Ok(())
}

fn main() -> weylsym::Result<()> {
    run(&[128, 256, 512, 1024])
}
