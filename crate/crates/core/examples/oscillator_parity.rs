//! Hermite wavefunctions and the oscillator projector's symbol. At the origin
//! the symbol of `Π_N` is `1 + (−1)^{N+1}`; away from it the symbol tends to
//! the indicator of the disk `x² + p² ≤ 2μ`.

use weylsym::truncate::{generic_weyl_matrix, GenericQuadSpec, PhaseFunction};
use weylsym::weyl::symbol_of_matrix;
use weylsym::{EigenBasis, OperatorMatrix};

pub fn run() -> weylsym::Result<()> {
    let mu = 1.0;
    println!("{:>4} {:>14} {:>8}", "N", "σ(0, 0)", "expected");
    for n in 4..=9 {
        let hbar = mu / n as f64;
        let proj = OperatorMatrix::identity(EigenBasis::oscillator(hbar)?, n);
        let expected = if n % 2 == 1 { 2.0 } else { 0.0 };
        println!("{n:>4} {:>14.3e} {expected:>8}", symbol_of_matrix(&proj, 0.0, 0.0)?);
    }

    let n = 40;
    let hbar = mu / n as f64;
    let proj = OperatorMatrix::identity(EigenBasis::oscillator(hbar)?, n);
    println!("\nalong p = 0, N = {n}; the disk edge is at x = {:.4}", (2.0 * mu).sqrt());
    for i in 0..=8 {
        let x = 0.25 * i as f64;
        println!("  x = {x:.2}: {:>9.5}", symbol_of_matrix(&proj, x, 0.0)?);
    }

    // Quantising x² + p² returns the Hamiltonian's diagonal 2E_k = ħ(2k − 1).
    let h = |x: f64, p: f64| x * x + p * p;
    let osc = EigenBasis::oscillator(0.5)?;
    let g = generic_weyl_matrix(PhaseFunction::General(&h), osc, 4, GenericQuadSpec::default())?;
    println!("\nOp(x² + p²), ħ = 0.5 (refinement change {:.1e}):", g.refinement_delta);
    for k in 1..=4 {
        println!("  ⟨u_{k}|·|u_{k}⟩ = {:.8}  (2E_k = {})", g.matrix.entry(k, k).re, 2.0 * osc.eigenvalue(k));
    }
    Ok(())
}

fn main() -> weylsym::Result<()> {
    run()
}
