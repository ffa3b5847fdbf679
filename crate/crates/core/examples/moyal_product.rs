//! The Moyal product two ways. Composition of coefficient matrices is exact;
//! direct quadrature of the phase-space integral is checked against it.
//! `σ ♯ σ = σ` for a projector even though `σ² ≠ σ`.

use weylsym::moyal::{moyal_direct, moyal_via_composition};
use weylsym::truncate::ladder_matrices;
use weylsym::weyl::{symbol_of_matrix, symbol_projection_box};
use weylsym::{EigenBasis, OperatorMatrix, PhaseGrid, SymbolField};

pub fn run() -> weylsym::Result<()> {
    let (n, l) = (10, 1.0);
    let hbar = 1.0 / n as f64;
    let proj = OperatorMatrix::identity(EigenBasis::particle_in_box(hbar, l)?, n);
    let grid = PhaseGrid::new(-l, l, -8.0, 8.0, 200, 400)?;
    let field = SymbolField::from_fn(grid, |x, p| symbol_projection_box(n, hbar, l, x, p))?;

    println!("box, N = {n}");
    println!("{:>6} {:>6} {:>10} {:>10} {:>10}", "x", "p", "σ", "σ♯σ", "σ²");
    for (x, p) in [(0.0, 0.0), (0.3, 0.8), (-0.5, -1.2), (0.6, 1.5)] {
        let exact = moyal_via_composition(&proj, &proj, x, p)?;
        let direct = moyal_direct(&field, &field, hbar, x, p)?;
        let s = symbol_projection_box(n, hbar, l, x, p);
        println!("{x:>6.2} {p:>6.2} {s:>10.5} {:>10.5} {:>10.5}", direct.value.re, s * s);
        assert!((exact.re - s).abs() < 1e-12);
    }

    let hbar = 0.5;
    let (xm, pm) = ladder_matrices(hbar, 6, 0)?;
    let grid = PhaseGrid::new(-5.0, 5.0, -5.0, 5.0, 100, 100)?;
    let sx = SymbolField::try_from_fn(grid, |x, p| symbol_of_matrix(&xm, x, p))?;
    let sp = SymbolField::try_from_fn(grid, |x, p| symbol_of_matrix(&pm, x, p))?;
    let (x, p) = (0.35, -0.25);
    let xp = moyal_direct(&sx, &sp, hbar, x, p)?.value;
    let px = moyal_direct(&sp, &sx, hbar, x, p)?.value;
    println!("\noscillator, N = 6, ħ = {hbar}: at ({x}, {p})");
    println!("  σ_X ♯ σ_P = {xp:.5}");
    println!("  σ_P ♯ σ_X = {px:.5}");
    println!("  exact XP  = {:.5}", moyal_via_composition(&xm, &pm, x, p)?);
    Ok(())
}

fn main() -> weylsym::Result<()> {
    run()
}
