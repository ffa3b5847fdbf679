//! Samples the symbol of the box spectral projector on a phase-space grid and
//! writes it as CSV, then compares grid norms with the exact trace identity.
//!
//! Usage: `cargo run --example box_symbol_field [output.csv]`

use std::f64::consts::PI;
use std::path::PathBuf;

use weylsym::diag::hs_norm_sq_symbol;
use weylsym::export::write_file;
use weylsym::scale::l2_norm_sq_grid;
use weylsym::weyl::symbol_projection_box;
use weylsym::{ClassicalRegion, EigenBasis, OperatorMatrix, PhaseGrid, SemiclassicalScale, SymbolField};

pub fn run(out: Option<PathBuf>) -> weylsym::Result<()> {
    let scale = SemiclassicalScale::new(40, 1.0)?;
    let (n, hbar) = (scale.n_levels(), scale.hbar());
    let l = (PI / 2.0).sqrt();

    let grid = PhaseGrid::new(-2.0, 2.0, -2.5, 2.5, 400, 400)?;
    let field = SymbolField::from_fn(grid, |x, p| symbol_projection_box(n, hbar, l, x, p))?;

    let path = out.unwrap_or_else(|| std::env::temp_dir().join("box_symbol_field.csv"));
    write_file(&path, |w| field.write_csv(w))?;
    println!("wrote {} samples to {}", grid.len(), path.display());

    let basis = EigenBasis::particle_in_box(hbar, l)?;
    let exact = hs_norm_sq_symbol(&OperatorMatrix::identity(basis, n), hbar);
    let windowed = l2_norm_sq_grid(&field);
    let region = ClassicalRegion::rectangle(scale.mu(), l)?;
    println!("‖σ‖² exact      {exact:.6}  (2πħN = {:.6})", 2.0 * PI * hbar * n as f64);
    println!("‖σ‖² on window  {windowed:.6}");
    println!("area of R       {:.6}", region.area());
    let (min, max) = field.values().iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
    println!("range of σ      [{min:.4}, {max:.4}]");
    Ok(())
}

fn main() -> weylsym::Result<()> {
    run(std::env::args().nth(1).map(PathBuf::from))
}
