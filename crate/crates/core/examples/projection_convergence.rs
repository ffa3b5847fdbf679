//! L² distance between the box projector's symbol and the indicator of the
//! classically allowed rectangle, as N grows with ħN fixed.
//!
//! The distance is taken over the whole phase space: the grid covers the
//! rectangle and the symbol mass outside the window is recovered from the
//! trace identity.

use std::f64::consts::PI;

use weylsym::diag::l2_distance_with_tail;
use weylsym::weyl::symbol_projection_box;
use weylsym::{ClassicalRegion, EigenBasis, OperatorMatrix, PhaseGrid, SymbolField};

pub fn run(ns: &[usize], cells: usize) -> weylsym::Result<()> {
    let (mu, l) = (1.0, (PI / 2.0).sqrt());
    let region = ClassicalRegion::rectangle(mu, l)?;
    let grid = PhaseGrid::new(-1.5 * l, 1.5 * l, -3.0, 3.0, cells, cells)?;
    println!("{:>5} {:>14} {:>14} {:>12}", "N", "distance²", "tail²", "relative");
    for &n in ns {
        let hbar = mu / n as f64;
        let field = SymbolField::from_fn(grid, |x, p| symbol_projection_box(n, hbar, l, x, p))?;
        let proj = OperatorMatrix::identity(EigenBasis::particle_in_box(hbar, l)?, n);
        let d = l2_distance_with_tail(&field, &region, &proj, hbar)?;
        println!(
            "{n:>5} {:>14.6e} {:>14.6e} {:>12.4}",
            d.distance_sq(),
            d.tail_sq,
            d.distance_sq() / region.area()
        );
    }
    Ok(())
}

fn main() -> weylsym::Result<()> {
    run(&[10, 20, 40, 80, 160], 800)
}
