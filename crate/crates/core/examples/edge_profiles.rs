//! Microscopic profiles of the box projector's symbol at the wall `x = L` and
//! across the momentum edge `p = πμ/2L`, compared with their limits.

use std::f64::consts::PI;

use weylsym::limits::{edge_profile_p, edge_profile_x};
use weylsym::weyl::symbol_projection_box;

pub fn run(n: usize) -> weylsym::Result<()> {
    let (mu, l) = (1.0, 1.0);
    let hbar = mu / n as f64;

    println!("wall profile, x = L − ħu, p = 0 (N = {n})");
    println!("{:>6} {:>12} {:>12}", "u", "σ", "limit");
    for i in 0..=12 {
        let u = 0.5 * i as f64;
        let finite = symbol_projection_box(n, hbar, l, l - hbar * u, 0.0);
        println!("{u:>6.2} {finite:>12.6} {:>12.6}", edge_profile_x(u, 0.0, mu, l));
    }

    println!("\nmomentum edge, p = πμ/2L + ħπv/2L, x = 0.5 (N = {n})");
    println!("{:>6} {:>12} {:>12}", "v", "σ", "limit");
    for v in [-0.75, -0.5, -0.25, 0.25, 0.5, 1.0, 1.5, 3.0] {
        let p = PI * mu / (2.0 * l) + hbar * PI * v / (2.0 * l);
        let finite = symbol_projection_box(n, hbar, l, 0.5, p);
        println!("{v:>6.2} {finite:>12.6} {:>12.6}", edge_profile_p(0.5, v, l, 1e-9)?);
    }
    Ok(())
}

fn main() -> weylsym::Result<()> {
    run(400)
}
