//! Truncations of `(a x̂ + b p̂)ⁿ` in the Hermite basis: the symbol norm²
//! tends to `2π μ^{n+1} ((a² + b²)/2)ⁿ C_n` with `C_n` the Catalan numbers,
//! while the coupling out of the first N levels decays like ħ.

use weylsym::diag::{catalan_limit_value, hs_norm_sq_symbol, offdiag_block_norm_sq};
use weylsym::truncate::{enumerate_paths, matrix_linear_power, matrix_linear_power_padded};

pub fn run(ns: &[usize]) -> weylsym::Result<()> {
    let (a, b, mu) = (0.0, 1.0, 1.0);

    let paths = enumerate_paths(4, 10, 12)?;
    println!("4-step paths from 10 to 12:");
    for path in &paths {
        println!("  {:?}", path.nodes());
    }

    for n in 1..=3 {
        let limit = catalan_limit_value(n, a, b, mu);
        println!("\nn = {n}, limit {limit:.6}");
        println!("{:>6} {:>12} {:>12} {:>12}", "N", "‖σ‖²", "rel. error", "off-diag");
        for &big_n in ns {
            let hbar = mu / big_n as f64;
            let m = matrix_linear_power(a, b, n, hbar, big_n)?;
            let norm = hs_norm_sq_symbol(&m, hbar);
            let padded = matrix_linear_power_padded(a, b, n, hbar, big_n, n)?;
            let leak = offdiag_block_norm_sq(&padded, big_n, hbar)?;
            println!("{big_n:>6} {norm:>12.6} {:>12.3e} {leak:>12.3e}", (norm - limit).abs() / limit);
        }
    }
    Ok(())
}

fn main() -> weylsym::Result<()> {
    run(&[64, 128, 256, 512])
}
