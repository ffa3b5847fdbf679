//! In the bulk of the box, `2πħ K_N(x − ħy/2, x + ħy/2)` approaches the sine
//! profile `(πμ/L) S(πμy/L)` with an error at most `Cħ`, `C` explicit.

use weylsym::limits::{bulk_constant, bulk_hbar0, bulk_profile_box};
use weylsym::weyl::rescaled_kernel_f2;
use weylsym::{EigenBasis, KernelEval};

pub fn run(ns: &[usize]) -> weylsym::Result<()> {
    let (mu, l, cu, cv) = (1.0, 1.0, 0.5, 4.0);
    let c = bulk_constant(mu, l, cu, cv)?;
    println!("C = {c:.6}, estimate valid for ħ < {:.4}", bulk_hbar0(l, cu, cv));
    println!("{:>6} {:>12} {:>12}", "N", "sup error", "C ħ");
    for &n in ns {
        let hbar = mu / n as f64;
        let eval = KernelEval::preferred(EigenBasis::particle_in_box(hbar, l)?, n);
        let mut sup = 0.0f64;
        for i in 0..=100 {
            let x = -cu + 2.0 * cu * i as f64 / 100.0;
            for j in 0..=160 {
                let y = -cv + 2.0 * cv * j as f64 / 160.0;
                sup = sup.max((rescaled_kernel_f2(&eval, hbar, x, y) - bulk_profile_box(mu, l, y)).abs());
            }
        }
        println!("{n:>6} {sup:>12.4e} {:>12.4e}", c * hbar);
    }
    Ok(())
}

fn main() -> weylsym::Result<()> {
    run(&[50, 100, 200, 400])
}
