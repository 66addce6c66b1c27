//! The kernel `j_α`, its value at zero and the envelope constant `κ_α`.

use hankel_up::specfun::{bessel_j, bessel_j_poisson, j_at_zero, kappa_alpha};
use hankel_up::Alpha;

fn main() -> hankel_up::Result<()> {
    println!("{:>5} {:>12} {:>12} {:>12} {:>10}", "alpha", "j(0)", "j(7.3)", "poisson", "kappa");
    for a in [-0.25, 0.0, 0.5, 1.0, 2.5] {
        let alpha = Alpha::new(a)?;
        println!(
            "{a:>5} {:>12.9} {:>12.9} {:>12.9} {:>10.6}",
            j_at_zero(alpha),
            bessel_j(alpha, 7.3),
            bessel_j_poisson(alpha, 7.3, 64)?,
            kappa_alpha(alpha)
        );
    }
    Ok(())
}
