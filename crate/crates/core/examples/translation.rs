//! Generalized translation: the product formula on Bessel modes, a
//! translated Gaussian, and convolution under the transform.

use std::f64::consts::PI;

use hankel_up::experiments::product_formula_suite;
use hankel_up::spectral::{hankel_transform, RadialFunction, RadialGrid};
use hankel_up::specfun::j_at_zero;
use hankel_up::translation::{convolve, translate};
use hankel_up::Alpha;

fn main() -> hankel_up::Result<()> {
    for a in [0.0, 0.5, 1.0, 2.5] {
        let rep = product_formula_suite(Alpha::new(a)?, 100, 0);
        println!(
            "alpha {a}: T_x j(λ·)(y) vs j(λx)j(λy): {:.2e}, vs j(λx)j(λy)/j(0): {:.2e}, kernel mass: {:.2e}",
            rep.literal_error, rep.normalized_error, rep.kernel_mass_error
        );
    }

    let alpha = Alpha::new(1.0)?;
    let grid = RadialGrid::new(alpha, 8.0, 256)?;
    let f = RadialFunction::from_fn(&grid, |x| (-PI * x * x).exp());
    let (t, _) = translate(&f, 2.0)?;
    let peak = grid.nodes().iter().zip(t.values()).fold((0.0, 0.0), |b, (&x, &v)| if v > b.1 { (x, v) } else { b });
    println!("T_2 of the Gaussian at alpha 1: peak {:.4} at x = {:.3}, L1 norm {:.6} vs {:.6}", peak.1, peak.0, t.norm(1.0)?, f.norm(1.0)?);

    let g = RadialFunction::from_fn(&grid, |x| x * x * (-2.0 * x * x).exp());
    let conv = convolve(&f, &g)?;
    let lhs = hankel_transform(&conv, &grid)?;
    let (ff, fg) = (hankel_transform(&f, &grid)?, hankel_transform(&g, &grid)?);
    let gap = (0..grid.len())
        .map(|i| (lhs.values()[i] - ff.values()[i] * fg.values()[i] / j_at_zero(alpha)).abs())
        .fold(0.0, f64::max);
    println!("F(f * g) vs Ff Fg / j(0): max gap {gap:.2e}");
    Ok(())
}
