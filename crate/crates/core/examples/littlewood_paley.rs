//! The dyadic partition, the kernels of `K` and `L`, and the thin-set
//! Schur experiment over an ε-sweep.

use hankel_up::experiments::{default_thin_c, lp_sweep};
use hankel_up::lpdecomp::{psi, Kernel, LittlewoodPaley};
use hankel_up::spectral::{RadialFunction, RadialGrid};
use hankel_up::Alpha;

fn main() -> hankel_up::Result<()> {
    let alpha = Alpha::new(0.0)?;
    let lp = LittlewoodPaley::new(alpha, 8.0)?;
    println!("levels J = {}, support of φ = {:.1}, ‖φ‖₁ = {:.4}", lp.levels(), lp.phi_table().support(), lp.phi_table().l1_norm());
    for x in [0.5, 1.5, 3.0, 6.0] {
        let parts: Vec<String> = (0..=lp.levels()).map(|j| format!("{:.3}", psi(j, x))).collect();
        println!("ψ_j({x}) = [{}]", parts.join(", "));
    }
    for (x, y) in [(1.0, 1.2), (3.0, 2.5), (5.0, 5.1)] {
        println!(
            "A({x}, {y}) = {:+.5}  B({x}, {y}) = {:+.5} (direct {:+.5})",
            lp.kernel(Kernel::A, x, y),
            lp.kernel(Kernel::B, x, y),
            lp.kernel_b_direct(x, y)
        );
    }

    let small = LittlewoodPaley::new(alpha, 4.0)?;
    let layout: Vec<_> = (0..16).map(|p| (0.25 * p as f64, 0.25 * (p + 1) as f64, 12)).collect();
    let grid = RadialGrid::from_panels(alpha, 4.0, &layout)?;
    let ops = small.operators(&grid)?;
    let f = RadialFunction::from_fn(&grid, |x| (-x * x).exp() * (3.0 * x).cos());
    let k = ops.apply_k(&f)?;
    let l = ops.apply_l(&f)?;
    println!("‖Kf‖ = {:.4}, ‖Lf‖ = {:.4}, ‖Kf + Lf - f‖∞ = {:.1e}", k.l2(), l.l2(), k.add(&l)?.sub(&f)?.sup_norm());

    let sweep = lp_sweep(alpha, 8.0, 1024, &[0.01, 0.02, 0.04], default_thin_c(alpha), 2, 6)?;
    for r in &sweep.runs {
        println!(
            "eps {}: Schur A on S {:.3e}, B on Σ {:.3e}, ‖F_Σ L‖ {:.4}, ‖K E_S‖ {:.4}, bound {:.4}, measured ‖F_Σ E_S‖ {:.2e}, C {:?}",
            r.eps, r.schur_a_on_s, r.schur_b_on_sigma, r.norm_fl, r.norm_ke, r.composite_bound, r.norm_fe, r.certificate_c
        );
    }
    Ok(())
}
