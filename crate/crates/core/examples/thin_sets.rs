//! The example family of thin sets, the window check, the covering
//! estimate and the annulus measure bounds.

use hankel_up::experiments::default_thin_c;
use hankel_up::measure::{lebesgue, IntervalSet};
use hankel_up::thinsets::{annulus_measure_bounds, covering_check, is_thin, make_thin_example};
use hankel_up::Alpha;

fn main() -> hankel_up::Result<()> {
    let alpha = Alpha::new(0.0)?;
    let c = default_thin_c(alpha);
    for eps in [0.05, 0.1, 0.2] {
        let s = make_thin_example(eps, c, 1, 10_000)?;
        let rep = is_thin(&s, eps, alpha, 10_001.0)?;
        println!(
            "eps {eps}: {} components, Lebesgue measure {:.4}, thin {} (worst ratio {:.4} on {:?})",
            s.intervals().len(),
            lebesgue(&s),
            rep.is_thin,
            rep.worst_ratio,
            rep.witness_window
        );
    }

    let blob = IntervalSet::new([(3.0, 3.2), (6.0, 6.01)])?;
    let rep = is_thin(&blob, 0.1, alpha, 8.0)?;
    println!("[3, 3.2) ∪ [6, 6.01): thin at 0.1? {} (worst {:.3} on {:?})", rep.is_thin, rep.worst_ratio, rep.witness_window);

    let s = make_thin_example(0.1, c, 1, 400)?;
    for (a, b) in [(0.0, 50.0), (10.0, 200.0), (100.0, 400.0)] {
        let cov = covering_check(&s, a, b, 0.1, alpha)?;
        println!("covering on [{a}, {b}]: ratio {:.4} <= {:.1}: {} ({} steps)", cov.ratio, cov.constant, cov.bound_ok, cov.steps.len());
    }

    for (x, r) in [(4.0, 1.0), (2.0, 3.0)] {
        let b = annulus_measure_bounds(Alpha::new(1.0)?, x, r)?;
        println!("annulus x={x} r={r}: near {:?} far {:?}", b.near, b.far);
    }
    Ok(())
}
