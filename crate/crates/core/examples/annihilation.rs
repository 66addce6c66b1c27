//! Localization operator norms, the Hilbert-Schmidt bound and the
//! strong-annihilation constants for a few pairs of sets.

use hankel_up::experiments::annihilation_experiment;
use hankel_up::localization::{grid_for_sets, most_concentrated, small_set_constant, smallness};
use hankel_up::measure::IntervalSet;
use hankel_up::Alpha;

fn main() -> hankel_up::Result<()> {
    let pairs = [
        (IntervalSet::interval(0.0, 0.3)?, IntervalSet::interval(0.0, 0.3)?),
        (IntervalSet::interval(0.0, 1.0)?, IntervalSet::interval(0.0, 1.0)?),
        (IntervalSet::new([(0.2, 0.5), (1.0, 1.2)])?, IntervalSet::new([(0.5, 0.9), (2.0, 2.1)])?),
    ];
    for a in [0.0, 1.0] {
        let alpha = Alpha::new(a)?;
        for (s, sigma) in &pairs {
            let rep = annihilation_experiment(alpha, s, sigma, 4.0, 512, 100, 1)?;
            let small = small_set_constant(alpha, s, sigma).map_or("-".into(), |c| format!("{c:.3}"));
            println!(
                "alpha {a} S={s} Sigma={sigma}: op {:.6} hs {:.4} (bound {:.4}, 2πκ²|S||Σ| = {:.3}) C {:.3} from-HS {small} violations {}",
                rep.op_norm,
                rep.hs_norm,
                rep.hs_bound,
                smallness(alpha, s, sigma),
                rep.c.unwrap_or(f64::NAN),
                rep.violations
            );
        }
    }

    let alpha = Alpha::new(0.0)?;
    let s = IntervalSet::interval(0.0, 1.0)?;
    let grid = grid_for_sets(alpha, 4.0, 512, &[&s])?;
    let v = most_concentrated(&s, &s, &grid)?;
    let samples: Vec<String> = [0.0, 0.25, 0.5, 0.75, 0.99].iter().map(|&x| format!("{:.4}", v.eval(x))).collect();
    println!("most concentrated function on [0, 1]: {}", samples.join(" "));
    Ok(())
}
