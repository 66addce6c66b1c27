//! Forward and inverse transform of every test function: isometry,
//! involution and the self-reciprocal Gaussian.

use hankel_up::experiments::transform_check;
use hankel_up::zoo::TestFunction;
use hankel_up::Alpha;

fn main() -> hankel_up::Result<()> {
    println!("{:>5} {:>14} {:>12} {:>12} {:>12}", "alpha", "f", "plancherel", "round trip", "gaussian");
    for a in [0.0, 0.5, 1.0, 2.5] {
        let alpha = Alpha::new(a)?;
        for f in TestFunction::ALL {
            let (_, _, rep) = transform_check(alpha, f, 8.0, 1024)?;
            let gauss = rep.gaussian_error.map_or("-".into(), |e| format!("{e:.2e}"));
            println!(
                "{a:>5} {f:>14} {:>12.2e} {:>12.2e} {gauss:>12}",
                rep.plancherel_error, rep.roundtrip_error
            );
        }
    }
    Ok(())
}
