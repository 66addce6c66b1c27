//! Heisenberg ratios of the test functions; the Gaussian is extremal.

use hankel_up::experiments::heisenberg_check;
use hankel_up::zoo::TestFunction;
use hankel_up::Alpha;

fn main() -> hankel_up::Result<()> {
    for a in [0.0, 0.5, 1.0, 2.5] {
        let alpha = Alpha::new(a)?;
        let ratios: Vec<String> = TestFunction::ALL
            .iter()
            .map(|&f| heisenberg_check(alpha, f, 8.0, 1024).map(|(_, _, r)| format!("{f} {:.6}", r.ratio)))
            .collect::<hankel_up::Result<_>>()?;
        println!("alpha {a}: {}", ratios.join(", "));
    }
    Ok(())
}
