//! Linear independence of dilates: the smallest eigenvalue of the Gram
//! matrix of `δ_λ f` for a few distinct `λ`.

use hankel_up::localization::dilate_gram;
use hankel_up::spectral::{RadialFunction, RadialGrid};
use hankel_up::zoo::TestFunction;
use hankel_up::Alpha;

fn main() -> hankel_up::Result<()> {
    let sets: [&[f64]; 3] = [&[1.0, 1.5, 2.0, 3.0, 4.0], &[1.0, 1.01, 1.02], &[1.0, 1.001]];
    for a in [0.0, 1.0] {
        let alpha = Alpha::new(a)?;
        let grid = RadialGrid::new(alpha, 16.0, 2048)?;
        for f in [TestFunction::Gaussian, TestFunction::Bump] {
            let samples = RadialFunction::from_fn(&grid, |x| f.eval(alpha, x));
            for lambdas in sets {
                println!("alpha {a} {f} dilates {lambdas:?}: min eigenvalue {:.3e}", dilate_gram(&samples, lambdas)?);
            }
        }
    }
    Ok(())
}
