//! Constants of the local uncertainty inequalities in both regimes and a
//! randomized check of each.

use hankel_up::uncertainty::{faris_k, faris_k_closed_form, faris_kprime, faris_kprime_closed_form, local_sweep};
use hankel_up::Alpha;

fn main() -> hankel_up::Result<()> {
    for a in [0.0, 1.0] {
        let alpha = Alpha::new(a)?;
        let beta = alpha.beta();
        for frac in [0.25, 0.5, 0.75, 0.99] {
            let s = frac * beta;
            println!("alpha {a} s {s:.3}: K minimized {:.5}, closed form {:.5}", faris_k(s, alpha)?, faris_k_closed_form(s, alpha)?);
        }
        for mult in [1.25, 2.0, 4.0] {
            let s = mult * beta;
            println!("alpha {a} s {s:.3}: K' minimized {:.5}, closed form {:.5}", faris_kprime(s, alpha)?, faris_kprime_closed_form(s, alpha)?);
        }
        for s in [0.5 * beta, 1.5 * beta] {
            let rep = local_sweep(alpha, s, 50, 7)?;
            println!(
                "alpha {a} s {s}: regime {}, constant {:.4}, worst ratio {:.4}, {} violations in {}",
                rep.regime, rep.constant, rep.worst_ratio, rep.violations, rep.instances
            );
        }
    }
    Ok(())
}
