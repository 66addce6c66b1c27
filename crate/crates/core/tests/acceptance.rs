//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero when any
//! criterion fails.

use std::sync::Arc;
use std::time::Instant;

use hankel_up::experiments::{annihilation_experiment, heisenberg_check, lp_sweep, product_formula_suite, transform_check};
use hankel_up::localization::{grid_for_sets, hs_bound, hs_double_quadrature, smallness, spectral_factor};
use hankel_up::lpdecomp::{psi, LittlewoodPaley};
use hankel_up::measure::{lebesgue, IntervalSet};
use hankel_up::spectral::{hankel_matrix, heisenberg_ratio, RadialFunction, RadialGrid};
use hankel_up::uncertainty::{faris_k, faris_k_closed_form, faris_kprime, faris_kprime_closed_form, local_sweep};
use hankel_up::zoo::{random_interval_set, SmoothSum, TestFunction};
use hankel_up::{localization, Alpha};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ALPHAS: [f64; 4] = [0.0, 0.5, 1.0, 2.5];
const PLANCHEREL_TOL: f64 = 1e-6;
const PLANCHEREL_SECONDS: f64 = 60.0;
const GAUSSIAN_TOL: f64 = 1e-6;
const PRODUCT_TOL: f64 = 1e-6;
const MASS_TOL: f64 = 1e-6;
const HS_SLACK: f64 = 1e-3;
const HS_ORACLE_TOL: f64 = 1e-4;
const SMALLNESS_MAX: f64 = 0.25;
const CLOSED_FORM_TOL: f64 = 1e-6;
const PARTITION_TOL: f64 = 1e-12;
const K_PLUS_L_TOL: f64 = 1e-7;
const KERNEL_B_TOL: f64 = 1e-6;
const SCHUR_LINEARITY: f64 = 0.3;
const HEISENBERG_TOL: f64 = 1e-4;
const GRAM_FLOOR: f64 = 1e-8;

struct Verdict {
    pass: bool,
    detail: String,
}

fn al(a: f64) -> Alpha {
    Alpha::new(a).unwrap()
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.2e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

fn plancherel() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = Vec::new();
    for a in ALPHAS {
        let grid = RadialGrid::new(al(a), 8.0, 1024).unwrap();
        let h = hankel_matrix(&grid, &grid).unwrap();
        let errs = (0..50).map(|_| {
            let g = SmoothSum::random(&mut rng);
            let f = RadialFunction::from_fn(&grid, |x| g.eval(x));
            let ff = h.apply(&f).unwrap();
            (ff.l2() - f.l2()).abs() / f.l2()
        });
        worst.push(max_of(errs));
    }
    let secs = start.elapsed().as_secs_f64();
    Verdict {
        pass: worst.iter().all(|&e| e <= PLANCHEREL_TOL) && secs <= PLANCHEREL_SECONDS,
        detail: format!("max relative error per alpha {}, {secs:.1} s for 200 functions", sci(&worst)),
    }
}

fn gaussian() -> Verdict {
    let errs: Vec<f64> = ALPHAS
        .iter()
        .map(|&a| transform_check(al(a), TestFunction::Gaussian, 8.0, 1024).unwrap().2.gaussian_error.unwrap())
        .collect();
    Verdict {
        pass: errs.iter().all(|&e| e <= GAUSSIAN_TOL),
        detail: format!("sup error on [0, 4] per alpha {}", sci(&errs)),
    }
}

fn product_formula() -> Verdict {
    let reps: Vec<_> = ALPHAS.iter().map(|&a| product_formula_suite(al(a), 100, 3)).collect();
    let literal: Vec<f64> = reps.iter().map(|r| r.literal_error).collect();
    let normalized: Vec<f64> = reps.iter().map(|r| r.normalized_error).collect();
    let mass: Vec<f64> = reps.iter().map(|r| r.kernel_mass_error).collect();
    Verdict {
        pass: literal.iter().all(|&e| e <= PRODUCT_TOL) && mass.iter().all(|&e| e <= MASS_TOL),
        detail: format!(
            "|T_x j(λ·)(y) - j(λx)j(λy)| per alpha {}; with the 1/j(0) factor {}; \
             |∫W dμ - 1| {}",
            sci(&literal),
            sci(&normalized),
            sci(&mass)
        ),
    }
}

/// Random pairs inside `[0, 3]` with `|S||Σ|` in `[lo, hi]`.
fn random_pairs(rng: &mut ChaCha8Rng, count: usize, accept: impl Fn(&IntervalSet, &IntervalSet) -> bool) -> Vec<(IntervalSet, IntervalSet)> {
    let mut pairs = Vec::with_capacity(count);
    while pairs.len() < count {
        let len_s = (rng.gen_range(0.02f64.ln()..1.5f64.ln())).exp();
        let len_t = (rng.gen_range(0.02f64.ln()..1.5f64.ln())).exp();
        let s = random_interval_set(rng, 3.0, 3, len_s);
        let t = random_interval_set(rng, 3.0, 3, len_t);
        if accept(&s, &t) {
            pairs.push((s, t));
        }
    }
    pairs
}

fn hs_bound_check() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let pairs = random_pairs(&mut rng, 200, |s, t| {
        let p = lebesgue(s) * lebesgue(t);
        (0.001..=1.0).contains(&p)
    });
    let mut worst_bound = 0.0f64;
    let mut worst_oracle = 0.0f64;
    let mut bound_violations = 0;
    for (i, (s, t)) in pairs.iter().enumerate() {
        let alpha = al(ALPHAS[i % ALPHAS.len()]);
        let grid = grid_for_sets(alpha, 3.0, 512, &[s, t]).unwrap();
        let (b, _, _) = spectral_factor(s, t, &grid).unwrap();
        let hs = b.norm();
        let bound = hs_bound(alpha, s, t);
        let oracle = hs_double_quadrature(alpha, s, t).sqrt();
        worst_bound = worst_bound.max(hs / bound);
        worst_oracle = worst_oracle.max((hs - oracle).abs() / oracle);
        if hs > bound * (1.0 + HS_SLACK) {
            bound_violations += 1;
        }
    }
    Verdict {
        pass: bound_violations == 0 && worst_oracle <= HS_ORACLE_TOL,
        detail: format!(
            "200 pairs: max hs/bound {worst_bound:.4}, {bound_violations} violations, \
             max relative gap to double quadrature {worst_oracle:.2e}"
        ),
    }
}

fn strong_annihilation() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut lines = Vec::new();
    let mut pass = true;
    for (i, &a) in ALPHAS.iter().chain(ALPHAS.iter()).enumerate() {
        let alpha = al(a);
        let (s, t) = random_pairs(&mut rng, 1, |s, t| smallness(alpha, s, t) <= SMALLNESS_MAX).remove(0);
        let rep = annihilation_experiment(alpha, &s, &t, 3.0, 512, 100, 50 + i as u64).unwrap();
        pass &= rep.op_norm < 1.0 && rep.passes();
        lines.push(format!("α={a} op={:.3} C={:.3} viol={}", rep.op_norm, rep.c.unwrap_or(f64::NAN), rep.violations));
    }
    Verdict { pass, detail: format!("8 pairs x 100 functions: {}", lines.join("; ")) }
}

fn local_uncertainty() -> Verdict {
    let mut pass = true;
    let mut lines = Vec::new();
    for (i, &a) in [0.0, 1.0].iter().enumerate() {
        let alpha = al(a);
        for s in [0.5 * alpha.beta(), 1.5 * alpha.beta()] {
            let rep = local_sweep(alpha, s, 200, 60 + i as u64).unwrap();
            pass &= rep.violations == 0;
            lines.push(format!("α={a} s={s} regime {}: worst {:.3}, {} violations", rep.regime, rep.worst_ratio, rep.violations));
        }
    }
    // Closed forms against the minimized constants.
    let mut k_gap = 0.0f64;
    let mut kp_gap = 0.0f64;
    for &a in &[0.0, 1.0] {
        let alpha = al(a);
        let beta = alpha.beta();
        for frac in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let s = frac * beta;
            let (k, kp) = (faris_k(s, alpha).unwrap(), faris_k_closed_form(s, alpha).unwrap());
            k_gap = k_gap.max((kp / k - 1.0).abs());
            let s = (1.0 + 2.0 * frac) * beta;
            let (k, kp) = (faris_kprime(s, alpha).unwrap(), faris_kprime_closed_form(s, alpha).unwrap());
            kp_gap = kp_gap.max((kp / k - 1.0).abs());
        }
    }
    pass &= k_gap <= CLOSED_FORM_TOL && kp_gap <= CLOSED_FORM_TOL;
    let half = al(0.0);
    lines.push(format!(
        "closed-form K: max relative gap {k_gap:.2e}, closed form {:.4} vs minimized {:.4} at α=0, s=1/2; \
         closed-form K': max relative gap {kp_gap:.2e}",
        faris_k_closed_form(0.5, half).unwrap(),
        faris_k(0.5, half).unwrap()
    ));
    Verdict { pass, detail: lines.join("; ") }
}

fn decomposition() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let partition = max_of((0..100_000).map(|_| {
        let x = rng.gen_range(0.0..1e6);
        ((0..=24).map(|j| psi(j, x)).sum::<f64>() - 1.0).abs()
    }));

    let alpha = al(0.5);
    let lp = LittlewoodPaley::new(alpha, 4.0).unwrap();
    let layout: Vec<_> = (0..16).map(|p| (0.25 * p as f64, 0.25 * (p + 1) as f64, 12)).collect();
    let grid: Arc<RadialGrid> = RadialGrid::from_panels(alpha, 4.0, &layout).unwrap();
    let ops = lp.operators(&grid).unwrap();
    let kl = max_of((0..50).map(|_| {
        let g = SmoothSum::random(&mut rng);
        let f = RadialFunction::from_fn(&grid, |x| g.eval(x));
        let sum = ops.apply_k(&f).unwrap().add(&ops.apply_l(&f).unwrap()).unwrap();
        sum.sub(&f).unwrap().sup_norm() / f.sup_norm()
    }));

    let mut kernel_gap = 0.0f64;
    let mut kernel_scale = 0.0f64;
    for a in ALPHAS {
        let lp = LittlewoodPaley::new(al(a), 8.0).unwrap();
        for _ in 0..25 {
            let y = rng.gen_range(0.0..8.0);
            let x = (y + rng.gen_range(-1.0..1.0f64)).clamp(0.0, 8.0);
            let b = lp.kernel_b(x, y);
            kernel_gap = kernel_gap.max((b - lp.kernel_b_direct(x, y)).abs());
            kernel_scale = kernel_scale.max(b.abs());
        }
    }
    Verdict {
        pass: partition <= PARTITION_TOL && kl <= K_PLUS_L_TOL && kernel_gap <= KERNEL_B_TOL,
        detail: format!(
            "|Σψ_j - 1| {partition:.1e} at 1e5 points; |Kf + Lf - f| {kl:.1e} on 50 functions; \
             kernel B two ways {kernel_gap:.1e} at 100 points with max |B| {kernel_scale:.2}"
        ),
    }
}

fn thin_schur() -> Verdict {
    let alpha = al(0.0);
    let c = hankel_up::experiments::default_thin_c(alpha);
    let sweep = lp_sweep(alpha, 8.0, 1024, &[0.01, 0.02, 0.04], c, 2, 6).unwrap();
    let linear = sweep.schur_doubling_ratios.len() == 2
        && sweep.schur_doubling_ratios.iter().all(|r| (r / 2.0 - 1.0).abs() <= SCHUR_LINEARITY);
    let smallest = &sweep.runs[0];
    let below = smallest.composite_bound < 1.0 && smallest.certificate_c.is_some();
    let bounds: Vec<f64> = sweep.runs.iter().map(|r| r.composite_bound).collect();
    Verdict {
        pass: linear && sweep.monotone && below,
        detail: format!(
            "Schur(2ε)/Schur(ε) {:.4?}; composite bound at ε = 0.01, 0.02, 0.04: {bounds:.4?}; \
             C = {:.4} and empirical ε0 = {:.3} at ε = 0.01",
            sweep.schur_doubling_ratios,
            smallest.certificate_c.unwrap_or(f64::NAN),
            smallest.eps0_empirical.unwrap_or(f64::NAN)
        ),
    }
}

fn heisenberg() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut gauss_gap = 0.0f64;
    let mut min_ratio = f64::INFINITY;
    for a in ALPHAS {
        let (_, _, rep) = heisenberg_check(al(a), TestFunction::Gaussian, 8.0, 1024).unwrap();
        gauss_gap = gauss_gap.max((rep.ratio - 1.0).abs());
        let grid = RadialGrid::new(al(a), 8.0, 1024).unwrap();
        let h = hankel_matrix(&grid, &grid).unwrap();
        for _ in 0..25 {
            let g = SmoothSum::random(&mut rng);
            let f = RadialFunction::from_fn(&grid, |x| g.eval(x));
            let ff = h.apply(&f).unwrap();
            min_ratio = min_ratio.min(heisenberg_ratio(&f, &ff).unwrap());
        }
    }
    Verdict {
        pass: gauss_gap <= HEISENBERG_TOL && min_ratio >= 1.0 - HEISENBERG_TOL,
        detail: format!("Gaussian |ratio - 1| {gauss_gap:.1e}; min ratio over 100 random functions {min_ratio:.4}"),
    }
}

fn dilate_gram() -> Verdict {
    let lambdas = [1.0, 1.5, 2.0, 3.0, 4.0];
    let mut lines = Vec::new();
    let mut pass = true;
    for a in ALPHAS {
        let grid = RadialGrid::new(al(a), 16.0, 2048).unwrap();
        for t in [TestFunction::Gaussian, TestFunction::Bump] {
            let f = RadialFunction::from_fn(&grid, |x| t.eval(al(a), x));
            let m = localization::dilate_gram(&f, &lambdas).unwrap();
            pass &= m > GRAM_FLOOR;
            lines.push(format!("{t} α={a}: {m:.2e}"));
        }
    }
    Verdict { pass, detail: format!("min eigenvalue, dilates {lambdas:?}: {}", lines.join(", ")) }
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 10] = [
        ("Plancherel", plancherel),
        ("Gaussian self-reciprocity", gaussian),
        ("translation product formula", product_formula),
        ("Hilbert-Schmidt bound", hs_bound_check),
        ("strong annihilation certificate", strong_annihilation),
        ("local uncertainty, both regimes", local_uncertainty),
        ("partition and decomposition", decomposition),
        ("thin Schur scaling", thin_schur),
        ("Heisenberg diagnostic", heisenberg),
        ("dilate Gram", dilate_gram),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        failed += !v.pass as usize;
        println!(
            "criterion {:>2} {} {name} [{:.1} s]: {}",
            k + 1,
            if v.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            v.detail
        );
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
