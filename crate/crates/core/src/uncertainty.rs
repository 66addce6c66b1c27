//! Local uncertainty inequalities of Faris type. For `0 < s < α+1`,
//! `‖F_α f‖_{L²_α(E)} ≤ K μ_α(E)^{s/(2(α+1))} ‖x^s f‖`, and for `s > α+1`,
//! `‖F_α f‖_{L²_α(E)} ≤ K' μ_α(E)^{1/2} ‖f‖^{1-(α+1)/s} ‖x^s f‖^{(α+1)/s}`.
//!
//! Both constants are obtained by minimizing the two-term bounds of the
//! standard proof over the splitting radius. The closed forms are exposed
//! separately as `*_closed_form`.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::localization::grid_for_sets;
use crate::measure::{mu_alpha, IntervalSet};
use crate::optimize::golden_min;
use crate::quadrature::gauss_jacobi;
use crate::spectral::{hankel_transform, RadialFunction, RadialGrid};
use crate::specfun::{j_at_zero, Alpha};
use crate::zoo::{random_interval_set, SmoothSum};

/// Search interval for the logarithm of the splitting radius.
const LOG_RANGE: f64 = 200.0;

/// Which inequality applies to `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `0 < s < α+1`.
    Below,
    /// `s > α+1`.
    Above,
}

impl Regime {
    pub fn of(s: f64, alpha: Alpha) -> Result<Regime> {
        let beta = alpha.beta();
        if !(s > 0.0 && s.is_finite()) {
            domain(format!("s must be positive, got {s}"))
        } else if s < beta {
            Ok(Regime::Below)
        } else if s > beta {
            Ok(Regime::Above)
        } else {
            domain(format!("s = α + 1 = {beta} is not covered by either inequality"))
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Regime::Below => 1,
            Regime::Above => 2,
        }
    }
}

fn require(regime: Regime, s: f64, alpha: Alpha) -> Result<()> {
    let got = Regime::of(s, alpha)?;
    if got != regime {
        let beta = alpha.beta();
        return match regime {
            Regime::Below => domain(format!("need 0 < s < α+1 = {beta}, got {s}")),
            Regime::Above => domain(format!("need s > α+1 = {beta}, got {s}")),
        };
    }
    Ok(())
}

/// `a_α = π^{(α+1)/2} / (√(2^α (α+1-s)) Γ(α+1))`, so that
/// `‖x^{-s} χ_{[0,r)}‖ / (2^α Γ(α+1)) = a_α r^{α+1-s}`.
pub fn faris_a(s: f64, alpha: Alpha) -> Result<f64> {
    require(Regime::Below, s, alpha)?;
    let beta = alpha.beta();
    let a = alpha.value();
    Ok(PI.powf(0.5 * beta) / ((2f64.powf(a) * (beta - s)).sqrt() * crate::specfun::gamma(beta)?))
}

/// `r^{-s} + a_α r^{α+1-s}`: the bound on `‖F_α f‖_{L²(E)} / ‖x^s f‖` when
/// `μ_α(E) = 1`, split at radius `r`.
pub fn faris_k_bound(s: f64, alpha: Alpha, r: f64) -> Result<f64> {
    let a = faris_a(s, alpha)?;
    Ok(r.powf(-s) + a * r.powf(alpha.beta() - s))
}

/// `K(s, α)`: the minimum over `r > 0` of [`faris_k_bound`].
pub fn faris_k(s: f64, alpha: Alpha) -> Result<f64> {
    let a = faris_a(s, alpha)?;
    let beta = alpha.beta();
    let (_, v) = golden_min(|t| (-s * t).exp() + a * ((beta - s) * t).exp(), -LOG_RANGE, LOG_RANGE);
    Ok(v)
}

/// `(α+1)/(α+1-s) · [a_α (α+1-s)/s]^{(α+1)/s}`.
pub fn faris_k_closed_form(s: f64, alpha: Alpha) -> Result<f64> {
    let a = faris_a(s, alpha)?;
    let beta = alpha.beta();
    Ok(beta / (beta - s) * (a * (beta - s) / s).powf(beta / s))
}

fn jacobi_on_unit(exponent: f64, g: impl Fn(f64) -> f64) -> Result<f64> {
    let rule = gauss_jacobi(48, 0.0, exponent)?;
    let sum: f64 = rule.nodes.iter().zip(&rule.weights).map(|(&u, &w)| w * g(0.5 * (1.0 + u))).sum();
    Ok(0.5f64.powf(exponent + 1.0) * sum)
}

/// `∫_0^∞ dμ_α(x) / (1 + x^{2s})` for `s > α+1`.
///
/// Split at `x = 1` with `x ↦ 1/x` on the tail; after `t = x^{2s}` both halves
/// are `∫_0^1 t^c / (1+t) dt`, integrated by Gauss–Jacobi rules.
pub fn local_integral(s: f64, alpha: Alpha) -> Result<f64> {
    require(Regime::Above, s, alpha)?;
    let q = alpha.beta() / s;
    let g = |t: f64| 1.0 / (1.0 + t);
    let head = jacobi_on_unit(q - 1.0, g)?;
    let tail = jacobi_on_unit(-q, g)?;
    Ok(alpha.measure_prefactor() * (head + tail) / (2.0 * s))
}

/// `u^{α+1} + u^{α+1-s}`: the bracket of the proof's bound with
/// `‖f‖ = ‖x^s f‖ = 1` after the dilation `f ↦ f(√u ·)`.
pub fn faris_kprime_bound(s: f64, alpha: Alpha, u: f64) -> f64 {
    let beta = alpha.beta();
    u.powf(beta) + u.powf(beta - s)
}

/// `K'(s, α) = (2^α Γ(α+1))^{-1} (I · min_u [u^{α+1} + u^{α+1-s}])^{1/2}`.
pub fn faris_kprime(s: f64, alpha: Alpha) -> Result<f64> {
    let integral = local_integral(s, alpha)?;
    let beta = alpha.beta();
    let (_, m) = golden_min(|v| (beta * v).exp() + ((beta - s) * v).exp(), -LOG_RANGE, LOG_RANGE);
    Ok(j_at_zero(alpha) * (integral * m).sqrt())
}

/// `(2^α Γ(α+1))^{-1} [s/(α+1) (s/(α+1) - 1)^{(α+1-s)/s} I]^{1/2}`.
pub fn faris_kprime_closed_form(s: f64, alpha: Alpha) -> Result<f64> {
    let integral = local_integral(s, alpha)?;
    let q = s / alpha.beta();
    Ok(j_at_zero(alpha) * (q * (q - 1.0).powf((alpha.beta() - s) / s) * integral).sqrt())
}

/// The constant for whichever regime `s` falls in.
pub fn faris_constant(s: f64, alpha: Alpha) -> Result<f64> {
    match Regime::of(s, alpha)? {
        Regime::Below => faris_k(s, alpha),
        Regime::Above => faris_kprime(s, alpha),
    }
}

/// One evaluation of the local inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalCheck {
    pub regime: u8,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub holds: bool,
}

/// Nodes on the frequency side used to integrate `|F_α f|²` over `E`.
const FREQ_NODES: usize = 256;

/// `‖F_α f‖_{L²_α(E)}`, with `F_α f` evaluated on a grid adapted to `E`.
pub fn transform_norm_on(f: &RadialFunction, e: &IntervalSet) -> Result<f64> {
    if e.is_empty() {
        return Ok(0.0);
    }
    let grid = grid_for_sets(f.alpha(), e.sup(), FREQ_NODES, &[e])?;
    let ff = hankel_transform(f, &grid)?;
    let energy: f64 = grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .zip(ff.values())
        .filter(|((&x, _), _)| e.contains(x))
        .map(|((_, &w), &v)| w * v * v)
        .sum();
    Ok(energy.sqrt())
}

/// Both sides of the inequality selected by `s`, with constant `constant`.
pub fn verify_local_with(f: &RadialFunction, e: &IntervalSet, s: f64, constant: f64) -> Result<LocalCheck> {
    let alpha = f.alpha();
    let regime = Regime::of(s, alpha)?;
    let beta = alpha.beta();
    let lhs = transform_norm_on(f, e)?;
    let measure = mu_alpha(alpha, e);
    let moment = f.weighted_norm(s)?;
    let rhs = match regime {
        Regime::Below => constant * measure.powf(s / (2.0 * beta)) * moment,
        Regime::Above => constant * measure.sqrt() * f.l2().powf(1.0 - beta / s) * moment.powf(beta / s),
    };
    let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    Ok(LocalCheck { regime: regime.number(), lhs, rhs, ratio, holds: lhs <= rhs * (1.0 + 1e-6) })
}

/// [`verify_local_with`] using the minimized constant.
pub fn verify_local(f: &RadialFunction, e: &IntervalSet, s: f64) -> Result<LocalCheck> {
    let constant = faris_constant(s, f.alpha())?;
    verify_local_with(f, e, s, constant)
}

/// Outcome of a randomized sweep at fixed `(s, α)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalSweep {
    pub regime: u8,
    pub s: f64,
    pub alpha: f64,
    #[serde(rename = "K_or_Kprime")]
    pub constant: f64,
    pub worst_ratio: f64,
    pub instances: usize,
    pub violations: usize,
}

/// Random smooth `f` on `[0, 8]` against random unions of up to three
/// intervals in `[0, 4]`.
pub fn local_sweep(alpha: Alpha, s: f64, instances: usize, seed: u64) -> Result<LocalSweep> {
    let regime = Regime::of(s, alpha)?;
    let constant = faris_constant(s, alpha)?;
    let grid = RadialGrid::new(alpha, 8.0, 512)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<(SmoothSum, IntervalSet)> = (0..instances)
        .map(|_| (SmoothSum::random(&mut rng), random_interval_set(&mut rng, 4.0, 3, 2.0)))
        .collect();
    let checks: Vec<LocalCheck> = cases
        .par_iter()
        .map(|(g, e)| verify_local_with(&RadialFunction::from_fn(&grid, |x| g.eval(x)), e, s, constant))
        .collect::<Result<_>>()?;
    Ok(LocalSweep {
        regime: regime.number(),
        s,
        alpha: alpha.value(),
        constant,
        worst_ratio: checks.iter().map(|c| c.ratio).fold(0.0, f64::max),
        instances,
        violations: checks.iter().filter(|c| !c.holds).count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::gaussian;

    fn al(a: f64) -> Alpha {
        Alpha::new(a).unwrap()
    }

    /// Stationary point of `r^{-s} + a r^{β-s}` solved by hand.
    fn k_closed(s: f64, alpha: Alpha) -> f64 {
        let beta = alpha.beta();
        let a = faris_a(s, alpha).unwrap();
        beta / (beta - s) * (a * (beta - s) / s).powf(s / beta)
    }

    #[test]
    fn a_matches_the_truncated_moment() {
        for &(s, a) in &[(0.5, 0.0), (0.3, 1.0), (2.0, 2.5)] {
            let alpha = al(a);
            let beta = alpha.beta();
            // ‖x^{-s} χ_{[0,1)}‖² = (2π)^β / (2(β - s))
            let moment = (alpha.measure_prefactor() / (2.0 * (beta - s))).sqrt();
            assert!((faris_a(s, alpha).unwrap() - moment * j_at_zero(alpha)).abs() < 1e-13);
        }
    }

    #[test]
    fn minimized_k() {
        for &a in &[0.0, 0.5, 1.0, 2.5] {
            let alpha = al(a);
            for frac in [0.1, 0.5, 0.9, 0.99] {
                let s = frac * alpha.beta();
                let k = faris_k(s, alpha).unwrap();
                assert!((k / k_closed(s, alpha) - 1.0).abs() < 1e-10, "α = {a}, s = {s}");
                assert!(faris_k_bound(s, alpha, 1.3).unwrap() >= k);
            }
        }
        assert!(faris_k(0.0, al(0.0)).is_err());
        assert!(faris_k(1.0, al(0.0)).is_err());
        assert!(faris_k(1.5, al(0.0)).is_err());
    }

    #[test]
    fn closed_form_k_uses_the_reciprocal_exponent() {
        let alpha = al(0.0);
        let (s, beta) = (0.5, 1.0);
        let k = faris_k(s, alpha).unwrap();
        let closed = faris_k_closed_form(s, alpha).unwrap();
        assert!((k - 2.0 * (2.0 * PI).sqrt().sqrt()).abs() < 1e-10);
        assert!((closed - 4.0 * PI).abs() < 1e-10);
        let x = k * (beta - s) / beta;
        assert!((closed - beta / (beta - s) * x.powf((beta / s) * (beta / s))).abs() < 1e-9);
    }

    #[test]
    fn k_blows_up_at_the_critical_exponent() {
        let alpha = al(0.0);
        let half = faris_k(0.5, alpha).unwrap();
        let near = faris_k(0.99, alpha).unwrap();
        assert!(near > half && near / half < 10.0);
        let nearer = faris_k(1.0 - 1e-6, alpha).unwrap();
        assert!(nearer > 100.0 * half);
    }

    #[test]
    fn local_integral_closed_form() {
        assert!((local_integral(2.0, al(0.0)).unwrap() - PI * PI / 2.0).abs() < 1e-12);
        for &a in &[0.0, 0.5] {
            let alpha = al(a);
            for &s in &[1.6, 2.0, 4.0] {
                let beta = alpha.beta();
                let exact = alpha.measure_prefactor() * PI / (2.0 * s * (PI * beta / s).sin());
                assert!((local_integral(s, alpha).unwrap() / exact - 1.0).abs() < 1e-12, "α = {a}, s = {s}");
                let k = faris_kprime(s, alpha).unwrap();
                assert!(k.is_finite() && k > 0.0);
                assert!((k / faris_kprime_closed_form(s, alpha).unwrap() - 1.0).abs() < 1e-6);
            }
        }
        assert!(local_integral(1.0, al(0.0)).is_err());
        assert!(faris_kprime(0.5, al(0.0)).is_err());
    }

    #[test]
    fn gaussian_instances() {
        let alpha = al(0.0);
        let grid = RadialGrid::new(alpha, 8.0, 512).unwrap();
        let f = RadialFunction::from_fn(&grid, gaussian);
        let empty = verify_local(&f, &IntervalSet::empty(), 0.5).unwrap();
        assert_eq!(empty.lhs, 0.0);
        assert!(empty.holds);
        let e = IntervalSet::interval(0.0, 1.0).unwrap();
        let c = verify_local(&f, &e, 0.5).unwrap();
        assert!(c.holds && c.ratio < 0.9, "{c:?}");
        // F_0 of the Gaussian is the Gaussian: ‖·‖²_{[0,1]} = (1 - e^{-2π}) / 2
        assert!((c.lhs - ((1.0 - (-2.0 * PI).exp()) / 2.0).sqrt()).abs() < 1e-10);
        let c2 = verify_local(&f, &e, 2.0).unwrap();
        assert_eq!(c2.regime, 2);
        assert!(c2.holds);
        assert!(verify_local(&f, &e, 1.0).is_err());
    }

    #[test]
    fn dilation_invariance() {
        let alpha = al(0.0);
        let grid = RadialGrid::new(alpha, 8.0, 512).unwrap();
        let f = RadialFunction::from_fn(&grid, gaussian);
        let f2 = RadialFunction::from_fn(&grid, |x| gaussian(2.0 * x));
        let e = IntervalSet::interval(0.5, 2.0).unwrap();
        let half = e.scale(0.5).unwrap();
        for s in [0.5, 2.0] {
            let r1 = verify_local(&f2, &e, s).unwrap().ratio;
            let r2 = verify_local(&f, &half, s).unwrap().ratio;
            assert!((r1 / r2 - 1.0).abs() < 1e-8, "s = {s}: {r1} vs {r2}");
        }
    }

    #[test]
    fn monotone_in_the_set() {
        let alpha = al(1.0);
        let grid = RadialGrid::new(alpha, 8.0, 512).unwrap();
        let f = RadialFunction::from_fn(&grid, |x| (1.0 + x * x) * gaussian(x));
        let small = IntervalSet::interval(0.3, 0.8).unwrap();
        let large = small.union(&IntervalSet::interval(1.5, 2.0).unwrap());
        for s in [0.7, 3.0] {
            let a = verify_local(&f, &small, s).unwrap();
            let b = verify_local(&f, &large, s).unwrap();
            assert!(a.lhs <= b.lhs && a.rhs <= b.rhs);
        }
    }

    #[test]
    fn small_sweeps_have_no_violations() {
        for (s, regime) in [(0.5, 1), (2.5, 2)] {
            let rep = local_sweep(al(0.5), s, 16, 3).unwrap();
            assert_eq!(rep.regime, regime);
            assert_eq!(rep.violations, 0);
            assert!(rep.worst_ratio > 0.0 && rep.worst_ratio < 1.0);
            assert_eq!(rep, local_sweep(al(0.5), s, 16, 3).unwrap());
        }
    }
}
