//! End-to-end checks assembled from the numerical modules. Each returns a
//! serializable report; the CLI writes them to disk and the acceptance suite
//! asserts on them.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::localization::{
    annihilation_constants, grid_for_sets, hs_bound, localization_norms, most_concentrated,
    verify_strong_annihilation,
};
use crate::lpdecomp::{LittlewoodPaley, LpReport};
use crate::measure::IntervalSet;
use crate::spectral::{hankel_transform, heisenberg_constant, heisenberg_ratio, RadialFunction, RadialGrid};
use crate::specfun::{bessel_j, j_at_zero, Alpha};
use crate::thinsets::make_thin_example;
use crate::translation::{translate_value, translate_via_kernel};
use crate::zoo::{gaussian, SmoothSum, TestFunction};

/// Transform diagnostics for one function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformReport {
    pub alpha: f64,
    pub f: TestFunction,
    #[serde(rename = "R")]
    pub radius: f64,
    pub n: usize,
    /// `|‖F_α f‖ - ‖f‖| / ‖f‖`.
    pub plancherel_error: f64,
    /// `‖F_α F_α f - f‖ / ‖f‖`.
    pub roundtrip_error: f64,
    /// `sup_{y ≤ 4} |F_α f(y) - e^{-π y²}|`, for the Gaussian only.
    pub gaussian_error: Option<f64>,
}

impl TransformReport {
    pub fn passes(&self) -> bool {
        self.plancherel_error <= 1e-6 && self.roundtrip_error <= 1e-5 && self.gaussian_error.is_none_or(|e| e <= 1e-6)
    }
}

/// Transforms `f` sampled on `(R, n)` and returns the function, its
/// transform and the diagnostics.
pub fn transform_check(
    alpha: Alpha,
    f: TestFunction,
    radius: f64,
    n: usize,
) -> Result<(RadialFunction, RadialFunction, TransformReport)> {
    let grid = RadialGrid::new(alpha, radius, n)?;
    let fx = RadialFunction::from_fn(&grid, |x| f.eval(alpha, x));
    let ff = hankel_transform(&fx, &grid)?;
    let back = hankel_transform(&ff, &grid)?;
    let norm = fx.l2();
    let gaussian_error = (f == TestFunction::Gaussian).then(|| {
        grid.nodes()
            .iter()
            .zip(ff.values())
            .filter(|(&y, _)| y <= 4.0)
            .map(|(&y, &v)| (v - gaussian(y)).abs())
            .fold(0.0, f64::max)
    });
    let report = TransformReport {
        alpha: alpha.value(),
        f,
        radius,
        n,
        plancherel_error: (ff.l2() - norm).abs() / norm,
        roundtrip_error: back.sub(&fx)?.l2() / norm,
        gaussian_error,
    };
    Ok((fx, ff, report))
}

/// Relative isometry error `|‖F_α f‖ - ‖f‖| / ‖f‖` for a sampled `f`.
pub fn plancherel_error(f: &RadialFunction) -> Result<f64> {
    let ff = hankel_transform(f, f.grid())?;
    Ok((ff.l2() - f.l2()).abs() / f.l2())
}

/// Product formula and kernel mass on fixed and random points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductFormulaReport {
    pub alpha: f64,
    pub points: usize,
    /// `max |T_x j_α(λ·)(y) - j_α(λx) j_α(λy)|`.
    pub literal_error: f64,
    /// `max |T_x j_α(λ·)(y) - j_α(λx) j_α(λy) / j_α(0)|`.
    pub normalized_error: f64,
    /// `max |∫ W(x, y, t) dμ_α(t) - 1|` over random `(x, y)`.
    pub kernel_mass_error: f64,
    pub mass_points: usize,
}

impl ProductFormulaReport {
    pub fn passes(&self) -> bool {
        self.normalized_error <= 1e-6 && self.kernel_mass_error <= 1e-6
    }
}

pub const PRODUCT_LAMBDAS: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

/// `T_x j_α(λ·)(y)` on the `10 × 10 × 4` grid `x, y ∈ {0.3, 0.6, …, 3}`,
/// `λ ∈ {0.5, 1, 2, 4}`, and `∫ W dμ_α` at `mass_points` random `(x, y)`.
pub fn product_formula_suite(alpha: Alpha, mass_points: usize, seed: u64) -> ProductFormulaReport {
    let j0 = j_at_zero(alpha);
    let mut cases = Vec::with_capacity(400);
    for i in 1..=10 {
        for k in 1..=10 {
            for &lambda in &PRODUCT_LAMBDAS {
                cases.push((0.3 * i as f64, 0.3 * k as f64, lambda));
            }
        }
    }
    let errors: Vec<(f64, f64)> = cases
        .par_iter()
        .map(|&(x, y, lambda)| {
            let t = translate_value(alpha, |r| bessel_j(alpha, lambda * r), x, y, &[], f64::INFINITY);
            let product = bessel_j(alpha, lambda * x) * bessel_j(alpha, lambda * y);
            ((t - product).abs(), (t - product / j0).abs())
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mass_error = (0..mass_points)
        .map(|_| {
            let x = rng.gen_range(0.01..3.0);
            let y = rng.gen_range(0.01..3.0);
            (translate_via_kernel(alpha, |_| 1.0, x, y, 32) - 1.0).abs()
        })
        .fold(0.0, f64::max);
    ProductFormulaReport {
        alpha: alpha.value(),
        points: cases.len(),
        literal_error: errors.iter().map(|e| e.0).fold(0.0, f64::max),
        normalized_error: errors.iter().map(|e| e.1).fold(0.0, f64::max),
        kernel_mass_error: mass_error,
        mass_points,
    }
}

/// Norms, constants and the randomized inequality check for a pair `(S, Σ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnihilationReport {
    pub alpha: f64,
    #[serde(rename = "S")]
    pub s: IntervalSet,
    #[serde(rename = "Sigma")]
    pub sigma: IntervalSet,
    #[serde(rename = "R")]
    pub radius: f64,
    pub n: usize,
    pub op_norm: f64,
    pub hs_norm: f64,
    pub hs_bound: f64,
    #[serde(rename = "D")]
    pub d: Option<f64>,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub instances: usize,
    pub violations: usize,
    /// Largest `‖f‖ / (C (‖f‖_{S^c} + ‖F_α f‖_{Σ^c}))` seen.
    pub worst_ratio: Option<f64>,
}

impl AnnihilationReport {
    pub fn passes(&self) -> bool {
        self.c.is_some() && self.violations == 0
    }
}

/// Measures `‖F_Σ E_S‖` and, when it is below 1, tests
/// `‖f‖ ≤ C (‖f‖_{S^c} + ‖F_α f‖_{Σ^c})` on `instances` functions mixing the
/// most concentrated function with random smooth ones.
pub fn annihilation_experiment(
    alpha: Alpha,
    s: &IntervalSet,
    sigma: &IntervalSet,
    radius: f64,
    n: usize,
    instances: usize,
    seed: u64,
) -> Result<AnnihilationReport> {
    let grid = grid_for_sets(alpha, radius, n, &[s, sigma])?;
    let (op_norm, hs_norm) = localization_norms(s, sigma, &grid)?;
    let mut report = AnnihilationReport {
        alpha: alpha.value(),
        s: s.clone(),
        sigma: sigma.clone(),
        radius,
        n,
        op_norm,
        hs_norm,
        hs_bound: hs_bound(alpha, s, sigma),
        d: None,
        c: None,
        instances,
        violations: 0,
        worst_ratio: None,
    };
    let constants = match annihilation_constants(op_norm) {
        Ok(c) => c,
        Err(Error::Precondition(_)) => return Ok(report),
        Err(e) => return Err(e),
    };
    report.d = Some(constants.d);
    report.c = Some(constants.c);
    let top = if s.is_empty() || sigma.is_empty() { None } else { Some(most_concentrated(s, sigma, &grid)?) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<(f64, SmoothSum)> = (0..instances).map(|_| (rng.gen_range(0.0..1.0), SmoothSum::random(&mut rng))).collect();
    let checks = cases
        .par_iter()
        .map(|(mix, g)| {
            let g = RadialFunction::from_fn(&grid, |x| g.eval(x));
            let g = g.scale(1.0 / g.l2());
            let f = match &top {
                Some(v) => v.scale(*mix).add(&g.scale(1.0 - mix))?,
                None => g,
            };
            verify_strong_annihilation(&f, s, sigma, constants.c)
        })
        .collect::<Result<Vec<_>>>()?;
    report.violations = checks.iter().filter(|c| !c.holds).count();
    report.worst_ratio = Some(checks.iter().map(|c| c.norm / c.rhs).fold(0.0, f64::max));
    Ok(report)
}

/// Heisenberg ratio of one function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeisenbergReport {
    pub alpha: f64,
    pub f: TestFunction,
    pub constant: f64,
    pub ratio: f64,
}

impl HeisenbergReport {
    pub fn passes(&self) -> bool {
        self.ratio >= 1.0 - 1e-4
    }
}

pub fn heisenberg_check(
    alpha: Alpha,
    f: TestFunction,
    radius: f64,
    n: usize,
) -> Result<(RadialFunction, RadialFunction, HeisenbergReport)> {
    let grid = RadialGrid::new(alpha, radius, n)?;
    let fx = RadialFunction::from_fn(&grid, |x| f.eval(alpha, x));
    let ff = hankel_transform(&fx, &grid)?;
    let ratio = heisenberg_ratio(&fx, &ff)?;
    Ok((fx, ff, HeisenbergReport { alpha: alpha.value(), f, constant: heisenberg_constant(alpha), ratio }))
}

/// The thin-set experiment across an ε-sweep on the example family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSweep {
    pub alpha: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    pub n: usize,
    pub c: f64,
    pub kmin: u64,
    pub kmax: u64,
    pub runs: Vec<LpReport>,
    /// `schur_A_on_S(2ε) / schur_A_on_S(ε)` for consecutive doublings.
    pub schur_doubling_ratios: Vec<f64>,
    /// The composite bound decreases with ε.
    pub monotone: bool,
}

impl LpSweep {
    pub fn passes(&self) -> bool {
        let smallest = self.runs.iter().min_by(|a, b| a.eps.total_cmp(&b.eps));
        self.monotone && smallest.is_some_and(|r| r.certificate_c.is_some())
    }
}

/// `10 (2π)^{α+1}`, the default constant of the example family.
pub fn default_thin_c(alpha: Alpha) -> f64 {
    10.0 * (2.0 * PI).powf(alpha.beta())
}

/// Runs [`LittlewoodPaley::thin_schur_experiment`] with `S = Σ` the example
/// family at each ε.
pub fn lp_sweep(
    alpha: Alpha,
    radius: f64,
    n: usize,
    eps: &[f64],
    c: f64,
    kmin: u64,
    kmax: u64,
) -> Result<LpSweep> {
    let lp = LittlewoodPaley::new(alpha, radius)?;
    let mut sorted = eps.to_vec();
    sorted.sort_by(f64::total_cmp);
    let runs = sorted
        .iter()
        .map(|&e| {
            let set = make_thin_example(e, c, kmin, kmax)?;
            let grid = grid_for_sets(alpha, radius, n, &[&set])?;
            lp.thin_schur_experiment(&set, &set, e, &grid)
        })
        .collect::<Result<Vec<_>>>()?;
    let schur_doubling_ratios = runs
        .windows(2)
        .filter(|w| (w[1].eps / w[0].eps - 2.0).abs() < 1e-9)
        .map(|w| w[1].schur_a_on_s / w[0].schur_a_on_s)
        .collect();
    let monotone = runs.windows(2).all(|w| w[0].composite_bound < w[1].composite_bound);
    Ok(LpSweep { alpha: alpha.value(), radius, n, c, kmin, kmax, runs, schur_doubling_ratios, monotone })
}
