//! Time and frequency projections, the localization operator `F_Σ E_S`, its
//! norms, and the strong-annihilation certificate.
//!
//! Norms of `F_Σ E_S` are computed on its spectral factor
//! `B[i, k] = √w_i j_α(2π y_i x_k) √w_k` (rows `y_i ∈ Σ`, columns `x_k ∈ S`).
//! Since `F_α` is unitary, `F_Σ E_S = F_α (χ_Σ F_α χ_S)` has the same
//! singular values as `χ_Σ F_α χ_S`, and the factor avoids forming the
//! `n × n` composite.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::linalg;
use crate::measure::{lebesgue, IntervalSet};
use crate::quadrature::gauss_legendre;
use crate::spectral::{check_same_grid, OperatorMatrix, RadialFunction, RadialGrid};
use crate::specfun::{bessel_j, kappa_alpha, Alpha};

/// A grid whose panel boundaries include every endpoint of the given sets.
pub fn grid_for_sets(alpha: Alpha, radius: f64, n: usize, sets: &[&IntervalSet]) -> Result<Arc<RadialGrid>> {
    let breaks: Vec<f64> = sets.iter().flat_map(|s| s.endpoints()).collect();
    RadialGrid::with_breakpoints(alpha, radius, n, &breaks)
}

fn check_within(set: &IntervalSet, grid: &RadialGrid, name: &str) -> Result<()> {
    if set.sup() > grid.radius() * (1.0 + 1e-12) {
        return domain(format!("{name} = {set} exceeds the grid radius {}", grid.radius()));
    }
    Ok(())
}

/// `E_S f = χ_S f`.
pub fn project_time(f: &RadialFunction, s: &IntervalSet) -> RadialFunction {
    f.map(|x, v| if s.contains(x) { v } else { 0.0 })
}

/// `F_Σ f = F_α χ_Σ F_α f`, using the (self-inverse) transform matrix.
pub fn project_freq(f: &RadialFunction, sigma: &IntervalSet, hankel: &OperatorMatrix) -> Result<RadialFunction> {
    let ff = hankel.apply(f)?;
    hankel.apply(&project_time(&ff, sigma))
}

/// The matrix of `F_Σ E_S` on the grid of `hankel`.
pub fn composite_kernel(s: &IntervalSet, sigma: &IntervalSet, hankel: &OperatorMatrix) -> Result<OperatorMatrix> {
    let grid = hankel.in_grid();
    check_same_grid(grid, hankel.out_grid())?;
    check_within(s, grid, "S")?;
    check_within(sigma, grid, "Sigma")?;
    let chi_s = OperatorMatrix::diagonal(grid, |x| if s.contains(x) { 1.0 } else { 0.0 });
    let chi_sigma = OperatorMatrix::diagonal(grid, |x| if sigma.contains(x) { 1.0 } else { 0.0 });
    hankel.compose(&chi_sigma)?.compose(hankel)?.compose(&chi_s)
}

fn indices_in(grid: &RadialGrid, set: &IntervalSet) -> Vec<usize> {
    grid.nodes()
        .iter()
        .enumerate()
        .filter(|(_, &x)| set.contains(x))
        .map(|(i, _)| i)
        .collect()
}

/// The weighted spectral factor of `F_Σ E_S` (rows in `Σ`, columns in `S`),
/// together with the grid indices of its rows and columns.
pub fn spectral_factor(
    s: &IntervalSet,
    sigma: &IntervalSet,
    grid: &Arc<RadialGrid>,
) -> Result<(DMatrix<f64>, Vec<usize>, Vec<usize>)> {
    check_within(s, grid, "S")?;
    check_within(sigma, grid, "Sigma")?;
    let alpha = grid.alpha();
    let rows = indices_in(grid, sigma);
    let cols = indices_in(grid, s);
    let x = grid.nodes();
    let w = grid.weights();
    let b = DMatrix::from_fn(rows.len(), cols.len(), |i, k| {
        let (yi, xk) = (rows[i], cols[k]);
        (w[yi] * w[xk]).sqrt() * bessel_j(alpha, 2.0 * PI * x[yi] * x[xk])
    });
    Ok((b, rows, cols))
}

/// `(‖F_Σ E_S‖, ‖F_Σ E_S‖_HS)` on `L²_α`.
pub fn localization_norms(s: &IntervalSet, sigma: &IntervalSet, grid: &Arc<RadialGrid>) -> Result<(f64, f64)> {
    let (b, _, _) = spectral_factor(s, sigma, grid)?;
    let op = linalg::sigma_max(&b, linalg::POWER_TOL, linalg::POWER_MAX_ITER)?;
    Ok((op, linalg::frobenius(&b)))
}

/// A unit-norm function supported in `S` that (nearly) maximizes
/// `‖F_Σ f‖ / ‖f‖`: the top right singular vector of the spectral factor.
pub fn most_concentrated(s: &IntervalSet, sigma: &IntervalSet, grid: &Arc<RadialGrid>) -> Result<RadialFunction> {
    let (b, _, cols) = spectral_factor(s, sigma, grid)?;
    let v = linalg::top_right_singular_vector(&b, linalg::POWER_TOL, linalg::POWER_MAX_ITER)?;
    let mut values = vec![0.0; grid.len()];
    for (k, &idx) in cols.iter().enumerate() {
        values[idx] = v[k] / grid.weights()[idx].sqrt();
    }
    RadialFunction::new(Arc::clone(grid), values)
}

/// `κ_α √(2π |S| |Σ|)`, the Hilbert–Schmidt bound.
pub fn hs_bound(alpha: Alpha, s: &IntervalSet, sigma: &IntervalSet) -> f64 {
    kappa_alpha(alpha) * (2.0 * PI * lebesgue(s) * lebesgue(sigma)).sqrt()
}

/// `2π κ_α² |S| |Σ|`; the HS bound is below 1 exactly when this is.
pub fn smallness(alpha: Alpha, s: &IntervalSet, sigma: &IntervalSet) -> f64 {
    let k = kappa_alpha(alpha);
    2.0 * PI * k * k * lebesgue(s) * lebesgue(sigma)
}

/// `(2π)^{2α+2} ∬_{S×Σ} |j_α(2πxy)|² (xy)^{2α+1} dx dy` by tensor
/// Gauss–Legendre panels of width at most `1 / (16 max(sup S, sup Σ, 1))`.
/// Its square root is `‖F_Σ E_S‖_HS`; shares no nodes with the grids.
pub fn hs_double_quadrature(alpha: Alpha, s: &IntervalSet, sigma: &IntervalSet) -> f64 {
    let top = s.sup().max(sigma.sup()).max(1.0);
    let width = 1.0 / (16.0 * top);
    let rule = gauss_legendre(16);
    let expo = 2.0 * alpha.value() + 1.0;
    let points = |set: &IntervalSet| -> Vec<(f64, f64)> {
        let mut pts = Vec::new();
        for &(lo, hi) in set.intervals() {
            let pieces = ((hi - lo) / width).ceil().max(1.0) as usize;
            let h = (hi - lo) / pieces as f64;
            for p in 0..pieces {
                let a = lo + h * p as f64;
                pts.extend(rule.mapped(a, a + h).map(|(x, w)| (x, w * x.powf(expo))));
            }
        }
        pts
    };
    let xs = points(s);
    let ys = points(sigma);
    let mut total = 0.0;
    for &(x, wx) in &xs {
        let mut row = 0.0;
        for &(y, wy) in &ys {
            let j = bessel_j(alpha, 2.0 * PI * x * y);
            row += wy * j * j;
        }
        total += wx * row;
    }
    alpha.measure_prefactor().powi(2) * total
}

/// The constants of the annihilation equivalence for a given
/// `‖F_Σ E_S‖ < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnihilationConstants {
    pub norm: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

/// `D = (1 - ‖F_Σ E_S‖)^{-1}` and `C = 1 + D`.
///
/// A norm of 1 or more yields [`Error::Precondition`]: at this resolution
/// there is no certificate, which is not evidence that none exists.
pub fn annihilation_constants(norm: f64) -> Result<AnnihilationConstants> {
    if !(norm >= 0.0) {
        return domain(format!("operator norm must be nonnegative, got {norm}"));
    }
    if norm >= 1.0 {
        return Err(Error::Precondition(format!(
            "no certificate at this resolution: ||F_Sigma E_S|| = {norm} >= 1"
        )));
    }
    let d = 1.0 / (1.0 - norm);
    Ok(AnnihilationConstants { norm, d, c: 1.0 + d })
}

/// `1 + (1 - κ_α √(2π|S||Σ|))^{-1}`, valid when `2π κ_α² |S||Σ| < 1`.
pub fn small_set_constant(alpha: Alpha, s: &IntervalSet, sigma: &IntervalSet) -> Result<f64> {
    let h = hs_bound(alpha, s, sigma);
    if h >= 1.0 {
        return Err(Error::Precondition(format!(
            "2π κ² |S| |Σ| = {} is not below 1",
            smallness(alpha, s, sigma)
        )));
    }
    Ok(1.0 + 1.0 / (1.0 - h))
}

/// One evaluation of `‖f‖ ≤ C (‖f‖_{L²_α(S^c)} + ‖F_α f‖_{L²_α(Σ^c)})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrongCheck {
    pub norm: f64,
    pub outside_s: f64,
    pub outside_sigma: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluates the strong-annihilation inequality for `f` with constant `c`,
/// with `1e-6` relative slack. The frequency tail is obtained through
/// Plancherel, `‖F f‖²_{Σ^c} = ‖f‖² - ‖χ_Σ F f‖²`, so it does not depend
/// on truncating `F f` to the grid radius.
pub fn verify_strong_annihilation(
    f: &RadialFunction,
    s: &IntervalSet,
    sigma: &IntervalSet,
    c: f64,
) -> Result<StrongCheck> {
    let grid = f.grid();
    check_within(sigma, grid, "Sigma")?;
    let alpha = f.alpha();
    let norm = f.l2();
    let outside_s = f.map(|x, v| if s.contains(x) { 0.0 } else { v }).l2();
    let rows = indices_in(grid, sigma);
    let nodes = grid.nodes();
    let w = grid.weights();
    let mut inside = 0.0;
    for &i in &rows {
        let y = nodes[i];
        let ff: f64 = nodes
            .iter()
            .zip(w)
            .zip(f.values())
            .map(|((&x, &wx), &v)| wx * v * bessel_j(alpha, 2.0 * PI * x * y))
            .sum();
        inside += w[i] * ff * ff;
    }
    let outside_sigma = (norm * norm - inside).max(0.0).sqrt();
    let rhs = c * (outside_s + outside_sigma);
    Ok(StrongCheck {
        norm,
        outside_s,
        outside_sigma,
        rhs,
        holds: norm <= rhs + 1e-6 * norm,
    })
}

/// Smallest eigenvalue of the `L²_α` Gram matrix of the dilates
/// `δ_λ f`, `λ ∈ lambdas`.
pub fn dilate_gram(f: &RadialFunction, lambdas: &[f64]) -> Result<f64> {
    if lambdas.is_empty() {
        return domain("at least one dilation factor is required");
    }
    for (i, a) in lambdas.iter().enumerate() {
        if lambdas[..i].iter().any(|b| (a - b).abs() <= 1e-14 * a.abs()) {
            return domain(format!("duplicate dilation factor {a}"));
        }
    }
    let dilates = lambdas
        .iter()
        .map(|&l| f.dilate(l).map(|(d, _)| d))
        .collect::<Result<Vec<_>>>()?;
    let n = dilates.len();
    let mut gram = DMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..=i {
            let g = dilates[i].inner(&dilates[k])?;
            gram[(i, k)] = g;
            gram[(k, i)] = g;
        }
    }
    Ok(linalg::min_symmetric_eigenvalue(&gram))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::hankel_matrix;

    fn al(a: f64) -> Alpha {
        Alpha::new(a).unwrap()
    }

    fn set(pairs: &[(f64, f64)]) -> IntervalSet {
        IntervalSet::new(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn time_projection_examples() {
        let g = RadialGrid::new(al(0.0), 4.0, 64).unwrap();
        let f = RadialFunction::from_fn(&g, |x| 1.0 + x);
        assert_eq!(project_time(&f, &set(&[(0.0, 4.0)])).values(), f.values());
        assert_eq!(project_time(&f, &IntervalSet::empty()).sup_norm(), 0.0);
        let s = set(&[(1.0, 2.0)]);
        let once = project_time(&f, &s);
        assert_eq!(project_time(&once, &s).values(), once.values());
    }

    #[test]
    fn frequency_projection_examples() {
        let g = RadialGrid::new(al(0.5), 8.0, 512).unwrap();
        let h = hankel_matrix(&g, &g).unwrap();
        let f = RadialFunction::from_fn(&g, |x| (-PI * x * x).exp() * (1.0 + x * x));
        let full = project_freq(&f, &set(&[(0.0, 8.0)]), &h).unwrap();
        assert!(full.sub(&f).unwrap().sup_norm() < 1e-6);
        assert!(project_freq(&f, &IntervalSet::empty(), &h).unwrap().sup_norm() == 0.0);
        let part = project_freq(&f, &set(&[(0.5, 1.0)]), &h).unwrap();
        assert!(part.l2() <= f.l2() * (1.0 + 1e-6));
    }

    #[test]
    fn composite_matrix_and_factor_agree() {
        let s = set(&[(0.5, 1.25)]);
        let sigma = set(&[(0.0, 0.75)]);
        let g = grid_for_sets(al(0.0), 8.0, 512, &[&s, &sigma]).unwrap();
        let h = hankel_matrix(&g, &g).unwrap();
        let m = composite_kernel(&s, &sigma, &h).unwrap();
        let (op, hs) = localization_norms(&s, &sigma, &g).unwrap();
        // The n × n composite loses the part of F_α(χ_Σ g) beyond R, so its
        // norms sit slightly below the truncation-free factor norms.
        let full = m.op_norm().unwrap();
        assert!(full <= op * (1.0 + 1e-9) && full > 0.99 * op, "{full} vs {op}");
        assert!(m.hs_norm() <= hs * (1.0 + 1e-9) && m.hs_norm() > 0.99 * hs);
        assert!(op <= hs * (1.0 + 1e-12));
        let f = RadialFunction::from_fn(&g, |x| (x * 3.0).sin() * (-x).exp());
        let direct = project_freq(&project_time(&f, &s), &sigma, &h).unwrap();
        let via = m.apply(&f).unwrap();
        assert!(direct.sub(&via).unwrap().sup_norm() < 1e-8);
        let too_big = set(&[(0.0, 9.0)]);
        assert!(composite_kernel(&too_big, &sigma, &h).is_err());
    }

    #[test]
    fn empty_sets_give_zero_operator() {
        let g = RadialGrid::new(al(1.0), 4.0, 64).unwrap();
        let (op, hs) = localization_norms(&IntervalSet::empty(), &set(&[(0.0, 1.0)]), &g).unwrap();
        assert_eq!((op, hs), (0.0, 0.0));
    }

    #[test]
    fn hs_norm_matches_double_quadrature() {
        for &a in &[0.0, 1.0] {
            let s = set(&[(0.2, 0.7), (1.5, 1.6)]);
            let sigma = set(&[(0.1, 0.9)]);
            let g = grid_for_sets(al(a), 8.0, 1024, &[&s, &sigma]).unwrap();
            let (_, hs) = localization_norms(&s, &sigma, &g).unwrap();
            let oracle = hs_double_quadrature(al(a), &s, &sigma).sqrt();
            assert!((hs - oracle).abs() < 1e-8 * oracle, "{hs} vs {oracle}");
            assert!(hs <= hs_bound(al(a), &s, &sigma) * (1.0 + 1e-3));
        }
    }

    #[test]
    fn constants_examples() {
        let c0 = annihilation_constants(0.0).unwrap();
        assert_eq!((c0.d, c0.c), (1.0, 2.0));
        let c5 = annihilation_constants(0.5).unwrap();
        assert_eq!((c5.d, c5.c), (2.0, 3.0));
        assert!(matches!(annihilation_constants(1.0), Err(Error::Precondition(_))));
        let s = set(&[(0.0, 0.1)]);
        let sigma = set(&[(0.0, 0.2)]);
        let g = grid_for_sets(al(0.0), 8.0, 512, &[&s, &sigma]).unwrap();
        let (op, _) = localization_norms(&s, &sigma, &g).unwrap();
        let c = annihilation_constants(op).unwrap().c;
        assert!(c <= small_set_constant(al(0.0), &s, &sigma).unwrap());
    }

    #[test]
    fn strong_annihilation_examples() {
        let s = set(&[(0.0, 1.0)]);
        let sigma = set(&[(0.0, 1.0)]);
        let g = grid_for_sets(al(0.0), 8.0, 1024, &[&s, &sigma]).unwrap();
        let (op, _) = localization_norms(&s, &sigma, &g).unwrap();
        let c = annihilation_constants(op).unwrap().c;
        let gauss = RadialFunction::from_fn(&g, |x| (-PI * x * x).exp());
        assert!(verify_strong_annihilation(&gauss, &s, &sigma, c).unwrap().holds);
        let outside = RadialFunction::from_fn(&g, |x| if x >= 1.0 { (-x).exp() } else { 0.0 });
        let r = verify_strong_annihilation(&outside, &s, &sigma, c).unwrap();
        assert!(r.holds);
        assert!((r.outside_s - r.norm).abs() < 1e-12);
        let best = most_concentrated(&s, &sigma, &g).unwrap();
        assert!((best.l2() - 1.0).abs() < 1e-10);
        assert!(verify_strong_annihilation(&best, &s, &sigma, c).unwrap().holds);
    }

    #[test]
    fn gram_examples() {
        let g = RadialGrid::new(al(0.0), 16.0, 2048).unwrap();
        let f = RadialFunction::from_fn(&g, |x| (-PI * x * x).exp());
        let single = dilate_gram(&f, &[1.0]).unwrap();
        assert!((single - f.l2().powi(2)).abs() < 1e-12);
        let pair = dilate_gram(&f, &[1.0, 2.0]).unwrap();
        assert!(pair > 0.0);
        assert!(dilate_gram(&f, &[1.0, 1.0]).is_err());
    }
}
