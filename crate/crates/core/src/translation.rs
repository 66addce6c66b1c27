//! Generalized translation `T_x^α`, its kernel `W`, and Bessel convolution.
//!
//! `T_x f(y) = c ∫_0^π f(r(θ)) sin^{2α}θ dθ` with
//! `r(θ)² = (x - y)² + 4xy sin²(θ/2)` and `c = Γ(α+1)/(√π Γ(α+1/2))`.
//! The θ-integral is split wherever `r(θ)` crosses a breakpoint of `f`, so
//! piecewise-smooth inputs are integrated panel by panel.
//!
//! `T_0` is the identity, so the translation diagonalizes against the
//! normalized kernel `j_α / j_α(0)`:
//! `T_x j_α(λ·)(y) = j_α(λx) j_α(λy) / j_α(0)`.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::Result;
use crate::quadrature::endpoint_composite;
use crate::spectral::{check_same_grid, RadialFunction, RadialGrid};
use crate::specfun::{gamma, Alpha};

const THETA_NODES: usize = 20;
const MAX_THETA_PANEL: f64 = PI / 8.0;

/// `Γ(α+1) / (√π Γ(α+1/2))`, the normalization of the θ-integral.
pub fn theta_constant(alpha: Alpha) -> f64 {
    let a = alpha.value();
    gamma(a + 1.0).unwrap() / (PI.sqrt() * gamma(a + 0.5).unwrap())
}

/// The constant in front of `Δ^{2α-1} / (xyt)^{2α}` that makes
/// `W(x, y, ·) dμ_α` a probability measure.
pub fn w_constant(alpha: Alpha) -> f64 {
    let a = alpha.value();
    theta_constant(alpha) * 2f64.powf(1.0 - 2.0 * a) / alpha.measure_prefactor()
}

/// `Δ(x, y, t)`: four times the area of the triangle with sides `x, y, t`.
pub fn triangle_delta(x: f64, y: f64, t: f64) -> f64 {
    let s = x + y;
    let d = (x - y).abs();
    ((s - t) * (s + t) * (t - d) * (t + d)).max(0.0).sqrt()
}

/// The translation kernel `W(x, y, t)`; zero unless `|x - y| < t < x + y`.
pub fn kernel_w(alpha: Alpha, x: f64, y: f64, t: f64) -> f64 {
    if !(t > (x - y).abs() && t < x + y) {
        return 0.0;
    }
    let a = alpha.value();
    w_constant(alpha) * triangle_delta(x, y, t).powf(2.0 * a - 1.0) / (x * y * t).powf(2.0 * a)
}

/// `T_x f(y)` for a function `f` that vanishes beyond `support` and is smooth
/// between consecutive points of `r_breaks`.
pub fn translate_value(
    alpha: Alpha,
    f: impl Fn(f64) -> f64,
    x: f64,
    y: f64,
    r_breaks: &[f64],
    support: f64,
) -> f64 {
    let top = x + y;
    if x == 0.0 || y == 0.0 {
        return if top <= support { f(top) } else { 0.0 };
    }
    let d = (x - y).abs();
    if d >= support {
        return 0.0;
    }
    let xy4 = 4.0 * x * y;
    let d2 = d * d;
    let theta_of_r = |r: f64| 2.0 * ((r * r - d2) / xy4).clamp(0.0, 1.0).sqrt().asin();
    let end = if top > support { theta_of_r(support) } else { PI };
    if !(end > 0.0) {
        return 0.0;
    }

    let mut breaks: Vec<f64> = r_breaks
        .iter()
        .filter(|&&r| r > d && r < top.min(support))
        .map(|&r| theta_of_r(r))
        .collect();
    // r(θ) bends on the scale θ ~ d/√(xy); grade geometrically toward it.
    let bend = d / (x * y).sqrt();
    if bend > 0.0 {
        let mut t = bend;
        while t < end.min(1.0) {
            breaks.push(t);
            t *= 4.0;
        }
    }
    let pieces = (end / MAX_THETA_PANEL).ceil().max(2.0) as usize;
    breaks.extend((1..pieces).map(|k| end * k as f64 / pieces as f64));

    let two_a = 2.0 * alpha.value();
    let integrand = |theta: f64| {
        let s = (0.5 * theta).sin();
        let r = (d2 + xy4 * s * s).sqrt();
        if two_a == 0.0 {
            return f(r);
        }
        let smooth = theta.sin() / (theta * (PI - theta));
        f(r) * smooth.powf(two_a)
    };
    let integral = endpoint_composite(0.0, end, PI, two_a, two_a, &breaks, THETA_NODES, integrand)
        .expect("θ-panels are well formed");
    theta_constant(alpha) * integral
}

/// `T_x f(y)` through the kernel `W`, after the substitution `u = t²`.
///
/// Independent of [`translate_value`]; meant as a cross-check for functions
/// that are smooth in `t²`.
pub fn translate_via_kernel(alpha: Alpha, f: impl Fn(f64) -> f64, x: f64, y: f64, nodes: usize) -> f64 {
    if x == 0.0 || y == 0.0 {
        return f(x + y);
    }
    let a = alpha.value();
    let lo = (x - y).powi(2);
    let hi = (x + y).powi(2);
    let e = a - 0.5;
    let integral = endpoint_composite(lo, hi, hi, e, e, &[], nodes, |u| f(u.sqrt()))
        .expect("kernel panel is well formed");
    w_constant(alpha) * alpha.measure_prefactor() * (x * y).powf(-2.0 * a) * 0.5 * integral
}

/// Index of the last node carrying a non-negligible sample of `f`.
fn support_end(f: &RadialFunction) -> f64 {
    let scale = f.sup_norm();
    f.grid()
        .nodes()
        .iter()
        .zip(f.values())
        .filter(|(_, v)| v.abs() > 1e-12 * scale)
        .map(|(&x, _)| x)
        .fold(0.0, f64::max)
}

/// `T_x f` sampled on the grid of `f`. The flag reports that `x + supp f`
/// leaves `[0, R]`, so part of the translate is lost to truncation.
pub fn translate(f: &RadialFunction, x: f64) -> Result<(RadialFunction, bool)> {
    if !(x >= 0.0 && x.is_finite()) {
        return crate::error::domain(format!("translation amount must be >= 0, got {x}"));
    }
    let grid = f.grid();
    let edges = grid.panel_edges();
    let radius = grid.radius();
    let alpha = f.alpha();
    let values: Vec<f64> = if x == 0.0 {
        f.values().to_vec()
    } else {
        grid.nodes()
            .par_iter()
            .map(|&y| translate_value(alpha, |r| f.eval(r), x, y, &edges, radius))
            .collect()
    };
    let truncated = x + support_end(f) > radius * (1.0 + 1e-12);
    Ok((RadialFunction::new(Arc::clone(grid), values)?, truncated))
}

/// `(f ∗_α g)(x) = ∫ f(t) T_x g(t) dμ_α(t)` on the shared grid.
pub fn convolve(f: &RadialFunction, g: &RadialFunction) -> Result<RadialFunction> {
    check_same_grid(f.grid(), g.grid())?;
    let grid: &Arc<RadialGrid> = f.grid();
    let edges = grid.panel_edges();
    let radius = grid.radius();
    let alpha = f.alpha();
    let nodes = grid.nodes();
    let weights = grid.weights();
    let values: Vec<f64> = nodes
        .par_iter()
        .map(|&x| {
            nodes
                .iter()
                .zip(weights)
                .zip(f.values())
                .filter(|(_, &fv)| fv != 0.0)
                .map(|((&t, &w), &fv)| w * fv * translate_value(alpha, |r| g.eval(r), x, t, &edges, radius))
                .sum()
        })
        .collect();
    RadialFunction::new(Arc::clone(grid), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{bessel_j, j_at_zero};

    fn al(a: f64) -> Alpha {
        Alpha::new(a).unwrap()
    }

    /// Double-exponential quadrature over `(a, b)`, used as an oracle that
    /// shares no code with the Gauss rules. `g` receives the node together
    /// with its exact distances to both endpoints, so endpoint singularities
    /// are resolved without cancellation.
    fn tanh_sinh(g: impl Fn(f64, f64, f64) -> f64, a: f64, b: f64) -> f64 {
        let h = 1.0 / 64.0;
        let half = 0.5 * (b - a);
        let mut sum = 0.0;
        for k in -400i32..=400 {
            let t = k as f64 * h;
            let u = 0.5 * PI * t.sinh();
            let c = u.cosh();
            let w = 0.5 * PI * t.cosh() / (c * c);
            let near = half / (u.abs().exp() * c);
            if near <= 0.0 {
                continue;
            }
            let far = 2.0 * half - near;
            let (x, da, db) = if u < 0.0 { (a + near, near, far) } else { (b - near, far, near) };
            sum += w * g(x, da, db);
        }
        sum * h * half
    }

    #[test]
    fn kernel_vanishes_outside_the_triangle_range() {
        let a = al(0.7);
        assert_eq!(kernel_w(a, 1.0, 2.0, 3.0), 0.0);
        assert_eq!(kernel_w(a, 1.0, 2.0, 1.0), 0.0);
        assert_eq!(kernel_w(a, 1.0, 2.0, 3.5), 0.0);
        assert!(kernel_w(a, 1.0, 2.0, 2.0) > 0.0);
        assert_eq!(kernel_w(a, 1.3, 0.4, 1.1), kernel_w(a, 0.4, 1.3, 1.1));
    }

    #[test]
    fn kernel_is_a_probability_density() {
        for &a in &[-0.3, 0.0, 0.5, 1.0, 2.5] {
            let alpha = al(a);
            for &(x, y) in &[(1.0f64, 2.0f64), (0.3, 0.35), (5.0, 0.1), (2.0, 2.0)] {
                let lo = (x - y).abs();
                let hi = x + y;
                // W written with Δ² = (hi - t)(hi + t)(t - lo)(t + lo)
                // in logarithms, so that tiny endpoint distances do not overflow
                let density = |t: f64, da: f64, db: f64| {
                    let ln_delta = 0.5 * (db.ln() + (hi + t).ln() + da.ln() + (t + lo).ln());
                    (w_constant(alpha).ln() + (2.0 * a - 1.0) * ln_delta
                        - 2.0 * a * (x * y).ln()
                        + t.ln()
                        + alpha.measure_prefactor().ln())
                    .exp()
                };
                let mass = tanh_sinh(density, lo, hi);
                assert!((mass - 1.0).abs() < 1e-8, "a={a} x={x} y={y}: {mass}");
                let mid = 0.5 * (lo + hi);
                assert!((density(mid, mid - lo, hi - mid)
                    - kernel_w(alpha, x, y, mid) * alpha.measure_prefactor() * mid.powf(2.0 * a + 1.0))
                .abs()
                    < 1e-12 * density(mid, mid - lo, hi - mid));
            }
        }
    }

    #[test]
    fn product_formula_for_bessel_kernel() {
        for &a in &[-0.3, 0.0, 1.0, 2.5] {
            let alpha = al(a);
            for &lambda in &[1.0, 7.5] {
                let f = |r: f64| bessel_j(alpha, lambda * r);
                let breaks: Vec<f64> = (1..200).map(|k| 0.1 * k as f64).collect();
                for &(x, y) in &[(0.5, 0.7), (1.3, 1.3), (3.0, 0.2), (2.0, 1.999)] {
                    let got = translate_value(alpha, f, x, y, &breaks, f64::INFINITY);
                    let want = bessel_j(alpha, lambda * x) * bessel_j(alpha, lambda * y) / j_at_zero(alpha);
                    assert!((got - want).abs() < 1e-10, "a={a} λ={lambda} x={x} y={y} {got} {want}");
                }
            }
        }
    }

    #[test]
    fn theta_and_kernel_paths_agree() {
        for &a in &[-0.3, 0.0, 0.5, 2.0] {
            let alpha = al(a);
            let f = |r: f64| (-PI * 0.8 * r * r).exp() * (1.0 + r * r);
            for &(x, y) in &[(0.4, 0.9), (1.5, 1.2), (2.0, 0.05)] {
                let theta = translate_value(alpha, f, x, y, &[], f64::INFINITY);
                let kernel = translate_via_kernel(alpha, f, x, y, 40);
                assert!((theta - kernel).abs() < 1e-12, "a={a} x={x} y={y}");
            }
        }
    }

    #[test]
    fn zero_shift_is_identity() {
        let g = RadialGrid::new(al(0.5), 4.0, 64).unwrap();
        let f = RadialFunction::from_fn(&g, |x| (-x * x).exp());
        let (t, flag) = translate(&f, 0.0).unwrap();
        assert_eq!(t.values(), f.values());
        assert!(!flag);
        assert!(translate(&f, -1.0).is_err());
    }

    #[test]
    fn support_grows_by_the_shift() {
        let alpha = al(1.0);
        let g = RadialGrid::with_breakpoints(alpha, 8.0, 256, &[1.0]).unwrap();
        let f = RadialFunction::from_fn(&g, |x| if x < 1.0 { (1.0 - x * x).powi(2) } else { 0.0 });
        let (t, flag) = translate(&f, 2.0).unwrap();
        assert!(!flag);
        for (&y, &v) in g.nodes().iter().zip(t.values()) {
            if !(1.0..=3.0).contains(&y) {
                assert!(v.abs() < 1e-10, "y={y} v={v}");
            }
        }
        assert!(translate(&f, 7.5).unwrap().1);
    }
}
