//! Gauss rules on `[-1, 1]` and barycentric interpolation.
//!
//! All rules are Gauss–Jacobi rules for the weight `(1 - t)^a (1 + t)^b`;
//! Gauss–Legendre is the case `a = b = 0`. Nodes come from the eigenvalues of
//! the Jacobi matrix (implicit QL), are polished by Newton steps on the
//! orthonormal recurrence, and weights are taken from the Christoffel
//! function so that small endpoint weights keep their relative accuracy.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{domain, Error, Result};
use crate::specfun::gamma;

/// Nodes and weights of an `n`-point rule on `[-1, 1]`, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights for `∫_lo^hi g(x) dx` (Legendre rules only).
    pub fn mapped(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&t, &w)| (mid + half * t, half * w))
    }
}

type RuleKey = (usize, u64, u64);

fn cache() -> &'static Mutex<HashMap<RuleKey, Arc<GaussRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<RuleKey, Arc<GaussRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss–Legendre rule with `n` nodes.
pub fn gauss_legendre(n: usize) -> Arc<GaussRule> {
    gauss_jacobi(n, 0.0, 0.0).expect("Legendre parameters are always valid")
}

/// Gauss–Jacobi rule with `n` nodes for the weight `(1 - t)^a (1 + t)^b`.
///
/// Rules are memoized; repeated requests return the same `Arc`.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Result<Arc<GaussRule>> {
    if n == 0 {
        return domain("a Gauss rule needs at least one node");
    }
    if !(a > -1.0 && b > -1.0) {
        return domain(format!("Jacobi exponents must exceed -1 (a = {a}, b = {b})"));
    }
    let key = (n, a.to_bits(), b.to_bits());
    if let Some(rule) = cache().lock().unwrap().get(&key) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(build_jacobi(n, a, b)?);
    cache().lock().unwrap().insert(key, Arc::clone(&rule));
    Ok(rule)
}

/// Recurrence coefficients of the monic Jacobi polynomials:
/// `p_{k+1} = (t - diag[k]) p_k - offsq[k] p_{k-1}`, with `offsq[0]` unused.
fn jacobi_recurrence(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut diag = Vec::with_capacity(n + 1);
    let mut offsq = vec![0.0; n + 1];
    for k in 0..=n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let d = if k == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        };
        diag.push(d);
        if k == 1 {
            offsq[1] = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b));
        } else if k >= 2 {
            offsq[k] = 4.0 * kf * (kf + a) * (kf + b) * (kf + a + b)
                / (s * s * (s + 1.0) * (s - 1.0));
        }
    }
    (diag, offsq)
}

fn build_jacobi(n: usize, a: f64, b: f64) -> Result<GaussRule> {
    let (diag, offsq) = jacobi_recurrence(n, a, b);
    let mu0 = 2f64.powf(a + b + 1.0) * gamma(a + 1.0)? * gamma(b + 1.0)? / gamma(a + b + 2.0)?;

    let mut d: Vec<f64> = diag[..n].to_vec();
    let mut e: Vec<f64> = (0..n)
        .map(|k| if k + 1 < n { offsq[k + 1].sqrt() } else { 0.0 })
        .collect();
    tridiagonal_eigenvalues(&mut d, &mut e)?;
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());

    let off: Vec<f64> = offsq.iter().map(|v| v.sqrt()).collect();
    let p0 = 1.0 / mu0.sqrt();
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &guess in &d {
        let mut t = guess;
        for _ in 0..3 {
            let (pn, dpn, _) = orthonormal_eval(t, n, &diag, &off, p0);
            if dpn == 0.0 {
                break;
            }
            let step = pn / dpn;
            t -= step;
            if step.abs() <= 4.0 * f64::EPSILON * t.abs().max(1e-300) {
                break;
            }
        }
        let t = t.clamp(-1.0, 1.0);
        let (_, _, christoffel) = orthonormal_eval(t, n, &diag, &off, p0);
        nodes.push(t);
        weights.push(1.0 / christoffel);
    }
    Ok(GaussRule { nodes, weights })
}

/// Evaluates the orthonormal polynomial of degree `n`, its derivative, and
/// `Σ_{k<n} p_k(t)^2` at `t`.
fn orthonormal_eval(t: f64, n: usize, diag: &[f64], off: &[f64], p0: f64) -> (f64, f64, f64) {
    let (mut p_prev, mut p) = (0.0, p0);
    let (mut dp_prev, mut dp) = (0.0, 0.0);
    let mut sum = 0.0;
    for k in 0..n {
        sum += p * p;
        let next = ((t - diag[k]) * p - off[k] * p_prev) / off[k + 1];
        let dnext = (p + (t - diag[k]) * dp - off[k] * dp_prev) / off[k + 1];
        p_prev = p;
        p = next;
        dp_prev = dp;
        dp = dnext;
    }
    (p, dp, sum)
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL.
/// `d` holds the diagonal, `e[i]` couples rows `i` and `i + 1`.
fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return Err(Error::Convergence {
                    what: "tridiagonal QL".into(),
                    iterations,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// `∫_lo^end g(u) (u - lo)^left (hi - u)^right du` for `lo < end ≤ hi`.
///
/// The interval is split at every point of `breaks` inside `(lo, end)` and
/// each panel gets an `m`-point rule. Panels touching `lo` (or `hi`, when
/// `end == hi`) use Gauss–Jacobi rules that absorb the endpoint power; the
/// remaining factors are evaluated as part of the integrand.
#[allow(clippy::too_many_arguments)]
pub fn endpoint_composite(
    lo: f64,
    end: f64,
    hi: f64,
    left: f64,
    right: f64,
    breaks: &[f64],
    m: usize,
    g: impl Fn(f64) -> f64,
) -> Result<f64> {
    if !(lo < end && end <= hi) {
        return domain(format!("endpoint_composite needs lo < end <= hi, got {lo}, {end}, {hi}"));
    }
    let mut edges = vec![lo];
    for &b in breaks {
        if b > lo && b < end {
            edges.push(b);
        }
    }
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (hi - lo));
    edges.push(end);
    let reaches_hi = end == hi;
    // Interior panels must stay well separated from a singular endpoint
    // relative to their width, or the Gauss rules lose their fast convergence.
    if left != 0.0 {
        let mut graded = vec![edges[0]];
        for w in edges.windows(2) {
            let (mut a, b) = (w[0], w[1]);
            while a > lo && b - a > 2.0 * (a - lo) {
                a = lo + 3.0 * (a - lo);
                graded.push(a);
            }
            graded.push(b);
        }
        edges = graded;
    }
    if reaches_hi && right != 0.0 {
        let mut graded = vec![*edges.last().unwrap()];
        for w in edges.windows(2).rev() {
            let (a, mut b) = (w[0], w[1]);
            while b < hi && b - a > 2.0 * (hi - b) {
                b = hi - 3.0 * (hi - b);
                graded.push(b);
            }
            graded.push(a);
        }
        graded.reverse();
        edges = graded;
    }
    let last = edges.len() - 2;
    let mut total = 0.0;
    for (p, w) in edges.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let half = 0.5 * (b - a);
        let touches_lo = p == 0;
        let touches_hi = reaches_hi && p == last;
        let ea = if touches_hi { right } else { 0.0 };
        let eb = if touches_lo { left } else { 0.0 };
        let rule = gauss_jacobi(m, ea, eb)?;
        let mut acc = 0.0;
        for (&t, &wt) in rule.nodes.iter().zip(&rule.weights) {
            let u = a + half * (1.0 + t);
            let mut v = g(u);
            if !touches_lo && left != 0.0 {
                v *= (u - lo).powf(left);
            }
            if !touches_hi && right != 0.0 {
                v *= (hi - u).powf(right);
            }
            acc += wt * v;
        }
        let mut scale = half;
        if touches_lo {
            scale *= half.powf(left);
        }
        if touches_hi {
            scale *= half.powf(right);
        }
        total += acc * scale;
    }
    Ok(total)
}

/// Barycentric weights for interpolation through `nodes`, scaled to max 1.
pub fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    let mut w: Vec<f64> = nodes
        .iter()
        .enumerate()
        .map(|(j, &xj)| {
            let prod: f64 = nodes
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &xk)| xj - xk)
                .product();
            1.0 / prod
        })
        .collect();
    let scale = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    w.iter_mut().for_each(|v| *v /= scale);
    w
}

/// Evaluates the interpolating polynomial through `(nodes, values)` at `x`.
pub fn barycentric_eval(nodes: &[f64], bary: &[f64], values: &[f64], x: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for ((&xj, &wj), &fj) in nodes.iter().zip(bary).zip(values) {
        let diff = x - xj;
        if diff == 0.0 {
            return fj;
        }
        let c = wj / diff;
        num += c * fj;
        den += c;
    }
    num / den
}
