//! One-dimensional golden-section search.

/// Maximizes a unimodal `f` on `[lo, hi]`, returning `(x, f(x))`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
        if hi - lo < 1e-14 * lo.abs().max(hi.abs()).max(1.0) {
            break;
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Minimizes a unimodal `f` on `[lo, hi]`, returning `(x, f(x))`.
pub fn golden_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let (x, v) = golden_max(|t| -f(t), lo, hi);
    (x, -v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_extrema() {
        let (x, v) = golden_max(|t| -(t - 0.3).powi(2) + 2.0, -5.0, 5.0);
        assert!((x - 0.3).abs() < 1e-7 && (v - 2.0).abs() < 1e-14);
        let (x, v) = golden_min(|t| t.cosh(), -3.0, 1.0);
        assert!(x.abs() < 1e-7 && (v - 1.0).abs() < 1e-14);
    }
}
