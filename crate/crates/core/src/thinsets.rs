//! `(ε, α)`-thin sets: the window-density checker, the infinite-measure
//! example family, the covering estimate and the annulus measure bounds.
//!
//! A set is thin when `μ_α(S ∩ [x, x+1]) ≤ ε μ_α([x, x+1])` for `x ∈ [0, 1]`
//! and `μ_α(S ∩ [x, x+1/x]) ≤ ε μ_α([x, x+1/x])` for every `x > 1`.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::measure::{doubling_sup, mu_interval, IntervalSet};
use crate::optimize::golden_max;
use crate::specfun::Alpha;

/// Prefix sums of `μ_α` over the components of a set, for `O(log n)`
/// evaluation of `μ_α(S ∩ [a, b])`.
#[derive(Debug, Clone)]
pub struct MeasureIndex {
    alpha: Alpha,
    intervals: Vec<(f64, f64)>,
    prefix: Vec<f64>,
}

impl MeasureIndex {
    pub fn new(alpha: Alpha, set: &IntervalSet) -> Self {
        let intervals = set.intervals().to_vec();
        let mut prefix = Vec::with_capacity(intervals.len() + 1);
        prefix.push(0.0);
        for &(lo, hi) in &intervals {
            let last = *prefix.last().unwrap();
            prefix.push(last + mu_interval(alpha, lo, hi));
        }
        MeasureIndex { alpha, intervals, prefix }
    }

    /// `μ_α(S ∩ [a, b])`.
    pub fn measure_in(&self, a: f64, b: f64) -> f64 {
        if b <= a || self.intervals.is_empty() {
            return 0.0;
        }
        // first component with hi > a, first component with lo >= b
        let first = self.intervals.partition_point(|&(_, hi)| hi <= a);
        let last = self.intervals.partition_point(|&(lo, _)| lo < b);
        if first >= last {
            return 0.0;
        }
        let mut total = self.prefix[last] - self.prefix[first];
        let (lo0, hi0) = self.intervals[first];
        if lo0 < a {
            total -= mu_interval(self.alpha, lo0, a.min(hi0));
        }
        let (lo1, hi1) = self.intervals[last - 1];
        if hi1 > b {
            total -= mu_interval(self.alpha, b.max(lo1), hi1);
        }
        total.max(0.0)
    }
}

/// Outcome of a thinness check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThinReport {
    pub eps: f64,
    pub alpha: f64,
    pub is_thin: bool,
    pub worst_ratio: f64,
    /// The window `[x, x + width]` attaining `worst_ratio`, if any.
    pub witness_window: Option<[f64; 2]>,
}

fn window_width(x: f64) -> f64 {
    if x <= 1.0 {
        1.0
    } else {
        1.0 / x
    }
}

/// Positions `x` where an edge of the window at `x` meets the endpoint `e`.
fn critical_positions(e: f64, out: &mut Vec<f64>) {
    out.push(e);
    out.push(e - 1.0);
    if e >= 2.0 {
        // x + 1/x = e
        let disc = (e * e - 4.0).sqrt();
        out.push(0.5 * (e + disc));
    }
}

/// Density ratio of `S` in the window at position `x`.
pub fn window_ratio(index: &MeasureIndex, x: f64) -> f64 {
    let w = window_width(x);
    let full = mu_interval(index.alpha, x, x + w);
    if full <= 0.0 {
        return 0.0;
    }
    index.measure_in(x, x + w) / full
}

/// Checks `(ε, α)`-thinness of `S ⊂ [0, R]` over window positions in
/// `[0, R]`.
///
/// The ratio is continuous in `x` and smooth between positions where a
/// window edge crosses an endpoint of `S`; those positions are evaluated
/// exactly, each gap between them is sampled at 10 interior points, and the
/// best interior sample is refined by golden-section search.
pub fn is_thin(s: &IntervalSet, eps: f64, alpha: Alpha, radius: f64) -> Result<ThinReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return domain(format!("eps must lie in (0, 1), got {eps}"));
    }
    if !(radius > 0.0) {
        return domain(format!("radius must be positive, got {radius}"));
    }
    if s.sup() > radius * (1.0 + 1e-12) {
        return domain(format!("S extends beyond R = {radius}"));
    }
    let index = MeasureIndex::new(alpha, s);
    if s.is_empty() {
        return Ok(ThinReport { eps, alpha: alpha.value(), is_thin: true, worst_ratio: 0.0, witness_window: None });
    }
    let mut crit = vec![0.0, 1.0, radius];
    for e in s.endpoints() {
        critical_positions(e, &mut crit);
    }
    crit.retain(|&x| (0.0..=radius).contains(&x));
    crit.sort_by(|a, b| a.partial_cmp(b).unwrap());
    crit.dedup();

    let ratio = |x: f64| window_ratio(&index, x);
    let mut worst = 0.0;
    let mut witness = 0.0;
    let mut consider = |x: f64, r: f64| {
        if r > worst {
            worst = r;
            witness = x;
        }
    };
    for &x in &crit {
        consider(x, ratio(x));
    }
    for w in crit.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a <= 0.0 {
            continue;
        }
        let samples: Vec<(f64, f64)> = (1..=10)
            .map(|i| {
                let x = a + (b - a) * i as f64 / 11.0;
                (x, ratio(x))
            })
            .collect();
        let (bi, &(bx, br)) = samples
            .iter()
            .enumerate()
            .max_by(|p, q| p.1 .1.partial_cmp(&q.1 .1).unwrap())
            .unwrap();
        consider(bx, br);
        if br > 0.0 {
            let lo = if bi == 0 { a } else { samples[bi - 1].0 };
            let hi = if bi + 1 == samples.len() { b } else { samples[bi + 1].0 };
            let (gx, gr) = golden_max(ratio, lo, hi);
            consider(gx, gr);
        }
    }
    Ok(ThinReport {
        eps,
        alpha: alpha.value(),
        is_thin: worst <= eps * (1.0 + 1e-12),
        worst_ratio: worst,
        witness_window: Some([witness, witness + window_width(witness)]),
    })
}

/// `∪_{k = k_min}^{k_max} [k, k + ε/(c k)]`.
pub fn make_thin_example(eps: f64, c: f64, k_min: u64, k_max: u64) -> Result<IntervalSet> {
    if k_min < 1 || k_max < k_min {
        return domain(format!("need 1 <= k_min <= k_max, got {k_min}..{k_max}"));
    }
    if !(eps > 0.0 && c > 0.0) {
        return domain(format!("eps and c must be positive, got {eps}, {c}"));
    }
    IntervalSet::new((k_min..=k_max).map(|k| {
        let k = k as f64;
        (k, k + eps / (c * k))
    }))
}

/// `1 + sup_I μ_α(3I)/μ_α(I)`: the covering constant obtained from the
/// doubling property.
pub fn covering_constant(alpha: Alpha) -> f64 {
    1.0 + doubling_sup(alpha)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringReport {
    /// `μ_α(S ∩ [a, b]) / (ε μ_α([a, b]))`.
    pub ratio: f64,
    pub constant: f64,
    pub bound_ok: bool,
    /// The sequence `a_0 = a, a_{j+1} = a_j + 1/a_j` up to the first term
    /// beyond `b` (empty for the clause anchored at 0).
    pub steps: Vec<f64>,
}

/// Checks the covering estimate `μ_α(S ∩ [a, b]) ≤ C ε μ_α([a, b])` for
/// `a ≥ 1, b - a ≥ 1/a`, or for `a = 0, b > 1`.
pub fn covering_check(s: &IntervalSet, a: f64, b: f64, eps: f64, alpha: Alpha) -> Result<CoveringReport> {
    let anchored = a == 0.0 && b > 1.0;
    if !anchored && !(a >= 1.0 && b - a >= 1.0 / a * (1.0 - 1e-12)) {
        return Err(Error::Precondition(format!(
            "covering needs a >= 1 and b - a >= 1/a, or a = 0 and b > 1; got [{a}, {b}]"
        )));
    }
    let mut steps = Vec::new();
    if !anchored {
        let mut x = a;
        steps.push(x);
        while x <= b {
            x += 1.0 / x;
            steps.push(x);
            if steps.len() > 10_000_000 {
                return Err(Error::Convergence { what: "covering sequence".into(), iterations: steps.len() });
            }
        }
    }
    let index = MeasureIndex::new(alpha, s);
    let ratio = index.measure_in(a, b) / (eps * mu_interval(alpha, a, b));
    let constant = covering_constant(alpha);
    Ok(CoveringReport { ratio, constant, bound_ok: ratio <= constant, steps })
}

/// Both annulus estimates; a regime whose hypothesis fails is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnulusBounds {
    /// `(μ_α([x - r/x, x + r/x]), (8π)^{α+1} r x^{2α})`, when `r/x ≤ x`.
    pub near: Option<(f64, f64)>,
    /// `(μ_α([0, x + r/x]), (18π)^{α+1} (r/x)^{2α+2})`, when `r/x ≥ x/2`.
    pub far: Option<(f64, f64)>,
}

impl AnnulusBounds {
    pub fn holds(&self) -> bool {
        self.near.is_none_or(|(l, r)| l <= r) && self.far.is_none_or(|(l, r)| l <= r)
    }
}

pub fn annulus_measure_bounds(alpha: Alpha, x: f64, r: f64) -> Result<AnnulusBounds> {
    if !(x > 0.0 && r > 0.0) {
        return domain(format!("annulus bounds need x, r > 0, got {x}, {r}"));
    }
    let beta = alpha.beta();
    let h = r / x;
    let near = (h <= x).then(|| {
        (
            mu_interval(alpha, x - h, x + h),
            (8.0 * std::f64::consts::PI).powf(beta) * r * x.powf(2.0 * alpha.value()),
        )
    });
    let far = (h >= 0.5 * x).then(|| {
        (
            mu_interval(alpha, 0.0, x + h),
            (18.0 * std::f64::consts::PI).powf(beta) * h.powf(2.0 * beta),
        )
    });
    Ok(AnnulusBounds { near, far })
}
