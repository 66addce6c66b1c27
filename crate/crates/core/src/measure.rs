//! Finite unions of intervals in `[0, ∞)` and the measures `μ_α` and Lebesgue.
//!
//! Intervals are treated as half-open `[lo, hi)`, so touching intervals merge
//! and degenerate ones vanish from the canonical form.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::specfun::Alpha;

/// A canonical finite union of disjoint intervals in `[0, ∞)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    /// The single interval `[lo, hi)`.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new([(lo, hi)])
    }

    /// Builds the canonical union of the given pairs, in any order.
    pub fn new(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut v = Vec::new();
        for (lo, hi) in pairs {
            if !(lo.is_finite() && hi.is_finite()) {
                return domain(format!("interval endpoints must be finite: [{lo}, {hi}]"));
            }
            if lo < 0.0 {
                return domain(format!("interval [{lo}, {hi}] leaves R^+"));
            }
            if lo > hi {
                return domain(format!("interval [{lo}, {hi}] has lo > hi"));
            }
            v.push((lo, hi));
        }
        Ok(Self::canonical(v))
    }

    fn canonical(mut v: Vec<(f64, f64)>) -> Self {
        v.retain(|&(lo, hi)| hi > lo);
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
        for (lo, hi) in v {
            match out.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => out.push((lo, hi)),
            }
        }
        IntervalSet { intervals: out }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= x && x < hi)
    }

    /// Supremum of the set (0 for the empty set).
    pub fn sup(&self) -> f64 {
        self.intervals.last().map_or(0.0, |&(_, hi)| hi)
    }

    /// Sorted list of all interval endpoints.
    pub fn endpoints(&self) -> Vec<f64> {
        self.intervals.iter().flat_map(|&(lo, hi)| [lo, hi]).collect()
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut v = self.intervals.clone();
        v.extend_from_slice(&other.intervals);
        Self::canonical(v)
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let (a0, a1) = self.intervals[i];
            let (b0, b1) = other.intervals[j];
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if hi > lo {
                out.push((lo, hi));
            }
            if a1 < b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::canonical(out)
    }

    /// `[0, radius) \ self`.
    pub fn complement(&self, radius: f64) -> Result<IntervalSet> {
        if !(radius > 0.0) || !radius.is_finite() {
            return domain(format!("complement needs a bounding radius > 0, got {radius}"));
        }
        let mut out = Vec::new();
        let mut cursor = 0.0;
        for &(lo, hi) in &self.intervals {
            if lo >= radius {
                break;
            }
            if lo > cursor {
                out.push((cursor, lo));
            }
            cursor = cursor.max(hi);
        }
        if cursor < radius {
            out.push((cursor, radius));
        }
        Ok(Self::canonical(out))
    }

    /// The image `{λx : x ∈ self}`.
    pub fn scale(&self, lambda: f64) -> Result<IntervalSet> {
        if !(lambda > 0.0) {
            return domain(format!("scale factor must be positive, got {lambda}"));
        }
        Ok(Self::canonical(
            self.intervals.iter().map(|&(lo, hi)| (lo * lambda, hi * lambda)).collect(),
        ))
    }
}

impl TryFrom<Vec<[f64; 2]>> for IntervalSet {
    type Error = Error;

    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        IntervalSet::new(v.into_iter().map(|[a, b]| (a, b)))
    }
}

impl From<IntervalSet> for Vec<[f64; 2]> {
    fn from(s: IntervalSet) -> Self {
        s.intervals.into_iter().map(|(a, b)| [a, b]).collect()
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self
            .intervals
            .iter()
            .map(|(lo, hi)| format!("[{lo}, {hi})"))
            .collect();
        write!(f, "{}", parts.join(" ∪ "))
    }
}

/// `μ_α([lo, hi])` from the exact antiderivative.
pub fn mu_interval(alpha: Alpha, lo: f64, hi: f64) -> f64 {
    let p = 2.0 * alpha.beta();
    alpha.measure_prefactor() * (hi.powf(p) - lo.powf(p)) / p
}

pub fn mu_alpha(alpha: Alpha, set: &IntervalSet) -> f64 {
    set.intervals().iter().map(|&(lo, hi)| mu_interval(alpha, lo, hi)).sum()
}

pub fn lebesgue(set: &IntervalSet) -> f64 {
    set.intervals().iter().map(|&(lo, hi)| hi - lo).sum()
}

/// `μ_α(3I) / μ_α(I)` for `I = [lo, hi]`, with `3I` clipped to `R^+`.
pub fn doubling_ratio(alpha: Alpha, lo: f64, hi: f64) -> Result<f64> {
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return domain(format!("doubling ratio needs a nondegenerate interval in R^+, got [{lo}, {hi}]"));
    }
    let len = hi - lo;
    let big = mu_interval(alpha, (lo - len).max(0.0), hi + len);
    Ok(big / mu_interval(alpha, lo, hi))
}

/// The supremum of the doubling ratio over all intervals, `4^{α+1}`,
/// attained by intervals of the form `[0, b]`.
pub fn doubling_sup(alpha: Alpha) -> f64 {
    4f64.powf(alpha.beta())
}

/// Largest doubling ratio over `samples` random intervals in `[0, radius]`.
pub fn empirical_doubling_constant(
    alpha: Alpha,
    radius: f64,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let a: f64 = rng.gen_range(0.0..radius);
        let b: f64 = rng.gen_range(0.0..radius);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if hi > lo {
            worst = worst.max(doubling_ratio(alpha, lo, hi)?);
        }
    }
    Ok(worst)
}
