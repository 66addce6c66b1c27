//! Test functions: the named zoo used by the CLI and the randomized smooth
//! families used by the sweeps.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::IntervalSet;
use crate::specfun::{bessel_j, j_at_zero, Alpha};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFunction {
    /// `e^{-π x²}`, its own transform.
    Gaussian,
    /// `x² e^{-π x²}`.
    GaussianPoly,
    /// `exp(1 - 1/(1 - x²))` on `[0, 1)`, zero beyond.
    Bump,
    /// `j_α(2π x) / j_α(0)`.
    BesselMode,
}

impl TestFunction {
    pub const ALL: [TestFunction; 4] =
        [TestFunction::Gaussian, TestFunction::GaussianPoly, TestFunction::Bump, TestFunction::BesselMode];

    pub fn name(self) -> &'static str {
        match self {
            TestFunction::Gaussian => "gaussian",
            TestFunction::GaussianPoly => "gaussian-poly",
            TestFunction::Bump => "bump",
            TestFunction::BesselMode => "bessel-mode",
        }
    }

    pub fn eval(self, alpha: Alpha, x: f64) -> f64 {
        match self {
            TestFunction::Gaussian => gaussian(x),
            TestFunction::GaussianPoly => x * x * gaussian(x),
            TestFunction::Bump => bump(x),
            TestFunction::BesselMode => bessel_j(alpha, 2.0 * PI * x) / j_at_zero(alpha),
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TestFunction::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown test function {s:?}")))
    }
}

pub fn gaussian(x: f64) -> f64 {
    (-PI * x * x).exp()
}

pub fn bump(x: f64) -> f64 {
    if x.abs() < 1.0 {
        (1.0 - 1.0 / (1.0 - x * x)).exp()
    } else {
        0.0
    }
}

/// `Σ_m c_m x^{2k_m} e^{-π a_m x²}`: smooth, even, and (to double precision)
/// concentrated in both time and frequency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothSum {
    pub terms: Vec<(f64, i32, f64)>,
}

impl SmoothSum {
    /// Three to five terms with `c ∈ [-1, 1]`, `k ∈ {0, 1, 2}`,
    /// `a ∈ [0.6, 1.6]`.
    pub fn random(rng: &mut impl Rng) -> Self {
        let count = rng.gen_range(3..=5);
        let terms = (0..count)
            .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0..=2), rng.gen_range(0.6..1.6)))
            .collect();
        SmoothSum { terms }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|&(c, k, a)| c * x.powi(2 * k) * (-PI * a * x * x).exp()).sum()
    }
}

/// One to `max_parts` random intervals inside `[0, radius]`, each of length
/// between 5% and 100% of `max_len`.
pub fn random_interval_set(rng: &mut impl Rng, radius: f64, max_parts: usize, max_len: f64) -> IntervalSet {
    let parts = rng.gen_range(1..=max_parts.max(1));
    IntervalSet::new((0..parts).map(|_| {
        let top = max_len.min(radius);
        let len = rng.gen_range(0.05 * top..top);
        let lo = rng.gen_range(0.0..radius - len);
        (lo, lo + len)
    }))
    .expect("random intervals are well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn names_round_trip() {
        for t in TestFunction::ALL {
            assert_eq!(t.name().parse::<TestFunction>().unwrap(), t);
            assert_eq!(serde_json::to_value(t).unwrap(), serde_json::Value::from(t.name()));
        }
        assert!("sinc".parse::<TestFunction>().is_err());
    }

    #[test]
    fn values() {
        let a = Alpha::new(0.5).unwrap();
        assert_eq!(TestFunction::Gaussian.eval(a, 0.0), 1.0);
        assert_eq!(TestFunction::Bump.eval(a, 0.0), 1.0);
        assert_eq!(TestFunction::Bump.eval(a, 1.0), 0.0);
        assert!((TestFunction::BesselMode.eval(a, 0.0) - 1.0).abs() < 1e-15);
        // j_{1/2}(x) / j_{1/2}(0) = sin x / x
        let x = 0.37;
        assert!((TestFunction::BesselMode.eval(a, x) - (2.0 * PI * x).sin() / (2.0 * PI * x)).abs() < 1e-12);
    }

    #[test]
    fn random_objects_are_reproducible() {
        let s1 = SmoothSum::random(&mut ChaCha8Rng::seed_from_u64(5));
        let s2 = SmoothSum::random(&mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(s1, s2);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let e = random_interval_set(&mut rng, 4.0, 3, 1.0);
            assert!(!e.is_empty() && e.sup() <= 4.0);
            assert!(crate::measure::lebesgue(&e) <= 3.0);
        }
    }
}
