//! Γ, the normalized Bessel kernel `j_α(x) = J_α(x) / x^α`, and the decay
//! constant `κ_α`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::optimize::golden_max;
use crate::quadrature::gauss_jacobi;

/// The order `α > -1/2` of the measure `μ_α` and of the kernel `j_α`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > -0.5 {
            Ok(Alpha(alpha))
        } else {
            domain(format!("alpha must be a finite number > -1/2, got {alpha}"))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `α + 1`, the exponent that recurs in the measure and in the constants.
    pub fn beta(self) -> f64 {
        self.0 + 1.0
    }

    /// `(2π)^{α+1}`, the density prefactor of `μ_α`.
    pub fn measure_prefactor(self) -> f64 {
        (2.0 * PI).powf(self.beta())
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Alpha::new(value)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for `x > 0` (Lanczos approximation, reflection below 1/2).
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("gamma requires x > 0, got {x}"));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    let half = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half * half * (-t).exp() * acc
}

/// `j_α(0) = 1 / (2^α Γ(α+1))`, which is also `sup |j_α|`.
pub fn j_at_zero(alpha: Alpha) -> f64 {
    let a = alpha.value();
    1.0 / (2f64.powf(a) * gamma_unchecked(a + 1.0))
}

/// The normalized Bessel function `j_α(x) = J_α(x) / x^α` for `x ≥ 0`.
///
/// Negative arguments are reflected, since `j_α` is even.
pub fn bessel_j(alpha: Alpha, x: f64) -> f64 {
    let x = x.abs();
    if x <= 6.0 {
        return series(alpha, x);
    }
    if x >= 20.0 {
        if let Some(v) = hankel_asymptotic(alpha, x) {
            return v;
        }
    }
    miller(alpha, x)
}

fn series(alpha: Alpha, x: f64) -> f64 {
    let a = alpha.value();
    let q = -0.25 * x * x;
    let mut term = j_at_zero(alpha);
    let mut sum = term;
    let mut comp = 0.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + a));
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        if term.abs() <= 1e-18 * sum.abs().max(1e-300) && k * k > -q {
            break;
        }
    }
    sum + comp
}

fn hankel_asymptotic(alpha: Alpha, x: f64) -> Option<f64> {
    let a = alpha.value();
    let mu = 4.0 * a * a;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        term *= (mu - (2.0 * kf - 1.0).powi(2)) / (8.0 * kf * x);
        let mag = term.abs();
        if mag > prev {
            return None;
        }
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if mag < 1e-17 {
            let phase = (0.5 * a + 0.25) * PI;
            let (sx, cx) = x.sin_cos();
            let (sp, cp) = phase.sin_cos();
            let cos_chi = cx * cp + sx * sp;
            let sin_chi = sx * cp - cx * sp;
            let big_j = (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi);
            return Some(big_j / x.powf(a));
        }
        prev = mag;
    }
    None
}

fn miller(alpha: Alpha, x: f64) -> f64 {
    let a = alpha.value();
    let start = x + 30.0 + 12.0 * x.cbrt();
    let m = 2 * ((start / 2.0).ceil() as usize);

    // c_k = Γ(α+k)/k! for the Neumann normalization sum.
    let mut c = vec![0.0; m / 2 + 1];
    c[1] = gamma_unchecked(a + 1.0);
    for k in 1..m / 2 {
        c[k + 1] = c[k] * (a + k as f64) / (k as f64 + 1.0);
    }

    let mut upper = 0.0;
    let mut cur = 1e-30;
    let mut norm = 0.0;
    let mut k = m;
    loop {
        if k >= 2 && k.is_multiple_of(2) {
            norm += (a + k as f64) * c[k / 2] * cur;
        }
        if k == 0 {
            break;
        }
        let lower = 2.0 * (a + k as f64) / x * cur - upper;
        upper = cur;
        cur = lower;
        k -= 1;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            upper *= 1e-250;
            norm *= 1e-250;
        }
    }
    norm += gamma_unchecked(a + 1.0) * cur;
    cur / (2f64.powf(a) * norm)
}

/// `j_α` through its Poisson integral, evaluated by an `nodes`-point
/// Gauss–Jacobi rule for the weight `(1 - s²)^{α - 1/2}`.
pub fn bessel_j_poisson(alpha: Alpha, x: f64, nodes: usize) -> Result<f64> {
    if nodes < 8 {
        return domain(format!("Poisson quadrature needs at least 8 nodes, got {nodes}"));
    }
    let a = alpha.value();
    let rule = gauss_jacobi(nodes, a - 0.5, a - 0.5)?;
    let integral: f64 = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&s, &w)| w * (s * x).cos())
        .sum();
    Ok(integral / (2f64.powf(a) * gamma_unchecked(a + 0.5) * PI.sqrt()))
}

const KAPPA_T_MAX: f64 = 500.0;
const KAPPA_T_MIN: f64 = 1e-4;
const KAPPA_SAMPLES: usize = 100_000;

/// Numerical estimate of `κ_α = sup_{t>0} |j_α(t)| t^{α+1/2}`.
///
/// Dense log-spaced sampling on `[1e-4, 500]` with golden-section refinement
/// of every sampled local maximum. The large-`t` limit `√(2/π)` of the
/// envelope is included, so the value also bounds the tail beyond 500.
/// Results are memoized per `α`.
pub fn kappa_alpha(alpha: Alpha) -> f64 {
    static MEMO: OnceLock<Mutex<HashMap<u64, f64>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    let key = alpha.value().to_bits();
    if let Some(&k) = memo.lock().unwrap().get(&key) {
        return k;
    }
    let k = kappa_sampled(alpha, KAPPA_SAMPLES, true).max((2.0 / PI).sqrt());
    memo.lock().unwrap().insert(key, k);
    k
}

/// Sampled supremum of the envelope with `samples` log-spaced points,
/// optionally refined around local maxima.
pub fn kappa_sampled(alpha: Alpha, samples: usize, refine: bool) -> f64 {
    let p = alpha.value() + 0.5;
    let env = |t: f64| bessel_j(alpha, t).abs() * t.powf(p);
    let ratio = (KAPPA_T_MAX / KAPPA_T_MIN).ln() / (samples - 1) as f64;
    let ts: Vec<f64> = (0..samples)
        .map(|i| KAPPA_T_MIN * (ratio * i as f64).exp())
        .collect();
    let vals: Vec<f64> = ts.iter().map(|&t| env(t)).collect();
    let mut best = vals.iter().cloned().fold(0.0, f64::max);
    if refine {
        for i in 1..samples - 1 {
            if vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1] {
                best = best.max(golden_max(env, ts[i - 1], ts[i + 1]).1);
            }
        }
    }
    best
}
