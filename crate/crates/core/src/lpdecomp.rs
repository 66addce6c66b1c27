//! A Littlewood–Paley decomposition adapted to `F_α`, the operators
//! `K f = Σ_j ψ_j (φ_j ⋆ f)` and `L f = Σ_j ψ_j (f - φ_j ⋆ f)`, their kernels
//! and Schur bounds, and the thin-set experiment built on them.
//!
//! `φ_j ⋆ f` denotes the Fourier multiplier `F_α(F_α φ_j · F_α f)`. With the
//! translation normalized by `T_0 = id` this is `j_α(0) · (φ_j ∗_α f)`, so the
//! kernels below carry the factor `j_α(0)` (equal to 1 when `α = 0`).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::linalg;
use crate::localization::{annihilation_constants, localization_norms};
use crate::measure::IntervalSet;
use crate::quadrature::{gauss_jacobi, gauss_legendre};
use crate::spectral::{check_same_grid, RadialFunction, RadialGrid};
use crate::specfun::{bessel_j, Alpha};
use crate::thinsets::is_thin;
use crate::translation::translate_value;

/// `φ = F_α ψ_0` is tabulated on `[0, TABLE_END]`.
const TABLE_END: f64 = 64.0;
const TABLE_PANEL: f64 = 0.5;
const TABLE_NODES: usize = 20;
/// Spacing of the `r`-breakpoints handed to the θ-quadrature; `φ` oscillates
/// with period about 1, so each 20-node panel sees about two periods.
const R_BREAK: f64 = 2.0;
/// Relative size below which the tail of `φ` is dropped.
const TAIL_CUT: f64 = 1e-14;

fn h(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// The smooth cutoff: 1 on `[0, 1]`, 0 on `[2, ∞)`.
pub fn psi0(x: f64) -> f64 {
    if x <= 1.0 {
        1.0
    } else if x >= 2.0 {
        0.0
    } else {
        let a = h(2.0 - x);
        a / (a + h(x - 1.0))
    }
}

/// `ψ_0`, and `ψ_j(x) = ψ_0(2^{-j} x) - ψ_0(2^{-j+1} x)` for `j ≥ 1`.
pub fn psi(j: u32, x: f64) -> f64 {
    if j == 0 {
        psi0(x)
    } else {
        let s = (-(j as f64)).exp2();
        psi0(s * x) - psi0(2.0 * s * x)
    }
}

/// The levels `j ≤ levels` with `ψ_j(x) ≠ 0`.
fn active_levels(x: f64, levels: u32) -> impl Iterator<Item = u32> {
    let top = if x < 1.0 { 1 } else { (x.log2().floor() as u32 + 2).min(levels) };
    let bottom = top.saturating_sub(2);
    (bottom..=top.min(levels)).filter(move |&j| psi(j, x) != 0.0)
}

/// `φ(t) = ∫_0^2 ψ_0 j_α(2π t ·) dμ_α`, with the `[0, 1]` part in closed form.
fn phi_value(alpha: Alpha, t: f64) -> f64 {
    let pref = alpha.measure_prefactor();
    let next = Alpha::new(alpha.value() + 1.0).expect("α + 1 is admissible");
    let head = pref * bessel_j(next, 2.0 * PI * t);
    let rule = gauss_legendre(24);
    let exponent = 2.0 * alpha.value() + 1.0;
    let panels = 32;
    let mut tail = 0.0;
    for p in 0..panels {
        let lo = 1.0 + p as f64 / panels as f64;
        let hi = lo + 1.0 / panels as f64;
        for (x, w) in rule.mapped(lo, hi) {
            tail += w * psi0(x) * bessel_j(alpha, 2.0 * PI * t * x) * x.powf(exponent);
        }
    }
    head + pref * tail
}

/// `∫_0^end |g| dμ_α`, splitting at the sign changes of `g` so that every
/// Gauss panel sees a smooth integrand.
fn abs_integral(alpha: Alpha, g: impl Fn(f64) -> f64, end: f64, cell: f64) -> Result<f64> {
    const PROBES: usize = 32;
    let mut edges = vec![0.0];
    let cells = (end / cell).ceil() as usize;
    for c in 0..cells {
        let lo = c as f64 * cell;
        let hi = ((c + 1) as f64 * cell).min(end);
        let mut a = lo;
        let mut ga = g(a);
        for k in 1..=PROBES {
            let b = lo + (hi - lo) * k as f64 / PROBES as f64;
            let gb = g(b);
            if ga * gb < 0.0 {
                let (mut l, mut r) = (a, b);
                for _ in 0..80 {
                    let m = 0.5 * (l + r);
                    if g(m) * ga > 0.0 {
                        l = m;
                    } else {
                        r = m;
                    }
                }
                edges.push(0.5 * (l + r));
            }
            a = b;
            ga = gb;
        }
        edges.push(hi);
    }
    edges.dedup();
    let exponent = 2.0 * alpha.value() + 1.0;
    let first = gauss_jacobi(20, 0.0, exponent)?;
    let rule = gauss_legendre(20);
    let mut total = 0.0;
    for (p, w) in edges.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        if p == 0 {
            let half = 0.5 * (b - a);
            total += half.powf(exponent + 1.0)
                * first.nodes.iter().zip(&first.weights).map(|(&t, &wt)| wt * g(half * (1.0 + t)).abs()).sum::<f64>();
        } else {
            total += rule.mapped(a, b).map(|(x, wt)| wt * g(x).abs() * x.powf(exponent)).sum::<f64>();
        }
    }
    Ok(total * alpha.measure_prefactor())
}

/// `φ = F_α ψ_0` tabulated once per `α`.
#[derive(Debug)]
pub struct PhiTable {
    phi: RadialFunction,
    support: f64,
    breaks: Vec<f64>,
    l1: f64,
}

impl PhiTable {
    fn build(alpha: Alpha) -> Result<Self> {
        let panels = (TABLE_END / TABLE_PANEL) as usize;
        let layout: Vec<(f64, f64, usize)> = (0..panels)
            .map(|p| (p as f64 * TABLE_PANEL, (p + 1) as f64 * TABLE_PANEL, TABLE_NODES))
            .collect();
        let grid = RadialGrid::from_panels(alpha, TABLE_END, &layout)?;
        let values: Vec<f64> = grid.nodes().par_iter().map(|&t| phi_value(alpha, t)).collect();
        let phi = RadialFunction::new(Arc::clone(&grid), values)?;
        let scale = phi.sup_norm();
        let last = grid
            .nodes()
            .iter()
            .zip(phi.values())
            .filter(|(_, v)| v.abs() > TAIL_CUT * scale)
            .map(|(&t, _)| t)
            .fold(0.0, f64::max);
        let support = (last / TABLE_PANEL).ceil() * TABLE_PANEL;
        if support >= TABLE_END {
            return domain(format!("φ has not decayed below {TAIL_CUT} by t = {TABLE_END}"));
        }
        let phi = phi.map(|t, v| if t <= support { v } else { 0.0 });
        let l1 = abs_integral(alpha, |t| phi.eval(t), support, TABLE_PANEL)?;
        let breaks = (1..).map(|k| k as f64 * R_BREAK).take_while(|&r| r < support).collect();
        Ok(PhiTable { phi, support, breaks, l1 })
    }

    /// Shared table for `α`.
    pub fn get(alpha: Alpha) -> Result<Arc<PhiTable>> {
        static MEMO: OnceLock<Mutex<HashMap<u64, Arc<PhiTable>>>> = OnceLock::new();
        let memo = MEMO.get_or_init(Default::default);
        let key = alpha.value().to_bits();
        if let Some(t) = memo.lock().unwrap().get(&key) {
            return Ok(Arc::clone(t));
        }
        let table = Arc::new(Self::build(alpha)?);
        memo.lock().unwrap().insert(key, Arc::clone(&table));
        Ok(table)
    }

    pub fn eval(&self, t: f64) -> f64 {
        if !(t >= 0.0 && t <= self.support) {
            return 0.0;
        }
        let grid = self.phi.grid();
        let k = ((t / TABLE_PANEL) as usize).min(grid.panels().len() - 1);
        grid.panels()[k].interpolate(self.phi.values(), t)
    }

    /// Beyond this point `|φ| < 10^{-14} ‖φ‖_∞` and `φ` is taken as 0.
    pub fn support(&self) -> f64 {
        self.support
    }

    /// `‖φ‖_{L¹_α}`.
    pub fn l1_norm(&self) -> f64 {
        self.l1
    }

    pub fn table(&self) -> &RadialFunction {
        &self.phi
    }
}

/// Which kernel a Schur bound refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    A,
    B,
}

/// The decomposition truncated at `J = ⌈log₂ R⌉` for functions on `[0, R]`.
#[derive(Debug, Clone)]
pub struct LittlewoodPaley {
    alpha: Alpha,
    levels: u32,
    radius: f64,
    table: Arc<PhiTable>,
    multiplier: f64,
}

impl LittlewoodPaley {
    pub fn new(alpha: Alpha, radius: f64) -> Result<Self> {
        if !(radius >= 1.0 && radius.is_finite()) {
            return domain(format!("radius must be at least 1, got {radius}"));
        }
        let levels = radius.log2().ceil().max(1.0) as u32;
        Ok(LittlewoodPaley {
            alpha,
            levels,
            radius,
            table: PhiTable::get(alpha)?,
            multiplier: crate::specfun::j_at_zero(alpha),
        })
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    /// `J`.
    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn phi_table(&self) -> &PhiTable {
        &self.table
    }

    /// `φ_j(t) = 2^{2(α+1)j} φ(2^j t)`.
    pub fn phi_j(&self, j: u32, t: f64) -> f64 {
        let s = (j as f64).exp2();
        s.powf(2.0 * self.alpha.beta()) * self.table.eval(s * t)
    }

    /// `‖φ_j‖_{L¹_α}`, integrated at the scale of `φ_j`.
    pub fn phi_l1(&self, j: u32) -> Result<f64> {
        let scale = (-(j as f64)).exp2();
        abs_integral(self.alpha, |t| self.phi_j(j, t), self.table.support * scale, TABLE_PANEL * scale)
    }

    /// `φ_j` sampled on `grid`; the grid must resolve oscillations on the
    /// scale `2^{-j}`.
    pub fn phi(&self, j: u32, grid: &Arc<RadialGrid>) -> Result<RadialFunction> {
        let scale = (-(j as f64)).exp2();
        let support = self.table.support * scale;
        for p in grid.panels() {
            if p.lo < support && (p.hi - p.lo) / scale > p.len as f64 / 6.0 {
                return domain(format!(
                    "panel [{}, {}] with {} nodes cannot resolve φ_{j}",
                    p.lo, p.hi, p.len
                ));
            }
        }
        Ok(RadialFunction::from_fn(grid, |t| self.phi_j(j, t)))
    }

    /// `T_x φ_j(y)`, computed as `2^{2(α+1)j} T_{2^j x} φ(2^j y)`.
    pub fn translated_phi(&self, j: u32, x: f64, y: f64) -> f64 {
        let s = (j as f64).exp2();
        let table = &self.table;
        s.powf(2.0 * self.alpha.beta())
            * translate_value(self.alpha, |r| table.eval(r), s * x, s * y, &table.breaks, table.support)
    }

    /// Number of levels contributing to `A(x, ·)`.
    pub fn nonzero_terms(&self, x: f64) -> usize {
        active_levels(x, self.levels).count()
    }

    /// `A(x, y) = j_α(0) Σ_j ψ_j(x) T_y φ_j(x)`.
    pub fn kernel_a(&self, x: f64, y: f64) -> f64 {
        self.multiplier
            * active_levels(x, self.levels)
                .map(|j| psi(j, x) * self.translated_phi(j, y, x))
                .sum::<f64>()
    }

    /// `B(x, y) = j_α(0) Σ_{k ≥ 1} ψ_k(y) T_x φ_{k-1}(y)`.
    pub fn kernel_b(&self, x: f64, y: f64) -> f64 {
        self.multiplier
            * active_levels(y, self.levels)
                .filter(|&k| k >= 1)
                .map(|k| psi(k, y) * self.translated_phi(k - 1, x, y))
                .sum::<f64>()
    }

    /// `B(x, y) = j_α(0) Σ_j T_x F_α(ψ_j)(y) (1 - F_α(φ_j)(y))`, using
    /// `F_α ψ_j = φ_j - φ_{j-1}` and `F_α φ_j = ψ_0(2^{-j} ·)`.
    pub fn kernel_b_direct(&self, x: f64, y: f64) -> f64 {
        let mut sum = 0.0;
        for j in 0..self.levels {
            let high = 1.0 - psi0(y * (-(j as f64)).exp2());
            if high == 0.0 {
                continue;
            }
            let mut diff = self.translated_phi(j, x, y);
            if j >= 1 {
                diff -= self.translated_phi(j - 1, x, y);
            }
            sum += diff * high;
        }
        self.multiplier * sum
    }

    pub fn kernel(&self, which: Kernel, x: f64, y: f64) -> f64 {
        match which {
            Kernel::A => self.kernel_a(x, y),
            Kernel::B => self.kernel_b(x, y),
        }
    }

    fn check_grid(&self, grid: &RadialGrid) -> Result<()> {
        if grid.alpha() != self.alpha {
            return Err(Error::GridMismatch(format!(
                "grid has α = {}, decomposition has α = {}",
                grid.alpha().value(),
                self.alpha.value()
            )));
        }
        if grid.radius() > self.radius * (1.0 + 1e-12) {
            return domain(format!("grid radius {} exceeds R = {}", grid.radius(), self.radius));
        }
        Ok(())
    }

    /// `|kernel(x_i, y_k)|` weighted for integration over `y` (rows) and over
    /// `x` (columns), restricted to row and column index sets.
    fn kernel_block(&self, which: Kernel, grid: &RadialGrid, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        let x = grid.nodes();
        let data: Vec<f64> = rows
            .par_iter()
            .flat_map_iter(|&i| cols.iter().map(move |&k| self.kernel(which, x[i], x[k])))
            .collect();
        DMatrix::from_row_slice(rows.len(), cols.len(), &data)
    }

    /// `(sup_x ∫ |K(x, y)| dμ_α(y), sup_y ∫ |K(x, y)| dμ_α(x))` over grid nodes.
    pub fn schur_bounds(&self, which: Kernel, grid: &Arc<RadialGrid>) -> Result<(f64, f64)> {
        self.check_grid(grid)?;
        let all: Vec<usize> = (0..grid.len()).collect();
        let m = self.kernel_block(which, grid, &all, &all);
        Ok(schur_sums(&m, grid.weights(), &all, &all))
    }

    /// The matrix of `K` on `grid`: `M[i, k] = A(x_i, y_k) w_k`.
    pub fn k_matrix(&self, grid: &Arc<RadialGrid>) -> Result<crate::spectral::OperatorMatrix> {
        self.check_grid(grid)?;
        let x = grid.nodes();
        let w = grid.weights();
        Ok(crate::spectral::OperatorMatrix::from_fn(grid, grid, |i, k| self.kernel_a(x[i], x[k]) * w[k]))
    }

    /// `K` and `L` on `grid`, for applying them to many functions.
    pub fn operators(&self, grid: &Arc<RadialGrid>) -> Result<LpOperators> {
        self.check_grid(grid)?;
        let x = grid.nodes();
        let w = grid.weights();
        let rows = x
            .par_iter()
            .map(|&xi| {
                active_levels(xi, self.levels)
                    .map(|j| {
                        let row = x
                            .iter()
                            .zip(w)
                            .map(|(&y, &wk)| self.multiplier * wk * self.translated_phi(j, y, xi))
                            .collect();
                        (psi(j, xi), row)
                    })
                    .collect()
            })
            .collect();
        Ok(LpOperators { grid: Arc::clone(grid), rows })
    }

    /// `K f = Σ_j ψ_j (φ_j ⋆ f)`.
    pub fn apply_k(&self, f: &RadialFunction) -> Result<RadialFunction> {
        self.operators(f.grid())?.apply_k(f)
    }

    /// `L f = Σ_j ψ_j (f - φ_j ⋆ f)`.
    pub fn apply_l(&self, f: &RadialFunction) -> Result<RadialFunction> {
        self.operators(f.grid())?.apply_l(f)
    }

    /// Measures the thin-set estimates and the norm bound built on them.
    pub fn thin_schur_experiment(
        &self,
        s: &IntervalSet,
        sigma: &IntervalSet,
        eps: f64,
        grid: &Arc<RadialGrid>,
    ) -> Result<LpReport> {
        self.check_grid(grid)?;
        for (set, name) in [(s, "S"), (sigma, "Sigma")] {
            let rep = is_thin(set, eps, self.alpha, self.radius)?;
            if !rep.is_thin {
                return Err(Error::Precondition(format!(
                    "{name} is not ({eps}, α)-thin: worst window ratio {}",
                    rep.worst_ratio
                )));
            }
        }
        let all: Vec<usize> = (0..grid.len()).collect();
        let in_s = indices_in(grid, s);
        let in_sigma = indices_in(grid, sigma);
        let w = grid.weights();

        // K E_S: all rows, columns in S.
        let a = self.kernel_block(Kernel::A, grid, &all, &in_s);
        let (schur_a, _) = schur_sums(&a, w, &all, &in_s);
        let norm_ke = weighted_norm(&a, w, &all, &in_s)?;
        // F_Σ L = F_α χ_Σ B F_α: rows in Σ, all columns.
        let b = self.kernel_block(Kernel::B, grid, &in_sigma, &all);
        let (_, schur_b) = schur_sums(&b, w, &in_sigma, &all);
        let norm_fl = weighted_norm(&b, w, &in_sigma, &all)?;

        let composite = norm_fl + norm_ke;
        let (norm_fe, _) = if in_s.is_empty() || in_sigma.is_empty() {
            (0.0, 0.0)
        } else {
            localization_norms(s, sigma, grid)?
        };
        let certificate = if composite < 1.0 { Some(annihilation_constants(composite)?.c) } else { None };
        let eps0 = (composite > 0.0).then(|| eps / (composite * composite));
        Ok(LpReport {
            eps,
            alpha: self.alpha.value(),
            schur_a_on_s: schur_a,
            schur_b_on_sigma: schur_b,
            norm_ke,
            norm_fl,
            norm_fe,
            composite_bound: composite,
            certificate_c: certificate,
            eps0_empirical: eps0,
        })
    }
}

fn indices_in(grid: &RadialGrid, set: &IntervalSet) -> Vec<usize> {
    grid.nodes().iter().enumerate().filter(|(_, &x)| set.contains(x)).map(|(i, _)| i).collect()
}

/// Row sums `Σ_k |m_ik| w_k` and column sums `Σ_i |m_ik| w_i`, maximized.
fn schur_sums(m: &DMatrix<f64>, w: &[f64], rows: &[usize], cols: &[usize]) -> (f64, f64) {
    let mut row_max = 0.0f64;
    for i in 0..rows.len() {
        let s = (0..cols.len()).fold(0.0, |acc, k| acc + m[(i, k)].abs() * w[cols[k]]);
        row_max = row_max.max(s);
    }
    let mut col_max = 0.0f64;
    for k in 0..cols.len() {
        let s = (0..rows.len()).fold(0.0, |acc, i| acc + m[(i, k)].abs() * w[rows[i]]);
        col_max = col_max.max(s);
    }
    (row_max, col_max)
}

/// `L²_α` norm of the integral operator with kernel block `m`.
fn weighted_norm(m: &DMatrix<f64>, w: &[f64], rows: &[usize], cols: &[usize]) -> Result<f64> {
    if rows.is_empty() || cols.is_empty() {
        return Ok(0.0);
    }
    let b = DMatrix::from_fn(rows.len(), cols.len(), |i, k| (w[rows[i]] * w[cols[k]]).sqrt() * m[(i, k)]);
    linalg::sigma_max(&b, linalg::POWER_TOL, linalg::POWER_MAX_ITER)
}

/// The report of [`LittlewoodPaley::thin_schur_experiment`].
/// The rows of `φ_j ⋆ ·` at every node and active level, with `ψ_j` there.
#[derive(Debug, Clone)]
pub struct LpOperators {
    grid: Arc<RadialGrid>,
    rows: Vec<Vec<(f64, Vec<f64>)>>,
}

impl LpOperators {
    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    fn combine(&self, f: &RadialFunction, term: impl Fn(f64, f64) -> f64) -> Result<RadialFunction> {
        check_same_grid(&self.grid, f.grid())?;
        let v = f.values();
        let values = self
            .rows
            .iter()
            .zip(v)
            .map(|(levels, &fv)| {
                levels
                    .iter()
                    .map(|(p, row)| p * term(fv, row.iter().zip(v).map(|(a, b)| a * b).sum()))
                    .sum()
            })
            .collect();
        RadialFunction::new(Arc::clone(&self.grid), values)
    }

    /// `K f = Σ_j ψ_j (φ_j ⋆ f)`.
    pub fn apply_k(&self, f: &RadialFunction) -> Result<RadialFunction> {
        self.combine(f, |_, smooth| smooth)
    }

    /// `L f = Σ_j ψ_j (f - φ_j ⋆ f)`.
    pub fn apply_l(&self, f: &RadialFunction) -> Result<RadialFunction> {
        self.combine(f, |fv, smooth| fv - smooth)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpReport {
    pub eps: f64,
    pub alpha: f64,
    #[serde(rename = "schur_A_on_S")]
    pub schur_a_on_s: f64,
    #[serde(rename = "schur_B_on_Sigma")]
    pub schur_b_on_sigma: f64,
    #[serde(rename = "norm_KE")]
    pub norm_ke: f64,
    #[serde(rename = "norm_FL")]
    pub norm_fl: f64,
    /// `‖F_Σ E_S‖` measured directly, for comparison with the bound.
    #[serde(rename = "norm_FE")]
    pub norm_fe: f64,
    pub composite_bound: f64,
    #[serde(rename = "certificate_C")]
    pub certificate_c: Option<f64>,
    pub eps0_empirical: Option<f64>,
}
