//! Discretization of `L²_α([0, R])`: μ_α-quadrature grids, sampled radial
//! functions, and dense operator matrices including the discrete Hankel
//! transform.

use std::f64::consts::PI;
use std::io::{BufRead, Write};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg;
use crate::quadrature::{barycentric_eval, barycentric_weights, gauss_jacobi, gauss_legendre};
use crate::specfun::{bessel_j, Alpha};

/// One quadrature panel `[lo, hi]` owning `nodes[start .. start + len]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub lo: f64,
    pub hi: f64,
    pub start: usize,
    pub len: usize,
    reference: Vec<f64>,
    bary: Vec<f64>,
}

impl Panel {
    /// The panel's interpolant of `values` (samples on the whole grid) at `x`.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let t = 2.0 * (x - self.lo) / (self.hi - self.lo) - 1.0;
        barycentric_eval(&self.reference, &self.bary, &values[self.start..self.start + self.len], t)
    }
}

/// Quadrature nodes and μ_α-weights on `[0, R]`.
///
/// Panels are Gauss–Legendre rules with the density `(2π)^{α+1} x^{2α+1}`
/// folded into the weights, except the panel touching 0, which uses the
/// Gauss–Jacobi rule for `x^{2α+1}` so the density is integrated exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    alpha: Alpha,
    radius: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panels: Vec<Panel>,
}

impl RadialGrid {
    /// The default layout: 32 equal panels for `n ≥ 256` (`n` divisible by
    /// 32), otherwise `n / 16` panels of 16 nodes.
    pub fn new(alpha: Alpha, radius: f64, n: usize) -> Result<Arc<Self>> {
        Self::with_breakpoints(alpha, radius, n, &[])
    }

    /// Like [`RadialGrid::new`], with every point of `breaks` inside
    /// `(0, R)` promoted to a panel boundary. Sub-panels receive nodes in
    /// proportion to their length, with at least 4 each.
    pub fn with_breakpoints(alpha: Alpha, radius: f64, n: usize, breaks: &[f64]) -> Result<Arc<Self>> {
        if !(radius > 0.0 && radius.is_finite()) {
            return domain(format!("grid radius must be positive and finite, got {radius}"));
        }
        let (panels, per_panel) = match n {
            n if n >= 256 && n % 32 == 0 => (32, n / 32),
            n if (16..256).contains(&n) && n % 16 == 0 => (n / 16, 16),
            _ => {
                return domain(format!(
                    "grid size must be a multiple of 16 in [16, 256) or of 32 from 256, got {n}"
                ))
            }
        };
        let width = radius / panels as f64;
        let mut cuts: Vec<f64> = breaks
            .iter()
            .copied()
            .filter(|&b| b > 0.0 && b < radius)
            .collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let mut layout = Vec::new();
        for p in 0..panels {
            let lo = width * p as f64;
            let hi = if p + 1 == panels { radius } else { width * (p + 1) as f64 };
            let mut edges = vec![lo];
            for &c in &cuts {
                if c > lo && c < hi && c - edges.last().unwrap() > 1e-14 * radius && hi - c > 1e-14 * radius {
                    edges.push(c);
                }
            }
            edges.push(hi);
            for w in edges.windows(2) {
                let m = if edges.len() == 2 {
                    per_panel
                } else {
                    ((per_panel as f64 * (w[1] - w[0]) / width).ceil() as usize).clamp(4, per_panel)
                };
                layout.push((w[0], w[1], m));
            }
        }
        Self::from_panels(alpha, radius, &layout)
    }

    /// Builds a grid from explicit `(lo, hi, nodes)` panels that tile `[0, R]`.
    pub fn from_panels(alpha: Alpha, radius: f64, layout: &[(f64, f64, usize)]) -> Result<Arc<Self>> {
        let pref = alpha.measure_prefactor();
        let exponent = 2.0 * alpha.value() + 1.0;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut panels = Vec::with_capacity(layout.len());
        for &(lo, hi, m) in layout {
            if !(hi > lo) || m == 0 {
                return domain(format!("bad panel [{lo}, {hi}] with {m} nodes"));
            }
            let half = 0.5 * (hi - lo);
            let start = nodes.len();
            let reference = if lo == 0.0 {
                let rule = gauss_jacobi(m, 0.0, exponent)?;
                let scale = pref * half.powf(exponent + 1.0);
                for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                    nodes.push(lo + half * (1.0 + t));
                    weights.push(w * scale);
                }
                rule.nodes.clone()
            } else {
                let rule = gauss_legendre(m);
                for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                    let x = lo + half * (1.0 + t);
                    nodes.push(x);
                    weights.push(w * half * pref * x.powf(exponent));
                }
                rule.nodes.clone()
            };
            let bary = barycentric_weights(&reference);
            panels.push(Panel { lo, hi, start, len: m, reference, bary });
        }
        Ok(Arc::new(RadialGrid { alpha, radius, nodes, weights, panels }))
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫ g dμ_α` over `[0, R]`.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * g(x)).sum()
    }

    fn panel_index(&self, x: f64) -> usize {
        let idx = self.panels.partition_point(|p| p.hi <= x);
        idx.min(self.panels.len() - 1)
    }

    /// Value at `x` of the piecewise polynomial interpolant of `values`.
    /// Zero outside `[0, R]`.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        if !(0.0..=self.radius).contains(&x) {
            return 0.0;
        }
        self.panels[self.panel_index(x)].interpolate(values, x)
    }

    /// All panel edges, ascending, including 0 and `R`.
    pub fn panel_edges(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.panels.iter().map(|p| p.lo).collect();
        e.push(self.radius);
        e
    }

    fn same_as(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || **self == **other
    }
}

pub fn check_same_grid(a: &Arc<RadialGrid>, b: &Arc<RadialGrid>) -> Result<()> {
    if a.same_as(b) {
        Ok(())
    } else {
        Err(Error::GridMismatch(format!(
            "grids differ (alpha {} vs {}, R {} vs {}, n {} vs {})",
            a.alpha,
            b.alpha,
            a.radius,
            b.radius,
            a.len(),
            b.len()
        )))
    }
}

fn check_same_alpha(a: &RadialGrid, b: &RadialGrid) -> Result<()> {
    if a.alpha == b.alpha {
        Ok(())
    } else {
        domain(format!("alpha mismatch: {} vs {}", a.alpha, b.alpha))
    }
}

/// Samples `f(x_i)` of a function on a [`RadialGrid`].
#[derive(Debug, Clone)]
pub struct RadialFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl RadialFunction {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(RadialFunction { grid, values })
    }

    pub fn from_fn(grid: &Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes.iter().map(|&x| f(x)).collect();
        RadialFunction { grid: Arc::clone(grid), values }
    }

    pub fn zeros(grid: &Arc<RadialGrid>) -> Self {
        RadialFunction { grid: Arc::clone(grid), values: vec![0.0; grid.len()] }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn alpha(&self) -> Alpha {
        self.grid.alpha
    }

    /// Interpolated value at an arbitrary `x` (zero beyond `R`).
    pub fn eval(&self, x: f64) -> f64 {
        self.grid.interpolate(&self.values, x)
    }

    pub fn map(&self, g: impl Fn(f64, f64) -> f64) -> Self {
        let values = self
            .grid
            .nodes
            .iter()
            .zip(&self.values)
            .map(|(&x, &v)| g(x, v))
            .collect();
        RadialFunction { grid: Arc::clone(&self.grid), values }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|_, v| c * v)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn zip_with(&self, other: &Self, g: impl Fn(f64, f64) -> f64) -> Result<Self> {
        check_same_grid(&self.grid, &other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| g(a, b)).collect();
        Ok(RadialFunction { grid: Arc::clone(&self.grid), values })
    }

    /// `⟨f, g⟩ = ∫ f g dμ_α`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        check_same_grid(&self.grid, &other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .zip(&self.grid.weights)
            .map(|((a, b), w)| a * b * w)
            .sum())
    }

    /// `‖f‖_{L^p_α}` for `p ∈ {1, 2}`.
    pub fn norm(&self, p: f64) -> Result<f64> {
        let w = &self.grid.weights;
        if p == 2.0 {
            Ok(self.values.iter().zip(w).map(|(v, w)| v * v * w).sum::<f64>().sqrt())
        } else if p == 1.0 {
            Ok(self.values.iter().zip(w).map(|(v, w)| v.abs() * w).sum())
        } else {
            domain(format!("only p = 1 and p = 2 are supported, got {p}"))
        }
    }

    pub fn l2(&self) -> f64 {
        self.norm(2.0).expect("p = 2 is supported")
    }

    /// `‖x^s f‖_{L²_α}`.
    pub fn weighted_norm(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return domain(format!("weight exponent must be nonnegative, got {s}"));
        }
        Ok(self
            .grid
            .nodes
            .iter()
            .zip(&self.values)
            .zip(&self.grid.weights)
            .map(|((x, v), w)| (x.powf(s) * v).powi(2) * w)
            .sum::<f64>()
            .sqrt())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// The dilate `δ_λ f(x) = λ^{-(α+1)} f(x/λ)`, resampled by interpolation.
    ///
    /// The flag is set when the result loses mass to truncation, i.e. when
    /// `f` is not negligible where the dilation pushes it past `R`, or where
    /// the output would need values of `f` beyond `R`.
    pub fn dilate(&self, lambda: f64) -> Result<(Self, bool)> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return domain(format!("dilation factor must be positive, got {lambda}"));
        }
        let r = self.grid.radius;
        let c = lambda.powf(-self.alpha().beta());
        let out = self.map(|x, _| c * self.eval(x / lambda));
        let scale = self.sup_norm().max(f64::MIN_POSITIVE);
        let cutoff = if lambda > 1.0 { r / lambda } else { r * lambda };
        let truncated = self
            .grid
            .nodes
            .iter()
            .zip(&self.values)
            .any(|(&x, &v)| x > cutoff && v.abs() > 1e-10 * scale);
        Ok((out, truncated && lambda != 1.0))
    }

    pub fn to_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "x,value")?;
        for (x, v) in self.grid.nodes.iter().zip(&self.values) {
            writeln!(w, "{x:e},{v:e}")?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "alpha": self.alpha().value(),
            "R": self.grid.radius,
            "n": self.grid.len(),
            "x": self.grid.nodes,
            "value": self.values,
        })
    }

    /// Reads samples written by [`RadialFunction::to_csv`]; the `x` column
    /// must match the grid nodes.
    pub fn from_csv(grid: &Arc<RadialGrid>, r: impl BufRead) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if i == 0 || line.trim().is_empty() {
                continue;
            }
            let (xs, vs) = line
                .split_once(',')
                .ok_or_else(|| Error::Domain(format!("malformed CSV line {}", i + 1)))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Domain(format!("line {}: {e}", i + 1)))
            };
            let x = parse(xs)?;
            let k = values.len();
            if k >= grid.len() || (x - grid.nodes[k]).abs() > 1e-12 * grid.radius {
                return Err(Error::GridMismatch(format!("CSV node {k} does not match the grid")));
            }
            values.push(parse(vs)?);
        }
        RadialFunction::new(Arc::clone(grid), values)
    }
}

/// A dense discretized operator mapping samples on `in_grid` to samples on
/// `out_grid`.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    in_grid: Arc<RadialGrid>,
    out_grid: Arc<RadialGrid>,
    entries: DMatrix<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MatrixHeader {
    rows: usize,
    cols: usize,
    alpha: f64,
    #[serde(rename = "R")]
    radius: f64,
    n: usize,
}

impl OperatorMatrix {
    pub fn new(in_grid: Arc<RadialGrid>, out_grid: Arc<RadialGrid>, entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != out_grid.len() || entries.ncols() != in_grid.len() {
            return Err(Error::GridMismatch(format!(
                "{}x{} matrix for grids of {} -> {} nodes",
                entries.nrows(),
                entries.ncols(),
                in_grid.len(),
                out_grid.len()
            )));
        }
        Ok(OperatorMatrix { in_grid, out_grid, entries })
    }

    /// Assembles `M[i, k] = entry(y_i, x_k)` in parallel over rows.
    pub fn from_fn(
        in_grid: &Arc<RadialGrid>,
        out_grid: &Arc<RadialGrid>,
        entry: impl Fn(usize, usize) -> f64 + Sync,
    ) -> Self {
        let rows = out_grid.len();
        let cols = in_grid.len();
        let mut data = vec![0.0; rows * cols];
        data.par_chunks_mut(cols).enumerate().for_each(|(i, row)| {
            for (k, slot) in row.iter_mut().enumerate() {
                *slot = entry(i, k);
            }
        });
        OperatorMatrix {
            in_grid: Arc::clone(in_grid),
            out_grid: Arc::clone(out_grid),
            entries: DMatrix::from_row_slice(rows, cols, &data),
        }
    }

    pub fn identity(grid: &Arc<RadialGrid>) -> Self {
        OperatorMatrix {
            in_grid: Arc::clone(grid),
            out_grid: Arc::clone(grid),
            entries: DMatrix::identity(grid.len(), grid.len()),
        }
    }

    /// Multiplication by a function of the node, `(Mf)(x_i) = m(x_i) f(x_i)`.
    pub fn diagonal(grid: &Arc<RadialGrid>, m: impl Fn(f64) -> f64) -> Self {
        let d = DVector::from_iterator(grid.len(), grid.nodes.iter().map(|&x| m(x)));
        OperatorMatrix {
            in_grid: Arc::clone(grid),
            out_grid: Arc::clone(grid),
            entries: DMatrix::from_diagonal(&d),
        }
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn in_grid(&self) -> &Arc<RadialGrid> {
        &self.in_grid
    }

    pub fn out_grid(&self) -> &Arc<RadialGrid> {
        &self.out_grid
    }

    pub fn apply(&self, f: &RadialFunction) -> Result<RadialFunction> {
        check_same_grid(&self.in_grid, &f.grid)?;
        let v = DVector::from_column_slice(&f.values);
        let out = &self.entries * v;
        Ok(RadialFunction { grid: Arc::clone(&self.out_grid), values: out.as_slice().to_vec() })
    }

    /// The composition `self ∘ inner`.
    pub fn compose(&self, inner: &OperatorMatrix) -> Result<OperatorMatrix> {
        check_same_grid(&self.in_grid, &inner.out_grid)?;
        Ok(OperatorMatrix {
            in_grid: Arc::clone(&inner.in_grid),
            out_grid: Arc::clone(&self.out_grid),
            entries: &self.entries * &inner.entries,
        })
    }

    pub fn add(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        check_same_grid(&self.in_grid, &other.in_grid)?;
        check_same_grid(&self.out_grid, &other.out_grid)?;
        Ok(OperatorMatrix {
            in_grid: Arc::clone(&self.in_grid),
            out_grid: Arc::clone(&self.out_grid),
            entries: &self.entries + &other.entries,
        })
    }

    /// The matrix of the operator between the weighted coordinate spaces,
    /// `√w_out · M · √w_in^{-1}`, whose Euclidean norms are L²_α norms.
    pub fn weighted(&self) -> DMatrix<f64> {
        let wo: Vec<f64> = self.out_grid.weights.iter().map(|w| w.sqrt()).collect();
        let wi: Vec<f64> = self.in_grid.weights.iter().map(|w| w.sqrt()).collect();
        DMatrix::from_fn(self.rows(), self.cols(), |i, k| wo[i] * self.entries[(i, k)] / wi[k])
    }

    /// Operator norm on `L²_α` by power iteration.
    pub fn op_norm(&self) -> Result<f64> {
        linalg::sigma_max(&self.weighted(), linalg::POWER_TOL, linalg::POWER_MAX_ITER)
    }

    /// Hilbert–Schmidt norm on `L²_α`.
    pub fn hs_norm(&self) -> f64 {
        linalg::frobenius(&self.weighted())
    }

    /// Writes a one-line JSON header followed by the entries as raw
    /// little-endian `f64`, row-major.
    pub fn write_binary(&self, mut w: impl Write) -> Result<()> {
        let header = MatrixHeader {
            rows: self.rows(),
            cols: self.cols(),
            alpha: self.in_grid.alpha.value(),
            radius: self.in_grid.radius,
            n: self.in_grid.len(),
        };
        serde_json::to_writer(&mut w, &header)?;
        w.write_all(b"\n")?;
        for i in 0..self.rows() {
            for k in 0..self.cols() {
                w.write_all(&self.entries[(i, k)].to_le_bytes())?;
            }
        }
        Ok(())
    }

    /// Reads a dump produced by [`OperatorMatrix::write_binary`] onto the
    /// given grids.
    pub fn read_binary(
        in_grid: &Arc<RadialGrid>,
        out_grid: &Arc<RadialGrid>,
        mut r: impl BufRead,
    ) -> Result<Self> {
        let mut line = String::new();
        r.read_line(&mut line)?;
        let header: MatrixHeader = serde_json::from_str(line.trim_end())?;
        if header.rows != out_grid.len() || header.cols != in_grid.len() {
            return Err(Error::GridMismatch("matrix header does not match the grids".into()));
        }
        let mut data = vec![0.0; header.rows * header.cols];
        let mut buf = [0u8; 8];
        for slot in data.iter_mut() {
            r.read_exact(&mut buf)?;
            *slot = f64::from_le_bytes(buf);
        }
        OperatorMatrix::new(
            Arc::clone(in_grid),
            Arc::clone(out_grid),
            DMatrix::from_row_slice(header.rows, header.cols, &data),
        )
    }
}

/// The discrete Fourier–Bessel transform `M[i, k] = j_α(2π y_i x_k) w_k`.
pub fn hankel_matrix(grid_in: &Arc<RadialGrid>, grid_out: &Arc<RadialGrid>) -> Result<OperatorMatrix> {
    check_same_alpha(grid_in, grid_out)?;
    let alpha = grid_in.alpha;
    Ok(OperatorMatrix::from_fn(grid_in, grid_out, |i, k| {
        bessel_j(alpha, 2.0 * PI * grid_out.nodes[i] * grid_in.nodes[k]) * grid_in.weights[k]
    }))
}

/// `F_α f` sampled on `grid_out`, by direct quadrature (no stored matrix).
pub fn hankel_transform(f: &RadialFunction, grid_out: &Arc<RadialGrid>) -> Result<RadialFunction> {
    check_same_alpha(&f.grid, grid_out)?;
    let alpha = f.alpha();
    let g = &f.grid;
    let values = grid_out
        .nodes
        .par_iter()
        .map(|&y| {
            g.nodes
                .iter()
                .zip(&g.weights)
                .zip(&f.values)
                .map(|((&x, &w), &v)| bessel_j(alpha, 2.0 * PI * x * y) * w * v)
                .sum()
        })
        .collect();
    Ok(RadialFunction { grid: Arc::clone(grid_out), values })
}

/// The inverse transform; under this normalization it is `F_α` itself.
pub fn inverse_hankel(ff: &RadialFunction, grid_out: &Arc<RadialGrid>) -> Result<RadialFunction> {
    hankel_transform(ff, grid_out)
}

/// `F_α f(y)` at a single frequency.
pub fn hankel_at(f: &RadialFunction, y: f64) -> f64 {
    let alpha = f.alpha();
    let g = &f.grid;
    g.nodes
        .iter()
        .zip(&g.weights)
        .zip(&f.values)
        .map(|((&x, &w), &v)| bessel_j(alpha, 2.0 * PI * x * y) * w * v)
        .sum()
}

/// The constant `c_H = (α+1)/(2π)` for which the Gaussian is extremal.
pub fn heisenberg_constant(alpha: Alpha) -> f64 {
    alpha.beta() / (2.0 * PI)
}

/// `‖x f‖ ‖y F_α f‖ / (c_H ‖f‖²)`, with `F_α f` already sampled.
pub fn heisenberg_ratio(f: &RadialFunction, ff: &RadialFunction) -> Result<f64> {
    let n2 = f.l2().powi(2);
    if n2 == 0.0 {
        return domain("the Heisenberg ratio is undefined for f = 0");
    }
    let spread = f.weighted_norm(1.0)? * ff.weighted_norm(1.0)?;
    Ok(spread / (heisenberg_constant(f.alpha()) * n2))
}
