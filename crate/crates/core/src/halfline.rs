//! The half-line model `H_eps = -d^2/dt^2 + eps^{-2} V(t / eps)` with a
//! Dirichlet condition at `t = 0`, truncated to `[0, L]`.
//!
//! As `eps -> 0` the spectrum approaches that of the Neumann Laplacian when
//! `V` is resonant and that of the Dirichlet Laplacian otherwise.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::report::ConvergenceReport;
use crate::resonance::shoot;
use crate::scalar::Real;
use crate::tridiag::TridiagonalOperator;

/// Minimum number of grid intervals of a half-line model.
pub const MIN_NODES: usize = 2000;

/// Boundary condition at `t = 0` of the limit operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitKind {
    #[serde(rename = "neumann-at-0")]
    NeumannAtZero,
    #[serde(rename = "dirichlet-at-0")]
    DirichletAtZero,
}

impl LimitKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LimitKind::NeumannAtZero => "neumann-at-0",
            LimitKind::DirichletAtZero => "dirichlet-at-0",
        }
    }
}

/// `H_eps` on `[0, length]` with `nodes` grid intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct HalflineModel<T> {
    potential: Potential<T>,
    eps: T,
    length: T,
    nodes: usize,
}

impl<T: Real> HalflineModel<T> {
    /// Validates `a eps < L / 4`, `N >= 2000` and `L / N <= a eps / 40`.
    pub fn new(potential: Potential<T>, eps: T, length: T, nodes: usize) -> Result<Self> {
        if !(eps > T::zero()) || !eps.is_finite() {
            return Err(Error::domain(format!("eps = {eps} must be positive")));
        }
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::domain(format!("length L = {length} must be positive")));
        }
        let layer = potential.support_bound() * eps;
        if !(layer < length / T::lit(4.0)) {
            return Err(Error::domain(format!("a * eps = {layer} must be below L / 4")));
        }
        if nodes < MIN_NODES {
            return Err(Error::domain(format!("N = {nodes} is below {MIN_NODES}")));
        }
        let h = length / T::from_count(nodes);
        if h > layer / T::lit(40.0) * (T::one() + T::lit(1e-12)) {
            return Err(Error::domain(format!(
                "grid step {h} does not resolve the layer a * eps = {layer} (need h <= a eps / 40)"
            )));
        }
        Ok(Self { potential, eps, length, nodes })
    }

    /// Model with `N = max(2000, ceil(cells_per_layer * L / (a eps)))`.
    pub fn resolved(potential: Potential<T>, eps: T, length: T, tol: &Tolerances) -> Result<Self> {
        let layer = potential.support_bound() * eps;
        let want = (T::lit(tol.halfline_cells_per_layer) * length / layer).ceil();
        let nodes = want.to_usize().unwrap_or(usize::MAX).max(MIN_NODES);
        Self::new(potential, eps, length, nodes)
    }

    pub fn potential(&self) -> &Potential<T> {
        &self.potential
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn step(&self) -> T {
        self.length / T::from_count(self.nodes)
    }

    /// The same model on a grid refined by `factor`.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.potential.clone(), self.eps, self.length, self.nodes * factor)
    }

    /// Interior nodes `t_i = i h`, `i = 1..N-1`.
    pub fn interior_nodes(&self) -> Vec<T> {
        let h = self.step();
        (1..self.nodes).map(|i| T::from_count(i) * h).collect()
    }
}

/// Three-point Laplacian on the interior nodes of `[0, length]` plus the
/// dual-cell averages `h^{-1} int V_eps` of the scaled potential.
pub(crate) fn dirichlet_segment_operator<T: Real>(
    v: &Potential<T>,
    eps: T,
    length: T,
    nodes: usize,
) -> Result<TridiagonalOperator<T>> {
    if nodes < 2 {
        return Err(Error::domain("segment needs at least two intervals"));
    }
    let h = length / T::from_count(nodes);
    let inv_h2 = T::one() / (h * h);
    let half = T::lit(0.5);
    let a = v.support_bound();
    let diag = (1..nodes)
        .map(|i| {
            let t = T::from_count(i) * h;
            let s0 = (t - half * h) / eps;
            let s1 = (t + half * h) / eps;
            let average = if s0 >= a { T::zero() } else { v.moments(s0, s1).0 / (eps * h) };
            T::lit(2.0) * inv_h2 + average
        })
        .collect();
    TridiagonalOperator::new(diag, vec![-inv_h2; nodes - 2])
}

/// Matrix of `H_eps` on the interior nodes, unit weight.
pub fn assemble_halfline<T: Real>(model: &HalflineModel<T>) -> Result<TridiagonalOperator<T>> {
    dirichlet_segment_operator(&model.potential, model.eps, model.length, model.nodes)
}

/// Discrete free Laplacian of the limit problem on the grid of `model`.
///
/// The Neumann variant carries the extra node `t = 0` with trapezoidal weight
/// `h / 2`, so its unknowns are `t_0, ..., t_{N-1}`.
fn limit_operator<T: Real>(kind: LimitKind, length: T, nodes: usize) -> Result<TridiagonalOperator<T>> {
    let h = length / T::from_count(nodes);
    let inv_h2 = T::one() / (h * h);
    match kind {
        LimitKind::DirichletAtZero => dirichlet_segment_operator(&Potential::zero(), T::one(), length, nodes),
        LimitKind::NeumannAtZero => {
            let mut diag = vec![T::lit(2.0) * inv_h2; nodes];
            diag[0] = inv_h2;
            let mut weight = vec![T::one(); nodes];
            weight[0] = T::lit(0.5);
            TridiagonalOperator::with_weight(diag, vec![-inv_h2; nodes - 1], weight)
        }
    }
}

/// Exact eigenvalues of the free Laplacian on `[0, L]` with Dirichlet at `L`:
/// `((j - 1/2) pi / L)^2` or `(j pi / L)^2`, `j = 1..k`.
pub fn limit_spectrum<T: Real>(kind: LimitKind, length: T, k: usize) -> Result<Vec<T>> {
    if !(length > T::zero()) {
        return Err(Error::domain(format!("length L = {length} must be positive")));
    }
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    let shift = match kind {
        LimitKind::NeumannAtZero => T::lit(0.5),
        LimitKind::DirichletAtZero => T::zero(),
    };
    Ok((1..=k)
        .map(|j| {
            let q = (T::from_count(j) - shift) * T::PI() / length;
            q * q
        })
        .collect())
}

/// Lowest `k` eigenvalues of `H_eps`, Richardson-extrapolated over the grid
/// of `model` and its refinement by two.
pub fn extrapolated_eigenvalues<T: Real>(model: &HalflineModel<T>, k: usize, tol: &Tolerances) -> Result<Vec<T>> {
    let coarse = assemble_halfline(model)?.lowest_eigenvalues(k, tol)?;
    let fine = assemble_halfline(&model.refined(2)?)?.lowest_eigenvalues(k, tol)?;
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (T::lit(4.0) * *f - *c) / T::lit(3.0))
        .collect())
}

/// `|| (H_eps - i)^{-1} v - (H_lim - i)^{-1} v ||` in `L^2(0, L)`.
///
/// `v` holds samples at `t_0 = 0, ..., t_N = L` of the model grid; the norm is
/// the trapezoidal rule on the same nodes.
pub fn halfline_resolvent_gap<T: Real>(model: &HalflineModel<T>, v: &[T], kind: LimitKind) -> Result<T> {
    let n = model.nodes;
    if v.len() != n + 1 {
        return Err(Error::domain(format!("v has {} samples, expected {}", v.len(), n + 1)));
    }
    let i = Complex::new(T::zero(), T::one());
    let h = model.step();
    let interior: Vec<Complex<T>> = v[1..n].iter().map(|x| Complex::new(*x, T::zero())).collect();
    let u_eps = assemble_halfline(model)?.solve_shifted(i, &interior)?;

    let limit = limit_operator(kind, model.length, n)?;
    let mut diff = vec![Complex::new(T::zero(), T::zero()); n];
    match kind {
        LimitKind::DirichletAtZero => {
            let u_lim = limit.solve_shifted(i, &interior)?;
            for j in 1..n {
                diff[j] = u_eps[j - 1] - u_lim[j - 1];
            }
        }
        LimitKind::NeumannAtZero => {
            let rhs: Vec<Complex<T>> = v[..n].iter().map(|x| Complex::new(*x, T::zero())).collect();
            let u_lim = limit.solve_shifted(i, &rhs)?;
            diff[0] = -u_lim[0];
            for j in 1..n {
                diff[j] = u_eps[j - 1] - u_lim[j];
            }
        }
    }
    let half = T::lit(0.5);
    let sum = diff
        .iter()
        .enumerate()
        .map(|(j, d)| if j == 0 { half * d.norm_sqr() } else { d.norm_sqr() })
        .sum::<T>();
    Ok((sum * h).sqrt())
}

/// Eigenvalue and resolvent convergence of `H_eps` along a descending list of
/// scales, against the limit selected by the resonance test.
///
/// Columns: `epsilon`, then `eigenvalue_j`, `limit_j`, `abs_error_j` for each
/// `j`, then `resolvent_gap` (with `v = sin(pi t / L)`).
pub fn seba_convergence_study<T: Real>(
    v: &Potential<T>,
    eps_list: &[T],
    length: T,
    k: usize,
    tol: &Tolerances,
) -> Result<ConvergenceReport> {
    if eps_list.is_empty() {
        return Err(Error::domain("empty eps list"));
    }
    if eps_list.iter().any(|e| !(*e > T::zero())) || eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::domain("eps list must be positive and strictly descending"));
    }
    let shot = shoot(v, T::zero(), tol)?;
    let residual = shot.derivative_residual();
    let resonant = residual <= T::lit(tol.resonance);
    let kind = if resonant { LimitKind::NeumannAtZero } else { LimitKind::DirichletAtZero };
    let limits = limit_spectrum(kind, length, k)?;
    let models = eps_list
        .iter()
        .map(|eps| HalflineModel::resolved(v.clone(), *eps, length, tol))
        .collect::<Result<Vec<_>>>()?;

    let rows = models
        .par_iter()
        .map(|model| {
            let values = extrapolated_eigenvalues(model, k, tol)?;
            let h = model.step();
            let probe: Vec<T> = (0..=model.nodes)
                .map(|j| (T::PI() * T::from_count(j) * h / length).sin())
                .collect();
            let gap = halfline_resolvent_gap(model, &probe, kind)?;
            let mut row = vec![model.eps.as_f64()];
            for (value, limit) in values.iter().zip(&limits) {
                row.extend([value.as_f64(), limit.as_f64(), (*value - *limit).abs().as_f64()]);
            }
            row.push(gap.as_f64());
            Ok((row, model.nodes))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut columns = vec!["epsilon".to_string()];
    for j in 1..=k {
        columns.extend([format!("eigenvalue_{j}"), format!("limit_{j}"), format!("abs_error_{j}")]);
    }
    columns.push("resolvent_gap".into());
    let mut report = ConvergenceReport::new("halfline-seba", columns);
    report.set_meta("classification", if resonant { "resonant" } else { "non-resonant" });
    report.set_meta("limit", kind.as_str());
    report.set_meta("derivative_residual", residual.as_f64());
    report.set_meta("truncation_length", length.as_f64());
    report.set_meta("k", k);
    report.set_meta("grid_nodes", rows.iter().map(|(_, n)| *n).collect::<Vec<_>>());
    report.set_meta("eigenvalues", "Richardson extrapolation over N and 2N");
    for (row, _) in rows {
        report.push_row(row)?;
    }
    Ok(report)
}
