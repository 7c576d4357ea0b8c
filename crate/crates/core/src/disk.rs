//! Radial fibres of the unit disk.
//!
//! Separating variables in polar coordinates turns the boundary-layer
//! Schrödinger operator on the disk into the family
//! `A^(m)_eps f = -(1/r)(r f')' + (m^2 / r^2) f + eps^{-2} V((1 - r) / eps) f`
//! on `L^2((0, 1); r dr)`. Each fibre is discretized by finite volumes on
//! cell centres `r_i = (i - 1/2) h`, which gives a tridiagonal operator that is
//! symmetric in the weighted inner product `w_i = r_i h`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::resonance::{canonical_solution, check_hypothesis, TailMode};
use crate::scalar::Real;
use crate::tridiag::TridiagonalOperator;

/// One radial fibre: angular index `m`, scale `eps`, `cells` grid cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FibreSpec<T> {
    m: i64,
    eps: T,
    cells: usize,
}

/// Smallest admissible cell count at scale `eps`:
/// `max(min_cells, ceil(cells_per_layer / eps))`, capped at `max_cells`.
pub fn required_cells<T: Real>(eps: T, tol: &Tolerances) -> usize {
    let layer = (T::lit(tol.fibre_cells_per_layer) / eps).ceil().to_usize().unwrap_or(usize::MAX);
    layer.max(tol.fibre_min_cells).min(tol.fibre_max_cells)
}

impl<T: Real> FibreSpec<T> {
    pub fn new(m: i64, eps: T, cells: usize, tol: &Tolerances) -> Result<Self> {
        if !(eps > T::zero()) || !eps.is_finite() {
            return Err(Error::domain(format!("eps = {eps} must be positive")));
        }
        let need = required_cells(eps, tol);
        if cells < need {
            return Err(Error::domain(format!("N = {cells} cells is below the required {need}")));
        }
        if cells > tol.fibre_max_cells {
            return Err(Error::domain(format!("N = {cells} exceeds the cap {}", tol.fibre_max_cells)));
        }
        Ok(Self { m, eps, cells })
    }

    /// Spec with the smallest admissible grid.
    pub fn resolved(m: i64, eps: T, tol: &Tolerances) -> Result<Self> {
        if !(eps > T::zero()) {
            return Err(Error::domain(format!("eps = {eps} must be positive")));
        }
        Self::new(m, eps, required_cells(eps, tol), tol)
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn grid(&self) -> RadialGrid<T> {
        RadialGrid::new(self.cells)
    }

    fn with_cells(&self, cells: usize) -> Self {
        Self { cells, ..*self }
    }
}

/// Cell-centred grid on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid<T> {
    cells: usize,
    h: T,
}

impl<T: Real> RadialGrid<T> {
    pub fn new(cells: usize) -> Self {
        Self { cells, h: T::one() / T::from_count(cells) }
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn step(&self) -> T {
        self.h
    }

    /// `r_i = (i - 1/2) h` for `i = 1..=N` (stored zero-based).
    pub fn centre(&self, i: usize) -> T {
        (T::from_count(i) + T::lit(0.5)) * self.h
    }

    /// Face `i h`, `i = 0..=N`.
    pub fn face(&self, i: usize) -> T {
        T::from_count(i) * self.h
    }

    pub fn centres(&self) -> Vec<T> {
        (0..self.cells).map(|i| self.centre(i)).collect()
    }

    /// Quadrature weights `r_i h` of `L^2(r dr)`.
    pub fn weights(&self) -> Vec<T> {
        (0..self.cells).map(|i| self.centre(i) * self.h).collect()
    }

    /// Samples `f(r_i)`.
    pub fn sample(&self, f: impl Fn(T) -> T) -> Vec<T> {
        (0..self.cells).map(|i| f(self.centre(i))).collect()
    }
}

/// Boundary condition at `r = 1` and whether the potential is present.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FibreBoundary<T> {
    /// The operator `A^(m)_eps`: scaled potential plus Dirichlet at `r = 1`.
    Scaled,
    /// Free Laplacian with `f'(1) + gamma f(1) = 0`.
    Robin(T),
    /// Free Laplacian with `f(1) = 0`.
    Dirichlet,
}

/// Robin coefficient of the unit disk: `(d - 1) H / 2` with `d = 2`, `H = 1`.
pub const DISK_ROBIN: f64 = 0.5;

/// Weighted tridiagonal discretization of the fibre operator.
///
/// The potential enters through the cell integrals
/// `int_cell eps^{-2} V((1 - r) / eps) r dr`, so that the matrix depends
/// continuously on `eps` for discontinuous profiles.
pub fn assemble_fibre<T: Real>(
    v: &Potential<T>,
    spec: &FibreSpec<T>,
    boundary: FibreBoundary<T>,
) -> Result<TridiagonalOperator<T>> {
    let grid = spec.grid();
    let n = grid.cells;
    let h = grid.h;
    let m2 = T::from_i64(spec.m).ok_or_else(|| Error::domain("angular index out of range"))?.powi(2);
    let eps = spec.eps;
    let a = v.support_bound();

    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n {
        let r = grid.centre(i);
        let left = grid.face(i);
        let right = grid.face(i + 1);
        let mut d = left / h + m2 * h / r;
        if i + 1 < n {
            d += right / h;
            off.push(-right / h);
        } else {
            d += match boundary {
                FibreBoundary::Scaled | FibreBoundary::Dirichlet => T::lit(2.0) / h,
                FibreBoundary::Robin(gamma) => gamma / (T::one() + gamma * h / T::lit(2.0)),
            };
        }
        if let FibreBoundary::Scaled = boundary {
            let t0 = (T::one() - right) / eps;
            if t0 < a {
                let t1 = (T::one() - left) / eps;
                let (m0, m1) = v.moments(t0, t1);
                d += (m0 - eps * m1) / eps;
            }
        }
        diag.push(d);
    }
    TridiagonalOperator::with_weight(diag, off, grid.weights())
}

/// Lowest eigenvalue of the fibre on the grid of `spec` (no extrapolation).
pub fn lambda1_on_grid<T: Real>(
    v: &Potential<T>,
    spec: &FibreSpec<T>,
    boundary: FibreBoundary<T>,
    tol: &Tolerances,
) -> Result<T> {
    Ok(assemble_fibre(v, spec, boundary)?.lowest_eigenvalues(1, tol)?[0])
}

/// Richardson value `(4 lambda_2N - lambda_N) / 3` with its error estimate
/// `|lambda_2N - lambda_N| / 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lambda1Estimate<T> {
    pub value: T,
    pub coarse: T,
    pub fine: T,
    pub cells: usize,
    pub error_estimate: T,
}

/// Richardson pair on the grid of `spec` and its refinement by two.
pub fn lambda1_pair<T: Real>(
    v: &Potential<T>,
    spec: &FibreSpec<T>,
    boundary: FibreBoundary<T>,
    tol: &Tolerances,
) -> Result<Lambda1Estimate<T>> {
    let coarse = lambda1_on_grid(v, spec, boundary, tol)?;
    let fine = lambda1_on_grid(v, &spec.with_cells(2 * spec.cells), boundary, tol)?;
    let three = T::lit(3.0);
    Ok(Lambda1Estimate {
        value: (T::lit(4.0) * fine - coarse) / three,
        coarse,
        fine,
        cells: spec.cells,
        error_estimate: (fine - coarse).abs() / three,
    })
}

/// Certified lowest fibre eigenvalue: the grid is doubled from `spec` until
/// the Richardson error estimate is at most
/// `fibre_richardson_rel * max(1, |lambda|)`.
pub fn lambda1_certified<T: Real>(
    v: &Potential<T>,
    spec: &FibreSpec<T>,
    boundary: FibreBoundary<T>,
    tol: &Tolerances,
) -> Result<Lambda1Estimate<T>> {
    let rel = T::lit(tol.fibre_richardson_rel);
    let mut cells = spec.cells;
    loop {
        let est = lambda1_pair(v, &spec.with_cells(cells), boundary, tol)?;
        if est.error_estimate <= rel * est.value.abs().max(T::one()) {
            return Ok(est);
        }
        if 2 * cells > tol.fibre_max_cells {
            return Err(Error::accuracy(format!(
                "lambda1 (m = {}, eps = {}) not certified at N = {cells}: estimate {}",
                spec.m, spec.eps, est.error_estimate
            )));
        }
        cells *= 2;
    }
}

/// `lambda_1^(m)(eps)` of `A^(m)_eps`, certified.
pub fn lambda1<T: Real>(v: &Potential<T>, m: i64, eps: T, tol: &Tolerances) -> Result<T> {
    let spec = FibreSpec::resolved(m, eps, tol)?;
    Ok(lambda1_certified(v, &spec, FibreBoundary::Scaled, tol)?.value)
}

/// Certified lowest eigenvalue of a limit fibre (Robin or Dirichlet).
pub fn limit_lambda1<T: Real>(m: i64, boundary: FibreBoundary<T>, tol: &Tolerances) -> Result<T> {
    if let FibreBoundary::Scaled = boundary {
        return Err(Error::domain("limit fibre needs a Robin or Dirichlet boundary"));
    }
    let spec = FibreSpec { m, eps: T::one(), cells: tol.fibre_min_cells };
    Ok(lambda1_certified(&Potential::zero(), &spec, boundary, tol)?.value)
}

/// `lambda_1^(m)(eps)` over a grid of `(m, eps)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lambda1Map<T> {
    pub m: Vec<i64>,
    pub eps: Vec<T>,
    /// `values[i][j]` belongs to `m[i]`, `eps[j]`.
    pub values: Vec<Vec<T>>,
    /// Per `m`, the largest `|lambda(eps_j+1) - lambda(eps_j)|`.
    pub max_jump: Vec<T>,
}

pub fn lambda1_map<T: Real>(v: &Potential<T>, m_list: &[i64], eps_list: &[T], tol: &Tolerances) -> Result<Lambda1Map<T>> {
    for eps in eps_list {
        FibreSpec::resolved(0, *eps, tol)?;
    }
    let jobs: Vec<(i64, T)> = m_list.iter().flat_map(|m| eps_list.iter().map(move |e| (*m, *e))).collect();
    let flat = jobs
        .par_iter()
        .map(|(m, eps)| lambda1(v, *m, *eps, tol))
        .collect::<Result<Vec<T>>>()?;
    let values: Vec<Vec<T>> = flat.chunks(eps_list.len().max(1)).map(|c| c.to_vec()).collect();
    let max_jump = values
        .iter()
        .map(|row| row.windows(2).map(|w| (w[1] - w[0]).abs()).fold(T::zero(), T::max))
        .collect();
    Ok(Lambda1Map { m: m_list.to_vec(), eps: eps_list.to_vec(), values, max_jump })
}

/// One pinned pair of the counterexample search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterexamplePair {
    pub m: i64,
    pub eps: f64,
    /// `lambda_1^(m)(eps)` at the pinned scale.
    pub lambda1: f64,
    /// `|lambda_1 - beta|`.
    pub residual: f64,
    /// Coarse cell count of the Richardson pair used for the bisection.
    pub cells: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub eps_decreasing: bool,
    pub m_increasing: bool,
    /// `eps_k < sqrt(||V||_inf) / m_k` for every pair.
    pub below_threshold: bool,
}

impl Certificate {
    pub fn all(&self) -> bool {
        self.eps_decreasing && self.m_increasing && self.below_threshold
    }
}

/// Pairs `(m_k, eps_k)` with `lambda_1^(m_k)(eps_k) = beta`, `m_k` increasing
/// and `eps_k` decreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRecord {
    pub beta: f64,
    pub sup_norm: f64,
    pub mu: Option<f64>,
    pub pairs: Vec<CounterexamplePair>,
    pub certificate: Certificate,
}

impl CounterexampleRecord {
    fn certify(&mut self) {
        let root = self.sup_norm.sqrt();
        self.certificate = Certificate {
            eps_decreasing: self.pairs.windows(2).all(|w| w[1].eps < w[0].eps),
            m_increasing: self.pairs.windows(2).all(|w| w[1].m > w[0].m),
            below_threshold: self.pairs.iter().all(|p| p.eps < root / p.m as f64),
        };
    }
}

fn partial(pairs: &[CounterexamplePair]) -> Vec<(i64, f64, f64)> {
    pairs.iter().map(|p| (p.m, p.eps, p.residual)).collect()
}

/// Pins `lambda_1^(m)(eps) = beta` for `k` increasing angular indices.
///
/// For each `m` the scale is scanned downward geometrically from
/// `min(eps_prev, sqrt(||V||_inf) / m)` until `lambda_1 < beta`, then the
/// bracket is bisected with the grid frozen at the certified resolution of
/// its lower end. The next index is the smallest `m` above the previous one
/// with `lambda_1^(m)(eps_prev) >= 0`.
pub fn counterexample_search<T: Real>(v: &Potential<T>, beta: T, k: usize, tol: &Tolerances) -> Result<CounterexampleRecord> {
    if !(beta < T::zero()) {
        return Err(Error::domain(format!("beta = {beta} must be negative")));
    }
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    let hyp = check_hypothesis(v, tol)?;
    if !hyp.satisfied() {
        return Err(Error::Precondition(format!(
            "potential must be resonant with a negative bound state (resonant: {}, bound states: {})",
            hyp.resonant, hyp.negative_count
        )));
    }
    let sup = v.sup_norm();
    let root = sup.sqrt();
    let floor = T::lit(tol.counterexample_eps_floor);
    let ratio = T::lit(tol.counterexample_scan_ratio);
    let target = T::lit(tol.counterexample_rel) * beta.abs().max(T::one());

    let mut record = CounterexampleRecord {
        beta: beta.as_f64(),
        sup_norm: sup.as_f64(),
        mu: hyp.mu.map(|x| x.as_f64()),
        pairs: Vec::new(),
        certificate: Certificate { eps_decreasing: true, m_increasing: true, below_threshold: true },
    };
    let mut m: i64 = 1;
    let mut eps_prev = T::infinity();
    for round in 0..k {
        if round > 0 {
            m += 1;
            loop {
                if lambda1(v, m, eps_prev, tol)? >= T::zero() {
                    break;
                }
                m += 1;
            }
        }
        let start = eps_prev.min(root / T::from_i64(m).expect("small index"));
        // Geometric scan for a bracket (lo, hi) with lambda(lo) < beta <= lambda(hi).
        let mut hi = start;
        let mut lo = hi * ratio;
        let lo_est = loop {
            if lo < floor {
                return Err(Error::SearchDepth {
                    reason: format!("no scale with lambda_1 < {beta} for m = {m} above eps = {floor}"),
                    partial: partial(&record.pairs),
                });
            }
            let spec = FibreSpec::resolved(m, lo, tol)?;
            let est = lambda1_certified(v, &spec, FibreBoundary::Scaled, tol)?;
            if est.value < beta {
                break est;
            }
            hi = lo;
            lo = lo * ratio;
        };
        // Bisection on a frozen grid; the Richardson value is continuous in eps.
        let cells = lo_est.cells;
        let f = |eps: T| -> Result<T> {
            Ok(lambda1_pair(v, &FibreSpec { m, eps, cells }, FibreBoundary::Scaled, tol)?.value - beta)
        };
        let f_lo = f(lo)?;
        let f_hi = f(hi)?;
        if !(f_lo < T::zero() && f_hi >= T::zero()) {
            return Err(Error::accuracy(format!("bracket lost on frozen grid for m = {m}")));
        }
        let (mut eps, mut value) = if -f_lo < f_hi { (lo, f_lo) } else { (hi, f_hi) };
        for _ in 0..200 {
            if value.abs() <= target {
                break;
            }
            let mid = (lo + hi) / T::lit(2.0);
            let f_mid = f(mid)?;
            if f_mid < T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
            (eps, value) = (mid, f_mid);
            if hi - lo <= T::epsilon() * hi {
                break;
            }
        }
        if value.abs() > target {
            return Err(Error::accuracy(format!("bisection for m = {m} stalled at residual {value}")));
        }
        record.pairs.push(CounterexamplePair {
            m,
            eps: eps.as_f64(),
            lambda1: (value + beta).as_f64(),
            residual: value.abs().as_f64(),
            cells,
        });
        eps_prev = eps;
    }
    record.certify();
    Ok(record)
}

/// Weighted `L^2(r dr)` norm of
/// `(A^(m)_eps - i)^{-1} v - (A^(m)_limit - i)^{-1} v` on the grid of `spec`.
pub fn fibre_resolvent_gap<T: Real>(
    v: &Potential<T>,
    spec: &FibreSpec<T>,
    probe: &[T],
    limit: FibreBoundary<T>,
) -> Result<T> {
    if probe.len() != spec.cells {
        return Err(Error::domain(format!("probe has {} samples, expected {}", probe.len(), spec.cells)));
    }
    let i = Complex::new(T::zero(), T::one());
    let scaled = assemble_fibre(v, spec, FibreBoundary::Scaled)?;
    let reference = assemble_fibre(v, spec, limit)?;
    let rhs: Vec<Complex<T>> = probe.iter().map(|x| Complex::new(*x, T::zero())).collect();
    let u = scaled.solve_shifted(i, &rhs)?;
    let w = reference.solve_shifted(i, &rhs)?;
    let diff: Vec<Complex<T>> = u.iter().zip(&w).map(|(a, b)| *a - *b).collect();
    Ok(scaled.norm_complex(&diff))
}

/// Both sides of `||(J_eps - I) u|| <= ||psi_0 - 1||_inf ||u||_{annulus}`,
/// where `J_eps` multiplies by `psi_0((1 - r) / eps)`. Norms are over the disk
/// for a radial `u` sampled at the cell centres of `grid`.
pub fn identification_gap<T: Real>(
    u: &[T],
    grid: &RadialGrid<T>,
    v: &Potential<T>,
    eps: T,
    tol: &Tolerances,
) -> Result<(T, T)> {
    if u.len() != grid.cells {
        return Err(Error::domain(format!("u has {} samples, expected {}", u.len(), grid.cells)));
    }
    if !(eps > T::zero()) {
        return Err(Error::domain(format!("eps = {eps} must be positive")));
    }
    let psi0 = canonical_solution(v, tol)?;
    if psi0.mode != TailMode::Resonant {
        return Err(Error::Precondition("identification needs a resonant potential".into()));
    }
    let layer = T::one() - v.support_bound() * eps;
    let two_pi = T::lit(2.0) * T::PI();
    let mut lhs = T::zero();
    let mut annulus = T::zero();
    for (i, ui) in u.iter().enumerate() {
        let r = grid.centre(i);
        let w = r * grid.h;
        let d = psi0.value((T::one() - r) / eps) - T::one();
        lhs += w * d * d * *ui * *ui;
        if r > layer {
            annulus += w * *ui * *ui;
        }
    }
    Ok(((two_pi * lhs).sqrt(), psi0.sup_psi_minus_one * (two_pi * annulus).sqrt()))
}

fn hardy_operator<T: Real>(cells: usize, singular_weight: bool) -> Result<TridiagonalOperator<T>> {
    let grid = RadialGrid::<T>::new(cells);
    let stiffness = assemble_fibre(
        &Potential::zero(),
        &FibreSpec { m: 0, eps: T::one(), cells },
        FibreBoundary::Dirichlet,
    )?;
    let weight = grid
        .weights()
        .into_iter()
        .enumerate()
        .map(|(i, w)| {
            if singular_weight {
                let d = T::one() - grid.centre(i);
                w / (d * d)
            } else {
                w
            }
        })
        .collect();
    TridiagonalOperator::with_weight(stiffness.diag().to_vec(), stiffness.offdiag().to_vec(), weight)
}

/// Discrete Hardy quotient `inf int |f'|^2 r dr / int f^2 (1 - r)^{-2} r dr`
/// of the `m = 0` fibre with Dirichlet condition at `r = 1`.
pub fn hardy_constant_disk<T: Real>(cells: usize, tol: &Tolerances) -> Result<T> {
    if cells < tol.fibre_min_cells {
        return Err(Error::domain(format!("N = {cells} is below {}", tol.fibre_min_cells)));
    }
    Ok(hardy_operator::<T>(cells, true)?.lowest_eigenvalues(1, tol)?[0])
}

/// The same quotient with the distance weight replaced by one; its value is
/// the lowest Dirichlet eigenvalue of the disk.
pub fn hardy_constant_disk_unit_weight<T: Real>(cells: usize, tol: &Tolerances) -> Result<T> {
    Ok(hardy_operator::<T>(cells, false)?.lowest_eigenvalues(1, tol)?[0])
}
