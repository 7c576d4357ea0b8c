//! Zero-energy resonances of compactly supported half-line potentials.
//!
//! A potential `V` supported in `[0, a]` is resonant when the solution of
//! `-psi'' + V psi = 0`, `psi(0) = 0` stays bounded. Beyond `a` the solution is
//! affine, so boundedness is the single condition `psi'(a) = 0`. Everything in
//! this module is built on one fixed-step RK4 shooting integrator whose step
//! count is certified by comparison with the halved step.

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::halfline::dirichlet_segment_operator;
use crate::potential::Potential;
use crate::scalar::Real;

/// Endpoint data of the initial value problem `psi(0) = 0`, `psi'(0) = 1`.
///
/// For very deep or very high wells the integrator renormalizes the linear
/// solution on the fly; the true endpoint values are the stored ones times
/// `exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingResult<T> {
    pub value_at_a: T,
    pub derivative_at_a: T,
    pub log_scale: T,
    /// Sign changes of `psi` on `(0, a)`.
    pub nodes: usize,
    pub energy: T,
    /// Certified RK4 step count over `[0, a]`.
    pub steps: usize,
}

impl<T: Real> ShootingResult<T> {
    /// `|psi'(a)|` relative to `max(|psi(a)|, |psi'(a)|, 1)`.
    pub fn derivative_residual(&self) -> T {
        let scale = self.value_at_a.abs().max(self.derivative_at_a.abs()).max(T::one());
        self.derivative_at_a.abs() / scale
    }

    /// Zeros of the zero-energy solution on the whole half-line: the interior
    /// nodes plus the zero of the affine tail when `psi(a) psi'(a) < 0`.
    pub fn halfline_zero_count(&self) -> usize {
        self.nodes + usize::from(self.value_at_a * self.derivative_at_a < T::zero())
    }
}

/// Normalization used for the canonical solution beyond the support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMode {
    /// `psi_0(t) = 1` for `t > a`.
    Resonant,
    /// `psi_0'(t) = 1` for `t > a`.
    NonResonant,
}

/// The resonant or non-resonant solution `psi_0`, sampled on `[0, a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalSolution<T> {
    pub t: Vec<T>,
    pub psi: Vec<T>,
    pub dpsi: Vec<T>,
    pub mode: TailMode,
    /// `||psi_0||_inf` over `[0, a]`.
    pub sup_psi: T,
    /// `||psi_0'||_inf` over `[0, a]`.
    pub sup_dpsi: T,
    /// `||psi_0 - 1||_inf` over `[0, a]` (the constant of the identification bound).
    pub sup_psi_minus_one: T,
}

impl<T: Real> CanonicalSolution<T> {
    pub fn support_bound(&self) -> T {
        *self.t.last().expect("non-empty trajectory")
    }

    /// `psi_0(t)` with the affine or constant tail beyond `a`.
    pub fn value(&self, t: T) -> T {
        self.value_and_derivative(t).0
    }

    pub fn value_and_derivative(&self, t: T) -> (T, T) {
        let a = self.support_bound();
        let n = self.t.len();
        if t >= a {
            let (pa, da) = (self.psi[n - 1], self.dpsi[n - 1]);
            return match self.mode {
                TailMode::Resonant => (pa, T::zero()),
                TailMode::NonResonant => (pa + da * (t - a), da),
            };
        }
        let t = t.max(T::zero());
        let j = self.t.partition_point(|x| *x <= t).clamp(1, n - 1);
        let (t0, t1) = (self.t[j - 1], self.t[j]);
        let h = t1 - t0;
        if h <= T::zero() {
            return (self.psi[j], self.dpsi[j]);
        }
        let s = (t - t0) / h;
        let (p0, p1, d0, d1) = (self.psi[j - 1], self.psi[j], self.dpsi[j - 1] * h, self.dpsi[j] * h);
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = two * s3 - three * s2 + T::one();
        let h10 = s3 - two * s2 + s;
        let h01 = -two * s3 + three * s2;
        let h11 = s3 - s2;
        let value = h00 * p0 + h10 * d0 + h01 * p1 + h11 * d1;
        let g00 = T::lit(6.0) * (s2 - s);
        let g10 = three * s2 - T::lit(4.0) * s + T::one();
        let g01 = -g00;
        let g11 = three * s2 - two * s;
        let derivative = (g00 * p0 + g10 * d0 + g01 * p1 + g11 * d1) / h;
        (value, derivative)
    }
}

/// Negative eigenvalue of the Dirichlet half-line operator `-d^2/dt^2 + V`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundState<T> {
    /// Richardson-extrapolated eigenvalue.
    pub energy: T,
    /// Grid step of `values`; nodes are `t_i = i * step`, `i = 0..=N`.
    pub step: T,
    /// Truncation length of the computational domain.
    pub length: T,
    /// Eigenfunction normalized in `L^2(0, length)`, zero at both ends.
    pub values: Vec<T>,
}

/// Hypothesis check: resonant and at least one negative bound state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisCheck<T> {
    pub resonant: bool,
    pub derivative_residual: T,
    pub negative_count: usize,
    /// Lowest bound-state energy, if any.
    pub mu: Option<T>,
}

impl<T: Real> HypothesisCheck<T> {
    pub fn satisfied(&self) -> bool {
        self.resonant && self.negative_count >= 1
    }
}

struct Integration<T> {
    psi: T,
    dpsi: T,
    log_scale: T,
    nodes: usize,
    path: Option<(Vec<T>, Vec<T>, Vec<T>)>,
}

/// Fixed-step RK4 for `psi'' = (V - E) psi` from `psi(0) = 0`, `psi'(0) = 1`.
///
/// Steps are distributed over the smooth pieces of `V` so that every
/// breakpoint is a grid node.
fn integrate<T: Real>(v: &Potential<T>, energy: T, steps: usize, store: bool) -> Integration<T> {
    let a = v.support_bound();
    let pieces = v.pieces();
    let limit = T::max_value().sqrt().sqrt();
    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);

    let (mut psi, mut dpsi) = (T::zero(), T::one());
    let mut log_scale = T::zero();
    let mut nodes = 0;
    let mut last_sign = 0i8;
    let mut path = store.then(|| (vec![T::zero()], vec![psi], vec![dpsi]));

    for (j, &(t0, t1)) in pieces.iter().enumerate() {
        let share = ((t1 - t0) / a * T::from_count(steps)).round().to_usize().unwrap_or(1).max(1);
        let h = (t1 - t0) / T::from_count(share);
        let f = |t: T| v.piece_value(j, t) - energy;
        for s in 0..share {
            let t = t0 + T::from_count(s) * h;
            let (q0, q1, q2) = (f(t), f(t + half * h), f(t + h));
            let k1p = dpsi;
            let k1d = q0 * psi;
            let k2p = dpsi + half * h * k1d;
            let k2d = q1 * (psi + half * h * k1p);
            let k3p = dpsi + half * h * k2d;
            let k3d = q1 * (psi + half * h * k2p);
            let k4p = dpsi + h * k3d;
            let k4d = q2 * (psi + h * k3p);
            psi += h * sixth * (k1p + T::lit(2.0) * (k2p + k3p) + k4p);
            dpsi += h * sixth * (k1d + T::lit(2.0) * (k2d + k3d) + k4d);

            let size = psi.abs() + dpsi.abs();
            if size > limit {
                psi /= size;
                dpsi /= size;
                log_scale += size.ln();
                if let Some((_, p, d)) = path.as_mut() {
                    p.iter_mut().chain(d.iter_mut()).for_each(|x| *x /= size);
                }
            }
            let sign = if psi > T::zero() {
                1
            } else if psi < T::zero() {
                -1
            } else {
                0
            };
            let at_end = j + 1 == pieces.len() && s + 1 == share;
            if sign != 0 {
                if last_sign != 0 && sign != last_sign && !at_end {
                    nodes += 1;
                }
                last_sign = sign;
            }
            if let Some((tt, p, d)) = path.as_mut() {
                tt.push(if s + 1 == share { t1 } else { t + h });
                p.push(psi);
                d.push(dpsi);
            }
        }
    }
    Integration { psi, dpsi, log_scale, nodes, path }
}

fn endpoints_agree<T: Real>(x: &Integration<T>, y: &Integration<T>, rel: T) -> bool {
    let nx = x.psi.hypot(x.dpsi);
    let ny = y.psi.hypot(y.dpsi);
    let dir = (x.psi / nx - y.psi / ny).hypot(x.dpsi / nx - y.dpsi / ny);
    let mag = (nx.ln() + x.log_scale) - (ny.ln() + y.log_scale);
    dir <= rel && mag.abs() <= rel
}

/// Smallest step count (base count times a power of two) for which the RK4
/// endpoint agrees with the halved step.
pub fn certified_steps<T: Real>(v: &Potential<T>, energy: T, tol: &Tolerances) -> Result<usize> {
    let rel = T::lit(tol.shoot_richardson_rel).max(T::lit(64.0) * T::epsilon());
    let mut n = tol.shoot_steps.max(v.pieces().len());
    let mut coarse = integrate(v, energy, n, false);
    for _ in 0..=tol.shoot_max_doublings {
        let fine = integrate(v, energy, 2 * n, false);
        if endpoints_agree(&coarse, &fine, rel) {
            return Ok(2 * n);
        }
        n *= 2;
        coarse = fine;
    }
    Err(Error::accuracy(format!(
        "shooting did not converge with {n} steps at energy {energy}"
    )))
}

/// Integrates `-psi'' + V psi = E psi`, `psi(0) = 0`, `psi'(0) = 1` to `t = a`.
pub fn shoot<T: Real>(v: &Potential<T>, energy: T, tol: &Tolerances) -> Result<ShootingResult<T>> {
    let steps = certified_steps(v, energy, tol)?;
    let r = integrate(v, energy, steps, false);
    Ok(ShootingResult {
        value_at_a: r.psi,
        derivative_at_a: r.dpsi,
        log_scale: r.log_scale,
        nodes: r.nodes,
        energy,
        steps,
    })
}

/// Resonance test `|psi'(a)| <= tol * max(|psi(a)|, |psi'(a)|, 1)`.
pub fn is_resonant<T: Real>(v: &Potential<T>, tol: &Tolerances) -> Result<bool> {
    let r = shoot(v, T::zero(), tol)?;
    Ok(r.derivative_residual() <= T::lit(tol.resonance))
}

/// All couplings `alpha` in `(0, alpha_max]` for which `alpha V` is resonant.
///
/// `V` must be non-positive and non-trivial. The map `alpha -> psi'_alpha(a)`
/// is scanned on a grid refined until the sign-change count is stable over
/// two refinements; every bracket is then bisected.
pub fn resonant_couplings<T: Real>(v: &Potential<T>, alpha_max: T, tol: &Tolerances) -> Result<Vec<T>> {
    if !v.is_nonpositive() {
        return Err(Error::domain("resonant coupling scan needs a non-positive potential"));
    }
    if v.is_trivial() {
        return Err(Error::domain("resonant coupling scan needs a non-trivial potential"));
    }
    if !(alpha_max > T::zero()) || !alpha_max.is_finite() {
        return Err(Error::domain(format!("alpha_max = {alpha_max} must be positive")));
    }
    let steps = certified_steps(&v.scaled(alpha_max), T::zero(), tol)?;
    let g = |alpha: T| {
        let r = integrate(&v.scaled(alpha), T::zero(), steps, false);
        r.dpsi / r.psi.hypot(r.dpsi)
    };

    let mut cells = 64usize;
    let mut history: Vec<usize> = Vec::new();
    let mut grid: Vec<(T, T)>;
    loop {
        grid = (0..=cells)
            .map(|i| {
                let alpha = alpha_max * T::from_count(i) / T::from_count(cells);
                (alpha, g(alpha))
            })
            .collect();
        let count = grid.windows(2).filter(|w| w[0].1 * w[1].1 < T::zero() || w[1].1 == T::zero()).count();
        history.push(count);
        let n = history.len();
        if n >= 3 && history[n - 1] == history[n - 2] && history[n - 2] == history[n - 3] {
            break;
        }
        if cells >= 1 << 20 {
            return Err(Error::accuracy("coupling scan did not stabilize"));
        }
        cells *= 2;
    }

    let rel = T::lit(tol.coupling_rel * 1e-2).max(T::lit(8.0) * T::epsilon());
    let mut roots = Vec::new();
    for w in grid.windows(2) {
        let ((mut lo, glo), (mut hi, ghi)) = (w[0], w[1]);
        if ghi == T::zero() {
            roots.push(hi);
            continue;
        }
        if glo * ghi >= T::zero() {
            continue;
        }
        while hi - lo > rel * hi {
            let mid = lo + (hi - lo) / T::lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) * glo > T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(lo + (hi - lo) / T::lit(2.0));
    }
    Ok(roots)
}

/// The canonical solution `psi_0`, normalized by `psi(a)` in the resonant case
/// and by `psi'(a)` otherwise.
pub fn canonical_solution<T: Real>(v: &Potential<T>, tol: &Tolerances) -> Result<CanonicalSolution<T>> {
    let steps = certified_steps(v, T::zero(), tol)?;
    let r = integrate(v, T::zero(), steps, true);
    let (t, mut psi, mut dpsi) = r.path.expect("trajectory requested");
    let scale = r.psi.abs().max(r.dpsi.abs()).max(T::one());
    let resonant = r.dpsi.abs() / scale <= T::lit(tol.resonance);
    let norm = r.psi.hypot(r.dpsi);
    let (divisor, mode) = if resonant {
        if r.psi.abs() < T::lit(1e-12) * norm {
            return Err(Error::accuracy("degenerate resonant normalization: psi(a) vanishes"));
        }
        (r.psi, TailMode::Resonant)
    } else {
        (r.dpsi, TailMode::NonResonant)
    };
    psi.iter_mut().chain(dpsi.iter_mut()).for_each(|x| *x /= divisor);
    if let Some(p0) = psi.first_mut() {
        *p0 = T::zero();
    }
    let sup = |xs: &[T]| xs.iter().map(|x| x.abs()).fold(T::zero(), T::max);
    let sup_psi = sup(&psi);
    let sup_dpsi = sup(&dpsi);
    let sup_psi_minus_one = psi.iter().map(|x| (*x - T::one()).abs()).fold(T::zero(), T::max);
    Ok(CanonicalSolution { t, psi, dpsi, mode, sup_psi, sup_dpsi, sup_psi_minus_one })
}

fn bound_states_on<T: Real>(
    v: &Potential<T>,
    length: T,
    step: T,
    k: usize,
    tol: &Tolerances,
) -> Result<Vec<BoundState<T>>> {
    let rel = T::lit(tol.bound_state_rel);
    let mut h = step;
    for _ in 0..=tol.bound_state_max_halvings {
        let n = (length / h).ceil().to_usize().unwrap_or(usize::MAX);
        let coarse = dirichlet_segment_operator(v, T::one(), length, n)?;
        let fine = dirichlet_segment_operator(v, T::one(), length, 2 * n)?;
        let count = fine.count_below(T::zero(), tol);
        if count == 0 {
            return Ok(Vec::new());
        }
        let kk = k.min(count);
        let mc = coarse.lowest_eigenvalues(kk, tol)?;
        let fine_pairs = fine.smallest_eigenvalues(kk, tol)?;
        let agree = mc
            .iter()
            .zip(&fine_pairs)
            .all(|(c, f)| (*c - f.value).abs() <= rel * f.value.abs());
        if agree {
            let hf = length / T::from_count(2 * n);
            return Ok(mc
                .iter()
                .zip(fine_pairs)
                .map(|(c, f)| {
                    let energy = (T::lit(4.0) * f.value - *c) / T::lit(3.0);
                    let mut values = Vec::with_capacity(2 * n + 1);
                    values.push(T::zero());
                    values.extend(f.vector.iter().copied());
                    values.push(T::zero());
                    let norm = (values.iter().map(|x| *x * *x).sum::<T>() * hf).sqrt();
                    let sign = values
                        .iter()
                        .find(|x| x.abs() > T::lit(1e-3) * norm)
                        .map_or(T::one(), |x| x.signum());
                    values.iter_mut().for_each(|x| *x = *x * sign / norm);
                    BoundState { energy, step: hf, length, values }
                })
                .collect());
        }
        h = h / T::lit(2.0);
    }
    Err(Error::accuracy(format!(
        "bound states not certified to {} relative after {} halvings",
        tol.bound_state_rel, tol.bound_state_max_halvings
    )))
}

/// The `min(k, count)` lowest negative eigenvalues of `-d^2/dt^2 + V` on the
/// half-line with a Dirichlet condition at zero.
///
/// The half-line is truncated at `L = a + 80`, then at `L = a + 40 / sqrt(-mu)`
/// where `mu` is the least negative eigenvalue found (clamped to
/// `[a + 10, a + 400]`). An empty result means there is no negative spectrum.
pub fn halfline_bound_states<T: Real>(v: &Potential<T>, k: usize, tol: &Tolerances) -> Result<Vec<BoundState<T>>> {
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    if v.is_nonnegative() {
        return Ok(Vec::new());
    }
    let a = v.support_bound();
    let step = (a / T::lit(2048.0)).min(T::lit(1.0 / 512.0));
    let first = bound_states_on(v, a + T::lit(80.0), step, k, tol)?;
    let Some(top) = first.last() else {
        return Ok(first);
    };
    let reach = (T::lit(40.0) / (-top.energy).sqrt()).max(T::lit(10.0)).min(T::lit(400.0));
    bound_states_on(v, a + reach, step, k, tol)
}

/// Resonance plus negative-spectrum check of a candidate potential.
pub fn check_hypothesis<T: Real>(v: &Potential<T>, tol: &Tolerances) -> Result<HypothesisCheck<T>> {
    let r = shoot(v, T::zero(), tol)?;
    let residual = r.derivative_residual();
    let states = halfline_bound_states(v, usize::MAX, tol)?;
    Ok(HypothesisCheck {
        resonant: residual <= T::lit(tol.resonance),
        derivative_residual: residual,
        negative_count: states.len(),
        mu: states.first().map(|s| s.energy),
    })
}
