//! Symmetric tridiagonal operators in a (possibly) weighted inner product.
//!
//! Eigenvalues come from Sturm-sequence bisection, eigenvectors from inverse
//! iteration, and resolvent applications from a banded LU with partial
//! pivoting. A diagonal weight `W` turns the problem into the generalized
//! pencil `T v = lambda W v`, which is what the finite-volume assemblers emit.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::scalar::{PivotScalar, Real};

/// Symmetric tridiagonal matrix `T` with an optional diagonal Gram matrix `W`.
///
/// The discrete inner product is `<u, v>_w = sum_i w_i u_i conj(v_i)`; without
/// a weight every `w_i` is one.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator<T> {
    diag: Vec<T>,
    offdiag: Vec<T>,
    weight: Option<Vec<T>>,
}

/// Eigenvalue with its eigenvector, normalized to one in the weighted norm.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair<T> {
    pub value: T,
    pub vector: Vec<T>,
    /// One-based position in the ascending spectrum.
    pub index: usize,
}

impl<T: Real> TridiagonalOperator<T> {
    pub fn new(diag: Vec<T>, offdiag: Vec<T>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::domain("tridiagonal operator needs at least one row"));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::domain(format!(
                "offdiagonal has {} entries, expected {}",
                offdiag.len(),
                diag.len() - 1
            )));
        }
        if diag.iter().chain(offdiag.iter()).any(|x| !x.is_finite()) {
            return Err(Error::domain("non-finite operator entry"));
        }
        Ok(Self { diag, offdiag, weight: None })
    }

    pub fn with_weight(diag: Vec<T>, offdiag: Vec<T>, weight: Vec<T>) -> Result<Self> {
        let mut op = Self::new(diag, offdiag)?;
        if weight.len() != op.diag.len() {
            return Err(Error::domain(format!(
                "weight has {} entries, expected {}",
                weight.len(),
                op.diag.len()
            )));
        }
        if let Some(i) = weight.iter().position(|w| !(*w > T::zero()) || !w.is_finite()) {
            return Err(Error::domain(format!("weight entry {i} is not strictly positive")));
        }
        op.weight = Some(weight);
        Ok(op)
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[T] {
        &self.offdiag
    }

    pub fn weight(&self) -> Option<&[T]> {
        self.weight.as_deref()
    }

    #[inline]
    pub fn weight_at(&self, i: usize) -> T {
        self.weight.as_ref().map_or(T::one(), |w| w[i])
    }

    /// Matrix-vector product `T v` (the weight is not applied).
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        apply_tridiagonal(&self.diag, &self.offdiag, v)
    }

    pub fn inner(&self, u: &[T], v: &[T]) -> T {
        u.iter()
            .zip(v)
            .enumerate()
            .map(|(i, (a, b))| self.weight_at(i) * *a * *b)
            .sum()
    }

    pub fn norm(&self, v: &[T]) -> T {
        self.inner(v, v).sqrt()
    }

    /// Weighted norm of a complex vector.
    pub fn norm_complex(&self, v: &[Complex<T>]) -> T {
        v.iter()
            .enumerate()
            .map(|(i, z)| self.weight_at(i) * z.norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    /// Diagonal congruence `W^{-1/2} T W^{-1/2}`.
    ///
    /// The result has no weight and the same eigenvalues as the pencil
    /// `(T, W)`. An unweighted operator is returned unchanged.
    pub fn weighted_to_standard(&self) -> Result<Self> {
        let Some(w) = &self.weight else {
            return Ok(self.clone());
        };
        if let Some(i) = w.iter().position(|x| !(*x > T::zero())) {
            return Err(Error::domain(format!("weight entry {i} is not strictly positive")));
        }
        let diag = self.diag.iter().zip(w).map(|(d, wi)| *d / *wi).collect();
        let offdiag = self
            .offdiag
            .iter()
            .enumerate()
            .map(|(i, e)| *e / (w[i] * w[i + 1]).sqrt())
            .collect();
        Ok(Self { diag, offdiag, weight: None })
    }

    /// Gershgorin enclosure `[lo, hi]` of the (weighted) spectrum.
    pub fn spectral_bounds(&self) -> (T, T) {
        let n = self.len();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..n {
            let wi = self.weight_at(i);
            let mut radius = T::zero();
            if i > 0 {
                radius += self.offdiag[i - 1].abs() / (wi * self.weight_at(i - 1)).sqrt();
            }
            if i + 1 < n {
                radius += self.offdiag[i].abs() / (wi * self.weight_at(i + 1)).sqrt();
            }
            let c = self.diag[i] / wi;
            lo = lo.min(c - radius);
            hi = hi.max(c + radius);
        }
        (lo, hi)
    }

    /// Number of eigenvalues of the pencil `(T, W)` strictly below `lambda`.
    ///
    /// This is the inertia of `T - lambda W` read off the pivots of its LDL^T
    /// factorization (Sylvester's law). A vanishing pivot is replaced by the
    /// configured floor with its sign inherited.
    pub fn count_below(&self, lambda: T, tol: &Tolerances) -> usize {
        let floor = pivot_floor::<T>(tol);
        let mut count = 0;
        let mut q = self.diag[0] - lambda * self.weight_at(0);
        for i in 0..self.len() {
            if i > 0 {
                let e = self.offdiag[i - 1];
                q = (self.diag[i] - lambda * self.weight_at(i)) - e * e / q;
            }
            if q.abs() < floor {
                q = if q.is_sign_negative() { -floor } else { floor };
            }
            if q < T::zero() {
                count += 1;
            }
        }
        count
    }

    /// The `k` lowest eigenvalues by Sturm bisection, ascending.
    pub fn lowest_eigenvalues(&self, k: usize, tol: &Tolerances) -> Result<Vec<T>> {
        let n = self.len();
        if k == 0 || k > n {
            return Err(Error::domain(format!("requested {k} eigenvalues of a {n}x{n} operator")));
        }
        let (lo, hi) = self.spectral_bounds();
        let pad = (hi - lo).abs() * T::lit(1e-8) + T::one();
        let (mut lo, hi) = (lo - pad, hi + pad);
        let rel = T::lit(tol.bisection_rel).max(T::lit(4.0) * T::epsilon());
        let mut values = Vec::with_capacity(k);
        for j in 0..k {
            // Invariant: count_below(a) <= j < count_below(b).
            let (mut a, mut b) = (lo, hi);
            loop {
                let scale = T::one().max(a.abs()).max(b.abs());
                if b - a <= rel * scale {
                    break;
                }
                let mid = a + (b - a) / T::lit(2.0);
                if mid <= a || mid >= b {
                    break;
                }
                if self.count_below(mid, tol) > j {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            values.push(a + (b - a) / T::lit(2.0));
            lo = a;
        }
        Ok(values)
    }

    /// The `k` lowest eigenpairs, eigenvectors normalized in the weighted norm.
    ///
    /// Vectors are computed by inverse iteration on the congruent standard
    /// problem and mapped back with `v = W^{-1/2} v'`. Members of a cluster
    /// are orthogonalized against each other by modified Gram-Schmidt.
    pub fn smallest_eigenvalues(&self, k: usize, tol: &Tolerances) -> Result<Vec<EigenPair<T>>> {
        let values = self.lowest_eigenvalues(k, tol)?;
        let standard = self.weighted_to_standard()?;
        let mut rng = ChaCha8Rng::seed_from_u64(tol.seed);
        let cluster_rel = T::lit(tol.cluster_rel);
        let mut pairs: Vec<EigenPair<T>> = Vec::with_capacity(k);
        let mut cluster_start = 0;
        for (j, &value) in values.iter().enumerate() {
            if j > 0 {
                let prev = values[j - 1];
                if (value - prev).abs() > cluster_rel * T::one().max(value.abs()) {
                    cluster_start = j;
                }
            }
            let cluster: Vec<&[T]> =
                pairs[cluster_start..j].iter().map(|p| p.vector.as_slice()).collect();
            let standard_vec = standard.inverse_iteration(value, &cluster, &mut rng, tol)?;
            pairs.push(EigenPair { value, vector: standard_vec, index: j + 1 });
        }
        if let Some(w) = &self.weight {
            for p in &mut pairs {
                for (x, wi) in p.vector.iter_mut().zip(w) {
                    *x /= wi.sqrt();
                }
            }
        }
        Ok(pairs)
    }

    fn inverse_iteration(
        &self,
        lambda: T,
        cluster: &[&[T]],
        rng: &mut ChaCha8Rng,
        tol: &Tolerances,
    ) -> Result<Vec<T>> {
        let n = self.len();
        let norm_t = self.row_norm_max();
        let eps = T::epsilon();
        let rel = T::lit(tol.bisection_rel).max(T::lit(4.0) * eps);
        let res_tol = T::lit(tol.eigen_residual) * (T::one() + lambda.abs())
            + T::lit(16.0) * eps * norm_t
            + T::lit(2.0) * rel * T::one().max(lambda.abs());

        let mut x: Vec<T> = (0..n).map(|_| T::lit(rng.random_range(-1.0..1.0))).collect();
        normalize(&mut x);
        if n == 1 {
            return Ok(vec![T::one()]);
        }

        let mut sigma = lambda;
        let lu = loop {
            let shifted: Vec<T> = self.diag.iter().map(|d| *d - sigma).collect();
            match TridiagonalLu::factor(&self.offdiag, &shifted, &self.offdiag) {
                Ok(lu) => break lu,
                Err(_) => sigma += eps * norm_t.max(T::one()),
            }
        };

        let mut last_residual = T::infinity();
        for _ in 0..tol.inverse_iteration_max {
            lu.solve(&mut x);
            for q in cluster {
                let c: T = x.iter().zip(q.iter()).map(|(a, b)| *a * *b).sum();
                for (xi, qi) in x.iter_mut().zip(q.iter()) {
                    *xi -= c * *qi;
                }
            }
            if !normalize(&mut x) {
                return Err(Error::accuracy("inverse iteration collapsed to the zero vector"));
            }
            let tx = self.apply(&x);
            let residual =
                tx.iter().zip(&x).map(|(a, b)| (*a - lambda * *b).powi(2)).sum::<T>().sqrt();
            if residual <= res_tol {
                return Ok(x);
            }
            last_residual = residual;
        }
        Err(Error::accuracy(format!(
            "inverse iteration for eigenvalue {lambda} stalled at residual {last_residual} (target {res_tol})"
        )))
    }

    fn row_norm_max(&self) -> T {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.offdiag[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.offdiag[i].abs();
                }
                s
            })
            .fold(T::zero(), T::max)
    }

    /// Solves `(T - z W) u = W rhs`, i.e. applies the resolvent of the operator
    /// `W^{-1} T` at `z` to `rhs`.
    pub fn solve_shifted(&self, z: Complex<T>, rhs: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let n = self.len();
        if rhs.len() != n {
            return Err(Error::domain(format!("rhs has {} entries, expected {n}", rhs.len())));
        }
        let off: Vec<Complex<T>> = self.offdiag.iter().map(|e| Complex::from(*e)).collect();
        let diag: Vec<Complex<T>> = (0..n)
            .map(|i| Complex::from(self.diag[i]) - z * self.weight_at(i))
            .collect();
        let scale = diag
            .iter()
            .map(|d| d.norm())
            .chain(self.offdiag.iter().map(|e| e.abs()))
            .fold(T::zero(), T::max);
        let lu = TridiagonalLu::factor(&off, &diag, &off)
            .map_err(|i| Error::Singular(format!("zero pivot in row {i} at shift {z}")))?;
        if z.im == T::zero() {
            let threshold = T::lit(4.0) * T::epsilon() * scale * T::from_count(n);
            if let Some(i) = lu.pivots().iter().position(|p| p.modulus() <= threshold) {
                return Err(Error::Singular(format!(
                    "real shift {z} is numerically an eigenvalue (pivot {i})"
                )));
            }
        }
        let mut u: Vec<Complex<T>> = rhs.iter().enumerate().map(|(i, r)| *r * self.weight_at(i)).collect();
        lu.solve(&mut u);
        Ok(u)
    }

    /// Real right-hand-side convenience wrapper around [`Self::solve_shifted`].
    pub fn resolvent_apply(&self, z: Complex<T>, rhs: &[T]) -> Result<Vec<Complex<T>>> {
        let rhs: Vec<Complex<T>> = rhs.iter().map(|x| Complex::from(*x)).collect();
        self.solve_shifted(z, &rhs)
    }
}

fn pivot_floor<T: Real>(tol: &Tolerances) -> T {
    let f = T::lit(tol.sturm_pivot_floor);
    if f > T::zero() {
        f
    } else {
        T::min_positive_value()
    }
}

fn normalize<T: Real>(x: &mut [T]) -> bool {
    let nrm = x.iter().map(|v| *v * *v).sum::<T>().sqrt();
    if !(nrm > T::zero()) || !nrm.is_finite() {
        return false;
    }
    for v in x.iter_mut() {
        *v /= nrm;
    }
    true
}

pub(crate) fn apply_tridiagonal<T: Real>(diag: &[T], off: &[T], v: &[T]) -> Vec<T> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut s = diag[i] * v[i];
            if i > 0 {
                s += off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += off[i] * v[i + 1];
            }
            s
        })
        .collect()
}

/// LU factorization with partial pivoting of a general tridiagonal matrix
/// (LAPACK `gttrf` layout: `U` has two superdiagonals).
#[derive(Debug, Clone)]
pub(crate) struct TridiagonalLu<F> {
    dl: Vec<F>,
    d: Vec<F>,
    du: Vec<F>,
    du2: Vec<F>,
    swapped: Vec<bool>,
}

impl<F: PivotScalar> TridiagonalLu<F> {
    /// Factors the matrix with subdiagonal `sub`, diagonal `diag` and
    /// superdiagonal `sup`. Returns the row of the first exactly zero pivot on
    /// failure.
    pub(crate) fn factor(sub: &[F], diag: &[F], sup: &[F]) -> std::result::Result<Self, usize> {
        let n = diag.len();
        let mut dl = sub.to_vec();
        let mut d = diag.to_vec();
        let mut du = sup.to_vec();
        let mut du2 = vec![F::zero(); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].modulus() >= dl[i].modulus() {
                if d[i].modulus() > <F::Modulus as num_traits::Zero>::zero() {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = F::zero() - fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if let Some(i) = d.iter().position(|p| p.modulus() == <F::Modulus as num_traits::Zero>::zero()) {
            return Err(i);
        }
        Ok(Self { dl, d, du, du2, swapped })
    }

    pub(crate) fn pivots(&self) -> &[F] {
        &self.d
    }

    pub(crate) fn solve(&self, b: &mut [F]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                let t = self.dl[i] * b[i];
                b[i + 1] -= t;
            }
        }
        b[n - 1] = b[n - 1] / self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}
