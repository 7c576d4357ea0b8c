//! Independent reference computations used only by the test suites.
#![allow(dead_code)]

use num_complex::Complex64;

/// `det(A - lambda I)` of a dense matrix by Gaussian elimination with
/// partial pivoting.
pub fn shifted_determinant(a: &[Vec<f64>], lambda: f64) -> f64 {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    let mut det = 1.0;
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
        if m[p][col] == 0.0 {
            return 0.0;
        }
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        det *= m[col][col];
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    det
}

pub fn dense_tridiagonal(diag: &[f64], off: &[f64]) -> Vec<Vec<f64>> {
    let n = diag.len();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        a[i][i] = diag[i];
        if i + 1 < n {
            a[i][i + 1] = off[i];
            a[i + 1][i] = off[i];
        }
    }
    a
}

/// All eigenvalues of a small dense symmetric matrix: sign changes of the
/// characteristic polynomial on a uniform scan of the Gershgorin interval,
/// each refined by bisection. The scan is refined until `n` roots are found.
pub fn charpoly_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, row) in a.iter().enumerate() {
        let r: f64 = row.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| x.abs()).sum();
        lo = lo.min(row[i] - r);
        hi = hi.max(row[i] + r);
    }
    lo -= 1e-3 * (1.0 + lo.abs());
    hi += 1e-3 * (1.0 + hi.abs());
    let mut points = 4096;
    loop {
        let mut roots = Vec::new();
        let xs: Vec<f64> = (0..=points).map(|k| lo + (hi - lo) * k as f64 / points as f64).collect();
        let fs: Vec<f64> = xs.iter().map(|x| shifted_determinant(a, *x)).collect();
        for k in 0..points {
            if fs[k] == 0.0 {
                roots.push(xs[k]);
                continue;
            }
            if fs[k] * fs[k + 1] < 0.0 {
                let (mut l, mut r, fl) = (xs[k], xs[k + 1], fs[k]);
                for _ in 0..200 {
                    let mid = 0.5 * (l + r);
                    if mid <= l || mid >= r {
                        break;
                    }
                    if shifted_determinant(a, mid) * fl > 0.0 {
                        l = mid;
                    } else {
                        r = mid;
                    }
                }
                roots.push(0.5 * (l + r));
            }
        }
        if roots.len() == n || points > 1 << 22 {
            return roots;
        }
        points *= 4;
    }
}

/// Solves the dense complex system `m x = b` by Gaussian elimination with
/// partial pivoting.
pub fn dense_complex_solve(mut m: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Vec<Complex64> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm())).unwrap();
        m.swap(p, col);
        b.swap(p, col);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                let t = m[col][c];
                m[r][c] -= f * t;
            }
            let t = b[col];
            b[r] -= f * t;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s -= m[r][c] * x[c];
        }
        x[r] = s / m[r][r];
    }
    x
}

/// Bessel function of the first kind by its power series (accurate for
/// moderate arguments, `|x| < 15`).
pub fn bessel_j(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = half.powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..200 {
        let k = k as f64;
        term *= -half * half / (k * (k + n as f64));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Root of `f` in `[lo, hi]` by bisection (requires a sign change).
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) < 0.0, "no sign change on [{lo}, {hi}]");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) * flo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// First positive zero of `J_n`, located by scanning then bisection.
pub fn bessel_zero(n: u32) -> f64 {
    let mut x = 0.5;
    while bessel_j(n, x) * bessel_j(n, x + 0.05) > 0.0 {
        x += 0.05;
    }
    bisect(|t| bessel_j(n, t), x, x + 0.05)
}

/// Lowest Robin eigenvalue of the unit disk (`m = 0`):
/// `sqrt(l) J_0'(sqrt(l)) + gamma J_0(sqrt(l)) = 0`, i.e. `x J_1(x) = gamma J_0(x)`.
pub fn robin_disk_eigenvalue(gamma: f64) -> f64 {
    let x = bisect(|x| x * bessel_j(1, x) - gamma * bessel_j(0, x), 1e-6, bessel_zero(0));
    x * x
}
