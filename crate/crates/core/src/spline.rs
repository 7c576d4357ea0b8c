//! Cubic interpolation of uniformly sampled profiles.

use crate::scalar::Real;
use crate::tridiag::TridiagonalLu;

/// Cubic spline through uniform samples on `[0, a]`.
///
/// Natural (`s'' = 0`) at the left end and clamped with `s' = 0` at `t = a`,
/// so a compactly supported profile leaves its support without a kink.
#[derive(Debug, Clone, PartialEq)]
pub struct ClampedSpline<T> {
    a: T,
    h: T,
    values: Vec<T>,
    second: Vec<T>,
}

impl<T: Real> ClampedSpline<T> {
    /// `values.len() >= 2` is assumed; callers validate sample counts.
    pub fn new(a: T, values: Vec<T>) -> Self {
        let n = values.len() - 1;
        let h = a / T::from_count(n);
        let six = T::lit(6.0);
        let mut sub = vec![T::zero(); n];
        let mut diag = vec![T::zero(); n + 1];
        let mut sup = vec![T::zero(); n];
        let mut rhs = vec![T::zero(); n + 1];
        diag[0] = T::one();
        for i in 1..n {
            sub[i - 1] = T::one();
            diag[i] = T::lit(4.0);
            sup[i] = T::one();
            rhs[i] = six * (values[i + 1] - T::lit(2.0) * values[i] + values[i - 1]) / (h * h);
        }
        sub[n - 1] = T::one();
        diag[n] = T::lit(2.0);
        rhs[n] = -six * (values[n] - values[n - 1]) / (h * h);
        let lu = TridiagonalLu::factor(&sub, &diag, &sup).expect("spline system is diagonally dominant");
        lu.solve(&mut rhs);
        Self { a, h, values, second: rhs }
    }

    pub fn support(&self) -> T {
        self.a
    }

    pub fn samples(&self) -> &[T] {
        &self.values
    }

    pub fn knot_spacing(&self) -> T {
        self.h
    }

    /// Index of the knot interval containing `t`, clamped to the grid.
    pub fn interval(&self, t: T) -> usize {
        let n = self.values.len() - 1;
        let i = (t / self.h).floor().to_usize().unwrap_or(0);
        i.min(n - 1)
    }

    pub fn eval(&self, t: T) -> T {
        let i = self.interval(t);
        let h = self.h;
        let six = T::lit(6.0);
        let x0 = T::from_count(i) * h;
        let l = t - x0;
        let r = h - l;
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        m0 * r * r * r / (six * h)
            + m1 * l * l * l / (six * h)
            + (y0 / h - m0 * h / six) * r
            + (y1 / h - m1 * h / six) * l
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_nodes_and_clamp() {
        let n = 32;
        let values: Vec<f64> = (0..=n).map(|i| {
            let t = i as f64 / n as f64;
            (1.0 - t * t).powi(2)
        }).collect();
        let s = ClampedSpline::new(1.0, values.clone());
        for (i, v) in values.iter().enumerate() {
            assert!((s.eval(i as f64 / n as f64) - v).abs() < 1e-12);
        }
        let d = (s.eval(1.0) - s.eval(1.0 - 1e-6)) / 1e-6;
        assert!(d.abs() < 1e-5);
    }
}
