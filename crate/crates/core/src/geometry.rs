//! Closed plane curves: curvature, the Robin coefficient `kappa / 2`, the
//! tubular volume factor `1 - kappa t` and the width of a valid tube.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Number of uniform parameter nodes used for minima, maxima and integrals.
pub const QUADRATURE_NODES: usize = 1024;

/// Smallest admissible speed `|gamma'(theta)|`.
pub const MIN_SPEED: f64 = 1e-6;

/// Margin kept by [`BoundaryCurve::rho_and_max_width`]: `1 - kappa_max delta >= 1e-3`.
pub const FOCAL_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
enum Shape<T> {
    Circle { radius: T },
    Ellipse { a: T, b: T },
    /// Real trigonometric interpolant of uniform samples.
    Sampled { theta0: T, x: Fourier<T>, y: Fourier<T>, samples: (Vec<T>, Vec<T>, Vec<T>) },
}

/// Coefficients of `c_0 + sum_k (a_k cos k s + b_k sin k s)`.
#[derive(Debug, Clone, PartialEq)]
struct Fourier<T> {
    cos: Vec<T>,
    sin: Vec<T>,
}

impl<T: Real> Fourier<T> {
    fn interpolate(values: &[T]) -> Self {
        let n = values.len();
        let m = n / 2;
        let two_pi = T::lit(2.0) * T::PI();
        let mut cos = vec![T::zero(); m + 1];
        let mut sin = vec![T::zero(); m + 1];
        for k in 0..=m {
            let (mut c, mut s) = (T::zero(), T::zero());
            for (j, v) in values.iter().enumerate() {
                let phase = two_pi * T::from_count((k * j) % n) / T::from_count(n);
                c += *v * phase.cos();
                s += *v * phase.sin();
            }
            let scale = if k == 0 || (n % 2 == 0 && k == m) { T::one() } else { T::lit(2.0) };
            cos[k] = c * scale / T::from_count(n);
            sin[k] = if n % 2 == 0 && k == m { T::zero() } else { s * scale / T::from_count(n) };
        }
        Self { cos, sin }
    }

    /// Value and first two derivatives at `s`.
    fn eval(&self, s: T) -> [T; 3] {
        let mut out = [self.cos[0], T::zero(), T::zero()];
        for k in 1..self.cos.len() {
            let kk = T::from_count(k);
            let (sn, cs) = (kk * s).sin_cos();
            let (a, b) = (self.cos[k], self.sin[k]);
            out[0] += a * cs + b * sn;
            out[1] += kk * (b * cs - a * sn);
            out[2] -= kk * kk * (a * cs + b * sn);
        }
        out
    }
}

/// Serialized curve description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSpec {
    Circle {
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    /// Closed polygon `(theta_i, x_i, y_i)` on a uniform parameter grid; the
    /// last sample repeats the first.
    Samples {
        theta: Vec<f64>,
        x: Vec<f64>,
        y: Vec<f64>,
    },
}

/// Counterclockwise closed regular simple curve parametrized over one period
/// of length `2 pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve<T> {
    shape: Shape<T>,
}

fn positive<T: Real>(x: T, what: &str) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} = {x} must be positive")))
    }
}

impl<T: Real> BoundaryCurve<T> {
    pub fn circle(radius: T) -> Result<Self> {
        positive(radius, "radius")?;
        Ok(Self { shape: Shape::Circle { radius } })
    }

    /// `(a cos theta, b sin theta)`.
    pub fn ellipse(a: T, b: T) -> Result<Self> {
        positive(a, "semi-axis a")?;
        positive(b, "semi-axis b")?;
        Ok(Self { shape: Shape::Ellipse { a, b } })
    }

    /// Curve through closed samples on a uniform parameter grid of one
    /// period, interpolated trigonometrically.
    pub fn sampled(theta: Vec<T>, x: Vec<T>, y: Vec<T>) -> Result<Self> {
        let len = theta.len();
        if x.len() != len || y.len() != len {
            return Err(Error::domain("theta, x and y must have equal lengths"));
        }
        if len < 9 {
            return Err(Error::domain("a sampled curve needs at least 8 distinct samples"));
        }
        if theta.iter().chain(&x).chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::domain("non-finite curve sample"));
        }
        let n = len - 1;
        let closure = T::lit(1e-9) * x.iter().chain(&y).map(|v| v.abs()).fold(T::one(), T::max);
        if (x[0] - x[n]).abs() > closure || (y[0] - y[n]).abs() > closure {
            return Err(Error::domain("curve is not closed: first and last samples differ"));
        }
        let two_pi = T::lit(2.0) * T::PI();
        let step = two_pi / T::from_count(n);
        if ((theta[n] - theta[0]) - two_pi).abs() > T::lit(1e-9) * two_pi
            || theta.iter().enumerate().any(|(j, t)| (*t - theta[0] - T::from_count(j) * step).abs() > T::lit(1e-9))
        {
            return Err(Error::domain("theta must be a uniform grid spanning one period 2 pi"));
        }
        let area = (0..n).map(|j| x[j] * y[j + 1] - x[j + 1] * y[j]).sum::<T>() / T::lit(2.0);
        if !(area > T::zero()) {
            return Err(Error::domain("curve must be oriented counterclockwise"));
        }
        if let Some((i, j)) = polygon_self_intersection(&x[..n], &y[..n]) {
            return Err(Error::domain(format!("curve is not simple: edges {i} and {j} cross")));
        }
        let curve = Self {
            shape: Shape::Sampled {
                theta0: theta[0],
                x: Fourier::interpolate(&x[..n]),
                y: Fourier::interpolate(&y[..n]),
                samples: (theta, x, y),
            },
        };
        for s in curve.nodes(QUADRATURE_NODES.max(4 * n)) {
            let [_, d1, _] = curve.derivatives(s);
            if d1.0.hypot(d1.1) < T::lit(MIN_SPEED) {
                return Err(Error::domain(format!("curve is not regular near theta = {s}")));
            }
        }
        Ok(curve)
    }

    pub fn from_spec(spec: &CurveSpec) -> Result<Self> {
        let cast = |v: &[f64]| v.iter().map(|x| T::lit(*x)).collect::<Vec<T>>();
        match spec {
            CurveSpec::Circle { radius } => Self::circle(T::lit(*radius)),
            CurveSpec::Ellipse { a, b } => Self::ellipse(T::lit(*a), T::lit(*b)),
            CurveSpec::Samples { theta, x, y } => Self::sampled(cast(theta), cast(x), cast(y)),
        }
    }

    pub fn to_spec(&self) -> CurveSpec {
        let back = |v: &[T]| v.iter().map(|x| x.as_f64()).collect::<Vec<f64>>();
        match &self.shape {
            Shape::Circle { radius } => CurveSpec::Circle { radius: radius.as_f64() },
            Shape::Ellipse { a, b } => CurveSpec::Ellipse { a: a.as_f64(), b: b.as_f64() },
            Shape::Sampled { samples: (t, x, y), .. } => CurveSpec::Samples { theta: back(t), x: back(x), y: back(y) },
        }
    }

    /// `n` uniform parameter values covering one period.
    pub fn nodes(&self, n: usize) -> Vec<T> {
        let start = match &self.shape {
            Shape::Sampled { theta0, .. } => *theta0,
            _ => T::zero(),
        };
        let two_pi = T::lit(2.0) * T::PI();
        (0..n).map(|j| start + two_pi * T::from_count(j) / T::from_count(n)).collect()
    }

    /// `[gamma, gamma', gamma'']` at `theta`.
    pub fn derivatives(&self, theta: T) -> [(T, T); 3] {
        match &self.shape {
            Shape::Circle { radius } => {
                let (s, c) = theta.sin_cos();
                let r = *radius;
                [(r * c, r * s), (-r * s, r * c), (-r * c, -r * s)]
            }
            Shape::Ellipse { a, b } => {
                let (s, c) = theta.sin_cos();
                [(*a * c, *b * s), (-*a * s, *b * c), (-*a * c, -*b * s)]
            }
            Shape::Sampled { theta0, x, y, .. } => {
                let [x0, x1, x2] = x.eval(theta - *theta0);
                let [y0, y1, y2] = y.eval(theta - *theta0);
                [(x0, y0), (x1, y1), (x2, y2)]
            }
        }
    }

    pub fn point(&self, theta: T) -> (T, T) {
        self.derivatives(theta)[0]
    }

    /// Signed curvature, positive on convex arcs of a counterclockwise curve.
    pub fn curvature(&self, theta: T) -> Result<T> {
        match &self.shape {
            Shape::Circle { radius } => Ok(T::one() / *radius),
            Shape::Ellipse { a, b } => {
                let (s, c) = theta.sin_cos();
                let q = *a * *a * s * s + *b * *b * c * c;
                Ok(*a * *b / (q * q.sqrt()))
            }
            Shape::Sampled { .. } => {
                let [_, (x1, y1), (x2, y2)] = self.derivatives(theta);
                let speed = x1.hypot(y1);
                if speed < T::lit(MIN_SPEED) {
                    return Err(Error::domain(format!("curve is not regular at theta = {theta}")));
                }
                Ok((x1 * y2 - y1 * x2) / (speed * speed * speed))
            }
        }
    }

    /// Coefficient `(d - 1) H / 2 = kappa / 2` of the limiting Robin condition.
    pub fn robin_coefficient(&self, theta: T) -> Result<T> {
        Ok(self.curvature(theta)? / T::lit(2.0))
    }

    /// Jacobian `1 - kappa t` of boundary-normal coordinates at depth `t`.
    pub fn volume_factor(&self, theta: T, t: T) -> Result<T> {
        if t < T::zero() {
            return Err(Error::domain(format!("depth t = {t} must be non-negative")));
        }
        Ok(T::one() - self.curvature(theta)? * t)
    }

    fn curvature_extrema(&self) -> Result<(T, T)> {
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for s in self.nodes(QUADRATURE_NODES) {
            let k = self.curvature(s)?;
            lo = lo.min(k);
            hi = hi.max(k);
        }
        Ok((lo, hi))
    }

    /// `rho = min 1 - kappa t` over the nodes and `t in [0, delta]`, and the
    /// largest tube width `delta_max` passing the curvature and sample-based
    /// self-intersection checks.
    pub fn rho_and_max_width(&self, delta: T) -> Result<(T, T)> {
        positive(delta, "tube width delta")?;
        let (_, kappa_max) = self.curvature_extrema()?;
        let rho = if kappa_max > T::zero() { T::one() - kappa_max * delta } else { T::one() };
        if !(rho > T::zero()) {
            return Err(Error::TubeTooWide(format!(
                "1 - kappa_max delta = {rho} <= 0 for delta = {delta}"
            )));
        }
        let focal = if kappa_max > T::zero() {
            (T::one() - T::lit(FOCAL_MARGIN)) / kappa_max
        } else {
            T::infinity()
        };
        Ok((rho, focal.min(self.separation_bound(focal))))
    }

    /// Half the smallest distance between boundary points whose arc distance
    /// exceeds `pi * width`: two such points have disjoint normal segments of
    /// length `width` only when they are at least `2 width` apart.
    fn separation_bound(&self, width: T) -> T {
        let n = 512;
        let nodes = self.nodes(n);
        let points: Vec<(T, T)> = nodes.iter().map(|s| self.point(*s)).collect();
        let speeds: Vec<T> = nodes
            .iter()
            .map(|s| {
                let (x1, y1) = self.derivatives(*s)[1];
                x1.hypot(y1)
            })
            .collect();
        let ds = T::lit(2.0) * T::PI() / T::from_count(n);
        let mut arc = vec![T::zero(); n + 1];
        for j in 0..n {
            arc[j + 1] = arc[j] + speeds[j] * ds;
        }
        let total = arc[n];
        let reach = if width.is_finite() { T::PI() * width } else { total };
        let mut bound = T::infinity();
        for i in 0..n {
            for j in i + 1..n {
                let along = arc[j] - arc[i];
                if along.min(total - along) <= reach {
                    continue;
                }
                let d = (points[i].0 - points[j].0).hypot(points[i].1 - points[j].1);
                bound = bound.min(d / T::lit(2.0));
            }
        }
        bound
    }

    /// `oint kappa ds`, which is `2 pi` for a simple counterclockwise curve.
    pub fn total_turning(&self) -> Result<T> {
        let nodes = self.nodes(QUADRATURE_NODES);
        let ds = T::lit(2.0) * T::PI() / T::from_count(nodes.len());
        let mut sum = T::zero();
        for s in nodes {
            let (x1, y1) = self.derivatives(s)[1];
            sum += self.curvature(s)? * x1.hypot(y1);
        }
        Ok(sum * ds)
    }

    /// Perimeter by the periodic trapezoidal rule.
    pub fn length(&self) -> T {
        let nodes = self.nodes(QUADRATURE_NODES);
        let ds = T::lit(2.0) * T::PI() / T::from_count(nodes.len());
        nodes
            .iter()
            .map(|s| {
                let (x1, y1) = self.derivatives(*s)[1];
                x1.hypot(y1)
            })
            .sum::<T>()
            * ds
    }
}

fn polygon_self_intersection<T: Real>(x: &[T], y: &[T]) -> Option<(usize, usize)> {
    let n = x.len();
    let orient = |a: usize, b: usize, c: usize| {
        let v = (x[b] - x[a]) * (y[c] - y[a]) - (y[b] - y[a]) * (x[c] - x[a]);
        if v > T::zero() {
            1
        } else if v < T::zero() {
            -1
        } else {
            0
        }
    };
    for i in 0..n {
        let i1 = (i + 1) % n;
        for j in i + 2..n {
            let j1 = (j + 1) % n;
            if j1 == i {
                continue;
            }
            let (o1, o2) = (orient(i, i1, j), orient(i, i1, j1));
            let (o3, o4) = (orient(j, j1, i), orient(j, j1, i1));
            if o1 * o2 < 0 && o3 * o4 < 0 {
                return Some((i, j));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sampled_ellipse(a: f64, b: f64, n: usize) -> BoundaryCurve<f64> {
        let theta: Vec<f64> = (0..=n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
        let mut x: Vec<f64> = theta.iter().map(|t| a * t.cos()).collect();
        let mut y: Vec<f64> = theta.iter().map(|t| b * t.sin()).collect();
        x[n] = x[0];
        y[n] = y[0];
        BoundaryCurve::sampled(theta, x, y).unwrap()
    }

    #[test]
    fn circle_quantities() {
        let c = BoundaryCurve::<f64>::circle(2.0).unwrap();
        assert_eq!(c.curvature(0.3).unwrap(), 0.5);
        assert_eq!(c.robin_coefficient(0.3).unwrap(), 0.25);
        let unit = BoundaryCurve::<f64>::circle(1.0).unwrap();
        assert_eq!(unit.volume_factor(1.0, 0.25).unwrap(), 0.75);
        assert_eq!(unit.volume_factor(1.0, 0.0).unwrap(), 1.0);
        assert_eq!(unit.volume_factor(1.0, 1.0).unwrap(), 0.0);
        let (rho, dmax) = unit.rho_and_max_width(0.5).unwrap();
        assert_eq!(rho, 0.5);
        assert!((dmax - 0.999).abs() < 1e-12);
        assert!(matches!(unit.rho_and_max_width(1.1), Err(Error::TubeTooWide(_))));
    }

    #[test]
    fn ellipse_closed_form() {
        let e = BoundaryCurve::<f64>::ellipse(2.0, 1.0).unwrap();
        assert!((e.curvature(0.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((e.robin_coefficient(0.0).unwrap() - 1.0).abs() < 1e-15);
        let (rho, _) = e.rho_and_max_width(0.1).unwrap();
        assert!((rho - 0.8).abs() < 1e-12);
    }

    #[test]
    fn sampled_curves_interpolate_spectrally() {
        let c = sampled_ellipse(1.0, 1.0, 256);
        for s in c.nodes(97) {
            assert!((c.curvature(s + 0.01).unwrap() - 1.0).abs() < 1e-6);
        }
        let e = sampled_ellipse(2.0, 1.0, 256);
        let exact = BoundaryCurve::ellipse(2.0, 1.0).unwrap();
        for s in [0.0, 0.4, 1.3, 2.9, 5.0] {
            assert!((e.curvature(s).unwrap() - exact.curvature(s).unwrap()).abs() < 1e-5);
        }
        assert!((e.total_turning().unwrap() - 2.0 * PI).abs() < 1e-6);
    }

    #[test]
    fn sampled_validation() {
        let theta: Vec<f64> = (0..=16).map(|j| 2.0 * PI * j as f64 / 16.0).collect();
        let x: Vec<f64> = theta.iter().map(|t| t.cos()).collect();
        let y: Vec<f64> = theta.iter().map(|t| -t.sin()).collect();
        assert!(BoundaryCurve::sampled(theta.clone(), x.clone(), y).is_err());
        let open: Vec<f64> = theta.iter().map(|t| t.sin() + 0.1 * t).collect();
        assert!(BoundaryCurve::sampled(theta.clone(), x.clone(), open).is_err());
        // Figure eight: (sin 2t, sin t) crosses itself at the origin.
        let fx: Vec<f64> = theta.iter().map(|t| (2.0 * t).sin()).collect();
        let fy: Vec<f64> = theta.iter().map(|t| t.sin()).collect();
        assert!(BoundaryCurve::sampled(theta, fx, fy).is_err());
    }

    #[test]
    fn spec_round_trip() {
        let spec: CurveSpec = serde_json::from_str(r#"{"kind":"ellipse","a":2,"b":1}"#).unwrap();
        let c = BoundaryCurve::<f64>::from_spec(&spec).unwrap();
        assert_eq!(c.to_spec(), spec);
        assert!(serde_json::from_str::<CurveSpec>(r#"{"kind":"circle","radius":1,"x":2}"#).is_err());
    }
}
