//! Compactly supported boundary-profile potentials `V` on `[0, a]` and their
//! boundary-layer scalings `V_eps(d) = eps^{-2} V(d / eps)`.

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spline::ClampedSpline;

/// Minimum number of samples of a sampled-smooth profile.
pub const MIN_SAMPLES: usize = 16;

/// Shape of the unscaled profile (before the coupling multiplier).
#[derive(Debug, Clone, PartialEq)]
pub enum Profile<T> {
    /// `values[j]` on `[breakpoints[j], breakpoints[j+1])`; right-continuous.
    PiecewiseConstant { breakpoints: Vec<T>, values: Vec<T> },
    /// Uniform samples on `[0, a]` joined by a clamped cubic spline.
    Sampled(ClampedSpline<T>),
}

/// Real potential supported in `[0, a]`, scaled by a coupling `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential<T> {
    profile: Profile<T>,
    alpha: T,
    /// Preset name and the user-facing multiplier it was built with.
    preset: Option<(String, T)>,
}

/// Outcome of the small-negative-part test `C_V < C_Omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Check {
    pub holds: bool,
    pub hardy_ratio: f64,
    pub c_omega: f64,
    /// `C_Omega - C_V`; positive when the test passes.
    pub margin: f64,
}

/// Serialized form of a potential (the on-disk JSON schema).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<f64>,
        #[serde(default = "unit_alpha")]
        alpha: f64,
    },
    Sampled {
        a: f64,
        samples: Vec<f64>,
        #[serde(default = "unit_alpha")]
        alpha: f64,
    },
    Preset {
        name: String,
        #[serde(default = "unit_alpha")]
        alpha: f64,
    },
}

fn unit_alpha() -> f64 {
    1.0
}

/// Names accepted by [`Potential::preset`].
pub const PRESETS: &[&str] = &[
    "zero",
    "neg-box",
    "pos-box",
    "weak-box",
    "alpha1-box",
    "alpha2-box",
    "alpha3-box",
    "alpha4-box",
    "smooth-well",
];

impl<T: Real> Potential<T> {
    pub fn piecewise_constant(breakpoints: Vec<T>, values: Vec<T>, alpha: T) -> Result<Self> {
        if breakpoints.len() < 2 || values.len() + 1 != breakpoints.len() {
            return Err(Error::domain(format!(
                "piecewise-constant profile needs values.len() + 1 == breakpoints.len() >= 2 (got {} and {})",
                values.len(),
                breakpoints.len()
            )));
        }
        if breakpoints[0] != T::zero() {
            return Err(Error::domain("first breakpoint must be 0"));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("breakpoints must be strictly increasing"));
        }
        check_finite(values.iter().chain(std::iter::once(&alpha)))?;
        Ok(Self { profile: Profile::PiecewiseConstant { breakpoints, values }, alpha, preset: None })
    }

    /// `value * chi_(0, a)`.
    pub fn indicator(value: T, a: T) -> Result<Self> {
        Self::piecewise_constant(vec![T::zero(), a], vec![T::one()], value)
    }

    pub fn zero() -> Self {
        Self::piecewise_constant(vec![T::zero(), T::one()], vec![T::zero()], T::one())
            .expect("valid zero profile")
    }

    pub fn sampled(a: T, samples: Vec<T>, alpha: T) -> Result<Self> {
        if !(a > T::zero()) {
            return Err(Error::domain("support bound a must be positive"));
        }
        if samples.len() < MIN_SAMPLES {
            return Err(Error::domain(format!(
                "sampled profile needs at least {MIN_SAMPLES} samples, got {}",
                samples.len()
            )));
        }
        check_finite(samples.iter().chain(std::iter::once(&alpha)))?;
        Ok(Self { profile: Profile::Sampled(ClampedSpline::new(a, samples)), alpha, preset: None })
    }

    /// Named preset on `[0, 1]` multiplied by `alpha`.
    ///
    /// The `alphaN-box` presets are `-chi_(0,1)` at the exact resonant
    /// couplings `(N - 1/2)^2 pi^2`.
    pub fn preset(name: &str, alpha: T) -> Result<Self> {
        let pi = T::PI();
        let one = T::one();
        let resonant = |n: f64| -> T {
            let k = (T::lit(n) - T::lit(0.5)) * pi;
            k * k
        };
        let mut v = match name {
            "zero" => Self::piecewise_constant(vec![T::zero(), one], vec![T::zero()], alpha)?,
            "neg-box" => Self::indicator(-alpha, one)?,
            "pos-box" => Self::indicator(alpha, one)?,
            "weak-box" => Self::indicator(-T::lit(0.1) * alpha, one)?,
            "alpha1-box" => Self::indicator(-resonant(1.0) * alpha, one)?,
            "alpha2-box" => Self::indicator(-resonant(2.0) * alpha, one)?,
            "alpha3-box" => Self::indicator(-resonant(3.0) * alpha, one)?,
            "alpha4-box" => Self::indicator(-resonant(4.0) * alpha, one)?,
            "smooth-well" => {
                let n = 256;
                let samples = (0..=n)
                    .map(|i| {
                        let t = T::from_count(i) / T::from_count(n);
                        if t < one {
                            -(one - one / (one - t * t)).exp()
                        } else {
                            T::zero()
                        }
                    })
                    .collect();
                Self::sampled(one, samples, alpha)?
            }
            other => {
                return Err(Error::domain(format!(
                    "unknown preset '{other}' (known: {})",
                    PRESETS.join(", ")
                )))
            }
        };
        v.preset = Some((name.to_string(), alpha));
        Ok(v)
    }

    pub fn from_spec(spec: &PotentialSpec) -> Result<Self> {
        match spec {
            PotentialSpec::PiecewiseConstant { breakpoints, values, a, alpha } => {
                if let (Some(a), Some(last)) = (a, breakpoints.last()) {
                    if (a - last).abs() > 1e-12 * a.abs().max(1.0) {
                        return Err(Error::Parse(format!(
                            "support bound a = {a} disagrees with last breakpoint {last}"
                        )));
                    }
                }
                Self::piecewise_constant(cast_vec(breakpoints), cast_vec(values), T::lit(*alpha))
            }
            PotentialSpec::Sampled { a, samples, alpha } => {
                Self::sampled(T::lit(*a), cast_vec(samples), T::lit(*alpha))
            }
            PotentialSpec::Preset { name, alpha } => Self::preset(name, T::lit(*alpha)),
        }
    }

    /// Serializable description reproducing this potential.
    pub fn to_spec(&self) -> PotentialSpec {
        if let Some((name, alpha)) = &self.preset {
            return PotentialSpec::Preset { name: name.clone(), alpha: alpha.as_f64() };
        }
        match &self.profile {
            Profile::PiecewiseConstant { breakpoints, values } => PotentialSpec::PiecewiseConstant {
                breakpoints: breakpoints.iter().map(|x| x.as_f64()).collect(),
                values: values.iter().map(|x| x.as_f64()).collect(),
                a: None,
                alpha: self.alpha.as_f64(),
            },
            Profile::Sampled(s) => PotentialSpec::Sampled {
                a: s.support().as_f64(),
                samples: s.samples().iter().map(|x| x.as_f64()).collect(),
                alpha: self.alpha.as_f64(),
            },
        }
    }

    pub fn profile(&self) -> &Profile<T> {
        &self.profile
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn preset_name(&self) -> Option<&str> {
        self.preset.as_ref().map(|(n, _)| n.as_str())
    }

    /// Support bound `a`.
    pub fn support_bound(&self) -> T {
        match &self.profile {
            Profile::PiecewiseConstant { breakpoints, .. } => *breakpoints.last().expect("non-empty"),
            Profile::Sampled(s) => s.support(),
        }
    }

    /// The same profile with coupling `c * alpha`.
    pub fn scaled(&self, c: T) -> Self {
        Self {
            profile: self.profile.clone(),
            alpha: self.alpha * c,
            preset: self.preset.as_ref().map(|(n, a)| (n.clone(), *a * c)),
        }
    }

    /// `alpha * profile(t)`, zero beyond `a`.
    pub fn evaluate(&self, t: T) -> Result<T> {
        if t < T::zero() || t.is_nan() {
            return Err(Error::domain(format!("potential evaluated at negative distance {t}")));
        }
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: T) -> T {
        match &self.profile {
            Profile::PiecewiseConstant { breakpoints, values } => {
                if t >= *breakpoints.last().expect("non-empty") {
                    return T::zero();
                }
                let j = breakpoints.partition_point(|b| *b <= t) - 1;
                self.alpha * values[j]
            }
            Profile::Sampled(s) => {
                if t > s.support() {
                    T::zero()
                } else {
                    self.alpha * s.eval(t)
                }
            }
        }
    }

    /// `eps^{-2} V(d / eps)` for distance `d` to the boundary.
    pub fn scaled_evaluate(&self, eps: T, d: T) -> Result<T> {
        if !(eps > T::zero()) {
            return Err(Error::domain(format!("scale eps = {eps} must be positive")));
        }
        Ok(self.evaluate(d / eps)? / (eps * eps))
    }

    /// Smooth pieces `[t0, t1]` covering `[0, a]`; the profile is smooth on
    /// each closed piece when evaluated with [`Self::piece_value`].
    pub fn pieces(&self) -> Vec<(T, T)> {
        match &self.profile {
            Profile::PiecewiseConstant { breakpoints, .. } => {
                breakpoints.windows(2).map(|w| (w[0], w[1])).collect()
            }
            Profile::Sampled(s) => vec![(T::zero(), s.support())],
        }
    }

    /// Value of the `piece`-th smooth piece at `t`, extended continuously to
    /// both ends of the piece.
    pub fn piece_value(&self, piece: usize, t: T) -> T {
        match &self.profile {
            Profile::PiecewiseConstant { values, .. } => self.alpha * values[piece],
            Profile::Sampled(s) => self.alpha * s.eval(t.max(T::zero()).min(s.support())),
        }
    }

    /// Moments `(int V(s) ds, int s V(s) ds)` over `[s0, s1]`.
    ///
    /// Exact for piecewise-constant profiles; three-point Gauss-Legendre per
    /// spline interval (exact for the quartic integrands) otherwise.
    pub fn moments(&self, s0: T, s1: T) -> (T, T) {
        let a = self.support_bound();
        let lo = s0.max(T::zero());
        let hi = s1.min(a);
        if !(hi > lo) {
            return (T::zero(), T::zero());
        }
        let half = T::lit(0.5);
        match &self.profile {
            Profile::PiecewiseConstant { breakpoints, values } => {
                let mut m0 = T::zero();
                let mut m1 = T::zero();
                let first = breakpoints.partition_point(|b| *b <= lo).saturating_sub(1);
                for j in first..values.len() {
                    let x0 = breakpoints[j].max(lo);
                    let x1 = breakpoints[j + 1].min(hi);
                    if x0 >= hi {
                        break;
                    }
                    if x1 > x0 {
                        let v = self.alpha * values[j];
                        m0 += v * (x1 - x0);
                        m1 += v * half * (x1 * x1 - x0 * x0);
                    }
                }
                (m0, m1)
            }
            Profile::Sampled(s) => {
                let h = s.knot_spacing();
                let nodes = [-(T::lit(0.6)).sqrt(), T::zero(), T::lit(0.6).sqrt()];
                let weights = [T::lit(5.0 / 9.0), T::lit(8.0 / 9.0), T::lit(5.0 / 9.0)];
                let mut m0 = T::zero();
                let mut m1 = T::zero();
                let mut i = s.interval(lo);
                loop {
                    let k0 = T::from_count(i) * h;
                    let x0 = k0.max(lo);
                    let x1 = (k0 + h).min(hi);
                    if x1 > x0 {
                        let c = half * (x0 + x1);
                        let r = half * (x1 - x0);
                        for (xn, wn) in nodes.iter().zip(&weights) {
                            let x = c + r * *xn;
                            let v = self.alpha * s.eval(x) * *wn * r;
                            m0 += v;
                            m1 += v * x;
                        }
                    }
                    if k0 + h >= hi || i + 2 >= s.samples().len() {
                        break;
                    }
                    i += 1;
                }
                (m0, m1)
            }
        }
    }

    fn refinement(&self, points: usize) -> impl Iterator<Item = (T, T)> + '_ {
        let a = self.support_bound();
        let n = points.max(1);
        (0..=n).map(move |j| {
            let t = a * T::from_count(j) / T::from_count(n);
            (t, self.eval_unchecked(t))
        })
    }

    /// `||V||_inf`; exact for piecewise-constant profiles, a refined maximum of
    /// the interpolant otherwise.
    pub fn sup_norm(&self) -> T {
        self.sup_norm_with(Tolerances::DEFAULT.refinement_points)
    }

    pub fn sup_norm_with(&self, points: usize) -> T {
        match &self.profile {
            Profile::PiecewiseConstant { values, .. } => {
                values.iter().map(|v| (self.alpha * *v).abs()).fold(T::zero(), T::max)
            }
            Profile::Sampled(s) => {
                let samples = s.samples().iter().map(|v| (self.alpha * *v).abs());
                self.refinement(points)
                    .map(|(_, v)| v.abs())
                    .chain(samples)
                    .fold(T::zero(), T::max)
            }
        }
    }

    /// `C_V = sup_t (-t^2 V(t))`, clamped below at zero.
    ///
    /// For piecewise-constant profiles the supremum is taken in closed form at
    /// the right end of each negative piece.
    pub fn hardy_ratio(&self) -> T {
        self.hardy_ratio_with(Tolerances::DEFAULT.refinement_points)
    }

    pub fn hardy_ratio_with(&self, points: usize) -> T {
        match &self.profile {
            Profile::PiecewiseConstant { breakpoints, values } => values
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let b = breakpoints[j + 1];
                    -(self.alpha * *v) * b * b
                })
                .fold(T::zero(), T::max),
            Profile::Sampled(_) => {
                self.refinement(points).map(|(t, v)| -t * t * v).fold(T::zero(), T::max)
            }
        }
    }

    /// Tests `C_V < C_Omega` for an admissible `C_Omega` in `(0, 1/4]`.
    pub fn classify_theorem2(&self, c_omega: T) -> Result<Theorem2Check> {
        if !(c_omega > T::zero() && c_omega <= T::lit(0.25)) {
            return Err(Error::domain(format!("C_Omega = {c_omega} outside (0, 1/4]")));
        }
        let cv = self.hardy_ratio();
        Ok(Theorem2Check {
            holds: cv < c_omega,
            hardy_ratio: cv.as_f64(),
            c_omega: c_omega.as_f64(),
            margin: (c_omega - cv).as_f64(),
        })
    }

    /// True when `V <= 0` everywhere (up to interpolation round-off).
    pub fn is_nonpositive(&self) -> bool {
        match &self.profile {
            Profile::PiecewiseConstant { values, .. } => {
                values.iter().all(|v| self.alpha * *v <= T::zero())
            }
            Profile::Sampled(_) => {
                let slack = T::lit(1e-12) * self.sup_norm();
                self.refinement(Tolerances::DEFAULT.refinement_points).all(|(_, v)| v <= slack)
            }
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.scaled(-T::one()).is_nonpositive()
    }

    pub fn is_trivial(&self) -> bool {
        self.sup_norm() == T::zero()
    }
}

fn cast_vec<T: Real>(v: &[f64]) -> Vec<T> {
    v.iter().map(|x| T::lit(*x)).collect()
}

fn check_finite<'a, T: Real>(mut it: impl Iterator<Item = &'a T>) -> Result<()> {
    if it.any(|x| !x.is_finite()) {
        Err(Error::domain("non-finite potential data"))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn neg_box() -> Potential<f64> {
        Potential::preset("neg-box", 1.0).unwrap()
    }

    #[test]
    fn box_evaluation_and_support() {
        let v = neg_box();
        assert_eq!(v.evaluate(0.5).unwrap(), -1.0);
        assert_eq!(v.evaluate(0.0).unwrap(), -1.0);
        assert_eq!(v.evaluate(1.0).unwrap(), 0.0);
        assert_eq!(v.evaluate(2.0).unwrap(), 0.0);
        assert!(matches!(v.evaluate(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn right_continuity_at_breakpoints() {
        let v = Potential::piecewise_constant(vec![0.0, 0.5, 1.0], vec![-1.0, -3.0], 1.0).unwrap();
        assert_eq!(v.evaluate(0.5).unwrap(), -3.0);
        assert_eq!(v.evaluate(0.4999).unwrap(), -1.0);
    }

    #[test]
    fn validation_errors() {
        assert!(Potential::<f64>::piecewise_constant(vec![0.1, 1.0], vec![1.0], 1.0).is_err());
        assert!(Potential::<f64>::piecewise_constant(vec![0.0, 1.0, 0.5], vec![1.0, 2.0], 1.0).is_err());
        assert!(Potential::<f64>::sampled(1.0, vec![0.0; 15], 1.0).is_err());
        assert!(Potential::<f64>::sampled(0.0, vec![0.0; 32], 1.0).is_err());
        assert!(Potential::<f64>::preset("nope", 1.0).is_err());
    }

    #[test]
    fn sampled_interpolant_reproduces_samples() {
        let n = 64;
        let samples: Vec<f64> = (0..=n)
            .map(|i| {
                let t = i as f64 / n as f64;
                -(-(t - 0.5).powi(2) / 0.02).exp() * (1.0 - t * t)
            })
            .collect();
        let v = Potential::sampled(1.0, samples.clone(), 1.0).unwrap();
        assert!((v.evaluate(0.5).unwrap() - samples[32]).abs() < 1e-6);
        assert_eq!(v.evaluate(1.5).unwrap(), 0.0);
    }

    #[test]
    fn sup_norms() {
        assert_eq!(neg_box().sup_norm(), 1.0);
        let deep = Potential::<f64>::indicator(-9.0 * PI * PI / 4.0, 1.0).unwrap();
        assert!((deep.sup_norm() - 22.2066099024735).abs() < 1e-10);
        assert_eq!(Potential::<f64>::zero().sup_norm(), 0.0);
    }

    #[test]
    fn scaled_evaluation() {
        let v = neg_box();
        assert!((v.scaled_evaluate(0.1, 0.05).unwrap() + 100.0).abs() < 1e-9);
        assert_eq!(v.scaled_evaluate(0.1, 0.2).unwrap(), 0.0);
        assert_eq!(v.scaled_evaluate(1.0, 0.3).unwrap(), v.evaluate(0.3).unwrap());
        assert!(matches!(v.scaled_evaluate(0.0, 0.3), Err(Error::Domain(_))));
    }

    #[test]
    fn hardy_ratios_and_classification() {
        assert!(neg_box().hardy_ratio() >= 1.0 - 1e-3);
        let weak = Potential::<f64>::preset("weak-box", 1.0).unwrap();
        assert!((weak.hardy_ratio() - 0.1).abs() < 1e-12);
        let c = weak.classify_theorem2(0.25).unwrap();
        assert!(c.holds);
        assert!((c.margin - 0.15).abs() < 1e-12);
        assert!(!neg_box().classify_theorem2(0.25).unwrap().holds);
        let pos = Potential::<f64>::preset("pos-box", 1.0).unwrap();
        assert_eq!(pos.hardy_ratio(), 0.0);
        assert!(pos.classify_theorem2(0.01).unwrap().holds);
        assert!(matches!(pos.classify_theorem2(0.3), Err(Error::Domain(_))));
        assert!(matches!(pos.classify_theorem2(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn moments_of_box() {
        let v = neg_box().scaled(2.0);
        let (m0, m1) = v.moments(0.25, 3.0);
        assert!((m0 + 2.0 * 0.75).abs() < 1e-14);
        assert!((m1 + (1.0 - 0.0625)).abs() < 1e-14);
        assert_eq!(v.moments(1.5, 2.0), (0.0, 0.0));
    }

    #[test]
    fn moments_of_sampled_profile_match_fine_quadrature() {
        let v = Potential::<f64>::preset("smooth-well", 3.0).unwrap();
        let (m0, m1) = v.moments(0.1, 0.83);
        let n = 200_000;
        let h = 0.73 / n as f64;
        let (mut q0, mut q1) = (0.0, 0.0);
        for i in 0..n {
            let t = 0.1 + (i as f64 + 0.5) * h;
            let x = v.evaluate(t).unwrap();
            q0 += x * h;
            q1 += x * t * h;
        }
        assert!((m0 - q0).abs() < 1e-8, "{m0} vs {q0}");
        assert!((m1 - q1).abs() < 1e-8);
    }

    #[test]
    fn spec_round_trip() {
        let json = r#"{"kind":"piecewise_constant","breakpoints":[0,0.5,1],"values":[-1,-2],"alpha":3}"#;
        let spec: PotentialSpec = serde_json::from_str(json).unwrap();
        let v = Potential::<f64>::from_spec(&spec).unwrap();
        assert_eq!(v.evaluate(0.7).unwrap(), -6.0);
        assert_eq!(Potential::<f64>::from_spec(&v.to_spec()).unwrap(), v);
        let preset = Potential::<f64>::preset("alpha2-box", 1.0).unwrap();
        assert_eq!(preset.to_spec(), PotentialSpec::Preset { name: "alpha2-box".into(), alpha: 1.0 });
    }
}
