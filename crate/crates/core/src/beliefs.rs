//! Candidate beliefs about the median voter's ideal policy `m`.
//!
//! Every belief is a continuous distribution with full support on `[0, 1]`.
//! The closed-form families are exact; [`NumericDensity`] integrates a
//! piecewise-linear density exactly, so its CDF is differentiable with
//! derivative equal to the reported density.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::{in_unit, Scalar};

/// Smallest density accepted at interior sample points of a [`NumericDensity`].
pub const MIN_INTERIOR_DENSITY: f64 = 1e-12;

/// Slack used by [`MedianBelief::counterexample_condition`] to make `x f(x) > F(x)` strict.
pub const CONDITION_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum BeliefFamily<S> {
    Uniform,
    /// Triangular on `[0, 1]` with the given mode.
    Triangular { mode: S },
    /// `F(x) = x^k`.
    Power { k: S },
    Numeric(NumericDensity<S>),
}

/// Distribution `F` of the median voter's ideal policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BeliefRepr<S>", into = "BeliefRepr<S>")]
#[serde(bound = "S: Scalar")]
pub struct MedianBelief<S> {
    family: BeliefFamily<S>,
}

/// Tabulated density, linearly interpolated between samples and renormalised
/// so that it integrates to one.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericDensity<S> {
    xs: Vec<S>,
    // density values after renormalisation
    fs: Vec<S>,
    // exact integral of the interpolant up to each node; last entry is 1
    cum: Vec<S>,
    // the samples as supplied, kept for serialisation
    raw: Vec<(S, S)>,
}

impl<S: Scalar> NumericDensity<S> {
    /// Builds a density from `(x, f(x))` samples. The first abscissa must be 0,
    /// the last 1, abscissae strictly increasing, densities finite and
    /// nonnegative, and every interior density at least [`MIN_INTERIOR_DENSITY`].
    pub fn new(samples: Vec<(S, S)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(domain("numeric density needs at least two samples"));
        }
        let (first, last) = (samples[0].0, samples[samples.len() - 1].0);
        if first != S::zero() || last != S::one() {
            return Err(domain(format!(
                "numeric density samples must span [0, 1] exactly, got [{first}, {last}]"
            )));
        }
        for (i, w) in samples.windows(2).enumerate() {
            if !(w[1].0 > w[0].0) {
                return Err(domain(format!(
                    "numeric density abscissae must be strictly increasing (sample {})",
                    i + 1
                )));
            }
        }
        let floor = S::lit(MIN_INTERIOR_DENSITY);
        for (i, &(x, f)) in samples.iter().enumerate() {
            if !f.is_finite() || f < S::zero() {
                return Err(domain(format!("density at x={x} must be finite and >= 0, got {f}")));
            }
            let interior = i > 0 && i + 1 < samples.len();
            if interior && f < floor {
                return Err(domain(format!(
                    "density at interior point x={x} is {f}; full support requires >= {MIN_INTERIOR_DENSITY:e}"
                )));
            }
        }

        let xs: Vec<S> = samples.iter().map(|s| s.0).collect();
        let mut cum = Vec::with_capacity(xs.len());
        cum.push(S::zero());
        let half = S::lit(0.5);
        for w in samples.windows(2) {
            let area = (w[1].0 - w[0].0) * (w[0].1 + w[1].1) * half;
            let prev = *cum.last().unwrap();
            cum.push(prev + area);
        }
        let total = *cum.last().unwrap();
        if !(total > S::zero()) || !total.is_finite() {
            return Err(domain("numeric density must have positive finite mass"));
        }
        let fs = samples.iter().map(|s| s.1 / total).collect();
        for c in cum.iter_mut() {
            *c = *c / total;
        }
        *cum.last_mut().unwrap() = S::one();

        Ok(Self { xs, fs, cum, raw: samples })
    }

    /// Tabulates `density` on `n` evenly spaced points of `[0, 1]`.
    pub fn from_fn(n: usize, density: impl Fn(S) -> S) -> Result<Self> {
        if n < 2 {
            return Err(domain("numeric density needs at least two samples"));
        }
        let denom = S::from_usize(n - 1).unwrap();
        let samples = (0..n)
            .map(|i| {
                let x = if i + 1 == n { S::one() } else { S::from_usize(i).unwrap() / denom };
                (x, density(x))
            })
            .collect();
        Self::new(samples)
    }

    pub fn samples(&self) -> &[(S, S)] {
        &self.raw
    }

    fn segment(&self, x: S) -> usize {
        // index j with xs[j] <= x <= xs[j+1]
        let j = self.xs.partition_point(|&v| v <= x);
        j.saturating_sub(1).min(self.xs.len() - 2)
    }

    fn cdf(&self, x: S) -> S {
        let j = self.segment(x);
        let h = x - self.xs[j];
        let width = self.xs[j + 1] - self.xs[j];
        let slope = (self.fs[j + 1] - self.fs[j]) / width;
        let v = self.cum[j] + self.fs[j] * h + slope * h * h * S::lit(0.5);
        v.max(S::zero()).min(S::one())
    }

    fn density(&self, x: S) -> S {
        let j = self.segment(x);
        let h = x - self.xs[j];
        let width = self.xs[j + 1] - self.xs[j];
        self.fs[j] + (self.fs[j + 1] - self.fs[j]) * h / width
    }
}

impl<S: Scalar> MedianBelief<S> {
    pub fn uniform() -> Self {
        Self { family: BeliefFamily::Uniform }
    }

    pub fn triangular(mode: S) -> Result<Self> {
        if !in_unit(mode) {
            return Err(domain(format!("triangular mode must lie in [0, 1], got {mode}")));
        }
        Ok(Self { family: BeliefFamily::Triangular { mode } })
    }

    pub fn power(k: S) -> Result<Self> {
        if !(k > S::zero()) || !k.is_finite() {
            return Err(domain(format!("power exponent must be positive and finite, got {k}")));
        }
        Ok(Self { family: BeliefFamily::Power { k } })
    }

    pub fn numeric(samples: Vec<(S, S)>) -> Result<Self> {
        Ok(Self { family: BeliefFamily::Numeric(NumericDensity::new(samples)?) })
    }

    pub fn family(&self) -> &BeliefFamily<S> {
        &self.family
    }

    /// `F(x)`.
    pub fn cdf(&self, x: S) -> Result<S> {
        check_unit("cdf", x)?;
        Ok(self.cdf_unchecked(x))
    }

    /// `f(x)`. At a kink of the triangular density the left branch is used.
    pub fn density(&self, x: S) -> Result<S> {
        check_unit("density", x)?;
        Ok(self.density_unchecked(x))
    }

    pub(crate) fn cdf_unchecked(&self, x: S) -> S {
        match &self.family {
            BeliefFamily::Uniform => x,
            BeliefFamily::Triangular { mode } => {
                let c = *mode;
                if x <= c && c > S::zero() {
                    x * x / c
                } else if c < S::one() {
                    let r = S::one() - x;
                    S::one() - r * r / (S::one() - c)
                } else {
                    // mode 1 and x > 1 cannot happen on the unit interval
                    S::one()
                }
            }
            BeliefFamily::Power { k } => x.powf(*k),
            BeliefFamily::Numeric(d) => d.cdf(x),
        }
    }

    pub(crate) fn density_unchecked(&self, x: S) -> S {
        let two = S::lit(2.0);
        match &self.family {
            BeliefFamily::Uniform => S::one(),
            BeliefFamily::Triangular { mode } => {
                let c = *mode;
                if x <= c && c > S::zero() {
                    two * x / c
                } else if c < S::one() {
                    two * (S::one() - x) / (S::one() - c)
                } else {
                    S::zero()
                }
            }
            BeliefFamily::Power { k } => {
                if *k == S::one() {
                    S::one()
                } else {
                    *k * x.powf(*k - S::one())
                }
            }
            BeliefFamily::Numeric(d) => d.density(x),
        }
    }

    /// Scans the interior of an evenly spaced `grid_size`-point grid on
    /// `[0, 1]` and returns the first `x` with `x f(x) > F(x) + 1e-12`.
    ///
    /// Any belief with such a point admits a no-commitment equilibrium whose
    /// indirect expected policy decreases in the left candidate's ideal policy.
    pub fn counterexample_condition(&self, grid_size: usize) -> Result<Option<S>> {
        if grid_size < 3 {
            return Err(domain(format!("grid_size must be at least 3, got {grid_size}")));
        }
        let slack = S::lit(CONDITION_SLACK);
        let denom = S::from_usize(grid_size - 1).unwrap();
        let witness = (1..grid_size - 1)
            .map(|i| S::from_usize(i).unwrap() / denom)
            .find(|&x| x * self.density_unchecked(x) > self.cdf_unchecked(x) + slack);
        Ok(witness)
    }
}

fn check_unit<S: Scalar>(what: &str, x: S) -> Result<()> {
    if in_unit(x) {
        Ok(())
    } else {
        Err(domain(format!("{what}: argument {x} outside [0, 1]")))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
#[serde(bound = "S: Scalar")]
enum BeliefRepr<S> {
    Uniform,
    Triangular { mode: S },
    Power { k: S },
    Numeric { samples: Vec<(S, S)> },
}

impl<S: Scalar> TryFrom<BeliefRepr<S>> for MedianBelief<S> {
    type Error = crate::Error;

    fn try_from(repr: BeliefRepr<S>) -> Result<Self> {
        match repr {
            BeliefRepr::Uniform => Ok(Self::uniform()),
            BeliefRepr::Triangular { mode } => Self::triangular(mode),
            BeliefRepr::Power { k } => Self::power(k),
            BeliefRepr::Numeric { samples } => Self::numeric(samples),
        }
    }
}

impl<S: Scalar> From<MedianBelief<S>> for BeliefRepr<S> {
    fn from(b: MedianBelief<S>) -> Self {
        match b.family {
            BeliefFamily::Uniform => BeliefRepr::Uniform,
            BeliefFamily::Triangular { mode } => BeliefRepr::Triangular { mode },
            BeliefFamily::Power { k } => BeliefRepr::Power { k },
            BeliefFamily::Numeric(d) => BeliefRepr::Numeric { samples: d.raw },
        }
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    fn tri() -> MedianBelief<f64> {
        MedianBelief::triangular(0.5).unwrap()
    }

    fn builtins() -> Vec<MedianBelief<f64>> {
        vec![
            MedianBelief::uniform(),
            tri(),
            MedianBelief::triangular(0.2).unwrap(),
            MedianBelief::power(2.0).unwrap(),
            MedianBelief::power(0.5).unwrap(),
        ]
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(MedianBelief::uniform().cdf(0.5).unwrap(), 0.5);
        assert_abs_diff_eq!(tri().cdf(0.4).unwrap(), 0.32, epsilon = 1e-15);
        assert_abs_diff_eq!(MedianBelief::power(2.0).unwrap().cdf(0.5).unwrap(), 0.25, epsilon = 1e-15);
        // upper branch of the triangular: 1 - 2(1-x)^2
        assert_abs_diff_eq!(tri().cdf(0.7).unwrap(), 0.82, epsilon = 1e-15);
    }

    #[test]
    fn density_examples() {
        assert_eq!(MedianBelief::uniform().density(0.3).unwrap(), 1.0);
        assert_abs_diff_eq!(tri().density(0.25).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(tri().density(0.75).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(MedianBelief::power(2.0).unwrap().density(0.5).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn out_of_domain_rejected() {
        let b = tri();
        assert!(matches!(b.cdf(-0.01), Err(crate::Error::Domain(_))));
        assert!(matches!(b.cdf(1.5), Err(crate::Error::Domain(_))));
        assert!(matches!(b.density(f64::NAN), Err(crate::Error::Domain(_))));
        assert!(MedianBelief::triangular(1.2).is_err());
        assert!(MedianBelief::power(0.0).is_err());
        assert!(MedianBelief::power(-1.0).is_err());
    }

    #[test]
    fn endpoints_and_strict_monotonicity() {
        for b in builtins() {
            assert_abs_diff_eq!(b.cdf(0.0).unwrap(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(b.cdf(1.0).unwrap(), 1.0, epsilon = 1e-12);
            let n = 1001;
            let mut prev = b.cdf(0.0).unwrap();
            for i in 1..n {
                let x = i as f64 / (n - 1) as f64;
                let v = b.cdf(x).unwrap();
                assert!(v > prev, "{:?} not strictly increasing at {x}", b.family());
                prev = v;
            }
        }
    }

    #[test]
    fn density_integrates_to_one() {
        // power(0.5) is left out: its density is unbounded at 0
        for b in builtins().into_iter().filter(|b| !matches!(b.family(), BeliefFamily::Power { k } if *k < 1.0)) {
            let n = 100_001;
            let h = 1.0 / (n - 1) as f64;
            let total: f64 = (0..n - 1)
                .map(|i| 0.5 * h * (b.density(i as f64 * h).unwrap() + b.density((i + 1) as f64 * h).unwrap()))
                .sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn numeric_density_matches_triangular() {
        let t = tri();
        let d = NumericDensity::from_fn(10_001, |x| t.density_unchecked(x)).unwrap();
        let b = MedianBelief { family: BeliefFamily::Numeric(d) };
        let mut worst: f64 = 0.0;
        for i in 0..=2000 {
            let x = i as f64 / 2000.0;
            worst = worst.max((b.cdf(x).unwrap() - t.cdf(x).unwrap()).abs());
        }
        assert!(worst < 1e-6, "max deviation {worst}");
        // trapezoid integral of the renormalised density is exactly one
        let total: f64 = match b.family() {
            BeliefFamily::Numeric(d) => d.xs.windows(2).zip(d.fs.windows(2)).map(|(x, f)| 0.5 * (x[1] - x[0]) * (f[0] + f[1])).sum(),
            _ => unreachable!(),
        };
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn numeric_density_renormalises() {
        // constant 2 integrates to 2; after renormalisation it is the uniform
        let b = MedianBelief::numeric(vec![(0.0, 2.0), (0.5, 2.0), (1.0, 2.0)]).unwrap();
        assert_abs_diff_eq!(b.cdf(0.3).unwrap(), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(b.density(0.3).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(b.cdf(1.0).unwrap(), 1.0);
    }

    #[test]
    fn numeric_cdf_derivative_is_density() {
        let b = MedianBelief::numeric(vec![(0.0, 0.5), (0.3, 2.0), (0.7, 0.8), (1.0, 1.1)]).unwrap();
        let h = 1e-6;
        for &x in &[0.1, 0.25, 0.4, 0.69, 0.9] {
            let fd = (b.cdf(x + h).unwrap() - b.cdf(x - h).unwrap()) / (2.0 * h);
            assert_abs_diff_eq!(fd, b.density(x).unwrap(), epsilon = 1e-7);
        }
    }

    #[test]
    fn numeric_density_validation() {
        assert!(MedianBelief::<f64>::numeric(vec![(0.0, 1.0)]).is_err());
        assert!(MedianBelief::numeric(vec![(0.1, 1.0), (1.0, 1.0)]).is_err());
        assert!(MedianBelief::numeric(vec![(0.0, 1.0), (0.9, 1.0)]).is_err());
        assert!(MedianBelief::numeric(vec![(0.0, 1.0), (0.5, 1.0), (0.5, 1.0), (1.0, 1.0)]).is_err());
        assert!(MedianBelief::numeric(vec![(0.0, 1.0), (0.5, -1.0), (1.0, 1.0)]).is_err());
        // zero interior density breaks full support
        assert!(MedianBelief::numeric(vec![(0.0, 1.0), (0.5, 0.0), (1.0, 1.0)]).is_err());
        // zero at the endpoints is fine
        assert!(MedianBelief::numeric(vec![(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)]).is_ok());
        assert!(MedianBelief::numeric(vec![(0.0, 0.0), (1.0, 0.0)]).is_err());
    }

    #[test]
    fn counterexample_condition_examples() {
        let w = tri().counterexample_condition(101).unwrap();
        assert!(w.is_some());
        // x = 0.3 also satisfies it: 0.36 > 0.18
        let x = 0.3;
        assert!(x * tri().density(x).unwrap() > tri().cdf(x).unwrap());
        assert_eq!(MedianBelief::<f64>::uniform().counterexample_condition(101).unwrap(), None);
        assert!(MedianBelief::power(2.0).unwrap().counterexample_condition(101).unwrap().is_some());
        // k < 1 gives x f(x) = k F(x) < F(x)
        assert_eq!(MedianBelief::power(0.5).unwrap().counterexample_condition(101).unwrap(), None);
        assert!(tri().counterexample_condition(2).is_err());
    }

    #[test]
    fn json_fragments() {
        let b: MedianBelief<f64> = serde_json::from_str(r#"{"family":"triangular","mode":0.5}"#).unwrap();
        assert_eq!(b, tri());
        let b: MedianBelief<f64> = serde_json::from_str(r#"{"family":"uniform"}"#).unwrap();
        assert_eq!(b, MedianBelief::uniform());
        let b: MedianBelief<f64> = serde_json::from_str(r#"{"family":"power","k":2.0}"#).unwrap();
        assert_eq!(b, MedianBelief::power(2.0).unwrap());
        let b: MedianBelief<f64> =
            serde_json::from_str(r#"{"family":"numeric","samples":[[0,1],[0.5,1],[1,1]]}"#).unwrap();
        assert_abs_diff_eq!(b.cdf(0.25).unwrap(), 0.25, epsilon = 1e-15);
        let back: MedianBelief<f64> = serde_json::from_str(&serde_json::to_string(&b).unwrap()).unwrap();
        assert_eq!(back, b);

        assert!(serde_json::from_str::<MedianBelief<f64>>(r#"{"family":"power","k":-2.0}"#).is_err());
        assert!(serde_json::from_str::<MedianBelief<f64>>(r#"{"family":"beta","a":2}"#).is_err());
    }

    #[test]
    fn f32_closed_forms() {
        let b = MedianBelief::<f32>::triangular(0.5).unwrap();
        assert!((b.cdf(0.4).unwrap() - 0.32).abs() < 1e-6);
        assert!((b.density(0.25).unwrap() - 1.0).abs() < 1e-6);
    }
}
