//! Candidate payoff families `u(x, t)`: strictly concave in the platform `x`
//! and uniquely maximised at the ideal policy `t`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::{in_unit, Scalar};

/// Minimum midpoint deficit `u(mid) - (u(a) + u(b))/2` counted as strict concavity.
pub const CONCAVITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UtilityRepr<S>", into = "UtilityRepr<S>")]
#[serde(bound = "S: Scalar")]
pub enum UtilitySpec<S> {
    /// `-(x - t)^2`
    Quadratic,
    /// `-exp(x - t) + x`
    Exponential,
    /// `a * base(x, t) + b` with `a > 0`.
    Affine { base: Box<UtilitySpec<S>>, a: S, b: S },
}

impl<S: Scalar> UtilitySpec<S> {
    pub fn affine(base: UtilitySpec<S>, a: S, b: S) -> Result<Self> {
        if !(a > S::zero()) || !a.is_finite() || !b.is_finite() {
            return Err(domain(format!("affine transform needs finite a > 0 and finite b, got a={a}, b={b}")));
        }
        Ok(Self::Affine { base: Box::new(base), a, b })
    }

    /// Rejects hand-built `Affine` values with a non-positive scale.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Quadratic | Self::Exponential => Ok(()),
            Self::Affine { base, a, b } => {
                if !(*a > S::zero()) || !a.is_finite() || !b.is_finite() {
                    return Err(domain(format!("affine transform needs finite a > 0, got a={a}, b={b}")));
                }
                base.validate()
            }
        }
    }

    pub fn utility(&self, x: S, t: S) -> Result<S> {
        check_args(x, t)?;
        Ok(self.eval(x, t))
    }

    /// `du/dx`.
    pub fn marginal_utility(&self, x: S, t: S) -> Result<S> {
        check_args(x, t)?;
        Ok(self.slope(x, t))
    }

    pub(crate) fn eval(&self, x: S, t: S) -> S {
        match self {
            Self::Quadratic => {
                let d = x - t;
                -(d * d)
            }
            Self::Exponential => x - (x - t).exp(),
            Self::Affine { base, a, b } => *a * base.eval(x, t) + *b,
        }
    }

    pub(crate) fn slope(&self, x: S, t: S) -> S {
        match self {
            Self::Quadratic => S::lit(-2.0) * (x - t),
            Self::Exponential => S::one() - (x - t).exp(),
            Self::Affine { base, a, .. } => *a * base.slope(x, t),
        }
    }

    /// Checks on a `grid_size`-point grid, for `t` in `{0, 0.1, ..., 1}`, that
    /// `u(t, t) > u(x, t)` for every grid `x != t` and that every equally spaced
    /// grid triple has its midpoint strictly above the chord.
    pub fn validate_utility(&self, grid_size: usize) -> Result<UtilityReport<S>> {
        if grid_size < 5 {
            return Err(domain(format!("grid_size must be at least 5, got {grid_size}")));
        }
        let denom = S::from_usize(grid_size - 1).unwrap();
        let xs: Vec<S> = (0..grid_size).map(|i| S::from_usize(i).unwrap() / denom).collect();
        let tol = S::lit(CONCAVITY_TOL);
        let half = S::lit(0.5);
        let mut report = UtilityReport { peaked_at_t: true, strictly_concave: true, witnesses: Vec::new() };

        for ti in 0..=10 {
            let t = S::from_usize(ti).unwrap() / S::lit(10.0);
            let peak = self.eval(t, t);
            let us: Vec<S> = xs.iter().map(|&x| self.eval(x, t)).collect();
            for (&x, &u) in xs.iter().zip(&us) {
                if x != t && !(peak > u) {
                    report.peaked_at_t = false;
                    report.push(UtilityWitness::NotPeaked { x, t, u_peak: peak, u_x: u });
                }
            }
            let mut span = 1;
            while 2 * span < grid_size {
                for i in 0..grid_size - 2 * span {
                    let deficit = us[i + span] - (us[i] + us[i + 2 * span]) * half;
                    if !(deficit > tol) {
                        report.strictly_concave = false;
                        report.push(UtilityWitness::NotConcave { x: xs[i], x_mid: xs[i + span], x_hi: xs[i + 2 * span], t, deficit });
                    }
                }
                span *= 2;
            }
        }
        Ok(report)
    }
}

fn check_args<S: Scalar>(x: S, t: S) -> Result<()> {
    if in_unit(x) && in_unit(t) {
        Ok(())
    } else {
        Err(domain(format!("utility arguments must lie in [0, 1], got x={x}, t={t}")))
    }
}

const MAX_WITNESSES: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct UtilityReport<S> {
    pub peaked_at_t: bool,
    pub strictly_concave: bool,
    /// At most 16 violating tuples, in scan order.
    pub witnesses: Vec<UtilityWitness<S>>,
}

impl<S> UtilityReport<S> {
    fn push(&mut self, w: UtilityWitness<S>) {
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(w);
        }
    }

    pub fn passed(&self) -> bool {
        self.peaked_at_t && self.strictly_concave
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound = "S: Scalar")]
pub enum UtilityWitness<S> {
    NotPeaked { x: S, t: S, u_peak: S, u_x: S },
    NotConcave { x: S, x_mid: S, x_hi: S, t: S, deficit: S },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
#[serde(bound = "S: Scalar")]
enum UtilityRepr<S> {
    Quadratic,
    Exponential,
    Affine { a: S, b: S, base: Box<UtilityRepr<S>> },
}

impl<S: Scalar> TryFrom<UtilityRepr<S>> for UtilitySpec<S> {
    type Error = crate::Error;

    fn try_from(repr: UtilityRepr<S>) -> Result<Self> {
        match repr {
            UtilityRepr::Quadratic => Ok(Self::Quadratic),
            UtilityRepr::Exponential => Ok(Self::Exponential),
            UtilityRepr::Affine { a, b, base } => Self::affine(Self::try_from(*base)?, a, b),
        }
    }
}

impl<S: Scalar> From<UtilitySpec<S>> for UtilityRepr<S> {
    fn from(u: UtilitySpec<S>) -> Self {
        match u {
            UtilitySpec::Quadratic => Self::Quadratic,
            UtilitySpec::Exponential => Self::Exponential,
            UtilitySpec::Affine { base, a, b } => Self::Affine { a, b, base: Box::new((*base).into()) },
        }
    }
}
