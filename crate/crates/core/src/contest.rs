//! The election kernel: win probability, expected payoff and expected policy.

use serde::{Deserialize, Serialize};

use crate::beliefs::MedianBelief;
use crate::error::{domain, Result};
use crate::preferences::UtilitySpec;
use crate::scalar::{in_unit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    #[serde(alias = "l")]
    Left,
    #[serde(alias = "r")]
    Right,
}

impl Side {
    pub fn other(self) -> Self {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Platforms announced by the left and right candidates. No ordering is required.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct PlatformProfile<S> {
    pub x_l: S,
    pub x_r: S,
}

impl<S: Scalar> PlatformProfile<S> {
    pub fn new(x_l: S, x_r: S) -> Result<Self> {
        let p = Self { x_l, x_r };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if in_unit(self.x_l) && in_unit(self.x_r) {
            Ok(())
        } else {
            Err(domain(format!("platforms must lie in [0, 1], got ({}, {})", self.x_l, self.x_r)))
        }
    }

    pub fn get(&self, side: Side) -> S {
        match side {
            Side::Left => self.x_l,
            Side::Right => self.x_r,
        }
    }

    /// Sup-norm distance.
    pub fn distance(&self, other: &Self) -> S {
        (self.x_l - other.x_l).abs().max((self.x_r - other.x_r).abs())
    }
}

/// Ideal policies with `0 <= t_l < t_r <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IdealRepr<S>", into = "IdealRepr<S>")]
#[serde(bound = "S: Scalar")]
pub struct IdealPair<S> {
    t_l: S,
    t_r: S,
}

impl<S: Scalar> IdealPair<S> {
    pub fn new(t_l: S, t_r: S) -> Result<Self> {
        if !in_unit(t_l) {
            return Err(domain(format!("t_l must lie in [0, 1], got {t_l}")));
        }
        if !in_unit(t_r) {
            return Err(domain(format!("t_r must lie in [0, 1], got {t_r}")));
        }
        if !(t_l < t_r) {
            return Err(domain(format!("t_l ({t_l}) must be strictly less than t_r ({t_r})")));
        }
        Ok(Self { t_l, t_r })
    }

    pub fn t_l(&self) -> S {
        self.t_l
    }

    pub fn t_r(&self) -> S {
        self.t_r
    }

    pub fn get(&self, side: Side) -> S {
        match side {
            Side::Left => self.t_l,
            Side::Right => self.t_r,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "S: Scalar")]
struct IdealRepr<S> {
    t_l: S,
    t_r: S,
}

impl<S: Scalar> TryFrom<IdealRepr<S>> for IdealPair<S> {
    type Error = crate::Error;
    fn try_from(r: IdealRepr<S>) -> Result<Self> {
        Self::new(r.t_l, r.t_r)
    }
}

impl<S: Scalar> From<IdealPair<S>> for IdealRepr<S> {
    fn from(p: IdealPair<S>) -> Self {
        Self { t_l: p.t_l, t_r: p.t_r }
    }
}

/// One contest: payoff family, beliefs about the median voter, and ideal policies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct ElectionModel<S> {
    pub utility: UtilitySpec<S>,
    pub belief: MedianBelief<S>,
    pub ideals: IdealPair<S>,
}

impl<S: Scalar> ElectionModel<S> {
    pub fn new(utility: UtilitySpec<S>, belief: MedianBelief<S>, ideals: IdealPair<S>) -> Result<Self> {
        utility.validate()?;
        Ok(Self { utility, belief, ideals })
    }

    /// Same model with different ideal policies.
    pub fn with_ideals(&self, ideals: IdealPair<S>) -> Self {
        Self { utility: self.utility.clone(), belief: self.belief.clone(), ideals }
    }

    /// `U_{t_i}(x_l, x_r) = P u(x_l, t_i) + (1 - P) u(x_r, t_i)`.
    pub fn expected_payoff(&self, side: Side, profile: &PlatformProfile<S>) -> Result<S> {
        profile.validate()?;
        Ok(self.payoff_at(self.ideals.get(side), profile.x_l, profile.x_r))
    }

    /// Expected payoff of a candidate with ideal `t`, not necessarily one of the model's.
    pub(crate) fn payoff_at(&self, t: S, x_l: S, x_r: S) -> S {
        let p = win_prob(&self.belief, x_l, x_r);
        p * self.utility.eval(x_l, t) + (S::one() - p) * self.utility.eval(x_r, t)
    }

    /// Part of the expected payoff that depends on the candidate's own platform:
    /// `P(own, opp) * (u(own, t_i) - u(opp, t_i))`. By the symmetry of `P` this
    /// has the same form for both sides, and it is continuous at `own = opp`.
    pub fn reduced_objective(&self, side: Side, own: S, opponent: S) -> S {
        let t = self.ideals.get(side);
        let p = win_prob(&self.belief, own, opponent);
        p * (self.utility.eval(own, t) - self.utility.eval(opponent, t))
    }

    /// Derivative of [`Self::reduced_objective`] in `own`; undefined at `own = opponent`.
    pub fn reduced_objective_slope(&self, side: Side, own: S, opponent: S) -> S {
        let t = self.ideals.get(side);
        let half = S::lit(0.5);
        let mid = (own + opponent) * half;
        let f = self.belief.density_unchecked(mid) * half;
        let dp = if own < opponent { f } else { -f };
        let p = win_prob(&self.belief, own, opponent);
        dp * (self.utility.eval(own, t) - self.utility.eval(opponent, t)) + p * self.utility.slope(own, t)
    }
}

/// Probability that the left candidate wins.
pub fn win_probability<S: Scalar>(belief: &MedianBelief<S>, profile: &PlatformProfile<S>) -> Result<S> {
    profile.validate()?;
    Ok(win_prob(belief, profile.x_l, profile.x_r))
}

/// `pi = P x_l + (1 - P) x_r`, the enacted policy forecast before the vote.
pub fn expected_policy<S: Scalar>(belief: &MedianBelief<S>, profile: &PlatformProfile<S>) -> Result<S> {
    profile.validate()?;
    Ok(policy(belief, profile.x_l, profile.x_r))
}

pub(crate) fn win_prob<S: Scalar>(belief: &MedianBelief<S>, x_l: S, x_r: S) -> S {
    let mid = (x_l + x_r) * S::lit(0.5);
    if x_l < x_r {
        belief.cdf_unchecked(mid)
    } else if x_l > x_r {
        S::one() - belief.cdf_unchecked(mid)
    } else {
        S::lit(0.5)
    }
}

pub(crate) fn policy<S: Scalar>(belief: &MedianBelief<S>, x_l: S, x_r: S) -> S {
    let p = win_prob(belief, x_l, x_r);
    let pi = p * x_l + (S::one() - p) * x_r;
    // keep rounding from leaving the segment between the platforms
    pi.max(x_l.min(x_r)).min(x_l.max(x_r))
}
