//! Expected policy at equilibrium as a function of the candidates' ideal
//! policies, under commitment (extremal equilibria) and without commitment
//! (platforms equal ideals).

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contest::{policy, win_prob, ElectionModel, IdealPair, PlatformProfile};
use crate::error::{domain, Result};
use crate::format::sig12;
use crate::scalar::{in_unit, Scalar};
use crate::solver::{monotone_iteration, no_commitment_equilibrium, EquilibriumOptions, Selection};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    CommitmentSmallest,
    CommitmentLargest,
    NoCommitment,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::CommitmentSmallest => "commitment-smallest",
            Regime::CommitmentLargest => "commitment-largest",
            Regime::NoCommitment => "no-commitment",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "commitment-smallest" => Ok(Regime::CommitmentSmallest),
            "commitment-largest" => Ok(Regime::CommitmentLargest),
            "no-commitment" => Ok(Regime::NoCommitment),
            other => Err(domain(format!("unknown regime '{other}'"))),
        }
    }
}

/// Which ideal policy a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VaryIdeal {
    Tl,
    Tr,
}

/// Equilibrium platforms and expected policy for one ideal pair and regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct SweepRow<S> {
    pub t_l: S,
    pub t_r: S,
    pub regime: Regime,
    pub x_l: S,
    pub x_r: S,
    pub win_prob: S,
    pub pi_star: S,
    pub converged: bool,
}

impl<S: Scalar> SweepRow<S> {
    fn at(model: &ElectionModel<S>, regime: Regime, p: PlatformProfile<S>, converged: bool) -> Self {
        Self {
            t_l: model.ideals.t_l(),
            t_r: model.ideals.t_r(),
            regime,
            x_l: p.x_l,
            x_r: p.x_r,
            win_prob: win_prob(&model.belief, p.x_l, p.x_r),
            pi_star: policy(&model.belief, p.x_l, p.x_r),
            converged,
        }
    }

    pub fn profile(&self) -> PlatformProfile<S> {
        PlatformProfile { x_l: self.x_l, x_r: self.x_r }
    }
}

/// Indirect expected policy `pi*(t_l, t_r)` for one regime.
///
/// Commitment regimes iterate only the requested extremal equilibrium. A run
/// that hits `max_iters` still yields a row, flagged with `converged = false`.
pub fn indirect_expected_policy<S: Scalar>(
    model: &ElectionModel<S>,
    regime: Regime,
    opts: &EquilibriumOptions<S>,
) -> Result<SweepRow<S>> {
    let (profile, converged) = match regime {
        Regime::NoCommitment => (no_commitment_equilibrium(&model.ideals), true),
        Regime::CommitmentSmallest | Regime::CommitmentLargest => {
            let sel = if regime == Regime::CommitmentSmallest { Selection::Smallest } else { Selection::Largest };
            let it = monotone_iteration(model, opts, sel)?;
            (it.profile, it.converged)
        }
    };
    Ok(SweepRow::at(model, regime, profile, converged))
}

/// Evaluates [`indirect_expected_policy`] at each value of one ideal policy,
/// keeping the other from `template`. Rows are computed independently.
pub fn sweep_ideal<S: Scalar>(
    template: &ElectionModel<S>,
    vary: VaryIdeal,
    values: &[S],
    regime: Regime,
    opts: &EquilibriumOptions<S>,
) -> Result<Vec<SweepRow<S>>> {
    if values.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(domain("sweep values must be sorted ascending"));
    }
    let models = values
        .iter()
        .map(|&v| {
            if !in_unit(v) {
                return Err(domain(format!("sweep value {v} outside [0, 1]")));
            }
            let ideals = match vary {
                VaryIdeal::Tl => IdealPair::new(v, template.ideals.t_r()),
                VaryIdeal::Tr => IdealPair::new(template.ideals.t_l(), v),
            }
            .map_err(|e| match e {
                crate::Error::Domain(m) => domain(format!("sweep value {v}: {m}")),
                other => other,
            })?;
            Ok(template.with_ideals(ideals))
        })
        .collect::<Result<Vec<_>>>()?;
    models.par_iter().map(|m| indirect_expected_policy(m, regime, opts)).collect()
}

/// Closed-form `pi*(t_l, t_r)` without commitment for quadratic payoffs and a
/// triangular belief with mode 1/2, branch by branch:
///
/// * `t_l <= 1 - t_r`: `2m^2 t_l + (1 - 2m^2) t_r`, with `m = (t_l + t_r)/2`
/// * `1 - t_r < t_l < t_r`: `(1 - 2(1-m)^2) t_l + 2(1-m)^2 t_r`
/// * `t_l = t_r`: `t_r`
/// * `t_l > t_r`: `2(1-m)^2 t_l + (1 - 2(1-m)^2) t_r`
///
/// The last branch agrees with the model only when `m >= 1/2`.
pub fn triangular_pi_star_closed_form<S: Scalar>(t_l: S, t_r: S) -> Result<S> {
    if !in_unit(t_l) || !in_unit(t_r) {
        return Err(domain(format!("ideal policies must lie in [0, 1], got ({t_l}, {t_r})")));
    }
    let two = S::lit(2.0);
    let m = (t_l + t_r) / two;
    let low = two * m * m;
    let high = two * (S::one() - m) * (S::one() - m);
    let v = if t_l == t_r {
        t_r
    } else if t_l < t_r {
        if t_l <= S::one() - t_r {
            low * t_l + (S::one() - low) * t_r
        } else {
            (S::one() - high) * t_l + high * t_r
        }
    } else {
        high * t_l + (S::one() - high) * t_r
    };
    Ok(v)
}

/// `d pi* / d t_l = (3 t_l^2 + 2 t_l t_r - t_r^2) / 2` on the branch
/// `t_l < t_r`, `t_l <= 1 - t_r`. Its only nonnegative root is `t_l = t_r / 3`.
pub fn triangular_pi_star_derivative<S: Scalar>(t_l: S, t_r: S) -> Result<S> {
    let slack = S::lit(1e-12);
    if !in_unit(t_l) || !in_unit(t_r) || !(t_l < t_r) || t_l > S::one() - t_r + slack {
        return Err(domain(format!(
            "derivative formula holds for t_l < t_r and t_l <= 1 - t_r, got ({t_l}, {t_r})"
        )));
    }
    let three = S::lit(3.0);
    let two = S::lit(2.0);
    Ok((three * t_l * t_l + two * t_l * t_r - t_r * t_r) / two)
}

/// `d pi* / d t_l` on both branches with `t_l < t_r`. Above `1 - t_r` it is
/// `1 - 2(1-m)(t_r - t_l) - 2(1-m)^2`; the two branches meet at `m = 1/2`.
pub fn triangular_pi_star_slope<S: Scalar>(t_l: S, t_r: S) -> Result<S> {
    if !in_unit(t_l) || !in_unit(t_r) || !(t_l < t_r) {
        return Err(domain(format!("slope defined for 0 <= t_l < t_r <= 1, got ({t_l}, {t_r})")));
    }
    if t_l <= S::one() - t_r {
        return triangular_pi_star_derivative(t_l, t_r);
    }
    let two = S::lit(2.0);
    let q = S::one() - (t_l + t_r) / two;
    Ok(S::one() - two * q * (t_r - t_l) - two * q * q)
}

/// Row of the no-commitment counterexample sweep with its closed-form columns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct CounterexampleRow<S> {
    pub row: SweepRow<S>,
    pub pi_star_closed: S,
    /// Absent at `t_l = t_r`, where the win probability jumps.
    pub dpi_dtl: Option<S>,
}

/// Intervals used by [`counterexample_rows`]; `t_r / 3` is always a grid point.
pub const COUNTEREXAMPLE_INTERVALS: usize = 60;

/// No-commitment sweep of `t_l` over `0, t_r/n, ..., t_r` for quadratic
/// payoffs and a triangular(1/2) belief. `pi_star` comes from the contest
/// kernel; `pi_star_closed` and `dpi_dtl` from the closed forms.
pub fn counterexample_rows<S: Scalar>(t_r: S, intervals: usize) -> Result<Vec<CounterexampleRow<S>>> {
    if !(t_r > S::zero()) || t_r > S::one() {
        return Err(domain(format!("t_r must lie in (0, 1], got {t_r}")));
    }
    if intervals < 1 {
        return Err(domain("at least one interval required"));
    }
    let belief = crate::beliefs::MedianBelief::triangular(S::lit(0.5))?;
    let n = S::from_usize(intervals).unwrap();
    (0..=intervals)
        .map(|i| {
            let t_l = if i == intervals { t_r } else { t_r * S::from_usize(i).unwrap() / n };
            let row = SweepRow {
                t_l,
                t_r,
                regime: Regime::NoCommitment,
                x_l: t_l,
                x_r: t_r,
                win_prob: win_prob(&belief, t_l, t_r),
                pi_star: policy(&belief, t_l, t_r),
                converged: true,
            };
            let dpi_dtl = if t_l < t_r { Some(triangular_pi_star_slope(t_l, t_r)?) } else { None };
            Ok(CounterexampleRow { row, pi_star_closed: triangular_pi_star_closed_form(t_l, t_r)?, dpi_dtl })
        })
        .collect()
}

/// Local shape of the expected policy function at one regime's platforms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct RegimeCheck<S> {
    pub row: SweepRow<S>,
    pub dpi_dxl: S,
    pub dpi_dxr: S,
    /// Both derivatives positive: moving either platform right raises `pi`.
    pub on_increasing_segment: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct RegimeComparison<S> {
    pub commitment_rows: Vec<RegimeCheck<S>>,
    pub no_commitment_row: RegimeCheck<S>,
}

/// Step of the finite differences in [`regime_comparison`].
pub const FD_STEP: f64 = 1e-5;

/// Central difference of `pi` in one platform, one-sided where a central
/// stencil would leave `[0, 1]` or reach the opponent's platform.
fn policy_slope<S: Scalar>(model: &ElectionModel<S>, p: PlatformProfile<S>, left: bool) -> S {
    let h = S::lit(FD_STEP);
    let (own, opp) = if left { (p.x_l, p.x_r) } else { (p.x_r, p.x_l) };
    let pi = |x: S| if left { policy(&model.belief, x, opp) } else { policy(&model.belief, opp, x) };
    let (lo_bound, hi_bound) = if own < opp { (S::zero(), opp) } else { (opp, S::one()) };
    let can_down = own - h >= lo_bound && own - h != opp;
    let can_up = own + h <= hi_bound && own + h != opp;
    match (can_down, can_up) {
        (true, true) => (pi(own + h) - pi(own - h)) / (h + h),
        (false, true) => (pi(own + h) - pi(own)) / h,
        (true, false) => (pi(own) - pi(own - h)) / h,
        (false, false) => S::nan(),
    }
}

fn regime_check<S: Scalar>(model: &ElectionModel<S>, row: SweepRow<S>) -> RegimeCheck<S> {
    let p = row.profile();
    let dpi_dxl = policy_slope(model, p, true);
    let dpi_dxr = policy_slope(model, p, false);
    RegimeCheck { row, dpi_dxl, dpi_dxr, on_increasing_segment: dpi_dxl > S::zero() && dpi_dxr > S::zero() }
}

/// Compares where each regime's platforms sit on the expected policy function.
/// At commitment equilibria `pi` increases in both platforms; without
/// commitment it need not.
pub fn regime_comparison<S: Scalar>(model: &ElectionModel<S>, opts: &EquilibriumOptions<S>) -> Result<RegimeComparison<S>> {
    let commitment_rows = [Regime::CommitmentSmallest, Regime::CommitmentLargest]
        .iter()
        .map(|&r| indirect_expected_policy(model, r, opts).map(|row| regime_check(model, row)))
        .collect::<Result<Vec<_>>>()?;
    let nc = indirect_expected_policy(model, Regime::NoCommitment, opts)?;
    Ok(RegimeComparison { commitment_rows, no_commitment_row: regime_check(model, nc) })
}

pub const SWEEP_HEADER: &str = "t_l,t_r,regime,x_l,x_r,win_prob,pi_star,converged";

fn sweep_fields<S: Scalar>(r: &SweepRow<S>) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        sig12(r.t_l.as_f64()),
        sig12(r.t_r.as_f64()),
        r.regime,
        sig12(r.x_l.as_f64()),
        sig12(r.x_r.as_f64()),
        sig12(r.win_prob.as_f64()),
        sig12(r.pi_star.as_f64()),
        r.converged
    )
}

/// Writes sweep rows as CSV with 12 significant digits.
pub fn write_sweep_csv<S: Scalar, W: Write>(rows: &[SweepRow<S>], mut out: W) -> io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", sweep_fields(r))?;
    }
    Ok(())
}

pub const COUNTEREXAMPLE_HEADER: &str = "t_l,t_r,regime,x_l,x_r,win_prob,pi_star,converged,pi_star_closed,dpi_dtl";

/// Counterexample CSV: the sweep columns plus `pi_star_closed,dpi_dtl`
/// (`dpi_dtl` empty where undefined).
pub fn write_counterexample_csv<S: Scalar, W: Write>(rows: &[CounterexampleRow<S>], mut out: W) -> io::Result<()> {
    writeln!(out, "{COUNTEREXAMPLE_HEADER}")?;
    for r in rows {
        let d = r.dpi_dtl.map(|d| sig12(d.as_f64())).unwrap_or_default();
        writeln!(out, "{},{},{}", sweep_fields(&r.row), sig12(r.pi_star_closed.as_f64()), d)?;
    }
    Ok(())
}
