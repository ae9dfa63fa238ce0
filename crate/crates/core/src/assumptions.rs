//! Sampled certificates for the two structural assumptions on `(u, F)`:
//!
//! * strict log supermodularity (SLS) of payoff differences `u(x, t) - u(y, t)`
//!   in `(x, t)`, over platforms on one side of the opponent;
//! * the strict single crossing property (SSCP) of expected payoffs in own and
//!   opponent platforms;
//!
//! plus the implication that SLS hands to the best-response analysis: a move
//! that weakly pays for a candidate pays strictly for a more extreme one with
//! the same direction of ideals.
//!
//! Tuples come from exhaustive enumeration of every admissible ordered tuple on
//! the smallest evenly spaced grid of `[0, 1]` that yields at least the
//! requested number of tuples. The result is deterministic and a passing
//! report only covers the tuples checked.

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::beliefs::MedianBelief;
use crate::contest::win_prob;
use crate::error::{domain, Result};
use crate::preferences::UtilitySpec;
use crate::scalar::Scalar;

/// Required excess for a strict inequality to count as holding.
pub const STRICTNESS: f64 = 1e-12;

/// SLS ratios with a denominator smaller than this are skipped.
pub const MIN_DENOMINATOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Assumption {
    Sls,
    Sscp,
    Claim7,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct CertificateReport<S> {
    pub assumption: Assumption,
    pub passed: bool,
    pub tuples_checked: usize,
    /// Tuples whose ratios were numerically undefined.
    pub tuples_skipped: usize,
    /// First violating tuple; the coordinate order is given by `witness_layout`.
    pub witness: Option<Vec<S>>,
    pub witness_layout: Option<String>,
    /// Smallest excess over [`STRICTNESS`] among tuples with a binding
    /// inequality; positive exactly when the report passes. `null` in JSON when
    /// no tuple was binding.
    #[serde(serialize_with = "ser_margin", deserialize_with = "de_margin")]
    pub margin: S,
}

fn ser_margin<S: Scalar, Ser: Serializer>(m: &S, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
    if m.is_finite() {
        m.serialize(s)
    } else {
        s.serialize_none()
    }
}

fn de_margin<'de, S: Scalar, D: Deserializer<'de>>(d: D) -> std::result::Result<S, D::Error> {
    Ok(Option::<S>::deserialize(d)?.unwrap_or_else(S::infinity))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rel {
    Le,
    Lt,
}

/// Number of index chains `i_0 .. i_k` on `0..n` obeying `rels` between neighbours.
fn count_chains(n: usize, rels: &[Rel]) -> usize {
    // ways[i]: chains of the current length ending at index i
    let mut ways = vec![1usize; n];
    for rel in rels {
        let mut next = vec![0usize; n];
        let mut prefix = 0usize;
        for i in 0..n {
            if *rel == Rel::Le {
                prefix += ways[i];
                next[i] = prefix;
            } else {
                next[i] = prefix;
                prefix += ways[i];
            }
        }
        ways = next;
    }
    ways.iter().sum()
}

fn chains(n: usize, rels: &[Rel]) -> Vec<Vec<usize>> {
    fn extend(n: usize, rels: &[Rel], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let k = cur.len();
        if k == rels.len() + 1 {
            out.push(cur.clone());
            return;
        }
        let from = match k {
            0 => 0,
            _ => cur[k - 1] + usize::from(rels[k - 1] == Rel::Lt),
        };
        for i in from..n {
            cur.push(i);
            extend(n, rels, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    extend(n, rels, &mut Vec::with_capacity(rels.len() + 1), &mut out);
    out
}

fn grid_size_for(samples: usize, patterns: &[&[Rel]]) -> usize {
    let mut n = 2;
    while patterns.iter().map(|p| count_chains(n, p)).sum::<usize>() < samples {
        n += 1;
    }
    n
}

fn to_points<S: Scalar>(n: usize, idx: &[usize]) -> Vec<S> {
    let denom = S::from_usize(n - 1).unwrap();
    idx.iter().map(|&i| if i + 1 == n { S::one() } else { S::from_usize(i).unwrap() / denom }).collect()
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 100 {
        Err(domain(format!("at least 100 samples required, got {samples}")))
    } else {
        Ok(())
    }
}

// SLS orderings t < t' <= x < x' < y and y < x < x' <= t < t'
const SLS_RIGHT_OF_IDEALS: [Rel; 4] = [Rel::Lt, Rel::Le, Rel::Lt, Rel::Lt];
const SLS_LEFT_OF_IDEALS: [Rel; 4] = [Rel::Lt, Rel::Lt, Rel::Le, Rel::Lt];

/// All SLS tuples `[t, t', x, x', y]` on the grid chosen for `samples`.
pub fn sls_tuples<S: Scalar>(samples: usize) -> Vec<[S; 5]> {
    let n = grid_size_for(samples, &[&SLS_RIGHT_OF_IDEALS, &SLS_LEFT_OF_IDEALS]);
    let mut out = Vec::new();
    for c in chains(n, &SLS_RIGHT_OF_IDEALS) {
        let p = to_points::<S>(n, &c);
        out.push([p[0], p[1], p[2], p[3], p[4]]);
    }
    for c in chains(n, &SLS_LEFT_OF_IDEALS) {
        // stored as (y, x, x', t, t')
        let p = to_points::<S>(n, &c);
        out.push([p[3], p[4], p[1], p[2], p[0]]);
    }
    out
}

/// `lhs - rhs` of the SLS inequality at `[t, t', x, x', y]`, or `None` when a
/// denominator is numerically zero.
pub fn sls_slack<S: Scalar>(u: impl Fn(S, S) -> S, tuple: &[S; 5]) -> Option<S> {
    let [t, t2, x, x2, y] = *tuple;
    let tiny = S::lit(MIN_DENOMINATOR);
    let den_hi = u(x, t2) - u(y, t2);
    let den_lo = u(x, t) - u(y, t);
    if den_hi.abs() < tiny || den_lo.abs() < tiny {
        return None;
    }
    let lhs = (u(x2, t2) - u(y, t2)) / den_hi;
    let rhs = (u(x2, t) - u(y, t)) / den_lo;
    Some(lhs - rhs)
}

/// SLS certificate for an arbitrary payoff function.
pub fn check_sls_with<S: Scalar>(u: impl Fn(S, S) -> S + Sync, samples: usize) -> Result<CertificateReport<S>> {
    check_samples(samples)?;
    let tuples = sls_tuples::<S>(samples);
    let outcomes: Vec<Outcome<S>> = tuples
        .par_iter()
        .map(|tp| match sls_slack(&u, tp) {
            None => Outcome::Skipped,
            Some(s) => Outcome::Binding(s - S::lit(STRICTNESS)),
        })
        .collect();
    Ok(summarise(Assumption::Sls, "t,t',x,x',y", &outcomes, |i| tuples[i].to_vec()))
}

pub fn check_sls<S: Scalar>(utility: &UtilitySpec<S>, samples: usize) -> Result<CertificateReport<S>> {
    utility.validate()?;
    check_sls_with(|x, t| utility.eval(x, t), samples)
}

#[derive(Debug, Clone, Copy)]
enum Outcome<S> {
    Skipped,
    Vacuous,
    /// Excess of the strict inequality over [`STRICTNESS`].
    Binding(S),
}

fn summarise<S: Scalar>(
    assumption: Assumption,
    layout: &str,
    outcomes: &[Outcome<S>],
    tuple: impl Fn(usize) -> Vec<S>,
) -> CertificateReport<S> {
    let mut margin = S::infinity();
    let mut skipped = 0;
    let mut first_bad = None;
    for (i, o) in outcomes.iter().enumerate() {
        match *o {
            Outcome::Skipped => skipped += 1,
            Outcome::Vacuous => {}
            Outcome::Binding(excess) => {
                if !(excess > S::zero()) && first_bad.is_none() {
                    first_bad = Some(i);
                }
                margin = margin.min(excess);
            }
        }
    }
    CertificateReport {
        assumption,
        passed: first_bad.is_none(),
        tuples_checked: outcomes.len(),
        tuples_skipped: skipped,
        witness: first_bad.map(&tuple),
        witness_layout: first_bad.map(|_| layout.to_string()),
        margin,
    }
}

fn payoff<'a, S: Scalar>(utility: &'a UtilitySpec<S>, belief: &'a MedianBelief<S>) -> impl Fn(S, S, S) -> S + Sync + 'a {
    move |t, x_l, x_r| {
        let p = win_prob(belief, x_l, x_r);
        p * utility.eval(x_l, t) + (S::one() - p) * utility.eval(x_r, t)
    }
}

// t <= x < x' < y < y' <= t'
const SSCP_CHAIN: [Rel; 5] = [Rel::Le, Rel::Lt, Rel::Lt, Rel::Lt, Rel::Le];

/// SSCP certificate on tuples `t <= x < x' < y < y' <= t'`, checking
///
/// * `U_t(x', y) >= U_t(x, y)  =>  U_t(x', y') > U_t(x, y')`
/// * `U_t'(x', y) >= U_t'(x', y')  =>  U_t'(x, y) > U_t'(x, y')`
///
/// Implications with a false antecedent hold vacuously.
pub fn check_sscp<S: Scalar>(
    utility: &UtilitySpec<S>,
    belief: &MedianBelief<S>,
    samples: usize,
) -> Result<CertificateReport<S>> {
    check_samples(samples)?;
    utility.validate()?;
    let n = grid_size_for(samples.div_ceil(2), &[&SSCP_CHAIN]);
    let tuples: Vec<Vec<S>> = chains(n, &SSCP_CHAIN).iter().map(|c| to_points(n, c)).collect();
    let u = payoff(utility, belief);
    let strict = S::lit(STRICTNESS);
    let outcomes: Vec<Outcome<S>> = tuples
        .par_iter()
        .flat_map_iter(|p| {
            let (t, x, x2, y, y2, t2) = (p[0], p[1], p[2], p[3], p[4], p[5]);
            let first = if u(t, x2, y) >= u(t, x, y) {
                Outcome::Binding(u(t, x2, y2) - u(t, x, y2) - strict)
            } else {
                Outcome::Vacuous
            };
            let second = if u(t2, x2, y) >= u(t2, x2, y2) {
                Outcome::Binding(u(t2, x, y) - u(t2, x, y2) - strict)
            } else {
                Outcome::Vacuous
            };
            [first, second]
        })
        .collect();
    let mut report = summarise(Assumption::Sscp, "t,x,x',y,y',t'", &outcomes, |i| tuples[i / 2].clone());
    report.tuples_checked = tuples.len();
    Ok(report)
}

// t < t' <= x < x' < y for the left candidate; x < y < y' <= t < t' for the right
const CLAIM_LEFT: [Rel; 4] = [Rel::Lt, Rel::Le, Rel::Lt, Rel::Lt];
const CLAIM_RIGHT: [Rel; 4] = [Rel::Lt, Rel::Lt, Rel::Le, Rel::Lt];

/// Checks that a weakly profitable move for a candidate is strictly profitable
/// for a candidate whose ideal is further out on the same side:
///
/// * left, `t < t' <= x < x' < y`: `U_t(x', y) >= U_t(x, y)  =>  U_t'(x', y) > U_t'(x, y)`
/// * right, `x < y < y' <= t < t'`: `U_t(x, y') >= U_t(x, y)  =>  U_t'(x, y') > U_t'(x, y)`
///
/// Witnesses are reported as `side, t, t', a, a', opponent` with `side` 0 for
/// the left candidate and 1 for the right; `a < a'` are the own platforms.
pub fn check_sls_implies_shift<S: Scalar>(
    utility: &UtilitySpec<S>,
    belief: &MedianBelief<S>,
    samples: usize,
) -> Result<CertificateReport<S>> {
    check_samples(samples)?;
    utility.validate()?;
    let n = grid_size_for(samples, &[&CLAIM_LEFT, &CLAIM_RIGHT]);
    let mut tuples: Vec<[S; 6]> = Vec::new();
    for c in chains(n, &CLAIM_LEFT) {
        let p = to_points::<S>(n, &c);
        tuples.push([S::zero(), p[0], p[1], p[2], p[3], p[4]]);
    }
    for c in chains(n, &CLAIM_RIGHT) {
        let p = to_points::<S>(n, &c);
        // (x, y, y', t, t') -> side 1, t, t', y, y', x
        tuples.push([S::one(), p[3], p[4], p[1], p[2], p[0]]);
    }
    let u = payoff(utility, belief);
    let strict = S::lit(STRICTNESS);
    let outcomes: Vec<Outcome<S>> = tuples
        .par_iter()
        .map(|&[side, t, t2, a, a2, opp]| {
            let gain = |ideal: S| {
                if side == S::zero() {
                    u(ideal, a2, opp) - u(ideal, a, opp)
                } else {
                    u(ideal, opp, a2) - u(ideal, opp, a)
                }
            };
            if gain(t) >= S::zero() {
                Outcome::Binding(gain(t2) - strict)
            } else {
                Outcome::Vacuous
            }
        })
        .collect();
    Ok(summarise(Assumption::Claim7, "side,t,t',a,a',opponent", &outcomes, |i| tuples[i].to_vec()))
}
