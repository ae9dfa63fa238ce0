//! JSON reports. Every float is rounded to 12 significant digits before it is
//! serialized, so a report re-parses to exactly the values that were printed.

use electoral_core::contest::{expected_policy, win_probability};
use electoral_core::format::round_sig12;
use electoral_core::{CertificateReport, ElectionModel, EquilibriumReport, IdealPair, PlatformProfile, Regime, SweepRow};
use serde::{Deserialize, Serialize};

/// Regime flag accepted by `solve` and `sweep`. `commitment` means both
/// extremal equilibria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RegimeArg {
    Commitment,
    CommitmentSmallest,
    CommitmentLargest,
    NoCommitment,
}

impl RegimeArg {
    pub fn regimes(self) -> &'static [Regime] {
        match self {
            RegimeArg::Commitment => &[Regime::CommitmentSmallest, Regime::CommitmentLargest],
            RegimeArg::CommitmentSmallest => &[Regime::CommitmentSmallest],
            RegimeArg::CommitmentLargest => &[Regime::CommitmentLargest],
            RegimeArg::NoCommitment => &[Regime::NoCommitment],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveReport {
    pub ideals: IdealPair,
    pub equilibrium: EquilibriumReport,
    /// One row per requested regime, in the order smallest, largest, none.
    pub rows: Vec<SweepRow>,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.equilibrium.converged && self.rows.iter().all(|r| r.converged)
    }
}

pub fn row_at(model: &ElectionModel, regime: Regime, p: PlatformProfile, converged: bool) -> electoral_core::Result<SweepRow> {
    Ok(SweepRow {
        t_l: model.ideals.t_l(),
        t_r: model.ideals.t_r(),
        regime,
        x_l: p.x_l,
        x_r: p.x_r,
        win_prob: win_probability(&model.belief, &p)?,
        pi_star: expected_policy(&model.belief, &p)?,
        converged,
    })
}

pub trait Rounded {
    fn rounded(self) -> Self;
}

impl Rounded for PlatformProfile {
    fn rounded(self) -> Self {
        PlatformProfile { x_l: round_sig12(self.x_l), x_r: round_sig12(self.x_r) }
    }
}

impl Rounded for SweepRow {
    fn rounded(self) -> Self {
        SweepRow {
            t_l: round_sig12(self.t_l),
            t_r: round_sig12(self.t_r),
            x_l: round_sig12(self.x_l),
            x_r: round_sig12(self.x_r),
            win_prob: round_sig12(self.win_prob),
            pi_star: round_sig12(self.pi_star),
            ..self
        }
    }
}

impl Rounded for EquilibriumReport {
    fn rounded(self) -> Self {
        EquilibriumReport { smallest: self.smallest.rounded(), largest: self.largest.rounded(), ..self }
    }
}

impl Rounded for SolveReport {
    fn rounded(self) -> Self {
        // ideals are validated on parse; keep them unless rounding preserves order
        let ideals = IdealPair::new(round_sig12(self.ideals.t_l()), round_sig12(self.ideals.t_r())).unwrap_or(self.ideals);
        SolveReport {
            ideals,
            equilibrium: self.equilibrium.rounded(),
            rows: self.rows.into_iter().map(Rounded::rounded).collect(),
        }
    }
}

impl Rounded for CertificateReport {
    fn rounded(self) -> Self {
        CertificateReport {
            witness: self.witness.map(|w| w.into_iter().map(round_sig12).collect()),
            margin: round_sig12(self.margin),
            ..self
        }
    }
}
