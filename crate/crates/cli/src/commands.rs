use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use electoral_core::analysis::{self, counterexample_rows, sweep_ideal, COUNTEREXAMPLE_INTERVALS};
use electoral_core::assumptions::{check_sls, check_sls_implies_shift, check_sscp};
use electoral_core::solver::{extremal_equilibria, no_commitment_equilibrium};
use electoral_core::{Error, EquilibriumReport, VaryIdeal};

use crate::config::{ConfigError, ModelConfig};
use crate::report::{row_at, RegimeArg, Rounded, SolveReport};

/// Process exit codes.
pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_NONCONVERGENCE: u8 = 2;
pub const EXIT_WITNESS: u8 = 3;

#[derive(Debug)]
pub enum Failure {
    Config(String),
    NonConvergence(String),
    Io(io::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) | Failure::Io(_) => EXIT_CONFIG,
            Failure::NonConvergence(_) => EXIT_NONCONVERGENCE,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) | Failure::NonConvergence(m) => f.write_str(m),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonConvergence { .. } => Failure::NonConvergence(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<u8, Failure>;

/// Buffers the whole output so a failed command never leaves a partial file.
fn emit(out: Option<&Path>, body: &[u8]) -> io::Result<()> {
    match out {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            w.write_all(body)?;
            w.flush()
        }
        None => {
            let mut w = io::stdout().lock();
            w.write_all(body)?;
            w.flush()
        }
    }
}

fn json_line<T: serde::Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("reports serialize");
    s.push(b'\n');
    s
}

pub fn solve(config: &Path, regime: RegimeArg, out: Option<&PathBuf>) -> Outcome {
    let cfg = ModelConfig::load(config)?;
    let model = cfg.model();
    let opts = cfg.equilibrium_options();
    let regimes = regime.regimes();

    let equilibrium = if regime == RegimeArg::NoCommitment {
        let p = no_commitment_equilibrium(&model.ideals);
        EquilibriumReport {
            smallest: p,
            largest: p,
            iterations_smallest: 0,
            iterations_largest: 0,
            converged: true,
            clamped: false,
        }
    } else {
        extremal_equilibria(&model, &opts)?
    };
    let rows = regimes
        .iter()
        .map(|&r| {
            let (p, converged) = match r {
                electoral_core::Regime::CommitmentSmallest => (equilibrium.smallest, equilibrium.converged),
                electoral_core::Regime::CommitmentLargest => (equilibrium.largest, equilibrium.converged),
                electoral_core::Regime::NoCommitment => (equilibrium.smallest, true),
            };
            row_at(&model, r, p, converged)
        })
        .collect::<electoral_core::Result<Vec<_>>>()?;
    let report = SolveReport { ideals: model.ideals, equilibrium, rows }.rounded();
    emit(out.map(PathBuf::as_path), &json_line(&report))?;
    if report.converged() {
        Ok(EXIT_OK)
    } else {
        eprintln!(
            "error: equilibrium iteration did not converge within {} iterations; last iterates written",
            opts.max_iters
        );
        Ok(EXIT_NONCONVERGENCE)
    }
}

/// `steps` evenly spaced values from `from` to `to`; a single step is `from`.
pub fn sweep_values(from: f64, to: f64, steps: usize) -> Result<Vec<f64>, Failure> {
    if steps == 0 {
        return Err(Failure::Config("--steps must be at least 1".into()));
    }
    for (name, v) in [("--from", from), ("--to", to)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Failure::Config(format!("{name} must lie in [0, 1], got {v}")));
        }
    }
    if to < from {
        return Err(Failure::Config(format!("--to ({to}) must not be below --from ({from})")));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    let n = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| if i == steps - 1 { to } else { from + (to - from) * i as f64 / n })
        .collect())
}

pub fn sweep(
    config: &Path,
    vary: VaryIdeal,
    values: &[f64],
    regime: RegimeArg,
    out: Option<&PathBuf>,
) -> Outcome {
    let cfg = ModelConfig::load(config)?;
    let model = cfg.model();
    let opts = cfg.equilibrium_options();
    let mut rows = Vec::new();
    for &r in regime.regimes() {
        rows.extend(sweep_ideal(&model, vary, values, r, &opts)?);
    }
    // deterministic order: by swept value, then regime
    rows.sort_by(|a, b| {
        let key = |r: &electoral_core::SweepRow| match vary {
            VaryIdeal::Tl => r.t_l,
            VaryIdeal::Tr => r.t_r,
        };
        key(a).total_cmp(&key(b)).then((a.regime as u8).cmp(&(b.regime as u8)))
    });
    let mut body = Vec::new();
    analysis::write_sweep_csv(&rows, &mut body)?;
    emit(out.map(PathBuf::as_path), &body)?;
    let failed = rows.iter().filter(|r| !r.converged).count();
    if failed > 0 {
        eprintln!("error: {failed} sweep row(s) did not converge");
        return Ok(EXIT_NONCONVERGENCE);
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum AssumptionArg {
    Sscp,
    Sls,
    Claim7,
}

pub fn check(config: &Path, assumption: AssumptionArg, samples: usize, out: Option<&PathBuf>) -> Outcome {
    let cfg = ModelConfig::load(config)?;
    let report = match assumption {
        AssumptionArg::Sls => check_sls(&cfg.utility, samples)?,
        AssumptionArg::Sscp => check_sscp(&cfg.utility, &cfg.belief, samples)?,
        AssumptionArg::Claim7 => check_sls_implies_shift(&cfg.utility, &cfg.belief, samples)?,
    }
    .rounded();
    emit(out.map(PathBuf::as_path), &json_line(&report))?;
    if report.passed {
        Ok(EXIT_OK)
    } else {
        eprintln!("assumption violated; witness written to the report");
        Ok(EXIT_WITNESS)
    }
}

pub fn counterexample(t_r: f64, out: Option<&PathBuf>) -> Outcome {
    let rows = counterexample_rows(t_r, COUNTEREXAMPLE_INTERVALS)?;
    let mut body = Vec::new();
    analysis::write_counterexample_csv(&rows, &mut body)?;
    emit(out.map(PathBuf::as_path), &body)?;
    Ok(EXIT_OK)
}
