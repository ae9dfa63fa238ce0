//! JSON model configuration.

use std::fmt;
use std::path::Path;

use electoral_core::{BestResponseOptions, ElectionModel, EquilibriumOptions, IdealPair, MedianBelief, UtilitySpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub utility: UtilitySpec,
    pub belief: MedianBelief,
    pub ideals: IdealPair,
    #[serde(default)]
    pub solver: SolverConfig,
}

/// Solver settings; every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub grid_size: Option<usize>,
    pub refine_tol: Option<f64>,
    pub tie_tol: Option<f64>,
    pub fixpoint_tol: Option<f64>,
    pub max_iters: Option<usize>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl ModelConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses a config, reporting the offending field path and line/column.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            // the inner message already ends with "at line L column C"
            let field = if path == "." { String::new() } else { format!(" at field '{path}'") };
            ConfigError(format!("invalid config{field}: {inner}"))
        })?;
        cfg.equilibrium_options().validate()?;
        Ok(cfg)
    }

    pub fn model(&self) -> ElectionModel {
        ElectionModel { utility: self.utility.clone(), belief: self.belief.clone(), ideals: self.ideals }
    }

    pub fn equilibrium_options(&self) -> EquilibriumOptions {
        let d = EquilibriumOptions::default();
        let s = &self.solver;
        EquilibriumOptions {
            best_response: BestResponseOptions {
                grid_size: s.grid_size.unwrap_or(d.best_response.grid_size),
                refine_tol: s.refine_tol.unwrap_or(d.best_response.refine_tol),
                tie_tol: s.tie_tol.unwrap_or(d.best_response.tie_tol),
            },
            fixpoint_tol: s.fixpoint_tol.unwrap_or(d.fixpoint_tol),
            max_iters: s.max_iters.unwrap_or(d.max_iters),
        }
    }
}

trait Validate {
    fn validate(&self) -> Result<(), ConfigError>;
}

impl Validate for EquilibriumOptions {
    fn validate(&self) -> Result<(), ConfigError> {
        let bad = |field: &str, msg: &str| Err(ConfigError(format!("invalid config at field 'solver.{field}': {msg}")));
        if self.best_response.grid_size < 101 {
            return bad("grid_size", "must be at least 101");
        }
        for (name, v) in [
            ("refine_tol", self.best_response.refine_tol),
            ("tie_tol", self.best_response.tie_tol),
            ("fixpoint_tol", self.fixpoint_tol),
        ] {
            if v.is_nan() || v <= 0.0 || v.is_infinite() {
                return bad(name, "must be positive and finite");
            }
        }
        if self.max_iters == 0 {
            return bad("max_iters", "must be at least 1");
        }
        Ok(())
    }
}
