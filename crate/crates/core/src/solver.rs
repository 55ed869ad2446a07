//! Algorithm selection and dispatch.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::alm::{dalm_solve, palm_solve};
use crate::error::{L1Error, Result};
use crate::gradient_projection::{gpsr_solve, tnipm_solve};
use crate::homotopy::homotopy_solve;
use crate::model::{Problem, SolverConfig, SolverResult};
use crate::numerics::Dictionary;
use crate::pdipa::pdipa_solve;
use crate::shrinkage::{fista_solve, ist_solve_default};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Pdipa,
    Homotopy,
    #[serde(alias = "gp")]
    Gpsr,
    Tnipm,
    Ist,
    Fista,
    Palm,
    Dalm,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Pdipa,
        Algorithm::Homotopy,
        Algorithm::Gpsr,
        Algorithm::Tnipm,
        Algorithm::Ist,
        Algorithm::Fista,
        Algorithm::Palm,
        Algorithm::Dalm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Pdipa => "pdipa",
            Algorithm::Homotopy => "homotopy",
            Algorithm::Gpsr => "gpsr",
            Algorithm::Tnipm => "tnipm",
            Algorithm::Ist => "ist",
            Algorithm::Fista => "fista",
            Algorithm::Palm => "palm",
            Algorithm::Dalm => "dalm",
        }
    }

    /// Solvers of the equality-constrained problem; they ignore λ (homotopy
    /// does so only when λ is unset).
    pub fn is_equality_form(self) -> bool {
        matches!(self, Algorithm::Pdipa | Algorithm::Palm | Algorithm::Dalm)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = L1Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        if lower == "gp" {
            return Ok(Algorithm::Gpsr);
        }
        Algorithm::ALL.into_iter().find(|a| a.name() == lower).ok_or_else(|| {
            let names: Vec<&str> = Algorithm::ALL.iter().map(|a| a.name()).collect();
            L1Error::InvalidArgument(format!("unknown algorithm '{s}' (expected one of {})", names.join(", ")))
        })
    }
}

/// Runs `algo` on `problem`.
pub fn solve<D: Dictionary + ?Sized>(
    algo: Algorithm,
    problem: &Problem<'_, D>,
    config: &SolverConfig,
) -> Result<SolverResult> {
    config.validate()?;
    match algo {
        Algorithm::Pdipa => pdipa_solve(problem, config),
        Algorithm::Homotopy => homotopy_solve(problem, config),
        Algorithm::Gpsr => gpsr_solve(problem, config),
        Algorithm::Tnipm => tnipm_solve(problem, config),
        Algorithm::Ist => ist_solve_default(problem, config),
        Algorithm::Fista => fista_solve(problem, config),
        Algorithm::Palm => palm_solve(problem, config),
        Algorithm::Dalm => dalm_solve(problem, config),
    }
}
