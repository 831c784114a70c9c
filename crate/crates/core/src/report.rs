//! Solver reports: gates with witnesses, verified solutions, residuals.

use serde::{Deserialize, Serialize};

use crate::model::{ModelParams, Residual};
use crate::padic::PadicNumber;

/// One divisibility (or ball / range) predicate with a human-readable witness.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GateCheck {
    pub name: String,
    pub holds: bool,
    pub witness: String,
}

impl GateCheck {
    pub fn new(name: impl Into<String>, holds: bool, witness: impl Into<String>) -> Self {
        GateCheck {
            name: name.into(),
            holds,
            witness: witness.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionClass {
    Ti,
    Period2,
}

impl std::fmt::Display for SolutionClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolutionClass::Ti => write!(f, "ti"),
            SolutionClass::Period2 => write!(f, "period2"),
        }
    }
}

/// A verified solution: its residues (one value for a constant law, the
/// ordered pair for period 2) and the residuals of its defining equations.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Solution {
    pub class: SolutionClass,
    pub residues: Vec<PadicNumber>,
    pub precision: u32,
    pub residual_valuations: Vec<Residual>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportStatus {
    /// A solution of the requested class was found and re-verified.
    Solved,
    /// A required divisibility/ball condition fails; no solution exists or
    /// none is claimed.
    GateFailed,
    /// Necessary conditions hold but the available argument cannot decide
    /// existence (p in {3, 5} for the general period-2 equation).
    Undecided,
    /// An exhaustive residue scan certified that no root lies in E_p.
    NoRootInEp,
    /// The only root of the period-2 polynomial in E_p is the fixed point of
    /// g itself, so no genuinely periodic pair exists at this precision.
    TiCoincident,
    /// The search could neither certify nonexistence nor refine a root at the
    /// working precision.
    NumericalFailure,
}

impl ReportStatus {
    pub fn exit_code(&self) -> i32 {
        match self {
            ReportStatus::Solved => 0,
            ReportStatus::GateFailed
            | ReportStatus::Undecided
            | ReportStatus::NoRootInEp
            | ReportStatus::TiCoincident => 2,
            ReportStatus::NumericalFailure => 3,
        }
    }
}

impl std::fmt::Display for ReportStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ReportStatus::Solved => "solved",
            ReportStatus::GateFailed => "gate_failed",
            ReportStatus::Undecided => "undecided",
            ReportStatus::NoRootInEp => "no_root_in_ep",
            ReportStatus::TiCoincident => "ti_coincident",
            ReportStatus::NumericalFailure => "numerical_failure",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportParams {
    pub p: u64,
    pub k: u32,
    #[serde(rename = "J")]
    pub coupling: PadicNumber,
    pub lambda: PadicNumber,
}

impl From<&ModelParams> for ReportParams {
    fn from(params: &ModelParams) -> Self {
        ReportParams {
            p: params.prime(),
            k: params.order(),
            coupling: params.coupling().clone(),
            lambda: params.fugacity().clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub params: ReportParams,
    pub gates: Vec<GateCheck>,
    pub solutions: Vec<Solution>,
    pub status: ReportStatus,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl SolveReport {
    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn render_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "params: p = {}, k = {}", self.params.p, self.params.k);
        let _ = writeln!(out, "  lambda = {}", self.params.lambda);
        let _ = writeln!(out, "  J      = {}", self.params.coupling);
        for gate in &self.gates {
            let _ = writeln!(
                out,
                "gate {}: {} ({})",
                gate.name,
                if gate.holds { "holds" } else { "fails" },
                gate.witness
            );
        }
        let _ = writeln!(out, "status: {}", self.status);
        for sol in &self.solutions {
            let _ = writeln!(
                out,
                "solution [{}], precision {}:",
                sol.class, sol.precision
            );
            for (i, z) in sol.residues.iter().enumerate() {
                let _ = writeln!(out, "  z{} = {}", i + 1, z);
            }
            for r in &sol.residual_valuations {
                let _ = writeln!(out, "  residual valuation: {r}");
            }
        }
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_exit_codes_are_total() {
        assert_eq!(ReportStatus::Solved.exit_code(), 0);
        assert_eq!(ReportStatus::GateFailed.exit_code(), 2);
        assert_eq!(ReportStatus::Undecided.exit_code(), 2);
        assert_eq!(ReportStatus::NoRootInEp.exit_code(), 2);
        assert_eq!(ReportStatus::TiCoincident.exit_code(), 2);
        assert_eq!(ReportStatus::NumericalFailure.exit_code(), 3);
    }
}
