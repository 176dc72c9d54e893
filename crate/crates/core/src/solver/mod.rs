//! Exact desk-scale MILP solving.
//!
//! A bounded-variable two-phase primal simplex handles the LP relaxations;
//! best-first branch-and-bound with most-fractional branching handles
//! integrality. An exhaustive enumeration oracle and a fixed-format MPS
//! writer/reader round out the toolbox. No cutting planes and no presolve
//! beyond singleton-row elimination: desk-scale instances do not need them
//! and correctness is anchored to the oracle.

mod bnb;
mod enumerate;
mod lp;
mod mps;

pub use bnb::{solve_milp, BnbOptions, BnbStats, MilpStatus, RawMilpSolution};
pub use enumerate::{enumerate_oracle, EnumerateError, EnumerateStats};
pub use lp::{solve_lp, solve_lp_with, LpSolution, LpStatus};
pub use mps::{parse_mps, write_mps, MpsError};

use alloc::string::String;
use alloc::vec::Vec;

/// Every numeric threshold of the solver in one record.
#[derive(Debug, Clone)]
pub struct SolverTolerances {
    /// Primal feasibility, scaled: residuals above this are a failure.
    pub feasibility: f64,
    /// Reduced-cost optimality threshold.
    pub optimality: f64,
    /// Distance from an integer below which a value counts as integral.
    pub integrality: f64,
    /// Smallest tableau entry accepted as a pivot.
    pub pivot: f64,
    /// Degenerate iterations tolerated before switching to Bland's rule.
    pub stall_limit: usize,
    /// Iteration budget per LP as a multiple of (rows + columns).
    pub iteration_factor: usize,
    /// Right-hand sides at or beyond this magnitude mark vacuous rows
    /// (epsilon bounds left open).
    pub vacuous_rhs: f64,
}

impl Default for SolverTolerances {
    fn default() -> Self {
        SolverTolerances {
            feasibility: 1e-7,
            optimality: 1e-9,
            integrality: 1e-6,
            pivot: 1e-9,
            stall_limit: 200,
            iteration_factor: 60,
            vacuous_rhs: 1e29,
        }
    }
}

/// Hard solver failure. Infeasible/unbounded are statuses, not errors;
/// this is reserved for numerical breakdown, reported rather than silently
/// returning a wrong answer.
#[derive(Debug, Clone, PartialEq)]
pub enum SolveError {
    Numerical {
        message: String,
        /// Condition diagnostics: largest/smallest pivot magnitude seen.
        max_pivot: f64,
        min_pivot: f64,
    },
    /// The instance failed its structural check before solving.
    Structure(String),
}

impl core::fmt::Display for SolveError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SolveError::Numerical { message, max_pivot, min_pivot } => write!(
                f,
                "numerical breakdown: {message} (pivot magnitudes {min_pivot:.3e}..{max_pivot:.3e})"
            ),
            SolveError::Structure(msg) => write!(f, "{msg}"),
        }
    }
}

/// Rows left unsatisfiable by phase 1; the infeasibility certificate
/// reported to callers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InfeasibleCertificate {
    pub rows: Vec<String>,
}
