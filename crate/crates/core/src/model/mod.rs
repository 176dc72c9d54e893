//! MILP assembly and solution reporting for one scenario.
//!
//! [`assemble`] turns a validated scenario into a solver-agnostic
//! [`MilpInstance`]; [`solve_scenario`] runs the full pipeline
//! (assemble, branch-and-bound, evaluate) and returns an indicator-annotated
//! [`MilpSolution`].

pub mod build;
pub mod eval;
pub mod instance;
pub mod vars;

pub use build::{assemble, production_bounds, BuildError, Builder, BuiltModel, EpsilonBounds};
pub use eval::{
    evaluate, levelized_cost, Breakdowns, CostBySubsystem, EvalError, GhgBySubsystem, MilpSolution,
    RiskBySubsystem, WaterCell,
};
pub use instance::{Criterion, InstanceMeta, MilpInstance, Row, Sense, StructureError};
pub use vars::{VarFamily, VariableIndex};

use crate::scenario::Scenario;
use crate::solver::{solve_milp, BnbOptions, SolveError};

/// Pipeline failure of [`solve_scenario`].
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioSolveError {
    Build(BuildError),
    Solve(SolveError),
    Eval(EvalError),
}

impl core::fmt::Display for ScenarioSolveError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ScenarioSolveError::Build(e) => write!(f, "model build failed: {e}"),
            ScenarioSolveError::Solve(e) => write!(f, "solve failed: {e}"),
            ScenarioSolveError::Eval(e) => write!(f, "solution evaluation failed: {e}"),
        }
    }
}

impl From<BuildError> for ScenarioSolveError {
    fn from(e: BuildError) -> Self {
        ScenarioSolveError::Build(e)
    }
}
impl From<SolveError> for ScenarioSolveError {
    fn from(e: SolveError) -> Self {
        ScenarioSolveError::Solve(e)
    }
}
impl From<EvalError> for ScenarioSolveError {
    fn from(e: EvalError) -> Self {
        ScenarioSolveError::Eval(e)
    }
}

/// Assembles, solves and evaluates a scenario under one objective.
pub fn solve_scenario(
    s: &Scenario,
    objective: Criterion,
    eps: Option<EpsilonBounds>,
    opts: &BnbOptions,
) -> Result<(MilpSolution, BuiltModel), ScenarioSolveError> {
    let built = assemble(s, objective, eps)?;
    let raw = solve_milp(&built.instance, opts)?;
    let sol = evaluate(s, &built, raw)?;
    Ok((sol, built))
}
