//! Multi-objective layer: epsilon-constraint sweep over (GHG, risk) caps
//! with cost as the primary objective, nondominated filtering and m-TOPSIS
//! compromise ranking.

pub mod pareto;
pub mod topsis;

pub use pareto::{dominates, nondominated_indices};
pub use topsis::{mtopsis_rank, RankError, RankMethod, RankingResult};

use alloc::vec::Vec;

use crate::model::{solve_scenario, Criterion, EpsilonBounds, MilpSolution, ScenarioSolveError};
use crate::scenario::Scenario;
use crate::solver::{BnbOptions, MilpStatus};

/// One nondominated outcome of the sweep.
#[derive(Debug, Clone)]
pub struct ParetoPoint {
    /// Total daily cost (kEUR/day).
    pub cost: f64,
    /// Emissions (tCO2e/day).
    pub ghg: f64,
    /// Risk index.
    pub risk: f64,
    /// Levelized cost (EUR/kg).
    pub lcoh: f64,
    /// Discounted cost objective the solver minimized (EUR); the quantity
    /// that is provably monotone along epsilon slices.
    pub objective_cost: f64,
    /// The epsilon pair that produced the point (infinite = open).
    pub eps_ghg: f64,
    pub eps_risk: f64,
    pub solution: MilpSolution,
}

impl ParetoPoint {
    pub fn criteria(&self) -> [f64; 3] {
        [self.cost, self.ghg, self.risk]
    }
}

/// Nondominated archive with its corner summaries.
#[derive(Debug, Clone)]
pub struct ParetoFront {
    /// Sorted by (cost, ghg, risk).
    pub points: Vec<ParetoPoint>,
    /// Component-wise minima over the front.
    pub utopia: [f64; 3],
    /// Component-wise maxima over the front.
    pub nadir: [f64; 3],
}

/// Criterion values (cost kEUR/day, ghg t/day, risk) at each
/// single-objective optimum; its extremes define the epsilon ranges.
#[derive(Debug, Clone)]
pub struct PayoffTable {
    pub rows: [[f64; 3]; 3],
    /// Objective-unit values used for the epsilon grid: ghg (t/day) and
    /// risk (index) at each anchor.
    pub ghg_range: (f64, f64),
    pub risk_range: (f64, f64),
}

#[derive(Debug, Clone)]
pub enum SweepError {
    /// A single-objective anchor failed or was infeasible.
    EmptyFeasibleRegion(Criterion),
    Anchor(Criterion, ScenarioSolveError),
    Cell { eps_ghg: f64, eps_risk: f64, source: ScenarioSolveError },
    /// Every sweep cell came back infeasible.
    NoPoints,
    BadGrid,
}

impl core::fmt::Display for SweepError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SweepError::EmptyFeasibleRegion(c) => {
                write!(f, "empty feasible region: the {}-anchor is infeasible", c.label())
            }
            SweepError::Anchor(c, e) => write!(f, "{}-anchor failed: {e}", c.label()),
            SweepError::Cell { eps_ghg, eps_risk, source } => {
                write!(f, "sweep cell (ghg<={eps_ghg}, risk<={eps_risk}) failed: {source}")
            }
            SweepError::NoPoints => write!(f, "no feasible sweep cell"),
            SweepError::BadGrid => write!(f, "grid counts must be at least 1"),
        }
    }
}

fn point_from_solution(sol: MilpSolution, eps_ghg: f64, eps_risk: f64) -> ParetoPoint {
    let b = sol.breakdowns.as_ref().expect("optimal solutions carry breakdowns");
    ParetoPoint {
        cost: b.tdc_keur_per_day,
        ghg: b.ghg_t_per_day,
        risk: b.risk_index,
        lcoh: b.lcoh_eur_per_kg,
        objective_cost: if sol.objective.is_finite() { sol.objective } else { f64::INFINITY },
        eps_ghg,
        eps_risk,
        solution: sol,
    }
}

/// Solves the three single-objective problems. Any infeasible anchor means
/// the scenario has no feasible chain at all.
pub fn payoff_table(s: &Scenario, opts: &BnbOptions) -> Result<(PayoffTable, Vec<MilpSolution>), SweepError> {
    let mut rows = [[0.0; 3]; 3];
    let mut sols = Vec::with_capacity(3);
    let criteria = [Criterion::Cost, Criterion::Ghg, Criterion::Risk];
    for (k, &c) in criteria.iter().enumerate() {
        let (sol, _) = solve_scenario(s, c, None, opts).map_err(|e| SweepError::Anchor(c, e))?;
        if sol.status != MilpStatus::Optimal {
            return Err(SweepError::EmptyFeasibleRegion(c));
        }
        let b = sol.breakdowns.as_ref().expect("optimal anchor carries breakdowns");
        rows[k] = [b.tdc_keur_per_day, b.ghg_t_per_day, b.risk_index];
        sols.push(sol);
    }
    let ghg_vals = [rows[0][1], rows[1][1], rows[2][1]];
    let risk_vals = [rows[0][2], rows[1][2], rows[2][2]];
    let table = PayoffTable {
        rows,
        ghg_range: (
            ghg_vals.iter().copied().fold(f64::INFINITY, f64::min),
            ghg_vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ),
        risk_range: (
            risk_vals.iter().copied().fold(f64::INFINITY, f64::min),
            risk_vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ),
    };
    Ok((table, sols))
}

/// Evenly spaced epsilon values across a payoff range, extremes included.
/// A single-point grid leaves the bound open.
pub fn eps_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return alloc::vec![f64::INFINITY];
    }
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        out.push(lo + (hi - lo) * k as f64 / (n - 1) as f64);
    }
    out
}

/// Solves one cost-primary cell; `None` when the caps make it infeasible.
pub fn solve_cell(
    s: &Scenario,
    eps_ghg: f64,
    eps_risk: f64,
    opts: &BnbOptions,
) -> Result<Option<ParetoPoint>, SweepError> {
    let eps = EpsilonBounds::ghg_risk(eps_ghg, eps_risk);
    let (sol, _) = solve_scenario(s, Criterion::Cost, Some(eps), opts)
        .map_err(|e| SweepError::Cell { eps_ghg, eps_risk, source: e })?;
    match sol.status {
        MilpStatus::Optimal => Ok(Some(point_from_solution(sol, eps_ghg, eps_risk))),
        _ => Ok(None),
    }
}

/// Filters to the nondominated subset (stable (cost, ghg, risk) order,
/// duplicates coalesced) and derives the corner points.
pub fn pareto_filter(points: Vec<ParetoPoint>) -> Vec<ParetoPoint> {
    let triples: Vec<[f64; 3]> = points.iter().map(|p| p.criteria()).collect();
    let keep = nondominated_indices(&triples);
    let mut slots: Vec<Option<ParetoPoint>> = points.into_iter().map(Some).collect();
    keep.into_iter().map(|i| slots[i].take().expect("indices unique")).collect()
}

pub fn build_front(points: Vec<ParetoPoint>) -> Result<ParetoFront, SweepError> {
    let points = pareto_filter(points);
    if points.is_empty() {
        return Err(SweepError::NoPoints);
    }
    let mut utopia = [f64::INFINITY; 3];
    let mut nadir = [f64::NEG_INFINITY; 3];
    for p in &points {
        for (k, v) in p.criteria().into_iter().enumerate() {
            utopia[k] = utopia[k].min(v);
            nadir[k] = nadir[k].max(v);
        }
    }
    Ok(ParetoFront { points, utopia, nadir })
}

/// Full sequential sweep: payoff table, `n_ghg x n_risk` epsilon grid,
/// cost-primary solves, nondominated filter. The companion CLI runs the
/// same cells concurrently.
pub fn epsilon_sweep(s: &Scenario, n_ghg: usize, n_risk: usize, opts: &BnbOptions) -> Result<ParetoFront, SweepError> {
    if n_ghg == 0 || n_risk == 0 {
        return Err(SweepError::BadGrid);
    }
    let (table, _) = payoff_table(s, opts)?;
    let ghg_grid = eps_grid(table.ghg_range.0, table.ghg_range.1, n_ghg);
    let risk_grid = eps_grid(table.risk_range.0, table.risk_range.1, n_risk);
    let mut points = Vec::new();
    for &eg in &ghg_grid {
        for &er in &risk_grid {
            if let Some(p) = solve_cell(s, eg, er, opts)? {
                points.push(p);
            }
        }
    }
    build_front(points)
}
