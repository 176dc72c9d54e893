//! Best-first branch-and-bound on the LP relaxation.
//!
//! Nodes are ordered by their parent relaxation bound (ties by creation
//! order, so the search is deterministic). Branching picks the most
//! fractional integer variable. Before accepting an incumbent the integer
//! assignment is re-solved with the integers fixed, which polishes the
//! continuous part to its exact optimum.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;

use crate::model::instance::MilpInstance;
use crate::solver::lp::{solve_lp_with, LpStatus};
use crate::solver::{InfeasibleCertificate, SolveError, SolverTolerances};

/// Termination and search controls.
#[derive(Debug, Clone)]
pub struct BnbOptions {
    pub tolerances: SolverTolerances,
    /// Absolute incumbent-vs-bound gap accepted as optimal.
    pub abs_gap: f64,
    /// Relative gap accepted as optimal.
    pub rel_gap: f64,
    pub node_limit: Option<u64>,
    /// Wall-clock limit in seconds; only enforced with the `std` feature.
    pub time_limit: Option<f64>,
    /// Try rounding the root relaxation up into an incumbent first.
    pub root_heuristic: bool,
    /// Emit one line per processed node on stderr (`std` only).
    pub log: bool,
}

impl Default for BnbOptions {
    fn default() -> Self {
        BnbOptions {
            tolerances: SolverTolerances::default(),
            abs_gap: 1e-6,
            rel_gap: 1e-6,
            node_limit: None,
            time_limit: None,
            root_heuristic: true,
            log: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MilpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// A node or time limit stopped the search; the incumbent and bound are
    /// still reported.
    LimitReached,
}

/// Search statistics, including the global-bound trace used by the
/// monotonicity checks.
#[derive(Debug, Clone, Default)]
pub struct BnbStats {
    pub nodes: u64,
    pub lp_solves: u64,
    /// `(node id, global lower bound, incumbent)` per processed node.
    pub bound_log: Vec<(u64, f64, Option<f64>)>,
}

/// Raw solver outcome; model-level reporting wraps this with breakdowns.
#[derive(Debug, Clone)]
pub struct RawMilpSolution {
    pub status: MilpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// Proven lower bound on the optimum (minimization).
    pub bound: f64,
    pub certificate: InfeasibleCertificate,
    pub stats: BnbStats,
}

#[derive(Debug)]
struct Node {
    /// Bound overrides accumulated from the root.
    overrides: Vec<(usize, f64, f64)>,
    bound: f64,
    id: u64,
}

/// Min-heap ordering by (bound, id).
impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.id == other.id
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        // reversed: BinaryHeap is a max-heap
        other
            .bound
            .partial_cmp(&self.bound)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then_with(|| other.id.cmp(&self.id))
    }
}

struct Search<'a> {
    inst: &'a MilpInstance,
    opts: &'a BnbOptions,
    int_vars: Vec<usize>,
    incumbent: Option<(f64, Vec<f64>)>,
    stats: BnbStats,
    #[cfg(feature = "std")]
    started: std::time::Instant,
}

pub fn solve_milp(inst: &MilpInstance, opts: &BnbOptions) -> Result<RawMilpSolution, SolveError> {
    inst.check_structure().map_err(|e| SolveError::Structure(e.0))?;
    let int_vars: Vec<usize> = (0..inst.n_vars()).filter(|&j| inst.integer[j]).collect();

    let mut search = Search {
        inst,
        opts,
        int_vars,
        incumbent: None,
        stats: BnbStats::default(),
        #[cfg(feature = "std")]
        started: std::time::Instant::now(),
    };

    // root relaxation
    let root = search.solve_node(&[])?;
    let root = match root {
        NodeLp::Infeasible(cert) => {
            return Ok(RawMilpSolution {
                status: MilpStatus::Infeasible,
                x: Vec::new(),
                objective: f64::INFINITY,
                bound: f64::INFINITY,
                certificate: cert,
                stats: search.stats,
            })
        }
        NodeLp::Unbounded => {
            return Ok(RawMilpSolution {
                status: MilpStatus::Unbounded,
                x: Vec::new(),
                objective: f64::NEG_INFINITY,
                bound: f64::NEG_INFINITY,
                certificate: InfeasibleCertificate::default(),
                stats: search.stats,
            })
        }
        NodeLp::Solved(obj, x) => (obj, x),
    };

    if search.opts.root_heuristic && !search.int_vars.is_empty() {
        search.try_rounding(&root.1)?;
    }

    let mut heap: BinaryHeap<Node> = BinaryHeap::new();
    let mut next_id: u64 = 0;
    heap.push(Node { overrides: Vec::new(), bound: root.0, id: next_id });
    let mut best_bound = root.0;
    let mut hit_limit = false;
    let mut exhausted = true;

    while let Some(node) = heap.pop() {
        best_bound = node.bound;
        search.stats.nodes += 1;
        let inc_obj = search.incumbent.as_ref().map(|(o, _)| *o);
        search.stats.bound_log.push((node.id, best_bound, inc_obj));
        #[cfg(feature = "std")]
        if search.opts.log {
            std::eprintln!(
                "bnb node {:>6}  bound {:>14.6}  incumbent {}",
                node.id,
                best_bound,
                inc_obj.map(|o| alloc::format!("{o:.6}")).unwrap_or_else(|| "-".into())
            );
        }

        if let Some((inc, _)) = &search.incumbent {
            if node.bound >= inc - search.gap_cut(*inc) {
                // everything left in the heap has an even weaker bound
                exhausted = false;
                break;
            }
        }
        if let Some(limit) = search.opts.node_limit {
            if search.stats.nodes > limit {
                hit_limit = true;
                exhausted = false;
                break;
            }
        }
        #[cfg(feature = "std")]
        if let Some(limit) = search.opts.time_limit {
            if search.started.elapsed().as_secs_f64() > limit {
                hit_limit = true;
                exhausted = false;
                break;
            }
        }

        let lp = search.solve_node(&node.overrides)?;
        let (obj, x) = match lp {
            NodeLp::Infeasible(_) => continue,
            NodeLp::Unbounded => {
                // a restricted problem cannot be unbounded if the root was not
                return Err(SolveError::Numerical {
                    message: "node relaxation unbounded below a bounded root".into(),
                    max_pivot: 0.0,
                    min_pivot: 0.0,
                });
            }
            NodeLp::Solved(obj, x) => (obj, x),
        };
        if let Some((inc, _)) = &search.incumbent {
            if obj >= inc - search.gap_cut(*inc) {
                continue;
            }
        }

        match search.most_fractional(&x) {
            None => {
                search.accept_candidate(&x, &node.overrides)?;
            }
            Some(j) => {
                let v = x[j];
                let floor = crate::float::floor(v + search.opts.tolerances.integrality);
                let (lo, hi) = search.effective_bounds(&node.overrides, j);
                // down child: x_j <= floor
                if floor >= lo - 1e-12 {
                    let mut ov = node.overrides.clone();
                    ov.push((j, lo, floor.min(hi)));
                    next_id += 1;
                    heap.push(Node { overrides: ov, bound: obj, id: next_id });
                }
                // up child: x_j >= floor + 1
                if floor + 1.0 <= hi + 1e-12 {
                    let mut ov = node.overrides.clone();
                    ov.push((j, (floor + 1.0).max(lo), hi));
                    next_id += 1;
                    heap.push(Node { overrides: ov, bound: obj, id: next_id });
                }
            }
        }
    }

    match search.incumbent {
        Some((obj, x)) => {
            let status = if hit_limit { MilpStatus::LimitReached } else { MilpStatus::Optimal };
            // exhausting the tree proves the incumbent exactly; a gap-cut
            // break leaves the bound of the breaking node
            let bound = if exhausted { obj } else { best_bound.min(obj) };
            Ok(RawMilpSolution {
                status,
                x,
                objective: obj,
                bound,
                certificate: InfeasibleCertificate::default(),
                stats: search.stats,
            })
        }
        None => Ok(RawMilpSolution {
            status: if hit_limit { MilpStatus::LimitReached } else { MilpStatus::Infeasible },
            x: Vec::new(),
            objective: f64::INFINITY,
            bound: if hit_limit { best_bound } else { f64::INFINITY },
            certificate: InfeasibleCertificate::default(),
            stats: search.stats,
        }),
    }
}

enum NodeLp {
    Solved(f64, Vec<f64>),
    Infeasible(InfeasibleCertificate),
    Unbounded,
}

impl<'a> Search<'a> {
    fn gap_cut(&self, incumbent: f64) -> f64 {
        self.opts.abs_gap.max(self.opts.rel_gap * incumbent.abs())
    }

    fn effective_bounds(&self, overrides: &[(usize, f64, f64)], j: usize) -> (f64, f64) {
        let mut lo = self.inst.lower[j];
        let mut hi = self.inst.upper[j];
        for &(k, l, u) in overrides {
            if k == j {
                lo = l;
                hi = u;
            }
        }
        (lo, hi)
    }

    fn node_bounds(&self, overrides: &[(usize, f64, f64)]) -> (Vec<f64>, Vec<f64>) {
        let mut lo = self.inst.lower.clone();
        let mut hi = self.inst.upper.clone();
        for &(j, l, u) in overrides {
            lo[j] = l;
            hi[j] = u;
        }
        (lo, hi)
    }

    fn solve_node(&mut self, overrides: &[(usize, f64, f64)]) -> Result<NodeLp, SolveError> {
        let (lo, hi) = self.node_bounds(overrides);
        self.stats.lp_solves += 1;
        let sol = solve_lp_with(self.inst, &lo, &hi, &self.opts.tolerances)?;
        Ok(match sol.status {
            LpStatus::Optimal => NodeLp::Solved(sol.objective, sol.x),
            LpStatus::Infeasible => NodeLp::Infeasible(sol.certificate),
            LpStatus::Unbounded => NodeLp::Unbounded,
        })
    }

    fn most_fractional(&self, x: &[f64]) -> Option<usize> {
        let tol = self.opts.tolerances.integrality;
        let mut best: Option<(usize, f64)> = None;
        for &j in &self.int_vars {
            let frac = x[j] - crate::float::floor(x[j]);
            let dist = frac.min(1.0 - frac);
            if dist > tol {
                let score = (frac - 0.5).abs();
                if best.map(|(_, s)| score < s).unwrap_or(true) {
                    best = Some((j, score));
                }
            }
        }
        best.map(|(j, _)| j)
    }

    /// Fixes the integer variables to the rounded values of `x` and
    /// re-solves; a feasible result becomes the incumbent if it improves.
    fn accept_candidate(&mut self, x: &[f64], overrides: &[(usize, f64, f64)]) -> Result<(), SolveError> {
        let mut ov = overrides.to_vec();
        for &j in &self.int_vars {
            let v = crate::float::round(x[j]);
            ov.push((j, v, v));
        }
        match self.solve_node(&ov)? {
            NodeLp::Solved(obj, xx) => {
                if self.incumbent.as_ref().map(|(o, _)| obj < *o).unwrap_or(true) {
                    self.incumbent = Some((obj, xx));
                }
            }
            // rounding drift can make the snap infeasible; drop it
            NodeLp::Infeasible(_) | NodeLp::Unbounded => {}
        }
        Ok(())
    }

    fn try_rounding(&mut self, root_x: &[f64]) -> Result<(), SolveError> {
        // unit counts round up: capacities stay feasible, cost only grows
        let mut ov: Vec<(usize, f64, f64)> = Vec::with_capacity(self.int_vars.len());
        for &j in &self.int_vars {
            let up = crate::float::ceil(root_x[j] - self.opts.tolerances.integrality);
            let v = up.clamp(self.inst.lower[j], self.inst.upper[j]);
            ov.push((j, v, v));
        }
        if let NodeLp::Solved(obj, x) = self.solve_node(&ov)? {
            if self.incumbent.as_ref().map(|(o, _)| obj < *o).unwrap_or(true) {
                self.incumbent = Some((obj, x));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::instance::Sense;
    use alloc::string::ToString;

    #[test]
    fn all_continuous_instances_reduce_to_the_lp() {
        let mut inst = MilpInstance::new();
        let x = inst.push_var("x".to_string(), 0.0, f64::INFINITY, false) as u32;
        inst.objective[x as usize] = 1.0;
        inst.add_row("lo".to_string(), vec![(x, 1.0)], Sense::Ge, 3.0).unwrap();
        let milp = solve_milp(&inst, &BnbOptions::default()).unwrap();
        let lp = crate::solver::solve_lp(&inst, &SolverTolerances::default()).unwrap();
        assert_eq!(milp.status, MilpStatus::Optimal);
        assert!((milp.objective - lp.objective).abs() < 1e-9);
        assert_eq!(milp.stats.nodes, 1);
    }

    #[test]
    fn knapsack_toy_matches_enumeration_by_hand() {
        // max 5a + 4b + 3c st 4a + 3b + 2c <= 6, binaries
        // best is a=1, c=1 -> 8
        let mut inst = MilpInstance::new();
        for name in ["a", "b", "c"] {
            inst.push_var(name.to_string(), 0.0, 1.0, true);
        }
        inst.objective = vec![-5.0, -4.0, -3.0];
        inst.add_row("w".to_string(), vec![(0, 4.0), (1, 3.0), (2, 2.0)], Sense::Le, 6.0).unwrap();
        let milp = solve_milp(&inst, &BnbOptions::default()).unwrap();
        assert_eq!(milp.status, MilpStatus::Optimal);
        assert!((milp.objective + 8.0).abs() < 1e-9, "{}", milp.objective);
        assert!((milp.x[0] - 1.0).abs() < 1e-9);
        assert!((milp.x[2] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn integer_infeasible_is_detected() {
        // 2x = 1 with x integer in [0, 10]
        let mut inst = MilpInstance::new();
        let x = inst.push_var("x".to_string(), 0.0, 10.0, true) as u32;
        inst.objective[x as usize] = 1.0;
        inst.add_row("odd".to_string(), vec![(x, 2.0)], Sense::Eq, 1.0).unwrap();
        let milp = solve_milp(&inst, &BnbOptions::default()).unwrap();
        assert_eq!(milp.status, MilpStatus::Infeasible);
    }

    #[test]
    fn bound_log_is_nondecreasing() {
        // a slightly larger knapsack to get a few nodes
        let mut inst = MilpInstance::new();
        let w = [5.0, 4.0, 6.0, 3.0, 7.0, 4.5];
        let p = [10.0, 7.0, 11.0, 5.0, 13.0, 8.0];
        for (k, _) in w.iter().enumerate() {
            inst.push_var(alloc::format!("x{k}"), 0.0, 1.0, true);
        }
        inst.objective = p.iter().map(|v| -v).collect();
        inst.add_row(
            "cap".to_string(),
            w.iter().enumerate().map(|(j, &a)| (j as u32, a)).collect(),
            Sense::Le,
            14.0,
        )
        .unwrap();
        let milp = solve_milp(&inst, &BnbOptions { root_heuristic: false, ..BnbOptions::default() }).unwrap();
        assert_eq!(milp.status, MilpStatus::Optimal);
        let mut prev = f64::NEG_INFINITY;
        for &(_, bound, _) in &milp.stats.bound_log {
            assert!(bound >= prev - 1e-9, "bound decreased: {prev} -> {bound}");
            prev = bound;
        }
    }

    #[test]
    fn node_limit_reports_limit_status() {
        let mut inst = MilpInstance::new();
        for k in 0..8 {
            inst.push_var(alloc::format!("x{k}"), 0.0, 1.0, true);
        }
        inst.objective = (0..8).map(|k| -(1.0 + k as f64 * 0.3)).collect();
        inst.add_row(
            "cap".to_string(),
            (0..8).map(|j| (j as u32, 1.0 + (j % 3) as f64)).collect(),
            Sense::Le,
            5.5,
        )
        .unwrap();
        let opts = BnbOptions { node_limit: Some(1), root_heuristic: false, ..BnbOptions::default() };
        let milp = solve_milp(&inst, &opts).unwrap();
        assert_eq!(milp.status, MilpStatus::LimitReached);
        assert!(milp.bound.is_finite());
    }
}
