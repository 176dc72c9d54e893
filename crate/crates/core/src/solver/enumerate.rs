//! Exhaustive enumeration over integer assignments.
//!
//! Ground truth for the branch-and-bound tests: every point of the integer
//! domain cross-product is fixed and the remaining continuous LP solved.
//! Refuses instances whose domain product exceeds the cap.

use alloc::string::String;
use alloc::vec::Vec;

use crate::model::instance::MilpInstance;
use crate::solver::bnb::{BnbStats, MilpStatus, RawMilpSolution};
use crate::solver::lp::{solve_lp_with, LpStatus};
use crate::solver::{InfeasibleCertificate, SolveError, SolverTolerances};

pub const DEFAULT_DOMAIN_CAP: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub enum EnumerateError {
    /// Product of the integer domain sizes exceeds the cap.
    DomainTooLarge { product: f64, cap: f64 },
    /// An integer variable has an infinite bound and cannot be enumerated.
    UnboundedInteger { name: String },
    Solve(SolveError),
}

impl core::fmt::Display for EnumerateError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EnumerateError::DomainTooLarge { product, cap } => {
                write!(f, "integer domain product {product:.3e} exceeds the enumeration cap {cap:.3e}")
            }
            EnumerateError::UnboundedInteger { name } => {
                write!(f, "integer variable '{name}' has an unbounded domain")
            }
            EnumerateError::Solve(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct EnumerateStats {
    pub assignments: u64,
    pub lp_solves: u64,
    pub feasible: u64,
}

/// Solves the instance by brute force. `cap` limits the number of integer
/// assignments visited (`None` = [`DEFAULT_DOMAIN_CAP`]).
pub fn enumerate_oracle(
    inst: &MilpInstance,
    cap: Option<f64>,
    tol: &SolverTolerances,
) -> Result<(RawMilpSolution, EnumerateStats), EnumerateError> {
    inst.check_structure().map_err(|e| EnumerateError::Solve(SolveError::Structure(e.0)))?;
    let cap = cap.unwrap_or(DEFAULT_DOMAIN_CAP);
    let int_vars: Vec<usize> = (0..inst.n_vars()).filter(|&j| inst.integer[j]).collect();

    let mut product = 1.0f64;
    let mut lows: Vec<i64> = Vec::with_capacity(int_vars.len());
    let mut sizes: Vec<i64> = Vec::with_capacity(int_vars.len());
    for &j in &int_vars {
        let lo = inst.lower[j];
        let hi = inst.upper[j];
        if !lo.is_finite() || !hi.is_finite() {
            return Err(EnumerateError::UnboundedInteger { name: inst.var_names[j].clone() });
        }
        let lo = crate::float::ceil(lo - 1e-9) as i64;
        let hi = crate::float::floor(hi + 1e-9) as i64;
        let size = (hi - lo + 1).max(0);
        lows.push(lo);
        sizes.push(size);
        product *= size as f64;
        if product > cap {
            return Err(EnumerateError::DomainTooLarge { product, cap });
        }
    }

    let mut stats = EnumerateStats::default();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut counters: Vec<i64> = alloc::vec![0; int_vars.len()];
    let mut lo_bounds = inst.lower.clone();
    let mut hi_bounds = inst.upper.clone();

    if sizes.iter().any(|&s| s == 0) {
        return Ok((
            RawMilpSolution {
                status: MilpStatus::Infeasible,
                x: Vec::new(),
                objective: f64::INFINITY,
                bound: f64::INFINITY,
                certificate: InfeasibleCertificate::default(),
                stats: BnbStats::default(),
            },
            stats,
        ));
    }

    loop {
        stats.assignments += 1;
        for (k, &j) in int_vars.iter().enumerate() {
            let v = (lows[k] + counters[k]) as f64;
            lo_bounds[j] = v;
            hi_bounds[j] = v;
        }
        stats.lp_solves += 1;
        let sol = solve_lp_with(inst, &lo_bounds, &hi_bounds, tol).map_err(EnumerateError::Solve)?;
        match sol.status {
            LpStatus::Optimal => {
                stats.feasible += 1;
                if best.as_ref().map(|(o, _)| sol.objective < *o).unwrap_or(true) {
                    best = Some((sol.objective, sol.x));
                }
            }
            LpStatus::Unbounded => {
                return Ok((
                    RawMilpSolution {
                        status: MilpStatus::Unbounded,
                        x: Vec::new(),
                        objective: f64::NEG_INFINITY,
                        bound: f64::NEG_INFINITY,
                        certificate: InfeasibleCertificate::default(),
                        stats: BnbStats::default(),
                    },
                    stats,
                ));
            }
            LpStatus::Infeasible => {}
        }

        // odometer
        let mut k = int_vars.len();
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            counters[k] += 1;
            if counters[k] < sizes[k] {
                break;
            }
            counters[k] = 0;
            if k == 0 {
                k = usize::MAX;
                break;
            }
        }
        if int_vars.is_empty() || k == usize::MAX {
            break;
        }
    }

    let raw = match best {
        Some((obj, x)) => RawMilpSolution {
            status: MilpStatus::Optimal,
            x,
            objective: obj,
            bound: obj,
            certificate: InfeasibleCertificate::default(),
            stats: BnbStats::default(),
        },
        None => RawMilpSolution {
            status: MilpStatus::Infeasible,
            x: Vec::new(),
            objective: f64::INFINITY,
            bound: f64::INFINITY,
            certificate: InfeasibleCertificate::default(),
            stats: BnbStats::default(),
        },
    };
    Ok((raw, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::instance::Sense;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn zero_integers_equals_plain_lp() {
        let mut inst = MilpInstance::new();
        let x = inst.push_var("x".to_string(), 0.0, f64::INFINITY, false) as u32;
        inst.objective[x as usize] = 1.0;
        inst.add_row("lo".to_string(), vec![(x, 1.0)], Sense::Ge, 3.0).unwrap();
        let (sol, stats) = enumerate_oracle(&inst, None, &SolverTolerances::default()).unwrap();
        assert_eq!(sol.status, MilpStatus::Optimal);
        assert!((sol.objective - 3.0).abs() < 1e-9);
        assert_eq!(stats.lp_solves, 1);
    }

    #[test]
    fn two_binaries_visit_exactly_four_assignments() {
        let mut inst = MilpInstance::new();
        inst.push_var("a".to_string(), 0.0, 1.0, true);
        inst.push_var("b".to_string(), 0.0, 1.0, true);
        inst.objective = vec![-2.0, -3.0];
        inst.add_row("cap".to_string(), vec![(0, 1.0), (1, 1.0)], Sense::Le, 1.0).unwrap();
        let (sol, stats) = enumerate_oracle(&inst, None, &SolverTolerances::default()).unwrap();
        assert_eq!(stats.assignments, 4);
        assert_eq!(stats.lp_solves, 4);
        assert!((sol.objective + 3.0).abs() < 1e-9);
    }

    #[test]
    fn cap_violation_reports_the_product() {
        let mut inst = MilpInstance::new();
        for k in 0..4 {
            inst.push_var(alloc::format!("x{k}"), 0.0, 9.0, true);
        }
        inst.objective[0] = 1.0;
        inst.add_row("r".to_string(), vec![(0, 1.0), (1, 1.0)], Sense::Ge, 1.0).unwrap();
        match enumerate_oracle(&inst, Some(100.0), &SolverTolerances::default()) {
            Err(EnumerateError::DomainTooLarge { product, cap }) => {
                assert_eq!(cap, 100.0);
                assert!(product > 100.0);
            }
            other => panic!("expected a cap violation, got {other:?}"),
        }
    }

    #[test]
    fn unbounded_integer_domain_is_rejected() {
        let mut inst = MilpInstance::new();
        inst.push_var("n".to_string(), 0.0, f64::INFINITY, true);
        inst.objective[0] = 1.0;
        inst.add_row("r".to_string(), vec![(0, 1.0)], Sense::Ge, 1.0).unwrap();
        assert!(matches!(
            enumerate_oracle(&inst, None, &SolverTolerances::default()),
            Err(EnumerateError::UnboundedInteger { .. })
        ));
    }
}
