//! Bounded-variable two-phase primal simplex on a dense tableau.
//!
//! Pipeline: singleton rows become bound tightenings, the remaining rows are
//! equilibrated (power-of-two scales, so scaling is exact), slacks turn every
//! row into an equality, phase 1 drives artificials out, phase 2 optimizes.
//! Dantzig pricing with a Bland fallback on degeneracy stalls keeps the
//! iteration deterministic. Optimality is re-checked against the original
//! data; anything suspicious is reported as a numerical error instead of a
//! silently wrong answer.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::instance::{MilpInstance, Sense};
use crate::solver::{InfeasibleCertificate, SolveError, SolverTolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Outcome of one LP solve over the instance with integrality relaxed.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Structural variable values (empty unless optimal).
    pub x: Vec<f64>,
    pub objective: f64,
    /// Row index -> column index of the final basis (slack columns included),
    /// usable as a compact basis summary.
    pub basis: Vec<usize>,
    pub iterations: usize,
    /// Rows phase 1 could not satisfy, when infeasible.
    pub certificate: InfeasibleCertificate,
}

/// Solves the LP relaxation with the instance's own bounds.
pub fn solve_lp(inst: &MilpInstance, tol: &SolverTolerances) -> Result<LpSolution, SolveError> {
    inst.check_structure().map_err(|e| SolveError::Structure(e.0))?;
    solve_lp_with(inst, &inst.lower, &inst.upper, tol)
}

/// Solves the LP relaxation with overridden variable bounds (used by the
/// branch-and-bound nodes). The override slices must cover every variable.
pub fn solve_lp_with(
    inst: &MilpInstance,
    lower: &[f64],
    upper: &[f64],
    tol: &SolverTolerances,
) -> Result<LpSolution, SolveError> {
    let mut std = match Standardized::build(inst, lower, upper, tol) {
        Ok(s) => s,
        Err(cert) => {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: Vec::new(),
                objective: f64::INFINITY,
                basis: Vec::new(),
                iterations: 0,
                certificate: cert,
            })
        }
    };
    std.solve(inst, tol)
}

/// Column state during the simplex iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VState {
    Basic(usize),
    AtLower,
    AtUpper,
    Free,
}

struct Standardized {
    /// Rows kept in the matrix (others were folded into bounds or dropped).
    row_labels: Vec<String>,
    m: usize,
    /// Real columns: structural variables then one slack per kept row.
    nc: usize,
    n_struct: usize,
    /// Dense row-major tableau over real columns, m x nc. Starts as the
    /// scaled constraint matrix and is pivoted in place.
    t: Vec<f64>,
    b: Vec<f64>,
    /// Scaled phase-2 costs over real columns.
    c: Vec<f64>,
    /// Bounds over real + artificial columns.
    lb: Vec<f64>,
    ub: Vec<f64>,
    col_scale: Vec<f64>,
    x: Vec<f64>,
    state: Vec<VState>,
    basis: Vec<usize>,
    iterations: usize,
    max_pivot: f64,
    min_pivot: f64,
}

/// Nearest power of two to `1/v`, clamped; power-of-two scales keep the
/// equilibration exact in floating point.
fn pow2_scale(v: f64) -> f64 {
    if v <= 0.0 || !v.is_finite() {
        return 1.0;
    }
    let e = libm::round(-libm::log2(v)).clamp(-40.0, 40.0);
    let p = crate::float::powi(2.0, e.abs() as u32);
    if e < 0.0 {
        1.0 / p
    } else {
        p
    }
}

impl Standardized {
    /// Builds the equality-form problem. Returns an infeasibility
    /// certificate right away when singleton rows already conflict.
    fn build(
        inst: &MilpInstance,
        lower: &[f64],
        upper: &[f64],
        tol: &SolverTolerances,
    ) -> Result<Standardized, InfeasibleCertificate> {
        let n = inst.n_vars();
        let mut lb: Vec<f64> = lower.to_vec();
        let mut ub: Vec<f64> = upper.to_vec();

        // branching can empty a bound interval outright
        for j in 0..n {
            if lb[j] > ub[j] + tol.feasibility * (1.0 + lb[j].abs()) {
                return Err(InfeasibleCertificate {
                    rows: vec![format!("<bounds of {}>", inst.var_names[j])],
                });
            }
            if lb[j] > ub[j] {
                lb[j] = ub[j];
            }
        }

        // singleton rows tighten bounds instead of occupying the matrix
        let mut kept_rows: Vec<usize> = Vec::with_capacity(inst.rows.len());
        for (ri, row) in inst.rows.iter().enumerate() {
            if is_vacuous(row.sense, row.rhs, tol) {
                continue;
            }
            let live: Vec<(u32, f64)> = row
                .coeffs
                .iter()
                .copied()
                .filter(|&(j, _)| lb[j as usize] != ub[j as usize])
                .collect();
            let fixed_part: f64 = row
                .coeffs
                .iter()
                .filter(|&&(j, _)| lb[j as usize] == ub[j as usize])
                .map(|&(j, a)| a * lb[j as usize])
                .sum();
            match live.len() {
                0 => {
                    let lhs = fixed_part;
                    let violated = match row.sense {
                        Sense::Le => lhs > row.rhs + tol.feasibility * (1.0 + row.rhs.abs()),
                        Sense::Ge => lhs < row.rhs - tol.feasibility * (1.0 + row.rhs.abs()),
                        Sense::Eq => (lhs - row.rhs).abs() > tol.feasibility * (1.0 + row.rhs.abs()),
                    };
                    if violated {
                        return Err(InfeasibleCertificate { rows: vec![row.label.clone()] });
                    }
                }
                1 => {
                    let (j, a) = (live[0].0 as usize, live[0].1);
                    let r = (row.rhs - fixed_part) / a;
                    let tighten_upper = match row.sense {
                        Sense::Le => a > 0.0,
                        Sense::Ge => a < 0.0,
                        Sense::Eq => true,
                    };
                    let tighten_lower = match row.sense {
                        Sense::Le => a < 0.0,
                        Sense::Ge => a > 0.0,
                        Sense::Eq => true,
                    };
                    if tighten_upper && r < ub[j] {
                        ub[j] = r;
                    }
                    if tighten_lower && r > lb[j] {
                        lb[j] = r;
                    }
                    if lb[j] > ub[j] + tol.feasibility * (1.0 + lb[j].abs()) {
                        return Err(InfeasibleCertificate { rows: vec![row.label.clone()] });
                    }
                    if lb[j] > ub[j] {
                        // collapse the sliver so downstream code sees a point
                        let mid = ub[j];
                        lb[j] = mid;
                    }
                }
                _ => kept_rows.push(ri),
            }
        }

        let m = kept_rows.len();
        let nc = n + m;
        let mut row_labels = Vec::with_capacity(m);

        // scales: rows first (max-|a| equilibration), then columns
        let mut row_scale = vec![1.0f64; m];
        let mut col_scale = vec![1.0f64; n];
        for (k, &ri) in kept_rows.iter().enumerate() {
            let mx = inst.rows[ri].coeffs.iter().map(|&(_, a)| a.abs()).fold(0.0, f64::max);
            row_scale[k] = pow2_scale(mx);
        }
        let mut col_max = vec![0.0f64; n];
        for (k, &ri) in kept_rows.iter().enumerate() {
            for &(j, a) in &inst.rows[ri].coeffs {
                let v = (a * row_scale[k]).abs();
                if v > col_max[j as usize] {
                    col_max[j as usize] = v;
                }
            }
        }
        for j in 0..n {
            col_scale[j] = pow2_scale(col_max[j]);
        }

        // assemble the scaled equality system A'x' = b' with slack columns
        let mut t = vec![0.0f64; m * nc];
        let mut b = vec![0.0f64; m];
        let mut slb = vec![0.0f64; nc];
        let mut sub = vec![0.0f64; nc];
        for j in 0..n {
            // x = col_scale * x'  =>  x' bounds divide by the scale
            slb[j] = lb[j] / col_scale[j];
            sub[j] = ub[j] / col_scale[j];
        }
        for (k, &ri) in kept_rows.iter().enumerate() {
            let row = &inst.rows[ri];
            row_labels.push(row.label.clone());
            for &(j, a) in &row.coeffs {
                t[k * nc + j as usize] = a * row_scale[k] * col_scale[j as usize];
            }
            b[k] = row.rhs * row_scale[k];
            let sj = n + k;
            t[k * nc + sj] = 1.0;
            let (lo, hi) = match row.sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            slb[sj] = lo;
            sub[sj] = hi;
        }

        let mut c = vec![0.0f64; nc];
        for j in 0..n {
            c[j] = inst.objective[j] * col_scale[j];
        }

        Ok(Standardized {
            row_labels,
            m,
            nc,
            n_struct: n,
            t,
            b,
            c,
            lb: slb,
            ub: sub,
            col_scale,
            x: Vec::new(),
            state: Vec::new(),
            basis: Vec::new(),
            iterations: 0,
            max_pivot: 0.0,
            min_pivot: f64::INFINITY,
        })
    }

    fn solve(&mut self, inst: &MilpInstance, tol: &SolverTolerances) -> Result<LpSolution, SolveError> {
        let (m, nc) = (self.m, self.nc);
        let total = nc + m;

        // nonbasic placement at the nearest finite bound
        let mut x = vec![0.0f64; total];
        let mut state = vec![VState::Free; total];
        for j in 0..nc {
            if self.lb[j].is_finite() {
                x[j] = self.lb[j];
                state[j] = VState::AtLower;
            } else if self.ub[j].is_finite() {
                x[j] = self.ub[j];
                state[j] = VState::AtUpper;
            } else {
                x[j] = 0.0;
                state[j] = VState::Free;
            }
        }

        // artificial columns close the residual; basis = artificials
        let mut basis = vec![0usize; m];
        let mut lb = core::mem::take(&mut self.lb);
        let mut ub = core::mem::take(&mut self.ub);
        lb.resize(total, 0.0);
        ub.resize(total, f64::INFINITY);
        for i in 0..m {
            let mut r = self.b[i];
            for j in 0..nc {
                let a = self.t[i * nc + j];
                if a != 0.0 {
                    r -= a * x[j];
                }
            }
            let s = if r >= 0.0 { 1.0 } else { -1.0 };
            if s < 0.0 {
                for j in 0..nc {
                    self.t[i * nc + j] = -self.t[i * nc + j];
                }
            }
            let art = nc + i;
            x[art] = r.abs();
            basis[i] = art;
            state[art] = VState::Basic(i);
        }

        self.x = x;
        self.state = state;
        self.lb = lb;
        self.ub = ub;
        self.basis = basis;

        let feas_scale = 1.0 + self.b.iter().map(|v| v.abs()).fold(0.0, f64::max);

        // ---- phase 1 ----
        let phase1_needed = (0..m).any(|i| self.x[nc + i] > 0.0);
        if phase1_needed {
            let status = self.iterate(Phase::One, tol)?;
            if status == LoopEnd::Unbounded {
                return Err(SolveError::Numerical {
                    message: "phase 1 reported unbounded".into(),
                    max_pivot: self.max_pivot,
                    min_pivot: self.min_pivot,
                });
            }
            let infeas: f64 = (0..m).map(|i| self.x[nc + i]).sum();
            if infeas > tol.feasibility * feas_scale * 10.0 {
                let mut rows = Vec::new();
                for i in 0..m {
                    if self.basis[i] >= nc && self.x[self.basis[i]] > tol.feasibility * feas_scale {
                        rows.push(self.row_labels[i].clone());
                    }
                }
                if rows.is_empty() {
                    rows.push("<aggregate phase-1 residual>".into());
                }
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    x: Vec::new(),
                    objective: f64::INFINITY,
                    basis: Vec::new(),
                    iterations: self.iterations,
                    certificate: InfeasibleCertificate { rows },
                });
            }
        }

        // pivot leftover artificials out where possible, then freeze them
        for i in 0..m {
            if self.basis[i] >= nc {
                let mut best: Option<(usize, f64)> = None;
                for j in 0..nc {
                    if matches!(self.state[j], VState::Basic(_)) || self.lb[j] == self.ub[j] {
                        continue;
                    }
                    let a = self.t[i * nc + j].abs();
                    if a > tol.pivot && best.map(|(_, bv)| a > bv).unwrap_or(true) {
                        best = Some((j, a));
                    }
                }
                if let Some((j, _)) = best {
                    self.zero_step_pivot(i, j);
                }
            }
        }
        for art in nc..total {
            self.lb[art] = 0.0;
            self.ub[art] = 0.0;
            if !matches!(self.state[art], VState::Basic(_)) {
                self.state[art] = VState::AtLower;
                self.x[art] = 0.0;
            }
        }

        // ---- phase 2 ----
        let status = self.iterate(Phase::Two, tol)?;
        if status == LoopEnd::Unbounded {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                x: Vec::new(),
                objective: f64::NEG_INFINITY,
                basis: Vec::new(),
                iterations: self.iterations,
                certificate: InfeasibleCertificate::default(),
            });
        }

        // unscale and verify against the original data
        let mut xs = vec![0.0f64; self.n_struct];
        for j in 0..self.n_struct {
            xs[j] = self.x[j] * self.col_scale[j];
            // snap tiny bound excursions
            let (lo, hi) = (inst.lower[j].max(f64::NEG_INFINITY), inst.upper[j]);
            let lo = lo.max(if self.lb[j].is_finite() { self.lb[j] * self.col_scale[j] } else { f64::NEG_INFINITY });
            let hi = hi.min(if self.ub[j].is_finite() { self.ub[j] * self.col_scale[j] } else { f64::INFINITY });
            if xs[j] < lo {
                if lo - xs[j] > tol.feasibility * (1.0 + lo.abs()) * 100.0 {
                    return Err(self.numerical(format!("variable {j} violates its lower bound")));
                }
                xs[j] = lo;
            }
            if xs[j] > hi {
                if xs[j] - hi > tol.feasibility * (1.0 + hi.abs()) * 100.0 {
                    return Err(self.numerical(format!("variable {j} violates its upper bound")));
                }
                xs[j] = hi;
            }
        }
        for row in &inst.rows {
            if is_vacuous(row.sense, row.rhs, tol) {
                continue;
            }
            let act = row.activity(&xs);
            let span = 1.0 + row.rhs.abs() + row.coeffs.iter().map(|&(j, a)| (a * xs[j as usize]).abs()).fold(0.0, f64::max);
            if row.violation(&xs) > tol.feasibility * span * 100.0 {
                return Err(self.numerical(format!(
                    "row '{}' violated at the claimed optimum (activity {act}, rhs {})",
                    row.label, row.rhs
                )));
            }
        }

        Ok(LpSolution {
            status: LpStatus::Optimal,
            objective: inst.objective_value(&xs),
            x: xs,
            basis: self.basis.clone(),
            iterations: self.iterations,
            certificate: InfeasibleCertificate::default(),
        })
    }

    fn numerical(&self, message: String) -> SolveError {
        SolveError::Numerical {
            message,
            max_pivot: self.max_pivot,
            min_pivot: if self.min_pivot.is_finite() { self.min_pivot } else { 0.0 },
        }
    }

    /// Degenerate pivot that swaps an at-zero basic artificial for a real
    /// column without moving the point.
    fn zero_step_pivot(&mut self, i: usize, j: usize) {
        let nc = self.nc;
        let p = self.t[i * nc + j];
        self.max_pivot = self.max_pivot.max(p.abs());
        self.min_pivot = self.min_pivot.min(p.abs());
        let inv = 1.0 / p;
        for col in 0..nc {
            self.t[i * nc + col] *= inv;
        }
        for k in 0..self.m {
            if k == i {
                continue;
            }
            let f = self.t[k * nc + j];
            if f != 0.0 {
                for col in 0..nc {
                    self.t[k * nc + col] -= f * self.t[i * nc + col];
                }
            }
        }
        let leaving = self.basis[i];
        self.state[leaving] = VState::AtLower;
        self.x[leaving] = self.lb[leaving];
        self.basis[i] = j;
        self.state[j] = VState::Basic(i);
    }

    fn iterate(&mut self, phase: Phase, tol: &SolverTolerances) -> Result<LoopEnd, SolveError> {
        let (m, nc) = (self.m, self.nc);
        let max_iters = tol.iteration_factor * (m + nc) + 1000;
        let mut stall = 0usize;
        let mut bland = false;

        loop {
            self.iterations += 1;
            if self.iterations > max_iters {
                return Err(self.numerical(format!("iteration limit {max_iters} exceeded")));
            }

            // price: y_i = cost of the basic variable of row i
            let mut y = vec![0.0f64; m];
            let mut any_y = false;
            for i in 0..m {
                let cb = self.phase_cost(phase, self.basis[i]);
                y[i] = cb;
                any_y |= cb != 0.0;
            }

            let mut entering: Option<(usize, f64, f64)> = None; // (col, violation, direction)
            for j in 0..nc {
                if matches!(self.state[j], VState::Basic(_)) || self.lb[j] == self.ub[j] {
                    continue;
                }
                let mut d = self.phase_cost(phase, j);
                if any_y {
                    for i in 0..m {
                        if y[i] != 0.0 {
                            d -= y[i] * self.t[i * nc + j];
                        }
                    }
                }
                let cand = match self.state[j] {
                    VState::AtLower => {
                        if d < -tol.optimality {
                            Some((-d, 1.0))
                        } else {
                            None
                        }
                    }
                    VState::AtUpper => {
                        if d > tol.optimality {
                            Some((d, -1.0))
                        } else {
                            None
                        }
                    }
                    VState::Free => {
                        if d.abs() > tol.optimality {
                            Some((d.abs(), if d < 0.0 { 1.0 } else { -1.0 }))
                        } else {
                            None
                        }
                    }
                    VState::Basic(_) => None,
                };
                if let Some((viol, dir)) = cand {
                    if bland {
                        entering = Some((j, viol, dir));
                        break;
                    }
                    if entering.map(|(_, bv, _)| viol > bv).unwrap_or(true) {
                        entering = Some((j, viol, dir));
                    }
                }
            }

            let Some((j, _, dir)) = entering else {
                return Ok(LoopEnd::Optimal);
            };

            // ratio test
            let own_range = self.ub[j] - self.lb[j];
            let mut best_t = if own_range.is_finite() { own_range } else { f64::INFINITY };
            let mut leaving: Option<(usize, f64)> = None; // (row, |pivot|)
            for i in 0..m {
                let alpha = dir * self.t[i * nc + j];
                if alpha.abs() <= tol.pivot {
                    continue;
                }
                let bi = self.basis[i];
                let lim = if alpha > 0.0 {
                    if self.lb[bi].is_finite() {
                        (self.x[bi] - self.lb[bi]) / alpha
                    } else {
                        f64::INFINITY
                    }
                } else if self.ub[bi].is_finite() {
                    (self.ub[bi] - self.x[bi]) / (-alpha)
                } else {
                    f64::INFINITY
                };
                if !lim.is_finite() {
                    continue;
                }
                let lim = lim.max(0.0);
                let better = match leaving {
                    _ if lim < best_t - 1e-12 => true,
                    Some((li, lp)) if (lim - best_t).abs() <= 1e-12 => {
                        if bland {
                            self.basis[i] < self.basis[li]
                        } else {
                            alpha.abs() > lp
                        }
                    }
                    None if lim <= best_t => true,
                    _ => false,
                };
                if better {
                    best_t = lim.min(best_t);
                    leaving = Some((i, alpha.abs()));
                }
            }

            if !best_t.is_finite() {
                return Ok(LoopEnd::Unbounded);
            }

            // move the point
            if best_t > 0.0 {
                self.x[j] += dir * best_t;
                for i in 0..m {
                    let a = self.t[i * nc + j];
                    if a != 0.0 {
                        let bi = self.basis[i];
                        self.x[bi] -= dir * best_t * a;
                    }
                }
            }
            if best_t <= 1e-12 {
                stall += 1;
                if stall > tol.stall_limit {
                    bland = true;
                }
            } else {
                stall = 0;
                bland = false;
            }

            match leaving {
                None => {
                    // bound flip
                    self.state[j] = match self.state[j] {
                        VState::AtLower => VState::AtUpper,
                        VState::AtUpper => VState::AtLower,
                        other => other,
                    };
                    // snap exactly onto the bound
                    self.x[j] = if dir > 0.0 { self.ub[j] } else { self.lb[j] };
                }
                Some((r, _)) => {
                    let p = self.t[r * nc + j];
                    self.max_pivot = self.max_pivot.max(p.abs());
                    self.min_pivot = self.min_pivot.min(p.abs());
                    let leaving_var = self.basis[r];
                    let alpha = dir * p;
                    // the leaving variable lands exactly on a bound
                    if alpha > 0.0 {
                        self.x[leaving_var] = self.lb[leaving_var];
                        self.state[leaving_var] = VState::AtLower;
                    } else {
                        self.x[leaving_var] = self.ub[leaving_var];
                        self.state[leaving_var] = VState::AtUpper;
                    }
                    let inv = 1.0 / p;
                    for col in 0..nc {
                        self.t[r * nc + col] *= inv;
                    }
                    for k in 0..m {
                        if k == r {
                            continue;
                        }
                        let f = self.t[k * nc + j];
                        if f != 0.0 {
                            for col in 0..nc {
                                self.t[k * nc + col] -= f * self.t[r * nc + col];
                            }
                        }
                    }
                    self.basis[r] = j;
                    self.state[j] = VState::Basic(r);
                }
            }
        }
    }

    fn phase_cost(&self, phase: Phase, col: usize) -> f64 {
        match phase {
            Phase::One => {
                if col >= self.nc {
                    1.0
                } else {
                    0.0
                }
            }
            Phase::Two => {
                if col >= self.nc {
                    0.0
                } else {
                    self.c[col]
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LoopEnd {
    Optimal,
    Unbounded,
}

pub(crate) fn is_vacuous(sense: Sense, rhs: f64, tol: &SolverTolerances) -> bool {
    match sense {
        Sense::Le => rhs >= tol.vacuous_rhs,
        Sense::Ge => rhs <= -tol.vacuous_rhs,
        Sense::Eq => false,
    }
}
