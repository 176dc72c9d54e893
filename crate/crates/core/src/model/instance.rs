//! Solver-agnostic MILP container: variable catalog with bounds and
//! integrality marks, sparse constraint rows, one objective vector.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

/// Row comparison sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

/// One sparse constraint row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub label: String,
    /// `(variable index, coefficient)`, indices strictly increasing.
    pub coeffs: Vec<(u32, f64)>,
    pub sense: Sense,
    /// Right-hand side; an infinite value of the non-binding sign marks a
    /// deliberately vacuous row (epsilon bound left open).
    pub rhs: f64,
}

impl Row {
    /// Left-hand side value at a point.
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j as usize]).sum()
    }

    /// Amount by which the row is violated at a point (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.activity(x);
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// Objective selector of one model build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Cost,
    Ghg,
    Risk,
}

impl Criterion {
    pub fn label(self) -> &'static str {
        match self {
            Criterion::Cost => "cost",
            Criterion::Ghg => "ghg",
            Criterion::Risk => "risk",
        }
    }
}

/// Build metadata: which objective the vector encodes and which epsilon
/// bounds were applied.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceMeta {
    pub objective: Criterion,
    pub eps_cost: Option<f64>,
    pub eps_ghg: Option<f64>,
    pub eps_risk: Option<f64>,
}

impl Default for InstanceMeta {
    fn default() -> Self {
        InstanceMeta { objective: Criterion::Cost, eps_cost: None, eps_ghg: None, eps_risk: None }
    }
}

/// A complete minimization MILP.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpInstance {
    pub var_names: Vec<String>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub integer: Vec<bool>,
    pub objective: Vec<f64>,
    pub objective_constant: f64,
    pub rows: Vec<Row>,
    pub meta: InstanceMeta,
}

/// Structural defect found by [`MilpInstance::check_structure`].
#[derive(Debug, Clone, PartialEq)]
pub struct StructureError(pub String);

impl core::fmt::Display for StructureError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "malformed instance: {}", self.0)
    }
}

impl MilpInstance {
    pub fn new() -> Self {
        MilpInstance {
            var_names: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
            integer: Vec::new(),
            objective: Vec::new(),
            objective_constant: 0.0,
            rows: Vec::new(),
            meta: InstanceMeta::default(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn push_var(&mut self, name: String, lower: f64, upper: f64, integer: bool) -> usize {
        self.var_names.push(name);
        self.lower.push(lower);
        self.upper.push(upper);
        self.integer.push(integer);
        self.objective.push(0.0);
        self.var_names.len() - 1
    }

    /// Pins a variable to a single value.
    pub fn fix_var(&mut self, j: usize, value: f64) {
        self.lower[j] = value;
        self.upper[j] = value;
    }

    /// Adds a row, merging duplicate variable references and dropping zero
    /// coefficients. Rows referencing no variable are rejected.
    pub fn add_row(
        &mut self,
        label: String,
        mut coeffs: Vec<(u32, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> Result<usize, StructureError> {
        coeffs.sort_unstable_by_key(|&(j, _)| j);
        let mut merged: Vec<(u32, f64)> = Vec::with_capacity(coeffs.len());
        for (j, a) in coeffs {
            if let Some(last) = merged.last_mut() {
                if last.0 == j {
                    last.1 += a;
                    continue;
                }
            }
            merged.push((j, a));
        }
        merged.retain(|&(_, a)| a != 0.0);
        if merged.is_empty() {
            return Err(StructureError(format!("row '{label}' references no variable")));
        }
        self.rows.push(Row { label, coeffs: merged, sense, rhs });
        Ok(self.rows.len() - 1)
    }

    /// Objective value at a point.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective_constant + self.objective.iter().zip(x.iter()).map(|(c, v)| c * v).sum::<f64>()
    }

    /// Largest row violation at a point, with the offending label.
    pub fn max_violation(&self, x: &[f64]) -> (f64, Option<&str>) {
        let mut worst = 0.0;
        let mut label = None;
        for row in &self.rows {
            if row.rhs.is_infinite() {
                continue;
            }
            let v = row.violation(x);
            if v > worst {
                worst = v;
                label = Some(row.label.as_str());
            }
        }
        (worst, label)
    }

    /// Checks the structural invariants: finite coefficients, valid variable
    /// references, consistent bound vectors, no empty rows.
    pub fn check_structure(&self) -> Result<(), StructureError> {
        let n = self.n_vars();
        for v in [self.lower.len(), self.upper.len(), self.integer.len(), self.objective.len()] {
            if v != n {
                return Err(StructureError(format!("catalog vectors disagree on length ({v} vs {n})")));
            }
        }
        for j in 0..n {
            if self.lower[j] > self.upper[j] {
                return Err(StructureError(format!("variable '{}' has empty bound interval", self.var_names[j])));
            }
            if !self.objective[j].is_finite() {
                return Err(StructureError(format!("objective coefficient of '{}' not finite", self.var_names[j])));
            }
        }
        for row in &self.rows {
            if row.coeffs.is_empty() {
                return Err(StructureError(format!("row '{}' is empty", row.label)));
            }
            if row.rhs.is_nan() {
                return Err(StructureError(format!("row '{}' has NaN rhs", row.label)));
            }
            for &(j, a) in &row.coeffs {
                if j as usize >= n {
                    return Err(StructureError(format!("row '{}' references unknown variable {j}", row.label)));
                }
                if !a.is_finite() {
                    return Err(StructureError(format!("row '{}' has non-finite coefficient", row.label)));
                }
            }
        }
        Ok(())
    }

    /// Mathematical equivalence up to `tol`: same dimensions, bounds,
    /// integrality, objective, senses, right-hand sides and sparse
    /// coefficients. Names and metadata are ignored.
    pub fn equivalent_to(&self, other: &MilpInstance, tol: f64) -> bool {
        fn close(a: f64, b: f64, tol: f64) -> bool {
            if a.is_infinite() || b.is_infinite() {
                return a == b;
            }
            (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
        }
        if self.n_vars() != other.n_vars() || self.rows.len() != other.rows.len() {
            return false;
        }
        for j in 0..self.n_vars() {
            if self.integer[j] != other.integer[j]
                || !close(self.lower[j], other.lower[j], tol)
                || !close(self.upper[j], other.upper[j], tol)
                || !close(self.objective[j], other.objective[j], tol)
            {
                return false;
            }
        }
        if !close(self.objective_constant, other.objective_constant, tol) {
            return false;
        }
        for (a, b) in self.rows.iter().zip(other.rows.iter()) {
            if a.sense != b.sense || !close(a.rhs, b.rhs, tol) || a.coeffs.len() != b.coeffs.len() {
                return false;
            }
            for (&(j1, c1), &(j2, c2)) in a.coeffs.iter().zip(b.coeffs.iter()) {
                if j1 != j2 || !close(c1, c2, tol) {
                    return false;
                }
            }
        }
        true
    }

    /// Structured text dump (JSON-shaped) for diffing instances across
    /// builds.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n  \"objective\": \"");
        out.push_str(self.meta.objective.label());
        out.push_str("\",\n  \"variables\": [\n");
        for j in 0..self.n_vars() {
            out.push_str(&format!(
                "    {{\"name\": \"{}\", \"lb\": {}, \"ub\": {}, \"integer\": {}, \"obj\": {}}}{}\n",
                self.var_names[j],
                dump_f64(self.lower[j]),
                dump_f64(self.upper[j]),
                self.integer[j],
                dump_f64(self.objective[j]),
                if j + 1 < self.n_vars() { "," } else { "" }
            ));
        }
        out.push_str("  ],\n  \"rows\": [\n");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(&format!("    {{\"label\": \"{}\", \"sense\": \"{}\", \"rhs\": {}, \"terms\": [", row.label, row.sense.symbol(), dump_f64(row.rhs)));
            for (k, &(j, a)) in row.coeffs.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                out.push_str(&format!("[{j}, {}]", dump_f64(a)));
            }
            out.push_str(&format!("]}}{}\n", if i + 1 < self.rows.len() { "," } else { "" }));
        }
        out.push_str(&format!("  ],\n  \"objective_constant\": {}\n}}\n", dump_f64(self.objective_constant)));
        out
    }
}

impl Default for MilpInstance {
    fn default() -> Self {
        Self::new()
    }
}

fn dump_f64(v: f64) -> String {
    if v == f64::INFINITY {
        String::from("\"inf\"")
    } else if v == f64::NEG_INFINITY {
        String::from("\"-inf\"")
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn rows_merge_duplicates_and_reject_empty() {
        let mut inst = MilpInstance::new();
        let x = inst.push_var("x".to_string(), 0.0, 10.0, false) as u32;
        let r = inst.add_row("r".to_string(), vec![(x, 1.0), (x, 2.0)], Sense::Le, 5.0).unwrap();
        assert_eq!(inst.rows[r].coeffs, vec![(x, 3.0)]);
        assert!(inst.add_row("bad".to_string(), vec![(x, 0.0)], Sense::Le, 1.0).is_err());
    }

    #[test]
    fn violation_and_structure_checks() {
        let mut inst = MilpInstance::new();
        let x = inst.push_var("x".to_string(), 0.0, 10.0, false) as u32;
        inst.add_row("cap".to_string(), vec![(x, 1.0)], Sense::Le, 3.0).unwrap();
        assert_eq!(inst.rows[0].violation(&[2.0]), 0.0);
        assert_eq!(inst.rows[0].violation(&[5.0]), 2.0);
        assert!(inst.check_structure().is_ok());
        inst.rows[0].coeffs[0].0 = 99;
        assert!(inst.check_structure().is_err());
    }

    #[test]
    fn equivalence_ignores_names() {
        let mut a = MilpInstance::new();
        let x = a.push_var("x".to_string(), 0.0, 1.0, true) as u32;
        a.objective[x as usize] = 2.0;
        a.add_row("r".to_string(), vec![(x, 1.0)], Sense::Ge, 1.0).unwrap();
        let mut b = a.clone();
        b.var_names[0] = "C0000001".to_string();
        b.rows[0].label = "R0000001".to_string();
        assert!(a.equivalent_to(&b, 1e-12));
        b.rows[0].rhs = 2.0;
        assert!(!a.equivalent_to(&b, 1e-12));
    }
}
