//! Fixed-format MPS writer and reader.
//!
//! The writer emits positional names (`C0000001`, `R0000001`) in column-
//! aligned fields, integer runs wrapped in INTORG/INTEND markers and
//! explicit bounds for every variable that deviates from the `[0, +inf)`
//! default. Values print in shortest round-trip form, so parsing an exported
//! file reproduces the numbers exactly and re-exporting is byte-identical.
//! Infinite right-hand sides (open epsilon bounds) are written as `1E30`
//! and mapped back to infinity on read.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::model::instance::{MilpInstance, Sense};

const INF_THRESHOLD: f64 = 1e29;

#[derive(Debug, Clone, PartialEq)]
pub struct MpsError {
    pub line: usize,
    pub message: String,
}

impl core::fmt::Display for MpsError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "MPS parse error at line {}: {}", self.line, self.message)
    }
}

fn fmt_value(v: f64) -> String {
    if v >= INF_THRESHOLD || v == f64::INFINITY {
        "1E30".to_string()
    } else if v <= -INF_THRESHOLD || v == f64::NEG_INFINITY {
        "-1E30".to_string()
    } else if v == 0.0 {
        // normalize negative zero
        "0".to_string()
    } else {
        format!("{v}")
    }
}

fn parse_value(s: &str, line: usize) -> Result<f64, MpsError> {
    let v: f64 = s
        .parse()
        .map_err(|_| MpsError { line, message: format!("malformed number '{s}'") })?;
    if v >= INF_THRESHOLD {
        Ok(f64::INFINITY)
    } else if v <= -INF_THRESHOLD {
        Ok(f64::NEG_INFINITY)
    } else {
        Ok(v)
    }
}

fn col_name(j: usize) -> String {
    format!("C{:07}", j + 1)
}

fn row_name(i: usize) -> String {
    format!("R{:07}", i + 1)
}

fn pad(s: &str, width: usize) -> String {
    let mut out = String::from(s);
    while out.len() < width {
        out.push(' ');
    }
    out
}

/// Serializes the instance. Byte-deterministic: identical instances yield
/// identical files.
pub fn write_mps(inst: &MilpInstance) -> String {
    let mut out = String::new();
    out.push_str("NAME          HSC\n");
    out.push_str("ROWS\n");
    out.push_str(" N  OBJ\n");
    for (i, row) in inst.rows.iter().enumerate() {
        let tag = match row.sense {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        };
        out.push_str(&format!(" {}  {}\n", tag, row_name(i)));
    }

    // column-major coefficient lists
    let mut col_entries: Vec<Vec<(String, f64)>> = alloc::vec![Vec::new(); inst.n_vars()];
    for (j, &c) in inst.objective.iter().enumerate() {
        if c != 0.0 {
            col_entries[j].push(("OBJ".to_string(), c));
        }
    }
    for (i, row) in inst.rows.iter().enumerate() {
        for &(j, a) in &row.coeffs {
            col_entries[j as usize].push((row_name(i), a));
        }
    }

    out.push_str("COLUMNS\n");
    let mut in_int = false;
    let mut marker_count = 0usize;
    for j in 0..inst.n_vars() {
        if inst.integer[j] != in_int {
            marker_count += 1;
            let kind = if inst.integer[j] { "'INTORG'" } else { "'INTEND'" };
            out.push_str(&format!(
                "    {}  {}  {}\n",
                pad(&format!("M{:07}", marker_count), 8),
                pad("'MARKER'", 10),
                kind
            ));
            in_int = inst.integer[j];
        }
        let name = col_name(j);
        let entries = &col_entries[j];
        let mut k = 0;
        while k < entries.len() {
            let mut line = format!("    {}", pad(&name, 8));
            line.push_str(&format!("  {}  {}", pad(&entries[k].0, 8), pad(&fmt_value(entries[k].1), 12)));
            if k + 1 < entries.len() {
                line.push_str(&format!("  {}  {}", pad(&entries[k + 1].0, 8), fmt_value(entries[k + 1].1)));
                k += 2;
            } else {
                k += 1;
            }
            while line.ends_with(' ') {
                line.pop();
            }
            out.push_str(&line);
            out.push('\n');
        }
        if entries.is_empty() {
            // a column must still exist; emit a zero objective entry
            out.push_str(&format!("    {}  OBJ       0\n", pad(&name, 8)));
        }
    }
    if in_int {
        marker_count += 1;
        out.push_str(&format!(
            "    {}  {}  'INTEND'\n",
            pad(&format!("M{:07}", marker_count), 8),
            pad("'MARKER'", 10)
        ));
    }

    out.push_str("RHS\n");
    if inst.objective_constant != 0.0 {
        out.push_str(&format!("    RHS       OBJ       {}\n", fmt_value(-inst.objective_constant)));
    }
    for (i, row) in inst.rows.iter().enumerate() {
        if row.rhs != 0.0 {
            out.push_str(&format!("    RHS       {}  {}\n", pad(&row_name(i), 8), fmt_value(row.rhs)));
        }
    }

    out.push_str("RANGES\n");
    out.push_str("BOUNDS\n");
    for j in 0..inst.n_vars() {
        let (lo, hi) = (inst.lower[j], inst.upper[j]);
        let name = col_name(j);
        if inst.integer[j] && lo == 0.0 && hi == 1.0 {
            out.push_str(&format!(" BV BND       {}\n", name));
            continue;
        }
        if lo == hi {
            out.push_str(&format!(" FX BND       {}  {}\n", pad(&name, 8), fmt_value(lo)));
            continue;
        }
        let default_lo = lo == 0.0;
        let default_hi = hi == f64::INFINITY;
        if default_lo && default_hi && !inst.integer[j] {
            continue;
        }
        if lo == f64::NEG_INFINITY && default_hi {
            out.push_str(&format!(" FR BND       {}\n", name));
            continue;
        }
        if lo == f64::NEG_INFINITY {
            out.push_str(&format!(" MI BND       {}\n", name));
        } else if !default_lo || inst.integer[j] {
            out.push_str(&format!(" LO BND       {}  {}\n", pad(&name, 8), fmt_value(lo)));
        }
        if default_hi {
            if inst.integer[j] {
                out.push_str(&format!(" PL BND       {}\n", name));
            }
        } else {
            out.push_str(&format!(" UP BND       {}  {}\n", pad(&name, 8), fmt_value(hi)));
        }
    }
    out.push_str("ENDATA\n");
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
    Done,
}

/// Parses an MPS file into an instance. Accepts the writer's output and the
/// common fixed/free-format variations (whitespace-separated fields,
/// `*` comments).
pub fn parse_mps(text: &str) -> Result<MilpInstance, MpsError> {
    let mut inst = MilpInstance::new();
    let mut section = Section::None;
    let mut obj_row: Option<String> = None;
    // name -> (sense, declaration order)
    let mut rows: BTreeMap<String, (Sense, usize)> = BTreeMap::new();
    let mut row_order: Vec<String> = Vec::new();
    let mut row_coeffs: Vec<Vec<(u32, f64)>> = Vec::new();
    let mut row_rhs: Vec<f64> = Vec::new();
    let mut cols: BTreeMap<String, usize> = BTreeMap::new();
    let mut in_int = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        if raw.starts_with('*') || raw.trim().is_empty() {
            continue;
        }
        let is_header = !raw.starts_with(' ') && !raw.starts_with('\t');
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if is_header {
            section = match fields[0] {
                "NAME" => section,
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => Section::Ranges,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => Section::Done,
                other => {
                    return Err(MpsError { line, message: format!("unknown section '{other}'") });
                }
            };
            continue;
        }
        match section {
            Section::None | Section::Done => {
                return Err(MpsError { line, message: "data outside any section".to_string() });
            }
            Section::Rows => {
                if fields.len() != 2 {
                    return Err(MpsError { line, message: "expected '<sense> <name>'".to_string() });
                }
                match fields[0] {
                    "N" => {
                        if obj_row.is_some() {
                            return Err(MpsError { line, message: "multiple objective rows".to_string() });
                        }
                        obj_row = Some(fields[1].to_string());
                    }
                    s => {
                        let sense = match s {
                            "L" => Sense::Le,
                            "G" => Sense::Ge,
                            "E" => Sense::Eq,
                            _ => return Err(MpsError { line, message: format!("unknown row sense '{s}'") }),
                        };
                        rows.insert(fields[1].to_string(), (sense, row_order.len()));
                        row_order.push(fields[1].to_string());
                        row_coeffs.push(Vec::new());
                        row_rhs.push(0.0);
                    }
                }
            }
            Section::Columns => {
                if fields.len() >= 3 && fields[1] == "'MARKER'" {
                    match fields[2] {
                        "'INTORG'" => in_int = true,
                        "'INTEND'" => in_int = false,
                        other => {
                            return Err(MpsError { line, message: format!("unknown marker '{other}'") });
                        }
                    }
                    continue;
                }
                if fields.len() < 3 || fields.len() % 2 == 0 {
                    return Err(MpsError { line, message: "expected '<col> (<row> <value>)+'".to_string() });
                }
                let j = *cols.entry(fields[0].to_string()).or_insert_with(|| {
                    inst.push_var(fields[0].to_string(), 0.0, f64::INFINITY, in_int)
                });
                let mut k = 1;
                while k + 1 < fields.len() {
                    let rname = fields[k];
                    let value = parse_value(fields[k + 1], line)?;
                    if Some(rname) == obj_row.as_deref() {
                        inst.objective[j] += value;
                    } else if let Some(&(_, ri)) = rows.get(rname) {
                        if value != 0.0 {
                            row_coeffs[ri].push((j as u32, value));
                        }
                    } else {
                        return Err(MpsError { line, message: format!("unknown row '{rname}'") });
                    }
                    k += 2;
                }
            }
            Section::Rhs => {
                if fields.len() < 3 || fields.len() % 2 == 0 {
                    return Err(MpsError { line, message: "expected '<set> (<row> <value>)+'".to_string() });
                }
                let mut k = 1;
                while k + 1 < fields.len() {
                    let rname = fields[k];
                    let value = parse_value(fields[k + 1], line)?;
                    if Some(rname) == obj_row.as_deref() {
                        inst.objective_constant = -value;
                    } else if let Some(&(_, ri)) = rows.get(rname) {
                        row_rhs[ri] = value;
                    } else {
                        return Err(MpsError { line, message: format!("unknown row '{rname}'") });
                    }
                    k += 2;
                }
            }
            Section::Ranges => {
                return Err(MpsError { line, message: "RANGES entries are not supported".to_string() });
            }
            Section::Bounds => {
                if fields.len() < 3 {
                    return Err(MpsError { line, message: "expected '<type> <set> <col> [value]'".to_string() });
                }
                let kind = fields[0];
                let cname = fields[2];
                let &j = cols
                    .get(cname)
                    .ok_or_else(|| MpsError { line, message: format!("unknown column '{cname}'") })?;
                let value = if fields.len() > 3 { Some(parse_value(fields[3], line)?) } else { None };
                let need = |v: Option<f64>| {
                    v.ok_or(MpsError { line, message: format!("bound '{kind}' needs a value") })
                };
                match kind {
                    "LO" | "LI" => inst.lower[j] = need(value)?,
                    "UP" | "UI" => inst.upper[j] = need(value)?,
                    "FX" => {
                        let v = need(value)?;
                        inst.lower[j] = v;
                        inst.upper[j] = v;
                    }
                    "FR" => {
                        inst.lower[j] = f64::NEG_INFINITY;
                        inst.upper[j] = f64::INFINITY;
                    }
                    "MI" => inst.lower[j] = f64::NEG_INFINITY,
                    "PL" => inst.upper[j] = f64::INFINITY,
                    "BV" => {
                        inst.lower[j] = 0.0;
                        inst.upper[j] = 1.0;
                        inst.integer[j] = true;
                    }
                    other => {
                        return Err(MpsError { line, message: format!("unknown bound type '{other}'") });
                    }
                }
            }
        }
    }
    if section != Section::Done {
        return Err(MpsError { line: text.lines().count(), message: "missing ENDATA".to_string() });
    }
    if obj_row.is_none() {
        return Err(MpsError { line: 0, message: "no objective row declared".to_string() });
    }

    for (ri, name) in row_order.iter().enumerate() {
        let (sense, _) = rows[name];
        let coeffs = core::mem::take(&mut row_coeffs[ri]);
        if coeffs.is_empty() {
            return Err(MpsError { line: 0, message: format!("row '{name}' has no coefficients") });
        }
        inst.add_row(name.clone(), coeffs, sense, row_rhs[ri])
            .map_err(|e| MpsError { line: 0, message: e.0 })?;
    }
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sample() -> MilpInstance {
        let mut inst = MilpInstance::new();
        let x = inst.push_var("x".to_string(), 0.0, 4.5, false) as u32;
        let n = inst.push_var("n".to_string(), 0.0, 7.0, true) as u32;
        let b = inst.push_var("b".to_string(), 0.0, 1.0, true) as u32;
        let f = inst.push_var("f".to_string(), f64::NEG_INFINITY, f64::INFINITY, false) as u32;
        inst.objective = vec![1.25, -0.3333333333333333, 2.0, 0.125];
        inst.objective_constant = 10.0;
        inst.add_row("r1".to_string(), vec![(x, 1.0), (n, 2.0)], Sense::Le, 9.0).unwrap();
        inst.add_row("r2".to_string(), vec![(n, 1.0), (b, -1.0), (f, 0.5)], Sense::Ge, -2.0).unwrap();
        inst.add_row("r3".to_string(), vec![(x, 3.0), (f, 1.0)], Sense::Eq, 4.0).unwrap();
        inst.add_row("eps".to_string(), vec![(x, 1.0)], Sense::Le, f64::INFINITY).unwrap();
        inst
    }

    #[test]
    fn roundtrip_is_equivalent_and_byte_identical() {
        let inst = sample();
        let text1 = write_mps(&inst);
        let parsed = parse_mps(&text1).unwrap();
        assert!(inst.equivalent_to(&parsed, 0.0), "parsed instance differs");
        let text2 = write_mps(&parsed);
        assert_eq!(text1, text2, "second export is not byte-identical");
    }

    #[test]
    fn single_variable_lp_has_one_columns_entry() {
        let mut inst = MilpInstance::new();
        let x = inst.push_var("x".to_string(), 0.0, f64::INFINITY, false) as u32;
        inst.objective[x as usize] = 1.0;
        inst.add_row("lo".to_string(), vec![(x, 1.0)], Sense::Ge, 3.0).unwrap();
        let text = write_mps(&inst);
        let columns: Vec<&str> = text
            .lines()
            .skip_while(|l| *l != "COLUMNS")
            .skip(1)
            .take_while(|l| *l != "RHS")
            .collect();
        assert_eq!(columns.len(), 1, "{columns:?}");
        assert!(columns[0].contains("C0000001"));
        let parsed = parse_mps(&text).unwrap();
        assert!(inst.equivalent_to(&parsed, 0.0));
    }

    #[test]
    fn binaries_emit_bv_entries() {
        let mut inst = MilpInstance::new();
        let b = inst.push_var("b".to_string(), 0.0, 1.0, true) as u32;
        inst.objective[b as usize] = -1.0;
        inst.add_row("r".to_string(), vec![(b, 1.0)], Sense::Le, 1.0).unwrap();
        let text = write_mps(&inst);
        assert!(text.contains(" BV BND"), "{text}");
        assert!(text.contains("'INTORG'"));
        assert!(text.contains("'INTEND'"));
    }

    #[test]
    fn malformed_numbers_report_the_line() {
        let text = "ROWS\n N  OBJ\n L  R1\nCOLUMNS\n    X  R1  abc\nRHS\nBOUNDS\nENDATA\n";
        let err = parse_mps(text).unwrap_err();
        assert_eq!(err.line, 5);
        assert!(err.message.contains("abc"));
    }
}
