//! Fixed-format MPS export for cross-checking models with external solvers.
//!
//! Maximisation models are written with a negated objective so the file is
//! always in minimisation sense. Binaries are wrapped in `INTORG`/`INTEND`
//! markers and bounded to `[0, 1]`.

use std::io::{self, Write};

use crate::model::{MilpModel, Relation, Sense, VarKind};

fn row_name(i: usize) -> String {
    format!("R{:07}", i + 1)
}

fn col_name(j: usize) -> String {
    format!("C{:07}", j + 1)
}

/// Formats `v` into at most 12 characters, as required by field 4/6.
pub fn format_number(v: f64) -> String {
    let plain = format!("{v}");
    if plain.len() <= 12 {
        return plain;
    }
    for precision in (0..=8).rev() {
        let s = format!("{v:.precision$e}");
        if s.len() <= 12 {
            return s;
        }
    }
    format!("{v:.0e}")
}

fn entry_line(out: &mut impl Write, name: &str, pairs: &[(String, f64)]) -> io::Result<()> {
    write!(out, "    {name:<8}")?;
    for (k, (row, v)) in pairs.iter().enumerate() {
        if k == 0 {
            write!(out, "  {row:<8}  {:>12}", format_number(*v))?;
        } else {
            write!(out, "   {row:<8}  {:>12}", format_number(*v))?;
        }
    }
    writeln!(out)
}

fn bound_line(out: &mut impl Write, kind: &str, col: &str, value: Option<f64>) -> io::Result<()> {
    match value {
        Some(v) => writeln!(out, " {kind:<2} BND       {col:<8}  {:>12}", format_number(v)),
        None => writeln!(out, " {kind:<2} BND       {col:<8}"),
    }
}

pub fn write_mps(model: &MilpModel, name: &str, out: &mut impl Write) -> io::Result<()> {
    let flip = if model.sense() == Sense::Maximize { -1.0 } else { 1.0 };
    writeln!(out, "NAME          {name}")?;
    if model.objective_offset() != 0.0 {
        writeln!(out, "* objective offset {}", flip * model.objective_offset())?;
    }
    writeln!(out, "ROWS")?;
    writeln!(out, " N  COST")?;
    for (i, c) in model.constraints().iter().enumerate() {
        let tag = match c.relation {
            Relation::Le => "L",
            Relation::Eq => "E",
            Relation::Ge => "G",
        };
        writeln!(out, " {tag}  {}", row_name(i))?;
    }

    let n = model.num_vars();
    let mut column_entries: Vec<Vec<(String, f64)>> = vec![Vec::new(); n];
    for (j, &c) in model.objective().iter().enumerate() {
        if c != 0.0 {
            column_entries[j].push(("COST".to_string(), flip * c));
        }
    }
    for (i, con) in model.constraints().iter().enumerate() {
        for &(j, a) in &con.coeffs {
            column_entries[j].push((row_name(i), a));
        }
    }

    writeln!(out, "COLUMNS")?;
    let mut in_int = false;
    let mut marker = 0;
    for (j, entries) in column_entries.iter().enumerate() {
        let binary = model.var_kind(j).is_binary();
        if binary != in_int {
            let tag = if binary { "'INTORG'" } else { "'INTEND'" };
            writeln!(out, "    MARKER{marker:<4}'MARKER'                 {tag}")?;
            marker += 1;
            in_int = binary;
        }
        let col = col_name(j);
        if entries.is_empty() {
            // Keep the column declared even when it appears nowhere.
            entry_line(out, &col, &[("COST".to_string(), 0.0)])?;
        }
        for pair in entries.chunks(2) {
            entry_line(out, &col, pair)?;
        }
    }
    if in_int {
        writeln!(out, "    MARKER{marker:<4}'MARKER'                 'INTEND'")?;
    }

    writeln!(out, "RHS")?;
    let rhs: Vec<(String, f64)> = model
        .constraints()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.rhs != 0.0)
        .map(|(i, c)| (row_name(i), c.rhs))
        .collect();
    for pair in rhs.chunks(2) {
        entry_line(out, "RHS", pair)?;
    }

    writeln!(out, "BOUNDS")?;
    for (j, kind) in model.var_kinds().iter().enumerate() {
        let col = col_name(j);
        match *kind {
            VarKind::Binary => {
                bound_line(out, "LO", &col, Some(0.0))?;
                bound_line(out, "UP", &col, Some(1.0))?;
            }
            VarKind::Continuous { lo, hi } => {
                if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
                    bound_line(out, "FR", &col, None)?;
                    continue;
                }
                if lo == f64::NEG_INFINITY {
                    bound_line(out, "MI", &col, None)?;
                } else if lo != 0.0 {
                    bound_line(out, "LO", &col, Some(lo))?;
                }
                if hi.is_finite() {
                    bound_line(out, "UP", &col, Some(hi))?;
                }
            }
        }
    }
    writeln!(out, "ENDATA")
}

pub fn to_mps_string(model: &MilpModel, name: &str) -> String {
    let mut buf = Vec::new();
    write_mps(model, name, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("MPS output is ASCII")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_fit_twelve_columns() {
        for v in [0.0, 1.0, -2.5, 1.0 / 3.0, 100.0 * 20_000f64.sqrt(), -1e-17, 123456789012345.0] {
            let s = format_number(v);
            assert!(s.len() <= 12, "{s}");
            let back: f64 = s.parse().unwrap();
            assert!((back - v).abs() <= 1e-6 * v.abs().max(1.0), "{v} -> {s}");
        }
    }

    #[test]
    fn small_model_layout() {
        let mut m = MilpModel::new(Sense::Maximize);
        let y = m.add_binary(None);
        let s = m.add_continuous(None, f64::NEG_INFINITY, f64::INFINITY).unwrap();
        m.set_objective_coeff(y, 2.0).unwrap();
        m.set_objective_coeff(s, 1.0).unwrap();
        m.add_constraint([(y, 1.0), (s, 1.0)], Relation::Le, 3.0).unwrap();
        let text = to_mps_string(&m, "TINY");
        let expected = "\
NAME          TINY
ROWS
 N  COST
 L  R0000001
COLUMNS
    MARKER0   'MARKER'                 'INTORG'
    C0000001  COST                -2   R0000001             1
    MARKER1   'MARKER'                 'INTEND'
    C0000002  COST                -1   R0000001             1
RHS
    RHS       R0000001             3
BOUNDS
 LO BND       C0000001             0
 UP BND       C0000001             1
 FR BND       C0000002
ENDATA
";
        assert_eq!(text, expected);
    }
}
