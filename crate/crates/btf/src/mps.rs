//! Fixed-field MPS export of an [`LpModel`].
//!
//! The model is written as a minimization with every column bounded. Names
//! are at most eight characters: factor columns are `X<i>`, `Y<j>`, `Z<k>`
//! for models with a tensor layout, the remaining columns `W<linear entry>`,
//! and rows `R<index>`. MPS has no field for an objective constant, so it
//! is recorded in a comment line `* OBJCONST <value>`.

use std::io::{self, Write};

use btf_core::lp::{LpModel, Sense};

/// Longest name that fits the fixed fields.
const NAME_WIDTH: usize = 8;
const VALUE_WIDTH: usize = 12;

#[derive(Debug, thiserror::Error)]
pub enum MpsError {
    #[error("name {0:?} does not fit the fixed MPS fields")]
    NameTooLong(String),
    #[error("value {0} cannot be written in {VALUE_WIDTH} characters")]
    Value(f64),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn column_names(model: &LpModel) -> Vec<String> {
    let n = model.num_cols();
    match model.layout {
        Some(lay) if lay.num_cols() == n => {
            let d = lay.dims;
            let mut names = vec![String::new(); n];
            for (prefix, mode, len) in [('X', 0, d.n), ('Y', 1, d.m), ('Z', 2, d.l)] {
                for i in 0..len {
                    names[lay.factor(mode, i)] = format!("{prefix}{i}");
                }
            }
            for idx in 0..d.len() {
                names[lay.w_linear(idx)] = format!("W{idx}");
            }
            names
        }
        _ => (0..n).map(|j| format!("C{j}")).collect(),
    }
}

/// Shortest decimal form of `v` that fits the value field. Integers and
/// short fractions are exact; anything else keeps as many significant
/// digits as fit.
fn value(v: f64) -> Result<String, MpsError> {
    if !v.is_finite() {
        return Err(MpsError::Value(v));
    }
    let plain = format!("{v}");
    if plain.len() <= VALUE_WIDTH {
        return Ok(plain);
    }
    for prec in (1..=VALUE_WIDTH).rev() {
        let s = format!("{v:.prec$e}");
        if s.len() <= VALUE_WIDTH {
            return Ok(s);
        }
    }
    Err(MpsError::Value(v))
}

fn check(name: &str) -> Result<&str, MpsError> {
    if name.len() > NAME_WIDTH {
        return Err(MpsError::NameTooLong(name.into()));
    }
    Ok(name)
}

/// One data line: fields start at columns 2, 5, 15, 25, 40 and 50.
fn line(out: &mut impl Write, code: &str, name1: &str, pairs: &[(&str, String)]) -> Result<(), MpsError> {
    let mut s = format!(" {code:<2} {:<8}", check(name1)?);
    for (n, (name, v)) in pairs.iter().enumerate() {
        let pad = if n == 0 { "  " } else { "   " };
        s.push_str(&format!("{pad}{:<8}  {v:>12}", check(name)?));
    }
    writeln!(out, "{}", s.trim_end())?;
    Ok(())
}

pub fn write_mps(model: &LpModel, name: &str, out: &mut impl Write) -> Result<(), MpsError> {
    let cols = column_names(model);
    let rows: Vec<String> = (0..model.num_rows()).map(|r| format!("R{r}")).collect();
    let obj = "COST";
    writeln!(out, "NAME          {}", check(name)?)?;
    writeln!(out, "* minimize")?;
    writeln!(out, "* OBJCONST {}", model.obj_constant)?;
    writeln!(out, "ROWS")?;
    line(out, "N", obj, &[])?;
    for (r, rn) in rows.iter().enumerate() {
        let code = match model.senses[r] {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        };
        line(out, code, rn, &[])?;
    }
    // Column-wise transpose of the row storage.
    let mut by_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); model.num_cols()];
    for r in 0..model.num_rows() {
        let (idx, vals) = model.row(r);
        for (&j, &v) in idx.iter().zip(vals) {
            by_col[j as usize].push((r, v));
        }
    }
    writeln!(out, "COLUMNS")?;
    for (j, entries) in by_col.iter().enumerate() {
        let c = model.objective[j];
        // MPS drops columns without entries, so keep a zero cost.
        if c != 0.0 || entries.is_empty() {
            line(out, "", &cols[j], &[(obj, value(c)?)])?;
        }
        for chunk in entries.chunks(2) {
            let pairs: Vec<(&str, String)> =
                chunk.iter().map(|&(r, v)| Ok((rows[r].as_str(), value(v)?))).collect::<Result<_, MpsError>>()?;
            line(out, "", &cols[j], &pairs)?;
        }
    }
    writeln!(out, "RHS")?;
    for (r, rn) in rows.iter().enumerate() {
        if model.rhs[r] != 0.0 {
            line(out, "", "RHS", &[(rn, value(model.rhs[r])?)])?;
        }
    }
    writeln!(out, "BOUNDS")?;
    for (j, cn) in cols.iter().enumerate() {
        let (lo, up) = (model.lower[j], model.upper[j]);
        if lo == up {
            line(out, "FX", "BND", &[(cn, value(lo)?)])?;
            continue;
        }
        if lo == f64::NEG_INFINITY {
            line(out, "MI", "BND", &[(cn, String::new())])?;
        } else if lo != 0.0 {
            line(out, "LO", "BND", &[(cn, value(lo)?)])?;
        }
        if up != f64::INFINITY {
            line(out, "UP", "BND", &[(cn, value(up)?)])?;
        }
    }
    writeln!(out, "ENDATA")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_fit_the_field() {
        assert_eq!(value(1.0).unwrap(), "1");
        assert_eq!(value(-0.5).unwrap(), "-0.5");
        let third = value(1.0 / 3.0).unwrap();
        assert!(third.len() <= VALUE_WIDTH);
        assert!((third.parse::<f64>().unwrap() - 1.0 / 3.0).abs() < 1e-6);
        assert!(value(f64::NAN).is_err());
    }

    #[test]
    fn fixed_columns() {
        let mut s = Vec::new();
        line(&mut s, "UP", "BND", &[("X1", "1".into())]).unwrap();
        line(&mut s, "", "W12", &[("R0", "-1".into()), ("R17", "2".into())]).unwrap();
        let text = String::from_utf8(s).unwrap();
        let mut l = text.lines();
        let a = l.next().unwrap();
        assert_eq!(&a[1..3], "UP");
        assert_eq!(a[4..12].trim(), "BND");
        assert_eq!(a[14..22].trim(), "X1");
        assert_eq!(a[24..36].trim(), "1");
        let b = l.next().unwrap();
        assert_eq!(b[4..12].trim(), "W12");
        assert_eq!(b[14..22].trim(), "R0");
        assert_eq!(b[24..36].trim(), "-1");
        assert_eq!(b[39..47].trim(), "R17");
        assert_eq!(b[49..61].trim(), "2");
        assert!(line(&mut Vec::new(), "", "TOOLONGNAME", &[]).is_err());
    }
}
