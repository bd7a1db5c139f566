//! CSV persistence of snapshot histories and diagnostics.

use super::config::Model;
use crate::error::{Error, Result};
use crate::euler::fv::primitives;
use crate::euler::EulerParams;
use crate::grid::FieldSnapshot;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

/// C's `%.17g`: 17 significant digits, trailing zeros dropped, exponent
/// form outside `1e-4 ≤ |x| < 1e17`. Round-trips every `f64`.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant),
    };
    let digits: String = mant.chars().filter(|c| *c != '.').collect();
    let sign = if neg { "-" } else { "" };
    if !(-4..17).contains(&exp) {
        let tail = digits[1..].trim_end_matches('0');
        let dot = if tail.is_empty() { "" } else { "." };
        let esign = if exp < 0 { '-' } else { '+' };
        return format!("{sign}{}{dot}{tail}e{esign}{:02}", &digits[..1], exp.abs());
    }
    let s = if exp >= 0 {
        let split = exp as usize + 1;
        format!("{}.{}", &digits[..split], &digits[split..])
    } else {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    };
    let s = s.trim_end_matches('0').trim_end_matches('.');
    format!("{sign}{s}")
}

pub fn header(model: Model) -> &'static str {
    match model {
        Model::Burgers => "t,r,v",
        Model::Euler => "t,r,rho,v",
    }
}

/// Writes snapshots as rows sorted by `(t, r)`. Euler snapshots are
/// converted to primitives.
pub fn write_csv(history: &[FieldSnapshot], model: Model, params: Option<&EulerParams>, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(header(model));
    out.push('\n');
    let mut order: Vec<&FieldSnapshot> = history.iter().collect();
    order.sort_by(|a, b| a.t.total_cmp(&b.t));
    for snap in order {
        let t = fmt_g17(snap.t);
        let centers = snap.grid.centers();
        match model {
            Model::Burgers => {
                for (r, v) in centers.iter().zip(&snap.values) {
                    writeln!(out, "{t},{},{}", fmt_g17(*r), fmt_g17(*v)).expect("write to string");
                }
            }
            Model::Euler => {
                let p = params.ok_or_else(|| Error::Usage("Euler output needs the model parameters".into()))?;
                for (r, s) in centers.iter().zip(primitives(snap, p)?) {
                    writeln!(out, "{t},{},{},{}", fmt_g17(*r), fmt_g17(s.rho), fmt_g17(s.v)).expect("write to string");
                }
            }
        }
    }
    std::fs::File::create(path)?.write_all(out.as_bytes())?;
    Ok(())
}

/// A parsed CSV: column names and rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn read_csv(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let columns: Vec<String> =
        lines.next().ok_or_else(|| Error::Parse(format!("{}: empty file", path.display())))?.split(',').map(str::to_owned).collect();
    let rows = lines
        .enumerate()
        .map(|(i, line)| {
            let row: Vec<f64> = line
                .split(',')
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), i + 2)))?;
            if row.len() != columns.len() {
                return Err(Error::Parse(format!("{}:{}: expected {} fields", path.display(), i + 2, columns.len())));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table { columns, rows })
}

/// One diagnostics row per step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticRow {
    pub t: f64,
    pub dt: f64,
    /// `TV(z)` for Burgers, `Eⁿ` for Euler.
    pub measure: f64,
    /// `NaN` when the scenario has no reference profile.
    pub l1_vs_reference: f64,
}

pub fn write_diagnostics(rows: &[DiagnosticRow], model: Model, path: &Path) -> Result<()> {
    let measure = match model {
        Model::Burgers => "tv_z",
        Model::Euler => "E_n",
    };
    let mut out = format!("t,dt,{measure},l1_vs_reference\n");
    for r in rows {
        writeln!(out, "{},{},{},{}", fmt_g17(r.t), fmt_g17(r.dt), fmt_g17(r.measure), fmt_g17(r.l1_vs_reference)).expect("write to string");
    }
    std::fs::write(path, out)?;
    Ok(())
}
