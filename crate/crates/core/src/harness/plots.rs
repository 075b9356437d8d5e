//! Plot-ready CSV tables and a gnuplot script.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::run::{Curve, ReportBundle};

/// Writes `<id>.csv` for the selected curves plus `plot.gp`, returning the files written.
///
/// `None` selects every curve; an empty selection writes nothing.
pub fn emit_plots(bundle: &ReportBundle, which: Option<&[String]>, dir: &Path) -> Result<Vec<PathBuf>> {
    let selected: Vec<&Curve> = match which {
        None => bundle.curves.iter().collect(),
        Some(ids) => ids
            .iter()
            .map(|id| bundle.curve(id).ok_or_else(|| Error::MissingCurve(id.clone())))
            .collect::<Result<_>>()?,
    };
    if selected.is_empty() {
        return Ok(Vec::new());
    }
    fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(selected.len() + 1);
    let mut script = String::from("set datafile separator ','\nset key top right\n");
    for curve in &selected {
        let path = dir.join(format!("{}.csv", curve.id));
        fs::write(&path, to_csv(curve))?;
        written.push(path);
        let (x, y) = (&curve.columns[0], curve.columns.last().map(String::as_str).unwrap_or(""));
        let logscale = if curve.id.starts_with("eps_convergence") { "set logscale xy\n" } else { "unset logscale\n" };
        let _ = write!(
            script,
            "\nset terminal pngcairo size 800,600\nset output '{id}.png'\n{logscale}set xlabel '{x}'\nset ylabel '{y}'\n\
             plot '{id}.csv' using 1:{col} skip 1 with linespoints title '{id}'\n",
            id = curve.id,
            col = curve.columns.len(),
        );
    }
    let gp = dir.join("plot.gp");
    fs::write(&gp, script)?;
    written.push(gp);
    Ok(written)
}

pub fn to_csv(curve: &Curve) -> String {
    let mut out = curve.columns.join(",");
    out.push('\n');
    for row in &curve.rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
