//! Bundle layout on disk:
//!
//! ```text
//! summary.json
//! curves.json
//! plots/<curve>.csv, plots/plot.gp
//! fields/<name>.bin   little-endian complex128, row-major (i, j, k)
//! fields/<name>.json  grid descriptor
//! ```

use std::fs;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid3;

use super::plots::emit_plots;
use super::run::{Curve, FieldDump, ReportBundle, Summary};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub name: String,
    pub grid: Grid3,
    pub dtype: String,
    pub byte_order: String,
    pub layout: String,
}

pub fn write_bundle(bundle: &ReportBundle, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("summary.json"), bundle.summary.to_json()?)?;
    fs::write(dir.join("curves.json"), serde_json::to_string_pretty(&bundle.curves)?)?;
    emit_plots(bundle, None, &dir.join("plots"))?;
    if !bundle.fields.is_empty() {
        let fields = dir.join("fields");
        fs::create_dir_all(&fields)?;
        for dump in &bundle.fields {
            let desc = FieldDescriptor {
                name: dump.name.clone(),
                grid: dump.grid,
                dtype: "complex128".into(),
                byte_order: "little".into(),
                layout: "row_major".into(),
            };
            fs::write(fields.join(format!("{}.json", dump.name)), serde_json::to_string_pretty(&desc)?)?;
            fs::write(fields.join(format!("{}.bin", dump.name)), encode(&dump.values))?;
        }
    }
    Ok(())
}

pub fn read_bundle(dir: &Path) -> Result<ReportBundle> {
    let summary: Summary = serde_json::from_str(&fs::read_to_string(dir.join("summary.json"))?)?;
    let curves: Vec<Curve> = serde_json::from_str(&fs::read_to_string(dir.join("curves.json"))?)?;
    let mut fields = Vec::new();
    let fdir = dir.join("fields");
    if fdir.is_dir() {
        let mut descs: Vec<_> = fs::read_dir(&fdir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        descs.sort();
        for path in descs {
            let desc: FieldDescriptor = serde_json::from_str(&fs::read_to_string(&path)?)?;
            let values = decode(&fs::read(path.with_extension("bin"))?)?;
            if values.len() != desc.grid.len() {
                return Err(Error::InvalidArgument(format!(
                    "field {} has {} values for a grid of {}",
                    desc.name,
                    values.len(),
                    desc.grid.len()
                )));
            }
            fields.push(FieldDump { name: desc.name, grid: desc.grid, values });
        }
    }
    Ok(ReportBundle { summary, curves, fields })
}

pub fn encode(values: &[C64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(values.len() * 16);
    for v in values {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<Vec<C64>> {
    if bytes.len() % 16 != 0 {
        return Err(Error::InvalidArgument(format!("field dump of {} bytes is not complex128", bytes.len())));
    }
    Ok(bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            C64::new(re, im)
        })
        .collect())
}
