//! Writers for field tables (CSV, legacy VTK) and run metadata.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::driver::{CompareReport, FieldTable, OutputBundle, StudyTable};
use crate::error::{Error, Result};
use crate::model::SpaceDim;

/// CSV with a header row. 1D: `x`, then `<var>_mean,<var>_std` per
/// variable. 2D: `x,y` first, rows ordered with `x` fastest.
pub fn table_csv(t: &FieldTable) -> String {
    let nv = t.n_vars();
    let mut s = String::new();
    s.push_str(if t.dim == SpaceDim::Two { "x,y" } else { "x" });
    for v in &t.variables {
        let _ = write!(s, ",{v}_mean,{v}_std");
    }
    s.push('\n');
    for j in 0..t.ny {
        for i in 0..t.nx {
            let c = j * t.nx + i;
            let _ = write!(s, "{:.16e}", t.x_center(i));
            if t.dim == SpaceDim::Two {
                let _ = write!(s, ",{:.16e}", t.y_center(j));
            }
            for k in 0..nv {
                let _ = write!(s, ",{:.16e},{:.16e}", t.mean[c * nv + k], t.std[c * nv + k]);
            }
            s.push('\n');
        }
    }
    s
}

/// Parses a table written by [`table_csv`], given its domain.
pub fn parse_table_csv(text: &str, x_range: (f64, f64), y_range: (f64, f64), time: f64) -> Result<FieldTable> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().ok_or_else(|| Error::Config("empty CSV".into()))?.split(',').collect();
    let dim = if header.get(1) == Some(&"y") {
        SpaceDim::Two
    } else {
        SpaceDim::One
    };
    let skip = if dim == SpaceDim::Two { 2 } else { 1 };
    let cols = &header[skip..];
    if cols.is_empty() || !cols.len().is_multiple_of(2) {
        return Err(Error::Config("CSV needs mean/std column pairs".into()));
    }
    let variables: Vec<String> = cols
        .chunks(2)
        .map(|c| c[0].trim_end_matches("_mean").to_string())
        .collect();
    let (mut xs, mut ys, mut mean, mut std) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (n, line) in lines.filter(|l| !l.trim().is_empty()).enumerate() {
        let vals: Vec<f64> = line
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Config(format!("CSV row {}: {e}", n + 2)))?;
        if vals.len() != header.len() {
            return Err(Error::Config(format!("CSV row {} has {} fields", n + 2, vals.len())));
        }
        xs.push(vals[0]);
        if dim == SpaceDim::Two {
            ys.push(vals[1]);
        }
        for pair in vals[skip..].chunks(2) {
            mean.push(pair[0]);
            std.push(pair[1]);
        }
    }
    let rows = xs.len();
    let nx = match dim {
        SpaceDim::One => rows,
        SpaceDim::Two => ys.iter().take_while(|&&y| y == ys[0]).count(),
    };
    if nx == 0 || rows % nx != 0 {
        return Err(Error::Config("CSV rows do not form a grid".into()));
    }
    Ok(FieldTable {
        time,
        nx,
        ny: rows / nx,
        x_range,
        y_range,
        dim,
        variables,
        mean,
        std,
    })
}

/// Legacy VTK structured-points file with mean and std scalars per
/// variable as cell data.
pub fn table_vtk(t: &FieldTable) -> String {
    let nv = t.n_vars();
    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "stochastic Galerkin statistics at t = {}", t.time);
    let _ = writeln!(s, "ASCII");
    let _ = writeln!(s, "DATASET STRUCTURED_POINTS");
    let _ = writeln!(s, "DIMENSIONS {} {} 1", t.nx + 1, t.ny + 1);
    let _ = writeln!(s, "ORIGIN {:e} {:e} 0", t.x_range.0, t.y_range.0);
    let _ = writeln!(s, "SPACING {:e} {:e} 1", t.dx(), t.dy());
    let _ = writeln!(s, "CELL_DATA {}", t.nx * t.ny);
    for (k, v) in t.variables.iter().enumerate() {
        for (label, data) in [("mean", &t.mean), ("std", &t.std)] {
            let _ = writeln!(s, "SCALARS {v}_{label} double 1");
            let _ = writeln!(s, "LOOKUP_TABLE default");
            for c in 0..t.nx * t.ny {
                let _ = writeln!(s, "{:.16e}", data[c * nv + k]);
            }
        }
    }
    s
}

/// Files written for one run, relative to the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct WrittenFiles {
    pub field: PathBuf,
    pub vtk: Option<PathBuf>,
    pub snapshots: Vec<PathBuf>,
    pub meta: PathBuf,
    pub timings: PathBuf,
}

/// Writes `field.csv`, `meta.json`, `timings.json`, optional
/// `field.vtk` (2D) and `snapshot_<k>.csv` files into `dir`.
///
/// Everything except `timings.json` is a deterministic function of the
/// configuration.
pub fn write_bundle(bundle: &OutputBundle, dir: &Path, vtk: bool) -> Result<WrittenFiles> {
    fs::create_dir_all(dir)?;
    let field = dir.join("field.csv");
    fs::write(&field, table_csv(&bundle.table))?;
    let vtk = if vtk && bundle.table.dim == SpaceDim::Two {
        let p = dir.join("field.vtk");
        fs::write(&p, table_vtk(&bundle.table))?;
        Some(p)
    } else {
        None
    };
    let mut snapshots = Vec::new();
    for (k, snap) in bundle.snapshots.iter().enumerate() {
        let p = dir.join(format!("snapshot_{k}.csv"));
        fs::write(&p, table_csv(snap))?;
        snapshots.push(p);
    }
    let meta = dir.join("meta.json");
    fs::write(&meta, serde_json::to_string_pretty(&bundle.meta)?)?;
    let timings = dir.join("timings.json");
    fs::write(&timings, serde_json::to_string_pretty(&bundle.timings)?)?;
    Ok(WrittenFiles {
        field,
        vtk,
        snapshots,
        meta,
        timings,
    })
}

/// Writes `study.json` and a plain-text `study.txt` into `dir`.
pub fn write_study(table: &StudyTable, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("study.json"), serde_json::to_string_pretty(table)?)?;
    fs::write(dir.join("study.txt"), table.render())?;
    Ok(())
}

/// Writes `compare.json` and the slice as `slice.csv` into `dir`.
pub fn write_compare(report: &CompareReport, variables: &[String], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("compare.json"), serde_json::to_string_pretty(report)?)?;
    let mut s = String::from("s");
    for side in ["a", "b"] {
        for v in variables {
            let _ = write!(s, ",{side}_{v}_mean,{side}_{v}_std");
        }
    }
    s.push('\n');
    for r in &report.slice {
        let _ = write!(s, "{:.16e}", r.s);
        for (m, sd) in [(&r.a_mean, &r.a_std), (&r.b_mean, &r.b_std)] {
            for (a, b) in m.iter().zip(sd.iter()) {
                let _ = write!(s, ",{a:.16e},{b:.16e}");
            }
        }
        s.push('\n');
    }
    fs::write(dir.join("slice.csv"), s)?;
    Ok(())
}
