//! Fixed-layout CSV tables.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::experiment::{ScenarioOutput, SweepResult};
use crate::num::{to_f64, Real};

pub const DENSITY_COLUMNS: [&str; 4] = ["x_m", "atom_density", "photon_density", "condensate_density"];
pub const TIMESERIES_COLUMNS: [&str; 6] = ["t_s", "N_g", "v_fock", "v", "attenuation", "flux_residual"];
pub const SWEEP_COLUMNS: [&str; 5] = ["param_value", "min_vfock", "t_min_s", "final_N_g", "attenuation"];

/// Numeric table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// 17 significant digits, `.` decimal separator, `\n` line endings.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                write!(out, "{v:.16e}").expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }
}

pub fn density_table<T: Real>(out: &ScenarioOutput<T>) -> Table {
    let mut t = Table::new(&DENSITY_COLUMNS);
    let grid = out.model.grid();
    let d = &out.final_densities;
    for (j, x) in grid.positions().enumerate() {
        t.push(vec![
            to_f64(x),
            to_f64(d.atoms[j]),
            to_f64(d.photons[j]),
            to_f64(out.condensate_density[j]),
        ]);
    }
    t
}

pub fn timeseries_table<T: Real>(out: &ScenarioOutput<T>) -> Table {
    let mut t = Table::new(&TIMESERIES_COLUMNS);
    for p in &out.series {
        t.push(vec![
            to_f64(p.t),
            to_f64(p.stats.n_g),
            to_f64(p.stats.v_fock),
            to_f64(p.stats.v),
            to_f64(p.attenuation),
            to_f64(p.flux_residual),
        ]);
    }
    t
}

/// Failed points are written with NaN entries.
pub fn sweep_table<T: Real>(result: &SweepResult<T>) -> Table {
    let mut t = Table::new(&SWEEP_COLUMNS);
    for r in &result.records {
        let row = match &r.outcome {
            Ok(p) => vec![
                to_f64(r.value),
                to_f64(p.min_vfock),
                to_f64(p.t_min),
                to_f64(p.final_n_g),
                to_f64(p.attenuation),
            ],
            Err(_) => vec![to_f64(r.value), f64::NAN, f64::NAN, f64::NAN, f64::NAN],
        };
        t.push(row);
    }
    t
}

/// Writes each `(file name, contents)` pair into `dir`. On failure every
/// file created by this call is removed.
pub fn write_files(dir: &Path, files: &[(String, String)]) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, contents) in files {
        let path = dir.join(name);
        let tmp = dir.join(format!(".{name}.partial"));
        let result = fs::write(&tmp, contents).and_then(|_| fs::rename(&tmp, &path));
        if let Err(e) = result {
            let _ = fs::remove_file(&tmp);
            for p in &written {
                let _ = fs::remove_file(p);
            }
            return Err(e);
        }
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![0.1, -2.0]);
        t.push(vec![f64::NAN, 1e300]);
        assert_eq!(
            t.to_csv(),
            "a,b\n1.0000000000000001e-1,-2.0000000000000000e0\nNaN,1.0000000000000001e300\n"
        );
        assert_eq!(t.column("b").unwrap()[0], -2.0);
    }

    #[test]
    fn failed_write_cleans_up() {
        let dir = tempfile::tempdir().unwrap();
        // a directory where the second file should go blocks the rename
        fs::create_dir(dir.path().join("b.csv")).unwrap();
        fs::write(dir.path().join("b.csv").join("x"), "").unwrap();
        let files = vec![("a.csv".to_string(), "1\n".to_string()), ("b.csv".to_string(), "2\n".to_string())];
        assert!(write_files(dir.path(), &files).is_err());
        assert!(!dir.path().join("a.csv").exists());
        assert!(!dir.path().join(".b.csv.partial").exists());
    }
}
