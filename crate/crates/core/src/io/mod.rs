//! Configuration, result files and plots.

pub mod config;
pub mod plot;
pub mod tables;

use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::experiment::{format_vfock, ScenarioOutput, SweepResult};
use config::ConfigDocument;
use plot::{emit_plot, PlotKind};
use tables::{density_table, sweep_table, timeseries_table, write_files};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const CONFIG_FILE: &str = "config.json";
pub const DENSITIES_FILE: &str = "densities.csv";
pub const TIMESERIES_FILE: &str = "timeseries.csv";
pub const SWEEP_FILE: &str = "sweep.csv";

#[derive(Debug, Clone)]
pub enum BundleData {
    Run(Box<ScenarioOutput<f64>>),
    Sweep(SweepResult<f64>),
}

/// Failure recorded in the manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
}

/// Everything written for one invocation.
#[derive(Debug, Clone)]
pub struct ResultBundle {
    /// Absent when the configuration itself could not be read.
    pub config: Option<ConfigDocument>,
    pub data: Option<BundleData>,
    pub error: Option<ErrorRecord>,
    pub wall_time_s: f64,
    pub created_unix_s: u64,
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn run_summary(out: &ScenarioOutput<f64>) -> (Value, Value) {
    let d = &out.trajectory.diagnostics;
    let model = &out.model;
    let diagnostics = json!({
        "warnings": out.warnings,
        "max_flux_residual": finite_or_null(d.max_flux_residual),
        "max_probe_error": finite_or_null(d.max_probe_error),
        "boundary_contact": d.boundary_contact,
        "boundary_contact_time_s": d.boundary_contact_time,
    });
    let last = out.final_point();
    let mut summary = json!({
        "label": out.label,
        "kappa": model.kappa(),
        "delta0_rad_s": model.resonance().total(),
        "resonant_offset_rad_s": model.resonant_offset(),
        "t_leave_s": model.t_leave(),
        "pulse_area": model.pulse_area(),
        "final_N_g": last.stats.n_g,
        "final_v_fock": last.stats.v_fock,
        "final_attenuation": last.attenuation,
        "snapshots": out.series.len(),
    });
    if let Ok((v, t)) = out.min_vfock() {
        summary["min_v_fock"] = json!(v);
        summary["min_v_fock_display"] = json!(format_vfock(v));
        summary["t_min_s"] = json!(t);
    }
    (diagnostics, summary)
}

fn sweep_summary(result: &SweepResult<f64>) -> (Value, Value) {
    let failures: Vec<Value> = result
        .records
        .iter()
        .filter_map(|r| r.outcome.as_ref().err().map(|e| json!({ "value": r.value, "error": e })))
        .collect();
    let mut summary = json!({
        "parameter": result.parameter.name(),
        "points": result.records.len(),
        "argmin": result.argmin_value(),
    });
    if let Some(i) = result.argmin {
        if let Ok(p) = &result.records[i].outcome {
            summary["min_v_fock"] = json!(p.min_vfock);
            summary["min_v_fock_display"] = json!(format_vfock(p.min_vfock));
        }
    }
    (json!({ "failed_points": failures }), summary)
}

impl ResultBundle {
    /// Data files as `(name, contents)`; plots included on request.
    pub fn data_files(&self, plots: bool) -> Result<Vec<(String, String)>, plot::PlotError> {
        let mut files = Vec::new();
        if let Some(c) = &self.config {
            files.push((CONFIG_FILE.to_string(), c.to_json_string() + "\n"));
        }
        match &self.data {
            Some(BundleData::Run(out)) => {
                let (d, s) = (density_table(out), timeseries_table(out));
                files.push((DENSITIES_FILE.into(), d.to_csv()));
                files.push((TIMESERIES_FILE.into(), s.to_csv()));
                if plots {
                    files.push(("densities.svg".into(), emit_plot(&d, PlotKind::Densities)?));
                    files.push(("timeseries.svg".into(), emit_plot(&s, PlotKind::TimeSeries { log_y: true })?));
                }
            }
            Some(BundleData::Sweep(result)) => {
                let t = sweep_table(result);
                files.push((SWEEP_FILE.into(), t.to_csv()));
                if plots {
                    files.push(("sweep.svg".into(), emit_plot(&t, PlotKind::Sweep { log_y: true })?));
                }
            }
            None => {}
        }
        Ok(files)
    }

    pub fn manifest(&self, files: &[String]) -> Value {
        let (diagnostics, summary) = match &self.data {
            Some(BundleData::Run(out)) => run_summary(out),
            Some(BundleData::Sweep(r)) => sweep_summary(r),
            None => (json!({}), json!({})),
        };
        json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "schema_version": config::SCHEMA_VERSION,
            "created_unix_s": self.created_unix_s,
            "wall_time_s": self.wall_time_s,
            "status": if self.error.is_none() { "ok" } else { "error" },
            "error": self.error.as_ref().map(|e| json!({ "kind": e.kind, "message": e.message })),
            "files": files,
            "summary": summary,
            "diagnostics": diagnostics,
            "config": self.config.as_ref().map(ConfigDocument::to_json),
        })
    }
}

/// Writes the bundle into `dir`. The manifest is written last and always;
/// a failure while writing data files is recorded in it.
pub fn write_bundle(bundle: &ResultBundle, dir: &Path, plots: bool) -> io::Result<Vec<PathBuf>> {
    let mut record = bundle.clone();
    let mut written = Vec::new();
    let outcome = bundle
        .data_files(plots)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))
        .and_then(|files| write_files(dir, &files));
    let data_error = match outcome {
        Ok(paths) => {
            written = paths;
            None
        }
        Err(e) => {
            if record.error.is_none() {
                record.error = Some(ErrorRecord {
                    kind: "io".into(),
                    message: e.to_string(),
                });
            }
            Some(e)
        }
    };
    let names: Vec<String> = written
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    let manifest = serde_json::to_string_pretty(&record.manifest(&names)).expect("JSON values serialize") + "\n";
    written.extend(write_files(dir, &[(MANIFEST_FILE.to_string(), manifest)])?);
    match data_error {
        Some(e) => Err(e),
        None => Ok(written),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_written_for_failed_run() {
        let dir = tempfile::tempdir().unwrap();
        let bundle = ResultBundle {
            config: Some(config::parse_config(r#"{"experiment": {"mode": "run"}}"#).unwrap()),
            data: None,
            error: Some(ErrorRecord {
                kind: "runtime".into(),
                message: "non-finite".into(),
            }),
            wall_time_s: 0.5,
            created_unix_s: 0,
        };
        write_bundle(&bundle, dir.path(), false).unwrap();
        let text = std::fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["status"], "error");
        assert_eq!(v["error"]["message"], "non-finite");
        assert_eq!(v["files"], json!(["config.json"]));
    }
}
