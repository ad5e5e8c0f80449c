//! JSON run configuration.
//!
//! Every section is optional except `experiment`; omitted fields take the
//! reference values. All quantities are plain numbers in SI units, with
//! frequencies in rad/s.

use std::fmt;

use num_complex::Complex;
use serde_json::{json, Map, Value};

use crate::dynamics::{DerivativeScheme, EvolutionConfig, Gauge};
use crate::grid::Grid;
use crate::model::{
    default_grid, Calibration, DetectorSpec, Geometry, PhysicalParams, RateInterpretation, TwoPhotonDetuning,
};
use crate::observables::OpticalStateSpec;

/// Major version of the configuration schema.
pub const SCHEMA_VERSION: u64 = 1;

/// Output directory used when neither the config nor the command line
/// names one.
pub const DEFAULT_OUTPUT_DIR: &str = "squeezebeam-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentMode {
    Run,
    SweepDelta,
    SweepRabi,
}

impl ExperimentMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentMode::Run => "run",
            ExperimentMode::SweepDelta => "sweep-delta",
            ExperimentMode::SweepRabi => "sweep-rabi",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSection {
    pub mode: ExperimentMode,
    /// Sweep grid: δ − δ₀ or Ω₂₃ values (rad/s), strictly increasing.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSection {
    pub directory: Option<String>,
    pub plots: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigDocument {
    pub schema_version: u64,
    pub physical: PhysicalParams<f64>,
    pub grid: Grid<f64>,
    pub detector: DetectorSpec<f64>,
    pub evolution: EvolutionConfig<f64>,
    pub optical_state: OpticalStateSpec<f64>,
    pub experiment: ExperimentSection,
    pub output: OutputSection,
}

/// One offending field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("JSON syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid configuration:\n{}", format_fields(.0))]
    Invalid(Vec<FieldError>),
}

fn format_fields(errors: &[FieldError]) -> String {
    errors
        .iter()
        .map(|e| format!("  - {e}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl ConfigError {
    pub fn fields(&self) -> &[FieldError] {
        match self {
            ConfigError::Invalid(v) => v,
            ConfigError::Syntax { .. } => &[],
        }
    }
}

const TOP_KEYS: &[&str] = &[
    "schema_version",
    "physical",
    "grid",
    "detector",
    "evolution",
    "optical_state",
    "experiment",
    "output",
];
const PHYSICAL_KEYS: &[&str] = &[
    "m",
    "omega_t",
    "g13",
    "N",
    "Delta",
    "Omega23",
    "delta",
    "lambda",
    "lambda_pump",
    "geometry",
    "kappa",
    "calibration",
    "c",
];
const DELTA_KEYS: &[&str] = &["offset", "absolute"];
const CALIBRATION_KEYS: &[&str] = &["target", "interpretation"];
const GRID_KEYS: &[&str] = &["x_min", "x_max", "n"];
const DETECTOR_KEYS: &[&str] = &["x1", "x2", "probe_window"];
const EVOLUTION_KEYS: &[&str] = &["dt", "t_final", "gauge", "snapshot_stride", "derivative"];
const OPTICAL_KEYS: &[&str] = &["kind", "n", "alpha", "r", "theta", "n_bar", "bdag2b2"];
const EXPERIMENT_KEYS: &[&str] = &["mode", "values"];
const OUTPUT_KEYS: &[&str] = &["directory", "plots"];

/// Edit distance between two keys.
fn levenshtein(a: &str, b: &str) -> usize {
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.chars().enumerate() {
        let mut cur = vec![i + 1; b.len() + 1];
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != *cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        prev = cur;
    }
    prev[b.len()]
}

/// Closest known key: the longest known key that prefixes the unknown one
/// (or vice versa), else the nearest by edit distance.
fn suggest<'a>(unknown: &str, known: &[&'a str]) -> Option<&'a str> {
    let lower = unknown.to_lowercase();
    let prefixed = known
        .iter()
        .filter(|k| {
            let k = k.to_lowercase();
            lower.starts_with(&k) || k.starts_with(&lower)
        })
        .max_by_key(|k| k.len());
    if let Some(k) = prefixed {
        return Some(k);
    }
    let limit = (unknown.len() / 3).max(2);
    known
        .iter()
        .map(|k| (levenshtein(&lower, &k.to_lowercase()), *k))
        .filter(|(d, _)| *d <= limit)
        .min_by_key(|(d, _)| *d)
        .map(|(_, k)| k)
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

/// Field extraction that records every problem instead of stopping.
struct Reader {
    errors: Vec<FieldError>,
}

impl Reader {
    fn error(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.errors.push(FieldError {
            path: path.into(),
            message: message.into(),
        });
    }

    /// The object at `path`, checking for unknown keys.
    fn object<'v>(&mut self, value: &'v Value, path: &str, known: &[&str]) -> Option<&'v Map<String, Value>> {
        let Some(map) = value.as_object() else {
            self.error(path, "expected an object");
            return None;
        };
        for key in map.keys() {
            if !known.contains(&key.as_str()) {
                let hint = match suggest(key, known) {
                    Some(k) => format!("; did you mean \"{}\"?", join(path, k)),
                    None => String::new(),
                };
                self.error(join(path, key), format!("unknown key{hint}"));
            }
        }
        Some(map)
    }

    fn section<'v>(
        &mut self,
        map: &'v Map<String, Value>,
        key: &str,
        known: &[&str],
    ) -> Option<&'v Map<String, Value>> {
        map.get(key).and_then(|v| self.object(v, key, known))
    }

    fn number(&mut self, map: Option<&Map<String, Value>>, path: &str, key: &str, default: f64) -> f64 {
        match map.and_then(|m| m.get(key)) {
            None => default,
            Some(v) => match v.as_f64() {
                Some(x) if x.is_finite() => x,
                _ => {
                    self.error(join(path, key), format!("expected a finite number, got {v}"));
                    default
                }
            },
        }
    }

    fn positive(&mut self, map: Option<&Map<String, Value>>, path: &str, key: &str, default: f64) -> f64 {
        let x = self.number(map, path, key, default);
        if x <= 0.0 {
            self.error(join(path, key), format!("must be > 0, got {x:e}"));
        }
        x
    }

    fn integer(&mut self, map: Option<&Map<String, Value>>, path: &str, key: &str) -> Option<u64> {
        let v = map.and_then(|m| m.get(key))?;
        if v.is_null() {
            return None;
        }
        match v.as_u64() {
            Some(n) => Some(n),
            None => {
                self.error(join(path, key), format!("expected a non-negative integer, got {v}"));
                None
            }
        }
    }

    fn choice<T: Copy>(
        &mut self,
        map: Option<&Map<String, Value>>,
        path: &str,
        key: &str,
        options: &[(&str, T)],
        default: T,
    ) -> T {
        let Some(v) = map.and_then(|m| m.get(key)) else {
            return default;
        };
        let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
        match v.as_str().and_then(|s| options.iter().find(|(n, _)| *n == s)) {
            Some((_, t)) => *t,
            None => {
                self.error(join(path, key), format!("expected one of {names:?}, got {v}"));
                default
            }
        }
    }

    fn complex(&mut self, map: Option<&Map<String, Value>>, path: &str, key: &str) -> Complex<f64> {
        let Some(v) = map.and_then(|m| m.get(key)) else {
            self.error(join(path, key), "required");
            return Complex::default();
        };
        if let Some(re) = v.as_f64() {
            return Complex::new(re, 0.0);
        }
        match v.as_array().map(|a| a.iter().map(Value::as_f64).collect::<Option<Vec<_>>>()) {
            Some(Some(parts)) if parts.len() == 2 && parts.iter().all(|x| x.is_finite()) => {
                Complex::new(parts[0], parts[1])
            }
            _ => {
                self.error(join(path, key), format!("expected a number or [re, im], got {v}"));
                Complex::default()
            }
        }
    }
}

const GEOMETRIES: &[(&str, Geometry)] = &[
    ("counter-propagating", Geometry::CounterPropagating),
    ("co-propagating", Geometry::CoPropagating),
];
const INTERPRETATIONS: &[(&str, RateInterpretation)] = &[
    ("literal", RateInterpretation::Literal),
    ("peak", RateInterpretation::Peak),
    ("width-averaged", RateInterpretation::WidthAveraged),
];
const SCHEMES: &[(&str, DerivativeScheme)] = &[
    ("spectral", DerivativeScheme::Spectral),
    ("finite-difference-4", DerivativeScheme::FiniteDifference4),
];
const MODES: &[(&str, ExperimentMode)] = &[
    ("run", ExperimentMode::Run),
    ("sweep-delta", ExperimentMode::SweepDelta),
    ("sweep-rabi", ExperimentMode::SweepRabi),
];

fn name_of<T: PartialEq>(options: &[(&'static str, T)], value: &T) -> &'static str {
    options.iter().find(|(_, t)| t == value).map(|(n, _)| *n).expect("listed option")
}

fn read_physical(r: &mut Reader, root: &Map<String, Value>) -> PhysicalParams<f64> {
    let d = PhysicalParams::<f64>::reference();
    let s = r.section(root, "physical", PHYSICAL_KEYS);
    let p = "physical";
    let mut out = PhysicalParams {
        mass: r.positive(s, p, "m", d.mass),
        trap_frequency: r.positive(s, p, "omega_t", d.trap_frequency),
        g13: r.number(s, p, "g13", d.g13),
        atom_number: r.number(s, p, "N", d.atom_number),
        one_photon_detuning: r.positive(s, p, "Delta", d.one_photon_detuning),
        pump_rabi: r.number(s, p, "Omega23", d.pump_rabi),
        two_photon: d.two_photon,
        wavelength: r.positive(s, p, "lambda", d.wavelength),
        pump_wavelength: None,
        geometry: r.choice(s, p, "geometry", GEOMETRIES, d.geometry),
        calibration: d.calibration,
        speed_of_light: r.positive(s, p, "c", d.speed_of_light),
    };
    if out.atom_number < 1.0 {
        r.error("physical.N", format!("must be >= 1, got {:e}", out.atom_number));
    }
    if s.is_some_and(|m| m.get("lambda_pump").is_some_and(|v| !v.is_null())) {
        out.pump_wavelength = Some(r.positive(s, p, "lambda_pump", d.wavelength));
    }
    if let Some(v) = s.and_then(|m| m.get("delta")) {
        if let Some(dm) = r.object(v, "physical.delta", DELTA_KEYS) {
            match (dm.get("offset"), dm.get("absolute")) {
                (Some(_), None) => {
                    out.two_photon = TwoPhotonDetuning::Offset(r.number(Some(dm), "physical.delta", "offset", 0.0))
                }
                (None, Some(_)) => {
                    out.two_photon =
                        TwoPhotonDetuning::Absolute(r.number(Some(dm), "physical.delta", "absolute", 0.0))
                }
                _ => r.error("physical.delta", "expected exactly one of \"offset\" or \"absolute\""),
            }
        }
    }
    let kappa = s.and_then(|m| m.get("kappa"));
    let calibration = s.and_then(|m| m.get("calibration"));
    match kappa {
        Some(Value::Number(_)) => {
            out.calibration = Calibration::Fixed(r.positive(s, p, "kappa", 1.0));
            if calibration.is_some() {
                r.error("physical.calibration", "only allowed when kappa is \"calibrated\"");
            }
        }
        None | Some(Value::String(_)) => {
            if let Some(Value::String(k)) = kappa {
                if k != "calibrated" {
                    r.error("physical.kappa", format!("expected a number or \"calibrated\", got \"{k}\""));
                }
            }
            if let Some(c) = calibration.and_then(|v| r.object(v, "physical.calibration", CALIBRATION_KEYS)) {
                let Calibration::MatchRabiEstimate { target, interpretation } = d.calibration else {
                    unreachable!("reference calibration matches the estimate");
                };
                out.calibration = Calibration::MatchRabiEstimate {
                    target: r.positive(Some(c), "physical.calibration", "target", target),
                    interpretation: r.choice(
                        Some(c),
                        "physical.calibration",
                        "interpretation",
                        INTERPRETATIONS,
                        interpretation,
                    ),
                };
            }
        }
        Some(v) => r.error("physical.kappa", format!("expected a number or \"calibrated\", got {v}")),
    }
    out
}

fn read_optical(r: &mut Reader, root: &Map<String, Value>) -> OpticalStateSpec<f64> {
    let Some(s) = r.section(root, "optical_state", OPTICAL_KEYS) else {
        return OpticalStateSpec::Fock(1);
    };
    let p = "optical_state";
    let s = Some(s);
    let kinds = [("fock", 0), ("coherent", 1), ("squeezed-coherent", 2), ("direct", 3)];
    if s.is_some_and(|m| !m.contains_key("kind")) {
        r.error("optical_state.kind", "required");
        return OpticalStateSpec::Fock(1);
    }
    let kind = r.choice(s, p, "kind", &kinds, 0);
    let allowed: &[&str] = match kind {
        0 => &["kind", "n"],
        1 => &["kind", "alpha"],
        2 => &["kind", "alpha", "r", "theta"],
        _ => &["kind", "n_bar", "bdag2b2"],
    };
    for key in s.into_iter().flat_map(|m| m.keys()) {
        if OPTICAL_KEYS.contains(&key.as_str()) && !allowed.contains(&key.as_str()) {
            r.error(join(p, key), "not used by this kind");
        }
    }
    let spec = match kind {
        0 => {
            let n = r.integer(s, p, "n").unwrap_or(1);
            OpticalStateSpec::Fock(u32::try_from(n).unwrap_or_else(|_| {
                r.error("optical_state.n", "too large");
                1
            }))
        }
        1 => OpticalStateSpec::Coherent(r.complex(s, p, "alpha")),
        2 => OpticalStateSpec::SqueezedCoherent {
            alpha: r.complex(s, p, "alpha"),
            r: r.number(s, p, "r", 0.0),
            theta: r.number(s, p, "theta", 0.0),
        },
        _ => OpticalStateSpec::DirectMoments {
            n_bar: r.number(s, p, "n_bar", 1.0),
            bdag2b2: r.number(s, p, "bdag2b2", 0.0),
        },
    };
    if let Err(e) = spec.validate() {
        r.error(p, e.to_string());
    }
    spec
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ConfigDocument, ConfigError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut r = Reader { errors: Vec::new() };
    let Some(root) = r.object(&value, "", TOP_KEYS) else {
        return Err(ConfigError::Invalid(r.errors));
    };

    let schema_version = match root.get("schema_version") {
        None => SCHEMA_VERSION,
        Some(v) => match v.as_u64() {
            Some(SCHEMA_VERSION) => SCHEMA_VERSION,
            _ => {
                r.error("schema_version", format!("unsupported version {v}; this tool reads {SCHEMA_VERSION}"));
                SCHEMA_VERSION
            }
        },
    };

    let physical = read_physical(&mut r, root);

    let dg = default_grid::<f64>();
    let gs = r.section(root, "grid", GRID_KEYS);
    let x_min = r.number(gs, "grid", "x_min", dg.x_min());
    let x_max = r.number(gs, "grid", "x_max", dg.x_max());
    let n = r.integer(gs, "grid", "n").unwrap_or(dg.len() as u64) as usize;
    let grid = match Grid::new(x_min, x_max, n) {
        Ok(g) => g,
        Err(e) => {
            r.error("grid", e.to_string());
            dg
        }
    };

    let dd = DetectorSpec::<f64>::default();
    let ds = r.section(root, "detector", DETECTOR_KEYS);
    let detector = DetectorSpec {
        x1: r.number(ds, "detector", "x1", dd.x1),
        x2: r.number(ds, "detector", "x2", dd.x2),
        probe_window: r.positive(ds, "detector", "probe_window", dd.probe_window),
    };
    if let Err(e) = detector.validate(&grid) {
        r.error("detector", e.to_string());
    }

    let de = EvolutionConfig::<f64>::default();
    let es = r.section(root, "evolution", EVOLUTION_KEYS);
    let gauge = match es.and_then(|m| m.get("gauge")) {
        None => de.gauge,
        Some(Value::String(s)) if s == "light-shift" => Gauge::LightShift,
        Some(Value::String(s)) if s == "resonance" => Gauge::Resonance,
        Some(v) => match v.as_f64() {
            Some(c) if c.is_finite() => Gauge::Value(c),
            _ => {
                r.error(
                    "evolution.gauge",
                    format!("expected a number, \"light-shift\" or \"resonance\", got {v}"),
                );
                de.gauge
            }
        },
    };
    let evolution = EvolutionConfig {
        dt: r.positive(es, "evolution", "dt", de.dt),
        t_final: r.positive(es, "evolution", "t_final", de.t_final),
        gauge,
        snapshot_stride: r.integer(es, "evolution", "snapshot_stride").map(|s| s as usize),
        scheme: r.choice(es, "evolution", "derivative", SCHEMES, de.scheme),
    };
    if evolution.snapshot_stride == Some(0) {
        r.error("evolution.snapshot_stride", "must be >= 1");
    } else if let Err(e) = evolution.validate() {
        r.error("evolution", e.to_string());
    }

    let optical_state = read_optical(&mut r, root);

    let experiment = match root.get("experiment") {
        None => {
            r.error("experiment", "required");
            ExperimentSection {
                mode: ExperimentMode::Run,
                values: Vec::new(),
            }
        }
        Some(v) => {
            let s = r.object(v, "experiment", EXPERIMENT_KEYS);
            if s.is_some_and(|m| !m.contains_key("mode")) {
                r.error("experiment.mode", "required");
            }
            let mode = r.choice(s, "experiment", "mode", MODES, ExperimentMode::Run);
            let values = match s.and_then(|m| m.get("values")) {
                None => Vec::new(),
                Some(v) => match v.as_array().map(|a| a.iter().map(Value::as_f64).collect::<Option<Vec<_>>>()) {
                    Some(Some(vals)) => vals,
                    _ => {
                        r.error("experiment.values", "expected an array of numbers");
                        Vec::new()
                    }
                },
            };
            if mode != ExperimentMode::Run {
                if values.is_empty() {
                    r.error("experiment.values", "sweeps need at least one value");
                } else if values.windows(2).any(|w| w[0] >= w[1]) {
                    r.error("experiment.values", "must be strictly increasing");
                }
            }
            ExperimentSection { mode, values }
        }
    };

    let os = r.section(root, "output", OUTPUT_KEYS);
    let directory = match os.and_then(|m| m.get("directory")) {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(v) => {
            r.error("output.directory", format!("expected a string, got {v}"));
            None
        }
    };
    let plots = match os.and_then(|m| m.get("plots")) {
        None => false,
        Some(Value::Bool(b)) => *b,
        Some(v) => {
            r.error("output.plots", format!("expected true or false, got {v}"));
            false
        }
    };

    if let Err(e) = physical.validate() {
        let msg = e.to_string();
        if !r.errors.iter().any(|f| f.path.starts_with("physical")) {
            r.error("physical", msg);
        }
    }

    if !r.errors.is_empty() {
        return Err(ConfigError::Invalid(r.errors));
    }
    Ok(ConfigDocument {
        schema_version,
        physical,
        grid,
        detector,
        evolution,
        optical_state,
        experiment,
        output: OutputSection { directory, plots },
    })
}

impl ConfigDocument {
    /// The fully resolved document, every default written out.
    pub fn to_json(&self) -> Value {
        let p = &self.physical;
        let delta = match p.two_photon {
            TwoPhotonDetuning::Offset(o) => json!({ "offset": o }),
            TwoPhotonDetuning::Absolute(d) => json!({ "absolute": d }),
        };
        let mut physical = json!({
            "m": p.mass,
            "omega_t": p.trap_frequency,
            "g13": p.g13,
            "N": p.atom_number,
            "Delta": p.one_photon_detuning,
            "Omega23": p.pump_rabi,
            "delta": delta,
            "lambda": p.wavelength,
            "lambda_pump": p.pump_wavelength,
            "geometry": name_of(GEOMETRIES, &p.geometry),
            "c": p.speed_of_light,
        });
        match p.calibration {
            Calibration::Fixed(k) => physical["kappa"] = json!(k),
            Calibration::MatchRabiEstimate { target, interpretation } => {
                physical["kappa"] = json!("calibrated");
                physical["calibration"] = json!({
                    "target": target,
                    "interpretation": name_of(INTERPRETATIONS, &interpretation),
                });
            }
        }
        let e = &self.evolution;
        let gauge = match e.gauge {
            Gauge::LightShift => json!("light-shift"),
            Gauge::Resonance => json!("resonance"),
            Gauge::Value(c) => json!(c),
        };
        let optical = match self.optical_state {
            OpticalStateSpec::Fock(n) => json!({ "kind": "fock", "n": n }),
            OpticalStateSpec::Coherent(a) => json!({ "kind": "coherent", "alpha": [a.re, a.im] }),
            OpticalStateSpec::SqueezedCoherent { alpha, r, theta } => json!({
                "kind": "squeezed-coherent",
                "alpha": [alpha.re, alpha.im],
                "r": r,
                "theta": theta,
            }),
            OpticalStateSpec::DirectMoments { n_bar, bdag2b2 } => {
                json!({ "kind": "direct", "n_bar": n_bar, "bdag2b2": bdag2b2 })
            }
        };
        json!({
            "schema_version": self.schema_version,
            "physical": physical,
            "grid": { "x_min": self.grid.x_min(), "x_max": self.grid.x_max(), "n": self.grid.len() },
            "detector": {
                "x1": self.detector.x1,
                "x2": self.detector.x2,
                "probe_window": self.detector.probe_window,
            },
            "evolution": {
                "dt": e.dt,
                "t_final": e.t_final,
                "gauge": gauge,
                "snapshot_stride": e.snapshot_stride,
                "derivative": name_of(SCHEMES, &e.scheme),
            },
            "optical_state": optical,
            "experiment": { "mode": self.experiment.mode.as_str(), "values": self.experiment.values },
            "output": { "directory": self.output.directory, "plots": self.output.plots },
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("JSON values serialize")
    }
}
