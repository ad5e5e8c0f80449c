//! Command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex;

use crate::error::ExperimentError;
use crate::experiment::{format_vfock, run_scenario, sweep, Scenario, SweepParameter, SweepSpec};
use crate::io::config::{parse_config, ConfigDocument, ExperimentMode, DEFAULT_OUTPUT_DIR};
use crate::io::{write_bundle, BundleData, ErrorRecord, ResultBundle};
use crate::model::{Model, RateInterpretation};
use crate::observables::{fano, optical_moments, OpticalStateSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

/// Environment fallback for `--workers`.
pub const WORKERS_ENV: &str = "SQUEEZEBEAM_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "squeezebeam", version, about = "Atom-laser outcoupling driven by a quantized probe")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Output directory (overrides output.directory).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    pub plots: bool,
    /// Sweep worker threads.
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
    /// Only print errors.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the configured scenario.
    Run { config: PathBuf },
    /// Run the configured parameter sweep.
    Sweep { config: PathBuf },
    /// Photon-number moments of an input state, e.g. `fock:5`,
    /// `coherent:1.5,0.5`, `squeezed:0,0,0.5,0`, `direct:2,3.5`.
    Moments { spec: String },
    /// Print resonance and calibration estimates for a configuration.
    Estimate { config: PathBuf },
}

struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VALIDATION,
            kind: "validation",
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_RUNTIME,
            kind: "runtime",
            message: message.into(),
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Dynamics { .. } => Failure::runtime(e.to_string()),
            _ => Failure::validation(e.to_string()),
        }
    }
}

fn load_config(path: &Path) -> Result<ConfigDocument, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::validation(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Failure::validation(format!("{}: {e}", path.display())))
}

/// Scenario described by a configuration document.
pub fn scenario_from(doc: &ConfigDocument, label: &str) -> Scenario<f64> {
    Scenario {
        label: label.to_string(),
        params: doc.physical,
        grid: doc.grid,
        detector: doc.detector,
        evolution: doc.evolution,
        optical_state: doc.optical_state,
    }
}

/// Parses `kind:values` state specifications.
pub fn parse_state_spec(text: &str) -> Result<OpticalStateSpec<f64>, String> {
    let (kind, args) = text.split_once(':').unwrap_or((text, ""));
    let nums: Result<Vec<f64>, _> = args
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<f64>())
        .collect();
    let nums = nums.map_err(|e| format!("invalid number in `{text}`: {e}"))?;
    let spec = match (kind, nums.as_slice()) {
        ("fock", _) => {
            let n = args
                .trim()
                .parse::<u32>()
                .map_err(|_| format!("fock needs a non-negative integer, got `{args}`"))?;
            OpticalStateSpec::Fock(n)
        }
        ("coherent", [re]) => OpticalStateSpec::Coherent(Complex::new(*re, 0.0)),
        ("coherent", [re, im]) => OpticalStateSpec::Coherent(Complex::new(*re, *im)),
        ("squeezed", [re, im, r, theta]) => OpticalStateSpec::SqueezedCoherent {
            alpha: Complex::new(*re, *im),
            r: *r,
            theta: *theta,
        },
        ("direct", [n_bar, b2]) => OpticalStateSpec::DirectMoments {
            n_bar: *n_bar,
            bdag2b2: *b2,
        },
        _ => {
            return Err(format!(
                "unrecognized state `{text}`; expected fock:N, coherent:RE[,IM], squeezed:RE,IM,R,THETA or direct:NBAR,B2"
            ))
        }
    };
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

fn resolve_workers(flag: Option<usize>) -> Result<usize, Failure> {
    if let Some(n) = flag {
        return if n == 0 {
            Err(Failure::validation("--workers must be >= 1"))
        } else {
            Ok(n)
        };
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Failure::validation(format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn output_dir(global: &GlobalArgs, doc: Option<&ConfigDocument>) -> PathBuf {
    global
        .out
        .clone()
        .or_else(|| doc.and_then(|d| d.output.directory.clone()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
}

fn now_unix() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Loads the config, executes `body`, and writes the bundle including the
/// manifest whatever the outcome.
fn with_bundle(
    path: &Path,
    global: &GlobalArgs,
    out: &mut dyn Write,
    body: impl FnOnce(&ConfigDocument, &mut dyn Write) -> Result<BundleData, Failure>,
) -> i32 {
    let start = Instant::now();
    let created = now_unix();
    let doc = load_config(path);
    let (config, result) = match doc {
        Ok(doc) => {
            let r = body(&doc, out);
            (Some(doc), r)
        }
        Err(f) => (None, Err(f)),
    };
    let plots = global.plots || config.as_ref().is_some_and(|c| c.output.plots);
    let dir = output_dir(global, config.as_ref());
    let (data, error, code) = match result {
        Ok(d) => (Some(d), None, EXIT_OK),
        Err(f) => {
            eprintln!("error: {}", f.message);
            let rec = ErrorRecord {
                kind: f.kind.into(),
                message: f.message,
            };
            (None, Some(rec), f.code)
        }
    };
    let bundle = ResultBundle {
        config,
        data,
        error,
        wall_time_s: start.elapsed().as_secs_f64(),
        created_unix_s: created,
    };
    match write_bundle(&bundle, &dir, plots) {
        Ok(files) => {
            if !global.quiet && code == EXIT_OK {
                let _ = writeln!(out, "wrote {} files to {}", files.len(), dir.display());
            }
            code
        }
        Err(e) => {
            eprintln!("error: writing results to {}: {e}", dir.display());
            if code == EXIT_OK {
                EXIT_RUNTIME
            } else {
                code
            }
        }
    }
}

fn cmd_run(doc: &ConfigDocument, global: &GlobalArgs, out: &mut dyn Write) -> Result<BundleData, Failure> {
    if doc.experiment.mode != ExperimentMode::Run {
        log::warn!("experiment.mode is {}; running the base scenario", doc.experiment.mode.as_str());
    }
    let output = run_scenario(&scenario_from(doc, "run"))?;
    if !global.quiet {
        let last = output.final_point();
        let _ = writeln!(out, "final N_g      {:.6}", last.stats.n_g);
        let _ = writeln!(out, "final v_fock   {}", format_vfock(last.stats.v_fock));
        if let Ok((v, t)) = output.min_vfock() {
            let _ = writeln!(out, "min v_fock     {} at t = {:.4e} s", format_vfock(v), t);
        }
        let _ = writeln!(out, "attenuation    {:.4e}", last.attenuation);
    }
    Ok(BundleData::Run(Box::new(output)))
}

fn cmd_sweep(doc: &ConfigDocument, global: &GlobalArgs, out: &mut dyn Write) -> Result<BundleData, Failure> {
    let parameter = match doc.experiment.mode {
        ExperimentMode::SweepDelta => SweepParameter::DeltaOffset,
        ExperimentMode::SweepRabi => SweepParameter::Omega23,
        ExperimentMode::Run => {
            return Err(Failure::validation(
                "experiment.mode is \"run\"; use sweep-delta or sweep-rabi for sweeps",
            ))
        }
    };
    let workers = resolve_workers(global.workers)?;
    let spec = SweepSpec {
        base: scenario_from(doc, "sweep"),
        parameter,
        values: doc.experiment.values.clone(),
    };
    let result = sweep(&spec, workers)?;
    if !global.quiet {
        for r in &result.records {
            match &r.outcome {
                Ok(p) => {
                    let _ = writeln!(out, "{:>14.6e}  min v_fock {}", r.value, format_vfock(p.min_vfock));
                }
                Err(e) => {
                    let _ = writeln!(out, "{:>14.6e}  failed: {e}", r.value);
                }
            }
        }
        match result.argmin_value() {
            Some(v) => {
                let _ = writeln!(out, "argmin {} = {v:.6e}", parameter.name());
            }
            None => {
                let _ = writeln!(out, "no successful points");
            }
        }
    }
    if result.argmin.is_none() {
        return Err(Failure::runtime("every sweep point failed"));
    }
    Ok(BundleData::Sweep(result))
}

fn cmd_moments(spec: &str, out: &mut dyn Write) -> i32 {
    let spec = match parse_state_spec(spec) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VALIDATION;
        }
    };
    let m = optical_moments(&spec).expect("validated spec");
    let _ = writeln!(out, "n_bar    {:.10e}", m.n_bar);
    let _ = writeln!(out, "bdag2b2  {:.10e}", m.bdag2b2);
    match fano(&m) {
        Ok(v) => {
            let _ = writeln!(out, "v(N0)    {v:.10e}");
        }
        Err(e) => {
            let _ = writeln!(out, "v(N0)    undefined ({e})");
        }
    }
    EXIT_OK
}

fn cmd_estimate(path: &Path, out: &mut dyn Write) -> i32 {
    let doc = match load_config(path) {
        Ok(d) => d,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return f.code;
        }
    };
    let model = match Model::new(doc.physical, doc.grid, doc.detector) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VALIDATION;
        }
    };
    let r = model.resonance();
    let lines = [
        format!("delta0            {:.6e} rad/s", r.total()),
        format!("  recoil          {:.6e}", r.kinetic),
        format!("  mean field      {:.6e}", r.condensate),
        format!("  light shift    -{:.6e}", r.light_shift),
        format!("  trap           -{:.6e}", r.trap),
        format!("resonant offset   {:.6e} rad/s", model.resonant_offset()),
        format!("sigma             {:.6e} m", model.sigma()),
        format!("T_leave           {:.6e} s", model.t_leave()),
        format!("kappa             {:.6e}", model.kappa()),
        format!("pulse area        {:.6e} rad", model.pulse_area()),
    ];
    for l in lines {
        let _ = writeln!(out, "{l}");
    }
    for (name, interp) in [
        ("literal", RateInterpretation::Literal),
        ("peak", RateInterpretation::Peak),
        ("width-averaged", RateInterpretation::WidthAveraged),
    ] {
        let e = model.rabi_estimate(interp);
        let _ = writeln!(out, "Omega23 estimate  {:.6e} rad/s ({name})", e.pump_rabi);
    }
    for w in model.warnings() {
        let _ = writeln!(out, "warning: {w}");
    }
    EXIT_OK
}

/// Runs the parsed command, writing normal output to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> i32 {
    let g = &cli.global;
    match &cli.command {
        Command::Run { config } => with_bundle(config, g, out, |doc, out| cmd_run(doc, g, out)),
        Command::Sweep { config } => with_bundle(config, g, out, |doc, out| cmd_sweep(doc, g, out)),
        Command::Moments { spec } => cmd_moments(spec, out),
        Command::Estimate { config } => cmd_estimate(config, out),
    }
}

/// Entry point: parses `args`, sets up logging and returns the exit code.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    let level = if cli.global.quiet { "error" } else { "info" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    execute(&cli, &mut lock)
}
