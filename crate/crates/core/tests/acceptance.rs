//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Runs the full-resolution reference scenarios (4096 points, dt = 1e-7 s,
//! 7.2 ms) and both parameter sweeps, so it takes several minutes.

mod common;

use std::io::Write as _;
use std::time::{Duration, Instant};

use num_complex::Complex;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use squeezebeam::dynamics::Propagator;
use squeezebeam::experiment::{sweep, Scenario, ScenarioOutput, SweepParameter, SweepSpec};
use squeezebeam::io::tables::{density_table, sweep_table, timeseries_table};
use squeezebeam::model::Calibration;
use squeezebeam::observables::{
    atom_current, beam_statistics, optical_moments, truncated_moments, OpticalStateSpec,
};
use squeezebeam::{run_scenario, DetectorSpec, Gauge, Grid};

// Criterion thresholds.
const PLATEAU_CV_MAX: f64 = 0.20;
const PLATEAU_WINDOW: (f64, f64) = (0.04e-3, 0.06e-3);
const ATTENUATION_A_MIN: f64 = 1e2;
const PULSE_PEAK_BEFORE: f64 = 4e-3;
const PULSE_FALL: f64 = 0.5;
const SCENARIO_RUNTIME_MAX: Duration = Duration::from_secs(300);
const HEADLINE_VFOCK_MAX: f64 = 0.01;
const HEADLINE_ATTENUATION: f64 = 1e4;
const HEADLINE_FACTOR: f64 = 3.0;
const DELTA_ARGMIN_RANGE: (f64, f64) = (400.0, 1600.0);
const RABI_TARGET: f64 = 2.2e12;
const RABI_TOLERANCE: f64 = 0.15;
const SWEEP_RUNTIME_MAX: Duration = Duration::from_secs(3600);
const SWEEP_WORKERS: usize = 4;
const FLUX_RESIDUAL_MAX: f64 = 1e-6;
const ORDER_MIN: f64 = 3.7;
const ORDER_T: f64 = 0.5e-3;
const SHIFT_TOLERANCE: f64 = 1e-8;
const MOMENT_TOLERANCE: f64 = 1e-9;
const IDENTITY_TOLERANCE: f64 = 1e-12;
const IDENTITY_CASES: u32 = 1000;
const GAUGE_TOLERANCE: f64 = 1e-10;

/// Criteria that are expected to fail; see the README.
const KNOWN_FAILURES: &[&str] = &["3-delta", "5"];

struct Report {
    lines: Vec<(String, bool)>,
}

impl Report {
    fn check(&mut self, id: &str, pass: bool, detail: impl AsRef<str>) {
        println!("[{}] {id}: {}", if pass { "PASS" } else { "FAIL" }, detail.as_ref());
        let _ = std::io::stdout().flush();
        self.lines.push((id.to_string(), pass));
    }
}

fn resonant_offset() -> f64 {
    Scenario::<f64>::new("resonance").build_model().unwrap().resonant_offset()
}

fn scenario(label: &str, omega23: f64, offset: f64) -> Scenario<f64> {
    let mut s = Scenario::new(label);
    s.params = s.params.with_pump_rabi(omega23).with_offset(offset);
    s
}

fn timed_run(s: &Scenario<f64>) -> (ScenarioOutput<f64>, Duration) {
    let start = Instant::now();
    let out = run_scenario(s).unwrap_or_else(|e| panic!("{}: {e}", s.label));
    (out, start.elapsed())
}

/// Observables that criterion 1 is judged on.
struct RegimeObservables {
    atoms: Vec<f64>,
    photons: Vec<f64>,
    n_g: Vec<f64>,
    attenuation: Vec<f64>,
    flux: Vec<f64>,
}

fn regime_observables(out: &ScenarioOutput<f64>) -> RegimeObservables {
    let x1 = out.model.detector().x1;
    RegimeObservables {
        atoms: out.final_densities.atoms.clone(),
        photons: out.final_densities.photons.clone(),
        n_g: out.series.iter().map(|p| p.stats.n_g).collect(),
        attenuation: out.series.iter().map(|p| p.attenuation).collect(),
        flux: out.trajectory.snapshots.iter().map(|s| atom_current(&s.g, &out.model, x1)).collect(),
    }
}

fn relative_change(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

fn gauge_change(a: &RegimeObservables, b: &RegimeObservables) -> f64 {
    [
        relative_change(&a.atoms, &b.atoms),
        relative_change(&a.photons, &b.photons),
        relative_change(&a.n_g, &b.n_g),
        relative_change(&a.attenuation, &b.attenuation),
        relative_change(&a.flux, &b.flux),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Mean and coefficient of variation of the final atom density on the
/// grid points inside `[a, b]`.
fn window_stats(out: &ScenarioOutput<f64>, (a, b): (f64, f64)) -> (f64, f64) {
    let grid = out.model.grid();
    let vals: Vec<f64> = grid
        .positions()
        .zip(&out.final_densities.atoms)
        .filter(|(x, _)| *x >= a && *x <= b)
        .map(|(_, d)| *d)
        .collect();
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt() / mean)
}

fn peak_near_center(out: &ScenarioOutput<f64>) -> f64 {
    let reach = 2.0 * out.model.sigma();
    out.model
        .grid()
        .positions()
        .zip(&out.final_densities.atoms)
        .filter(|(x, _)| x.abs() <= reach)
        .fold(0.0, |m, (_, d)| m.max(*d))
}

fn criterion_1_4_7(report: &mut Report, offset: f64) {
    let cases = [
        ("a", scenario("regime-a", 2.1e12, offset)),
        ("b", scenario("regime-b", 3.2e12, offset)),
        ("c", scenario("regime-c", 2.1e12, 4.0e3)),
    ];
    let mut outputs = Vec::new();
    for (tag, s) in &cases {
        let (out, took) = timed_run(s);
        for w in &out.warnings {
            println!("       note ({tag}): {w}");
        }
        report.check(
            &format!("1{tag}-runtime"),
            took <= SCENARIO_RUNTIME_MAX,
            format!("{:.1} s (limit {} s)", took.as_secs_f64(), SCENARIO_RUNTIME_MAX.as_secs()),
        );
        outputs.push(out);
    }
    let (a, b, c) = (&outputs[0], &outputs[1], &outputs[2]);

    let (plateau_a, cv) = window_stats(a, PLATEAU_WINDOW);
    let att_a = a.final_point().attenuation;
    report.check(
        "1a",
        cv < PLATEAU_CV_MAX && att_a > ATTENUATION_A_MIN,
        format!("plateau CV {cv:.3e} (< {PLATEAU_CV_MAX}), attenuation {att_a:.4e} (> {ATTENUATION_A_MIN:e}), mean density {plateau_a:.4e}"),
    );

    let (plateau_b, _) = window_stats(b, PLATEAU_WINDOW);
    let peak_b = peak_near_center(b);
    let (ng_a, ng_b) = (a.final_point().stats.n_g, b.final_point().stats.n_g);
    report.check(
        "1b",
        peak_b > plateau_b && ng_b < ng_a,
        format!("peak within 2σ {peak_b:.4e} vs plateau {plateau_b:.4e}; N_g {ng_b:.5} vs {ng_a:.5} in (a)"),
    );

    let obs_c = regime_observables(c);
    let (i_peak, j_peak) = obs_c
        .flux
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, v)| if *v > bv { (i, *v) } else { (bi, bv) });
    let t_peak = c.series[i_peak].t;
    let j_final = *obs_c.flux.last().unwrap();
    report.check(
        "1c",
        t_peak < PULSE_PEAK_BEFORE && j_final <= PULSE_FALL * j_peak,
        format!(
            "detector flux peaks {j_peak:.4e}/s at {:.3} ms (< {} ms), final {j_final:.4e}/s ({:.1}% of peak)",
            t_peak * 1e3,
            PULSE_PEAK_BEFORE * 1e3,
            100.0 * j_final / j_peak
        ),
    );

    let residuals: Vec<f64> = outputs.iter().map(|o| o.trajectory.diagnostics.max_flux_residual).collect();
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    report.check(
        "4",
        worst < FLUX_RESIDUAL_MAX,
        format!(
            "max per-step flux-balance residual a {:.3e}, b {:.3e}, c {:.3e} (< {FLUX_RESIDUAL_MAX:e})",
            residuals[0], residuals[1], residuals[2]
        ),
    );

    // The reference runs above use C = −|Ω₂₃|²/Δ.
    let mut worst_change = 0.0f64;
    for ((_, s), out) in cases.iter().zip(&outputs) {
        let reference = regime_observables(out);
        for gauge in [Gauge::Value(0.0), Gauge::Resonance] {
            let mut g = s.clone();
            g.evolution.gauge = gauge;
            let (alt, _) = timed_run(&g);
            worst_change = worst_change.max(gauge_change(&reference, &regime_observables(&alt)));
        }
    }
    report.check(
        "7",
        worst_change < GAUGE_TOLERANCE,
        format!("max relative change of regime observables over C ∈ {{0, −|Ω₂₃|²/Δ, δ₀}}: {worst_change:.3e} (< {GAUGE_TOLERANCE:e})"),
    );
}

fn criterion_2(report: &mut Report, offset: f64) {
    let (out, _) = timed_run(&scenario("headline", RABI_TARGET, offset));
    let (v, t) = out.min_vfock().unwrap();
    let att = out.final_point().attenuation;
    let peak_att = out.series.iter().map(|p| p.attenuation).fold(0.0, f64::max);
    let att_min = HEADLINE_ATTENUATION / HEADLINE_FACTOR;
    report.check(
        "2",
        v < HEADLINE_VFOCK_MAX && att >= att_min,
        format!(
            "min v_Fock {v:.4e} at {:.3} ms (< {HEADLINE_VFOCK_MAX}); final attenuation {att:.4e} (≥ {att_min:.4e}), peak {peak_att:.4e}",
            t * 1e3
        ),
    );
}

fn print_sweep(result: &squeezebeam::SweepResult<f64>) {
    for r in &result.records {
        match &r.outcome {
            Ok(p) => println!(
                "       {:>12.4e}  min v_Fock {:.4e} at {:.3} ms  final N_g {:.5}",
                r.value,
                p.min_vfock,
                p.t_min * 1e3,
                p.final_n_g
            ),
            Err(e) => println!("       {:>12.4e}  failed: {e}", r.value),
        }
    }
}

fn criterion_3(report: &mut Report, offset: f64) {
    let start = Instant::now();
    let deltas: Vec<f64> = (-7..=9).map(|i| 200.0 * f64::from(i)).collect();
    let delta_sweep = SweepSpec {
        base: scenario("delta-sweep", RABI_TARGET, 0.0),
        parameter: SweepParameter::DeltaOffset,
        values: deltas,
    };
    let dr = sweep(&delta_sweep, SWEEP_WORKERS).unwrap();
    print_sweep(&dr);
    let d_arg = dr.argmin_value().unwrap_or(f64::NAN);
    report.check(
        "3-delta",
        (DELTA_ARGMIN_RANGE.0..=DELTA_ARGMIN_RANGE.1).contains(&d_arg),
        format!(
            "δ−δ₀ argmin {d_arg:.0} rad/s on a 200 rad/s grid (required [{}, {}]); resonance of the model at {offset:.1} rad/s",
            DELTA_ARGMIN_RANGE.0, DELTA_ARGMIN_RANGE.1
        ),
    );

    let rabis: Vec<f64> = (18..=26).map(|i| f64::from(i) * 1e11).collect();
    let rabi_sweep = SweepSpec {
        base: scenario("rabi-sweep", RABI_TARGET, offset),
        parameter: SweepParameter::Omega23,
        values: rabis,
    };
    let rr = sweep(&rabi_sweep, SWEEP_WORKERS).unwrap();
    print_sweep(&rr);
    let r_arg = rr.argmin_value().unwrap_or(f64::NAN);
    let dev = (r_arg / RABI_TARGET - 1.0).abs();
    report.check(
        "3-rabi",
        dev <= RABI_TOLERANCE,
        format!("Ω₂₃ argmin {r_arg:.3e} rad/s, {:.1}% from {RABI_TARGET:e} (≤ {:.0}%)", dev * 100.0, RABI_TOLERANCE * 100.0),
    );
    let took = start.elapsed();
    report.check(
        "3-runtime",
        took <= SWEEP_RUNTIME_MAX,
        format!("both sweeps {:.1} min with {SWEEP_WORKERS} workers (limit {} min)", took.as_secs_f64() / 60.0, SWEEP_RUNTIME_MAX.as_secs() / 60),
    );
}

fn criterion_5(report: &mut Report, offset: f64) {
    let s = scenario("order", 2.1e12, offset);
    let model = s.build_model().unwrap();
    let final_field = |dt: f64| {
        let mut prop = Propagator::new(&model, s.evolution.scheme, dt);
        let mut state = prop.initial_state();
        for _ in 0..(ORDER_T / dt).round() as usize {
            prop.step(&mut state);
        }
        state.g.into_values()
    };
    let levels: Vec<Vec<Complex<f64>>> = [4e-7, 2e-7, 1e-7].into_iter().map(final_field).collect();
    let distance = |a: &[Complex<f64>], b: &[Complex<f64>]| {
        a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
    };
    let (e1, e2) = (distance(&levels[0], &levels[1]), distance(&levels[1], &levels[2]));
    let scale = distance(&levels[2], &vec![Complex::default(); levels[2].len()]);
    let order = (e1 / e2).log2();
    report.check(
        "5",
        order >= ORDER_MIN,
        format!(
            "Richardson order {order:.3} from dt = 4e-7/2e-7/1e-7 s over 0.5 ms (≥ {ORDER_MIN}); level differences {:.2e}, {:.2e} of ‖g‖",
            e1 / scale,
            e2 / scale
        ),
    );
}

fn criterion_6(report: &mut Report) {
    let shift = common::shift_equivalence(1000, 1e-7);
    report.check(
        "6i",
        shift.relative_error < SHIFT_TOLERANCE,
        format!("shifted vs unshifted |g|² after 1000 steps on 256 points: {:.3e} relative (< {SHIFT_TOLERANCE:e})", shift.relative_error),
    );

    let mut states: Vec<(OpticalStateSpec<f64>, usize)> = (0..=10).map(|n| (OpticalStateSpec::Fock(n), 60)).collect();
    for phase in [0.0, 1.0, 2.5] {
        for mag in [0.5, 2.0, 10f64.sqrt()] {
            states.push((OpticalStateSpec::Coherent(Complex::from_polar(mag, phase)), 80));
        }
    }
    for (alpha, r, theta) in [
        (Complex::new(0.0, 0.0), 0.5, 0.0),
        (Complex::new(0.0, 0.0), 1.8, 0.3),
        (Complex::new(1.0, 0.5), 0.4, 0.7),
        (Complex::new(2.0, 0.0), 1.2, 0.0),
        (Complex::new(2.0, 1.0), 1.3, 2.0),
    ] {
        states.push((OpticalStateSpec::SqueezedCoherent { alpha, r, theta }, 600));
    }
    let mut worst = 0.0f64;
    let mut max_nbar = 0.0f64;
    for (spec, dim) in &states {
        let closed = optical_moments(spec).unwrap();
        let oracle = truncated_moments(spec, *dim).unwrap_or_else(|e| panic!("{spec:?}: {e}"));
        assert!(closed.n_bar <= 10.0 + 1e-9);
        max_nbar = max_nbar.max(closed.n_bar);
        worst = worst
            .max((closed.n_bar - oracle.n_bar).abs())
            .max((closed.bdag2b2 - oracle.bdag2b2).abs());
    }
    report.check(
        "6ii",
        worst < MOMENT_TOLERANCE,
        format!(
            "{} Fock/coherent/squeezed states up to n̄ = {max_nbar:.2}: max |closed − oracle| {worst:.3e} (< {MOMENT_TOLERANCE:e})",
            states.len()
        ),
    );

    let mut runner = TestRunner::new(Config {
        cases: IDENTITY_CASES,
        failure_persistence: None,
        ..Config::default()
    });
    let inputs = (0.0f64..=1.0, 1e-3f64..20.0, 0.0f64..100.0, -3.0f64..3.0, -3.0f64..3.0);
    let worst = std::cell::Cell::new(0.0f64);
    let outcome = runner.run(&inputs, |(n_g, n_bar, excess, re, im)| {
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
        let direct = OpticalStateSpec::DirectMoments { n_bar, bdag2b2: (n_bar * n_bar - n_bar).max(0.0) + excess };
        let m = optical_moments(&direct).unwrap();
        let s = beam_statistics(n_g, &m).unwrap();
        let fano = 1.0 + m.bdag2b2 / m.n_bar - m.n_bar;
        let mut e = rel(s.v, n_g * fano + 1.0 - n_g);
        if n_g > 0.0 {
            e = e.max(rel(s.v, s.var_n / s.mean_n));
        }
        let fock = optical_moments(&OpticalStateSpec::Fock(1 + (n_bar as u32))).unwrap();
        e = e.max(rel(beam_statistics(n_g, &fock).unwrap().v, 1.0 - n_g));
        let coherent = optical_moments(&OpticalStateSpec::Coherent(Complex::new(re, im) + 0.05)).unwrap();
        e = e.max(rel(beam_statistics(n_g, &coherent).unwrap().v, 1.0));
        worst.set(worst.get().max(e));
        prop_assert!(e < IDENTITY_TOLERANCE, "error {e:e}");
        Ok(())
    });
    report.check(
        "6iii",
        outcome.is_ok(),
        format!("{IDENTITY_CASES} random inputs, max relative deviation {:.3e} (< {IDENTITY_TOLERANCE:e})", worst.get()),
    );
}

fn small_scenario(label: &str) -> Scenario<f64> {
    let mut s = Scenario::new(label);
    s.grid = Grid::new(-60e-6, 90e-6, 256).unwrap();
    s.detector = DetectorSpec { x1: 10e-6, x2: 30e-6, probe_window: 20e-6 };
    s.params.calibration = Calibration::Fixed(1.0);
    s.evolution.t_final = 1.5e-3;
    s
}

fn criterion_8(report: &mut Report) {
    let s = small_scenario("determinism");
    let csv = |out: &ScenarioOutput<f64>| (density_table(out).to_csv(), timeseries_table(out).to_csv());
    let first = csv(&run_scenario(&s).unwrap());
    let second = csv(&run_scenario(&s).unwrap());
    let spec = SweepSpec {
        base: s,
        parameter: SweepParameter::Omega23,
        values: vec![1.8e12, 2.2e12, 2.6e12, 3.0e12, 3.4e12],
    };
    let one = sweep_table(&sweep(&spec, 1).unwrap()).to_csv();
    let four = sweep_table(&sweep(&spec, 4).unwrap()).to_csv();
    report.check(
        "8",
        first == second && one == four,
        format!(
            "repeated run CSVs identical: {}; sweep CSV with 1 vs 4 workers identical: {}",
            first == second,
            one == four
        ),
    );
}

fn main() {
    let start = Instant::now();
    let mut report = Report { lines: Vec::new() };
    let offset = resonant_offset();
    println!("acceptance report (resonant δ−δ₀ of the model: {offset:.2} rad/s)");

    criterion_6(&mut report);
    criterion_8(&mut report);
    criterion_5(&mut report, offset);
    criterion_1_4_7(&mut report, offset);
    criterion_2(&mut report, offset);
    criterion_3(&mut report, offset);

    let failed: Vec<&str> = report.lines.iter().filter(|(_, p)| !p).map(|(id, _)| id.as_str()).collect();
    let unexpected: Vec<&str> = failed.iter().copied().filter(|id| !KNOWN_FAILURES.contains(id)).collect();
    println!(
        "{} checks, {} passed, {} failed {:?}; {:.1} min",
        report.lines.len(),
        report.lines.len() - failed.len(),
        failed.len(),
        failed,
        start.elapsed().as_secs_f64() / 60.0
    );
    for id in KNOWN_FAILURES.iter().filter(|id| !failed.contains(id)) {
        println!("note: {id} is listed as a known failure but passed");
    }
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
