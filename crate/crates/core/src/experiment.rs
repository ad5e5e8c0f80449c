//! Scenario runs and parameter sweeps.

use rayon::prelude::*;

use crate::dynamics::{evolve, EvolutionConfig, Trajectory};
use crate::error::ExperimentError;
use crate::grid::Grid;
use crate::model::{default_grid, DetectorSpec, Model, PhysicalParams};
use crate::num::{lit, to_f64, Real};
use crate::observables::{
    attenuation_factor, beam_statistics, densities, detector_fraction, optical_moments, BeamStatistics,
    Densities, OpticalMoments, OpticalStateSpec, N_G_EXCESS,
};

/// Values below this are reported as a numerical floor in summaries.
pub const VFOCK_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T: Real = f64> {
    pub label: String,
    pub params: PhysicalParams<T>,
    pub grid: Grid<T>,
    pub detector: DetectorSpec<T>,
    pub evolution: EvolutionConfig<T>,
    pub optical_state: OpticalStateSpec<T>,
}

impl<T: Real> Scenario<T> {
    /// Reference parameters with a single-photon Fock input.
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            params: PhysicalParams::reference(),
            grid: default_grid(),
            detector: DetectorSpec::default(),
            evolution: EvolutionConfig::default(),
            optical_state: OpticalStateSpec::Fock(1),
        }
    }

    pub fn build_model(&self) -> Result<Model<T>, ExperimentError> {
        Model::new(self.params, self.grid, self.detector).map_err(|source| ExperimentError::Model {
            label: self.label.clone(),
            source,
        })
    }

    fn moments(&self) -> Result<OpticalMoments<T>, ExperimentError> {
        let obs = |source| ExperimentError::Observable {
            label: self.label.clone(),
            source,
        };
        let m = optical_moments(&self.optical_state).map_err(obs)?;
        if m.n_bar <= T::zero() {
            return Err(obs(crate::error::ObservableError::UndefinedForVacuum));
        }
        Ok(m)
    }
}

/// Observables at one recorded snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimePoint<T: Real = f64> {
    pub t: T,
    pub stats: BeamStatistics<T>,
    pub attenuation: T,
    /// Flux-balance residual of the step at this time (NaN at the ends).
    pub flux_residual: T,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutput<T: Real = f64> {
    pub label: String,
    pub model: Model<T>,
    pub moments: OpticalMoments<T>,
    pub trajectory: Trajectory<T>,
    pub series: Vec<TimePoint<T>>,
    pub final_densities: Densities<T>,
    /// `|φ₀(x)|²` on the same grid.
    pub condensate_density: Vec<T>,
    pub warnings: Vec<String>,
}

impl<T: Real> ScenarioOutput<T> {
    /// Minimum of `v_fock` after `T_leave/2`.
    pub fn min_vfock(&self) -> Result<(T, T), ExperimentError> {
        min_vfock_over_time(&self.series, self.model.t_leave() / lit(2.0))
    }

    pub fn final_point(&self) -> &TimePoint<T> {
        self.series.last().expect("at least the initial snapshot")
    }
}

pub fn run_scenario<T: Real>(s: &Scenario<T>) -> Result<ScenarioOutput<T>, ExperimentError> {
    let model = s.build_model()?;
    let moments = s.moments()?;
    log::info!("scenario `{}`: {} steps", s.label, s.evolution.step_count());
    let trajectory = evolve(&model, &s.evolution);
    if let Some(source) = trajectory.error.clone() {
        return Err(ExperimentError::Dynamics {
            label: s.label.clone(),
            source,
        });
    }

    let mut warnings: Vec<String> = model.warnings().to_vec();
    warnings.extend(trajectory.diagnostics.warnings.iter().cloned());
    let excess = T::one() + lit(N_G_EXCESS);
    let mut peak_excess: Option<(T, T)> = None;
    let mut series = Vec::with_capacity(trajectory.snapshots.len());
    for snap in &trajectory.snapshots {
        let n_g = detector_fraction(&snap.g, model.detector());
        if n_g > excess && peak_excess.is_none_or(|(_, v)| n_g > v) {
            peak_excess = Some((snap.t, n_g));
        }
        let stats = beam_statistics(n_g, &moments).map_err(|source| ExperimentError::Observable {
            label: s.label.clone(),
            source,
        })?;
        let step = (to_f64(snap.t / trajectory.dt)).round() as usize;
        series.push(TimePoint {
            t: snap.t,
            stats,
            attenuation: attenuation_factor(&snap.p),
            flux_residual: trajectory.steps.get(step).map_or(T::nan(), |r| r.flux_residual),
        });
    }
    if let Some((t, v)) = peak_excess {
        warnings.push(format!(
            "N_g exceeds 1 + {N_G_EXCESS:e}: peak {:.6} at t = {:.4e} s",
            to_f64(v),
            to_f64(t)
        ));
    }
    for w in &warnings {
        log::warn!("scenario `{}`: {w}", s.label);
    }

    let final_state = trajectory.final_state().expect("complete trajectory has a final state");
    let final_densities = densities(final_state, &moments);
    let condensate_density = model.phi0().intensity();
    Ok(ScenarioOutput {
        label: s.label.clone(),
        model,
        moments,
        trajectory,
        series,
        final_densities,
        condensate_density,
        warnings,
    })
}

/// Minimum `v_fock` over points with `t ≥ exclude_before`; ties go to the
/// earliest time. Returns `(value, time)`.
pub fn min_vfock_over_time<T: Real>(
    series: &[TimePoint<T>],
    exclude_before: T,
) -> Result<(T, T), ExperimentError> {
    series
        .iter()
        .filter(|p| p.t >= exclude_before)
        .fold(None, |best: Option<(T, T)>, p| match best {
            Some((v, _)) if p.stats.v_fock.is_nan() || p.stats.v_fock >= v => best,
            _ => Some((p.stats.v_fock, p.t)),
        })
        .ok_or(ExperimentError::EmptySeries)
}

/// Summary text for a `v_fock` value.
pub fn format_vfock<T: Real>(v: T) -> String {
    let v = to_f64(v);
    if v < VFOCK_FLOOR {
        "≤ 1e-6 (floor)".to_string()
    } else {
        format!("{v:.6e}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// δ − δ₀ (rad/s).
    DeltaOffset,
    /// Ω₂₃ (rad/s).
    Omega23,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::DeltaOffset => "delta_offset",
            SweepParameter::Omega23 => "Omega23",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec<T: Real = f64> {
    pub base: Scenario<T>,
    pub parameter: SweepParameter,
    pub values: Vec<T>,
}

impl<T: Real> SweepSpec<T> {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.values.is_empty() {
            return Err(ExperimentError::InvalidSweep("value grid is empty".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(ExperimentError::InvalidSweep("values must be finite".into()));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ExperimentError::InvalidSweep("values must be strictly increasing".into()));
        }
        Ok(())
    }

    /// The scenario evaluated at one grid value.
    pub fn point(&self, value: T) -> Scenario<T> {
        let mut s = self.base.clone();
        s.label = format!("{}[{}={:e}]", self.base.label, self.parameter.name(), value);
        match self.parameter {
            SweepParameter::DeltaOffset => s.params = s.params.with_offset(value),
            SweepParameter::Omega23 => s.params = s.params.with_pump_rabi(value),
        }
        s
    }
}

/// Reduction of one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint<T: Real = f64> {
    pub min_vfock: T,
    pub t_min: T,
    pub final_n_g: T,
    pub attenuation: T,
}

impl<T: Real> SweepPoint<T> {
    pub fn from_output(out: &ScenarioOutput<T>) -> Result<Self, ExperimentError> {
        let (min_vfock, t_min) = out.min_vfock()?;
        let last = out.final_point();
        Ok(Self {
            min_vfock,
            t_min,
            final_n_g: last.stats.n_g,
            attenuation: last.attenuation,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord<T: Real = f64> {
    pub value: T,
    /// Failure message when the point could not be evaluated.
    pub outcome: Result<SweepPoint<T>, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult<T: Real = f64> {
    pub parameter: SweepParameter,
    pub records: Vec<SweepRecord<T>>,
    /// Index of the smallest `min_vfock` among successful points.
    pub argmin: Option<usize>,
}

impl<T: Real> SweepResult<T> {
    pub fn argmin_value(&self) -> Option<T> {
        self.argmin.map(|i| self.records[i].value)
    }
}

pub fn evaluate_point<T: Real>(s: &Scenario<T>) -> Result<SweepPoint<T>, ExperimentError> {
    SweepPoint::from_output(&run_scenario(s)?)
}

/// Runs every grid point on `workers` threads and gathers records in input
/// order.
pub fn sweep<T: Real>(spec: &SweepSpec<T>, workers: usize) -> Result<SweepResult<T>, ExperimentError> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| ExperimentError::InvalidSweep(format!("thread pool: {e}")))?;
    let records: Vec<SweepRecord<T>> = pool.install(|| {
        spec.values
            .par_iter()
            .map(|&value| SweepRecord {
                value,
                outcome: evaluate_point(&spec.point(value)).map_err(|e| e.to_string()),
            })
            .collect()
    });
    for r in &records {
        if let Err(e) = &r.outcome {
            log::warn!("sweep point {:e} failed: {e}", to_f64(r.value));
        }
    }
    // values are increasing, so a strict comparison keeps the smallest on ties
    let argmin = records
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.outcome.as_ref().ok().map(|p| (i, p.min_vfock)))
        .fold(None, |best: Option<(usize, T)>, (i, v)| match best {
            Some((_, b)) if v.is_nan() || v >= b => best,
            _ => Some((i, v)),
        })
        .map(|(i, _)| i);
    Ok(SweepResult {
        parameter: spec.parameter,
        records,
        argmin,
    })
}
