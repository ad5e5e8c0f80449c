//! Time evolution of the coupled atomic mode function and probe envelope.
//!
//! The atomic field `g̃₀` is advanced with classical RK4. At every stage the
//! probe envelope `p̃₀` is re-solved as a boundary-value problem in x
//! (cross-propagation) from the inflow at `x_min`.
//!
//! Internally the pair is evolved in the frame co-rotating with the probe
//! drive. The gauge constant `C` only chooses the frame in which recorded
//! states are expressed: a state in gauge `C` is the drive-frame state times
//! `e^{i(C−δ)t}`, so moduli, and every observable derived from them, do
//! not depend on `C`.

mod integrator;
mod operator;
mod probe;

pub use integrator::{atomic_rhs, evolve, rk4_time_step, Propagator, MAX_STEPS};
pub use operator::{AtomicOperator, DerivativeScheme};
pub use probe::{solve_probe_envelope, ProbeSolution};

use crate::error::DynamicsError;
use crate::grid::ComplexField;
use crate::model::{Model, TwoPhotonDetuning};
use crate::num::{lit, to_f64, Real};

/// Snapshots recorded by default at most this many times per run.
pub const MAX_DEFAULT_SNAPSHOTS: usize = 200;

/// Choice of the gauge constant `C` (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Gauge<T: Real = f64> {
    /// `C = −|Ω₂₃|²/Δ`.
    #[default]
    LightShift,
    /// `C = δ₀`.
    Resonance,
    Value(T),
}

impl<T: Real> Gauge<T> {
    pub fn value(&self, model: &Model<T>) -> T {
        match *self {
            Gauge::LightShift => -model.resonance().light_shift,
            Gauge::Resonance => model.resonance().total(),
            Gauge::Value(c) => c,
        }
    }

    /// `C − δ`, the rotation rate of the gauge frame relative to the drive.
    pub fn frame_rate(&self, model: &Model<T>) -> T {
        let r = model.resonance();
        match (*self, model.params().two_photon) {
            (Gauge::LightShift, TwoPhotonDetuning::Offset(o)) => -(r.kinetic + r.condensate - r.trap + o),
            (Gauge::Resonance, TwoPhotonDetuning::Offset(o)) => -o,
            _ => self.value(model) - model.two_photon_detuning(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig<T: Real = f64> {
    /// Time step (s).
    pub dt: T,
    /// End time (s).
    pub t_final: T,
    pub gauge: Gauge<T>,
    /// Steps between recorded snapshots; chosen to keep at most
    /// [`MAX_DEFAULT_SNAPSHOTS`] when `None`.
    pub snapshot_stride: Option<usize>,
    pub scheme: DerivativeScheme,
}

impl<T: Real> Default for EvolutionConfig<T> {
    fn default() -> Self {
        Self {
            dt: lit(1e-7),
            t_final: lit(7.2e-3),
            gauge: Gauge::LightShift,
            snapshot_stride: None,
            scheme: DerivativeScheme::Spectral,
        }
    }
}

impl<T: Real> EvolutionConfig<T> {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.dt.is_finite() && self.dt > T::zero()) {
            return Err(DynamicsError::InvalidConfig(format!("dt must be > 0, got {:e}", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final >= self.dt) {
            return Err(DynamicsError::InvalidConfig(format!(
                "t_final must be >= dt, got {:e}",
                self.t_final
            )));
        }
        if to_f64(self.t_final / self.dt) > MAX_STEPS {
            return Err(DynamicsError::InvalidConfig(format!(
                "t_final/dt = {:.3e} exceeds {MAX_STEPS:e}",
                to_f64(self.t_final / self.dt)
            )));
        }
        if let Gauge::Value(c) = self.gauge {
            if !c.is_finite() {
                return Err(DynamicsError::InvalidConfig("gauge constant must be finite".into()));
            }
        }
        if self.snapshot_stride == Some(0) {
            return Err(DynamicsError::InvalidConfig("snapshot_stride must be >= 1".into()));
        }
        Ok(())
    }

    pub fn step_count(&self) -> usize {
        to_f64(self.t_final / self.dt).round().max(1.0) as usize
    }

    pub fn stride(&self) -> usize {
        self.snapshot_stride
            .unwrap_or_else(|| self.step_count().div_ceil(MAX_DEFAULT_SNAPSHOTS))
            .max(1)
    }
}

/// Atomic mode function and probe envelope at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ModePairState<T: Real = f64> {
    /// Time (s).
    pub t: T,
    /// `g̃₀(x)` (m^-1/2).
    pub g: ComplexField<T>,
    /// `p̃₀(x)` (m^-1/2).
    pub p: ComplexField<T>,
}

impl<T: Real> ModePairState<T> {
    /// The same state expressed in a frame rotating at `rate` relative to
    /// the current one.
    pub fn rotated(&self, rate: T) -> Self {
        let phase = integrator::frame_phasor(rate, self.t);
        Self {
            t: self.t,
            g: self.g.scaled(phase),
            p: self.p.scaled(phase),
        }
    }
}

/// Per-step scalar log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord<T: Real = f64> {
    pub t: T,
    /// `∫|g̃₀|²dx`
    pub norm: T,
    /// `|p̃₀(x_min)|²`
    pub probe_in: T,
    /// `|p̃₀(x_max)|²`
    pub probe_out: T,
    /// Relative flux-balance residual; NaN at the first and last step.
    pub flux_residual: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryDiagnostics<T: Real = f64> {
    pub max_flux_residual: T,
    pub max_probe_error: T,
    pub boundary_contact: bool,
    pub boundary_contact_time: Option<T>,
    pub warnings: Vec<String>,
}

impl<T: Real> Default for TrajectoryDiagnostics<T> {
    fn default() -> Self {
        Self {
            max_flux_residual: T::zero(),
            max_probe_error: T::zero(),
            boundary_contact: false,
            boundary_contact_time: None,
            warnings: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory<T: Real = f64> {
    /// Recorded states in the configured gauge, strictly increasing in time.
    pub snapshots: Vec<ModePairState<T>>,
    pub steps: Vec<StepRecord<T>>,
    pub gauge_constant: T,
    /// `C − δ` (rad/s).
    pub frame_rate: T,
    pub dt: T,
    pub diagnostics: TrajectoryDiagnostics<T>,
    /// Set when the run stopped early.
    pub error: Option<DynamicsError>,
}

impl<T: Real> Trajectory<T> {
    pub fn final_state(&self) -> Option<&ModePairState<T>> {
        self.snapshots.last()
    }

    pub fn is_complete(&self) -> bool {
        self.error.is_none()
    }
}
