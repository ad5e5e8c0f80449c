//! Multimode simulation of an atom laser outcoupled from a trapped
//! condensate by a Raman transition driven with a quantized probe field.
//!
//! The probe photon statistics are transferred to the atomic beam. The
//! simulator evolves the atomic and optical mode functions of the single
//! occupied input mode and turns them into detector statistics for any
//! input photon state.
//!
//! ```no_run
//! use squeezebeam::{run_scenario, Scenario};
//!
//! let out = run_scenario(&Scenario::<f64>::new("reference")).unwrap();
//! let (v, t) = out.min_vfock().unwrap();
//! println!("v_fock reaches {v:.3e} at {t:.2e} s");
//! ```
//!
//! All numerical types are generic over [`Real`] (`f64` or `f32`); the
//! aliases at the crate root fix the scalar to `f64`.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod io;
pub mod model;
pub mod num;
pub mod observables;

pub use dynamics::{evolve, DerivativeScheme, EvolutionConfig, Gauge, ModePairState, Trajectory};
pub use error::{DynamicsError, ExperimentError, ModelError, ObservableError};
pub use experiment::{run_scenario, sweep, Scenario, ScenarioOutput, SweepParameter, SweepResult, SweepSpec};
pub use grid::{ComplexField, Grid};
pub use model::{DetectorSpec, Model, PhysicalParams};
pub use num::Real;
pub use observables::{BeamStatistics, OpticalMoments, OpticalStateSpec};

/// Double-precision aliases.
pub type Grid64 = Grid<f64>;
pub type Field64 = ComplexField<f64>;
pub type Params64 = PhysicalParams<f64>;
pub type Model64 = Model<f64>;
pub type Scenario64 = Scenario<f64>;

/// Single-precision aliases.
pub type Grid32 = Grid<f32>;
pub type Field32 = ComplexField<f32>;
pub type Params32 = PhysicalParams<f32>;
pub type Model32 = Model<f32>;
pub type Scenario32 = Scenario<f32>;
