use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error(
        "grid too narrow for the condensate: |phi0| at the boundary is {edge_ratio:e} of its peak (limit 1e-6)"
    )]
    GridTooNarrow { edge_ratio: f64 },
    #[error("detector [{x1:e}, {x2:e}] must satisfy x_min <= x1 < x2 <= x_max")]
    InvalidDetector { x1: f64, x2: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("invalid evolution config: {0}")]
    InvalidConfig(String),
    #[error("non-finite {field} at step {step} (t = {t:e} s)")]
    NonFinite {
        field: &'static str,
        step: usize,
        t: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObservableError {
    #[error("normalized variance undefined for vacuum input (mean photon number is zero)")]
    UndefinedForVacuum,
    #[error("unphysical optical state: {0}")]
    InvalidState(String),
    #[error("Fock truncation at dimension {dim} insufficient: tail probability {tail:e} > 1e-10")]
    TruncationInsufficient { dim: usize, tail: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("scenario `{label}`: {source}")]
    Model {
        label: String,
        #[source]
        source: ModelError,
    },
    #[error("scenario `{label}`: {source}")]
    Dynamics {
        label: String,
        #[source]
        source: DynamicsError,
    },
    #[error("scenario `{label}`: {source}")]
    Observable {
        label: String,
        #[source]
        source: ObservableError,
    },
    #[error("empty time series")]
    EmptySeries,
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}
