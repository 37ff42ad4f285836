use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BasisError {
    #[error("lattice must have at least one site")]
    EmptyLattice,
    #[error("sector dimension {predicted} exceeds the cap of {cap}")]
    DimensionCap { predicted: u128, cap: u128 },
    #[error("configuration has {found} sites, expected {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("configuration carries {found} excitations, sector has {expected}")]
    NotInSector { expected: usize, found: usize },
}

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("lowest eigenvalues {lower} and {upper} are degenerate within {threshold:e}")]
    Degenerate { lower: f64, upper: f64, threshold: f64 },
    #[error("symmetric gap {gap:e} at s = {s} is below {threshold:e}; suspected level crossing")]
    GapClosed { s: f64, gap: f64, threshold: f64 },
    #[error(
        "eigensolver did not converge: {converged}/{requested} pairs after {iterations} \
         Krylov steps (worst residual {residual:e})"
    )]
    NotConverged {
        requested: usize,
        converged: usize,
        iterations: usize,
        residual: f64,
    },
    #[error("requested {requested} eigenpairs from a space of dimension {dim}")]
    TooManyStates { requested: usize, dim: usize },
    #[error("trajectory has no varying parameter")]
    StaticTrajectory,
    #[error(transparent)]
    Ramp(#[from] RampError),
}

#[derive(Debug, Error, PartialEq)]
pub enum RampError {
    #[error("time {t} outside [0, {total}]")]
    TimeOutOfRange { t: f64, total: f64 },
    #[error("value {value} outside the ramp range [{start}, {end}]")]
    ValueOutOfRange { value: f64, start: f64, end: f64 },
    #[error("ramping index must be positive and finite, got {0}")]
    InvalidIndex(f64),
    #[error("ramp duration must be positive and finite, got {0}")]
    InvalidDuration(f64),
    #[error("velocity diverges at the ramp start for index {index} < 1")]
    DivergentVelocity { index: f64 },
    #[error("gap value {gap} is not strictly between {start} and {end}")]
    GapOutsideRamp { gap: f64, start: f64, end: f64 },
    #[error("progress {0} outside [0, 1]")]
    ProgressOutOfRange(f64),
}

#[derive(Debug, Error)]
pub enum PropagationError {
    #[error("state dimension {found} does not match basis dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(
        "step refinement exhausted after {steps} steps: convergence {convergence:e}, \
         norm drift {norm_drift:e}, tolerance {tolerance:e}"
    )]
    StepUnderflow {
        steps: usize,
        convergence: f64,
        norm_drift: f64,
        tolerance: f64,
    },
    #[error("norm grew to {norm:e} at t = {t}; non-Hermitian term is unbounded")]
    NormBlowUp { t: f64, norm: f64 },
    #[error("initial state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error(transparent)]
    Ramp(#[from] RampError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

#[derive(Debug, Error)]
pub enum StatePrepError {
    #[error("Mott state needs unit filling, got L = {sites}, N = {excitations}")]
    NotUnitFilling { sites: usize, excitations: usize },
    #[error("light-matter coupling must be positive, got {0}")]
    NonPositiveCoupling(f64),
    #[error("pulse parameter {name} must be nonzero and finite, got {value}")]
    InvalidPulse { name: &'static str, value: f64 },
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("key `{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error("grid axes differ between inputs: {0}")]
    AxisMismatch(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

/// Umbrella error for the run drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Ramp(#[from] RampError),
    #[error(transparent)]
    Propagation(#[from] PropagationError),
    #[error(transparent)]
    StatePrep(#[from] StatePrepError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Process exit code: 2 for configuration problems, 3 for numerical ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) => 2,
            _ => 3,
        }
    }
}
