use thiserror::Error;

use crate::ode::EventKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("exponents out of range: {reason}")]
    OutOfRange { reason: String },

    #[error("time coordinate must be positive, got t = {0}")]
    NonpositiveTime(f64),

    #[error("{what} = {value} is outside the domain {domain}")]
    DomainError {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("no root on the monotone branch: K = {k} is below the branch threshold {threshold}")]
    NoMonotoneRoot { k: f64, threshold: f64 },

    #[error("state left the working regime (u = {u} <= e)")]
    RegimeExit { u: f64 },

    #[error("zeta = {zeta} fell below the guard {zeta_min}")]
    ZetaGuard { zeta: f64, zeta_min: f64 },

    #[error("step size {step} underflowed at x = {x}")]
    StepUnderflow { x: f64, step: f64 },

    #[error("sample budget of {0} exceeded")]
    SampleBudgetExceeded(usize),

    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),

    #[error("trajectory too short: tail window {tail} shorter than fit window {fit_window}")]
    TrajectoryTooShort { tail: f64, fit_window: f64 },

    #[error("decay fit requires positive samples (found {0} nonpositive)")]
    NonpositiveSamples(usize),

    #[error("need at least {needed} samples, found {found}")]
    InsufficientSamples { needed: usize, found: usize },

    #[error("expected a trajectory in the {expected} frame")]
    WrongFrame { expected: &'static str },

    #[error("bracket does not straddle the dichotomy: lo -> {lo}, hi -> {hi}")]
    BracketInvalid { lo: String, hi: String },

    #[error("integration stopped early by {0:?}")]
    Event(EventKind),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
