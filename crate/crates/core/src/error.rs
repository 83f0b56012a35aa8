use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole at evaluation point (|denominator| = {0:e})")]
    PoleAtPoint(f64),
    #[error("function is identically zero")]
    ZeroFunction,
    #[error("tame symbol unit part vanishes or has a pole at the point")]
    IndeterminateSymbol,
    #[error("polynomial degree {0} exceeds the cap of {cap}", cap = crate::exact_algebra::DEGREE_CAP)]
    DegreeCap(usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid cover: {0}")]
    InvalidCover(String),
    #[error("sample region is empty")]
    EmptyRegion,
    #[error("branch rounding residual {0:.3} exceeds the guard")]
    BranchGuardViolation(f64),
    #[error("point lies outside the chart of sector {0}")]
    OutOfChart(usize),
    #[error("form degree overflow")]
    DegreeOverflow,
    #[error("cochain slot mismatch: {0}")]
    SlotMismatch(String),
    #[error("no pairing defined between {0} and {1}")]
    PairingUndefined(String, String),
    #[error("homotopy not registered for this cone product")]
    HomotopyUndefined,
    #[error("cocycle condition fails: {0}")]
    NotACocycle(String),
    #[error("metric incompatible with transition functions: residual {0:e}")]
    MetricIncompatible(f64),
    #[error("tensor is not in the kernel of multiplication")]
    NotInKernel,
    #[error("lift does not match the rescaled period")]
    LiftMismatch,
    #[error("formal variable {0} has no numeric value or derivative")]
    FormalVariable(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
