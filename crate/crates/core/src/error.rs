//! Error types shared across the library.
//!
//! Errors fall into two classes: plain validation failures (malformed input,
//! size mismatches, caps exceeded) and theorem-precondition rejections, which
//! signal that an input is numerically valid but cannot originate from the
//! kind of state a reconstruction theorem requires. Front ends map the two
//! classes to distinct exit codes.

use thiserror::Error;

/// Coarse classification used to pick process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed or out-of-contract input.
    Validation,
    /// Input is well formed but violates a theorem precondition
    /// (e.g. a spectrum that no pure state can produce).
    TheoremPrecondition,
}

#[derive(Debug, Error)]
pub enum PauliError {
    #[error("qubit count mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("qubit count {n} exceeds dense-matrix cap {cap}")]
    DenseCapExceeded { n: usize, cap: usize },
    #[error("invalid Pauli label {0:?}: expected characters from IXYZ")]
    BadLabel(String),
    #[error("qubit count must be in 1..={max}, got {0}", max = 64)]
    BadQubitCount(usize),
}

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max asymmetry {dev:.3e})")]
    NotHermitian { dev: f64 },
    #[error("Jacobi eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),
}

#[derive(Debug, Error)]
pub enum StateError {
    #[error("state vector has norm {0}, expected 1")]
    NotNormalized(f64),
    #[error("density matrix trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("density matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("density matrix has negative eigenvalue {0:.3e}")]
    NotPositive(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operation requires local dimension 2, got {0}")]
    QubitsOnly(usize),
    #[error("operation requires a pure state")]
    PureRequired,
    #[error("qubit count {n} exceeds cap {cap} for this operation")]
    CapExceeded { n: usize, cap: usize },
    #[error("weight {j} out of range 0..={n}")]
    WeightOutOfRange { j: usize, n: usize },
    #[error("party index {0} out of range 1..={1}")]
    BadParty(usize, usize),
    #[error("Bloch coefficient for {label} has imaginary residue {dev:.3e}")]
    NonRealCoefficient { label: String, dev: f64 },
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Error)]
pub enum InversionError {
    #[error("flip vector has norm {0}, expected 1")]
    FlipVecNotUnit(f64),
    #[error("local dimension must be at least 2, got {0}")]
    BadLocalDimension(usize),
    #[error("weight components: expected {expected} matrices (weights 0..=n), got {got}")]
    BadComponentCount { expected: usize, got: usize },
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Debug, Error)]
pub enum ReconError {
    #[error("operation requires a state on an odd number of qubits, got n = {0}")]
    OddNRequired(usize),
    #[error("operation requires a state on an even number of qubits, got n = {0}")]
    EvenNRequired(usize),
    #[error("input produced from a mixed state (purity {0})")]
    MixedInput(f64),
    #[error("spectrum incompatible with {expected}: {details}")]
    SpectrumMismatch { expected: &'static str, details: String },
    #[error("alpha = 1 class: the even correlations are unconstrained by P_o = 0")]
    AlphaOneUnconstrained,
    #[error("eigenvalue degeneracy: {0}")]
    Degenerate(String),
    #[error("input is not even-only: odd-weight Bloch mass {0:.3e}")]
    NotEvenOnly(f64),
    #[error("no phase satisfies the odd-parity constraint within tolerance (residual {0:.3e})")]
    ParityConstraintUnsatisfied(f64),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("no Pauli strings with parity {parity} and weight <= {max_body} on {n} qubits")]
    EmptyTermSet { parity: &'static str, max_body: usize, n: usize },
    #[error("Hamiltonian must contain odd-weight terms only")]
    OddOnlyRequired,
    #[error("observable has mixed weight parity; parity assertions do not apply")]
    MixedParityObservable,
    #[error("time grid must be strictly increasing")]
    BadTimeGrid,
    #[error("propagator lost unitarity (deviation {0:.3e})")]
    UnitarityLoss(f64),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Error)]
pub enum BisepError {
    #[error("biseparability scan requires odd n >= 3, got {0}")]
    BadPartyCount(usize),
    #[error("term {label} has weight {weight}: only odd weights <= n-2 are admissible")]
    ForbiddenWeight { label: String, weight: usize },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse failure: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("file contains a non-finite number")]
    NonFinite,
    #[error("state file: {0}")]
    BadStateFile(String),
    #[error("bloch file: {0}")]
    BadBlochFile(String),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Top-level error for callers that do not care about the module of origin.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Inversion(#[from] InversionError),
    #[error(transparent)]
    Recon(#[from] ReconError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Bisep(#[from] BisepError),
    #[error(transparent)]
    Io(#[from] IoError),
}

impl Error {
    /// Classify for exit-code mapping: theorem-precondition rejections are the
    /// reconstruction-level "this cannot come from a pure state" failures, all
    /// other errors are validation failures.
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Recon(
                ReconError::SpectrumMismatch { .. }
                | ReconError::AlphaOneUnconstrained
                | ReconError::Degenerate(_)
                | ReconError::NotEvenOnly(_)
                | ReconError::ParityConstraintUnsatisfied(_)
                | ReconError::MixedInput(_),
            ) => ErrorClass::TheoremPrecondition,
            _ => ErrorClass::Validation,
        }
    }
}
