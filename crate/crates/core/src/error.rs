use thiserror::Error;

/// Errors raised by the simulator and the analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("gate targets must be distinct, got {0:?}")]
    DuplicateTargets(Vec<usize>),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("Kraus set is not trace preserving (deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    #[error("invalid layer {layer}: {reason}")]
    InvalidLayer { layer: usize, reason: String },

    #[error("empty set of qubits to keep")]
    EmptyKeepSet,

    #[error("Pauli strings act on {left} and {right} qubits")]
    LengthMismatch { left: usize, right: usize },

    #[error("Pauli string {0} has an imaginary phase and is not an observable")]
    NonHermitianObservable(String),

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("cannot parse Pauli string {0:?}")]
    PauliParse(String),

    #[error("stabilizer generators are invalid: {0}")]
    InvalidGenerators(String),

    #[error("coefficients of the fifth stabilizer are not normalized (norm² = {0})")]
    UnnormalizedFifth(f64),

    #[error("logical amplitudes are not normalized (norm² = {0})")]
    UnnormalizedAmplitudes(f64),

    #[error("at most two injected errors are supported, got {0}")]
    TooManyErrors(usize),

    #[error("decoherence parameter out of range: {name} = {value}")]
    NoiseOutOfRange { name: &'static str, value: f64 },

    #[error("T2* = {t2star} s leaves no pure dephasing for T1 = {t1} s")]
    NoPureDephasing { t1: f64, t2star: f64 },

    #[error("invalid device parameters: {0}")]
    InvalidDevice(String),

    #[error("at least one shot is required")]
    NoShots,

    #[error("not a valid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("confusion matrix for qubit {0} is singular")]
    SingularConfusion(usize),

    #[error("state lies outside the code space (P_I = {0:.3e})")]
    OrthogonalToCodeSpace(f64),

    #[error("expectation value {0} outside [-1, 1]")]
    ExpectationOutOfRange(f64),

    #[error("missing tomography data for the {0} basis")]
    MissingBasis(char),

    #[error("process tomography inputs do not span the operator space")]
    DegenerateInputs,

    #[error("parameter count mismatch: template needs {expected}, got {found}")]
    ParameterCount { expected: usize, found: usize },

    #[error("snapped angles fail verification (distance {distance:.3e}); offending parameters {failed:?}")]
    SnapRejected { distance: f64, failed: Vec<usize> },

    #[error("optimizer did not reach {threshold:.1e}; best distance {best:.3e} after {restarts} restarts")]
    OptimizerExhausted { best: f64, threshold: f64, restarts: usize },

    #[error("compilation stage {stage} failed: {reason}")]
    Compile { stage: &'static str, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
