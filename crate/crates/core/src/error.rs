use crate::state::Representation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("occupations {occupations:?} sum to {found}, expected {expected}")]
    OccupationMismatch {
        occupations: [usize; 3],
        expected: usize,
        found: usize,
    },
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("expected a state in the {expected:?} representation, got {found:?}")]
    RepresentationMismatch {
        expected: Representation,
        found: Representation,
    },
    #[error("particle number mismatch: {left} vs {right}")]
    ParticleNumberMismatch { left: usize, right: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("state vector has zero norm")]
    ZeroNorm,
    #[error("mode matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("eigendecomposition did not converge")]
    EigenFailure,
    #[error("probability {value} outside [0, 1]")]
    ProbabilityOutOfRange { value: f64 },
    #[error("particle number {n} is not a multiple of three")]
    OffComb { n: usize },
    #[error("cattiness never reaches {target} (best {best})")]
    TargetUnreachable { target: f64, best: f64 },
    #[error("cattiness does not peak inside the sampled bracket")]
    NoPeakInBracket,
    #[error("{0}")]
    InvalidArgument(String),
}
