use thiserror::Error;

pub type Result<T> = std::result::Result<T, SsrError>;

#[derive(Debug, Error)]
pub enum SsrError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max |H - H^dagger| = {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("invalid density operator: {0}")]
    InvalidState(String),

    #[error("negative eigenvalue {value:.3e} below clamp window")]
    NegativeEigenvalue { value: f64 },

    #[error("invalid subsystem selection: {0}")]
    InvalidSubsystem(String),

    #[error("unknown group kind `{0}`")]
    UnknownGroup(String),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),

    #[error("multiplicity of irrep {irrep} is not an integer (residual {residual:.3e})")]
    NonIntegerMultiplicity { irrep: usize, residual: f64 },

    #[error("irrep {0} is not one-dimensional")]
    NotOneDimensional(usize),

    #[error("intertwiner search for irrep {irrep} stayed ambiguous after {attempts} attempts")]
    AmbiguousIntertwiner { irrep: usize, attempts: usize },

    #[error("twirl kind `{0}` needs a bipartite split on the representation")]
    MissingSplit(&'static str),

    #[error("invalid charge operator: {0}")]
    InvalidCharge(String),

    #[error("probabilities sum to {0} instead of 1")]
    ProbabilitySum(f64),

    #[error("({mu}, {mu_bar}) is not a conjugate couple for beta = {beta}")]
    NotConjugate { mu: usize, mu_bar: usize, beta: usize },

    #[error("flavor index out of range: {0}")]
    FlavorOutOfRange(String),

    #[error("state is not globally symmetric (residual {0:.3e})")]
    NotSymmetric(f64),

    #[error("expected a pure state")]
    NotPure,

    #[error("unknown resource functional `{0}`")]
    UnknownFunctional(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid spec file: {0}")]
    Spec(String),
}
