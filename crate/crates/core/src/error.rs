//! Error type shared by every module of the crate.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A matrix expected to be Hermitian deviates from its adjoint.
    #[error("matrix is not Hermitian: max |A - A†| = {deviation:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { deviation: f64, tol: f64 },

    /// A matrix expected to be positive semidefinite has a significantly
    /// negative eigenvalue.
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPsd { min_eigenvalue: f64 },

    /// The dense Hermitian eigensolver did not converge.
    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    /// Matrix/vector shapes are inconsistent.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// POVM elements do not sum to the identity.
    #[error("POVM completeness violated: max |Σ π_j - I| = {0:.3e}")]
    Completeness(f64),

    /// Parameter derivatives of a POVM do not sum to zero.
    #[error("derivative zero-sum violated: max |Σ_j ∂π_j| = {0:.3e}")]
    DerivativeSum(f64),

    /// Kraus operators do not satisfy Σ K†K = I.
    #[error("Kraus completeness violated: max |Σ K†K - I| = {0:.3e}")]
    KrausCompleteness(f64),

    /// Requested model name is not in the registry.
    #[error("unknown model name: {0}")]
    UnknownModel(String),

    /// A structural constant of a model is outside its validity range.
    #[error("invalid model constant: {0}")]
    InvalidConstant(String),

    /// A parameter value lies outside the model's domain.
    #[error("parameter out of domain: {0}")]
    Domain(String),

    /// A tensor construction would exceed the dense desk-scale cap.
    #[error("dimension cap exceeded: {0}")]
    DimensionCap(String),

    /// The Lyapunov equation L π + π L = 2 ∂π has no solution because ∂π has
    /// weight inside the kernel of π.
    #[error(
        "Lyapunov equation unsolvable: derivative has weight {0:.3e} \
         inside the kernel of the POVM element"
    )]
    KernelBlock(f64),

    /// A matrix expected to be skew-Hermitian is not.
    #[error("matrix is not skew-Hermitian: max |S + S†| = {0:.3e}")]
    NotSkew(f64),

    /// An outcome has vanishing probability but non-vanishing derivative, so
    /// the Fisher information genuinely diverges.
    #[error(
        "divergent Fisher information: outcome {outcome} has probability \
         {probability:.3e} but derivative {derivative:.3e}"
    )]
    DivergentCfi {
        outcome: usize,
        probability: f64,
        derivative: f64,
    },

    /// The Fisher matrix is singular: the probe ensemble cannot identify all
    /// parameters.
    #[error("singular Fisher matrix: min eigenvalue {0:.3e}")]
    SingularFisher(f64),

    /// A bound-ordering assertion failed.
    #[error("bound ordering violated: {0}")]
    Ordering(String),

    /// The semidefinite-program solver failed.
    #[error("SDP solver failed: {0}")]
    Sdp(String),

    /// A locally-unbiased estimator could not be constructed.
    #[error("estimator construction failed: {0}")]
    Estimator(String),

    /// Invalid run configuration (CLI, experiment config, model spec file).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// I/O failure when reading specs or writing reports.
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failure.
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
