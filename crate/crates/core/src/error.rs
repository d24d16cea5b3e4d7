use thiserror::Error;

pub type Result<T> = std::result::Result<T, GrauertError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrauertError {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("matrix is not symplectic (max |SᵀΩS − Ω| = {defect:e}, tol = {tol:e})")]
    NotSymplectic { defect: f64, tol: f64 },

    #[error("singular configuration: {0}")]
    SingularConfiguration(String),

    #[error("eigen-solver failure: {message}\nmatrix:\n{matrix}")]
    Numeric { message: String, matrix: String },

    #[error("unsupported symplectic class: {0}")]
    UnsupportedClass(String),

    #[error("series did not converge: partial sums at N={n} and N={n2} differ by {diff:e} (tol {tol:e})")]
    Convergence { n: usize, n2: usize, diff: f64, tol: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("eigendata covers λ ≤ {cutoff} but λ = {requested} was requested")]
    Coverage { cutoff: f64, requested: f64 },

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("insufficient accuracy: {0}")]
    Accuracy(String),

    #[error("caustic: det Y vanishes near s = {s}")]
    Caustic { s: f64 },

    #[error("Wronskian drift {drift:e} exceeds {limit:e}; reduce the step size")]
    StepSize { drift: f64, limit: f64 },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("λ = {0} is not an eigenvalue of the loaded eigendata")]
    Lookup(f64),

    #[error("internal error: {0}")]
    Internal(String),
}
