use thiserror::Error;

pub type Result<T> = std::result::Result<T, KamError>;

/// Everything that can go wrong between building a model and issuing a certificate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KamError {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("strip norm overflows at rho = {rho}")]
    NormOverflow { rho: f64 },

    #[error("mode of order {order} lies beyond the verified Diophantine cutoff {cutoff}")]
    BeyondCutoff { order: usize, cutoff: usize },

    #[error("resonant frequency: k = {k:?} gives k.omega = 0")]
    Resonance { k: Vec<i64> },

    #[error("Diophantine inequality fails at k = {k:?}; largest admissible gamma is {gamma_max:.6e}")]
    NotDiophantine { k: Vec<i64>, gamma_max: f64 },

    #[error("shift of size {size:.3e} exceeds the budget {budget:.3e}")]
    ShiftBudget { size: f64, budget: f64 },

    #[error("torus sample |z| = {norm:.3e} leaves the domain of radius {radius:.3e}")]
    DomainEscape { norm: f64, radius: f64 },

    #[error("degenerate tangent frame: smallest singular value {sigma_min:.3e} below {threshold:.3e}")]
    DegenerateFrame { sigma_min: f64, threshold: f64 },

    #[error("Gram matrix condition number {cond:.3e} exceeds 1e12")]
    IllConditioned { cond: f64 },

    #[error("twist condition fails: |det <T>| = {det:.3e}")]
    Twist { det: f64 },

    #[error("finite-difference audit failed for {callable}: relative error {error:.3e}")]
    Audit { callable: String, error: f64 },

    #[error("hypothesis {name} violated: {detail}")]
    Hypothesis { name: String, detail: String },

    #[error("norms measured at rho = {measured}, delta = {measured_delta}; certificate expects rho = {expected}, delta = {expected_delta}")]
    StaleNorms {
        measured: f64,
        measured_delta: f64,
        expected: f64,
        expected_delta: f64,
    },

    #[error("moment time {time:.3e} outside the flow radius {radius:.3e}")]
    TimeOutOfRange { time: f64, radius: f64 },

    #[error("singular matrix")]
    Singular,

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for KamError {
    fn from(e: std::io::Error) -> Self {
        KamError::Io(e.to_string())
    }
}
