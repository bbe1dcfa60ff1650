use thiserror::Error;

/// Errors raised by the numeric kernels, circuit builders and optimizer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix entries must be finite (first offender at ({row}, {col}))")]
    NonFinite { row: usize, col: usize },

    #[error("expected {expected} entries, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("matrix is not Hermitian: ||H - H^dagger||_F = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary: ||U^dagger U - I||_F = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not antisymmetric at ({row}, {col}): {upper} vs {lower}")]
    NotAntisymmetric {
        row: usize,
        col: usize,
        upper: f64,
        lower: f64,
    },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("numeric overflow in {context}")]
    NumericOverflow { context: &'static str },

    #[error("qubit count {n} outside supported range {min}..={max}")]
    QubitRange { n: usize, min: usize, max: usize },

    #[error("dimension {dim} is not a power of two in 2..=128")]
    NotPowerOfTwo { dim: usize },

    #[error("parameter layout error in {block}: expected {expected}, got {got}")]
    Layout {
        block: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("theta_lambda[{index}] = {value} is too close to a cotangent singularity")]
    Singularity { index: usize, value: f64 },

    #[error("entry ({row}, {col}) = {value} is not a sign value in {{-1, 0, 1}}")]
    NotSignPattern { row: usize, col: usize, value: f64 },

    #[error("exhaustive canonical search supports N <= {max}, got N = {dim}; use the variational circuit instead")]
    SearchTooLarge { dim: usize, max: usize },

    #[error("loss evaluated to NaN at parameters {point:?}")]
    NanLoss { point: Vec<f64> },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
