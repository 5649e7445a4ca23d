use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("incompatible operands: {0}")]
    Incompatible(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("invalid algebra definition: {0}")]
    InvalidAlgebra(String),

    #[error("identity axiom violated: {0}")]
    IdentityAxiom(String),

    #[error("declared flag `{flag}` violated: {witness}")]
    FlagViolated { flag: String, witness: String },

    #[error("denominator {denominator} is divisible by p = {prime}; choose another prime")]
    BadPrime { prime: u64, denominator: i64 },

    #[error("candidate vector {index} is not in the kernel: row {row} evaluates to {value}")]
    NotInKernel { index: usize, row: usize, value: String },

    #[error("certificate inconclusive: kernel dimension in [{lower}, {upper}]")]
    Inconclusive { lower: usize, upper: usize },

    #[error("empty module: all sector dimensions are zero")]
    EmptyModule,

    #[error("hom fails intertwining: {0}")]
    NotIntertwining(String),

    #[error("not an idempotent: {0}")]
    NotIdempotent(String),

    #[error("degenerate Dirac: points at infinite distance")]
    DegenerateDirac,

    #[error("power iteration did not converge: residual {residual:e}")]
    NoConvergence { residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
