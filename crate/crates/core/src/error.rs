use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero {zero} lies on or outside the unit circle (|a| = {modulus})")]
    ZeroOnOrOutsideCircle { zero: Complex64, modulus: f64 },
    #[error("constant {constant} is not unimodular")]
    NotUnimodular { constant: Complex64 },
    #[error("a Blaschke product needs at least one zero")]
    ConstantInnerFunction,
    #[error("evaluation point {point} hits a pole")]
    PoleHit { point: Complex64 },
    #[error("point {point} is outside the admissible region: {reason}")]
    OutOfDomain { point: Complex64, reason: &'static str },
    #[error("quadrature did not converge within {cap} nodes (last change {last_change:e})")]
    NoConvergence { cap: usize, last_change: f64 },
    #[error("denominator has a root within {distance:e} of the unit circle")]
    PoleNearCircle { distance: f64 },
    #[error("denominator vanishes on the unit circle")]
    SingularDenominator,
    #[error("Clark eigenvalues coincide (gap {gap:e})")]
    DegenerateSpectrum { gap: f64 },
    #[error("operators act between incompatible model spaces")]
    SpaceMismatch,
    #[error("inner function is not real symmetric")]
    NotRealSymmetric,
    #[error("operator is not a truncated Toeplitz operator")]
    NotTto,
    #[error("operator is not a truncated Hankel operator")]
    NotTho,
    #[error("anchor vector has zero norm")]
    ZeroAnchor,
    #[error("matrix is singular or too ill-conditioned (condition {condition:e})")]
    Singular { condition: f64 },
    #[error("symbol recovery failed: {0}")]
    SymbolRecoveryFailed(String),
    #[error("symbol is not in the required conjugate model space (residual {residual:e})")]
    SymbolNotInClass { residual: f64 },
    #[error("no symbol certificate (rebuild residual {residual:e})")]
    NoCertificate { residual: f64 },
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("numerical linear algebra failure: {0}")]
    Linalg(String),
    #[error("identity check failed: {what} (residual {residual:e})")]
    IdentityViolation { what: &'static str, residual: f64 },
    #[error("malformed input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
