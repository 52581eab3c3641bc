//! Numerical tolerances shared by every module.
//!
//! Property tests and the verification suites read these values instead of
//! hard-coding their own.

/// Unit-norm check for pure states.
pub const NORM: f64 = 1e-12;
/// Hermiticity of density matrices (max entry deviation).
pub const HERMITIAN: f64 = 1e-12;
/// Unit trace of density matrices.
pub const TRACE: f64 = 1e-12;
/// Smallest eigenvalue accepted for a density matrix.
pub const EIGENVALUE: f64 = -1e-10;
/// Slack on |b| <= 1 for Bloch vectors.
pub const BLOCH_RADIUS: f64 = 1e-10;
/// Overlap accepted between supposedly orthogonal basis states.
pub const ORTHOGONAL: f64 = 1e-10;
/// Band around a polytope surface counted as "on surface".
pub const SURFACE: f64 = 1e-9;
/// Residual accepted for a line/polytope intersection parameter.
pub const INTERSECTION: f64 = 1e-10;
/// Matching tolerance for common intersection parameters.
pub const COMMON_T: f64 = 1e-8;
/// Allowed spread between the reference levels of a broadcaster.
pub const REFERENCE_LEVEL: f64 = 1e-8;
/// Magic equality for perfect broadcasting checks.
pub const MAGIC_EQUAL: f64 = 1e-9;
/// Max deviation of U^dagger U from the identity.
pub const UNITARY: f64 = 1e-10;
/// Normalisation of superposition coefficients.
pub const COEFFICIENTS: f64 = 1e-10;
/// Amplitude magnitude below which an entry counts as zero.
pub const AMPLITUDE_ZERO: f64 = 1e-9;
