//! Numerical tolerances shared across modules.

/// Hermiticity check on input matrices: max |M - M^H| entry.
pub const HERMITIAN: f64 = 1e-9;
/// Eigensolver convergence bound on the off-diagonal Frobenius norm.
pub const EIGEN: f64 = 1e-12;
/// Smallest eigenvalue a weight matrix must exceed to count as positive definite.
pub const POSITIVE_DEFINITE: f64 = 1e-12;
/// A density matrix is accepted as positive if its smallest eigenvalue is above `-POSITIVITY`.
pub const POSITIVITY: f64 = 1e-10;
/// Eigenvalue gap below which two eigenvalues are treated as degenerate.
pub const DEGENERATE: f64 = 1e-9;
/// Spectrum values below this are clamped to zero before applying `f`.
pub const SPECTRUM_FLOOR: f64 = 1e-14;
/// Relative eigenvalue cutoff for the rank of the correlation ellipsoid.
pub const RANK: f64 = 1e-12;
/// Resolution-of-identity check for rank-one POVMs.
pub const POVM: f64 = 1e-10;
/// Angle (rad) beyond which an optimum is considered off every principal axis.
pub const CROSSOVER_ANGLE: f64 = 0.05;
/// Spectral gap below which the Hessian divided difference uses the second derivative.
pub const NEAR_DEGENERATE_SPECTRUM: f64 = 1e-8;

/// Runtime-overridable subset of the tolerances above.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub hermitian: f64,
    pub positivity: f64,
    pub degenerate: f64,
    pub crossover_angle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: HERMITIAN,
            positivity: POSITIVITY,
            degenerate: DEGENERATE,
            crossover_angle: CROSSOVER_ANGLE,
        }
    }
}
