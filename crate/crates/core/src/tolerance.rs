//! Default numerical tolerances.

/// Max-entry Hermiticity defect accepted before an input is rejected.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Smallest eigenvalue allowed below zero in PSD checks.
pub const PSD_TOL: f64 = 1e-9;

/// Default tolerance for validity, covariance and constraint checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Projection residual above which coefficient extraction refuses an input.
pub const COVARIANCE_TOL: f64 = 1e-9;
