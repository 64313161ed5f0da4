//! Numerical tolerances shared across the crate.

/// Unit norm, trace and Hermiticity of states.
pub const STATE: f64 = 1e-10;
/// Smallest admissible eigenvalue of a density matrix.
pub const PSD: f64 = 1e-9;
/// Hermiticity check on eigensolver input.
pub const HERMITIAN_INPUT: f64 = 1e-9;
/// Jacobi stops once the off-diagonal Frobenius norm falls below this times the matrix norm.
pub const JACOBI: f64 = 1e-12;
/// Kraus completeness.
pub const KRAUS: f64 = 1e-12;
/// A hinge sample with |1 - y h| below this sits on the margin and contributes no gradient.
pub const HINGE_MARGIN: f64 = 1e-12;
/// AdaBoost weight vectors must sum to one within this.
pub const WEIGHTS: f64 = 1e-9;
/// Distance below which two candidate splits are considered tied.
pub const SPLIT_TIE: f64 = 1e-12;
/// Largest supported register.
pub const MAX_QUBITS: usize = 12;
