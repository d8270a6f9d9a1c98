//! Numerical tolerances shared by the backends and the checks.

/// Absolute eigenvalue slack for operator inequalities (`0 ≤ ρ`, `E ≤ I`,
/// `Σ K†K ≤ I`, Choi positivity).
pub const OPERATOR: f64 = 1e-9;

/// Slack for functional equalities between two evaluation routes.
pub const FUNCTIONAL: f64 = 1e-12;

/// Verdict tolerance for marginal-invariance and no-signaling checks.
pub const MARGINAL: f64 = 1e-9;

/// Verdict tolerance for the zero-probability outcome of the falsification cascade.
pub const FALSIFICATION: f64 = 1e-12;

/// Default cap on the dimension of any composite system carried during contraction.
pub const MAX_COMPOSITE_DIM: usize = 1024;
