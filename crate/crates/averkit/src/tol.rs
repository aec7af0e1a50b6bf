//! Numerical tolerances and size limits used across the crate.
//!
//! Two regimes are distinguished. Identities that hold exactly in
//! arithmetic (row sums of a stochastic matrix, symmetry of a weight
//! matrix that was built symmetrically) are checked against
//! [`EXACT_IDENTITY`]. Quantities produced by a linear solve, an
//! eigendecomposition or an iteration (voltages, resistances, influence
//! matrices) accumulate rounding error and are compared with [`SOLVED`].
//! Functions that need a different trade-off accept an explicit tolerance
//! and use these constants only as defaults.

/// Default tolerance for exact linear identities.
pub const EXACT_IDENTITY: f64 = 1e-12;

/// Default tolerance for quantities obtained from linear solves.
pub const SOLVED: f64 = 1e-9;

/// Convergence threshold (l1 change per step) for stationary-distribution
/// power iteration.
pub const POWER_ITERATION: f64 = 1e-12;

/// Largest graph for which dense derived matrices are materialized.
pub const DENSE_LIMIT: usize = 2048;

/// Largest graph for which cuts are enumerated exhaustively.
pub const EXHAUSTIVE_CUT_LIMIT: usize = 24;

/// Default step budget for mixing-time computation and random walks.
pub const STEP_CAP: usize = 1_000_000;

/// Eigenvalues of a connected Laplacian below this cutoff (beyond the
/// structural zero) indicate an ill-conditioned spectrum.
pub const EIGENVALUE_CUTOFF: f64 = 1e-10;
