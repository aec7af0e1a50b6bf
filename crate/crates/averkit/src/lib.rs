//! averkit: analysis toolkit for linear averaging dynamics on weighted
//! directed graphs.
//!
//! The crate models systems of the form `x(t+1) = P_α x(t)`, where `P_α`
//! is the lazified row-stochastic matrix of a positively weighted digraph.
//! It provides:
//!
//! - graph construction, derived matrices and classification ([`graph`]);
//! - condensation into strongly connected components and sink detection
//!   ([`components`]);
//! - trajectory simulation, stationary distributions, mixing times and
//!   conductance ([`dynamics`]);
//! - asymptotic equilibria through sink influence matrices, computed by
//!   three independent routes ([`equilibrium`]);
//! - the electrical-network view: voltages, flows, effective resistances,
//!   Green matrices and monotonicity checks ([`electrical`]);
//! - polarization/homogenization diagnostics for two-community systems
//!   ([`regimes`]);
//! - seeded graph generators ([`generators`]).
//!
//! All randomized procedures take explicit seeds and are reproducible
//! regardless of thread scheduling.

pub mod components;
pub mod dynamics;
pub mod electrical;
pub mod equilibrium;
pub mod error;
pub mod generators;
pub mod graph;
pub mod regimes;
pub mod tol;

pub use components::{condense, is_connected, Condensation};
pub use error::{Error, ErrorKind, Result};
pub use graph::{
    classify, parse_edge_list, write_edge_list, Classification, DerivedMatrices, WeightedDigraph,
};

pub use nalgebra;
