//! Crate-wide error type.
//!
//! Every fallible operation returns [`Error`]. Variants are grouped by the
//! way a caller is expected to react, exposed through [`Error::kind`]:
//! input problems ([`ErrorKind::Parse`]), violated structural preconditions
//! ([`ErrorKind::Gate`]) and numerical failures ([`ErrorKind::Numeric`]).

use thiserror::Error;

/// Coarse classification of an [`Error`], used by callers (notably the CLI)
/// to map failures onto exit codes and recovery strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed textual input (edge lists, initial-condition specs).
    Parse,
    /// A numerical procedure failed or exceeded its budget.
    Numeric,
    /// A structural precondition on the graph does not hold.
    Gate,
}

#[derive(Debug, Error)]
pub enum Error {
    // ---- graph construction ----
    #[error("edge ({src}, {dst}) has non-positive weight {weight}")]
    NegativeWeight { src: usize, dst: usize, weight: f64 },

    #[error("duplicate edge ({src}, {dst})")]
    DuplicateEdge { src: usize, dst: usize },

    #[error("node {node} out of range for graph of {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("node {node} has zero out-degree; add a self-loop first")]
    ZeroOutDegree { node: usize },

    #[error("alpha must lie in [0, 1), got {alpha}")]
    InvalidAlpha { alpha: f64 },

    #[error("graph with {n} nodes exceeds the dense-matrix limit of {max}")]
    TooLargeForDense { n: usize, max: usize },

    // ---- textual input ----
    #[error("line {line}: {message}")]
    ParseEdgeList { line: usize, message: String },

    #[error("invalid initial-condition spec: {message}")]
    ParseInitialCondition { message: String },

    // ---- spectral / dynamics ----
    #[error("graph is not strongly connected")]
    NotConnected,

    #[error("chain did not mix within {cap} steps")]
    MixingCapExceeded { cap: usize },

    #[error("exhaustive cut enumeration limited to {max} nodes, got {n}")]
    TooLargeForExhaustive { n: usize, max: usize },

    // ---- linear solves / Monte Carlo ----
    #[error("linear system is singular")]
    SingularSystem,

    #[error("random walk exceeded {cap} steps without absorption")]
    MonteCarloCapExceeded { cap: usize },

    // ---- electrical-network preconditions ----
    #[error("graph is disconnected")]
    Disconnected,

    #[error("asymmetric weight pair between nodes {i} and {j}")]
    NotUndirected { i: usize, j: usize },

    #[error("node {node} appears in more than one glue group")]
    OverlappingGroups { node: usize },

    #[error("node sets must be non-empty and disjoint")]
    BadNodeSets,

    #[error("Laplacian spectrum is ill-conditioned: eigenvalue {eigenvalue:.3e} below cutoff")]
    IllConditioned { eigenvalue: f64 },

    // ---- structured two-community graphs ----
    #[error("invalid block structure: {0}")]
    InvalidBlockStructure(String),

    #[error("symmetrized graph is disconnected")]
    ModifiedGraphDisconnected,

    #[error("community generation failed to produce connected parts in {attempts} attempts")]
    ConnectivityRetriesExhausted { attempts: u32 },
}

impl Error {
    /// Which broad failure class this error belongs to.
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            NegativeWeight { .. }
            | DuplicateEdge { .. }
            | NodeOutOfRange { .. }
            | ParseEdgeList { .. }
            | ParseInitialCondition { .. } => ErrorKind::Parse,

            ZeroOutDegree { .. }
            | InvalidAlpha { .. }
            | NotUndirected { .. }
            | Disconnected { .. }
            | NotConnected
            | OverlappingGroups { .. }
            | BadNodeSets
            | InvalidBlockStructure(_)
            | ModifiedGraphDisconnected => ErrorKind::Gate,

            TooLargeForDense { .. }
            | MixingCapExceeded { .. }
            | TooLargeForExhaustive { .. }
            | SingularSystem
            | MonteCarloCapExceeded { .. }
            | IllConditioned { .. }
            | ConnectivityRetriesExhausted { .. } => ErrorKind::Numeric,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
