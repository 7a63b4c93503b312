use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("pair ({0}, {1}) is an edge of the graph")]
    PairIsEdge(usize, usize),
    #[error("pair ({0}, {1}) is not an edge of the graph")]
    NotAnEdge(usize, usize),
    #[error("graph is not chordal")]
    NotChordal,
    #[error("ordering is not a permutation of the vertices")]
    InvalidOrdering,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("empty index set or data table")]
    Empty,
    #[error("shape parameter must be positive, got {0}")]
    InvalidDelta(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("PD-completion did not converge after {iterations} iterations (residual {residual:e})")]
    CompletionNotConverged { iterations: usize, residual: f64 },
    #[error("quadrature did not converge within {panels} panels (estimated relative error {rel_error:e})")]
    QuadratureNotConverged { panels: usize, rel_error: f64 },
    #[error("complement block is empty for a complete graph")]
    CompleteGraph,
    #[error("degenerate Monte Carlo sample: {0}")]
    DegenerateSample(&'static str),
}
