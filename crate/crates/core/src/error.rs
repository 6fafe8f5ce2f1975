use thiserror::Error;

/// Errors raised while building or validating a hypergraph.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HypergraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("edge {edge} has an empty {side}")]
    EmptySide { edge: usize, side: &'static str },
    #[error("vertex {name:?} has weight {weight}, weights must be at least 1")]
    WeightTooSmall { name: String, weight: u64 },
    #[error("maximum vertex weight {kappa} exceeds the vertex count {n}")]
    SkewTooLarge { kappa: u64, n: usize },
    #[error("edge {edge} has a negative weight")]
    NegativeWeight { edge: usize },
    #[error("duplicate vertex name {0:?}")]
    DuplicateVertex(String),
    #[error("vertex index {index} out of range for {n} vertices")]
    VertexOutOfRange { index: usize, n: usize },
    #[error("a hypergraph needs at least one vertex")]
    Empty,
    #[error("subset must be non-empty and proper")]
    ImproperSubset,
    #[error("expansion is undefined: the subset has zero weighted degree")]
    UndefinedExpansion,
}

/// Errors from the dense symmetric-matrix toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SdpError {
    #[error(
        "matrix is not positive semidefinite (eigenvalue {eigenvalue:e} below -{tolerance:e})"
    )]
    NotPsd { eigenvalue: f64, tolerance: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("variance precondition violated: {0}")]
    VariancePrecondition(String),
}

/// Errors from flow computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("flow conservation violated at gadget of edge {edge} (imbalance {imbalance:e})")]
    Conservation { edge: usize, imbalance: f64 },
    #[error("flow conservation violated at vertex {vertex} (imbalance {imbalance:e})")]
    VertexConservation { vertex: usize, imbalance: f64 },
}

/// Errors from a single oracle call.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("alpha must be positive, got {0}")]
    NonPositiveAlpha(f64),
    #[error("Gram state is not normalized: K•X = {0}")]
    NotNormalized(f64),
    #[error("inconsistent state: {0}")]
    InconsistentState(String),
    #[error("no separating direction found after {0} tries")]
    DirectionSearchExhausted(usize),
    #[error("no violated path found after {0} directions")]
    PathSearchExhausted(usize),
    #[error("dual width {width:e} exceeds rho {rho:e}")]
    WidthExceeded { width: f64, rho: f64 },
    #[error("cut sparsity {sparsity:e} exceeds its ratio bound {bound:e}")]
    BoundViolated { sparsity: f64, bound: f64 },
    #[error("dual certificate failed its self-check: {0}")]
    CertificateSelfCheck(String),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Sdp(#[from] SdpError),
}

/// Errors from the reference (brute-force and generator) module.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReferenceError {
    #[error("brute force is limited to {limit} vertices, got {n}")]
    TooLarge { n: usize, limit: usize },
    #[error("infeasible generator spec: {0}")]
    InfeasibleSpec(String),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
}
