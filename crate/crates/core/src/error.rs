use alloc::boxed::Box;

/// Errors raised by the operators, samplers and estimators in this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("{what} is outside its admissible range")]
    OutOfRange { what: &'static str },
    /// A parameter violates a domain bound; `rule` names the bound.
    #[error("{param} = {value} violates {rule} (bound {bound})")]
    Domain { param: &'static str, value: f64, bound: f64, rule: &'static str },
    #[error("result overflows: log magnitude {log_value}")]
    Overflow { log_value: f64 },
    #[error("quadrature did not converge after {nodes} nodes (last delta {last_delta:e})")]
    QuadratureNotConverged { nodes: usize, last_delta: f64 },
    #[error("tail integral diverges: {0}")]
    TailDivergence(&'static str),
    #[error("hypergeometric kernel is not integrable at argument one")]
    HypergeometricNonConvergent,
    #[error("series did not converge within {terms} terms")]
    NonConvergence { terms: usize },
    #[error("function is not declared differentiable to order {order}")]
    NonDifferentiable { order: u32 },
    #[error("no beta proposal exists for zeta = {zeta} at p = {p}")]
    ProposalDomain { zeta: f64, p: usize },
    #[error("chain parameter {index} = {value} is outside the matrix-beta domain")]
    ChainDomain { index: usize, value: f64 },
    #[error("moment diverges: {0}")]
    MomentDivergence(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("variable {index}: {source}")]
    Variable { index: usize, source: Box<Error> },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

impl Error {
    pub(crate) fn at_variable(self, index: usize) -> Self {
        Error::Variable { index, source: Box::new(self) }
    }

    /// The error with any variable context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Variable { source, .. } => source.root(),
            e => e,
        }
    }
}

/// Fails with [`Error::Domain`] unless `value > bound`.
pub(crate) fn require_gt(param: &'static str, value: f64, bound: f64, rule: &'static str) -> Result<()> {
    if value > bound && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { param, value, bound, rule })
    }
}
