use crate::newton::NewtonReport;

pub type Result<T> = std::result::Result<T, Error>;

/// Why a Newton solve stopped without meeting its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverFailure {
    SingularJacobian,
    MaxIterations,
    MaxHalvings,
    GuardViolated,
}

impl std::fmt::Display for SolverFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolverFailure::SingularJacobian => "singular Jacobian",
            SolverFailure::MaxIterations => "iteration limit reached",
            SolverFailure::MaxHalvings => "damping limit reached",
            SolverFailure::GuardViolated => "initial guess violates the guard",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("positivity violated at node {node} (value {value:e})")]
    Positivity { node: usize, value: f64 },

    #[error("vanishing denominator at node {node}")]
    Degenerate { node: usize },

    #[error("Newton solver failed: {reason} after {} iterations (residual {:e})", report.iterations, report.residual_norm)]
    Solver {
        reason: SolverFailure,
        report: NewtonReport,
    },

    #[error("step {step} failed: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("convergence study member with tau = {tau:e} failed: {source}")]
    Study {
        tau: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for errors caused by bad user input rather than runtime failure.
    pub fn is_usage(&self) -> bool {
        match self {
            Error::InvalidInput(_) => true,
            Error::Step { source, .. } | Error::Study { source, .. } => source.is_usage(),
            _ => false,
        }
    }
}
