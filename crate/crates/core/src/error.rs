use thiserror::Error;

/// Errors raised by the analytic and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported Meijer-G pattern G^{{{m},{n}}}_{{{p},{q}}}: {reason}")]
    UnsupportedPattern {
        m: usize,
        n: usize,
        p: usize,
        q: usize,
        reason: String,
    },

    #[error("{what} did not converge (estimated error {estimate:e})")]
    NonConvergence { what: String, estimate: f64 },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("evaluation failed in {context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn no_convergence(what: impl Into<String>, estimate: f64) -> Self {
        Error::NonConvergence {
            what: what.into(),
            estimate,
        }
    }

    /// Wraps the error with the name of the hop or metric that failed.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
