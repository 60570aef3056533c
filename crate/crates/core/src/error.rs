use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(&'static str),

    #[error("derivative jet too short: need {needed} entries, have {available}")]
    JetTooShort { needed: usize, available: usize },

    #[error("momentum order {index} out of range for model order {order}")]
    OrderIndexOutOfRange { index: usize, order: usize },

    #[error("shape mismatch: {0}")]
    Shape(&'static str),

    #[error("need at least {needed} samples, have {available}")]
    InsufficientSamples { needed: usize, available: usize },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("no real root for the velocity component along u (discriminant {discriminant:e}); reduce the field strength or tau0")]
    NoRealRoot { discriminant: f64 },

    #[error("singular linear system")]
    Singular,

    #[error("non-finite value encountered: {0}")]
    NonFinite(&'static str),

    #[error("motion must be given in the center-of-mass frame (spatial drift momentum {0:e})")]
    NotCenterOfMass(f64),

    #[error("series truncated at {n_trunc} terms before convergence (last term {last_term:e})")]
    TruncationTooShort { n_trunc: usize, last_term: f64 },

    #[error("unknown {kind} '{tag}'")]
    UnknownTag { kind: &'static str, tag: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
