use thiserror::Error;

/// Errors shared by all modules.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A point (input or computed) left its domain beyond tolerance.
    #[error("domain violation ({domain}): {detail}")]
    Domain {
        domain: &'static str,
        detail: String,
    },

    /// Analytic differentiation hit the principal square-root branch cut.
    #[error("square-root branch cut at {at}")]
    Branch { at: String },

    /// A sequence limit failed its Aitken convergence certificate.
    #[error("no convergence: {context} (last {last}, previous {prev}, residual {residual:e})")]
    Convergence {
        context: String,
        prev: String,
        last: String,
        residual: f64,
    },

    /// The search budget was exhausted without a decisive answer.
    #[error("inconclusive: {0}")]
    Inconclusive(String),

    /// A map descriptor failed structural validation.
    #[error("invalid descriptor: {0}")]
    Descriptor(String),

    /// A linear system had no usable pivot.
    #[error("singular system: {0}")]
    Singular(String),
}

pub type Result<T> = core::result::Result<T, Error>;
