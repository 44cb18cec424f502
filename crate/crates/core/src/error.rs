use thiserror::Error;

/// Errors raised by the combinatorial engine.
///
/// `Invariant` is reserved for conditions that the underlying mathematics
/// guarantees; seeing one means the implementation is wrong, not the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot compose [{f_source}]->[{f_target}] with [{g_source}]->[{g_target}]")]
    Composition {
        f_source: usize,
        f_target: usize,
        g_source: usize,
        g_target: usize,
    },

    #[error("dimension {dim} exceeds truncation bound {bound}")]
    Truncation { dim: usize, bound: usize },

    #[error("rejected input: {0}")]
    Rejected(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn rejected(msg: impl Into<String>) -> Error {
    Error::Rejected(msg.into())
}
