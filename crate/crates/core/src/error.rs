//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Unknown catalog name; the message lists the valid ones.
    #[error("unknown lattice `{0}`; valid names: {1}")]
    UnknownLattice(String, String),

    /// Barnes-Wall construction outside the supported range 2 <= k <= 5.
    #[error("unsupported Barnes-Wall parameter k={0} (supported: 2..=5)")]
    UnsupportedDimension(u32),

    /// An argument violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A computation would exceed its configured resource budget.
    #[error("resource budget exceeded: {0}")]
    Resource(String),

    /// A precondition tied to certificates (e.g. design certificates must
    /// pass before a series identity may be asserted) failed.
    #[error("precondition not met: {0}")]
    Precondition(String),

    /// Malformed lattice file or dump.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
