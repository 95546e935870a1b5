use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("contract violated: {0}")]
    Contract(String),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },
    #[error("invalid coupling tree: {0}")]
    Tree(String),
    #[error("invalid degeneracy spec: {0}")]
    Degeneracy(String),
    #[error("perturbation singular: {0}")]
    Singular(String),
    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
