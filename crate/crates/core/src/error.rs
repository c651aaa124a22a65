use thiserror::Error;

/// Errors raised by tree construction, distance handling and the algorithms
/// built on top of them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown taxon: {0}")]
    UnknownTaxon(String),

    #[error("taxon index {0} out of range")]
    TaxonOutOfRange(usize),

    #[error("duplicate taxon name: {0}")]
    DuplicateTaxon(String),

    #[error("invalid taxon name {0:?}: names must be non-empty and use only [A-Za-z0-9_.-]")]
    InvalidTaxonName(String),

    #[error("taxa must be distinct")]
    RepeatedTaxa,

    #[error("taxon sets differ: {0}")]
    TaxaMismatch(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid dissimilarity map: {0}")]
    InvalidMap(String),

    #[error("need at least {needed} taxa, got {got}")]
    TooFewTaxa { needed: usize, got: usize },

    #[error("edge {0} is a leaf edge; an internal edge is required")]
    LeafEdge(usize),

    #[error("edge index {0} out of range")]
    EdgeOutOfRange(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Newick(#[from] NewickError),

    #[error(transparent)]
    Phylip(#[from] PhylipError),
}

/// Malformed Newick input. `position` is the byte offset where parsing stopped.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("newick parse error at byte {position}: {message}")]
pub struct NewickError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhylipError {
    #[error("missing or invalid taxon count header")]
    BadHeader,

    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },

    #[error("row {row}, column {column}: cannot parse {token:?} as a real number")]
    BadNumber {
        row: usize,
        column: usize,
        token: String,
    },

    #[error("trailing data after {0} rows")]
    TrailingData(usize),

    #[error("entries ({0}, {1}) and ({1}, {0}) differ by {2:e}, beyond the 1e-6 symmetry tolerance")]
    Asymmetric(String, String, f64),

    #[error("diagonal entry for {0} is {1}, expected 0")]
    NonZeroDiagonal(String, f64),

    #[error(transparent)]
    Map(Box<Error>),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_name(name: &str) -> Result<()> {
    let ok = !name.is_empty()
        && name
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'.' | b'-'));
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidTaxonName(name.to_string()))
    }
}
