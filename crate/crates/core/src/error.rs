use thiserror::Error;

/// Errors raised by the library. Every fallible operation returns one of these;
/// nothing in the public API panics on malformed input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("lattice is not contained in the given superlattice")]
    NotSublattice,
    #[error("index is infinite")]
    InfiniteIndex,
    #[error("matrix Q does not satisfy Q^k = I for k = {0}")]
    NotOfOrder(u64),
    #[error("letter z{letter} out of range for free rank {rank}")]
    LetterOutOfRange { letter: u32, rank: usize },
    #[error("the identity word has no root")]
    IdentityRoot,
    #[error("coset enumeration exceeded the index bound {0}")]
    IndexBoundExceeded(u64),
    #[error(
        "ambient mismatch: expected Z^{expected_m} x F_{expected_n}, got Z^{got_m} x F_{got_n}"
    )]
    AmbientMismatch {
        expected_m: usize,
        expected_n: usize,
        got_m: usize,
        got_n: usize,
    },
    #[error("free map has no inverse images")]
    MissingInverse,
    #[error("matrix is not unimodular")]
    NotUnimodular,
    #[error("supplied inverse images do not invert the free map")]
    InvalidInverse,
    #[error("word {word} is not fixed by free map {index}")]
    NotFixed { index: usize, word: String },
    #[error("fixed free-basis {0} is not free (its Stallings graph has smaller rank)")]
    NotFreeBasis(usize),
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error("free map has infinite order; a stabilization exponent must be supplied")]
    InfiniteOrder,
    #[error("morphism {index} does not fix subgroup generator {element}")]
    DoesNotFixSubgroup { index: usize, element: String },
    #[error("empty morphism tuple")]
    EmptyTuple,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
