use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("polynomial is not squarefree")]
    NotSquarefree,

    #[error("precision exhausted at p = {p}: no certified answer up to p^{reached}")]
    Precision { p: BigInt, reached: u32 },

    #[error("ambiguous local type at p = {prime}: candidates {candidates:?}")]
    Ambiguous { prime: u64, candidates: Vec<String> },

    #[error("unclassified 2-adic type, fingerprint {0}")]
    UnclassifiedTwoAdic(String),

    #[error("unclassified wild regime: valuation {0}")]
    UnclassifiedWildRegime(u32),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("external-reference case: {0}")]
    ExternalReference(String),

    #[error("character order {order} is not prime to {ell}")]
    OrderNotPrimeToEll { order: u64, ell: u64 },

    #[error("inconsistent local data: {0}")]
    Inconsistent(String),

    #[error("not exceptional: {0}")]
    NotExceptional(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("at p = {prime}: {source}")]
    AtPrime {
        prime: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at_prime(self, prime: u64) -> Error {
        match self {
            e @ Error::AtPrime { .. } => e,
            e => Error::AtPrime {
                prime,
                source: Box::new(e),
            },
        }
    }

    /// Strips any `AtPrime` wrapping.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtPrime { source, .. } => source.root(),
            e => e,
        }
    }

    pub fn is_external_reference(&self) -> bool {
        matches!(self.root(), Error::ExternalReference(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
