use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown letter '{ch}' at position {position}")]
    UnknownLetter { ch: char, position: usize },

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("word uses generator #{generator} but the alphabet has {rank} generators")]
    AlphabetMismatch { generator: usize, rank: usize },

    #[error("rotation index {index} out of range for a word of length {len}")]
    RotationOutOfRange { index: usize, len: usize },

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("no relators")]
    NoRelators,

    #[error("word problem oracle not certified: presentation fails C'(1/6)")]
    Uncertified,

    #[error("ball radius {radius} exceeds R_max = {rmax}")]
    RadiusTooLarge { radius: usize, rmax: usize },

    #[error("element length > R_max = {rmax}")]
    LengthExceeded { rmax: usize },

    #[error("element has finite order: power {power} is the identity")]
    FiniteOrder { power: usize },

    #[error("stable norm undefined for the identity")]
    Identity,

    #[error("pigeonhole cap {cap} exceeded: presentation may not be hyperbolic or constants invalid")]
    CapExceeded { cap: usize },

    #[error("degenerate certificate: {0}")]
    Degenerate(String),

    #[error("invalid constants: {0}")]
    InvalidConstants(String),

    #[error("invalid number '{0}'")]
    InvalidNumber(String),

    #[error("{0} requires a free presentation")]
    NotFree(&'static str),

    #[error("lower bound {lower} exceeds upper bound {upper}: constants are unsound for this group")]
    InconsistentBracket { lower: String, upper: String },

    #[error("sequence is not subadditive at n={n}, m={m}")]
    NotSubadditive { n: usize, m: usize },

    #[error("{0}")]
    Io(String),

    #[error("check failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
