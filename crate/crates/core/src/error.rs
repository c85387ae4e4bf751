use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised across the library. Element operands are carried by name so
/// messages read in the user's vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("element `{0}` declared twice")]
    DuplicateElement(String),
    #[error("order relation makes distinct elements `{0}` and `{1}` equal")]
    AntisymmetryViolation(String, String),
    #[error("`{0}` and `{1}` are not comparable")]
    NotComparable(String, String),
    #[error("`{0}` is not {1} `{2}`")]
    WrongOrientation(String, &'static str, String),
    #[error("operation is undefined on the empty path 0")]
    ZeroPath,
    #[error("factors are not composable: {0}")]
    NotComposable(String),
    #[error("invalid support `{support}` for simplex {simplex}")]
    InvalidSupport { simplex: String, support: String },
    #[error("invalid simplex {0}: endpoints must lie below the support")]
    InvalidSimplex(String),
    #[error("simplices {0} and {1} are not adjacent")]
    NotAdjacent(String, String),
    #[error("`{z}` is not an upper bound of `{x}` and `{y}`")]
    NotAnUpperBound { x: String, y: String, z: String },
    #[error("supports {0:?} have no common upper bound")]
    NoCommonBound(Vec<String>),
    #[error("poset is not connected")]
    DisconnectedPoset,
    #[error("path {0} is not a loop")]
    NotALoop(String),
    #[error("endpoint mismatch: {0}")]
    EndpointMismatch(String),
    #[error("poset is not upward directed")]
    NotDirected,
    #[error("`{0}` is not below `{1}`")]
    NotRelated(String, String),
    #[error("`{0}` <= `{1}` <= `{2}` is not a chain")]
    NotAChain(String, String, String),
    #[error("operator leaves the window at basis indices {0:?}")]
    WindowEscape(Vec<usize>),
    #[error("word problem left {0} vs {1} unresolved")]
    UnresolvedPair(String, String),
    #[error("matrix couples blocks at entry ({0}, {1})")]
    CouplingFound(usize, usize),
    #[error("matrix entry ({0}, {1}) lies outside the block")]
    OffBlock(usize, usize),
    #[error("loop has zero homology class")]
    TrivialLoop,
    #[error("no partition block with index {0}")]
    BadBlockIndex(usize),
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("trace does not replay: {0}")]
    Replay(String),
    #[error("malformed input: {0}")]
    Format(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
