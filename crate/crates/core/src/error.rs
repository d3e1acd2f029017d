use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Pseudometric axiom named in an [`Error::AxiomViolation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    Symmetry,
    Triangle,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::Symmetry => f.write_str("symmetry"),
            Axiom::Triangle => f.write_str("triangle"),
        }
    }
}

/// Every failure the engine reports. States appear in their literal
/// syntax (`{a,b}`) so messages carry witnesses without a signature.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at column {column}: expected {expected}, found {found}")]
    Syntax {
        column: usize,
        expected: String,
        found: String,
    },
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("signature has {atoms} atoms, cap is {cap}")]
    SignatureTooLarge { atoms: usize, cap: usize },
    #[error("signature mismatch: expected [{expected}], found [{found}]")]
    SignatureMismatch { expected: String, found: String },
    #[error("inconsistent beliefs: belief state has no models")]
    InconsistentBeliefs,

    #[error("overlapping cells: cells {first} and {second} both contain {witness}")]
    OverlappingCells {
        first: usize,
        second: usize,
        witness: String,
    },
    #[error("partition is not exhaustive: {witness} is in no cell")]
    NotExhaustive { witness: String },
    #[error("cell {cell} is empty")]
    EmptyCell { cell: usize },

    #[error("faithfulness violation at {state} (rank {rank}): {reason}")]
    FaithfulnessViolation {
        state: String,
        rank: String,
        reason: String,
    },
    #[error("incomplete ranking: no rank for {missing}")]
    IncompleteRanking { missing: String },
    #[error("unsatisfiable input: {0}")]
    UnsatisfiableInput(String),
    #[error("conflicting reports: expansions of {reports} reports have empty intersection")]
    ConflictingReports { reports: usize },
    #[error("no reports given")]
    EmptyReports,

    #[error("missing distance for pair {a} {b}")]
    MissingPair { a: String, b: String },
    #[error("distance for pair {a} {b} given more than once")]
    DuplicatePair { a: String, b: String },
    #[error("nonzero self-distance for {state}")]
    NonzeroDiagonal { state: String },
    #[error("{axiom} axiom violated by {x}, {y}, {z}")]
    AxiomViolation {
        axiom: Axiom,
        x: String,
        y: String,
        z: String,
    },
    #[error(
        "threshold {threshold} is not transitive: d({x},{y}) and d({y},{z}) are within it but d({x},{z}) is not"
    )]
    ThresholdNotTransitive {
        threshold: String,
        x: String,
        y: String,
        z: String,
    },

    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("agent `{0}` declared twice")]
    DuplicateAgent(String),
    #[error("no trust entry for `{observer}` in `{reporter}`")]
    UnknownTrust { observer: String, reporter: String },
    #[error("trust entry for `{observer}` in `{reporter}` declared twice")]
    DuplicateTrust { observer: String, reporter: String },
    #[error("batch for `{target}` mixes partition and metric trust")]
    MixedTrustKinds { target: String },
    #[error("explicit order of `{0}` is stale after revision and no fallback order is declared")]
    StaleExplicitOrder(String),
    #[error("invalid directive: {0}")]
    Directive(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("in {path}: {source}")]
    InFile {
        path: String,
        #[source]
        source: Box<Error>,
    },
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_line(self, line: usize) -> Error {
        match self {
            e @ Error::AtLine { .. } => e,
            e => Error::AtLine {
                line,
                source: Box::new(e),
            },
        }
    }

    /// The underlying error with any line annotation stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtLine { source, .. } | Error::InFile { source, .. } => source.root(),
            e => e,
        }
    }
}
