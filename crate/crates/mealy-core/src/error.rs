//! Error types shared by the whole crate.

use thiserror::Error;

/// Position of a problem in a `.mealy` source text (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub col: usize,
}

impl std::fmt::Display for Position {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}, col {}", self.line, self.col)
    }
}

/// Errors raised while parsing `.mealy` text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{pos}: {msg}")]
    Syntax { pos: Position, msg: String },

    #[error("{pos}: unknown {kind} label '{label}'")]
    UnknownLabel {
        pos: Position,
        kind: &'static str,
        label: String,
    },

    #[error("{pos}: duplicate {kind} name '{label}'")]
    DuplicateName {
        pos: Position,
        kind: &'static str,
        label: String,
    },

    #[error("{pos}: duplicate transition for state {state}, letter {letter} (nondeterministic)")]
    DuplicateTransition {
        pos: Position,
        state: String,
        letter: String,
    },

    #[error("incomplete: state {state}, letter {letter}")]
    Incomplete { state: String, letter: String },
}

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("unknown builtin '{0}'")]
    UnknownBuiltin(String),

    #[error("not invertible: output map of state {state} is not a permutation")]
    NotInvertible { state: String },

    #[error("not reversible: transition map of letter {letter} is not a permutation")]
    NotReversible { letter: String },

    #[error("alphabet mismatch: {left} letters vs {right} letters")]
    AlphabetMismatch { left: String, right: String },

    #[error("invalid state index {index} (machine has {bound} states)")]
    InvalidState { index: usize, bound: usize },

    #[error("invalid letter index {index} (machine has {bound} letters)")]
    InvalidLetter { index: usize, bound: usize },

    #[error("state word must be non-empty")]
    EmptyStateWord,

    #[error("size limit exceeded: {required} states required, limit is {limit}")]
    SizeLimitExceeded { required: u128, limit: u64 },

    #[error("enumeration cap exceeded: {required} machines, cap is {cap}")]
    CapExceeded { required: u128, cap: u64 },

    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot tokenize '{input}' as a {kind} word: {reason}")]
    WordParse {
        input: String,
        kind: &'static str,
        reason: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
