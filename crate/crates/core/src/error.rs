use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("number of variables {0} exceeds the supported maximum of 16")]
    TooManyVars(usize),
    #[error("expected {expected} hex digits for {num_vars} variables, found {found}")]
    HexLength {
        num_vars: usize,
        expected: usize,
        found: usize,
    },
    #[error("invalid hex digit {0:?}")]
    HexDigit(char),
    #[error("unused high bits must be zero for a {0}-variable table")]
    HexPadding(usize),
    #[error("minterm {minterm} out of range for {num_vars} variables")]
    MintermOutOfRange { minterm: usize, num_vars: usize },
    #[error("variable count mismatch: {0} vs {1}")]
    VarCountMismatch(usize, usize),
    #[error("invalid cube character {0:?}")]
    CubeChar(char),
    #[error("cube masks overlap or exceed the variable count (pos {pos:#x}, neg {neg:#x})")]
    CubeMasks { pos: u16, neg: u16 },
    #[error("cube {word:?} has length {found}, expected {expected}")]
    CubeLength {
        word: String,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {message}")]
    EsopFile { line: usize, message: String },
    #[error("empty clause")]
    EmptyClause,
    #[error("literal refers to unallocated variable {var} (allocated: {allocated})")]
    UnallocatedVar { var: u32, allocated: u32 },
    #[error("clause contains both polarities of variable {0}")]
    Tautology(u32),
    #[error("XOR constraint mentions variable {0} twice")]
    DuplicateXorVar(u32),
    #[error("conflict limit must be positive")]
    ZeroConflictLimit,
    #[error("malformed DIMACS input at line {line}: {message}")]
    Dimacs { line: usize, message: String },
    #[error("external solver: {0}")]
    ExternalSolver(String),
    #[error("no ESOP with {0} terms exists for this function")]
    NotRealizable(usize),
    #[error("term count must be at least 1")]
    ZeroTerms,
    #[error(transparent)]
    Io(#[from] io::Error),
}
