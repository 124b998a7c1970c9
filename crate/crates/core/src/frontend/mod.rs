//! Source language: parsing, multi-path desugaring and shape validation.

pub mod ast;
mod desugar;
mod parser;
mod validate;

use std::fmt;

pub use ast::{Assign, Cond, DistKind, Draw, Expr, IfBlock, Program, Rhs, Stmt};
pub use desugar::desugar_multipath;
pub use parser::parse;
pub use validate::{validate, APoly, Atom, PolyRhs, Step, ValidatedProgram};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// A program that parses but is not a supported loop.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("line {line}: `{var}` is assigned more than once")]
    DuplicateAssignment { var: String, line: usize },
    #[error("line {line}: `{var}` is updated in the loop but never initialized")]
    Uninitialized { var: String, line: usize },
    #[error(
        "line {line}: `{var}` reads `{referenced}`, which is assigned later; \
         mutually dependent updates are not supported"
    )]
    ForwardReference {
        var: String,
        referenced: String,
        line: usize,
    },
    #[error("line {line}: `{var}` appears nonlinearly in its own update")]
    NonlinearSelf { var: String, line: usize },
    #[error(
        "line {line}: the coefficient of `{var}` in its own update depends on `{referenced}`, \
         which carries state across iterations"
    )]
    StatefulSelfCoefficient {
        var: String,
        referenced: String,
        line: usize,
    },
    #[error("line {line}: distribution argument refers to program variable `{var}`")]
    VariableInDistribution { var: String, line: usize },
    #[error("line {line}: branch probability refers to program variable `{var}`")]
    VariableInProbability { var: String, line: usize },
    #[error("line {line}: probability {value} is outside [0, 1]")]
    ProbabilityOutOfRange { value: String, line: usize },
    #[error("line {line}: {message}")]
    InvalidDistribution { message: String, line: usize },
    #[error("line {line}: `{name}` is reserved for the loop counter and cannot be a parameter")]
    ReservedName { name: String, line: usize },
    #[error("line {line}: condition `{var}` is not an iteration-local 0/1 variable")]
    UnsupportedCondition { var: String, line: usize },
    #[error("line {line}: branches order `{first}` and `{second}` incompatibly")]
    InconsistentBranchOrder {
        first: String,
        second: String,
        line: usize,
    },
}

impl ModelError {
    pub fn line(&self) -> usize {
        match self {
            ModelError::DuplicateAssignment { line, .. }
            | ModelError::Uninitialized { line, .. }
            | ModelError::ForwardReference { line, .. }
            | ModelError::NonlinearSelf { line, .. }
            | ModelError::StatefulSelfCoefficient { line, .. }
            | ModelError::VariableInDistribution { line, .. }
            | ModelError::VariableInProbability { line, .. }
            | ModelError::ProbabilityOutOfRange { line, .. }
            | ModelError::InvalidDistribution { line, .. }
            | ModelError::ReservedName { line, .. }
            | ModelError::UnsupportedCondition { line, .. }
            | ModelError::InconsistentBranchOrder { line, .. } => *line,
        }
    }

    pub fn variant(&self) -> &'static str {
        match self {
            ModelError::DuplicateAssignment { .. } => "DuplicateAssignment",
            ModelError::Uninitialized { .. } => "Uninitialized",
            ModelError::ForwardReference { .. } => "ForwardReference",
            ModelError::NonlinearSelf { .. } => "NonlinearSelf",
            ModelError::StatefulSelfCoefficient { .. } => "StatefulSelfCoefficient",
            ModelError::VariableInDistribution { .. } => "VariableInDistribution",
            ModelError::VariableInProbability { .. } => "VariableInProbability",
            ModelError::ProbabilityOutOfRange { .. } => "ProbabilityOutOfRange",
            ModelError::InvalidDistribution { .. } => "InvalidDistribution",
            ModelError::ReservedName { .. } => "ReservedName",
            ModelError::UnsupportedCondition { .. } => "UnsupportedCondition",
            ModelError::InconsistentBranchOrder { .. } => "InconsistentBranchOrder",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrontendError {
    Parse(ParseError),
    Model(ModelError),
}

impl fmt::Display for FrontendError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrontendError::Parse(e) => write!(f, "ParseError: {e}"),
            FrontendError::Model(e) => write!(f, "ModelError::{}: {e}", e.variant()),
        }
    }
}

impl std::error::Error for FrontendError {}

impl From<ParseError> for FrontendError {
    fn from(e: ParseError) -> Self {
        FrontendError::Parse(e)
    }
}

impl From<ModelError> for FrontendError {
    fn from(e: ModelError) -> Self {
        FrontendError::Model(e)
    }
}

/// Parse, desugar and validate in one step.
pub fn load(text: &str) -> Result<ValidatedProgram, FrontendError> {
    let program = parse(text)?;
    Ok(validate(&program)?)
}
