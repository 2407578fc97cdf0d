use thiserror::Error;

/// Errors raised by the algebra layers and the analysis pipeline.
///
/// Variants documented as "arithmetic bug" can only be produced when an
/// identity that always holds mathematically fails to hold in the computed
/// result; they are surfaced rather than swallowed so the pipeline can report
/// an internal inconsistency.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("operands belong to different parameter sets")]
    ParamsMismatch,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("element is not central")]
    NotCentral,

    /// arithmetic bug
    #[error("element is not divisible by p")]
    NotDivisibleByP,

    #[error("relation [u{i}, u{j}] = omega({i},{j}) violated, residual {residual}")]
    RelationViolation { i: usize, j: usize, residual: String },

    /// arithmetic bug
    #[error("obstruction entry c({i},{j}) is not central")]
    CentralityViolation { i: usize, j: usize },

    #[error("2-form is not closed; d(F) = {0}")]
    NotClosed(String),

    #[error("differential equation in direction {index} has no polynomial solution")]
    NoSolution { index: usize },

    #[error("estimated term count {estimate} exceeds budget {budget}")]
    ResourceLimit { estimate: u128, budget: u128 },

    #[error("syntax error at line {line}, column {col}: expected {expected}")]
    SyntaxError {
        line: usize,
        col: usize,
        expected: String,
    },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("generator must only involve one commuting half of the variables")]
    NotInCommutingHalf,

    #[error("matrix family is not the image of a ring homomorphism: {0}")]
    NotAHomomorphism(String),

    #[error("basis decomposition failed: {0}")]
    SolveFailure(String),

    #[error("invalid input file: {0}")]
    Input(String),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::RelationViolation { .. } | Error::NotInCommutingHalf => 2,
            Error::ResourceLimit { .. } => 3,
            Error::NotDivisibleByP
            | Error::NoSolution { .. }
            | Error::CentralityViolation { .. }
            | Error::NotCentral
            | Error::NotClosed(_)
            | Error::NotAHomomorphism(_)
            | Error::SolveFailure(_)
            | Error::InternalInconsistency(_) => 4,
            Error::DivisionByZero
            | Error::ParamsMismatch
            | Error::InvalidParams(_)
            | Error::SyntaxError { .. }
            | Error::UnknownVariable(_)
            | Error::Input(_) => 1,
        }
    }

    /// Short stable name of the variant, used in JSON error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "DivisionByZero",
            Error::ParamsMismatch => "ParamsMismatch",
            Error::InvalidParams(_) => "InvalidParams",
            Error::NotCentral => "NotCentral",
            Error::NotDivisibleByP => "NotDivisibleByP",
            Error::RelationViolation { .. } => "RelationViolation",
            Error::CentralityViolation { .. } => "CentralityViolation",
            Error::NotClosed(_) => "NotClosed",
            Error::NoSolution { .. } => "NoSolution",
            Error::ResourceLimit { .. } => "ResourceLimit",
            Error::SyntaxError { .. } => "SyntaxError",
            Error::UnknownVariable(_) => "UnknownVariable",
            Error::NotInCommutingHalf => "NotInCommutingHalf",
            Error::NotAHomomorphism(_) => "NotAHomomorphism",
            Error::SolveFailure(_) => "SolveFailure",
            Error::Input(_) => "Input",
            Error::InternalInconsistency(_) => "InternalInconsistency",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
