use lagsym_core::CoreError;
use lagsym_expr::ExprError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

impl CliError {
    /// 2 for unreadable input, 3 for input that fails validation, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Invalid(_) => 3,
            CliError::Io(_) => 1,
            CliError::Expr(e) => expr_code(e),
            CliError::Core(e) => match e {
                CoreError::Expr(e) => expr_code(e),
                CoreError::Integration(_) | CoreError::Recurrence(_) | CoreError::CandidateRejected(_) => 1,
                _ => 3,
            },
        }
    }
}

fn expr_code(e: &ExprError) -> u8 {
    match e {
        ExprError::Parse { .. } | ExprError::Json(_) => 2,
        _ => 3,
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
