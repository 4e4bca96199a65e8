use lagsym_expr::ExprError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("Lagrangian has no dependent-variable symbol")]
    NoDependentVariable,
    #[error("Lagrangian has derivative order 0; at least one derivative is required")]
    OrderZero,
    #[error("order {requested} is below the detected order {detected}")]
    OrderTooLow { requested: u32, detected: u32 },
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("total derivative would exceed the jet order {max} (input contains `{symbol}`)")]
    JetOverflow { symbol: String, max: u32 },
    #[error("generator component depends on a derivative symbol: {0}")]
    GeneratorHasJets(String),
    #[error("expected {expected} generator components, got {got}")]
    GeneratorArity { expected: usize, got: usize },
    #[error("determining equation is not polynomial in the derivative symbols: {0}")]
    NonPolynomialJets(String),
    #[error("ansatz basis is empty")]
    EmptyAnsatz,
    #[error("symmetry candidate failed the residual check: {0}")]
    CandidateRejected(String),
    #[error("Euler-Lagrange system is not linear in the top derivatives: {0}")]
    NonlinearTop(String),
    #[error("Euler-Lagrange system cannot be solved for the top derivatives (degenerate Hessian); use numeric verification")]
    DegenerateHessian,
    #[error("numeric integration failed: {0}")]
    Integration(String),
    #[error("invalid initial data: {0}")]
    InitialData(String),
    #[error("recurrence cannot be solved for the leading shift: {0}")]
    Recurrence(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
