use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("order out of range: {0}")]
    OrderOutOfRange(String),

    #[error("kappa = sigma - 1 is not supported (sigma = {sigma}, kappa = {kappa}); perturb kappa into the open interval")]
    BoundaryOrderUnsupported { sigma: f64, kappa: f64 },

    #[error("domain invalid: {0}")]
    DomainInvalid(String),

    #[error("quadrature failed: estimated error {error:e} exceeds tolerance {tol:e} (estimate {estimate})")]
    QuadratureFailure { estimate: f64, error: f64, tol: f64 },

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<String>,
        found: String,
    },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("t = {t} is outside the table range [{lo}, {hi}]")]
    OutOfTableRange { t: f64, lo: f64, hi: f64 },

    #[error("invalid table: {0}")]
    Table(String),

    #[error("resource limit: requested {requested}, cap is {cap}")]
    ResourceLimit { requested: usize, cap: usize },

    #[error("finite differencing unstable: estimated error {error:e} for value {value}")]
    DifferenceInstability { value: f64, error: f64 },

    #[error("eigenvalue iteration did not converge after {iterations} iterations (relative change {change:e})")]
    ConvergenceFailure { iterations: usize, change: f64 },

    #[error("lambda must be non-zero")]
    ZeroLambda,
}
