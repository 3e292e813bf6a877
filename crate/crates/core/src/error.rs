use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument {name} = {value} outside domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("exact value of {what} overflows for n = {n} (limit {limit})")]
    Overflow {
        what: &'static str,
        n: u64,
        limit: u64,
    },

    #[error(
        "series did not reach tolerance {tol:e} within {max_terms} terms (tail bound {tail:e})"
    )]
    NonConvergence {
        max_terms: usize,
        tol: f64,
        tail: f64,
    },

    #[error("quadrature tolerance {requested:e} not met after {subdivisions} subdivisions (estimate {achieved:e})")]
    ToleranceNotMet {
        requested: f64,
        achieved: f64,
        subdivisions: usize,
    },

    #[error("K(m) diverges at m = 1")]
    Divergence,

    #[error("point belongs to the {found} chart, expected the {expected} chart")]
    ChartMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("density of {group} is singular at this point of the {chart} chart (D0 = 0)")]
    SingularLocus {
        group: &'static str,
        chart: &'static str,
    },

    #[error("the diagonal group is supported on D0 = 0 only; point has D0 = {d0:e}")]
    OffSupport { d0: f64 },

    #[error("degenerate corner eps = 0 with delta0 = {delta0:e} > 0")]
    DegenerateCorner { delta0: f64 },

    #[error("closed form requires a calibrated constant: {0}")]
    CalibrationRequired(String),

    #[error("{q} is not an odd prime")]
    NotOddPrime { q: u64 },

    #[error("field size {q} exceeds the table limit {limit}")]
    FieldTooLarge { q: u64, limit: u64 },

    #[error("q = {q} exceeds the full-enumeration budget (q <= {limit})")]
    BudgetExceeded { q: u64, limit: u64 },

    #[error("{0} is not a quadratic-order discriminant (must be 0 or 1 mod 4)")]
    InvalidDiscriminant(i64),

    #[error("inconsistent Frobenius data: {0}")]
    Inconsistent(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.kind() {
            csv::ErrorKind::Io(_) => Error::Io(e.to_string()),
            _ => Error::Parse(e.to_string()),
        }
    }
}
