use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid Cayley table: {0}")]
    TableInvalid(String),

    #[error("{what} of size {size} exceeds the configured cap {cap}")]
    SizeLimit {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("index {index} out of range for a collection of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("support is empty")]
    EmptySupport,

    #[error("operands live on different groups")]
    GroupMismatch,

    #[error("support width {width} exceeds the cap of {cap} points")]
    SupportOverflow { width: usize, cap: usize },

    /// The fast and brute-force routes to the same predicate disagreed.
    #[error("oracle disagreement: {0}")]
    OracleDisagreement(String),

    #[error("eigensolver failed: {0}")]
    EigensolverFailure(String),

    #[error("measure is not power bounded: {0}")]
    NotPowerBounded(String),

    #[error("Cesàro averages did not stabilise (residual {residual:.3e} after n = {n})")]
    CesaroNotConverged { residual: f64, n: u64 },

    #[error("group is not a recognised product of cyclic factors")]
    NotAbelian,

    #[error("custom weight evaluated at n = {n} but its table has {len} entries")]
    CustomOutOfRange { n: u64, len: usize },

    #[error("numerical weight limit inconclusive (residual {residual:.3e})")]
    Inconclusive { residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures of the numerical machinery itself, as opposed to
    /// bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::EigensolverFailure(_)
                | Error::SupportOverflow { .. }
                | Error::OracleDisagreement(_)
                | Error::CesaroNotConverged { .. }
        )
    }
}
