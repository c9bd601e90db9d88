use alloc::string::String;

/// Errors reported by the library.
///
/// Infeasible designs are not errors; they are reported through
/// [`crate::designer::DesignSolution::feasible`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument violates the operation's precondition.
    #[error("invalid parameter: {0}")]
    Param(String),
    /// A scenario or waveform is internally inconsistent (e.g. the cycle
    /// does not fit within its period).
    #[error("configuration error: {0}")]
    Config(String),
    /// Serialized data could not be decoded.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! param_err {
    ($($arg:tt)*) => {
        $crate::Error::Param(alloc::format!($($arg)*))
    };
}
pub(crate) use param_err;
