use thiserror::Error;

use crate::events::Event;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The exponent of the factor left the double-precision range (|g(h)| > 700)
    /// or the displacement itself was not finite.
    #[error("capitalization factor out of range at h = {h} (exponent {exponent})")]
    Range { h: f64, exponent: f64 },

    #[error("invalid factor specification: {0}")]
    InvalidFactor(String),

    #[error("event {0} is not invertible (zero capital)")]
    NotInvertible(Event),

    #[error("center not invertible: {0} has zero capital")]
    CenterNotInvertible(Event),

    #[error("product of an empty list of events")]
    EmptyProduct,

    #[error("unsupported tangent direction ({dt}, {dh}, {dc}); only (1, 1, c0*delta_f(h0)) is supported")]
    UnsupportedTangent { dt: f64, dh: f64, dc: f64 },

    #[error("unknown law id `{id}`; available: {}", available.join(", "))]
    UnknownLaw { id: String, available: Vec<String> },

    #[error("invalid event literal `{0}`: expected `t,h,c`")]
    EventLiteral(String),
}
