use alloc::string::String;
use chrono::NaiveDateTime;

use crate::ingest::Field;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("training diverged at epoch {epoch}: loss is {loss}")]
    Divergence { epoch: usize, loss: f64 },

    #[error("parameter contains a non-finite value: {0}")]
    NonFinite(&'static str),

    #[error("timestamp {0} is not on a whole hour")]
    UnalignedTimestamp(NaiveDateTime),

    #[error("range end precedes start ({start} > {end})")]
    InvertedRange {
        start: NaiveDateTime,
        end: NaiveDateTime,
    },

    #[error("duplicate timestamp {timestamp} in {source_name} data")]
    DuplicateTimestamp {
        timestamp: NaiveDateTime,
        source_name: &'static str,
    },

    #[error("cannot repair {field} at {at}: no valid value within two hours")]
    UnrepairablePoint { at: NaiveDateTime, field: Field },

    #[error(
        "cannot repair gap {start} .. {end}: no valid same-hour value at {at} within two days"
    )]
    UnrepairableBlock {
        start: NaiveDateTime,
        end: NaiveDateTime,
        at: NaiveDateTime,
    },

    #[error("{count} hour(s) still missing or invalid, first at {first}")]
    ResidualGaps { count: usize, first: NaiveDateTime },

    #[error("series is not aligned to whole {0}")]
    PartialPeriod(&'static str),

    #[error("series too short: {hours} hours, need at least {needed}")]
    SeriesTooShort { hours: usize, needed: usize },

    #[error("dataset has {rows} rows, not enough history for {lags} lags")]
    InsufficientHistory { rows: usize, lags: usize },

    #[error("unknown factor `{name}` for the {scale} scale")]
    UnknownFactor { name: String, scale: &'static str },

    #[error("scale mismatch: expected {expected}, got {got}")]
    ScaleMismatch {
        expected: &'static str,
        got: &'static str,
    },

    #[error("too few rows to split: {0}")]
    TooFewRows(usize),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("line {line}: malformed date `{text}`")]
    MalformedDate { line: usize, text: String },
}
