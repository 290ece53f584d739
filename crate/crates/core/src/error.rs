use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidConfig(String),

    #[error("{what} index {index} out of range (valid 0..{len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("shape mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    ShapeMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("{0} outside its domain")]
    Domain(String),

    #[error("relay {relay} is not active in segment {segment}")]
    InactiveEntry { relay: usize, segment: usize },

    #[error("negative transmit power {0} W")]
    NegativePower(f64),

    #[error("energy is zero; energy efficiency undefined")]
    ZeroEnergy,

    #[error(
        "data floor {d_min:.6e} bits exceeds the {d_max:.6e} bits deliverable at full budget"
    )]
    Infeasible { d_min: f64, d_max: f64 },

    #[error("doppler table is empty")]
    EmptyTable,

    #[error("window has {got} samples, table expects {expected}")]
    WindowLength { expected: usize, got: usize },

    #[error("table parse error on line {line}: {msg}")]
    TableParse { line: usize, msg: String },
}
