use thiserror::Error;

/// Errors raised by the geometric and numerical parts of the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point {point:?} lies outside chart {chart} box")]
    OutsideChart { chart: usize, point: [f64; 4] },
    #[error("chart index {0} out of range")]
    NoSuchChart(usize),
    #[error("metric is degenerate at {point:?}")]
    DegenerateMetric { point: [f64; 4] },
    #[error("tensor valence mismatch: {left} vs {right}")]
    Shape { left: usize, right: usize },
    #[error("integrals are only offered on compact atlases ({0} is not compact)")]
    NonCompact(String),
    #[error("integrand evaluated to {value} at {point:?} in chart {chart}")]
    Evaluation {
        chart: usize,
        point: [f64; 4],
        value: f64,
    },
    #[error("soliton constant {0} is not positive; only shrinking candidates are analysed")]
    NotShrinking(f64),
    #[error("candidate must be normalized to rho = 1/2 (got {0})")]
    NormalizationRequired(f64),
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error("unknown zoo metric `{0}`")]
    UnknownMetric(String),
    #[error("`{0}` is a reference record only and has no atlas")]
    ReferenceOnly(String),
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: String,
        value: f64,
        reason: String,
    },
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;
