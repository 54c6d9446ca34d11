use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension {0} outside the supported range 1..={max}", max = crate::matcore::MAX_DIM)]
    InvalidDimension(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("expected {expected} entries, got {actual}")]
    EntryCount { expected: usize, actual: usize },
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not normal (residual {residual:e})")]
    NotNormal { residual: f64 },
    #[error("eigensolver failed to converge")]
    EigenFailure,
    #[error("function undefined at eigenvalue {0}")]
    UndefinedFunction(f64),
    #[error("eigenvalue {value} outside [{lo}, {hi}]")]
    SpectrumOutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("trace {0} differs from 1")]
    TraceNotOne(f64),
    #[error("POVM is empty")]
    EmptyPovm,
    #[error("POVM element {index} is not an effect: {source}")]
    PovmElement {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("POVM elements do not sum to the identity (deviation {deviation:e})")]
    PovmSum { deviation: f64 },
    #[error("conditioning event has probability {0:e}, below the zero threshold")]
    ZeroProbability(f64),
    #[error("xi0 is not unimodular: |xi0| = {0}")]
    NotUnimodular(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
