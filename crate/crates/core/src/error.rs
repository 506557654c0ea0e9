use thiserror::Error;

/// Errors raised by the workbench operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("insufficient grid: {0}")]
    InsufficientGrid(String),
    #[error("potential pole at distance {distance:e} from a center")]
    PotentialPole { distance: f64 },
    #[error("Dirac string: point lies on the string of center {center}")]
    DiracString { center: usize },
    #[error("indefinite triple: {0}")]
    IndefiniteTriple(String),
    #[error("unnormalized triple: |Q - I| = {deviation:e}")]
    UnnormalizedTriple { deviation: f64 },
    #[error("singular metric")]
    SingularMetric,
    #[error("degenerate base triple")]
    DegenerateBase,
    #[error("need at least {needed} usable samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("degenerate linear system (determinant {det:e})")]
    DegenerateSystem { det: f64 },
    #[error("z0 = 0: evaluate limit separately")]
    ZeroSpectralParameter,
    #[error("zeta = 0 is not in the chart")]
    ZeroZeta,
    #[error("coincident centers {0} and {1}")]
    CoincidentCenters(usize, usize),
    #[error("inconsistent fiber parameters: {0}")]
    InconsistentFiber(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
