use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure mode of the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not a projection: |P^2 - P|_F = {residual:e} exceeds {bound:e}")]
    NotAProjection { residual: f64, bound: f64 },
    #[error("non-finite entry in {0}")]
    NonFiniteEntry(&'static str),
    #[error("iteration did not converge: {0}")]
    ConvergenceFailure(String),
    #[error("matrix exponential would overflow (|At|_1 = {norm:e})")]
    OverflowRisk { norm: f64 },
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("signal evaluated at t = {t} outside [0, {horizon}]")]
    SignalDomainError { t: f64, horizon: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("smoothing width {width} too wide: pulses would merge or leave the horizon")]
    SmoothingTooWide { width: f64 },

    #[error("matrix is not diagonalizable (minimum eigenvalue gap {gap:e})")]
    NotDiagonalizable { gap: f64 },
    #[error("zero eigenvalue (|lambda| = {modulus:e})")]
    ZeroEigenvalue { modulus: f64 },
    #[error("pulses overlap: k = {k} < 2/T = {min_k}")]
    PulseOverlap { k: f64, min_k: f64 },
    #[error("closed-form energy has imaginary residue {imag:e}")]
    ConjugateAsymmetry { imag: f64 },
    #[error("vector is not an eigenvector: residual {residual:e}")]
    EigpairMismatch { residual: f64 },
    #[error("eigenvector not in the image of P: |(I-P)v| / |v| = {residual:e}")]
    EigvecNotInImP { residual: f64 },
    #[error("eigenvalue real part {0} is not positive")]
    NonPositiveEigenvalue(f64),
    #[error("no point with positive slope of the growth function was found")]
    NoPositiveSlopeFound,
    #[error("port-transformed matrix is not in the generic set M: {0}")]
    NotInGenericSet(String),
    #[error("no eigenvalue with positive real part (max Re = {0})")]
    NoUnstableEigenvalue(f64),
    #[error("horizon scan exhausted up to T = {t_max}; most negative W = {best_w} at T = {best_t}")]
    ScanExhausted { t_max: f64, best_w: f64, best_t: f64 },
    #[error("projection is not orthogonal (|P - P^T|_F = {asymmetry:e})")]
    NonOrthogonalProjection { asymmetry: f64 },
    #[error("projection is zero")]
    ZeroProjection,

    #[error("not a simple pole of the rational function")]
    NotASimplePole,
    #[error("denominator polynomial is identically zero")]
    ZeroDenominator,

    #[error("non-finite function value at {0:?}")]
    NonFiniteEvaluation(Vec<f64>),
    #[error("Newton iteration did not converge (residual {residual:e} at {best:?})")]
    NoConvergence { best: Vec<f64>, residual: f64 },
    #[error("equilibrium not found: {0}")]
    EquilibriumNotFound(String),
    #[error("point is not an equilibrium (residual {residual:e})")]
    NotAnEquilibrium { residual: f64 },
    #[error("max Re of the spectrum does not change sign on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("equilibrium branch lost at parameter {0}")]
    BranchLost(f64),

    #[error("parse error: {0}")]
    Parse(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    #[allow(dead_code)]
    pub(crate) fn at(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
