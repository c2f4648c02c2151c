use num_bigint::BigInt;
use num_rational::BigRational;

/// Crate-wide error type.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("curve coefficient d must be nonzero")]
    ZeroCurveCoefficient,

    #[error("point ({x}, {y}) does not satisfy y^2 = x^3 + d")]
    PointNotOnCurve { x: BigRational, y: BigRational },

    #[error("division by zero polynomial")]
    ZeroPolynomialDivision,

    #[error("division by zero rational function")]
    ZeroRatFuncDivision,

    #[error("denominator vanishes at {at}")]
    PoleAtPoint { at: BigRational },

    #[error("cannot parse {input:?} as a rational number")]
    RationalParse { input: String },

    #[error("parameter {n0} is degenerate (a denominator of the family vanishes)")]
    DegenerateParameter { n0: BigRational },

    #[error("neither root of the parameter equation reproduces the target stage")]
    NoConsistentRoot,

    #[error("unknown mutation target {target:?}")]
    UnknownMutationTarget { target: String },

    #[error("factorization budget exhausted; unfactored composite {composite}")]
    FactorBudgetExceeded { composite: BigInt },

    #[error("precision {got} below the supported minimum {min}")]
    PrecisionTooLow { got: u32, min: u32 },

    #[error("archimedean local-height series failed to converge within {cap} terms")]
    ArchSeriesDiverged { cap: usize },

    #[error("naive height is undefined at the point at infinity")]
    HeightAtInfinity,

    #[error("height pairing requires points on the same curve")]
    CurveMismatch,

    #[error("empty point list")]
    EmptyPointList,
}

pub type Result<T> = std::result::Result<T, Error>;
