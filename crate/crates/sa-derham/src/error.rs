use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("simplex {0:?} is not in the complex")]
    UnknownSimplex(Vec<usize>),
    #[error("point lies outside the closed simplex")]
    PointOutsideSimplex,
    #[error("point lies outside the domain complex")]
    PointOutsideDomain,
    #[error("function is discontinuous across face {face:?}")]
    Discontinuous { face: Vec<usize> },
    #[error("denominator sign undecided on simplex {0:?} at the subdivision depth limit")]
    DenominatorUndecided(Vec<usize>),
    #[error("denominator vanishes on simplex {0:?}")]
    DenominatorVanishes(Vec<usize>),
    #[error("composition of a rational piece with a rational map is outside the function class")]
    CompositionDegreeOverflow,
    #[error("no refinement found making the map land in single simplices")]
    NoRefinement,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("adaptive quadrature budget exhausted (achieved error bound {achieved:e})")]
    AdaptiveBudgetExhausted { achieved: f64 },
    #[error("chain is not adapted to the stratification: {0}")]
    NotAdapted(String),
    #[error("subcomplexes do not cover the complex")]
    NotACover,
    #[error("cover is not excisive: {0}")]
    NotExcisive(String),
    #[error("complex is not star-shaped about the chosen vertex")]
    NotStarShaped,
    #[error("collapse search exhausted its budget of {0} expansions")]
    CollapseBudgetExhausted(usize),
    #[error("invalid collapse step: {0}")]
    InvalidCollapse(String),
    #[error("bundle orientation is incompatible on an overlap: {0}")]
    OrientationIncompatible(String),
    #[error("fiber is not an oriented pseudomanifold: {0}")]
    FiberNotManifold(String),
    #[error("projection compatibility failed: {0}")]
    ProjectionMismatch(String),
    #[error("inputs are incompatible on shared faces: {0}")]
    IncompatibleInputs(String),
    #[error("support condition cannot be verified: {0}")]
    SupportUnverifiable(String),
    #[error("pushforward of a PA form requires the unsafe extended-pushforward flag")]
    ExtendedPushforwardDisabled,
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unresolved reference `{0}`")]
    UnresolvedReference(String),
}

pub type Result<T> = std::result::Result<T, Error>;
