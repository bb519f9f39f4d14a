use alloc::string::String;

use crate::surface::CurveId;

/// Every failure in the crate. Each variant carries a stable code (see [`Error::code`])
/// that reports and the CLI print verbatim.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("trace {0} is elliptic (|tr| < 2)")]
    EllipticElement(f64),
    #[error("length {0} is not positive")]
    NonPositiveLength(f64),
    #[error("cross ratio needs four pairwise distinct points")]
    DegenerateQuadruple,
    #[error("cross ratio {0} is not negative; points are out of cyclic order")]
    OrderViolation(f64),
    #[error("jacobian is singular")]
    SingularJacobian,
    #[error("matrix has non-positive determinant {0}")]
    BadDeterminant(f64),
    #[error("length rule gave {length} for curve {curve}")]
    BadLengthRule { curve: CurveId, length: f64 },
    #[error("finite subsurface needs at least one core curve")]
    EmptyCore,
    #[error("curve {0} does not exist on this surface")]
    UnknownCurve(CurveId),
    #[error("mapping class meets the curve support infinitely often (more than {0} entries)")]
    InfiniteInteraction(usize),
    #[error("no hyperbolic realization: {0}")]
    NonHyperbolicInput(String),
    #[error("curve base {0} is not contained in the extracted subsurface")]
    WordNotSupported(CurveId),
    #[error("curve {curve} has length {length}, not below the short threshold")]
    NotShort { curve: CurveId, length: f64 },
    #[error("epsilon {0} must lie in (0, 1)")]
    EpsilonOutOfRange(f64),
    #[error("grid too coarse: max ratio {0} within 1e-6 of 1")]
    GridTooCoarse(f64),
    #[error("malformed curve literal: {0}")]
    BadLiteral(String),
    #[error("invalid parameter: {0}")]
    BadParameter(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::EllipticElement(_) => "El003",
            Error::NonPositiveLength(_) => "El004",
            Error::DegenerateQuadruple => "El005",
            Error::OrderViolation(_) => "El006",
            Error::SingularJacobian => "El007",
            Error::BadDeterminant(_) => "El008",
            Error::BadLengthRule { .. } => "El010",
            Error::EmptyCore => "El011",
            Error::UnknownCurve(_) => "El012",
            Error::InfiniteInteraction(_) => "ElC01",
            Error::NonHyperbolicInput(_) => "ElH01",
            Error::WordNotSupported(_) => "ElH02",
            Error::NotShort { .. } => "ElH03",
            Error::EpsilonOutOfRange(_) => "ElM02",
            Error::GridTooCoarse(_) => "ElM03",
            Error::BadLiteral(_) => "ElC02",
            Error::BadParameter(_) => "ElX02",
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
