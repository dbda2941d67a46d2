use alloc::string::String;
use core::fmt;

/// Errors shared by every module of the crate.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// An array length does not match the jet order it must agree with.
    DimensionMismatch { expected: usize, got: usize },
    /// A momentum index lies outside `1..=k+2`.
    IndexOutOfRange { index: usize, len: usize },
    /// A curvature polynomial exceeds the degree `k-1` bound.
    DegreeTooHigh { degree: usize, max: usize },
    /// `|F(x)| > 1`: the point is outside the admissible band.
    OutsideBand { x: f64, f: f64 },
    /// Anchor slope must satisfy `|du/ds| < 1` strictly.
    InvalidAnchorSlope { duds: f64 },
    /// Adaptive step size shrank below the representable limit.
    StepSizeUnderflow { s: f64 },
    /// The integration state left the finite range.
    NonFiniteState { s: f64 },
    /// Band window given with `xmin >= xmax`.
    WindowInverted { xmin: f64, xmax: f64 },
    /// Quadrature could not reach the requested tolerance.
    ToleranceNotAchieved { requested: f64, achieved: f64 },
    /// Arc has no sub-arc with enough x-variation for a fit.
    InsufficientSpan,
    /// Arc does not span the requested s-range.
    SpanTooShort { needed: f64, available: f64 },
    /// `{x : F(x)^2 <= 2H}` meets the interval in an empty set.
    EmptyAdmissibleSet,
    /// An identity left its domain of validity (e.g. negative base of a
    /// fractional power) at the given sample.
    DomainExit { s: f64, detail: String },
    /// Anything rejected before computation starts.
    InvalidParameter(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range 1..={len}")
            }
            Error::DegreeTooHigh { degree, max } => {
                write!(f, "polynomial degree {degree} exceeds maximum {max}")
            }
            Error::OutsideBand { x, f: val } => {
                write!(f, "|F({x})| = |{val}| > 1: outside the admissible band")
            }
            Error::InvalidAnchorSlope { duds } => {
                write!(f, "anchor slope {duds} not strictly inside (-1, 1)")
            }
            Error::StepSizeUnderflow { s } => write!(f, "step size underflow at s = {s}"),
            Error::NonFiniteState { s } => write!(f, "non-finite state at s = {s}"),
            Error::WindowInverted { xmin, xmax } => {
                write!(f, "window [{xmin}, {xmax}] is inverted")
            }
            Error::ToleranceNotAchieved {
                requested,
                achieved,
            } => write!(
                f,
                "quadrature tolerance {requested:.3e} not achieved (best {achieved:.3e})"
            ),
            Error::InsufficientSpan => write!(f, "no sub-arc with sufficient x-span for a fit"),
            Error::SpanTooShort { needed, available } => {
                write!(f, "arc spans {available} in s, need at least {needed}")
            }
            Error::EmptyAdmissibleSet => write!(f, "admissible set is empty"),
            Error::DomainExit { s, detail } => write!(f, "domain exit at s = {s}: {detail}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
