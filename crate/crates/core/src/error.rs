//! Shared error type for the search stack.

use std::fmt;

/// Everything that can go wrong below the simulator boundary.
///
/// The variants are deliberately coarse: callers branch on the kind of
/// failure (bad caller input vs. a geometry that carries no information vs.
/// the vehicle already being inside the capture radius), not on which
/// function raised it.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two points coincide, or a direction is otherwise undefined.
    DegenerateGeometry(&'static str),
    /// A caller-supplied value is outside the documented domain.
    InvalidInput(String),
    /// The two-bearing initializer was given rays that do not intersect in
    /// a usable way (near-parallel sightlines or an intersection on top of
    /// the observer).
    IllConditionedInit,
    /// The range is at or inside one step of travel, so the radial-speed
    /// problem is no longer well posed.
    NearTerminalRange,
    /// The controller needed state it does not have (for example a missing
    /// prior when the configuration promised one).
    ControllerFault(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegenerateGeometry(what) => {
                write!(f, "degenerate geometry: {what}")
            }
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::IllConditionedInit => {
                write!(f, "ill-conditioned two-bearing initialization")
            }
            Error::NearTerminalRange => {
                write!(
                    f,
                    "range is within one step of travel; radial-speed problem degenerate"
                )
            }
            Error::ControllerFault(msg) => write!(f, "controller fault: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
