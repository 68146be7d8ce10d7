//! Staircase saddle landscape.
//!
//! A two-dimensional, continuously differentiable function built from a
//! chain of saddle blocks joined by blending buffers, on which plain
//! gradient descent from a thin initialization band needs a number of
//! iterations exponential in the number of saddles. The crate provides the
//! landscape, numerical oracles that certify it, plain and noisy gradient
//! descent, and trajectory analysis that checks the escape-time bounds on
//! measured runs.

pub mod analysis;
pub mod experiment;
pub mod landscape;
pub mod optimizer;
pub mod verification;

pub use landscape::{
    BlockGeometry, Branch, BufferBranch, CubicHermite, DerivedConstants, Landscape, LandscapeError,
    LandscapeParams, LocalPoint, Objective, Point, Rect, RegionId, RegionKind,
};
