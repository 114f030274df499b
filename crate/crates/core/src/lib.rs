//! Numerical toolkit for polar linear actions on Euclidean space.
//!
//! The crate covers
//! - linear actions of connected rotation groups given by Lie-algebra
//!   generators, their orbits, sections and polarity certificates
//!   ([`action`], [`polar`]);
//! - principal orbits as isoparametric submanifolds: second fundamental
//!   forms, principal normals, focal hyperplanes and Weyl groups
//!   ([`isoparametric`]);
//! - synthesis of group-invariant hypersurfaces by sweeping Weyl-invariant
//!   profiles through a section, including rotation, multi-rotational and
//!   warped-product constructions ([`synthesis`]);
//! - finite-difference diagnostics of sampled hypersurfaces ([`analysis`]);
//! - an ASCII mesh format for swept sample sets ([`mesh`]).

pub mod action;
pub mod analysis;
pub mod chart;
pub mod error;
pub mod fd;
pub mod isoparametric;
pub mod linalg;
pub mod mesh;
pub mod polar;
pub mod sampling;
pub mod spatial;
pub mod synthesis;

pub use action::LinearAction;
pub use error::{GeomError, Result};
pub use linalg::{exp_skew, Frame, OrthoMat, SkewMat, VecN};
pub use polar::{SectionSubspace, OrbitClass, OrbitKind};
