//! flatskew: exact dynamics on square-tiled translation surfaces.
//!
//! The crate simulates, in exact rational arithmetic, the straight-line
//! flow on square-tiled surfaces together with Abelian skew-product
//! extensions defined by *cuts*: pairs of parallel congruent segments
//! carrying opposite group values. On top of the flow engine sit
//! first-return interval exchanges with slow Rauzy induction, cylinder
//! decompositions in rational directions, and a witness search that
//! certifies essential-value behavior: single-cylinder directions in
//! which the ergodic sums over one period split the cylinder into two
//! halves with values ±g.
//!
//! Time is measured in y-levels: unit time advances the height by one
//! square, so periods of cylinders are integers and everything stays
//! rational. Euclidean time differs by the constant factor
//! `sqrt(p² + q²)/q` in direction `(p, q)`.

pub mod cf;
pub mod cuts;
pub mod error;
pub mod flow;
pub mod group;
pub mod iet;
pub mod io;
pub mod perm;
pub mod rational;
pub mod skew;
pub mod surface;
pub mod svg;
pub mod witness;

pub use error::*;
pub use rational::Rat;
pub use surface::{SquareTiledSurface, SurfacePoint, StratumSignature};
