//! Nonlinear resolvents `J_r = (I + r f)^{-1}` of semigroup generators on
//! the unit disk, together with numerical checks of their geometry:
//! Noshiro–Warschawski and starlikeness bounds, hyperbolic convexity, the
//! inverse Löwner chain structure, quasiconformal sector bounds and boundary
//! regular fixed points.

pub mod boundary;
pub mod error;
pub mod expr;
pub mod figures;
pub mod generators;
pub mod geometry;
pub mod holo;
pub mod loewner;
pub mod resolvent;
pub mod semigroup;

pub use error::{Error, Result};
pub use holo::{Cx, DiskGrid, HoloMap};
