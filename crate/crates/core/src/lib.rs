pub mod airy;
pub mod error;
pub mod ode;
pub mod potential;
pub mod quadrature;
pub mod radial3d;
pub mod resolvent;
pub mod resonance;
pub mod roots;

pub use error::{Error, Result};
pub use potential::{Potential, PotentialKind, PotentialSpec};
