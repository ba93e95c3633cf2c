//! Combinatorial engine for tropical moduli of stable and pseudostable curves.

pub mod complex;
pub mod dualgraph;
pub mod error;
pub mod expr;
pub mod plmap;
pub mod poly;
pub mod pwpoly;
pub mod rational;
pub mod strata;
pub mod verify;

pub use dualgraph::{AutGroup, DualGraph};
pub use error::{Error, Result};
pub use poly::Poly;
pub use rational::Rational;
