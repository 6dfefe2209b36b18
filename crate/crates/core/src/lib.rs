//! Exact computations with graded-commutative differential graded algebras over Q.
//!
//! The crate covers cohomology, Poincaré duality and intersection forms, Witt
//! data, inflexibility certificates for self-maps, and a small calculus of
//! mapping-degree sets.

pub mod algebra;
pub mod cohomology;
pub mod degsets;
pub mod dga;
pub mod error;
pub mod exec;
pub mod expr;
pub mod fixtures;
pub mod inflexibility;
pub mod format;
pub mod linalg;
pub mod poincare;
pub mod poly;
pub mod rational;

pub use algebra::{Coeff, Element, GradedAlgebra, Generator, Monomial};
pub use error::{DgaError, Result};
pub use exec::Exec;
pub use rational::Q;
