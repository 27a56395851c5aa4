//! Star products on multivector algebras.
//!
//! One product kernel covers the Clifford, symplectic and fermionic products;
//! on top of it sit the Moyal and extended phase space products, rotor
//! groups and their Lie algebras, numeric geometry on charts, and a rigid
//! body integrator.

pub mod calculus;
pub mod error;
pub mod geometry;
pub mod lie;
pub mod linalg;
pub mod moyal;
pub mod multivector;
pub mod random;
pub mod rigid_body;
pub mod scalar;
pub mod suite;

pub use error::{Error, Result};
pub use multivector::{MetricSignature, Multivector, Signature, SignatureKind};
pub use scalar::{Gaussian, Monomial, PolyScalar, Rational, Scalar, Var, VarRegistry};
