//! Exact computations on stratified nilpotent Lie algebras and Carnot
//! groups.
//!
//! Everything is generic over a coefficient field implementing
//! [`scalar::Scalar`]; the aliases below fix it to arbitrary-precision
//! rationals, which is what every exact decision (rank, singularity,
//! vanishing of a bracket) relies on.

pub mod algebra;
pub mod constructors;
pub mod error;
pub mod fields;
pub mod group;
pub mod hall;
pub mod linalg;
pub mod poly;
pub mod random;
pub mod report;
pub mod scalar;
pub mod star;

pub use error::{Error, Result};
pub use scalar::{Rational, Ring, Scalar};

pub type Algebra = algebra::StratifiedAlgebra<Rational>;
pub type Vector = algebra::AlgebraVector<Rational>;
pub type Matrix = linalg::Matrix<Rational>;
pub type Poly = poly::Polynomial<Rational>;
pub type VectorField = fields::PolyVectorField<Rational>;
pub type GroupLaw = group::GroupLaw<Rational>;
pub type GroupPoint = group::GroupPoint<Rational>;
pub type BasisChange = star::BasisChange<Rational>;
pub type Ideal = constructors::HomogeneousIdeal<Rational>;
pub type Projection = constructors::ProjectionMap<Rational>;
