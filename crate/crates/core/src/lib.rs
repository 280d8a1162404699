//! Circuit partition polynomials of Eulerian multigraphs, and the moments
//! `q(G;k) = E[∏ ⟨x_u, x_v⟩]` of products of inner products of random vectors.
//!
//! The crate computes the circuit partition polynomial `j(G;z)` exactly by
//! enumerating transition systems, predicts `q(G;k)` for four vector
//! ensembles (unit sphere and Gaussian, complex and real) from closed-form
//! scalings of `j`, and checks those predictions three ways:
//!
//! * Monte Carlo sampling of the product ([`sampling`]),
//! * brute-force index summation of the averaged tensors ([`diagram::contract_q_exact`]),
//! * Martin's identity between the medial graph of a plane map and the
//!   diagonal Tutte polynomial ([`planar`]).
//!
//! Most numeric entry points are generic over [`Scalar`], so the same code
//! runs on exact [`Rational`]s and on `f64`/`f32`.

pub mod budget;
pub mod diagram;
pub mod error;
pub mod graph;
pub mod partition;
pub mod planar;
pub mod sampling;
pub mod scalar;
pub mod verify;

pub use budget::Budget;
pub use diagram::{Ensemble, MatchingDiagram, PermutationDiagram};
pub use error::{Error, Result};
pub use graph::{
    DirectedMultigraph, EulerianReport, Graph, GraphKind, GraphRef, UndirectedMultigraph,
};
pub use partition::{IntPolynomial, TransitionSystem};
pub use planar::PlanarMap;
pub use sampling::{MCEstimate, VectorAssignment};
pub use scalar::Scalar;

/// Exact arbitrary-precision rational.
pub type Rational = num_rational::BigRational;

/// Arbitrary-precision nonnegative integer, used for counts and coefficients.
pub type Count = num_bigint::BigUint;

/// Double-precision complex number.
pub type Complex64 = num_complex::Complex<f64>;

pub type VectorAssignment64 = VectorAssignment<f64>;
pub type VectorAssignment32 = VectorAssignment<f32>;

/// Version tag carried by every JSON document this crate emits.
pub const SCHEMA: &str = "circuitkit/1";
