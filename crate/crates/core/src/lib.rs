//! Exact finite ultrametric spaces and a concrete model of the Urysohn
//! universal ultrametric space.
//!
//! Points of the model are finite-support maps from positive rationals to
//! nonnegative integers ([`model::UrysohnPoint`]); the distance between two
//! maps is the largest coordinate where they differ. On top of the model the
//! crate provides isometric one-point extension and embedding, Hausdorff
//! distances of finite subsets, max-products, heir trees and petal pieces.
//! All arithmetic is exact.

pub mod error;
pub mod gen;
pub mod hyperspace;
pub mod injectivity;
pub mod linalg;
pub mod model;
pub mod petals;
pub mod predicates;
pub mod products;
pub mod rational;
pub mod spaces;
pub mod suite;

pub use error::{Error, Result};
pub use hyperspace::{FiniteSubset, SymmetricProductBound};
pub use injectivity::{embed_space, extend_one_point, ExtensionProblem};
pub use model::{delta, UrysohnPoint};
pub use rational::Rational;
pub use spaces::{FiniteUltrametricSpace, RangeSet};
