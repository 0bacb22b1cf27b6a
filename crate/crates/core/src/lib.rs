//! Exact computations around transfer operators: the diagonal algebra of a
//! finite graph with its shift endomorphism and weighted transfer operator,
//! positive maps on finite spaces and their correspondences, and concrete
//! Cuntz-Krieger representations.

pub mod corpus;
pub mod correspondence;
pub mod cp;
pub mod diag;
pub mod exel;
pub mod graph;
pub mod linalg;
pub mod rational;
pub mod rep;

pub use diag::{DiagElement, DiagError};
pub use graph::{Graph, GraphError, Path, WeightSystem};
pub use rational::Q;
