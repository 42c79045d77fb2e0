//! Symbolic engine for the level-zero quantum affine `gl_n` calculus.

pub mod laurent;
pub mod bootstrap;
pub mod corpus;
pub mod braid;
pub mod eval;
pub mod kmodel;
pub mod linalg;
pub mod reduce;
pub mod relations;
pub mod rules;
pub mod script;
pub mod suite;
pub mod tree;
pub mod weight;
pub mod word;

pub use laurent::{qbinom, qint, shift_class, LaurentPoly, Side};
pub use weight::Weight;
