//! Exact symbolic kernel for q-deformed Heisenberg relations on degree-two
//! tensors, Clifford-valued polynomial calculus, and relation replay.

pub mod calculus;
pub mod cli;
pub mod clifford;
pub mod error;
pub mod json;
pub mod parse;
pub mod rewrite;
pub mod scalars;
pub mod terms;
pub mod verify;

pub use clifford::{Algebra, AlgebraKind, Blade, Degeneracy, Multivector};
pub use error::{Error, Result, SyntaxError};
pub use parse::parse_expression;
pub use scalars::{GaussianRational, Monomial, Param, Scalar};
pub use terms::{Entry, Expression, FunTag, Generator, TensorMonomial, TermKey, Word};
