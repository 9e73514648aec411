//! Exact λ-bracket calculus for W-algebras presented by strong generators
//! and OPE tables, with Jacobi checks and collapse-level detection.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod axioms;
pub mod collapse;
mod error;
pub mod exact;
pub mod field;
pub mod lambda;

pub use error::Error;
pub use exact::{Rat, RatFunc, UniPoly};
pub use field::{AlgebraPresentation, Factor, FieldExpr, Gen, GeneratorDecl, Monomial};
pub use lambda::{BracketTable, Calculus, LambdaPoly, RawExpr};
