//! The textual OPE definition language.
//!
//! ```text
//! algebra sl3_min
//! critical -3
//! central_charge -(1+3*k)*(3+2*k)/(3+k)
//! generator J weight 1
//! generator L weight 2 conformal
//! ope J J { pole 2: 3 + 2*k; }
//! ```
//!
//! A pole body is a sum of terms `coefficient * field`, where fields are
//! generator names, derivatives `d2(J)` and right-nested normally ordered
//! products `NO(a, NO(b, c))`. A bare coefficient is a multiple of the
//! vacuum. Rows involving the conformal generator are synthesized and may
//! not be stored.

mod parse;
mod validate;
mod write;

pub use parse::{parse, Document, Location, ParseError, SourceMap};
pub use validate::{has_errors, validate, Diagnostic, Severity};
pub use write::serialize;
