use alloc::boxed::Box;
use alloc::string::String;

use crate::exact::{Rat, RatFunc};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("division by the zero function")]
    DivisionByZero,
    #[error("the zero polynomial has no finite root set")]
    ZeroPolynomial,
    #[error("pole at k = {point}")]
    PoleAtPoint { point: Rat },
    #[error("expression mixes conformal weights")]
    NonHomogeneous,
    #[error("the zero field has no weight")]
    ZeroField,
    #[error("pole degree {pole} does not correspond to an integral product index")]
    NonIntegralProduct { pole: Rat },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("no bracket entry or synthesis rule for ({left}, {right})")]
    MissingEntry { left: String, right: String },
    #[error("presentation has no unique conformal generator")]
    NoConformalVector,
    #[error("central charge mismatch: derived {derived}, declared {declared}")]
    ChargeMismatch {
        derived: Box<RatFunc>,
        declared: Box<RatFunc>,
    },
    #[error("level k = {0} is excluded")]
    ExcludedLevel(Rat),
    #[error("cutoff {cutoff} is below the largest generator weight {max_weight}")]
    CutoffTooSmall { cutoff: Box<Rat>, max_weight: Box<Rat> },
}
