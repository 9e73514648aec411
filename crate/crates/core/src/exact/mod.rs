//! Exact arithmetic over the rationals and over the rational function field
//! in the level parameter `k`.

mod poly;
mod ratfunc;
mod roots;

pub use poly::{PolyDisplay, UniPoly};
pub use ratfunc::{RatFunc, RatFuncDisplay};
pub use roots::{rational_roots, RationalRoots};

pub(crate) use poly::write_rat;

/// Arbitrary-precision rational, always reduced with a positive denominator.
pub type Rat = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// `n!` as a rational.
pub fn factorial(n: u32) -> Rat {
    (2..=n as i64).fold(int(1), |acc, i| acc * int(i))
}

/// Binomial coefficient `C(n, i)` for integer (possibly negative) `n`.
pub fn binomial(n: i64, i: u32) -> Rat {
    let mut acc = int(1);
    for j in 0..i as i64 {
        acc = acc * int(n - j) / int(j + 1);
    }
    acc
}
