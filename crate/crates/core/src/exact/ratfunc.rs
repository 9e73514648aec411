use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::poly::UniPoly;
use super::Rat;
use crate::Error;

/// Element of the field of rational functions in the level `k`.
///
/// Always stored reduced: `gcd(num, den) = 1` and `den` monic, so two values
/// are equal exactly when their fields are equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: UniPoly,
    den: UniPoly,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc {
            num: UniPoly::zero(),
            den: UniPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        RatFunc {
            num: UniPoly::constant(c),
            den: UniPoly::one(),
        }
    }

    pub fn int(c: i64) -> Self {
        Self::constant(Rat::from_integer(c.into()))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::constant(Rat::new(n.into(), d.into()))
    }

    /// The level parameter itself.
    pub fn var() -> Self {
        Self::from_poly(UniPoly::var())
    }

    pub fn from_poly(num: UniPoly) -> Self {
        RatFunc {
            num,
            den: UniPoly::one(),
        }
    }

    pub fn new(num: UniPoly, den: UniPoly) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: UniPoly, den: UniPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.is_constant() {
            let inv = den.coeffs()[0].recip();
            return RatFunc {
                num: num.scale(&inv),
                den: UniPoly::one(),
            };
        }
        let g = UniPoly::gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.exact_div(&g).expect("gcd divides numerator"),
                den.exact_div(&g).expect("gcd divides denominator"),
            )
        };
        let lc_inv = den.leading().expect("nonzero denominator").recip();
        if lc_inv.is_one() {
            RatFunc { num, den }
        } else {
            RatFunc {
                num: num.scale(&lc_inv),
                den: den.scale(&lc_inv),
            }
        }
    }

    pub fn numer(&self) -> &UniPoly {
        &self.num
    }

    pub fn denom(&self) -> &UniPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<Rat> {
        (self.den.is_one() && self.num.is_constant()).then(|| self.num.constant_term())
    }

    pub fn scale(&self, s: &Rat) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        RatFunc {
            num: self.num.scale(s),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<Self, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, rhs: &RatFunc) -> Result<Self, Error> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        RatFunc {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// Value at a numeric level.
    pub fn eval_at(&self, k0: &Rat) -> Result<Rat, Error> {
        let d = self.den.eval(k0);
        if d.is_zero() {
            return Err(Error::PoleAtPoint { point: k0.clone() });
        }
        Ok(self.num.eval(k0) / d)
    }

    /// Substitutes a numeric level, keeping the result as a constant function.
    pub fn specialize(&self, k0: &Rat) -> Result<Self, Error> {
        self.eval_at(k0).map(Self::constant)
    }

    /// True when the printed form is a sum and needs brackets as a factor.
    pub fn is_compound(&self) -> bool {
        !self.den.is_one() || self.num.coeffs().iter().filter(|c| !c.is_zero()).count() > 1
    }

    pub fn display_in<'a>(&'a self, var: &'a str) -> RatFuncDisplay<'a> {
        RatFuncDisplay { f: self, var }
    }
}

impl Default for RatFunc {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<Rat> for RatFunc {
    fn from(c: Rat) -> Self {
        Self::constant(c)
    }
}

impl From<UniPoly> for RatFunc {
    fn from(p: UniPoly) -> Self {
        Self::from_poly(p)
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            if self.den.is_one() {
                return RatFunc::from_poly(&self.num + &rhs.num);
            }
            return RatFunc::reduce(&self.num + &rhs.num, self.den.clone());
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RatFunc::reduce(num, &self.den * &rhs.den)
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFunc::from_poly(&self.num * &rhs.num);
        }
        // cross-cancel before multiplying
        let g1 = UniPoly::gcd(&self.num, &rhs.den);
        let g2 = UniPoly::gcd(&rhs.num, &self.den);
        let (n1, d2) = (
            self.num.exact_div(&g1).expect("gcd"),
            rhs.den.exact_div(&g1).expect("gcd"),
        );
        let (n2, d1) = (
            rhs.num.exact_div(&g2).expect("gcd"),
            self.den.exact_div(&g2).expect("gcd"),
        );
        let num = &n1 * &n2;
        let den = &d1 * &d2;
        let lc_inv = den.leading().expect("nonzero").recip();
        RatFunc {
            num: num.scale(&lc_inv),
            den: den.scale(&lc_inv),
        }
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Add for RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: RatFunc) -> RatFunc {
        &self + &rhs
    }
}

impl Sub for RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: RatFunc) -> RatFunc {
        &self - &rhs
    }
}

impl Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: RatFunc) -> RatFunc {
        &self * &rhs
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

pub struct RatFuncDisplay<'a> {
    f: &'a RatFunc,
    var: &'a str,
}

impl fmt::Display for RatFuncDisplay<'_> {
    /// Non-polynomial values print as `(N)/(D)` with coprime integer coefficients.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let RatFunc { num, den } = self.f;
        if den.is_one() {
            return num.display_in(self.var).fmt(f);
        }
        let mut lcm = BigInt::one();
        for c in num.coeffs().iter().chain(den.coeffs()) {
            lcm = lcm.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in num.coeffs().iter().chain(den.coeffs()) {
            g = g.gcd(&(c * Rat::from_integer(lcm.clone())).to_integer());
        }
        let s = Rat::new(lcm, g);
        let (n, d) = (num.scale(&s), den.scale(&s));
        if n.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 {
            write!(f, "({})", n.display_in(self.var))?;
        } else {
            write!(f, "{}", n.display_in(self.var))?;
        }
        write!(f, "/({})", d.display_in(self.var))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_in("k").fmt(f)
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}
