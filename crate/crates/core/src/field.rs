//! Generators, canonical monomials and field expressions.
//!
//! A [`Monomial`] is a right-nested normally ordered product
//! `:∂^{m1}a1(:∂^{m2}a2(⋯):):` of generator derivatives. Canonical monomials
//! keep their factors sorted by generator declaration index and, within one
//! generator, by descending derivative order. Free strong generation makes the
//! canonical monomials a basis, so a [`FieldExpr`] in canonical form is a
//! unique coordinate vector.

use alloc::collections::btree_map::{self, BTreeMap};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::exact::{write_rat, Rat, RatFunc};
use crate::lambda::BracketTable;
use crate::Error;

/// Index of a generator in its presentation's declaration order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Gen(pub u16);

impl Gen {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorDecl {
    pub name: String,
    /// Conformal weight, a positive half-integer for every shipped algebra.
    pub weight: Rat,
    pub is_conformal: bool,
}

/// `∂^deriv gen`
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Factor {
    pub gen: Gen,
    pub deriv: u32,
}

impl Factor {
    pub fn new(gen: Gen, deriv: u32) -> Self {
        Factor { gen, deriv }
    }

    pub fn derived(self, extra: u32) -> Self {
        Factor {
            gen: self.gen,
            deriv: self.deriv + extra,
        }
    }

    pub fn weight(&self, weights: &[Rat]) -> Rat {
        &weights[self.gen.index()] + Rat::from_integer(self.deriv.into())
    }
}

impl Ord for Factor {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gen.cmp(&other.gen).then_with(|| other.deriv.cmp(&self.deriv))
    }
}

impl PartialOrd for Factor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Right-nested normally ordered product; the empty product is the vacuum.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(pub Vec<Factor>);

impl Monomial {
    pub fn vacuum() -> Self {
        Monomial(Vec::new())
    }

    pub fn single(f: Factor) -> Self {
        Monomial(alloc::vec![f])
    }

    pub fn gen(g: Gen) -> Self {
        Self::single(Factor::new(g, 0))
    }

    pub fn factors(&self) -> &[Factor] {
        &self.0
    }

    pub fn is_vacuum(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_canonical(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }

    /// Everything after the first factor.
    pub fn tail(&self) -> Monomial {
        Monomial(self.0[1..].to_vec())
    }

    pub fn prepend(&self, f: Factor) -> Monomial {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(f);
        v.extend_from_slice(&self.0);
        Monomial(v)
    }

    pub fn weight(&self, weights: &[Rat]) -> Rat {
        self.0.iter().fold(Rat::zero(), |acc, f| acc + f.weight(weights))
    }

    /// Sum of the generator weights, ignoring derivatives. Every rewriting
    /// correction term strictly lowers this quantity.
    pub fn generator_degree(&self, weights: &[Rat]) -> Rat {
        self.0.iter().fold(Rat::zero(), |acc, f| acc + &weights[f.gen.index()])
    }

    pub fn contains(&self, g: Gen) -> bool {
        self.0.iter().any(|f| f.gen == g)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Finite linear combination of monomials with coefficients in `Q(k)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct FieldExpr {
    terms: BTreeMap<Monomial, RatFunc>,
}

impl FieldExpr {
    pub fn zero() -> Self {
        FieldExpr::default()
    }

    pub fn vacuum() -> Self {
        Self::term(Monomial::vacuum(), &RatFunc::one())
    }

    pub fn gen(g: Gen) -> Self {
        Self::term(Monomial::gen(g), &RatFunc::one())
    }

    pub fn term(m: Monomial, c: &RatFunc) -> Self {
        let mut e = Self::zero();
        e.add_term(m, c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, Monomial, RatFunc> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> RatFunc {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn vacuum_coeff(&self) -> RatFunc {
        self.coeff(&Monomial::vacuum())
    }

    pub fn add_term(&mut self, m: Monomial, c: &RatFunc) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, other: &FieldExpr, c: &RatFunc) {
        if c.is_zero() {
            return;
        }
        let unit = c.is_one();
        for (m, v) in &other.terms {
            if unit {
                self.add_term(m.clone(), v);
            } else {
                self.add_term(m.clone(), &(v * c));
            }
        }
    }

    pub fn add_assign(&mut self, other: &FieldExpr) {
        self.add_scaled(other, &RatFunc::one());
    }

    pub fn sub_assign(&mut self, other: &FieldExpr) {
        self.add_scaled(other, &RatFunc::int(-1));
    }

    pub fn scaled(&self, c: &RatFunc) -> FieldExpr {
        if c.is_zero() {
            return FieldExpr::zero();
        }
        FieldExpr {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn scaled_rat(&self, c: &Rat) -> FieldExpr {
        if c.is_zero() {
            return FieldExpr::zero();
        }
        FieldExpr {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v.scale(c))).collect(),
        }
    }

    pub fn neg(&self) -> FieldExpr {
        self.scaled_rat(&-Rat::one())
    }

    /// Applies `f` to every coefficient, dropping zeros.
    pub fn try_map_coeffs(&self, mut f: impl FnMut(&RatFunc) -> Result<RatFunc, Error>) -> Result<FieldExpr, Error> {
        let mut out = FieldExpr::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), &f(v)?);
        }
        Ok(out)
    }

    /// Substitutes a numeric level into every coefficient.
    pub fn specialize(&self, k0: &Rat) -> Result<FieldExpr, Error> {
        self.try_map_coeffs(|c| c.specialize(k0))
    }

    pub fn is_canonical(&self) -> bool {
        self.terms.keys().all(Monomial::is_canonical)
    }

    /// Common conformal weight of all monomials.
    pub fn weight_of(&self, weights: &[Rat]) -> Result<Rat, Error> {
        let mut it = self.terms.keys().map(|m| m.weight(weights));
        let w = it.next().ok_or(Error::ZeroField)?;
        if it.all(|x| x == w) {
            Ok(w)
        } else {
            Err(Error::NonHomogeneous)
        }
    }

    /// Largest monomial weight, `None` for zero.
    pub fn max_weight(&self, weights: &[Rat]) -> Option<Rat> {
        self.terms.keys().map(|m| m.weight(weights)).max()
    }

    pub fn display<'a>(&'a self, names: &'a [String], var: &'a str) -> FieldExprDisplay<'a> {
        FieldExprDisplay { expr: self, names, var }
    }
}

impl FromIterator<(Monomial, RatFunc)> for FieldExpr {
    fn from_iter<I: IntoIterator<Item = (Monomial, RatFunc)>>(iter: I) -> Self {
        let mut e = FieldExpr::zero();
        for (m, c) in iter {
            e.add_term(m, &c);
        }
        e
    }
}

/// Writes a monomial in the OPE file syntax: `J`, `d2(G+)`, `NO(J,NO(J,L))`.
pub fn write_monomial(f: &mut fmt::Formatter<'_>, m: &Monomial, names: &[String]) -> fmt::Result {
    fn atom(f: &mut fmt::Formatter<'_>, x: &Factor, names: &[String]) -> fmt::Result {
        let name = &names[x.gen.index()];
        if x.deriv == 0 {
            f.write_str(name)
        } else {
            write!(f, "d{}({})", x.deriv, name)
        }
    }
    let factors = m.factors();
    let n = factors.len();
    for x in &factors[..n - 1] {
        f.write_str("NO(")?;
        atom(f, x, names)?;
        f.write_str(",")?;
    }
    atom(f, &factors[n - 1], names)?;
    for _ in 1..n {
        f.write_str(")")?;
    }
    Ok(())
}

impl Monomial {
    /// Renders in the OPE file syntax; the vacuum renders as `1`.
    pub fn display<'a>(&'a self, names: &'a [String]) -> MonomialDisplay<'a> {
        MonomialDisplay { mono: self, names }
    }
}

pub struct MonomialDisplay<'a> {
    mono: &'a Monomial,
    names: &'a [String],
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mono.is_vacuum() {
            return f.write_str("1");
        }
        write_monomial(f, self.mono, self.names)
    }
}

pub struct FieldExprDisplay<'a> {
    expr: &'a FieldExpr,
    names: &'a [String],
    var: &'a str,
}

impl fmt::Display for FieldExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.expr.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.expr.iter().enumerate() {
            let constant = c.as_constant();
            let negative = constant.as_ref().is_some_and(Signed::is_negative);
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_vacuum() {
                match &constant {
                    Some(v) => write_rat(f, &v.abs())?,
                    None => write!(f, "({})", c.display_in(self.var))?,
                }
                continue;
            }
            match &constant {
                Some(v) if v.abs().is_one() => {}
                Some(v) => {
                    write_rat(f, &v.abs())?;
                    f.write_str("*")?;
                }
                None => write!(f, "({})*", c.display_in(self.var))?,
            }
            write_monomial(f, m, self.names)?;
        }
        Ok(())
    }
}

/// Index positions for the three equivalent ways of naming a product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeIndex {
    /// `n` in `a_(n) b`
    pub product: i64,
    /// `m` in the physics mode `a_m b`, `m = n - Δ_a + 1`
    pub mode: Rat,
}

/// Converts a pole degree `d` of `a(z)b(w)` into the product index `n = d - 1`
/// and the physics mode `n - Δ_a + 1`. This is the single place where the
/// three indexings are related.
pub fn mode_convert(pole_degree: &Rat, delta_left: &Rat) -> Result<ModeIndex, Error> {
    if !pole_degree.is_integer() {
        return Err(Error::NonIntegralProduct {
            pole: pole_degree.clone(),
        });
    }
    let n = pole_degree - Rat::one();
    let product = i64::try_from(n.to_integer()).map_err(|_| Error::NonIntegralProduct {
        pole: pole_degree.clone(),
    })?;
    Ok(ModeIndex {
        product,
        mode: n - delta_left + Rat::one(),
    })
}

/// A vertex algebra given by strong generators and their λ-brackets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraPresentation {
    pub name: String,
    /// Name of the level parameter, `k` for every shipped algebra.
    pub param: String,
    pub generators: Vec<GeneratorDecl>,
    pub table: BracketTable,
    pub declared_c: RatFunc,
    /// `k = -h^∨`
    pub critical_level: Rat,
}

impl AlgebraPresentation {
    pub fn gen_by_name(&self, name: &str) -> Result<Gen, Error> {
        self.generators
            .iter()
            .position(|g| g.name == name)
            .map(|i| Gen(i as u16))
            .ok_or_else(|| Error::UnknownGenerator(name.into()))
    }

    pub fn gens(&self) -> impl Iterator<Item = Gen> {
        (0..self.generators.len() as u16).map(Gen)
    }

    pub fn weights(&self) -> Vec<Rat> {
        self.generators.iter().map(|g| g.weight.clone()).collect()
    }

    pub fn names(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.name.clone()).collect()
    }

    pub fn weight(&self, g: Gen) -> &Rat {
        &self.generators[g.index()].weight
    }

    pub fn name(&self, g: Gen) -> &str {
        &self.generators[g.index()].name
    }

    /// The unique generator flagged conformal, if the presentation has one.
    pub fn conformal(&self) -> Option<Gen> {
        let mut it = self.gens().filter(|g| self.generators[g.index()].is_conformal);
        let first = it.next()?;
        it.next().is_none().then_some(first)
    }

    pub fn max_weight(&self) -> Rat {
        self.generators
            .iter()
            .map(|g| g.weight.clone())
            .max()
            .unwrap_or_else(Rat::zero)
    }

    /// Replaces `k` by a number everywhere; the result has constant coefficients.
    pub fn specialize(&self, k0: &Rat) -> Result<AlgebraPresentation, Error> {
        Ok(AlgebraPresentation {
            name: self.name.clone(),
            param: self.param.clone(),
            generators: self.generators.clone(),
            table: self.table.specialize(k0)?,
            declared_c: self.declared_c.specialize(k0)?,
            critical_level: self.critical_level.clone(),
        })
    }
}
