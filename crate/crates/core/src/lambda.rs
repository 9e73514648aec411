//! λ-bracket calculus over a strongly generated vertex algebra.
//!
//! Everything is expressed through `n`-th products `a_(n) b`, `n ∈ Z`:
//! non-negative `n` are the λ-bracket coefficients, `n = -1` is the normally
//! ordered product and `a_(-q-1) b = :(∂^q a / q!) b:`. The generator table
//! is extended to arbitrary canonical monomials with
//!
//! * the Wick rule `a_(n) :bc: = :(a_(n)b)c: + :b(a_(n)c): + Σ_{i<n} C(n,i) (a_(i)b)_(n-1-i) c`,
//! * the Borcherds rule `(:ab:)_(n) c = Σ_j a_(-1-j)(b_(n+j)c) + Σ_j b_(n-1-j)(a_(j)c)`,
//! * quasi-commutativity `:a:bc:: = :b:ac:: + Σ_i (-1)^i :(∂^{i+1}(a_(i)b)/(i+1)!) c:`.
//!
//! Each correction term has strictly smaller generator degree, which is what
//! makes the recursion terminate on canonical right-nested monomials.

use alloc::collections::BTreeMap;
use alloc::rc::Rc;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::cell::RefCell;

use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::exact::{binomial, factorial, int, Rat, RatFunc};
use crate::field::{AlgebraPresentation, Factor, FieldExpr, Gen, Monomial};
use crate::Error;

/// `[a_λ b] = Σ_n λ^n/n! · coeffs[n]`, stored as the `n`-th products directly.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LambdaPoly {
    coeffs: BTreeMap<u32, FieldExpr>,
}

impl LambdaPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The `n`-th product (zero when absent).
    pub fn coeff(&self, n: u32) -> FieldExpr {
        self.coeffs.get(&n).cloned().unwrap_or_default()
    }

    pub fn get(&self, n: u32) -> Option<&FieldExpr> {
        self.coeffs.get(&n)
    }

    pub fn set(&mut self, n: u32, x: FieldExpr) {
        if x.is_zero() {
            self.coeffs.remove(&n);
        } else {
            self.coeffs.insert(n, x);
        }
    }

    pub fn add_at(&mut self, n: u32, x: &FieldExpr) {
        let mut cur = self.coeffs.remove(&n).unwrap_or_default();
        cur.add_assign(x);
        self.set(n, cur);
    }

    /// Highest stored product index.
    pub fn max_index(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (u32, &FieldExpr)> {
        self.coeffs.iter().map(|(n, x)| (*n, x))
    }

    pub fn sub(&self, other: &LambdaPoly) -> LambdaPoly {
        let mut out = self.clone();
        for (n, x) in other.iter() {
            out.add_at(n, &x.neg());
        }
        out
    }

    pub fn specialize(&self, k0: &Rat) -> Result<LambdaPoly, Error> {
        let mut out = LambdaPoly::zero();
        for (n, x) in self.iter() {
            out.set(n, x.specialize(k0)?);
        }
        Ok(out)
    }
}

impl FromIterator<(u32, FieldExpr)> for LambdaPoly {
    fn from_iter<I: IntoIterator<Item = (u32, FieldExpr)>>(iter: I) -> Self {
        let mut p = LambdaPoly::zero();
        for (n, x) in iter {
            p.add_at(n, &x);
        }
        p
    }
}

/// Stored generator brackets, keyed by ordered pair.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct BracketTable {
    entries: BTreeMap<(Gen, Gen), LambdaPoly>,
}

impl BracketTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: Gen, b: Gen, p: LambdaPoly) -> Option<LambdaPoly> {
        self.entries.insert((a, b), p)
    }

    pub fn get(&self, a: Gen, b: Gen) -> Option<&LambdaPoly> {
        self.entries.get(&(a, b))
    }

    pub fn get_mut(&mut self, a: Gen, b: Gen) -> Option<&mut LambdaPoly> {
        self.entries.get_mut(&(a, b))
    }

    pub fn remove(&mut self, a: Gen, b: Gen) -> Option<LambdaPoly> {
        self.entries.remove(&(a, b))
    }

    pub fn contains(&self, a: Gen, b: Gen) -> bool {
        self.entries.contains_key(&(a, b))
    }

    pub fn iter(&self) -> impl Iterator<Item = ((Gen, Gen), &LambdaPoly)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn specialize(&self, k0: &Rat) -> Result<BracketTable, Error> {
        let mut out = BracketTable::new();
        for ((a, b), p) in self.iter() {
            out.insert(a, b, p.specialize(k0)?);
        }
        Ok(out)
    }
}

/// Raw (not yet canonical) normally ordered expression, as written in a table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawExpr {
    Vacuum,
    Atom(Factor),
    /// `:ab:`
    Normal(alloc::boxed::Box<RawExpr>, alloc::boxed::Box<RawExpr>),
    Sum(Vec<(RatFunc, RawExpr)>),
}

impl RawExpr {
    pub fn atom(g: Gen) -> Self {
        RawExpr::Atom(Factor::new(g, 0))
    }

    pub fn normal(a: RawExpr, b: RawExpr) -> Self {
        RawExpr::Normal(alloc::boxed::Box::new(a), alloc::boxed::Box::new(b))
    }

    /// `:a1(:a2(⋯ an):):`
    pub fn nested(parts: impl IntoIterator<Item = RawExpr>) -> Self {
        let mut parts: Vec<RawExpr> = parts.into_iter().collect();
        let mut acc = parts.pop().unwrap_or(RawExpr::Vacuum);
        while let Some(p) = parts.pop() {
            acc = RawExpr::normal(p, acc);
        }
        acc
    }
}

type ProdKey = (Monomial, i64, Monomial);

/// Bracket engine for one presentation.
///
/// Holds memo tables behind `RefCell`, so a `Calculus` is confined to one
/// thread; build one per worker for parallel checks. Results do not depend
/// on evaluation order.
pub struct Calculus<'p> {
    pres: &'p AlgebraPresentation,
    /// Generator weights times `scale`, as integers.
    wgen: Vec<i64>,
    scale: i64,
    conformal: Option<Gen>,
    base: RefCell<BTreeMap<(Gen, Gen), Rc<LambdaPoly>>>,
    gen_cache: RefCell<BTreeMap<(Gen, u32, Monomial), Rc<FieldExpr>>>,
    insert_cache: RefCell<BTreeMap<(Factor, Monomial), Rc<FieldExpr>>>,
    derive_cache: RefCell<BTreeMap<Monomial, Rc<FieldExpr>>>,
    prod_cache: RefCell<BTreeMap<ProdKey, Rc<FieldExpr>>>,
}

impl<'p> Calculus<'p> {
    /// Resolves every generator pair (stored, skew-symmetric image, or
    /// synthesized from primarity) and fails if one has no source.
    pub fn new(pres: &'p AlgebraPresentation) -> Result<Self, Error> {
        let calc = Self::build(pres);
        for a in pres.gens() {
            for b in pres.gens() {
                if !calc.has_source(a, b) {
                    return Err(Error::MissingEntry {
                        left: pres.name(a).to_string(),
                        right: pres.name(b).to_string(),
                    });
                }
            }
        }
        // resolve in order of total weight so skew images only need lower pairs
        let mut pairs: Vec<(Gen, Gen)> = pres.gens().flat_map(|a| pres.gens().map(move |b| (a, b))).collect();
        pairs.sort_by_key(|&(a, b)| calc.wgen[a.index()] + calc.wgen[b.index()]);
        for (a, b) in pairs {
            calc.base(a, b);
        }
        Ok(calc)
    }

    fn build(pres: &'p AlgebraPresentation) -> Self {
        let mut scale: i64 = 1;
        for g in &pres.generators {
            scale = scale.lcm(&g.weight.denom().to_i64().unwrap_or(1));
        }
        let wgen = pres
            .generators
            .iter()
            .map(|g| {
                (&g.weight * Rat::from_integer(scale.into()))
                    .to_integer()
                    .to_i64()
                    .expect("generator weight fits in i64")
            })
            .collect();
        Calculus {
            pres,
            wgen,
            scale,
            conformal: pres.conformal(),
            base: RefCell::default(),
            gen_cache: RefCell::default(),
            insert_cache: RefCell::default(),
            derive_cache: RefCell::default(),
            prod_cache: RefCell::default(),
        }
    }

    /// Like [`Self::new`] but treats pairs without a source as commuting.
    /// Used while a table is still being assembled.
    pub fn lenient(pres: &'p AlgebraPresentation) -> Self {
        Self::build(pres)
    }

    pub fn presentation(&self) -> &'p AlgebraPresentation {
        self.pres
    }

    fn has_source(&self, a: Gen, b: Gen) -> bool {
        let t = &self.pres.table;
        t.contains(a, b) || t.contains(b, a) || self.conformal == Some(a) || self.conformal == Some(b)
    }

    /// Weight of a monomial, scaled to an integer.
    fn mweight(&self, m: &Monomial) -> i64 {
        m.factors()
            .iter()
            .map(|f| self.wgen[f.gen.index()] + f.deriv as i64 * self.scale)
            .sum()
    }

    fn fweight(&self, f: &Factor) -> i64 {
        self.wgen[f.gen.index()] + f.deriv as i64 * self.scale
    }

    /// Largest `n` for which `x_(n) y` can be nonzero: result weight
    /// `w_x + w_y - n - 1` must stay non-negative.
    fn max_index(&self, wx: i64, wy: i64) -> i64 {
        Integer::div_floor(&(wx + wy - self.scale), &self.scale)
    }

    /// `[a_λ b]` for generators, as used by the calculus.
    pub fn bracket_gen(&self, a: Gen, b: Gen) -> LambdaPoly {
        (*self.base(a, b)).clone()
    }

    fn base(&self, a: Gen, b: Gen) -> Rc<LambdaPoly> {
        if let Some(p) = self.base.borrow().get(&(a, b)) {
            return p.clone();
        }
        let p = Rc::new(self.resolve(a, b));
        self.base.borrow_mut().insert((a, b), p.clone());
        p
    }

    fn resolve(&self, a: Gen, b: Gen) -> LambdaPoly {
        let t = &self.pres.table;
        if let Some(p) = t.get(a, b) {
            return p.clone();
        }
        if let Some(p) = t.get(b, a) {
            return self.skew(p);
        }
        if self.conformal == Some(a) {
            return self.conformal_row(b);
        }
        if self.conformal == Some(b) {
            let row = self.base(b, a);
            return self.skew(&row);
        }
        LambdaPoly::zero()
    }

    /// `[L_λ b]` from primarity of `b`, or the Virasoro bracket for `b = L`.
    pub fn conformal_row(&self, b: Gen) -> LambdaPoly {
        let mut p = LambdaPoly::zero();
        p.set(0, FieldExpr::term(Monomial::single(Factor::new(b, 1)), &RatFunc::one()));
        if Some(b) == self.conformal {
            p.set(1, FieldExpr::term(Monomial::gen(b), &RatFunc::int(2)));
            p.set(
                3,
                FieldExpr::vacuum()
                    .scaled_rat(&crate::exact::rat(1, 2))
                    .scaled(&self.pres.declared_c),
            );
        } else {
            let w = RatFunc::constant(self.pres.weight(b).clone());
            p.set(1, FieldExpr::term(Monomial::gen(b), &w));
        }
        p
    }

    /// Given `[a_λ b]`, returns `[b_λ a] = -[a_{-λ-∂} b]`:
    /// `b_(n) a = Σ_j (-1)^{n+j+1} ∂^j(a_(n+j) b)/j!`.
    pub fn skew(&self, p: &LambdaPoly) -> LambdaPoly {
        let mut out = LambdaPoly::zero();
        let Some(top) = p.max_index() else {
            return out;
        };
        for n in 0..=top {
            let mut acc = FieldExpr::zero();
            for j in 0..=(top - n) {
                let Some(x) = p.get(n + j) else { continue };
                let sign = if (n + j) % 2 == 0 { -1 } else { 1 };
                let d = self.derive_n(x, j);
                acc.add_scaled(&d, &RatFunc::constant(int(sign) / factorial(j)));
            }
            out.set(n, acc);
        }
        out
    }

    /// `∂x` in canonical form.
    pub fn derive(&self, x: &FieldExpr) -> FieldExpr {
        let mut out = FieldExpr::zero();
        for (m, c) in x.iter() {
            out.add_scaled(&self.derive_mono(m), c);
        }
        out
    }

    pub fn derive_n(&self, x: &FieldExpr, times: u32) -> FieldExpr {
        let mut cur = x.clone();
        for _ in 0..times {
            if cur.is_zero() {
                break;
            }
            cur = self.derive(&cur);
        }
        cur
    }

    fn derive_mono(&self, m: &Monomial) -> Rc<FieldExpr> {
        if m.is_vacuum() {
            return Rc::new(FieldExpr::zero());
        }
        if m.len() == 1 {
            let f = m.factors()[0];
            return Rc::new(FieldExpr::term(Monomial::single(f.derived(1)), &RatFunc::one()));
        }
        if let Some(r) = self.derive_cache.borrow().get(m) {
            return r.clone();
        }
        let f = m.factors()[0];
        let rest = m.tail();
        // ∂f stays in front of rest: it sorts no later than f
        let mut out = FieldExpr::term(rest.prepend(f.derived(1)), &RatFunc::one());
        let d_rest = self.derive_mono(&rest);
        out.add_assign(&self.insert_expr(f, &d_rest));
        let out = Rc::new(out);
        self.derive_cache.borrow_mut().insert(m.clone(), out.clone());
        out
    }

    /// Canonical `:f m:` for a single factor `f` and canonical `m`.
    fn insert(&self, f: Factor, m: &Monomial) -> Rc<FieldExpr> {
        if m.is_vacuum() || f <= m.factors()[0] {
            return Rc::new(FieldExpr::term(m.prepend(f), &RatFunc::one()));
        }
        let key = (f, m.clone());
        if let Some(r) = self.insert_cache.borrow().get(&key) {
            return r.clone();
        }
        let m0 = m.factors()[0];
        let rest = m.tail();
        let inner = self.insert(f, &rest);
        let mut out = self.insert_expr(m0, &inner);
        let top = self.max_index(self.fweight(&f), self.fweight(&m0));
        for i in 0..=top.max(-1) {
            let x = self.factor_prod(f, i, &Monomial::single(m0));
            if x.is_zero() {
                continue;
            }
            let i = i as u32;
            let d = self.derive_n(&x, i + 1);
            let s = if i.is_multiple_of(2) { int(1) } else { int(-1) };
            let d = d.scaled_rat(&(s / factorial(i + 1)));
            out.add_assign(&self.nprod_expr_mono(&d, -1, &rest));
        }
        let out = Rc::new(out);
        self.insert_cache.borrow_mut().insert(key, out.clone());
        out
    }

    fn insert_expr(&self, f: Factor, x: &FieldExpr) -> FieldExpr {
        let mut out = FieldExpr::zero();
        for (m, c) in x.iter() {
            out.add_scaled(&self.insert(f, m), c);
        }
        out
    }

    /// `(∂^p a)_(n) m`
    fn factor_prod(&self, f: Factor, n: i64, m: &Monomial) -> FieldExpr {
        if n >= 0 {
            let p = f.deriv as i64;
            if p > n {
                return FieldExpr::zero();
            }
            // (∂^p a)_(n) = (-1)^p n!/(n-p)! a_(n-p)
            let mut c = int(1);
            for t in 0..p {
                c *= int(n - t);
            }
            if p % 2 == 1 {
                c = -c;
            }
            let r = self.gen_prod(f.gen, (n - p) as u32, m);
            r.scaled_rat(&c)
        } else {
            let q = (-n - 1) as u32;
            let r = self.insert(f.derived(q), m);
            if q <= 1 {
                (*r).clone()
            } else {
                r.scaled_rat(&factorial(q).recip())
            }
        }
    }

    /// `a_(n) m` for a bare generator `a` and `n >= 0`.
    fn gen_prod(&self, a: Gen, n: u32, m: &Monomial) -> Rc<FieldExpr> {
        if m.is_vacuum() || self.wgen[a.index()] + self.mweight(m) - (n as i64 + 1) * self.scale < 0 {
            return Rc::new(FieldExpr::zero());
        }
        let key = (a, n, m.clone());
        if let Some(r) = self.gen_cache.borrow().get(&key) {
            return r.clone();
        }
        let f = m.factors()[0];
        let mut out = FieldExpr::zero();
        if m.len() == 1 {
            // a_(n) ∂^p b = Σ_i C(p,i) n!/(n-i)! ∂^{p-i}(a_(n-i) b)
            let base = self.base(a, f.gen);
            let p = f.deriv;
            for i in 0..=p.min(n) {
                let Some(x) = base.get(n - i) else { continue };
                let mut c = binomial(p as i64, i);
                for t in 0..i {
                    c *= int((n - t) as i64);
                }
                out.add_scaled(&self.derive_n(x, p - i), &RatFunc::constant(c));
            }
        } else {
            let single = Monomial::single(f);
            let rest = m.tail();
            let af = self.gen_prod(a, n, &single);
            out.add_assign(&self.nprod_expr_mono(&af, -1, &rest));
            let ar = self.gen_prod(a, n, &rest);
            out.add_assign(&self.insert_expr(f, &ar));
            for i in 0..n {
                let x = self.gen_prod(a, i, &single);
                if x.is_zero() {
                    continue;
                }
                let y = self.nprod_expr_mono(&x, (n - 1 - i) as i64, &rest);
                out.add_scaled(&y, &RatFunc::constant(binomial(n as i64, i)));
            }
        }
        let out = Rc::new(out);
        self.gen_cache.borrow_mut().insert(key, out.clone());
        out
    }

    /// `x_(n) y` for canonical monomials.
    fn nprod_mono(&self, x: &Monomial, n: i64, y: &Monomial) -> Rc<FieldExpr> {
        if x.is_vacuum() {
            return Rc::new(if n == -1 {
                FieldExpr::term(y.clone(), &RatFunc::one())
            } else {
                FieldExpr::zero()
            });
        }
        if x.len() == 1 {
            return Rc::new(self.factor_prod(x.factors()[0], n, y));
        }
        if n == -1 && y.is_vacuum() {
            return Rc::new(FieldExpr::term(x.clone(), &RatFunc::one()));
        }
        let (wx, wy) = (self.mweight(x), self.mweight(y));
        if n >= 0 && n > self.max_index(wx, wy) {
            return Rc::new(FieldExpr::zero());
        }
        let key = (x.clone(), n, y.clone());
        if let Some(r) = self.prod_cache.borrow().get(&key) {
            return r.clone();
        }
        let f = x.factors()[0];
        let b = x.tail();
        let (wf, wb) = (self.fweight(&f), self.mweight(&b));
        let mut out = FieldExpr::zero();
        // Σ_j f_(-1-j)(b_(n+j) y)
        let top = self.max_index(wb, wy);
        let mut j = 0i64;
        while n + j <= top {
            let z = self.nprod_mono(&b, n + j, y);
            for (m, c) in z.iter() {
                out.add_scaled(&self.factor_prod(f, -1 - j, m), c);
            }
            j += 1;
        }
        // Σ_j b_(n-1-j)(f_(j) y)
        let top = self.max_index(wf, wy);
        for j in 0..=top.max(-1) {
            let z = self.factor_prod(f, j, y);
            if z.is_zero() {
                continue;
            }
            out.add_assign(&self.nprod_mono_expr(&b, n - 1 - j, &z));
        }
        let out = Rc::new(out);
        self.prod_cache.borrow_mut().insert(key, out.clone());
        out
    }

    /// `x_(n) m` for an expression `x` and a monomial `m`.
    fn nprod_expr_mono(&self, x: &FieldExpr, n: i64, m: &Monomial) -> FieldExpr {
        let mut out = FieldExpr::zero();
        for (xm, c) in x.iter() {
            out.add_scaled(&self.nprod_mono(xm, n, m), c);
        }
        out
    }

    /// `x_(n) y` for a monomial `x` and an expression `y`.
    fn nprod_mono_expr(&self, x: &Monomial, n: i64, y: &FieldExpr) -> FieldExpr {
        let mut out = FieldExpr::zero();
        for (ym, c) in y.iter() {
            out.add_scaled(&self.nprod_mono(x, n, ym), c);
        }
        out
    }

    /// `a_(n) b` for canonical expressions and any integer `n`. Negative
    /// products are normally ordered products of derivatives of `a` with `b`.
    pub fn nth_product(&self, a: &FieldExpr, n: i64, b: &FieldExpr) -> FieldExpr {
        let mut out = FieldExpr::zero();
        for (am, ac) in a.iter() {
            for (bm, bc) in b.iter() {
                out.add_scaled(&self.nprod_mono(am, n, bm), &(ac * bc));
            }
        }
        out
    }

    /// `[a_λ b]` for canonical expressions.
    pub fn bracket(&self, a: &FieldExpr, b: &FieldExpr) -> LambdaPoly {
        let mut out = LambdaPoly::zero();
        for (am, ac) in a.iter() {
            for (bm, bc) in b.iter() {
                let top = self.max_index(self.mweight(am), self.mweight(bm));
                let c = ac * bc;
                for n in 0..=top.max(-1) {
                    let x = self.nprod_mono(am, n, bm);
                    if !x.is_zero() {
                        out.add_at(n as u32, &x.scaled(&c));
                    }
                }
            }
        }
        out
    }

    /// `a_(n) b` for generators, `n >= 0`; cheaper than [`Self::nth_product`].
    pub fn gen_product(&self, a: Gen, n: u32, b: &FieldExpr) -> FieldExpr {
        let mut out = FieldExpr::zero();
        for (m, c) in b.iter() {
            out.add_scaled(&self.gen_prod(a, n, m), c);
        }
        out
    }

    /// Rewrites a raw normally ordered expression into canonical monomials.
    pub fn canonicalize(&self, raw: &RawExpr) -> FieldExpr {
        match raw {
            RawExpr::Vacuum => FieldExpr::vacuum(),
            RawExpr::Atom(f) => FieldExpr::term(Monomial::single(*f), &RatFunc::one()),
            RawExpr::Normal(a, b) => {
                let a = self.canonicalize(a);
                let b = self.canonicalize(b);
                self.nth_product(&a, -1, &b)
            }
            RawExpr::Sum(parts) => {
                let mut out = FieldExpr::zero();
                for (c, p) in parts {
                    out.add_scaled(&self.canonicalize(p), c);
                }
                out
            }
        }
    }

    /// Brings an arbitrary (possibly non-canonical) expression to canonical form.
    pub fn normalize(&self, x: &FieldExpr) -> FieldExpr {
        let mut out = FieldExpr::zero();
        for (m, c) in x.iter() {
            if m.is_canonical() {
                out.add_term(m.clone(), c);
                continue;
            }
            let raw = RawExpr::nested(m.factors().iter().map(|f| RawExpr::Atom(*f)));
            out.add_scaled(&self.canonicalize(&raw), c);
        }
        out
    }

    /// Largest `n` with `x_(n) y` possibly nonzero for monomials `x`, `y`.
    pub fn product_bound(&self, x: &Monomial, y: &Monomial) -> i64 {
        self.max_index(self.mweight(x), self.mweight(y))
    }

    /// Number of memoized entries, for diagnostics.
    pub fn cache_size(&self) -> usize {
        self.gen_cache.borrow().len()
            + self.insert_cache.borrow().len()
            + self.derive_cache.borrow().len()
            + self.prod_cache.borrow().len()
    }
}

/// One table entry as written: product index `n` (pole degree minus one)
/// paired with an unnormalized coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawEntry {
    pub left: Gen,
    pub right: Gen,
    pub products: Vec<(u32, RawExpr)>,
}

/// Canonicalizes raw entries into a bracket table for the generators of
/// `skeleton` (its own table is ignored).
///
/// A coefficient of `a_(n) b` has weight below `Δ_a + Δ_b`, and normal
/// ordering it only uses brackets of lower total weight, so entries are
/// processed in increasing total weight against the table built so far.
pub fn build_table(skeleton: &AlgebraPresentation, raw: &[RawEntry]) -> BracketTable {
    let mut work = skeleton.clone();
    work.table = BracketTable::new();
    let total = |e: &RawEntry| skeleton.weight(e.left) + skeleton.weight(e.right);
    let mut order: Vec<&RawEntry> = raw.iter().collect();
    order.sort_by_key(|e| total(e));
    let mut i = 0;
    while i < order.len() {
        let level = total(order[i]);
        let mut j = i;
        let mut done = Vec::new();
        {
            let calc = Calculus::lenient(&work);
            while j < order.len() && total(order[j]) == level {
                let e = order[j];
                let poly: LambdaPoly = e.products.iter().map(|(n, x)| (*n, calc.canonicalize(x))).collect();
                done.push((e.left, e.right, poly));
                j += 1;
            }
        }
        for (a, b, poly) in done {
            match work.table.get_mut(a, b) {
                Some(existing) => {
                    for (n, x) in poly.iter() {
                        existing.add_at(n, x);
                    }
                }
                None => {
                    work.table.insert(a, b, poly);
                }
            }
        }
        i = j;
    }
    work.table
}

/// The same algebra with generators listed in `order` (a permutation of the
/// current generators); every table entry is re-normalized in the new basis.
pub fn reorder_generators(p: &AlgebraPresentation, order: &[Gen]) -> AlgebraPresentation {
    let mut new_index = alloc::vec![Gen(0); order.len()];
    for (i, g) in order.iter().enumerate() {
        new_index[g.index()] = Gen(i as u16);
    }
    let mut q = p.clone();
    q.generators = order.iter().map(|g| p.generators[g.index()].clone()).collect();
    let raw: Vec<RawEntry> = p
        .table
        .iter()
        .map(|((a, b), poly)| RawEntry {
            left: new_index[a.index()],
            right: new_index[b.index()],
            products: poly
                .iter()
                .map(|(n, x)| {
                    let parts = x
                        .iter()
                        .map(|(m, c)| {
                            let atoms = m
                                .factors()
                                .iter()
                                .map(|f| RawExpr::Atom(Factor::new(new_index[f.gen.index()], f.deriv)));
                            (c.clone(), RawExpr::nested(atoms))
                        })
                        .collect();
                    (n, RawExpr::Sum(parts))
                })
                .collect(),
        })
        .collect();
    q.table = build_table(&q, &raw);
    q
}
