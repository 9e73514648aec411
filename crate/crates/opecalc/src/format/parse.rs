//! Recursive-descent parser for `.ope` files.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive};
use opecalc_core::exact::Rat;
use opecalc_core::field::{Factor, GeneratorDecl};
use opecalc_core::lambda::{build_table, BracketTable, RawEntry, RawExpr};
use opecalc_core::{AlgebraPresentation, Gen, RatFunc};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Location {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{loc}: {message}")]
pub struct ParseError {
    pub loc: Location,
    pub message: String,
}

/// Where each stored entry and product came from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceMap {
    pub generators: Vec<Location>,
    pub entries: BTreeMap<(Gen, Gen), Location>,
    /// Keyed by product index `n` (pole degree minus one).
    pub products: BTreeMap<(Gen, Gen, u32), Location>,
}

/// A parsed file: the presentation plus source locations for diagnostics.
#[derive(Clone, Debug)]
pub struct Document {
    pub presentation: AlgebraPresentation,
    pub source: SourceMap,
}

pub fn parse(src: &str) -> Result<Document, ParseError> {
    Parser::new(src).file()
}

/// Intermediate value of an expression: a scalar in `Q(k)` or a linear
/// combination of raw normally ordered products.
enum Val {
    Scalar(RatFunc),
    Field(Vec<(RatFunc, RawExpr)>),
}

impl Val {
    fn into_terms(self) -> Vec<(RatFunc, RawExpr)> {
        match self {
            Val::Scalar(c) if c.is_zero() => Vec::new(),
            Val::Scalar(c) => vec![(c, RawExpr::Vacuum)],
            Val::Field(t) => t,
        }
    }

    fn scale(self, c: &RatFunc) -> Val {
        match self {
            Val::Scalar(s) => Val::Scalar(&s * c),
            Val::Field(t) => Val::Field(t.into_iter().map(|(s, x)| (&s * c, x)).collect()),
        }
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    param: String,
    names: BTreeMap<String, Gen>,
    _src: &'a str,
}

const KEYWORDS: &[&str] = &[
    "algebra",
    "param",
    "critical",
    "central_charge",
    "generator",
    "weight",
    "conformal",
    "ope",
    "pole",
];

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            chars: src.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
            param: "k".into(),
            names: BTreeMap::new(),
            _src: src,
        }
    }

    fn loc(&self) -> Location {
        Location {
            line: self.line,
            col: self.col,
        }
    }

    fn err<T>(&self, loc: Location, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            loc,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.peek().is_none()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            let loc = self.loc();
            let found = self.peek().map_or("end of file".to_string(), |x| format!("`{x}`"));
            self.err(loc, format!("expected `{c}`, found {found}"))
        }
    }

    /// Bare identifier `[A-Za-z_][A-Za-z0-9_]*`, without consuming anything
    /// when none is present.
    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let c = self.peek()?;
        if !(c.is_ascii_alphabetic() || c == '_') {
            return None;
        }
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        Some(s)
    }

    /// A name in declaration position: identifier plus any trailing `+`/`-`.
    fn decl_name(&mut self, what: &str) -> Result<(String, Location), ParseError> {
        self.skip_ws();
        let loc = self.loc();
        let Some(mut s) = self.ident() else {
            return self.err(loc, format!("expected {what}"));
        };
        while let Some(c @ ('+' | '-')) = self.peek() {
            s.push(c);
            self.bump();
        }
        Ok((s, loc))
    }

    fn generator_ref(&mut self) -> Result<Gen, ParseError> {
        let (name, loc) = self.decl_name("a generator name")?;
        match self.names.get(&name) {
            Some(g) => Ok(*g),
            None => self.err(loc, format!("unknown generator `{name}`")),
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let save = (self.pos, self.line, self.col);
        match self.ident() {
            Some(s) if s == kw => true,
            _ => {
                (self.pos, self.line, self.col) = save;
                false
            }
        }
    }

    fn file(mut self) -> Result<Document, ParseError> {
        self.skip_ws();
        let loc = self.loc();
        if !self.keyword("algebra") {
            return self.err(loc, "file must start with `algebra NAME`");
        }
        let (name, _) = self.decl_name("an algebra name")?;
        let mut generators: Vec<GeneratorDecl> = Vec::new();
        let mut source = SourceMap::default();
        let mut critical: Option<Rat> = None;
        let mut charge: Option<RatFunc> = None;
        let mut raw: Vec<RawEntry> = Vec::new();
        let mut param_fixed = false;

        while !self.at_end() {
            let loc = self.loc();
            let Some(kw) = self.ident() else {
                return self.err(loc, "expected a statement keyword");
            };
            match kw.as_str() {
                "param" => {
                    if param_fixed {
                        return self.err(loc, "`param` must come before any expression and appear once");
                    }
                    let (p, ploc) = self.decl_name("a parameter name")?;
                    if p.contains(['+', '-']) || KEYWORDS.contains(&p.as_str()) {
                        return self.err(ploc, format!("invalid parameter name `{p}`"));
                    }
                    self.param = p;
                    param_fixed = true;
                }
                "critical" => {
                    param_fixed = true;
                    let v = self.scalar_expr()?;
                    let Some(c) = v.as_constant() else {
                        return self.err(loc, "critical level must be a rational number");
                    };
                    if critical.replace(c).is_some() {
                        return self.err(loc, "duplicate `critical` statement");
                    }
                }
                "central_charge" => {
                    param_fixed = true;
                    let v = self.scalar_expr()?;
                    if charge.replace(v).is_some() {
                        return self.err(loc, "duplicate `central_charge` statement");
                    }
                }
                "generator" => {
                    param_fixed = true;
                    let (gname, gloc) = self.decl_name("a generator name")?;
                    if gname == self.param || KEYWORDS.contains(&gname.as_str()) || gname == "NO" {
                        return self.err(gloc, format!("`{gname}` is reserved"));
                    }
                    if self.names.contains_key(&gname) {
                        return self.err(gloc, format!("duplicate generator `{gname}`"));
                    }
                    let wloc = self.loc();
                    if !self.keyword("weight") {
                        return self.err(wloc, "expected `weight`");
                    }
                    let w = self.scalar_expr()?;
                    let Some(w) = w.as_constant() else {
                        return self.err(wloc, "weight must be a rational number");
                    };
                    let is_conformal = self.keyword("conformal");
                    self.names.insert(gname.clone(), Gen(generators.len() as u16));
                    source.generators.push(gloc);
                    generators.push(GeneratorDecl {
                        name: gname,
                        weight: w,
                        is_conformal,
                    });
                }
                "ope" => {
                    param_fixed = true;
                    let a = self.generator_ref()?;
                    let b = self.generator_ref()?;
                    for g in [a, b] {
                        if generators[g.index()].is_conformal {
                            return self.err(
                                loc,
                                format!(
                                    "brackets with the conformal generator `{}` are synthesized and may not be stored",
                                    generators[g.index()].name
                                ),
                            );
                        }
                    }
                    if source.entries.insert((a, b), loc).is_some() {
                        return self.err(loc, "duplicate ope entry for this ordered pair");
                    }
                    self.expect('{')?;
                    let mut products = Vec::new();
                    loop {
                        if self.eat('}') {
                            break;
                        }
                        let ploc = self.loc();
                        if !self.keyword("pole") {
                            return self.err(ploc, "expected `pole` or `}`");
                        }
                        let dloc = self.loc();
                        let d = self.scalar_expr()?;
                        let n = match d.as_constant() {
                            Some(d) if d.is_integer() && d.is_positive() => (d - Rat::one()).to_integer().to_u32(),
                            Some(d) if d.is_positive() => {
                                return self.err(dloc, format!("pole degree {d} is not an integer"));
                            }
                            _ => None,
                        };
                        let Some(n) = n else {
                            return self.err(dloc, "pole degree must be a positive integer");
                        };
                        self.expect(':')?;
                        let body = self.expr()?;
                        self.expect(';')?;
                        if source.products.insert((a, b, n), ploc).is_some() {
                            return self.err(ploc, "duplicate pole in this entry");
                        }
                        products.push((n, RawExpr::Sum(body.into_terms())));
                    }
                    raw.push(RawEntry {
                        left: a,
                        right: b,
                        products,
                    });
                }
                other => {
                    return self.err(loc, format!("unknown statement `{other}`"));
                }
            }
        }
        let end = self.loc();
        let Some(critical_level) = critical else {
            return self.err(end, "missing `critical` statement");
        };
        let Some(declared_c) = charge else {
            return self.err(end, "missing `central_charge` statement");
        };
        let mut presentation = AlgebraPresentation {
            name,
            param: self.param.clone(),
            generators,
            table: BracketTable::new(),
            declared_c,
            critical_level,
        };
        presentation.table = build_table(&presentation, &raw);
        Ok(Document { presentation, source })
    }

    /// An expression that must not mention fields.
    fn scalar_expr(&mut self) -> Result<RatFunc, ParseError> {
        self.skip_ws();
        let loc = self.loc();
        match self.expr()? {
            Val::Scalar(c) => Ok(c),
            Val::Field(_) => self.err(loc, "expected a scalar expression"),
        }
    }

    fn expr(&mut self) -> Result<Val, ParseError> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            let neg = match self.peek() {
                Some('+') => false,
                Some('-') => true,
                _ => return Ok(acc),
            };
            self.bump();
            let mut rhs = self.term()?;
            if neg {
                rhs = rhs.scale(&RatFunc::int(-1));
            }
            acc = match (acc, rhs) {
                (Val::Scalar(a), Val::Scalar(b)) => Val::Scalar(&a + &b),
                (a, b) => {
                    let mut t = a.into_terms();
                    t.extend(b.into_terms());
                    Val::Field(t)
                }
            };
        }
    }

    fn term(&mut self) -> Result<Val, ParseError> {
        let mut acc = self.unary()?;
        loop {
            self.skip_ws();
            let op = match self.peek() {
                Some(c @ ('*' | '/')) => c,
                _ => return Ok(acc),
            };
            self.bump();
            self.skip_ws();
            let loc = self.loc();
            let rhs = self.unary()?;
            acc = match (op, acc, rhs) {
                ('*', Val::Scalar(a), Val::Scalar(b)) => Val::Scalar(&a * &b),
                ('*', Val::Scalar(a), f) | ('*', f, Val::Scalar(a)) => f.scale(&a),
                ('*', _, _) => {
                    return self.err(
                        loc,
                        "product of two fields; write NO(a, b) for the normally ordered product",
                    )
                }
                (_, a, Val::Scalar(b)) => match b.inv() {
                    Ok(inv) => a.scale(&inv),
                    Err(_) => return self.err(loc, "division by zero"),
                },
                _ => return self.err(loc, "cannot divide by a field"),
            };
        }
    }

    fn unary(&mut self) -> Result<Val, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('-') => {
                self.bump();
                Ok(self.unary()?.scale(&RatFunc::int(-1)))
            }
            Some('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Val, ParseError> {
        let base = self.primary()?;
        if !self.eat('^') {
            return Ok(base);
        }
        self.skip_ws();
        let loc = self.loc();
        let e = self.natural()?;
        match base {
            Val::Scalar(c) => Ok(Val::Scalar(c.pow(e))),
            Val::Field(_) => self.err(loc, "fields cannot be raised to a power; use NO"),
        }
    }

    fn natural(&mut self) -> Result<u32, ParseError> {
        self.skip_ws();
        let loc = self.loc();
        let mut s = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.bump();
        }
        s.parse().or_else(|_| self.err(loc, "expected a non-negative integer"))
    }

    fn primary(&mut self) -> Result<Val, ParseError> {
        self.skip_ws();
        let loc = self.loc();
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(c) = self.peek().filter(char::is_ascii_digit) {
                    s.push(c);
                    self.bump();
                }
                let n: num_bigint::BigInt = s.parse().expect("digits");
                Ok(Val::Scalar(RatFunc::constant(Rat::from_integer(n))))
            }
            Some('(') => {
                self.bump();
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => self.named(loc),
            Some(c) => self.err(loc, format!("unexpected `{c}`")),
            None => self.err(loc, "unexpected end of file"),
        }
    }

    /// Parameter, generator, `dN(NAME)` or `NO(x, y)`.
    fn named(&mut self, loc: Location) -> Result<Val, ParseError> {
        let id = self.ident().expect("checked by caller");
        if id == "NO" && self.peek() == Some('(') {
            self.bump();
            let a = self.expr()?;
            self.expect(',')?;
            let b = self.expr()?;
            self.expect(')')?;
            let raw = RawExpr::normal(RawExpr::Sum(a.into_terms()), RawExpr::Sum(b.into_terms()));
            return Ok(Val::Field(vec![(RatFunc::one(), raw)]));
        }
        if let Some(order) = id.strip_prefix('d').and_then(|d| d.parse::<u32>().ok()) {
            if self.peek() == Some('(') {
                self.bump();
                let g = self.generator_ref()?;
                self.expect(')')?;
                return Ok(field_atom(Factor::new(g, order)));
            }
        }
        // longest declared name: identifier plus trailing signs
        let mut best: Option<(usize, Gen)> = self.names.get(&id).map(|g| (0, *g));
        let mut s = id.clone();
        let mut k = 0;
        while let Some(c @ ('+' | '-')) = self.peek_at(k) {
            s.push(c);
            k += 1;
            if let Some(g) = self.names.get(&s) {
                best = Some((k, *g));
            }
        }
        if let Some((extra, g)) = best {
            for _ in 0..extra {
                self.bump();
            }
            return Ok(field_atom(Factor::new(g, 0)));
        }
        if id == self.param {
            return Ok(Val::Scalar(RatFunc::var()));
        }
        self.err(loc, format!("unknown name `{id}`"))
    }
}

fn field_atom(f: Factor) -> Val {
    Val::Field(vec![(RatFunc::one(), RawExpr::Atom(f))])
}

#[cfg(test)]
mod tests {
    use super::*;
    use opecalc_core::exact::rat;
    use opecalc_core::{FieldExpr, Monomial};

    const HEAD: &str = "algebra t\ncritical -3\ncentral_charge -(1+3*k)*(3+2*k)/(3+k)\n\
        generator J weight 1\ngenerator G+ weight 3/2\ngenerator G- weight 3/2\ngenerator L weight 2 conformal\n";

    fn doc(body: &str) -> Result<Document, ParseError> {
        parse(&format!("{HEAD}{body}"))
    }

    #[test]
    fn vacuum_entry() {
        let d = doc("ope J J { pole 2: (3+2*k); }").unwrap();
        let p = d.presentation;
        let jj = p.table.get(Gen(0), Gen(0)).unwrap();
        let want = FieldExpr::vacuum().scaled(&RatFunc::from_poly(opecalc_core::UniPoly::from_ints(&[3, 2])));
        assert_eq!(jj.coeff(1), want);
        assert_eq!(jj.max_index(), Some(1));
        assert_eq!(p.critical_level, rat(-3, 1));
    }

    #[test]
    fn signed_names_and_derivatives() {
        let d = doc("ope G+ G+ { }\nope J G+ { pole 1: G+; }\nope J G- { pole 1: -G-; }\n\
                     ope G+ G- { pole 1: 2*NO(J,J) - 3/2*d1(J) + k*G+ - G-; }")
        .unwrap();
        let p = d.presentation;
        assert!(p.table.get(Gen(1), Gen(1)).unwrap().is_zero());
        let x = p.table.get(Gen(1), Gen(2)).unwrap().coeff(0);
        assert_eq!(x.coeff(&Monomial::gen(Gen(1))), RatFunc::var());
        assert_eq!(x.coeff(&Monomial::gen(Gen(2))), RatFunc::int(-1));
        assert_eq!(
            x.coeff(&Monomial::single(Factor::new(Gen(0), 1))),
            RatFunc::ratio(-3, 2)
        );
    }

    #[test]
    fn errors_are_located() {
        let e = doc("ope J X { }").unwrap_err();
        assert_eq!(e.loc.line, 8);
        assert!(e.message.contains("unknown generator"));
        assert!(doc("ope L J { }").unwrap_err().message.contains("synthesized"));
        assert!(doc("generator J weight 2")
            .unwrap_err()
            .message
            .contains("duplicate generator"));
        assert!(doc("ope J J { pole 2: J*J; }").unwrap_err().message.contains("NO"));
        assert!(doc("ope J J { pole 3/2: 1; }")
            .unwrap_err()
            .message
            .contains("not an integer"));
        assert!(doc("ope J J { }\nope J J { }")
            .unwrap_err()
            .message
            .contains("duplicate ope"));
        assert!(doc("ope J J { pole 2: 1 }").unwrap_err().message.contains("`;`"));
    }

    #[test]
    fn reduces_coefficients() {
        let d = doc("ope J J { pole 2: (6+4*k)/2; }").unwrap();
        let jj = d.presentation.table.get(Gen(0), Gen(0)).unwrap().coeff(1);
        assert_eq!(
            jj.vacuum_coeff(),
            RatFunc::from_poly(opecalc_core::UniPoly::from_ints(&[3, 2]))
        );
    }
}
