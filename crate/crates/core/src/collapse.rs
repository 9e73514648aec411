//! Collapsing levels: where the simple quotient is trivial, where it is the
//! Virasoro algebra, and bounded-weight evidence for ideals generated by a
//! set of generators at a fixed level.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::exact::{int, rational_roots, Rat, RatFunc, UniPoly};
use crate::field::{AlgebraPresentation, FieldExpr, Gen, Monomial};
use crate::lambda::Calculus;
use crate::Error;

/// Solutions of a system of coefficient conditions in `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSet {
    /// Rational solutions, increasing.
    pub levels: Vec<Rat>,
    /// Part of the common factor without rational roots. The zero polynomial
    /// means every condition vanished identically.
    pub residual: UniPoly,
    /// Levels removed from consideration, increasing.
    pub excluded: Vec<Rat>,
}

/// A vacuum or `L` coefficient that entered a level condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition {
    /// `left_(product) right`
    pub left: Gen,
    pub right: Gen,
    pub product: i64,
    pub coeff: RatFunc,
}

/// Critical level plus every rational pole of a stored coefficient or of `c`.
pub fn excluded_levels(p: &AlgebraPresentation) -> Vec<Rat> {
    let mut out = BTreeSet::new();
    out.insert(p.critical_level.clone());
    let mut dens: Vec<UniPoly> = alloc::vec![p.declared_c.denom().clone()];
    for (_, poly) in p.table.iter() {
        for (_, x) in poly.iter() {
            for (_, c) in x.iter() {
                if !c.denom().is_one() {
                    dens.push(c.denom().clone());
                }
            }
        }
    }
    for d in dens {
        if d.degree().unwrap_or(0) > 0 {
            if let Ok(r) = rational_roots(&d) {
                out.extend(r.values().cloned());
            }
        }
    }
    out.into_iter().collect()
}

/// `n` with `left_(n) right` at pole degree `Δ_l + Δ_r - shift`, when integral.
fn product_at(p: &AlgebraPresentation, left: Gen, right: Gen, shift: i64) -> Option<i64> {
    let pole = p.weight(left) + p.weight(right) - int(shift);
    pole.is_integer()
        .then(|| i64::try_from(pole.to_integer()).ok())
        .flatten()
        .map(|d| d - 1)
}

/// Vacuum pairings `c_{i,j} = (J^j)_(w_i + w_j - 1) J^i` over all ordered pairs.
pub fn vacuum_pairings(calc: &Calculus<'_>) -> Vec<Condition> {
    let p = calc.presentation();
    let mut out = Vec::new();
    for i in p.gens() {
        for j in p.gens() {
            let Some(n) = product_at(p, j, i, 0) else { continue };
            let x = calc.nth_product(&FieldExpr::gen(j), n, &FieldExpr::gen(i));
            out.push(Condition {
                left: j,
                right: i,
                product: n,
                coeff: x.vacuum_coeff(),
            });
        }
    }
    out
}

/// Conditions for the simple quotient to be the Virasoro algebra: for each
/// non-conformal `J^i` and every `J^j`, the vacuum part of the top pole and
/// the `L` coefficient two poles lower.
pub fn virasoro_conditions(calc: &Calculus<'_>) -> Result<Vec<Condition>, Error> {
    let p = calc.presentation();
    let l = p.conformal().ok_or(Error::NoConformalVector)?;
    let lm = Monomial::gen(l);
    let mut out = Vec::new();
    for i in p.gens().filter(|&g| g != l) {
        for j in p.gens() {
            let (a, b) = (FieldExpr::gen(j), FieldExpr::gen(i));
            if let Some(n) = product_at(p, j, i, 0) {
                out.push(Condition {
                    left: j,
                    right: i,
                    product: n,
                    coeff: calc.nth_product(&a, n, &b).vacuum_coeff(),
                });
            }
            if let Some(n) = product_at(p, j, i, 2) {
                out.push(Condition {
                    left: j,
                    right: i,
                    product: n,
                    coeff: calc.nth_product(&a, n, &b).coeff(&lm),
                });
            }
        }
    }
    Ok(out)
}

/// Common rational zeros of the given coefficients, outside `excluded`.
fn solve(conds: &[Condition], excluded: &[Rat]) -> LevelSet {
    let mut common: Option<UniPoly> = None;
    for c in conds.iter().filter(|c| !c.coeff.is_zero()) {
        let num = c.coeff.numer().clone();
        common = Some(match common {
            None => num,
            Some(g) => UniPoly::gcd(&g, &num),
        });
    }
    let Some(common) = common else {
        return LevelSet {
            levels: Vec::new(),
            residual: UniPoly::zero(),
            excluded: excluded.to_vec(),
        };
    };
    let roots = rational_roots(&common).expect("gcd of nonzero polynomials");
    LevelSet {
        levels: roots.values().filter(|r| !excluded.contains(r)).cloned().collect(),
        residual: roots.residual,
        excluded: excluded.to_vec(),
    }
}

/// Levels where every vacuum pairing vanishes, so the simple quotient is `C`.
pub fn trivial_levels(calc: &Calculus<'_>) -> LevelSet {
    let p = calc.presentation();
    solve(&vacuum_pairings(calc), &excluded_levels(p))
}

/// Levels where the simple quotient is the Virasoro algebra; trivial levels
/// are removed since there `L` itself lies in the maximal ideal.
pub fn virasoro_levels(calc: &Calculus<'_>) -> Result<LevelSet, Error> {
    let p = calc.presentation();
    let mut set = solve(&virasoro_conditions(calc)?, &excluded_levels(p));
    let trivial = trivial_levels(calc);
    set.levels.retain(|k| !trivial.levels.contains(k));
    Ok(set)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    /// A vacuum pairing with some generator is nonzero, so the generator
    /// cannot lie in a proper ideal.
    Survives,
    /// All pairings vanish and the generated ideal stays proper up to the
    /// explored weight.
    InIdealCandidate,
    Unknown,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Survives => "survives",
            Verdict::InIdealCandidate => "in-ideal-candidate",
            Verdict::Unknown => "unknown",
        }
    }
}

fn check_level(p: &AlgebraPresentation, k0: &Rat) -> Result<(), Error> {
    if excluded_levels(p).contains(k0) {
        return Err(Error::ExcludedLevel(k0.clone()));
    }
    Ok(())
}

/// Per-generator evidence at a fixed level.
///
/// Generators with a nonzero vacuum pairing survive. The remaining ones are
/// tried as a block; if that ideal is proper they are all candidates,
/// otherwise they are added one at a time by increasing weight and those
/// whose addition makes the ideal improper are left unknown.
pub fn generator_survivors(p: &AlgebraPresentation, k0: &Rat) -> Result<Vec<(Gen, Verdict)>, Error> {
    check_level(p, k0)?;
    let q = p.specialize(k0)?;
    let calc = Calculus::new(&q)?;
    let mut pairs_nonzero = BTreeSet::new();
    for c in vacuum_pairings(&calc) {
        if !c.coeff.is_zero() {
            pairs_nonzero.insert(c.left);
            pairs_nonzero.insert(c.right);
        }
    }
    let mut verdict: BTreeMap<Gen, Verdict> = p
        .gens()
        .map(|g| {
            (
                g,
                if pairs_nonzero.contains(&g) {
                    Verdict::Survives
                } else {
                    Verdict::Unknown
                },
            )
        })
        .collect();
    let mut rest: Vec<Gen> = p.gens().filter(|g| !pairs_nonzero.contains(g)).collect();
    rest.sort_by(|a, b| p.weight(*a).cmp(p.weight(*b)).then(a.cmp(b)));
    if rest.is_empty() {
        return Ok(verdict.into_iter().collect());
    }
    let cutoff = survivor_cutoff(p);
    if closure_in(&calc, &rest, &cutoff).proper {
        for g in &rest {
            verdict.insert(*g, Verdict::InIdealCandidate);
        }
    } else {
        let mut marked: Vec<Gen> = Vec::new();
        for g in rest {
            let mut trial = marked.clone();
            trial.push(g);
            if closure_in(&calc, &trial, &cutoff).proper {
                marked = trial;
                verdict.insert(g, Verdict::InIdealCandidate);
            }
        }
    }
    Ok(verdict.into_iter().collect())
}

/// Weight explored by [`generator_survivors`]: one above the heaviest generator.
fn survivor_cutoff(p: &AlgebraPresentation) -> Rat {
    p.max_weight() + int(1)
}

/// Default cutoff for [`ideal_closure`]: `2 + 2·max weight`.
pub fn default_cutoff(p: &AlgebraPresentation) -> Rat {
    int(2) + p.max_weight() * int(2)
}

/// Bounded-weight closure of an ideal generated by generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealEvidence {
    pub level: Rat,
    pub seeds: Vec<Gen>,
    pub cutoff: Rat,
    /// The vacuum was not reached below the cutoff. Evidence only: the
    /// truncated closure can miss paths through heavier states.
    pub proper: bool,
    /// Elements of the closure of the form `generator - (other terms)`, one
    /// per generator that the closure eliminates, normalized to coefficient 1.
    pub relations: Vec<FieldExpr>,
    /// Dimension of the truncated closure per weight.
    pub dimensions: Vec<(Rat, usize)>,
}

/// Closes `seeds` under all products with generators and under `∂`, keeping
/// only states of weight at most `cutoff`.
pub fn ideal_closure(p: &AlgebraPresentation, k0: &Rat, seeds: &[Gen], cutoff: &Rat) -> Result<IdealEvidence, Error> {
    check_level(p, k0)?;
    let max_weight = p.max_weight();
    if cutoff < &max_weight {
        return Err(Error::CutoffTooSmall {
            cutoff: cutoff.clone().into(),
            max_weight: max_weight.into(),
        });
    }
    let q = p.specialize(k0)?;
    let calc = Calculus::new(&q)?;
    let mut ev = closure_in(&calc, seeds, cutoff);
    ev.level = k0.clone();
    Ok(ev)
}

/// Row-echelon bases of the closure, one per weight. Rows are keyed by their
/// smallest monomial, so single generators become pivots before composites.
#[derive(Default)]
struct Echelon {
    rows: BTreeMap<Monomial, FieldExpr>,
}

impl Echelon {
    /// Reduces `x` against the basis; returns the nonzero remainder, normalized.
    fn insert(&mut self, mut x: FieldExpr) -> Option<FieldExpr> {
        loop {
            let (lead, c) = match x.iter().next() {
                None => return None,
                Some((m, c)) => (m.clone(), c.clone()),
            };
            match self.rows.get(&lead) {
                Some(row) => x.add_scaled(row, &-c),
                None => {
                    let x = x.scaled(&c.inv().expect("nonzero"));
                    self.rows.insert(lead, x.clone());
                    return Some(x);
                }
            }
        }
    }

    /// Fully reduced basis.
    fn reduced(&self) -> Vec<FieldExpr> {
        let mut rows: Vec<(Monomial, FieldExpr)> = self.rows.iter().map(|(m, x)| (m.clone(), x.clone())).collect();
        for i in (0..rows.len()).rev() {
            let (pivot, row) = rows[i].clone();
            for (_, other) in rows.iter_mut().take(i) {
                let c = other.coeff(&pivot);
                if !c.is_zero() {
                    other.add_scaled(&row, &-c);
                }
            }
        }
        rows.into_iter().map(|(_, x)| x).collect()
    }
}

fn closure_in(calc: &Calculus<'_>, seeds: &[Gen], cutoff: &Rat) -> IdealEvidence {
    let p = calc.presentation();
    let weights = p.weights();
    let mut spaces: BTreeMap<Rat, Echelon> = BTreeMap::new();
    let mut queue: VecDeque<(Rat, FieldExpr)> = VecDeque::new();
    let mut proper = true;

    let mut seeds: Vec<Gen> = seeds.to_vec();
    seeds.sort();
    seeds.dedup();
    for g in &seeds {
        let w = p.weight(*g).clone();
        if let Some(x) = spaces.entry(w.clone()).or_default().insert(FieldExpr::gen(*g)) {
            queue.push_back((w, x));
        }
    }
    'work: while let Some((w, x)) = queue.pop_front() {
        let mut produced: Vec<(Rat, FieldExpr)> = Vec::new();
        if &w + Rat::one() <= *cutoff {
            produced.push((&w + Rat::one(), calc.derive(&x)));
        }
        for g in p.gens() {
            let wg = p.weight(g);
            // result weight wg + w - n - 1 must lie in [0, cutoff]
            let top = wg + &w - Rat::one();
            let lo = (&top - cutoff).ceil();
            let hi = top.floor();
            let mut n = lo;
            while n <= hi {
                let rw = &top - &n;
                let ni = i64::try_from(n.to_integer()).expect("small index");
                let y = calc.nth_product(&FieldExpr::gen(g), ni, &x);
                produced.push((rw, y));
                n += Rat::one();
            }
        }
        for (rw, y) in produced {
            if y.is_zero() {
                continue;
            }
            debug_assert_eq!(y.weight_of(&weights).ok(), Some(rw.clone()));
            if rw.is_zero() {
                proper = false;
                break 'work;
            }
            if let Some(z) = spaces.entry(rw.clone()).or_default().insert(y) {
                queue.push_back((rw, z));
            }
        }
    }

    let mut relations = Vec::new();
    for space in spaces.values() {
        for row in space.reduced() {
            let lead = row.iter().next().map(|(m, _)| m.clone()).expect("nonzero row");
            if lead.len() == 1 && lead.factors()[0].deriv == 0 {
                relations.push(row);
            }
        }
    }
    IdealEvidence {
        level: Rat::zero(),
        seeds,
        cutoff: cutoff.clone(),
        proper,
        relations,
        dimensions: spaces.iter().map(|(w, s)| (w.clone(), s.rows.len())).collect(),
    }
}
