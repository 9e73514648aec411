use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::poly::UniPoly;
use super::Rat;
use crate::Error;

/// Rational roots of a polynomial together with what is left after dividing
/// out every rational linear factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalRoots {
    /// Distinct rational roots in increasing order, with multiplicity.
    pub roots: Vec<(Rat, u32)>,
    /// `p / prod (k - r)^m` in primitive integer form (positive leading
    /// coefficient); the constant `1` when `p` splits into linear factors.
    pub residual: UniPoly,
}

impl RationalRoots {
    pub fn values(&self) -> impl Iterator<Item = &Rat> {
        self.roots.iter().map(|(r, _)| r)
    }
}

/// All rational roots of `p`.
///
/// Every rational root `r` of an integer polynomial with leading coefficient
/// `a_n` satisfies `r * a_n ∈ Z`, so once a real root is isolated in an
/// interval narrower than `1/|a_n|` there is at most one candidate to test.
/// Isolation uses a Sturm sequence; all arithmetic is exact.
pub fn rational_roots(p: &UniPoly) -> Result<RationalRoots, Error> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut found = Vec::new();
    if p.degree().unwrap_or(0) > 0 {
        let g = UniPoly::gcd(p, &p.derivative());
        let squarefree = p.exact_div(&g).expect("gcd divides");
        let (_, ints) = squarefree.primitive_part();
        let lead = ints.last().expect("nonzero").abs();
        let sf = UniPoly::from_coeffs(ints.into_iter().map(Rat::from_integer).collect());
        isolate_and_test(&sf, &lead, &mut found);
    }
    found.sort();

    let mut rest = p.clone();
    let mut roots = Vec::with_capacity(found.len());
    for r in found {
        let lin = UniPoly::linear_factor(&r);
        let mut mult = 0;
        while let Some(q) = rest.exact_div(&lin) {
            rest = q;
            mult += 1;
        }
        debug_assert!(mult > 0);
        roots.push((r, mult));
    }
    Ok(RationalRoots {
        roots,
        residual: rest.primitive(),
    })
}

fn sturm_sequence(p: &UniPoly) -> Vec<UniPoly> {
    let mut seq = vec![p.clone(), p.derivative()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        // positive rescaling keeps sign variations intact
        let (c, _) = r.primitive_part();
        seq.push(-&r.scale(&c.abs().recip()));
    }
    seq
}

fn sign_variations(seq: &[UniPoly], x: &Rat) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for q in seq {
        let v = q.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

fn isolate_and_test(sf: &UniPoly, lead: &BigInt, out: &mut Vec<Rat>) {
    let seq = sturm_sequence(sf);
    let lc = sf.leading().expect("nonzero").clone();
    let bound = sf
        .coeffs()
        .iter()
        .map(|c| (c / &lc).abs())
        .fold(Rat::zero(), |m, c| if c > m { c } else { m })
        + Rat::one();
    let width_goal = Rat::new(BigInt::one(), lead.clone());
    let two = Rat::from_integer(2.into());

    // half-open intervals (a, b]
    let mut stack = vec![(-bound.clone(), bound)];
    while let Some((a, b)) = stack.pop() {
        let count = sign_variations(&seq, &a) - sign_variations(&seq, &b);
        if count == 0 {
            continue;
        }
        if count > 1 || &b - &a >= width_goal {
            let mid = (&a + &b) / &two;
            stack.push((a, mid.clone()));
            stack.push((mid, b));
            continue;
        }
        // exactly one real root, interval narrower than 1/|a_n|
        let scale = Rat::from_integer(lead.clone());
        let lo = (&a * &scale).floor() + Rat::one();
        let hi = (&b * &scale).floor();
        let mut t = lo;
        while t <= hi {
            let cand = &t / &scale;
            if sf.eval(&cand).is_zero() {
                out.push(cand);
            }
            t += Rat::one();
        }
    }
}
