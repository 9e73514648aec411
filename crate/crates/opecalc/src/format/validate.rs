//! Structural checks on a parsed presentation.

use std::fmt;

use num_traits::Signed;
use opecalc_core::exact::{rational_roots, Rat};
use opecalc_core::field::AlgebraPresentation;

use super::parse::{Document, Location};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub location: Location,
    pub message: String,
    /// The finding concerns a value that differs from the reference tables
    /// the file was transcribed from.
    pub source_discrepancy: bool,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.location, self.severity.as_str(), self.message)
    }
}

/// Generator weights that the reference tables print differently from the
/// value their own pole structure forces: `(algebra, generator, printed)`.
const PRINTED_WEIGHTS: &[(&str, &str, (i64, i64))] = &[
    ("sl3_reg", "W", (4, 1)),
    ("g2_a1tilde", "G+", (5, 3)),
    ("g2_a1tilde", "G-", (5, 3)),
];

/// Findings in source order. Errors block loading; warnings do not.
pub fn validate(doc: &Document) -> Vec<Diagnostic> {
    let p = &doc.presentation;
    let src = &doc.source;
    let mut out = Vec::new();
    let at = |loc: Option<&Location>| loc.copied().unwrap_or_default();
    let mut push = |severity, location, message: String, source_discrepancy| {
        out.push(Diagnostic {
            severity,
            location,
            message,
            source_discrepancy,
        })
    };

    let conformal: Vec<_> = p
        .generators
        .iter()
        .enumerate()
        .filter(|(_, g)| g.is_conformal)
        .collect();
    match conformal.as_slice() {
        [] => push(
            Severity::Error,
            Location::default(),
            "no conformal generator".into(),
            false,
        ),
        [(i, g)] => {
            if g.weight != Rat::from_integer(2.into()) {
                push(
                    Severity::Error,
                    at(src.generators.get(*i)),
                    format!("conformal generator `{}` has weight {}, not 2", g.name, g.weight),
                    false,
                );
            }
        }
        many => {
            for (i, g) in &many[1..] {
                push(
                    Severity::Error,
                    at(src.generators.get(*i)),
                    format!("second conformal generator `{}`", g.name),
                    false,
                );
            }
        }
    }

    for (i, g) in p.generators.iter().enumerate() {
        let loc = at(src.generators.get(i));
        if !g.weight.is_positive() {
            push(
                Severity::Error,
                loc,
                format!("generator `{}` has non-positive weight", g.name),
                false,
            );
        }
        for (alg, name, (n, d)) in PRINTED_WEIGHTS {
            let printed = Rat::new((*n).into(), (*d).into());
            if *alg == p.name && *name == g.name && g.weight != printed {
                push(
                    Severity::Warning,
                    loc,
                    format!(
                        "weight of `{}` is {}; the reference tables print {}, which the pole orders rule out",
                        g.name, g.weight, printed
                    ),
                    true,
                );
            }
        }
    }

    let weights = p.weights();
    for ((a, b), poly) in p.table.iter() {
        let total = p.weight(a) + p.weight(b);
        for (n, x) in poly.iter() {
            let loc = at(src.products.get(&(a, b, n)).or(src.entries.get(&(a, b))));
            let want = &total - Rat::from_integer((n as i64 + 1).into());
            let pair = format!("({}, {}) pole {}", p.name(a), p.name(b), n + 1);
            if want.is_negative() {
                push(
                    Severity::Error,
                    loc,
                    format!("{pair} exceeds the largest allowed pole degree {total}"),
                    false,
                );
                continue;
            }
            for (m, _) in x.iter() {
                let w = m.weight(&weights);
                if w != want {
                    let names = p.names();
                    let term = x.display(&names, &p.param).to_string();
                    push(
                        Severity::Error,
                        loc,
                        format!("{pair} must have weight {want}, but `{term}` contains a term of weight {w}"),
                        false,
                    );
                    break;
                }
            }
        }
    }

    for pole in stray_poles(p) {
        push(
            Severity::Warning,
            Location::default(),
            format!(
                "a coefficient has a pole at {}={pole}, away from the critical level",
                p.param
            ),
            false,
        );
    }

    out.sort_by_key(|d| (d.location, d.severity));
    out
}

/// Rational poles of stored coefficients or of `c` other than the critical level.
fn stray_poles(p: &AlgebraPresentation) -> Vec<Rat> {
    let mut dens = vec![p.declared_c.denom().clone()];
    for (_, poly) in p.table.iter() {
        for (_, x) in poly.iter() {
            dens.extend(x.iter().map(|(_, c)| c.denom().clone()));
        }
    }
    let mut out: Vec<Rat> = Vec::new();
    for d in dens.iter().filter(|d| !d.is_one() && !d.is_zero()) {
        if let Ok(r) = rational_roots(d) {
            for k in r.values() {
                if *k != p.critical_level && !out.contains(k) {
                    out.push(k.clone());
                }
            }
        }
    }
    out.sort();
    out
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(|d| d.severity == Severity::Error)
}
