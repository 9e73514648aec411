//! Presentations shipped with the crate, embedded at build time.

use crate::format::{parse, Document};

/// `(name, source text)` for every complete presentation.
pub const SHIPPED: &[(&str, &str)] = &[
    ("sl3_min", include_str!("../data/sl3_min.ope")),
    ("sl3_reg", include_str!("../data/sl3_reg.ope")),
    ("sp4_min", include_str!("../data/sp4_min.ope")),
    ("sp4_subreg", include_str!("../data/sp4_subreg.ope")),
    ("sp4_reg", include_str!("../data/sp4_reg.ope")),
    ("g2_min", include_str!("../data/g2_min.ope")),
    ("g2_a1tilde", include_str!("../data/g2_a1tilde.ope")),
    ("g2_subreg", include_str!("../data/g2_subreg.ope")),
];

/// Generators and central charge only; the `W·W` bracket is not representable.
pub const G2_REG_PARTIAL: &str = include_str!("../data/g2_reg.ope");

pub fn source(name: &str) -> Option<&'static str> {
    SHIPPED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .or((name == "g2_reg").then_some(G2_REG_PARTIAL))
}

pub fn names() -> impl Iterator<Item = &'static str> {
    SHIPPED.iter().map(|(n, _)| *n)
}

/// Parses a shipped presentation; panics if the embedded text is malformed.
pub fn load(name: &str) -> Option<Document> {
    source(name).map(|s| parse(s).unwrap_or_else(|e| panic!("shipped file {name}: {e}")))
}
