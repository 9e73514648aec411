//! Rendering of results as plain text and as versioned JSON.
//!
//! Every JSON report is one object with the keys `algebra`, `verb`,
//! `inputs`, `result`, `diagnostics` and `version`. Numbers are strings
//! holding exact rationals or polynomials in the level.

use std::fmt::Write as _;

use opecalc_core::axioms::{CheckReport, Counterexample};
use opecalc_core::collapse::{Condition, IdealEvidence, LevelSet, Verdict};
use opecalc_core::exact::{Rat, UniPoly};
use opecalc_core::{AlgebraPresentation, FieldExpr, Gen, LambdaPoly, RatFunc};
use serde_json::{json, Map, Value};

use crate::format::Diagnostic;

pub const SCHEMA_VERSION: &str = "1";

/// Outcome class of a command, mapped to the process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    CheckFailed,
    Usage,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::CheckFailed => 1,
            Status::Usage => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub algebra: String,
    pub verb: &'static str,
    pub inputs: Map<String, Value>,
    pub result: Value,
    pub diagnostics: Vec<Diagnostic>,
    pub text: String,
    pub status: Status,
}

impl Report {
    pub fn new(algebra: &str, verb: &'static str) -> Self {
        Report {
            algebra: algebra.to_string(),
            verb,
            inputs: Map::new(),
            result: Value::Null,
            diagnostics: Vec::new(),
            text: String::new(),
            status: Status::Ok,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) {
        self.inputs.insert(key.to_string(), value.into());
    }

    pub fn to_json(&self) -> Value {
        json!({
            "algebra": self.algebra,
            "verb": self.verb,
            "inputs": self.inputs,
            "result": self.result,
            "diagnostics": self.diagnostics.iter().map(diagnostic).collect::<Vec<_>>(),
            "version": SCHEMA_VERSION,
        })
    }
}

pub fn diagnostic(d: &Diagnostic) -> Value {
    json!({
        "severity": d.severity.as_str(),
        "line": d.location.line.to_string(),
        "col": d.location.col.to_string(),
        "message": d.message,
        "source_discrepancy": d.source_discrepancy,
    })
}

pub fn rats(xs: &[Rat]) -> Value {
    xs.iter().map(|x| Value::String(x.to_string())).collect()
}

pub fn ratfunc(p: &AlgebraPresentation, c: &RatFunc) -> String {
    c.display_in(&p.param).to_string()
}

pub fn poly(p: &AlgebraPresentation, u: &UniPoly) -> String {
    u.display_in(&p.param).to_string()
}

pub fn field(p: &AlgebraPresentation, x: &FieldExpr) -> String {
    x.display(&p.names(), &p.param).to_string()
}

fn gen_names(p: &AlgebraPresentation, gens: &[Gen]) -> Vec<String> {
    gens.iter().map(|g| p.name(*g).to_string()).collect()
}

fn counterexample(p: &AlgebraPresentation, c: &Counterexample) -> Value {
    json!({
        "generators": gen_names(p, &c.gens),
        "lambda_power": c.lambda_power.to_string(),
        "mu_power": c.mu_power.map(|m| m.to_string()),
        "monomial": c.monomial.display(&p.names()).to_string(),
        "coefficient": ratfunc(p, &c.coeff),
    })
}

/// Counterexamples listed per check in text mode.
const TEXT_LIMIT: usize = 10;

pub fn checks(p: &AlgebraPresentation, reports: &[CheckReport], text: &mut String) -> Value {
    let names = p.names();
    let mut out = Vec::new();
    for r in reports {
        let verdict = if r.passed() { "pass" } else { "FAIL" };
        let _ = writeln!(
            text,
            "{:<10} {verdict}  ({} examined, {} nonzero coefficients)",
            r.check.as_str(),
            r.examined,
            r.counterexamples.len()
        );
        for c in r.counterexamples.iter().take(TEXT_LIMIT) {
            let gens = gen_names(p, &c.gens).join(", ");
            let powers = match c.mu_power {
                Some(mu) => format!("lambda^{} mu^{}", c.lambda_power, mu),
                None => format!("lambda^{}", c.lambda_power),
            };
            let _ = writeln!(
                text,
                "    ({gens}) {powers}: ({}) {}",
                ratfunc(p, &c.coeff),
                c.monomial.display(&names)
            );
        }
        if r.counterexamples.len() > TEXT_LIMIT {
            let _ = writeln!(text, "    ... {} more", r.counterexamples.len() - TEXT_LIMIT);
        }
        out.push(json!({
            "check": r.check.as_str(),
            "examined": r.examined.to_string(),
            "passed": r.passed(),
            "counterexamples": r.counterexamples.iter().map(|c| counterexample(p, c)).collect::<Vec<_>>(),
        }));
    }
    Value::Array(out)
}

pub fn conditions(p: &AlgebraPresentation, cs: &[Condition]) -> Value {
    cs.iter()
        .map(|c| {
            json!({
                "left": p.name(c.left),
                "right": p.name(c.right),
                "product": c.product.to_string(),
                "coefficient": ratfunc(p, &c.coeff),
            })
        })
        .collect()
}

pub fn level_set(p: &AlgebraPresentation, s: &LevelSet, text: &mut String) -> Value {
    let list = |xs: &[Rat]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    let _ = writeln!(text, "levels:   {{{}}}", list(&s.levels));
    let _ = writeln!(text, "residual: {}", poly(p, &s.residual));
    let _ = writeln!(text, "excluded: {{{}}}", list(&s.excluded));
    json!({
        "levels": rats(&s.levels),
        "residual": poly(p, &s.residual),
        "excluded": rats(&s.excluded),
    })
}

pub fn lambda_poly(p: &AlgebraPresentation, x: &LambdaPoly, text: &mut String) -> Value {
    let mut out = Vec::new();
    for (n, e) in x.iter().rev() {
        let value = field(p, e);
        let _ = writeln!(text, "pole {}: {value}", n + 1);
        out.push(json!({ "pole": (n + 1).to_string(), "value": value }));
    }
    if out.is_empty() {
        let _ = writeln!(text, "0");
    }
    Value::Array(out)
}

pub fn survivors(p: &AlgebraPresentation, vs: &[(Gen, Verdict)], text: &mut String) -> Value {
    let mut out = Vec::new();
    for (g, v) in vs {
        let _ = writeln!(
            text,
            "{:<6} weight {:<5} {}",
            p.name(*g),
            p.weight(*g).to_string(),
            v.as_str()
        );
        out.push(json!({
            "generator": p.name(*g),
            "weight": p.weight(*g).to_string(),
            "verdict": v.as_str(),
        }));
    }
    Value::Array(out)
}

pub fn ideal(p: &AlgebraPresentation, ev: &IdealEvidence, text: &mut String) -> Value {
    let relations: Vec<String> = ev.relations.iter().map(|r| field(p, r)).collect();
    let _ = writeln!(text, "level:   {}", ev.level);
    let _ = writeln!(text, "seeds:   {}", gen_names(p, &ev.seeds).join(", "));
    let _ = writeln!(text, "cutoff:  {}", ev.cutoff);
    let _ = writeln!(text, "proper:  {}", ev.proper);
    for (w, d) in &ev.dimensions {
        let _ = writeln!(text, "  weight {w}: dimension {d}");
    }
    for r in &relations {
        let _ = writeln!(text, "relation: {r} = 0");
    }
    json!({
        "level": ev.level.to_string(),
        "seeds": gen_names(p, &ev.seeds),
        "cutoff": ev.cutoff.to_string(),
        "proper": ev.proper,
        "relations": relations,
        "dimensions": ev.dimensions.iter()
            .map(|(w, d)| json!({ "weight": w.to_string(), "dimension": d.to_string() }))
            .collect::<Vec<_>>(),
    })
}
