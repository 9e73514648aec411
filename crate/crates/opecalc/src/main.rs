use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use opecalc::data;
use opecalc::format::{has_errors, parse, serialize, validate, Diagnostic, Document};
use opecalc::report::{self, Report, Status};
use opecalc_core::axioms::{central_charge, check_charge, check_conformal, check_jacobi, check_skew};
use opecalc_core::collapse::{
    default_cutoff, generator_survivors, ideal_closure, trivial_levels, vacuum_pairings, virasoro_conditions,
    virasoro_levels,
};
use opecalc_core::exact::{rational_roots, Rat};
use opecalc_core::{AlgebraPresentation, Calculus, Error, Gen};
use serde_json::json;

/// Exact OPE and λ-bracket calculations for W-algebras.
#[derive(Parser)]
#[command(name = "opecalc", version)]
struct Cli {
    /// Emit one JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args)]
struct Target {
    /// Shipped algebra name or path to an .ope file.
    target: String,
}

#[derive(Subcommand)]
enum Verb {
    /// Validate the table and check skew-symmetry, Jacobi, conformality and the central charge.
    Verify {
        #[command(flatten)]
        target: Target,
        /// Restrict the Jacobi check to a triple `A,B,C` (repeatable).
        #[arg(long = "triple", value_name = "A,B,C")]
        triples: Vec<String>,
        /// Check at a fixed level instead of identically in the parameter.
        #[arg(long, value_name = "k=RAT")]
        at: Option<String>,
    },
    /// Central charge and its rational zeros.
    Charge {
        #[command(flatten)]
        target: Target,
    },
    /// Levels where the simple quotient is trivial or Virasoro.
    Collapse {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_enum)]
        mode: Mode,
    },
    /// λ-bracket of two generators.
    Bracket {
        #[command(flatten)]
        target: Target,
        a: String,
        b: String,
        #[arg(long, value_name = "k=RAT")]
        at: Option<String>,
        /// Print only the coefficient of this pole order.
        #[arg(long)]
        pole: Option<u32>,
    },
    /// Per-generator verdicts at a fixed level.
    Survivors {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_name = "k=RAT")]
        at: String,
    },
    /// Bounded-weight closure of the ideal generated by some generators.
    Ideal {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_name = "k=RAT")]
        at: String,
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<String>,
        #[arg(long, value_name = "RAT")]
        cutoff: Option<String>,
    },
    /// Canonical re-serialization.
    Fmt {
        #[command(flatten)]
        target: Target,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Trivial,
    Virasoro,
}

/// Failure that ends a command early.
struct Abort {
    status: Status,
    message: String,
    diagnostics: Vec<Diagnostic>,
}

impl Abort {
    fn usage(message: impl Into<String>) -> Self {
        Abort {
            status: Status::Usage,
            message: message.into(),
            diagnostics: Vec::new(),
        }
    }
}

impl From<Error> for Abort {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::ExcludedLevel(_) | Error::CutoffTooSmall { .. } | Error::UnknownGenerator(_) => Status::Usage,
            _ => Status::CheckFailed,
        };
        Abort {
            status,
            message: e.to_string(),
            diagnostics: Vec::new(),
        }
    }
}

fn load(target: &str) -> Result<(Document, Vec<Diagnostic>), Abort> {
    let (label, text) = match data::source(target) {
        Some(s) => (target.to_string(), s.to_string()),
        None => match std::fs::read_to_string(target) {
            Ok(s) => (target.to_string(), s),
            Err(e) => return Err(Abort::usage(format!("{target}: {e}"))),
        },
    };
    let doc = parse(&text).map_err(|e| Abort::usage(format!("{label}:{e}")))?;
    let diags = validate(&doc);
    Ok((doc, diags))
}

fn level(p: &AlgebraPresentation, arg: &str) -> Result<Rat, Abort> {
    let value = match arg.split_once('=') {
        Some((name, v)) if name.trim() == p.param => v,
        Some((name, _)) => {
            return Err(Abort::usage(format!(
                "unknown parameter `{}`; expected `{}`",
                name.trim(),
                p.param
            )))
        }
        None => arg,
    };
    value
        .trim()
        .parse::<Rat>()
        .map_err(|_| Abort::usage(format!("`{value}` is not a rational number")))
}

fn generator(p: &AlgebraPresentation, name: &str) -> Result<Gen, Abort> {
    Ok(p.gen_by_name(name.trim())?)
}

fn require_valid(diags: &[Diagnostic]) -> Result<(), Abort> {
    if has_errors(diags) {
        return Err(Abort {
            status: Status::Usage,
            message: "the presentation has validation errors".into(),
            diagnostics: diags.to_vec(),
        });
    }
    Ok(())
}

fn run(verb: &Verb, rep: &mut Report) -> Result<(), Abort> {
    let target = match verb {
        Verb::Verify { target, .. }
        | Verb::Charge { target }
        | Verb::Collapse { target, .. }
        | Verb::Bracket { target, .. }
        | Verb::Survivors { target, .. }
        | Verb::Ideal { target, .. }
        | Verb::Fmt { target } => &target.target,
    };
    rep.input("target", target.as_str());
    let (doc, diags) = load(target)?;
    let p = &doc.presentation;
    rep.algebra = p.name.clone();
    rep.diagnostics = diags.clone();

    match verb {
        Verb::Verify { triples, at, .. } => {
            if has_errors(&diags) {
                rep.status = Status::CheckFailed;
                rep.text.push_str("validation failed\n");
                rep.result = json!({ "passed": false, "checks": [] });
                return Ok(());
            }
            let specialized;
            let p = match at {
                Some(a) => {
                    let k0 = level(p, a)?;
                    rep.input("at", k0.to_string());
                    specialized = p.specialize(&k0)?;
                    &specialized
                }
                None => p,
            };
            let scope = triples
                .iter()
                .map(|t| {
                    let parts: Vec<&str> = t.split(',').collect();
                    match parts.as_slice() {
                        [a, b, c] => Ok((generator(p, a)?, generator(p, b)?, generator(p, c)?)),
                        _ => Err(Abort::usage(format!("triple `{t}` must have the form A,B,C"))),
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            if !triples.is_empty() {
                rep.input("triples", triples.clone());
            }
            let calc = Calculus::new(p)?;
            let reports = vec![
                check_skew(&calc),
                check_jacobi(&calc, (!scope.is_empty()).then_some(scope.as_slice())),
                check_conformal(&calc),
                check_charge(&calc),
            ];
            let passed = reports.iter().all(|r| r.passed());
            let checks = report::checks(p, &reports, &mut rep.text);
            rep.result = json!({ "passed": passed, "checks": checks });
            if !passed {
                rep.status = Status::CheckFailed;
            }
        }
        Verb::Charge { .. } => {
            require_valid(&diags)?;
            let calc = Calculus::new(p)?;
            let c = central_charge(&calc)?;
            let roots = rational_roots(c.numer())?;
            let c_text = report::ratfunc(p, &c);
            let list: Vec<String> = roots.values().map(|r| r.to_string()).collect();
            let _ = writeln!(rep.text, "c = {c_text}");
            let _ = writeln!(rep.text, "zeros: {{{}}}", list.join(", "));
            let _ = writeln!(rep.text, "residual: {}", report::poly(p, &roots.residual));
            rep.result = json!({
                "central_charge": c_text,
                "zeros": list,
                "residual": report::poly(p, &roots.residual),
            });
        }
        Verb::Collapse { mode, .. } => {
            require_valid(&diags)?;
            let calc = Calculus::new(p)?;
            let (name, set, conds) = match mode {
                Mode::Trivial => ("trivial", trivial_levels(&calc), vacuum_pairings(&calc)),
                Mode::Virasoro => ("virasoro", virasoro_levels(&calc)?, virasoro_conditions(&calc)?),
            };
            rep.input("mode", name);
            let mut result = report::level_set(p, &set, &mut rep.text);
            result["conditions"] = report::conditions(p, &conds);
            rep.result = result;
        }
        Verb::Bracket { a, b, at, pole, .. } => {
            require_valid(&diags)?;
            let (ga, gb) = (generator(p, a)?, generator(p, b)?);
            rep.input("left", a.as_str());
            rep.input("right", b.as_str());
            let specialized;
            let p = match at {
                Some(s) => {
                    let k0 = level(p, s)?;
                    rep.input("at", k0.to_string());
                    specialized = p.specialize(&k0)?;
                    &specialized
                }
                None => p,
            };
            let calc = Calculus::new(p)?;
            let bracket = calc.bracket_gen(ga, gb);
            match pole {
                Some(0) => return Err(Abort::usage("pole orders start at 1")),
                Some(d) => {
                    rep.input("pole", d.to_string());
                    let value = report::field(p, &bracket.coeff(d - 1));
                    let _ = writeln!(rep.text, "{value}");
                    rep.result = json!({ "pole": d.to_string(), "value": value });
                }
                None => rep.result = json!({ "poles": report::lambda_poly(p, &bracket, &mut rep.text) }),
            }
        }
        Verb::Survivors { at, .. } => {
            require_valid(&diags)?;
            let k0 = level(p, at)?;
            rep.input("at", k0.to_string());
            let verdicts = generator_survivors(p, &k0)?;
            rep.result = json!({ "generators": report::survivors(p, &verdicts, &mut rep.text) });
        }
        Verb::Ideal { at, seeds, cutoff, .. } => {
            require_valid(&diags)?;
            let k0 = level(p, at)?;
            let gens = seeds.iter().map(|s| generator(p, s)).collect::<Result<Vec<_>, _>>()?;
            let cutoff = match cutoff {
                Some(c) => c
                    .trim()
                    .parse::<Rat>()
                    .map_err(|_| Abort::usage(format!("`{c}` is not a rational number")))?,
                None => default_cutoff(p),
            };
            rep.input("at", k0.to_string());
            rep.input("seeds", seeds.clone());
            rep.input("cutoff", cutoff.to_string());
            let ev = ideal_closure(p, &k0, &gens, &cutoff)?;
            rep.result = report::ideal(p, &ev, &mut rep.text);
        }
        Verb::Fmt { .. } => {
            require_valid(&diags)?;
            let text = serialize(p);
            rep.text.push_str(&text);
            rep.result = json!({ "text": text });
        }
    }
    Ok(())
}

fn verb_name(v: &Verb) -> &'static str {
    match v {
        Verb::Verify { .. } => "verify",
        Verb::Charge { .. } => "charge",
        Verb::Collapse { .. } => "collapse",
        Verb::Bracket { .. } => "bracket",
        Verb::Survivors { .. } => "survivors",
        Verb::Ideal { .. } => "ideal",
        Verb::Fmt { .. } => "fmt",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut rep = Report::new("", verb_name(&cli.verb));
    if let Err(abort) = run(&cli.verb, &mut rep) {
        rep.status = abort.status;
        rep.diagnostics.extend(abort.diagnostics);
        rep.result = json!({ "error": abort.message });
        if !cli.json {
            eprintln!("error: {}", abort.message);
        }
    }
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&rep.to_json()).expect("serializable")
        );
    } else {
        for d in &rep.diagnostics {
            eprintln!("{d}");
        }
        print!("{}", rep.text);
    }
    ExitCode::from(rep.status.code() as u8)
}
