//! Canonical `.ope` text for a presentation.

use std::fmt::Write;

use opecalc_core::exact::Rat;
use opecalc_core::AlgebraPresentation;

fn rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Generators in declaration order, entries by generator index, poles
/// descending. `parse(serialize(p))` reproduces `p`.
pub fn serialize(p: &AlgebraPresentation) -> String {
    let names = p.names();
    let var = p.param.as_str();
    let mut out = String::new();
    writeln!(out, "algebra {}", p.name).unwrap();
    if var != "k" {
        writeln!(out, "param {var}").unwrap();
    }
    writeln!(out, "critical {}", rat(&p.critical_level)).unwrap();
    writeln!(out, "central_charge {}", p.declared_c.display_in(var)).unwrap();
    out.push('\n');
    for g in &p.generators {
        write!(out, "generator {} weight {}", g.name, rat(&g.weight)).unwrap();
        if g.is_conformal {
            out.push_str(" conformal");
        }
        out.push('\n');
    }
    for ((a, b), poly) in p.table.iter() {
        out.push('\n');
        if poly.is_zero() {
            writeln!(out, "ope {} {} {{ }}", names[a.index()], names[b.index()]).unwrap();
            continue;
        }
        writeln!(out, "ope {} {} {{", names[a.index()], names[b.index()]).unwrap();
        for (n, x) in poly.iter().rev() {
            writeln!(out, "  pole {}: {};", n + 1, x.display(&names, var)).unwrap();
        }
        out.push_str("}\n");
    }
    out
}
