use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opecalc")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let o = run(&all);
    (o.status.code().unwrap(), serde_json::from_slice(&o.stdout).unwrap())
}

fn temp_file(name: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("opecalc-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn trivial_collapse_as_json() {
    let (code, v) = json(&["collapse", "sl3_min", "--mode", "trivial"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["levels"], serde_json::json!(["-3/2"]));
    assert_eq!(v["algebra"], "sl3_min");
    assert_eq!(v["verb"], "collapse");
    assert_eq!(v["inputs"]["mode"], "trivial");
    assert_eq!(v["version"], "1");
    assert!(v["diagnostics"].as_array().unwrap().is_empty());
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["algebra", "diagnostics", "inputs", "result", "verb", "version"]);
}

#[test]
fn json_output_is_byte_deterministic() {
    let a = run(&["collapse", "sp4_reg", "--mode", "virasoro", "--json"]);
    let b = run(&["collapse", "sp4_reg", "--mode", "virasoro", "--json"]);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["result"]["residual"], "747 + 674*k + 150*k^2");
}

#[test]
fn bracket_pole_at_a_level() {
    let o = run(&["bracket", "sp4_subreg", "G+", "G-", "--pole", "2", "--at", "k=-1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "2*L - NO(J,J)");
}

#[test]
fn full_bracket_lists_poles_descending() {
    let (code, v) = json(&["bracket", "sl3_min", "G-", "G+"]);
    assert_eq!(code, 0);
    let poles: Vec<&str> = v["result"]["poles"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["pole"].as_str().unwrap())
        .collect();
    assert_eq!(poles, ["3", "2", "1"]);
}

#[test]
fn verify_passes_on_g2_minimal() {
    let o = run(&["verify", "g2_min"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    for check in ["skew", "jacobi", "conformal", "charge"] {
        assert!(
            text.lines().any(|l| l.starts_with(check) && l.contains("pass")),
            "{text}"
        );
    }
}

#[test]
fn verify_at_a_level_and_on_selected_triples() {
    let (code, v) = json(&[
        "verify", "sl3_min", "--at", "k=2/7", "--triple", "J,G+,G-", "--triple", "G+,G-,L",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["inputs"]["at"], "2/7");
    let jacobi = &v["result"]["checks"][1];
    assert_eq!(jacobi["check"], "jacobi");
    assert_eq!(jacobi["examined"], "2");
}

#[test]
fn verify_reports_a_broken_table() {
    let src = opecalc::data::source("sl3_min")
        .unwrap()
        .replace("pole 2: 3*(1+k)*J;", "pole 2: 2*(1+k)*J;");
    let path = temp_file("broken.ope", &src);
    let (code, v) = json(&["verify", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 1);
    assert_eq!(v["result"]["passed"], false);
    let failing: Vec<&str> = v["result"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["check"].as_str().unwrap())
        .collect();
    assert!(failing.contains(&"jacobi"), "{failing:?}");
}

#[test]
fn partial_table_cannot_be_verified() {
    let o = run(&["verify", "g2_reg"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("(W, W)"));
}

#[test]
fn charge_with_zeros() {
    let o = run(&["charge", "g2_a1tilde"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("c = (-92 - 81*k - 18*k^2)/(4 + k)"), "{text}");
    assert!(text.contains("zeros: {}"), "{text}");
    assert!(
        text.contains("residual: 92 + 81*k + 18*k^2") || text.contains("residual: -92 - 81*k - 18*k^2"),
        "{text}"
    );
}

#[test]
fn survivors_and_ideal_as_json() {
    let (code, v) = json(&["survivors", "sp4_subreg", "--at", "k=-1"]);
    assert_eq!(code, 0);
    let verdicts: Vec<(String, String)> = v["result"]["generators"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| {
            (
                g["generator"].as_str().unwrap().into(),
                g["verdict"].as_str().unwrap().into(),
            )
        })
        .collect();
    assert!(verdicts.contains(&("J".into(), "survives".into())));
    assert!(verdicts.contains(&("G+".into(), "in-ideal-candidate".into())));

    let (code, v) = json(&[
        "ideal",
        "sp4_subreg",
        "--at",
        "k=-1",
        "--seeds",
        "G+,G-",
        "--cutoff",
        "4",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["proper"], true);
    let relations = v["result"]["relations"].as_array().unwrap();
    assert!(relations.iter().any(|r| r == "L - 1/2*NO(J,J)"), "{relations:?}");
}

#[test]
fn fmt_reproduces_shipped_files_canonically() {
    for name in opecalc::data::names() {
        let o = run(&["fmt", name]);
        assert_eq!(o.status.code(), Some(0));
        let text = stdout(&o);
        let path = temp_file(&format!("{name}.ope"), &text);
        let again = run(&["fmt", path.to_str().unwrap()]);
        std::fs::remove_file(&path).ok();
        assert_eq!(stdout(&again), text, "{name}");
    }
}

#[test]
fn usage_errors_exit_with_two() {
    let cases: &[&[&str]] = &[
        &["bracket", "sl3_min", "X", "J"],
        &["bracket", "sl3_min", "J", "J", "--at", "q=1"],
        &["bracket", "sl3_min", "J", "J", "--at", "k=abc"],
        &["survivors", "sl3_min", "--at", "k=-3"],
        &["collapse", "sl3_min", "--mode", "sideways"],
        &["verify", "/nonexistent/file.ope"],
        &["ideal", "sp4_subreg", "--at", "k=-1", "--seeds", "G+", "--cutoff", "1"],
        &["frobnicate", "sl3_min"],
    ];
    for args in cases {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn parse_errors_carry_locations() {
    let path = temp_file(
        "syntax.ope",
        "algebra x\ncritical -3\ncentral_charge 1\ngenerator J weight 1\nope J J { pole 2: 1 }\n",
    );
    let o = run(&["fmt", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains(":5:21: expected `;`"), "{err}");
}

#[test]
fn warnings_surface_as_diagnostics() {
    let (code, v) = json(&["charge", "sl3_reg"]);
    assert_eq!(code, 0);
    let diags = v["diagnostics"].as_array().unwrap();
    assert_eq!(diags.len(), 1);
    assert_eq!(diags[0]["severity"], "warning");
    assert_eq!(diags[0]["source_discrepancy"], true);
}
