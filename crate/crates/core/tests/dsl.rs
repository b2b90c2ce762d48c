mod common;

use ceres_core::dsl::{
    interchange, parse_schema_file, render_clause_list, render_document, Diagnostic, FORMAT_VERSION,
};
use ceres_core::term::Sequent;

fn errors(text: &str) -> Vec<Diagnostic> {
    parse_schema_file(text).expect_err("should not parse")
}

#[test]
fn fixtures_survive_rendering() {
    for name in common::all_fixtures() {
        let doc = common::load(&name);
        let text = render_document(&doc);
        let again = parse_schema_file(&text).unwrap_or_else(|ds| {
            panic!("{name}:\n{}\n{text}", ds.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))
        });
        assert_eq!(again, doc, "{name}");
        assert_eq!(render_document(&again), text, "{name}");
    }
}

#[test]
fn empty_file_is_rejected() {
    let ds = errors("");
    assert_eq!(ds[0].to_string(), "1:1: no schema declared");
    let ds = errors("# only a comment\npred P\n");
    assert!(ds.iter().any(|d| d.message.contains("no schema declared")));
}

#[test]
fn duplicate_proof_symbol_is_positioned() {
    let text = "pred P\n\
                proof a : P |- P {\n  l1: axiom P |- P\n}\n\
                proof a : P |- P {\n  l1: axiom P |- P\n}\n";
    let ds = errors(text);
    let d = ds.iter().find(|d| d.message.contains("duplicate")).expect("duplicate diagnostic");
    assert_eq!((d.line, d.col), (5, 7), "{d}");
    assert!(d.message.contains("2:"), "{d}");
}

#[test]
fn unknown_symbols_and_bad_labels_carry_positions() {
    let ds = errors("pred P\nproof a : P |- Q {\n  l1: axiom P |- P\n}\n");
    assert!(ds.iter().any(|d| d.line == 2 && d.message.contains('Q')), "{ds:?}");
    let ds = errors("pred P\nproof a : P |- P {\n  l1: axiom P |- P\n  l2: rule c:l l7 aux=0,1\n}\n");
    assert!(ds.iter().any(|d| d.line == 4 && d.message.contains("l7")), "{ds:?}");
    for d in &ds {
        assert!(d.line >= 1 && d.col >= 1);
        let shown = d.to_string();
        assert!(shown.starts_with(&format!("{}:{}: ", d.line, d.col)));
    }
}

#[test]
fn empty_clause_renders_as_turnstile() {
    assert_eq!(Sequent::empty().to_string(), "|-");
    let text = render_clause_list("e", &[Sequent::empty()]);
    assert_eq!(text, "clauses e {\n  |-\n}\n");
    let doc = common::parse(&format!("pred P\n{text}"));
    assert_eq!(doc.clause_list("e").unwrap(), &[Sequent::empty()]);
}

#[test]
fn interchange_is_versioned() {
    let doc = common::load("running.ceres");
    let text = interchange("schema", &doc.schema);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["format_version"], FORMAT_VERSION);
    assert_eq!(v["kind"], "schema");
    let back: ceres_core::calculus::ProofSchema = serde_json::from_value(v["value"].clone()).unwrap();
    assert_eq!(back, doc.schema);
}
