mod common;

use ceres_core::calculus::{evaluate_schema, regularize, Proof, Rule};
use ceres_core::charset::{build_char_schema, characteristic_clause_set, reduce_clause_set};
use ceres_core::clause::{is_tautology, SubstitutionFamily};
use ceres_core::projection::{
    build_proj_schema, check_projection, evaluate_projection, projection_for_clause, projection_term, projections_at,
    proof_key, ProjContext,
};
use ceres_core::term::Sequent;

fn seq(doc: &ceres_core::dsl::SchemaDocument, text: &str) -> Sequent {
    let src = format!("{}\nclauses tmp {{ {text} }}\n", ceres_core::dsl::render_declarations(&doc.table, &doc.vars));
    common::parse(&src).clause_list("tmp").unwrap()[0].clone()
}

fn instance_projections(p: &Proof, table: &ceres_core::term::SymbolTable) -> Vec<Proof> {
    let family = SubstitutionFamily::default();
    let defs = Default::default();
    let ctx = ProjContext { table, defs: &defs, family: &family, max_unfold: 1_000_000 };
    evaluate_projection(&projection_term(p, &[], table).unwrap(), &ctx).unwrap()
}

fn weakenings(p: &Proof) -> usize {
    p.count_rule(&|r| matches!(r, Rule::WL | Rule::WR))
}

#[test]
fn first_order_projections() {
    let doc = common::load("first_order.ceres");
    let phi = doc.proof("phi").unwrap();
    let prs = instance_projections(phi, &doc.table);
    assert_eq!(prs.len(), 3);
    let ends = [
        "all x. ~P(x) \\/ Q(x), P(u), P(u) |- Q(u), Q(u), ex y. Q(y)",
        "all x. ~P(x) \\/ Q(x) |- ex y. Q(y), P(a)",
        "all x. ~P(x) \\/ Q(x), Q(v) |- ex y. Q(y)",
    ];
    for e in ends {
        let want = seq(&doc, e);
        let p = prs.iter().find(|p| p.conclusion.multiset_eq(&want)).unwrap_or_else(|| panic!("no projection for {e}"));
        let report = check_projection(p, &doc.table);
        assert!(report.is_ok(), "{report}");
    }
    for c in doc.clause_list("cl_phi").unwrap() {
        assert!(projection_for_clause(&prs, &phi.conclusion, c, &doc.table).is_ok(), "{c}");
    }
}

#[test]
fn running_projection_schema_rules() {
    let doc = common::load("running.ceres");
    let (s, t) = regularize(&doc.schema, &doc.table).unwrap();
    let text = build_proj_schema(&s, &t).unwrap().render();
    let pr = "pr^psi{|- all x. P(x) -> P(fh(n, x))}";
    let a = "(all x. P(x) -> P(f(x))) |-";
    let rules = [
        format!("{pr}(0) => w:l([P(fh(0, x(0))) |- P(fh(0, x(0)))])"),
        format!(
            "{pr}(k+1) => c:l((w{{{a}}}({pr}(k)) + w{{{a}}}((w{{{a}}}([P(x(k+1)) |- P(x(k+1))]) + \
             w{{|-}}(all:l(imp:l([P(fh(k, x(k+1))) |- P(fh(k, x(k+1)))], [P(fh(k+1, x(k+1))) |- P(fh(k+1, x(k+1)))])))))))"
        ),
        format!(
            "pr^phi{{}}(k+1) => (w{{|- ((P(fh(k+1, c)) -> P(g(k+1, c))) -> (P(c) -> P(g(k+1, c))))}}({pr}(k+1)) + \
             w{{{a}}}(imp:r(imp:r((w{{(P(fh(k+1, c)) -> P(g(k+1, c))) |- P(g(k+1, c))}}([P(c) |- P(c)]) + \
             w{{P(c) |-}}(imp:l([P(fh(k+1, c)) |- P(fh(k+1, c))], [P(g(k+1, c)) |- P(g(k+1, c))])))))))"
        ),
    ];
    for r in &rules {
        assert!(text.lines().any(|l| l == r), "missing rule {r}\n{text}");
    }
}

#[test]
fn running_base_projections_include_the_unit_clause() {
    let doc = common::load("running.ceres");
    let (s, t) = regularize(&doc.schema, &doc.table).unwrap();
    let ps = build_proj_schema(&s, &t).unwrap();
    let prs = projections_at(&ps, &s, 0, &t).unwrap();
    let end = s.end_sequent_at(0, &t);
    let want = end.merge(&seq(&doc, "|- P(c)"));
    assert!(prs.iter().any(|p| p.conclusion.multiset_eq(&want)));
}

#[test]
fn projection_extraction_commutes_with_evaluation() {
    for name in common::SCHEMA_FIXTURES {
        let doc = common::load(name);
        let (s, t) = regularize(&doc.schema, &doc.table).unwrap();
        let ps = build_proj_schema(&s, &t).unwrap();
        for gamma in 0..=8 {
            let inst = evaluate_schema(&s, &t, gamma).unwrap();
            let mut direct: Vec<String> = instance_projections(&inst, &t).iter().map(proof_key).collect();
            let mut schematic: Vec<String> =
                projections_at(&ps, &s, gamma, &t).unwrap().iter().map(proof_key).collect();
            direct.sort();
            schematic.sort();
            assert_eq!(direct, schematic, "{name} at {gamma}");
        }
    }
}

#[test]
fn every_clause_has_a_checked_projection() {
    for name in ["running.ceres", "conj.ceres"] {
        let doc = common::load(name);
        let (s, t) = regularize(&doc.schema, &doc.table).unwrap();
        let cs = build_char_schema(&s, &t).unwrap();
        let ps = build_proj_schema(&s, &t).unwrap();
        for gamma in 0..=8 {
            let cl = characteristic_clause_set(&cs, &s, gamma, &t).unwrap();
            let prs = projections_at(&ps, &s, gamma, &t).unwrap();
            let end = s.end_sequent_at(gamma, &t);
            let size = evaluate_schema(&s, &t, gamma).unwrap().inferences();
            for c in &cl {
                let p = projection_for_clause(&prs, &end, c, &t).unwrap_or_else(|e| panic!("{name} {gamma} {c}: {e}"));
                let report = check_projection(p, &t);
                assert!(report.is_ok(), "{name} {gamma} {c}: {report}");
                assert!(p.inferences() - weakenings(p) <= size, "{name} {gamma} {c}");
            }
        }
    }
}

#[test]
fn reduced_away_tautologies_keep_their_projection() {
    let doc = common::load("running.ceres");
    let (s, t) = regularize(&doc.schema, &doc.table).unwrap();
    let cs = build_char_schema(&s, &t).unwrap();
    let ps = build_proj_schema(&s, &t).unwrap();
    let cl = characteristic_clause_set(&cs, &s, 1, &t).unwrap();
    let reduced = reduce_clause_set(&cl);
    let prs = projections_at(&ps, &s, 1, &t).unwrap();
    let end = s.end_sequent_at(1, &t);
    let taut: Vec<_> = cl.iter().filter(|c| is_tautology(c)).collect();
    assert!(!taut.is_empty());
    for c in taut {
        assert!(!reduced.contains(c));
        assert!(projection_for_clause(&prs, &end, c, &t).is_ok());
    }
}
