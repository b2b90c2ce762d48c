mod common;

use ceres_core::calculus::{
    check_proof, check_schema, evaluate_schema, is_regular, regularize, CheckOptions, CutGrade, Node, Proof,
};
use ceres_core::term::{merge_sequents, Formula, Sequent, Term};
use proptest::prelude::*;

fn sequent(text: &str, doc: &ceres_core::dsl::SchemaDocument) -> Sequent {
    // Parse through a one-line clause list so the document's table applies.
    let src = format!("{}\nclauses tmp {{ {text} }}\n", ceres_core::dsl::render_declarations(&doc.table, &doc.vars));
    common::parse(&src).clause_list("tmp").unwrap()[0].clone()
}

fn has_defined_redex(p: &Proof, doc: &ceres_core::dsl::SchemaDocument) -> bool {
    let mut found = false;
    p.visit(&mut |q| {
        for f in q.conclusion.ant.iter().chain(&q.conclusion.suc) {
            found |= doc.table.formula_has_defined(f);
        }
    });
    found
}

#[test]
fn running_instance_zero_ends_in_s0() {
    let doc = common::load("running.ceres");
    let p = evaluate_schema(&doc.schema, &doc.table, 0).unwrap();
    let want = sequent("all x. P(x) -> P(f(x)) |- (P(c) -> P(g(0, c))) -> (P(c) -> P(g(0, c)))", &doc);
    assert!(p.conclusion.multiset_eq(&want), "{}", p.conclusion);
}

#[test]
fn running_instance_one_checks_with_cuts() {
    let doc = common::load("running.ceres");
    let p = evaluate_schema(&doc.schema, &doc.table, 1).unwrap();
    let opts = CheckOptions { cuts: CutGrade::Any, ..Default::default() };
    let report = check_proof(&p, &doc.table, None, opts);
    assert!(report.is_ok(), "{report}");
    assert!(p.count_rule(&|r| *r == ceres_core::calculus::Rule::Cut) >= 2);
}

#[test]
fn instances_check_without_links_or_redexes() {
    for name in common::SCHEMA_FIXTURES {
        let doc = common::load(name);
        assert!(check_schema(&doc.schema, &doc.table).is_ok(), "{name}");
        for gamma in 0..=8 {
            let p = evaluate_schema(&doc.schema, &doc.table, gamma).unwrap();
            let opts = CheckOptions { axioms: doc.axiom_policy(), ..Default::default() };
            let report = check_proof(&p, &doc.table, None, opts);
            assert!(report.is_ok(), "{name} at {gamma}: {report}");
            assert!(p.links().is_empty(), "{name} at {gamma}");
            assert!(!has_defined_redex(&p, &doc), "{name} at {gamma}");
            let end = doc.schema.end_sequent_at(gamma, &doc.table);
            assert!(p.conclusion.multiset_eq(&end), "{name} at {gamma}");
        }
    }
}

#[test]
fn link_free_step_evaluates_to_its_instance() {
    let doc = common::parse(
        "pred P : omega
         pair chain(n) : P(n) |- P(n) {
           base {
             l1: axiom P(0) |- P(0)
           }
           step {
             l1: axiom P(k+1) |- P(k+1)
           }
         }",
    );
    let p = evaluate_schema(&doc.schema, &doc.table, 5).unwrap();
    assert!(matches!(p.node, Node::Axiom));
    assert_eq!(p.conclusion.to_string(), "P(5) |- P(5)");
}

#[test]
fn quantified_parameter_proof_checks() {
    let doc = common::load("chi.ceres");
    let report = check_proof(doc.proof("chi").unwrap(), &doc.table, None, CheckOptions::default());
    assert!(report.is_ok(), "{report}");
}

#[test]
fn eigenvariables_become_indexed() {
    let doc = common::load("disj.ceres");
    let (reg, table) = regularize(&doc.schema, &doc.table).unwrap();
    let pair = reg.top();
    let axioms = |p: &Proof| {
        let mut out = Vec::new();
        p.visit(&mut |q| {
            if matches!(q.node, Node::Axiom) {
                out.push(q.conclusion.to_string());
            }
        });
        out
    };
    assert_eq!(axioms(&pair.base), ["P(0, u(0)) |- P(0, u(0))"]);
    assert_eq!(axioms(&pair.step), ["P(k+1, u(k+1)) |- P(k+1, u(k+1))"]);
    for gamma in 1..=4 {
        let raw = evaluate_schema(&doc.schema, &doc.table, gamma).unwrap();
        let fixed = evaluate_schema(&reg, &table, gamma).unwrap();
        assert!(!is_regular(&raw, &doc.table));
        assert!(is_regular(&fixed, &table));
    }
}

#[test]
fn regularize_is_idempotent_and_keeps_end_sequents() {
    for name in common::SCHEMA_FIXTURES {
        let doc = common::load(name);
        let (once, t1) = regularize(&doc.schema, &doc.table).unwrap();
        let (twice, t2) = regularize(&once, &t1).unwrap();
        assert_eq!(once, twice, "{name}");
        assert_eq!(t1, t2, "{name}");
        for gamma in 0..=8 {
            let a = doc.schema.end_sequent_at(gamma, &doc.table);
            let b = once.end_sequent_at(gamma, &t1);
            assert!(a.multiset_eq(&b), "{name} at {gamma}");
            let p = evaluate_schema(&once, &t1, gamma).unwrap();
            assert!(is_regular(&p, &t1), "{name} at {gamma}");
        }
    }
}

#[test]
fn wrong_link_sequent_is_reported() {
    let doc = common::parse(
        "pred P : omega
         pred Q : omega
         pair chain(n) : P(n) |- P(n) {
           base {
             l1: axiom P(0) |- P(0)
           }
           step {
             l1: link chain(k) : Q(k) |- Q(k)
             l2: rule w:l l1 main=P(k+1)
             l3: rule w:r l2 main=P(k+1)
             l4: rule w:l l3 main=Q(k)
           }
         }",
    );
    assert!(!check_schema(&doc.schema, &doc.table).is_ok());
}

fn atom() -> impl Strategy<Value = Formula> {
    (0u64..4, prop_oneof![Just("P"), Just("Q")])
        .prop_map(|(i, p)| Formula::atom(p, vec![Term::app("f", vec![Term::numeral(i)])]))
}

fn any_sequent() -> impl Strategy<Value = Sequent> {
    (prop::collection::vec(atom(), 0..4), prop::collection::vec(atom(), 0..4)).prop_map(|(a, s)| Sequent::new(a, s))
}

proptest! {
    #[test]
    fn merge_is_associative(a in any_sequent(), b in any_sequent(), c in any_sequent()) {
        let left = merge_sequents(&merge_sequents(&a, &b), &c);
        let right = merge_sequents(&a, &merge_sequents(&b, &c));
        prop_assert!(left.multiset_eq(&right));
    }

    #[test]
    fn empty_sequent_is_the_merge_unit(a in any_sequent()) {
        prop_assert!(merge_sequents(&Sequent::empty(), &a).multiset_eq(&a));
        prop_assert!(merge_sequents(&a, &Sequent::empty()).multiset_eq(&a));
    }
}
