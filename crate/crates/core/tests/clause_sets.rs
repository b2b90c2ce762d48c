mod common;

use ceres_core::calculus::{evaluate_schema, regularize};
use ceres_core::charset::{
    build_char_schema, characteristic_clause_set, characteristic_term, eval_clause_set_schema, evaluate_term,
    reduce_clause_set, ClauseSetTerm, SetContext,
};
use ceres_core::clause::{clause_sets_equal, eval_clause_schema, Clause, ClauseExpr, SubstitutionFamily, SymApp};
use ceres_core::dsl::SchemaDocument;
use ceres_core::resolution::{ground_refute, ProverLimits, ProverOutcome};
use ceres_core::term::{merge_sequents, sym, Formula, Sequent, Term};
use proptest::prelude::*;

fn clauses(doc: &SchemaDocument, text: &str) -> Vec<Clause> {
    let src = format!(
        "{}\nclauses tmp {{\n{}\n}}\n",
        ceres_core::dsl::render_declarations(&doc.table, &doc.vars),
        text.replace(';', "\n")
    );
    common::parse(&src).clause_list("tmp").unwrap().to_vec()
}

fn c_app(name: &str) -> SymApp {
    let mut app = SymApp::new(sym(name), Term::n(), vec![Term::V2(sym("x"))]);
    app.clauses = vec![ClauseExpr::Var(sym("X"))];
    app
}

fn family(doc: &SchemaDocument, gamma: u64) -> SubstitutionFamily {
    let w = doc.witness.clone().unwrap();
    let mut f = SubstitutionFamily::arith(gamma);
    f.clause_vars = w.lambda;
    f.set_vars = w.mu;
    f
}

#[test]
fn first_order_characteristic_term() {
    let doc = common::load("first_order.ceres");
    let phi = doc.proof("phi").unwrap();
    let theta = characteristic_term(phi, &[], &doc.table).unwrap();
    assert_eq!(theta.to_string(), "([P(u) |- Q(u)] * [P(u) |- Q(u)]) + ([|- P(a)] + [Q(v) |-])");
    let cl = evaluate_term(&theta, &doc.table).unwrap();
    assert!(clause_sets_equal(&cl, doc.clause_list("cl_phi").unwrap()));
}

#[test]
fn merge_of_equal_clauses_doubles_both_sides() {
    let doc = common::load("first_order.ceres");
    let c = clauses(&doc, "P(u) |- Q(u)");
    let m = merge_sequents(&c[0], &c[0]);
    assert_eq!(m.to_string(), "P(u), P(u) |- Q(u), Q(u)");
}

#[test]
fn running_term_schema_rules() {
    let doc = common::load("running.ceres");
    let (s, t) = regularize(&doc.schema, &doc.table).unwrap();
    let cs = build_char_schema(&s, &t).unwrap();
    let text = cs.render();
    let psi = "cl^psi{|- all x. P(x) -> P(fh(n, x))}";
    let psi_base = "[P(fh(0, x(0))) |- P(fh(0, x(0)))]";
    let rules = [
        format!("cl^phi{{}}(k+1) => {psi}(k+1) + ([|- P(c)] + ([P(fh(k+1, c)) |-] * [|-]))"),
        format!("{psi}(0) => {psi_base}"),
        format!(
            "{psi}(k+1) => {psi}(k) + ([P(x(k+1)) |- P(x(k+1))] + ([P(fh(k, x(k+1))) |-] * [|- P(fh(k+1, x(k+1)))]))"
        ),
        // The base link is kept as a symbol; unfolding it gives the displayed term.
        format!("cl^phi{{}}(0) => {psi}(0) + ([|- P(c)] + ([P(fh(0, c)) |-] * [|-]))"),
    ];
    for r in &rules {
        assert!(text.lines().any(|l| l == r), "missing rule {r}\n{text}");
    }
    assert_eq!(cs.symbols.len(), 2);
}

#[test]
fn running_clause_sets_reduce_to_three_clauses() {
    let doc = common::load("running.ceres");
    let (s, t) = regularize(&doc.schema, &doc.table).unwrap();
    let cs = build_char_schema(&s, &t).unwrap();
    let zero = characteristic_clause_set(&cs, &s, 0, &t).unwrap();
    assert!(clause_sets_equal(&zero, &clauses(&doc, "P(u) |- P(u); |- P(c); P(c) |-")));
    for gamma in 1..=8u64 {
        let cl = characteristic_clause_set(&cs, &s, gamma, &t).unwrap();
        assert_eq!(cl.len(), 2 * gamma as usize + 3);
        let fc = (0..gamma).fold("c".to_string(), |acc, _| format!("f({acc})"));
        let want = clauses(&doc, &format!("P(u) |- P(f(u)); |- P(c); P({fc}) |-"));
        assert!(clause_sets_equal(&reduce_clause_set(&cl), &want), "gamma {gamma}");
    }
}

#[test]
fn extraction_commutes_with_evaluation() {
    for name in common::SCHEMA_FIXTURES {
        let doc = common::load(name);
        let (s, t) = regularize(&doc.schema, &doc.table).unwrap();
        let cs = build_char_schema(&s, &t).unwrap();
        for gamma in 0..=8 {
            let inst = evaluate_schema(&s, &t, gamma).unwrap();
            let direct = evaluate_term(&characteristic_term(&inst, &[], &t).unwrap(), &t).unwrap();
            let schematic = characteristic_clause_set(&cs, &s, gamma, &t).unwrap();
            assert!(clause_sets_equal(&direct, &schematic), "{name} at {gamma}");
        }
    }
}

#[test]
fn running_clause_sets_are_refutable() {
    let doc = common::load("running.ceres");
    let (s, t) = regularize(&doc.schema, &doc.table).unwrap();
    let cs = build_char_schema(&s, &t).unwrap();
    let limits = ProverLimits { max_generated: 1000 };
    for gamma in 0..=8 {
        let cl = characteristic_clause_set(&cs, &s, gamma, &t).unwrap();
        for set in [cl.clone(), reduce_clause_set(&cl)] {
            match ground_refute(&set, &limits, &t) {
                ProverOutcome::Refuted { generated, .. } => assert!(generated <= 1000),
                other => panic!("gamma {gamma}: {other:?}"),
            }
        }
    }
}

#[test]
fn reduction_examples() {
    let doc = common::load("first_order.ceres");
    assert!(reduce_clause_set(&clauses(&doc, "P(a) |- P(a)")).is_empty());
    let reduced = reduce_clause_set(&clauses(&doc, "P(u) |-; P(a) |-"));
    assert!(clause_sets_equal(&reduced, &clauses(&doc, "P(u) |-")));
}

#[test]
fn clause_schema_normal_forms() {
    let doc = common::load("clause_schemata.ceres");
    for alpha in 0..=4u64 {
        let c = eval_clause_schema(&ClauseExpr::Symbol(c_app("c")), &doc.clauses, &family(&doc, alpha), &doc.table)
            .unwrap();
        let atoms: Vec<String> = (0..=alpha)
            .map(|i| format!("P({})", (0..i).fold(format!("x({i})"), |acc, _| format!("g({acc})"))))
            .collect();
        assert_eq!(c.to_string(), format!("|- {}", atoms.join(", ")));
    }
}

#[test]
fn clause_variable_takes_its_substitution() {
    let doc = common::load("clause_schemata.ceres");
    let mut f = SubstitutionFamily::arith(2);
    let q = Formula::atom("Q", vec![Term::idx("x", Term::n())]);
    f.clause_vars.insert(sym("X"), ClauseExpr::Clause(Sequent::new(vec![q], vec![])));
    let c = eval_clause_schema(&ClauseExpr::Symbol(c_app("c")), &doc.clauses, &f, &doc.table).unwrap();
    assert_eq!(c.to_string(), "Q(x(2)) |- P(x(0)), P(g(x(1))), P(g(g(x(2))))");
}

fn set_app(name: &str, var: &str) -> ClauseSetTerm {
    let mut app = c_app(name);
    app.sets = vec![ClauseSetTerm::Var(sym(var))];
    ClauseSetTerm::Symbol(app)
}

fn eval_set(doc: &SchemaDocument, t: &ClauseSetTerm, gamma: u64) -> Vec<Clause> {
    let f = family(doc, gamma);
    let ctx =
        SetContext { table: &doc.table, clauses: &doc.clauses, sets: &doc.clause_sets, family: &f, max_unfold: 1000 };
    eval_clause_set_schema(t, &ctx).unwrap()
}

fn g_tower(i: u64, base: &str) -> String {
    (0..i).fold(base.to_string(), |acc, _| format!("g({acc})"))
}

#[test]
fn clause_set_term_with_set_variable() {
    let doc = common::load("clause_schemata.ceres");
    for alpha in 0..=3u64 {
        let got = eval_set(&doc, &set_app("t", "eta"), alpha);
        let long: Vec<String> = (0..=alpha).map(|i| format!("P({})", g_tower(i, &format!("x({i})")))).collect();
        let want = format!("{} |-; |- {}, P(x({alpha}))", long[alpha as usize], long.join(", "));
        assert!(clause_sets_equal(&got, &clauses(&doc, &want)), "alpha {alpha}");
    }
}

#[test]
fn clause_set_schema_evaluation() {
    let doc = common::load("clause_schemata.ceres");
    for alpha in 0..=3u64 {
        let got = eval_set(&doc, &set_app("d1", "xi"), alpha);
        let long: Vec<String> = (0..=alpha).map(|i| format!("P({})", g_tower(i, &format!("x({i})")))).collect();
        let mut want = vec![format!("|- {}", long.join(", "))];
        want.extend((0..=alpha).map(|i| format!("P({}) |-", g_tower(i, "a"))));
        assert!(clause_sets_equal(&got, &clauses(&doc, &want.join(";"))), "alpha {alpha}");
    }
}

fn ground_clause() -> impl Strategy<Value = Clause> {
    let atom = (0u64..3, prop_oneof![Just("P"), Just("Q")])
        .prop_map(|(i, p)| Formula::atom(p, vec![(0..i).fold(Term::constant("c"), |t, _| Term::app("f", vec![t]))]));
    (prop::collection::vec(atom.clone(), 0..3), prop::collection::vec(atom, 0..3)).prop_map(|(a, s)| Sequent::new(a, s))
}

fn set_term() -> impl Strategy<Value = ClauseSetTerm> {
    ground_clause().prop_map(ClauseSetTerm::leaf).prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ClauseSetTerm::plus(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| ClauseSetTerm::times(a, b)),
        ]
    })
}

proptest! {
    #[test]
    fn product_is_bounded_by_the_factors(a in set_term(), b in set_term()) {
        let table = common::load("first_order.ceres").table;
        let ea = evaluate_term(&a, &table).unwrap();
        let eb = evaluate_term(&b, &table).unwrap();
        let ab = evaluate_term(&ClauseSetTerm::times(a, b), &table).unwrap();
        prop_assert!(ab.len() <= ea.len() * eb.len());
    }

    #[test]
    fn sum_is_idempotent(a in set_term()) {
        let table = common::load("first_order.ceres").table;
        let once = evaluate_term(&a, &table).unwrap();
        let twice = evaluate_term(&ClauseSetTerm::plus(a.clone(), a), &table).unwrap();
        prop_assert!(clause_sets_equal(&once, &twice));
    }
}
