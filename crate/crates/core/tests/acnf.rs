mod common;

use ceres_core::acnf::{assemble_acnf, ceres_pipeline, size_ratio, Pipeline};
use ceres_core::calculus::{check_proof, AxiomPolicy, CheckOptions, CutGrade, Node, Proof, Rule};
use ceres_core::clause::SubstitutionFamily;
use ceres_core::dsl::{interchange, render_proof};
use ceres_core::projection::{evaluate_projection, projection_term, ProjContext};
use ceres_core::resolution::{eval_res_term, ResolutionSchema};
use ceres_core::term::{normalize_sequent, Formula, Term};
use std::collections::BTreeSet;

fn pipeline(name: &str, with_schema: bool) -> Pipeline {
    let doc = common::load(name);
    let refutation = if with_schema { doc.refutation() } else { None };
    Pipeline::new(&doc.schema, &doc.table, refutation, doc.axiom_policy()).unwrap()
}

fn is_atomic(f: &Formula) -> bool {
    matches!(f, Formula::Atom(..))
}

#[test]
fn running_acnf_verifies_for_small_parameters() {
    let pl = pipeline("running.ceres", true);
    let (results, report) = ceres_pipeline(&pl, 0..=8);
    for r in results {
        let r = r.unwrap();
        assert!(r.report.is_ok(), "gamma {}: {}", r.gamma, r.report);
        let end = normalize_sequent(&pl.schema.end_sequent_at(r.gamma, &pl.table), &pl.table);
        assert!(r.proof.conclusion.multiset_eq(&end));
        assert!(r.proof.cut_formulas().iter().all(is_atomic));
        assert_eq!(r.stats.atomic_cuts, r.stats.refutation_steps);
    }
    assert!(report.gammas.iter().all(|g| g.verified));
    let c = report.size_constant.unwrap();
    for g in &report.gammas {
        assert!(size_ratio(g.stats.as_ref().unwrap()) <= c);
    }
}

#[test]
fn running_acnf_at_zero_has_one_cut() {
    let pl = pipeline("running.ceres", true);
    let r = pl.run(0).unwrap();
    assert_eq!(r.stats.atomic_cuts, 1);
    let cuts: Vec<String> = r.proof.cut_formulas().iter().map(|f| f.to_string()).collect();
    assert_eq!(cuts, ["P(c)"]);
    // Only contractions sit below the cut.
    let mut p: &Proof = &r.proof;
    while let Node::Inference(inf) = &p.node {
        if inf.rule == Rule::Cut {
            break;
        }
        assert!(matches!(inf.rule, Rule::CL | Rule::CR), "{:?} below the cut", inf.rule);
        p = &inf.premises[0];
    }
    assert!(matches!(&p.node, Node::Inference(inf) if inf.rule == Rule::Cut));
}

#[test]
fn first_order_acnf() {
    let doc = common::load("first_order.ceres");
    let phi = doc.proof("phi").unwrap();
    let cl = doc.clause_list("cl_phi").unwrap();
    let family = SubstitutionFamily::default();
    let defs = Default::default();
    let ctx = ProjContext { table: &doc.table, defs: &defs, family: &family, max_unfold: 1_000_000 };
    let prs = evaluate_projection(&projection_term(phi, &[], &doc.table).unwrap(), &ctx).unwrap();
    let d = eval_res_term(doc.deduction("ground").unwrap(), &ResolutionSchema::default(), &family, &doc.table).unwrap();
    let r = assemble_acnf(&d, cl, &prs, &phi.conclusion, 0, &doc.table, AxiomPolicy::Atomic).unwrap();
    assert!(r.report.is_ok(), "{}", r.report);
    assert!(r.proof.conclusion.multiset_eq(&phi.conclusion));
    let cuts: BTreeSet<String> = r.proof.cut_formulas().iter().map(|f| f.to_string()).collect();
    assert_eq!(cuts, BTreeSet::from(["P(a)".to_string(), "Q(a)".to_string()]));
    assert_eq!(r.stats.atomic_cuts, 2);
    assert_eq!(r.stats.projections_plugged, 3);
}

#[test]
fn interchange_output_is_deterministic() {
    let run = || {
        let pl = pipeline("running.ceres", true);
        let (results, report) = ceres_pipeline(&pl, 0..=3);
        let proofs: Vec<Proof> = results.into_iter().map(|r| r.unwrap().proof).collect();
        (interchange("acnf", &proofs), interchange("report", &report))
    };
    assert_eq!(run(), run());
}

#[test]
fn prover_refutation_replaces_a_missing_schema() {
    let pl = pipeline("running.ceres", false);
    for g in 0..=3 {
        let r = pl.run(g).unwrap();
        assert!(r.report.is_ok(), "gamma {g}: {}", r.report);
        assert!(r.proof.cut_formulas().iter().all(is_atomic));
    }
}

#[test]
fn conjunction_fixture_needs_the_prover() {
    let pl = pipeline("conj.ceres", true);
    let (_, report) = ceres_pipeline(&pl, 0..=5);
    for g in &report.gammas {
        assert!(g.verified, "gamma {}: {:?}", g.gamma, g.error);
    }
}

#[test]
fn cut_free_schema_passes_through() {
    let pl = pipeline("disj.ceres", true);
    assert!(pl.cut_free);
    let (results, report) = ceres_pipeline(&pl, 0..=5);
    assert!(report.gammas.iter().all(|g| g.verified));
    for r in results {
        let r = r.unwrap();
        assert_eq!(r.proof.count_rule(&|r| *r == Rule::Cut), 0);
        assert_eq!(r.stats.total_inferences, r.proof.inferences());
    }
}

#[test]
fn rendered_acnf_parses_and_checks() {
    let pl = pipeline("running.ceres", true);
    let r = pl.run(0).unwrap();
    let doc = common::load("running.ceres");
    let text =
        format!("{}\n{}", ceres_core::dsl::render_declarations(&pl.table, &doc.vars), render_proof("acnf", &r.proof));
    let back = common::parse(&text);
    let p = back.proof("acnf").unwrap();
    let opts = CheckOptions { cuts: CutGrade::AtomicOnly, axioms: pl.axioms, ..Default::default() };
    let report = check_proof(p, &back.table, None, opts);
    assert!(report.is_ok(), "{report}");
    assert!(p.conclusion.multiset_eq(&r.proof.conclusion));
    assert_eq!(p.cut_formulas(), vec![Formula::atom("P", vec![Term::constant("c")])]);
}
