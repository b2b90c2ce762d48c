//! One line per acceptance criterion. Tolerances are exact unless a
//! runtime bound is given; `C_MAX` pins the size constant.

mod common;

use ceres_core::acnf::{assemble_acnf, ceres_pipeline, size_ratio, Pipeline};
use ceres_core::calculus::{
    check_proof, evaluate_schema, lki_to_schema, regularize, schema_to_lki, CheckOptions, CutGrade, Node, Proof,
    ProofSchema, Rule,
};
use ceres_core::charset::{
    build_char_schema, characteristic_clause_set, characteristic_term, evaluate_term, reduce_clause_set,
};
use ceres_core::clause::{clause_sets_equal, Clause, SubstitutionFamily};
use ceres_core::dsl::{render_declarations, SchemaDocument};
use ceres_core::projection::{
    build_proj_schema, check_projection, evaluate_projection, projection_for_clause, projection_term, projections_at,
    proof_key, ProjContext,
};
use ceres_core::resolution::{eval_res_term, ground_refute, resolve, ProverLimits, ProverOutcome, ResolutionSchema};
use ceres_core::term::{merge_sequents, normalize_term, Formula, Sequent, SymbolTable, Term};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::BTreeSet;
use std::time::{Duration, Instant};

const C_MAX: f64 = 3.0;

type Outcome = Result<String, String>;

/// Name, runtime limit in seconds, check.
type Criterion = (&'static str, Option<u64>, fn() -> Outcome);

fn clauses(table: &SymbolTable, text: &str) -> Vec<Clause> {
    let src = format!("{}\nclauses tmp {{\n{}\n}}\n", render_declarations(table, &[]), text.replace(';', "\n"));
    common::parse(&src).clause_list("tmp").unwrap().to_vec()
}

/// Multiset equality modulo variable renaming.
fn multiset_variants(a: &[Clause], b: &[Clause]) -> bool {
    let mut rest: Vec<&Clause> = b.iter().collect();
    a.len() == b.len()
        && a.iter().all(|c| {
            match rest.iter().position(|d| clause_sets_equal(std::slice::from_ref(c), &[(*d).clone()])) {
                Some(j) => {
                    rest.remove(j);
                    true
                }
                None => false,
            }
        })
}

fn show(cs: &[Clause]) -> String {
    cs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("; ")
}

fn regular(name: &str) -> (ProofSchema, SymbolTable, SchemaDocument) {
    let doc = common::load(name);
    let (s, t) = regularize(&doc.schema, &doc.table).unwrap();
    (s, t, doc)
}

fn running_clause_sets() -> Outcome {
    let (s, t, _) = regular("running.ceres");
    let cs = build_char_schema(&s, &t).map_err(|e| e.to_string())?;
    let displayed = [
        "P(x(0)) |- P(x(0)); |- P(c); P(c) |-",
        "P(x(0)) |- P(x(0)); P(f(x(1))) |- P(f(x(1))); P(x(1)) |- P(f(x(1))); |- P(c); P(f(c)) |-",
        "P(x(0)) |- P(x(0)); P(f(x(1))) |- P(f(x(1))); P(f(f(x(2)))) |- P(f(f(x(2)))); \
         P(x(1)) |- P(f(x(1))); P(f(x(2))) |- P(f(f(x(2)))); |- P(c); P(f(f(c))) |-",
    ];
    let mut bad = Vec::new();
    for (g, want) in displayed.iter().enumerate() {
        let got = characteristic_clause_set(&cs, &s, g as u64, &t).map_err(|e| e.to_string())?;
        if !multiset_variants(&got, &clauses(&t, want)) {
            bad.push(format!("gamma {g} gives {{{}}}", show(&got)));
        }
    }
    let two = characteristic_clause_set(&cs, &s, 2, &t).map_err(|e| e.to_string())?;
    let reduced = reduce_clause_set(&two);
    if !clause_sets_equal(&reduced, &clauses(&t, "P(x(1)) |- P(f(x(1))); |- P(c); P(f(f(c))) |-")) {
        bad.push(format!("reduced gamma 2 gives {{{}}}", show(&reduced)));
    }
    if bad.is_empty() {
        Ok("gamma 0, 1, 2 and reduced gamma 2 match".into())
    } else {
        Err(bad.join("; "))
    }
}

fn first_order() -> Outcome {
    let doc = common::load("first_order.ceres");
    let phi = doc.proof("phi").unwrap();
    let t = &doc.table;
    let cl =
        evaluate_term(&characteristic_term(phi, &[], t).map_err(|e| e.to_string())?, t).map_err(|e| e.to_string())?;
    let want = clauses(t, "P(u), P(u) |- Q(u), Q(u); |- P(a); Q(v) |-");
    if !multiset_variants(&cl, &want) {
        return Err(format!("CL is {{{}}}", show(&cl)));
    }
    let family = SubstitutionFamily::default();
    let defs = Default::default();
    let ctx = ProjContext { table: t, defs: &defs, family: &family, max_unfold: 1_000_000 };
    let prs = evaluate_projection(&projection_term(phi, &[], t).map_err(|e| e.to_string())?, &ctx)
        .map_err(|e| e.to_string())?;
    for c in &want {
        let want_end = merge_sequents(&phi.conclusion, c);
        if !prs.iter().any(|p| p.conclusion.multiset_eq(&want_end) && check_projection(p, t).is_ok()) {
            return Err(format!("no checked projection ending in {want_end}"));
        }
    }
    let d = eval_res_term(doc.deduction("ground").unwrap(), &ResolutionSchema::default(), &family, t)
        .map_err(|e| e.to_string())?;
    let r = assemble_acnf(&d, &want, &prs, &phi.conclusion, 0, t, doc.axiom_policy()).map_err(|e| e.to_string())?;
    if !r.report.is_ok() {
        return Err(r.report.to_string());
    }
    let cuts: Vec<String> = r.proof.cut_formulas().iter().map(|f| f.to_string()).collect();
    let set: BTreeSet<&str> = cuts.iter().map(|s| s.as_str()).collect();
    if cuts.len() != 2 || set != BTreeSet::from(["P(a)", "Q(a)"]) {
        return Err(format!("cuts {cuts:?}"));
    }
    Ok(format!("3 clauses, 3 projections, ACNF with cuts {cuts:?}"))
}

fn commutation() -> Outcome {
    let mut checked = 0;
    for name in common::SCHEMA_FIXTURES {
        let (s, t, _) = regular(name);
        let cs = build_char_schema(&s, &t).map_err(|e| e.to_string())?;
        let ps = build_proj_schema(&s, &t).map_err(|e| e.to_string())?;
        let family = SubstitutionFamily::default();
        let defs = Default::default();
        let ctx = ProjContext { table: &t, defs: &defs, family: &family, max_unfold: 1_000_000 };
        for g in 0..=8 {
            let inst = evaluate_schema(&s, &t, g).map_err(|e| e.to_string())?;
            let direct = evaluate_term(&characteristic_term(&inst, &[], &t).map_err(|e| e.to_string())?, &t)
                .map_err(|e| e.to_string())?;
            let schematic = characteristic_clause_set(&cs, &s, g, &t).map_err(|e| e.to_string())?;
            if !clause_sets_equal(&direct, &schematic) {
                return Err(format!("CL differs for {name} at {g}"));
            }
            let key = |ps: Vec<Proof>| {
                let mut v: Vec<String> = ps.iter().map(proof_key).collect();
                v.sort();
                v
            };
            let direct = evaluate_projection(&projection_term(&inst, &[], &t).map_err(|e| e.to_string())?, &ctx)
                .map_err(|e| e.to_string())?;
            let schematic = projections_at(&ps, &s, g, &t).map_err(|e| e.to_string())?;
            if key(direct) != key(schematic) {
                return Err(format!("PR differs for {name} at {g}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} fixture instances"))
}

fn unsatisfiability() -> Outcome {
    let (s, t, _) = regular("running.ceres");
    let cs = build_char_schema(&s, &t).map_err(|e| e.to_string())?;
    let limits = ProverLimits { max_generated: 1000 };
    let mut most = 0;
    for g in 0..=8 {
        let cl = characteristic_clause_set(&cs, &s, g, &t).map_err(|e| e.to_string())?;
        match ground_refute(&cl, &limits, &t) {
            ProverOutcome::Refuted { generated, .. } if generated <= 1000 => most = most.max(generated),
            other => return Err(format!("gamma {g}: {other:?}")),
        }
    }
    Ok(format!("at most {most} generated clauses"))
}

fn projection_correspondence() -> Outcome {
    let (s, t, _) = regular("running.ceres");
    let cs = build_char_schema(&s, &t).map_err(|e| e.to_string())?;
    let ps = build_proj_schema(&s, &t).map_err(|e| e.to_string())?;
    let mut n = 0;
    for g in 0..=8 {
        let cl = characteristic_clause_set(&cs, &s, g, &t).map_err(|e| e.to_string())?;
        let prs = projections_at(&ps, &s, g, &t).map_err(|e| e.to_string())?;
        let end = s.end_sequent_at(g, &t);
        for c in &cl {
            let p = projection_for_clause(&prs, &end, c, &t).map_err(|e| format!("gamma {g}, {c}: {e}"))?;
            let report = check_projection(p, &t);
            if !report.is_ok() || p.count_rule(&|r| *r == Rule::Cut) != 0 {
                return Err(format!("gamma {g}, {c}: {report}"));
            }
            n += 1;
        }
    }
    Ok(format!("{n} clauses"))
}

fn end_to_end() -> Outcome {
    let doc = common::load("running.ceres");
    let pl = Pipeline::new(&doc.schema, &doc.table, doc.refutation(), doc.axiom_policy()).map_err(|e| e.to_string())?;
    let (results, _) = ceres_pipeline(&pl, 0..=5);
    for r in &results {
        let r = r.as_ref().map_err(|e| e.to_string())?;
        let atomic = r.proof.cut_formulas().iter().all(|f| matches!(f, Formula::Atom(..)));
        if !r.report.is_ok() || !atomic {
            return Err(format!("gamma {}: {}", r.gamma, r.report));
        }
    }
    // The displayed ACNF at 0: two projections of 5 inferences each, one cut
    // on P(c), then a contraction on each side.
    let zero = &results[0].as_ref().unwrap().proof;
    let mut p = zero;
    let mut below = Vec::new();
    while let Node::Inference(inf) = &p.node {
        if inf.rule == Rule::Cut {
            break;
        }
        below.push(inf.rule.clone());
        p = &inf.premises[0];
    }
    let end = &zero.conclusion;
    let (a, b) = (end.ant[0].clone(), end.suc[0].clone());
    let pc = Formula::atom("P", vec![Term::constant("c")]);
    let left = Sequent::new(vec![a.clone()], vec![pc.clone(), b.clone()]);
    let right = Sequent::new(vec![pc.clone(), a], vec![b]);
    let shape = below == [Rule::CR, Rule::CL] || below == [Rule::CL, Rule::CR];
    let prem = p.premises();
    let ok = shape
        && p.cut_formulas() == vec![pc]
        && prem.len() == 2
        && prem[0].conclusion.multiset_eq(&left)
        && prem[1].conclusion.multiset_eq(&right)
        && prem[0].inferences() == 5
        && prem[1].inferences() == 5
        && zero.inferences() == 13;
    if !ok {
        return Err(format!("gamma 0 shape differs: {below:?} over {}", p.conclusion));
    }
    Ok("gamma 0..5 verified; gamma 0 has the displayed 13-inference shape".into())
}

fn size_regression() -> Outcome {
    let doc = common::load("running.ceres");
    let pl = Pipeline::new(&doc.schema, &doc.table, doc.refutation(), doc.axiom_policy()).map_err(|e| e.to_string())?;
    let (_, report) = ceres_pipeline(&pl, 0..=8);
    let c = report.size_constant.ok_or("no size constant")?;
    for g in &report.gammas {
        let st = g.stats.as_ref().ok_or(format!("gamma {} failed", g.gamma))?;
        let bound = c * st.skeleton_inferences.max(1) as f64 * st.max_projection_inferences.max(1) as f64;
        if st.total_inferences as f64 > bound + 1e-9 || size_ratio(st) > c {
            return Err(format!("gamma {} exceeds C = {c}", g.gamma));
        }
    }
    if c > C_MAX {
        return Err(format!("C = {c:.3} above {C_MAX}"));
    }
    Ok(format!("C = {c:.3}"))
}

fn random_term(rng: &mut StdRng, depth: u32, omega: bool) -> Term {
    if omega {
        return match if depth == 0 { 0 } else { rng.gen_range(0..3) } {
            0 => Term::numeral(rng.gen_range(0..4)),
            1 => Term::succ(random_term(rng, depth - 1, true)),
            _ => Term::app("pre", vec![random_term(rng, depth - 1, true)]),
        };
    }
    match if depth == 0 { 0 } else { rng.gen_range(0..4) } {
        0 => Term::constant("c"),
        1 => Term::app("f", vec![random_term(rng, depth - 1, false)]),
        2 => Term::app("fh", vec![random_term(rng, depth - 1, true), random_term(rng, depth - 1, false)]),
        _ => Term::app("g", vec![random_term(rng, depth - 1, true), random_term(rng, depth - 1, false)]),
    }
}

/// Normalizes the subterm at a random position first.
fn normalize_inside(t: &Term, rng: &mut StdRng, table: &SymbolTable) -> Term {
    match t {
        Term::App(f, args) if !args.is_empty() && rng.gen_bool(0.7) => {
            let i = rng.gen_range(0..args.len());
            let mut args = args.clone();
            args[i] = normalize_inside(&args[i], rng, table);
            Term::App(f.clone(), args)
        }
        _ => normalize_term(t, table),
    }
}

fn herbrand_atom(i: usize) -> Formula {
    let t = (0..i % 3).fold(Term::constant("c"), |t, _| Term::app("f", vec![t]));
    Formula::atom(if i < 3 { "P" } else { "Q" }, vec![t])
}

fn holds(c: &Sequent, model: u32) -> bool {
    let val = |f: &Formula| (0..6).any(|i| herbrand_atom(i) == *f && model & (1 << i) != 0);
    c.ant.iter().any(|f| !val(f)) || c.suc.iter().any(val)
}

fn soundness_suites() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let clause = |rng: &mut StdRng| {
        let mut side = || (0..rng.gen_range(0..4)).map(|_| herbrand_atom(rng.gen_range(0..6))).collect::<Vec<_>>();
        let ant = side();
        Sequent::new(ant, side())
    };
    for _ in 0..500 {
        let (c, d) = (clause(&mut rng), clause(&mut rng));
        let pivot = herbrand_atom(rng.gen_range(0..6));
        let r = resolve(&c, &d, &pivot).clause;
        if let Some(m) = (0..64).find(|&m| holds(&c, m) && holds(&d, m) && !holds(&r, m)) {
            return Err(format!("res({c}; {d}; {pivot}) = {r} fails in model {m:06b}"));
        }
    }
    let doc = common::load("running.ceres");
    for _ in 0..100 {
        let t = random_term(&mut rng, 4, false);
        let nf = normalize_term(&t, &doc.table);
        if normalize_term(&nf, &doc.table) != nf {
            return Err(format!("normalize not idempotent on {t}"));
        }
        let other = normalize_term(&normalize_inside(&t, &mut rng, &doc.table), &doc.table);
        if other != nf {
            return Err(format!("{t} normalizes to {nf} and {other}"));
        }
    }
    for name in common::SCHEMA_FIXTURES {
        let doc = common::load(name);
        for g in 0..=8 {
            let p = evaluate_schema(&doc.schema, &doc.table, g).map_err(|e| e.to_string())?;
            let report =
                check_proof(&p, &doc.table, None, CheckOptions { axioms: doc.axiom_policy(), ..Default::default() });
            if !report.is_ok() {
                return Err(format!("{name} at {g}: {report}"));
            }
        }
    }
    Ok("500 resolvents, 100 normal forms, 27 instances".into())
}

fn translation() -> Outcome {
    let (s, t, _) = regular("running.ceres");
    let p = schema_to_lki(&s, &t).map_err(|e| e.to_string())?;
    let back = lki_to_schema(&p, &t).map_err(|e| e.to_string())?;
    for g in 0..=5 {
        let a = evaluate_schema(&s, &t, g).map_err(|e| e.to_string())?;
        let b = evaluate_schema(&back, &t, g).map_err(|e| e.to_string())?;
        if !a.conclusion.multiset_eq(&b.conclusion) {
            return Err(format!("gamma {g}: {} vs {}", a.conclusion, b.conclusion));
        }
    }
    let doc = common::load("conj.ceres");
    let p = schema_to_lki(&doc.schema, &doc.table).map_err(|e| e.to_string())?;
    let opts = CheckOptions { induction: true, cuts: CutGrade::Any, ..Default::default() };
    let report = check_proof(&p, &doc.table, None, opts);
    // cut(cut(|- S(0), ind: S(0) |- S(k)), S(k) unpacked)
    let left = p.premises().first();
    let shape = p.rule() == Some(&Rule::Cut)
        && left.is_some_and(|l| {
            l.rule() == Some(&Rule::Cut)
                && l.premises()[0].conclusion.ant.is_empty()
                && l.premises()[1].rule().and_then(|r| r.ind_data()).is_some_and(|d| d.term == Term::k())
                && l.conclusion.ant.is_empty()
        });
    if !report.is_ok() || !shape {
        return Err(format!("conjunction translation: {report}"));
    }
    Ok(format!("round trip at gamma 0..5; displayed shape with {} inferences", p.inferences()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("running clause sets", Some(1), running_clause_sets),
        ("first-order CERES", Some(1), first_order),
        ("commutation", Some(10), commutation),
        ("unsatisfiability", None, unsatisfiability),
        ("projection correspondence", None, projection_correspondence),
        ("end-to-end ACNF", Some(30), end_to_end),
        ("size regression", None, size_regression),
        ("soundness suites", None, soundness_suites),
        ("translation round trip", None, translation),
    ];
    let mut failed = Vec::new();
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let took = start.elapsed();
        if let (Ok(msg), Some(secs)) = (&outcome, limit) {
            if took > Duration::from_secs(secs) {
                outcome = Err(format!("{msg}, but took {took:.2?} (limit {secs} s)"));
            }
        }
        match &outcome {
            Ok(msg) => println!("criterion {}: PASS {name}: {msg} [{took:.2?}]", i + 1),
            Err(msg) => {
                println!("criterion {}: FAIL {name}: {msg} [{took:.2?}]", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
