mod common;

use ceres_core::term::{
    instantiate_term, normalize_formula, normalize_term, unify_terms, Formula, RuleSide, SymbolTable, Term, TermSubst,
    Var,
};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const TABLE: &str = "
fun c : iota
fun f : iota -> iota
fun fh : omega, iota -> iota
fun add : omega, omega -> omega
fun dbl : omega -> omega
pred P : iota
pred R : omega, iota
pred Q : omega, iota

fh(0, u) => u;
fh(y+1, u) => f(fh(y, u));
add(0, m) => m;
add(y+1, m) => add(y, m)+1;
dbl(0) => 0;
dbl(y+1) => dbl(y)+2;
Q(0, u) => P(u);
Q(y+1, u) => ex z. R(y, z) /\\ Q(y, f(u));

clauses unit { |- P(c) }
";

fn table() -> SymbolTable {
    let doc = common::parse(TABLE);
    assert!(doc.table.validate().is_valid());
    doc.table
}

fn omega_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![Just(Term::zero()), Just(Term::n()), (0u64..3).prop_map(Term::numeral)];
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Term::succ),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::app("add", vec![a, b])),
            inner.prop_map(|a| Term::app("dbl", vec![a])),
        ]
    })
}

fn iota_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![Just(Term::constant("c")), Just(Term::iota("u")), Just(Term::iota("w"))];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Term::app("f", vec![a])),
            (omega_term(), inner).prop_map(|(m, a)| Term::app("fh", vec![m, a])),
        ]
    })
}

fn formula() -> impl Strategy<Value = Formula> {
    let atom = prop_oneof![
        iota_term().prop_map(|t| Formula::atom("P", vec![t])),
        (omega_term(), iota_term()).prop_map(|(m, t)| Formula::atom("R", vec![m, t])),
        (omega_term(), iota_term()).prop_map(|(m, t)| Formula::atom("Q", vec![m, t])),
    ];
    atom.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
            inner.clone().prop_map(|a| Formula::forall(Var::iota("z"), a)),
            inner.prop_map(|a| Formula::exists(Var::iota("u"), a)),
        ]
    })
}

// Independent rewriter: contracts one redex at a time, chosen at random.

fn rule_subst(lhs: &[Term], args: &[Term]) -> Option<TermSubst> {
    let mut s = TermSubst::new();
    match (lhs[0].pred(), args[0].pred()) {
        (Some(Term::Var(y)), Some(a)) => s = s.with(&y.name, a.clone()),
        (None, None) if lhs[0].is_zero() && args[0].is_zero() => {}
        _ => return None,
    }
    for (l, a) in lhs.iter().zip(args).skip(1) {
        let Term::Var(v) = l else { return None };
        s = s.with(&v.name, a.clone());
    }
    Some(s)
}

fn redex<'a>(name: &str, args: &[Term], table: &'a SymbolTable) -> Option<(TermSubst, &'a RuleSide)> {
    let (base, step) = table.rules_of(name)?;
    let rule = if args.first()?.is_zero() { base } else { step };
    rule_subst(&rule.lhs, args).map(|s| (s, &rule.rhs))
}

fn term_redexes(t: &Term, table: &SymbolTable) -> usize {
    match t {
        Term::App(f, args) => {
            let here = usize::from(redex(f, args, table).is_some());
            here + args.iter().map(|a| term_redexes(a, table)).sum::<usize>()
        }
        Term::Idx(_, i) => term_redexes(i, table),
        _ => 0,
    }
}

fn contract_term(t: &Term, table: &SymbolTable, pick: &mut usize) -> Term {
    match t {
        Term::App(f, args) => {
            if let Some((s, RuleSide::Term(rhs))) = redex(f, args, table) {
                if *pick == 0 {
                    *pick = usize::MAX;
                    return s.term(rhs);
                }
                *pick -= 1;
            }
            Term::App(f.clone(), args.iter().map(|a| contract_term(a, table, pick)).collect())
        }
        Term::Idx(x, i) => Term::Idx(x.clone(), Box::new(contract_term(i, table, pick))),
        _ => t.clone(),
    }
}

fn formula_redexes(f: &Formula, table: &SymbolTable) -> usize {
    match f {
        Formula::Atom(p, args) => {
            usize::from(redex(p, args, table).is_some()) + args.iter().map(|a| term_redexes(a, table)).sum::<usize>()
        }
        Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => formula_redexes(a, table),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            formula_redexes(a, table) + formula_redexes(b, table)
        }
        Formula::Top | Formula::Bottom => 0,
    }
}

fn contract_formula(f: &Formula, table: &SymbolTable, pick: &mut usize) -> Formula {
    match f {
        Formula::Atom(p, args) => {
            if let Some((s, RuleSide::Formula(rhs))) = redex(p, args, table) {
                if *pick == 0 {
                    *pick = usize::MAX;
                    return s.formula(rhs);
                }
                *pick -= 1;
            }
            Formula::Atom(p.clone(), args.iter().map(|a| contract_term(a, table, pick)).collect())
        }
        Formula::Not(a) => Formula::not(contract_formula(a, table, pick)),
        Formula::And(a, b) => Formula::and(contract_formula(a, table, pick), contract_formula(b, table, pick)),
        Formula::Or(a, b) => Formula::or(contract_formula(a, table, pick), contract_formula(b, table, pick)),
        Formula::Imp(a, b) => Formula::imp(contract_formula(a, table, pick), contract_formula(b, table, pick)),
        Formula::Forall(v, a) => Formula::forall(v.clone(), contract_formula(a, table, pick)),
        Formula::Exists(v, a) => Formula::exists(v.clone(), contract_formula(a, table, pick)),
        Formula::Top | Formula::Bottom => f.clone(),
    }
}

fn random_normal_term(t: &Term, table: &SymbolTable, rng: &mut StdRng) -> Term {
    let mut t = t.clone();
    loop {
        let n = term_redexes(&t, table);
        if n == 0 {
            return t;
        }
        t = contract_term(&t, table, &mut rng.gen_range(0..n));
    }
}

fn random_normal_formula(f: &Formula, table: &SymbolTable, rng: &mut StdRng) -> Formula {
    let mut f = f.clone();
    loop {
        let n = formula_redexes(&f, table);
        if n == 0 {
            return f;
        }
        f = contract_formula(&f, table, &mut rng.gen_range(0..n));
    }
}

fn ground(t: &Term, gamma: u64) -> Term {
    TermSubst::single("n", Term::numeral(gamma)).term(t)
}

fn ground_formula(f: &Formula, gamma: u64) -> Formula {
    TermSubst::single("n", Term::numeral(gamma)).formula(f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn normalize_term_is_idempotent(t in iota_term()) {
        let table = table();
        let once = normalize_term(&t, &table);
        prop_assert_eq!(normalize_term(&once, &table), once);
    }

    #[test]
    fn normalize_formula_is_idempotent(f in formula()) {
        let table = table();
        let once = normalize_formula(&f, &table);
        prop_assert_eq!(normalize_formula(&once, &table), once);
    }

    #[test]
    fn random_rewrite_orders_agree_on_terms(t in iota_term(), gamma in 0u64..4, seed in any::<u64>()) {
        let table = table();
        let t = ground(&t, gamma);
        let mut rng = StdRng::seed_from_u64(seed);
        let a = random_normal_term(&t, &table, &mut rng);
        let b = random_normal_term(&t, &table, &mut rng);
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(normalize_term(&t, &table), a);
    }

    #[test]
    fn random_rewrite_orders_agree_on_formulas(f in formula(), gamma in 0u64..4, seed in any::<u64>()) {
        let table = table();
        let f = ground_formula(&f, gamma);
        let mut rng = StdRng::seed_from_u64(seed);
        let a = random_normal_formula(&f, &table, &mut rng);
        let b = random_normal_formula(&f, &table, &mut rng);
        prop_assert!(a.alpha_eq(&b), "{a} vs {b}");
        let n = normalize_formula(&f, &table);
        prop_assert!(n.alpha_eq(&a), "{n} vs {a}");
    }

    #[test]
    fn instantiation_commutes_with_normalization(t in iota_term(), gamma in 0u64..5) {
        let table = table();
        let left = instantiate_term(&normalize_term(&t, &table), gamma, &table).unwrap();
        let right = normalize_term(&ground(&t, gamma), &table);
        prop_assert_eq!(left, right);
    }
}

fn fo_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::constant("c")),
        Just(Term::constant("d")),
        Just(Term::iota("x")),
        Just(Term::iota("y")),
        Just(Term::iota("z")),
    ];
    leaf.prop_recursive(3, 10, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Term::app("f", vec![a])),
            (inner.clone(), inner).prop_map(|(a, b)| Term::app("h", vec![a, b])),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn unifiers_are_idempotent_and_unify(a in fo_term(), b in fo_term()) {
        if let Some(s) = unify_terms(std::slice::from_ref(&a), std::slice::from_ref(&b)) {
            prop_assert_eq!(s.term(&a), s.term(&b));
            for t in [&a, &b] {
                let once = s.term(t);
                prop_assert_eq!(s.term(&once), once);
            }
        }
    }

    #[test]
    fn a_term_unifies_with_itself_and_its_instances(a in fo_term(), t in fo_term()) {
        prop_assert!(unify_terms(std::slice::from_ref(&a), std::slice::from_ref(&a)).is_some());
        // Variables of the instance are renamed away so only one side binds.
        let fresh = TermSubst::new().with("x", Term::iota("x1")).with("y", Term::iota("y1")).with("z", Term::iota("z1"));
        let inst = TermSubst::single("x", fresh.term(&t)).term(&a);
        prop_assert!(unify_terms(&[a], &[inst]).is_some());
    }
}
