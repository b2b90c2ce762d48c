use super::subst::fresh_name;
use super::{Formula, RuleSide, Sequent, Sym, SymbolTable, Term, TermSubst, V2Binding, Var};
use std::collections::BTreeSet;

/// Matches the left-hand side of a rule against normalized arguments whose
/// first entry is `0` or `s(_)`.
fn bind(lhs: &[Term], args: &[Term]) -> Option<TermSubst> {
    if lhs.len() != args.len() {
        return None;
    }
    let mut s = TermSubst::new();
    match (lhs[0].pred(), args[0].pred()) {
        (Some(Term::Var(y)), Some(a)) => {
            s.vars.insert(y.name.clone(), a.clone());
        }
        (None, None) if lhs[0].is_zero() && args[0].is_zero() => {}
        _ => return None,
    }
    for (l, a) in lhs.iter().zip(args).skip(1) {
        match (l, a) {
            (Term::Var(v), _) => {
                s.vars.insert(v.name.clone(), a.clone());
            }
            (Term::V2(x), Term::V2(z)) => {
                s.v2.insert(x.clone(), V2Binding::Rename(z.clone()));
            }
            _ => return None,
        }
    }
    Some(s)
}

fn unfold<'a>(name: &str, args: &[Term], table: &'a SymbolTable) -> Option<(TermSubst, &'a RuleSide)> {
    let first = args.first()?;
    if !first.is_zero() && first.pred().is_none() {
        return None;
    }
    let (base, step) = table.rules_of(name)?;
    let rule = if first.is_zero() { base } else { step };
    bind(&rule.lhs, args).map(|s| (s, &rule.rhs))
}

/// Innermost normalization under the defined-symbol rules.
pub fn normalize_term(t: &Term, table: &SymbolTable) -> Term {
    match t {
        Term::Var(_) | Term::V2(_) => t.clone(),
        Term::Idx(x, i) => Term::Idx(x.clone(), Box::new(normalize_term(i, table))),
        Term::App(f, args) => {
            let args: Vec<Term> = args.iter().map(|a| normalize_term(a, table)).collect();
            if table.is_defined(f) {
                if let Some((s, RuleSide::Term(rhs))) = unfold(f, &args, table) {
                    return normalize_term(&s.term(rhs), table);
                }
            }
            Term::App(f.clone(), args)
        }
    }
}

fn normalize_raw(f: &Formula, table: &SymbolTable) -> Formula {
    match f {
        Formula::Atom(p, args) => {
            let args: Vec<Term> = args.iter().map(|a| normalize_term(a, table)).collect();
            if table.is_defined(p) {
                if let Some((s, RuleSide::Formula(rhs))) = unfold(p, &args, table) {
                    return normalize_raw(&s.formula(rhs), table);
                }
            }
            Formula::Atom(p.clone(), args)
        }
        Formula::Top => Formula::Top,
        Formula::Bottom => Formula::Bottom,
        Formula::Not(a) => Formula::not(normalize_raw(a, table)),
        Formula::And(a, b) => Formula::and(normalize_raw(a, table), normalize_raw(b, table)),
        Formula::Or(a, b) => Formula::or(normalize_raw(a, table), normalize_raw(b, table)),
        Formula::Imp(a, b) => Formula::imp(normalize_raw(a, table), normalize_raw(b, table)),
        Formula::Forall(v, a) => Formula::forall(v.clone(), normalize_raw(a, table)),
        Formula::Exists(v, a) => Formula::exists(v.clone(), normalize_raw(a, table)),
    }
}

/// Normal form of a formula; binders shadowing an enclosing binder of the
/// same name are renamed apart.
pub fn normalize_formula(f: &Formula, table: &SymbolTable) -> Formula {
    rename_apart(&normalize_raw(f, table))
}

pub fn normalize_sequent(s: &Sequent, table: &SymbolTable) -> Sequent {
    s.map_formulas(&mut |f| normalize_formula(f, table))
}

/// Renames every binder that shadows an enclosing binder.
pub fn rename_apart(f: &Formula) -> Formula {
    fn go(f: &Formula, scope: &mut Vec<Sym>, used: &mut BTreeSet<Sym>) -> Formula {
        match f {
            Formula::Atom(..) | Formula::Top | Formula::Bottom => f.clone(),
            Formula::Not(a) => Formula::not(go(a, scope, used)),
            Formula::And(a, b) => Formula::and(go(a, scope, used), go(b, scope, used)),
            Formula::Or(a, b) => Formula::or(go(a, scope, used), go(b, scope, used)),
            Formula::Imp(a, b) => Formula::imp(go(a, scope, used), go(b, scope, used)),
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                let (v, body) = if scope.contains(&v.name) {
                    let fresh = fresh_name(&v.name, used);
                    used.insert(fresh.clone());
                    let nv = Var { name: fresh, sort: v.sort };
                    let b = TermSubst::single(&v.name, Term::Var(nv.clone())).formula(body);
                    (nv, b)
                } else {
                    (v.clone(), (**body).clone())
                };
                scope.push(v.name.clone());
                let inner = go(&body, scope, used);
                scope.pop();
                if matches!(f, Formula::Forall(..)) {
                    Formula::forall(v, inner)
                } else {
                    Formula::exists(v, inner)
                }
            }
        }
    }
    let mut used = BTreeSet::new();
    f.all_names(&mut used);
    go(f, &mut Vec::new(), &mut used)
}
