//! Syntactic first-order unification and matching on normalized atoms.
//!
//! First-order variables are `iota` variables and indexed second-order
//! variables `x(t)`; the latter are treated as atomic names keyed by their
//! index term.

use super::subst::fresh_name;
use super::{Formula, Sequent, Sort, Sym, SymbolTable, Term, TermSubst, Var};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VarKey {
    Plain(Sym),
    Indexed(Sym, Term),
}

impl VarKey {
    pub fn of(t: &Term) -> Option<VarKey> {
        match t {
            Term::Var(v) if v.sort == Sort::Iota => Some(VarKey::Plain(v.name.clone())),
            Term::Idx(x, i) => Some(VarKey::Indexed(x.clone(), (**i).clone())),
            _ => None,
        }
    }

    pub fn to_term(&self) -> Term {
        match self {
            VarKey::Plain(x) => Term::Var(Var { name: x.clone(), sort: Sort::Iota }),
            VarKey::Indexed(x, i) => Term::Idx(x.clone(), Box::new(i.clone())),
        }
    }
}

impl fmt::Display for VarKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnifyError {
    #[error("defined symbol `{0}` present; normalize first")]
    Defined(Sym),
}

/// First-order substitution keyed by variable.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FoSubst(pub BTreeMap<VarKey, Term>);

impl FoSubst {
    pub fn new() -> FoSubst {
        FoSubst::default()
    }

    pub fn get(&self, k: &VarKey) -> Option<&Term> {
        self.0.get(k)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn term(&self, t: &Term) -> Term {
        if self.0.is_empty() {
            return t.clone();
        }
        if let Some(k) = VarKey::of(t) {
            if let Some(r) = self.0.get(&k) {
                return r.clone();
            }
        }
        match t {
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.term(a)).collect()),
            _ => t.clone(),
        }
    }

    /// Capture-avoiding application to a formula.
    pub fn formula(&self, f: &Formula) -> Formula {
        if self.0.is_empty() {
            return f.clone();
        }
        match f {
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(|a| self.term(a)).collect()),
            Formula::Top | Formula::Bottom => f.clone(),
            Formula::Not(a) => Formula::not(self.formula(a)),
            Formula::And(a, b) => Formula::and(self.formula(a), self.formula(b)),
            Formula::Or(a, b) => Formula::or(self.formula(a), self.formula(b)),
            Formula::Imp(a, b) => Formula::imp(self.formula(a), self.formula(b)),
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                let mut inner = self.clone();
                inner.0.remove(&VarKey::Plain(v.name.clone()));
                let mut range = BTreeSet::new();
                for t in inner.0.values() {
                    range.extend(t.vars().into_iter().map(|v| v.name));
                }
                let (v, body) = if range.contains(&v.name) {
                    let mut used = range;
                    body.all_names(&mut used);
                    let nv = Var { name: fresh_name(&v.name, &used), sort: v.sort };
                    (nv.clone(), TermSubst::single(&v.name, Term::Var(nv)).formula(body))
                } else {
                    (v.clone(), (**body).clone())
                };
                let b = inner.formula(&body);
                if matches!(f, Formula::Forall(..)) {
                    Formula::forall(v, b)
                } else {
                    Formula::exists(v, b)
                }
            }
        }
    }

    pub fn sequent(&self, s: &Sequent) -> Sequent {
        s.map_formulas(&mut |f| self.formula(f))
    }

    /// `self` followed by `other`.
    pub fn compose(&self, other: &FoSubst) -> FoSubst {
        let mut out: BTreeMap<VarKey, Term> = self.0.iter().map(|(k, t)| (k.clone(), other.term(t))).collect();
        for (k, t) in &other.0 {
            out.entry(k.clone()).or_insert_with(|| t.clone());
        }
        out.retain(|k, t| k.to_term() != *t);
        FoSubst(out)
    }
}

impl fmt::Display for FoSubst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, t)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k} <- {t}")?;
        }
        write!(f, "}}")
    }
}

fn occurs(k: &VarKey, t: &Term) -> bool {
    if VarKey::of(t).as_ref() == Some(k) {
        return true;
    }
    match t {
        Term::App(_, args) => args.iter().any(|a| occurs(k, a)),
        _ => false,
    }
}

fn bind(s: &mut FoSubst, k: VarKey, t: Term) -> bool {
    if occurs(&k, &t) {
        return false;
    }
    let single = FoSubst(BTreeMap::from([(k.clone(), t.clone())]));
    for v in s.0.values_mut() {
        *v = single.term(v);
    }
    s.0.insert(k, t);
    true
}

fn unify_into(s: &mut FoSubst, a: &Term, b: &Term) -> bool {
    let a = s.term(a);
    let b = s.term(b);
    if a == b {
        return true;
    }
    match (VarKey::of(&a), VarKey::of(&b)) {
        (Some(k), _) => bind(s, k, b),
        (None, Some(k)) => bind(s, k, a),
        (None, None) => match (&a, &b) {
            (Term::App(f, xs), Term::App(g, ys)) if f == g && xs.len() == ys.len() => {
                xs.iter().zip(ys).all(|(x, y)| unify_into(s, x, y))
            }
            _ => false,
        },
    }
}

/// Most general unifier of term lists, without the defined-symbol check.
pub fn unify_terms(xs: &[Term], ys: &[Term]) -> Option<FoSubst> {
    if xs.len() != ys.len() {
        return None;
    }
    let mut s = FoSubst::new();
    xs.iter().zip(ys).all(|(x, y)| unify_into(&mut s, x, y)).then_some(s)
}

fn reject_defined(f: &Formula, table: &SymbolTable) -> Result<(), UnifyError> {
    match f.symbols().into_iter().find(|s| table.is_defined(s)) {
        Some(s) => Err(UnifyError::Defined(s)),
        None => Ok(()),
    }
}

/// Most general unifier of two atoms; `Ok(None)` when they do not unify.
pub fn unify_atoms(a: &Formula, b: &Formula, table: &SymbolTable) -> Result<Option<FoSubst>, UnifyError> {
    reject_defined(a, table)?;
    reject_defined(b, table)?;
    Ok(match (a, b) {
        (Formula::Atom(p, xs), Formula::Atom(q, ys)) if p == q => unify_terms(xs, ys),
        _ => None,
    })
}

fn match_into(s: &mut FoSubst, pat: &Term, target: &Term) -> bool {
    if let Some(k) = VarKey::of(pat) {
        return match s.0.get(&k) {
            Some(t) => t == target,
            None => {
                s.0.insert(k, target.clone());
                true
            }
        };
    }
    match (pat, target) {
        (Term::App(f, xs), Term::App(g, ys)) if f == g && xs.len() == ys.len() => {
            xs.iter().zip(ys).all(|(x, y)| match_into(s, x, y))
        }
        _ => pat == target,
    }
}

/// One-sided matching: extends `s` so that `pat·s = target`.
pub fn match_terms(s: &mut FoSubst, pat: &[Term], target: &[Term]) -> bool {
    pat.len() == target.len() && pat.iter().zip(target).all(|(p, t)| match_into(s, p, t))
}

pub fn match_atoms(s: &mut FoSubst, pat: &Formula, target: &Formula) -> bool {
    match (pat, target) {
        (Formula::Atom(p, xs), Formula::Atom(q, ys)) if p == q => match_terms(s, xs, ys),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::ArgSort;

    fn p(t: Term) -> Formula {
        Formula::atom("P", vec![t])
    }

    fn table() -> SymbolTable {
        let mut t = SymbolTable::new();
        t.declare_function("f", vec![ArgSort::Iota], Sort::Iota);
        t.declare_function("c", vec![], Sort::Iota);
        t.declare_predicate("P", vec![ArgSort::Iota]);
        t.declare_predicate("Q", vec![ArgSort::Iota]);
        t
    }

    #[test]
    fn unify_examples() {
        let t = table();
        let x = Term::iota("x");
        let fc = Term::app("f", vec![Term::constant("c")]);
        let s = unify_atoms(&p(x.clone()), &p(fc.clone()), &t).unwrap().unwrap();
        assert_eq!(s.term(&x), fc);
        let q = Formula::atom("Q", vec![x.clone()]);
        assert_eq!(unify_atoms(&p(x.clone()), &q, &t).unwrap(), None);
        let u = Term::iota("u");
        assert_eq!(unify_atoms(&p(u.clone()), &p(Term::app("f", vec![u])), &t).unwrap(), None);
    }

    #[test]
    fn indexed_variables_unify_like_variables() {
        let x0 = Term::idx("x", Term::numeral(0));
        let s = unify_terms(std::slice::from_ref(&x0), &[Term::constant("c")]).unwrap();
        assert_eq!(s.term(&x0), Term::constant("c"));
    }

    #[test]
    fn defined_symbols_are_rejected() {
        let mut t = table();
        t.declare_function("g", vec![ArgSort::Omega], Sort::Iota);
        t.add_rule("g", vec![Term::zero()], crate::term::RuleSide::Term(Term::constant("c"))).unwrap();
        let a = p(Term::app("g", vec![Term::n()]));
        assert!(matches!(unify_atoms(&a, &a, &t), Err(UnifyError::Defined(_))));
    }
}
