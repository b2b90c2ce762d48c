use super::{normalize_formula, normalize_term, sym, Formula, Sequent, Sort, Sym, SymbolTable, Term, Var};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("free arithmetic variable(s) {0} besides the parameter")]
    FreeParameters(String),
    #[error("ill-sorted replacement for `{var}`: expected {expected}")]
    IllSorted { var: Sym, expected: Sort },
    #[error("no value for variable `{0}`")]
    Uncovered(Sym),
    #[error("second-order variable `{0}` has no instantiation")]
    UnboundV2(Sym),
}

/// What a second-order variable is replaced by.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum V2Binding {
    /// Another second-order variable.
    Rename(Sym),
    /// `λbinder. body`, with `binder : omega`.
    Lambda(Sym, Term),
}

/// Simultaneous substitution for first-order variables (both sorts) and
/// second-order variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermSubst {
    pub vars: BTreeMap<Sym, Term>,
    pub v2: BTreeMap<Sym, V2Binding>,
}

/// Arithmetic substitution ϑ.
pub type ArithSubst = BTreeMap<Sym, Term>;

impl TermSubst {
    pub fn new() -> TermSubst {
        TermSubst::default()
    }

    pub fn single(name: &str, t: Term) -> TermSubst {
        let mut s = TermSubst::new();
        s.vars.insert(sym(name), t);
        s
    }

    pub fn with(mut self, name: &str, t: Term) -> TermSubst {
        self.vars.insert(sym(name), t);
        self
    }

    pub fn with_v2(mut self, name: &str, b: V2Binding) -> TermSubst {
        self.v2.insert(sym(name), b);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty() && self.v2.is_empty()
    }

    pub fn term(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.vars.get(&v.name).cloned().unwrap_or_else(|| t.clone()),
            Term::Idx(x, i) => {
                let i = self.term(i);
                match self.v2.get(x) {
                    Some(V2Binding::Rename(z)) => Term::Idx(z.clone(), Box::new(i)),
                    Some(V2Binding::Lambda(b, body)) => TermSubst::single(b, i).term(body),
                    None => Term::Idx(x.clone(), Box::new(i)),
                }
            }
            Term::V2(x) => match self.v2.get(x) {
                Some(V2Binding::Rename(z)) => Term::V2(z.clone()),
                _ => t.clone(),
            },
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.term(a)).collect()),
        }
    }

    fn range_names(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        for t in self.vars.values() {
            out.extend(t.vars().into_iter().map(|v| v.name));
        }
        for b in self.v2.values() {
            if let V2Binding::Lambda(binder, body) = b {
                out.extend(body.vars().into_iter().map(|v| v.name).filter(|n| n != binder));
            }
        }
        out
    }

    /// Capture-avoiding application to a formula.
    pub fn formula(&self, f: &Formula) -> Formula {
        if self.is_empty() {
            return f.clone();
        }
        let captured = self.range_names();
        self.formula_inner(f, &captured)
    }

    fn formula_inner(&self, f: &Formula, captured: &BTreeSet<Sym>) -> Formula {
        match f {
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(|a| self.term(a)).collect()),
            Formula::Top => Formula::Top,
            Formula::Bottom => Formula::Bottom,
            Formula::Not(a) => Formula::not(self.formula_inner(a, captured)),
            Formula::And(a, b) => Formula::and(self.formula_inner(a, captured), self.formula_inner(b, captured)),
            Formula::Or(a, b) => Formula::or(self.formula_inner(a, captured), self.formula_inner(b, captured)),
            Formula::Imp(a, b) => Formula::imp(self.formula_inner(a, captured), self.formula_inner(b, captured)),
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                let mut inner = self.clone();
                inner.vars.remove(&v.name);
                let (v2, body2) = if captured.contains(&v.name) && !inner.is_empty() {
                    let mut avoid = captured.clone();
                    body.all_names(&mut avoid);
                    let fresh = fresh_name(&v.name, &avoid);
                    let nv = Var { name: fresh, sort: v.sort };
                    let renamed = TermSubst::single(&v.name, Term::Var(nv.clone())).formula(body);
                    (nv, renamed)
                } else {
                    (v.clone(), (**body).clone())
                };
                let new_body = if inner.is_empty() {
                    body2
                } else {
                    let captured = inner.range_names();
                    inner.formula_inner(&body2, &captured)
                };
                if matches!(f, Formula::Forall(..)) {
                    Formula::forall(v2, new_body)
                } else {
                    Formula::exists(v2, new_body)
                }
            }
        }
    }

    pub fn sequent(&self, s: &Sequent) -> Sequent {
        s.map_formulas(&mut |f| self.formula(f))
    }
}

/// `base` primed until it avoids `used`.
pub(crate) fn fresh_name(base: &str, used: &BTreeSet<Sym>) -> Sym {
    let mut name = format!("{base}'");
    while used.contains(name.as_str()) {
        name.push('\'');
    }
    sym(&name)
}

fn omega_vars_of_formula(f: &Formula) -> BTreeSet<Sym> {
    f.free_vars().into_iter().filter(|v| v.sort == Sort::Omega).map(|v| v.name).collect()
}

fn check_only_n(found: BTreeSet<Sym>) -> Result<(), SubstError> {
    let others: Vec<&str> = found.iter().map(|s| &**s).filter(|s| *s != super::PARAM_N).collect();
    if others.is_empty() {
        Ok(())
    } else {
        Err(SubstError::FreeParameters(others.join(", ")))
    }
}

/// Replaces the parameter `n` by the numeral for `gamma` and normalizes.
pub fn instantiate_parameter(f: &Formula, gamma: u64, table: &SymbolTable) -> Result<Formula, SubstError> {
    check_only_n(omega_vars_of_formula(f))?;
    let s = TermSubst::single(super::PARAM_N, Term::numeral(gamma));
    Ok(normalize_formula(&s.formula(f), table))
}

pub fn instantiate_term(t: &Term, gamma: u64, table: &SymbolTable) -> Result<Term, SubstError> {
    check_only_n(t.vars().into_iter().filter(|v| v.sort == Sort::Omega).map(|v| v.name).collect())?;
    let s = TermSubst::single(super::PARAM_N, Term::numeral(gamma));
    Ok(normalize_term(&s.term(t), table))
}

pub fn instantiate_sequent(s: &Sequent, gamma: u64, table: &SymbolTable) -> Result<Sequent, SubstError> {
    let mut found = BTreeSet::new();
    for f in s.ant.iter().chain(&s.suc) {
        found.extend(omega_vars_of_formula(f));
    }
    check_only_n(found)?;
    let sub = TermSubst::single(super::PARAM_N, Term::numeral(gamma));
    Ok(super::normalize_sequent(&sub.sequent(s), table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{ArgSort, RuleSide};

    fn fhat_table() -> SymbolTable {
        let mut t = SymbolTable::new();
        t.declare_function("f", vec![ArgSort::Iota], Sort::Iota);
        t.declare_function("c", vec![], Sort::Iota);
        t.declare_function("fh", vec![ArgSort::Omega, ArgSort::Iota], Sort::Iota);
        t.declare_predicate("P", vec![ArgSort::Iota]);
        t.declare_v2("x");
        let x = Term::iota("x");
        let y = Term::omega("y");
        t.add_rule("fh", vec![Term::zero(), x.clone()], RuleSide::Term(x.clone())).unwrap();
        t.add_rule(
            "fh",
            vec![Term::succ(y.clone()), x.clone()],
            RuleSide::Term(Term::app("f", vec![Term::app("fh", vec![y, x])])),
        )
        .unwrap();
        t
    }

    #[test]
    fn parameter_instantiation_normalizes() {
        let t = fhat_table();
        let f = Formula::atom("P", vec![Term::app("fh", vec![Term::n(), Term::constant("c")])]);
        let r = instantiate_parameter(&f, 0, &t).unwrap();
        assert_eq!(r, Formula::atom("P", vec![Term::constant("c")]));
        let r = instantiate_term(&Term::idx("x", Term::n()), 2, &t).unwrap();
        assert_eq!(r, Term::idx("x", Term::numeral(2)));
    }

    #[test]
    fn other_parameters_are_rejected() {
        let t = fhat_table();
        let f = Formula::atom("P", vec![Term::idx("x", Term::k())]);
        assert_eq!(instantiate_parameter(&f, 1, &t), Err(SubstError::FreeParameters("k".into())));
    }

    #[test]
    fn substitution_avoids_capture() {
        let f = Formula::forall(Var::iota("y"), Formula::atom("R", vec![Term::iota("x"), Term::iota("y")]));
        let g = TermSubst::single("x", Term::iota("y")).formula(&f);
        match &g {
            Formula::Forall(v, body) => {
                assert_ne!(&*v.name, "y");
                assert_eq!(**body, Formula::atom("R", vec![Term::iota("y"), Term::Var(v.clone())]));
            }
            _ => panic!("{g}"),
        }
    }

    #[test]
    fn lambda_binding_replaces_indexed_variable() {
        let s = TermSubst::new().with_v2("x", V2Binding::Lambda(sym("k"), Term::app("g", vec![Term::k()])));
        assert_eq!(s.term(&Term::idx("x", Term::numeral(1))), Term::app("g", vec![Term::numeral(1)]));
    }
}
