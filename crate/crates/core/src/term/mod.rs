//! The two-sorted schematic language.
//!
//! Terms live in one of two sorts: `omega` (natural numbers built from `0`
//! and `s`) and `iota` (individuals). Second-order variables of type
//! `omega -> iota` appear applied to an index, `x(k+1)`, or bare as an
//! argument of a defined symbol.

mod rewrite;
mod subst;
mod table;
mod unify;

pub use rewrite::{normalize_formula, normalize_sequent, normalize_term, rename_apart};
pub use subst::{
    instantiate_parameter, instantiate_sequent, instantiate_term, ArithSubst, SubstError, TermSubst, V2Binding,
};
pub use table::{ArgSort, Definition, RuleSide, SymbolDecl, SymbolKind, SymbolTable, TableError, ValidationReport};
pub use unify::{match_atoms, match_terms, unify_atoms, unify_terms, FoSubst, UnifyError, VarKey};

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Interned-ish symbol name. Cheap to clone.
pub type Sym = Arc<str>;

pub fn sym(s: &str) -> Sym {
    Arc::from(s)
}

/// The global parameter.
pub const PARAM_N: &str = "n";
/// The step-local parameter.
pub const PARAM_K: &str = "k";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sort {
    Omega,
    Iota,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Omega => write!(f, "omega"),
            Sort::Iota => write!(f, "iota"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Var {
    pub name: Sym,
    pub sort: Sort,
}

impl Var {
    pub fn new(name: &str, sort: Sort) -> Self {
        Var { name: sym(name), sort }
    }
    pub fn iota(name: &str) -> Self {
        Var::new(name, Sort::Iota)
    }
    pub fn omega(name: &str) -> Self {
        Var::new(name, Sort::Omega)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Var(Var),
    /// `x(t)` for a second-order variable `x : omega -> iota`.
    Idx(Sym, Box<Term>),
    /// A second-order variable passed as an argument to a defined symbol.
    V2(Sym),
    App(Sym, Vec<Term>),
}

impl Term {
    pub fn var(name: &str, sort: Sort) -> Term {
        Term::Var(Var::new(name, sort))
    }
    pub fn iota(name: &str) -> Term {
        Term::var(name, Sort::Iota)
    }
    pub fn omega(name: &str) -> Term {
        Term::var(name, Sort::Omega)
    }
    pub fn n() -> Term {
        Term::omega(PARAM_N)
    }
    pub fn k() -> Term {
        Term::omega(PARAM_K)
    }
    pub fn constant(name: &str) -> Term {
        Term::App(sym(name), Vec::new())
    }
    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(sym(name), args)
    }
    pub fn idx(name: &str, index: Term) -> Term {
        Term::Idx(sym(name), Box::new(index))
    }
    pub fn zero() -> Term {
        Term::constant("0")
    }
    pub fn succ(t: Term) -> Term {
        Term::App(sym("s"), vec![t])
    }
    pub fn numeral(m: u64) -> Term {
        Term::plus(Term::zero(), m)
    }
    /// `t + m` as an s-tower over `t`.
    pub fn plus(t: Term, m: u64) -> Term {
        (0..m).fold(t, |acc, _| Term::succ(acc))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Term::App(f, a) if &**f == "0" && a.is_empty())
    }

    /// Argument of `s(_)`, if this is a successor.
    pub fn pred(&self) -> Option<&Term> {
        match self {
            Term::App(f, a) if &**f == "s" && a.len() == 1 => Some(&a[0]),
            _ => None,
        }
    }

    /// Splits `s^m(base)` into `(base, m)`.
    pub fn split_succ(&self) -> (&Term, u64) {
        let mut t = self;
        let mut m = 0;
        while let Some(p) = t.pred() {
            t = p;
            m += 1;
        }
        (t, m)
    }

    pub fn as_numeral(&self) -> Option<u64> {
        let (base, m) = self.split_succ();
        base.is_zero().then_some(m)
    }

    pub fn is_arith_ground(&self) -> bool {
        let mut vs = BTreeSet::new();
        self.collect_vars(&mut vs);
        vs.iter().all(|v| v.sort != Sort::Omega)
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Idx(_, t) => t.collect_vars(out),
            Term::V2(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_v2(&self, out: &mut BTreeSet<Sym>) {
        match self {
            Term::Var(_) => {}
            Term::Idx(x, t) => {
                out.insert(x.clone());
                t.collect_v2(out);
            }
            Term::V2(x) => {
                out.insert(x.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_v2(out)),
        }
    }

    pub fn collect_symbols(&self, out: &mut BTreeSet<Sym>) {
        match self {
            Term::Var(_) | Term::V2(_) => {}
            Term::Idx(_, t) => t.collect_symbols(out),
            Term::App(f, args) => {
                out.insert(f.clone());
                args.iter().for_each(|a| a.collect_symbols(out));
            }
        }
    }

    pub fn contains(&self, needle: &Term) -> bool {
        if self == needle {
            return true;
        }
        match self {
            Term::Var(_) | Term::V2(_) => false,
            Term::Idx(_, t) => t.contains(needle),
            Term::App(_, args) => args.iter().any(|a| a.contains(needle)),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::V2(_) => 1,
            Term::Idx(_, t) => 1 + t.size(),
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Replaces every subterm equal to `from` by `to`.
    pub fn replace(&self, from: &Term, to: &Term) -> Term {
        if self == from {
            return to.clone();
        }
        match self {
            Term::Var(_) | Term::V2(_) => self.clone(),
            Term::Idx(x, t) => Term::Idx(x.clone(), Box::new(t.replace(from, to))),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.replace(from, to)).collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Formula {
    Atom(Sym, Vec<Term>),
    Top,
    Bottom,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Forall(Var, Box<Formula>),
    Exists(Var, Box<Formula>),
}

impl Formula {
    pub fn atom(p: &str, args: Vec<Term>) -> Formula {
        Formula::Atom(sym(p), args)
    }
    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }
    pub fn forall(v: Var, a: Formula) -> Formula {
        Formula::Forall(v, Box::new(a))
    }
    pub fn exists(v: Var, a: Formula) -> Formula {
        Formula::Exists(v, Box::new(a))
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Atom(..))
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Formula::Top | Formula::Bottom => 1,
            Formula::Not(a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => 1 + a.size() + b.size(),
            Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.size(),
        }
    }

    /// Free first-sort variables (bound ones excluded).
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Atom(_, args) => {
                for a in args {
                    for v in a.vars() {
                        if !bound.contains(&v) {
                            out.insert(v);
                        }
                    }
                }
            }
            Formula::Top | Formula::Bottom => {}
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                bound.push(v.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// All variable names occurring anywhere, bound or free, plus V2 names.
    pub fn all_names(&self, out: &mut BTreeSet<Sym>) {
        self.visit_terms(&mut |t| {
            let mut vs = BTreeSet::new();
            t.collect_vars(&mut vs);
            out.extend(vs.into_iter().map(|v| v.name));
            t.collect_v2(out);
        });
        self.visit_binders(&mut |v| {
            out.insert(v.name.clone());
        });
    }

    pub fn v2_names(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| t.collect_v2(&mut out));
        out
    }

    pub fn symbols(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| t.collect_symbols(&mut out));
        self.visit_atoms(&mut |p, _| {
            out.insert(p.clone());
        });
        out
    }

    /// Visits every top-level argument term of every atom.
    pub fn visit_terms(&self, f: &mut dyn FnMut(&Term)) {
        match self {
            Formula::Atom(_, args) => args.iter().for_each(&mut *f),
            Formula::Top | Formula::Bottom => {}
            Formula::Not(a) => a.visit_terms(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.visit_terms(f);
                b.visit_terms(f);
            }
            Formula::Forall(_, a) | Formula::Exists(_, a) => a.visit_terms(f),
        }
    }

    pub fn visit_atoms(&self, f: &mut dyn FnMut(&Sym, &[Term])) {
        match self {
            Formula::Atom(p, args) => f(p, args),
            Formula::Top | Formula::Bottom => {}
            Formula::Not(a) => a.visit_atoms(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
            Formula::Forall(_, a) | Formula::Exists(_, a) => a.visit_atoms(f),
        }
    }

    fn visit_binders(&self, f: &mut dyn FnMut(&Var)) {
        match self {
            Formula::Atom(..) | Formula::Top | Formula::Bottom => {}
            Formula::Not(a) => a.visit_binders(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.visit_binders(f);
                b.visit_binders(f);
            }
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                f(v);
                a.visit_binders(f);
            }
        }
    }

    /// Applies `f` to every atom argument. Not capture-aware; callers use it
    /// for renamings that cannot clash with binders.
    pub fn map_terms(&self, f: &mut dyn FnMut(&Term) -> Term) -> Formula {
        match self {
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(&mut *f).collect()),
            Formula::Top => Formula::Top,
            Formula::Bottom => Formula::Bottom,
            Formula::Not(a) => Formula::not(a.map_terms(f)),
            Formula::And(a, b) => Formula::and(a.map_terms(f), b.map_terms(f)),
            Formula::Or(a, b) => Formula::or(a.map_terms(f), b.map_terms(f)),
            Formula::Imp(a, b) => Formula::imp(a.map_terms(f), b.map_terms(f)),
            Formula::Forall(v, a) => Formula::forall(v.clone(), a.map_terms(f)),
            Formula::Exists(v, a) => Formula::exists(v.clone(), a.map_terms(f)),
        }
    }

    pub fn contains_term(&self, needle: &Term) -> bool {
        let mut found = false;
        self.visit_terms(&mut |t| found |= t.contains(needle));
        found
    }

    /// Bound variables replaced by positional names, for alpha-equivalence.
    pub fn canonical(&self) -> Formula {
        fn go(f: &Formula, scope: &mut Vec<(Var, Var)>) -> Formula {
            match f {
                Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(|a| rename(a, scope)).collect()),
                Formula::Top => Formula::Top,
                Formula::Bottom => Formula::Bottom,
                Formula::Not(a) => Formula::not(go(a, scope)),
                Formula::And(a, b) => Formula::and(go(a, scope), go(b, scope)),
                Formula::Or(a, b) => Formula::or(go(a, scope), go(b, scope)),
                Formula::Imp(a, b) => Formula::imp(go(a, scope), go(b, scope)),
                Formula::Forall(v, a) | Formula::Exists(v, a) => {
                    let fresh = Var { name: sym(&format!("#{}", scope.len())), sort: v.sort };
                    scope.push((v.clone(), fresh.clone()));
                    let body = go(a, scope);
                    scope.pop();
                    if matches!(f, Formula::Forall(..)) {
                        Formula::forall(fresh, body)
                    } else {
                        Formula::exists(fresh, body)
                    }
                }
            }
        }
        fn rename(t: &Term, scope: &[(Var, Var)]) -> Term {
            match t {
                Term::Var(v) => match scope.iter().rev().find(|(b, _)| b == v) {
                    Some((_, r)) => Term::Var(r.clone()),
                    None => t.clone(),
                },
                Term::Idx(x, i) => Term::Idx(x.clone(), Box::new(rename(i, scope))),
                Term::V2(_) => t.clone(),
                Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| rename(a, scope)).collect()),
            }
        }
        go(self, &mut Vec::new())
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self == other || self.canonical() == other.canonical()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Ant,
    Suc,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Ant => "a",
            Side::Suc => "s",
        })
    }
}

/// A formula position in a sequent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Occ {
    pub side: Side,
    pub index: usize,
}

impl Occ {
    pub fn ant(index: usize) -> Occ {
        Occ { side: Side::Ant, index }
    }
    pub fn suc(index: usize) -> Occ {
        Occ { side: Side::Suc, index }
    }
}

impl fmt::Display for Occ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.side, self.index)
    }
}

/// `Γ ⊢ Δ` with multiset semantics; vector order is presentation only.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Sequent {
    pub ant: Vec<Formula>,
    pub suc: Vec<Formula>,
}

impl Sequent {
    pub fn new(ant: Vec<Formula>, suc: Vec<Formula>) -> Sequent {
        Sequent { ant, suc }
    }
    pub fn empty() -> Sequent {
        Sequent::default()
    }
    pub fn is_empty(&self) -> bool {
        self.ant.is_empty() && self.suc.is_empty()
    }
    pub fn len(&self) -> usize {
        self.ant.len() + self.suc.len()
    }
    pub fn side(&self, side: Side) -> &Vec<Formula> {
        match side {
            Side::Ant => &self.ant,
            Side::Suc => &self.suc,
        }
    }
    pub fn side_mut(&mut self, side: Side) -> &mut Vec<Formula> {
        match side {
            Side::Ant => &mut self.ant,
            Side::Suc => &mut self.suc,
        }
    }
    pub fn get(&self, occ: Occ) -> Option<&Formula> {
        self.side(occ.side).get(occ.index)
    }
    pub fn occs(&self) -> impl Iterator<Item = (Occ, &Formula)> {
        self.ant
            .iter()
            .enumerate()
            .map(|(i, f)| (Occ::ant(i), f))
            .chain(self.suc.iter().enumerate().map(|(i, f)| (Occ::suc(i), f)))
    }

    /// `(Γ ⊢ Δ) ∘ (Π ⊢ Λ) = Γ,Π ⊢ Δ,Λ`.
    pub fn merge(&self, other: &Sequent) -> Sequent {
        let mut out = self.clone();
        out.ant.extend(other.ant.iter().cloned());
        out.suc.extend(other.suc.iter().cloned());
        out
    }

    pub fn map_formulas(&self, f: &mut dyn FnMut(&Formula) -> Formula) -> Sequent {
        Sequent { ant: self.ant.iter().map(&mut *f).collect(), suc: self.suc.iter().map(&mut *f).collect() }
    }

    /// Multiset key: canonical formulas, sorted per side.
    pub fn multiset_key(&self) -> Sequent {
        let mut ant: Vec<Formula> = self.ant.iter().map(Formula::canonical).collect();
        let mut suc: Vec<Formula> = self.suc.iter().map(Formula::canonical).collect();
        ant.sort();
        suc.sort();
        Sequent { ant, suc }
    }

    /// Multiset equality modulo bound-variable renaming.
    pub fn multiset_eq(&self, other: &Sequent) -> bool {
        self.ant.len() == other.ant.len()
            && self.suc.len() == other.suc.len()
            && self.multiset_key() == other.multiset_key()
    }

    /// Sub-multiset test modulo bound-variable renaming.
    pub fn sub_multiset_of(&self, other: &Sequent) -> bool {
        fn sub(a: &[Formula], b: &[Formula]) -> bool {
            let mut used = vec![false; b.len()];
            a.iter().all(|f| {
                let c = f.canonical();
                match (0..b.len()).find(|&j| !used[j] && b[j].canonical() == c) {
                    Some(j) => {
                        used[j] = true;
                        true
                    }
                    None => false,
                }
            })
        }
        sub(&self.ant, &other.ant) && sub(&self.suc, &other.suc)
    }

    pub fn is_atomic(&self) -> bool {
        self.ant.iter().chain(&self.suc).all(Formula::is_atom)
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for f in self.ant.iter().chain(&self.suc) {
            out.extend(f.free_vars());
        }
        out
    }

    pub fn contains_term(&self, needle: &Term) -> bool {
        self.ant.iter().chain(&self.suc).any(|f| f.contains_term(needle))
    }

    pub fn size(&self) -> usize {
        self.ant.iter().chain(&self.suc).map(Formula::size).sum()
    }
}

/// Merge of two sequents.
pub fn merge_sequents(a: &Sequent, b: &Sequent) -> Sequent {
    a.merge(b)
}

// ---------------------------------------------------------------------------
// Surface printing. The output is accepted by the DSL parser.

fn write_term(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let (base, m) = t.split_succ();
    if m > 0 {
        if base.is_zero() {
            return write!(f, "{m}");
        }
        if matches!(base, Term::Var(_)) {
            write_term(base, f)?;
            return write!(f, "+{m}");
        }
    }
    match t {
        Term::Var(v) => write!(f, "{}", v.name),
        Term::V2(x) => write!(f, "{x}"),
        Term::Idx(x, i) => {
            write!(f, "{x}(")?;
            write_term(i, f)?;
            write!(f, ")")
        }
        Term::App(name, args) => {
            if t.is_zero() {
                return write!(f, "0");
            }
            write!(f, "{name}")?;
            if !args.is_empty() {
                write!(f, "(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write_term(a, f)?;
                }
                write!(f, ")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self, f)
    }
}

fn write_formula(a: &Formula, f: &mut fmt::Formatter<'_>, top: bool) -> fmt::Result {
    let open = |f: &mut fmt::Formatter<'_>| if top { Ok(()) } else { write!(f, "(") };
    let close = |f: &mut fmt::Formatter<'_>| if top { Ok(()) } else { write!(f, ")") };
    match a {
        Formula::Atom(p, args) => {
            write!(f, "{p}")?;
            if !args.is_empty() {
                write!(f, "(")?;
                for (i, t) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write_term(t, f)?;
                }
                write!(f, ")")?;
            }
            Ok(())
        }
        Formula::Top => write!(f, "true"),
        Formula::Bottom => write!(f, "false"),
        Formula::Not(b) => {
            write!(f, "~")?;
            write_formula(b, f, false)
        }
        Formula::And(x, y) | Formula::Or(x, y) | Formula::Imp(x, y) => {
            let op = match a {
                Formula::And(..) => "/\\",
                Formula::Or(..) => "\\/",
                _ => "->",
            };
            open(f)?;
            write_formula(x, f, false)?;
            write!(f, " {op} ")?;
            write_formula(y, f, false)?;
            close(f)
        }
        Formula::Forall(v, b) | Formula::Exists(v, b) => {
            let q = if matches!(a, Formula::Forall(..)) { "all" } else { "ex" };
            open(f)?;
            match v.sort {
                Sort::Iota => write!(f, "{q} {}. ", v.name)?,
                Sort::Omega => write!(f, "{q} {}:omega. ", v.name)?,
            }
            write_formula(b, f, true)?;
            close(f)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, f, true)
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.ant.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write_formula(a, f, false)?;
        }
        if self.ant.is_empty() {
            write!(f, "|-")?;
        } else {
            write!(f, " |-")?;
        }
        for (i, a) in self.suc.iter().enumerate() {
            write!(f, "{}", if i == 0 { " " } else { ", " })?;
            write_formula(a, f, false)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numerals_print_in_decimal() {
        assert_eq!(Term::numeral(3).to_string(), "3");
        assert_eq!(Term::plus(Term::k(), 1).to_string(), "k+1");
        assert_eq!(Term::numeral(2).as_numeral(), Some(2));
    }

    #[test]
    fn merge_is_componentwise_union() {
        let p = |s: &str| Formula::atom(s, vec![]);
        let s = Sequent::new(vec![p("A")], vec![p("B")]);
        let t = Sequent::new(vec![p("C")], vec![p("D")]);
        assert_eq!(s.merge(&t), Sequent::new(vec![p("A"), p("C")], vec![p("B"), p("D")]));
        assert_eq!(Sequent::empty().merge(&s), s);
    }

    #[test]
    fn alpha_equivalence_ignores_binder_names() {
        let a = Formula::forall(Var::iota("x"), Formula::atom("P", vec![Term::iota("x")]));
        let b = Formula::forall(Var::iota("y"), Formula::atom("P", vec![Term::iota("y")]));
        assert!(a.alpha_eq(&b));
        assert_eq!(a.to_string(), "all x. P(x)");
    }

    #[test]
    fn empty_sequent_prints_as_turnstile() {
        assert_eq!(Sequent::empty().to_string(), "|-");
    }
}
