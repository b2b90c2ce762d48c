//! Clauses, clause schemata, and the parameterized symbol definitions
//! shared by clause-set, projection and resolution schemata.

use crate::charset::ClauseSetTerm;
use crate::term::{
    match_atoms, normalize_formula, normalize_sequent, normalize_term, sym, ArithSubst, FoSubst, Formula, Sequent,
    Side, Sym, SymbolTable, Term, TermSubst, V2Binding, Var, VarKey, PARAM_K,
};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// A sequent of atoms.
pub type Clause = Sequent;

/// `Γ ⊢ Δ` with an atom on both sides.
pub fn is_tautology(c: &Clause) -> bool {
    c.ant.iter().any(|a| c.suc.contains(a))
}

/// First-order variables of a clause.
pub fn clause_vars(c: &Clause) -> BTreeSet<VarKey> {
    fn go(t: &Term, out: &mut BTreeSet<VarKey>) {
        if let Some(k) = VarKey::of(t) {
            out.insert(k);
            return;
        }
        if let Term::App(_, args) = t {
            args.iter().for_each(|a| go(a, out));
        }
    }
    let mut out = BTreeSet::new();
    for f in c.ant.iter().chain(&c.suc) {
        f.visit_terms(&mut |t| go(t, &mut out));
    }
    out
}

fn subsumes_from(lits: &[(Side, &Formula)], d: &Clause, used: &mut [Vec<bool>; 2], s: &FoSubst) -> Option<FoSubst> {
    let Some(((side, lit), rest)) = lits.split_first() else {
        return Some(s.clone());
    };
    let si = usize::from(*side == Side::Suc);
    let target = d.side(*side);
    for j in 0..target.len() {
        if used[si][j] {
            continue;
        }
        let mut s2 = s.clone();
        if match_atoms(&mut s2, lit, &target[j]) {
            used[si][j] = true;
            if let Some(r) = subsumes_from(rest, d, used, &s2) {
                return Some(r);
            }
            used[si][j] = false;
        }
    }
    None
}

/// A substitution σ with `Cσ ⊆ D` as multisets.
pub fn subsumer(c: &Clause, d: &Clause) -> Option<FoSubst> {
    if c.ant.len() > d.ant.len() || c.suc.len() > d.suc.len() {
        return None;
    }
    let lits: Vec<(Side, &Formula)> =
        c.ant.iter().map(|f| (Side::Ant, f)).chain(c.suc.iter().map(|f| (Side::Suc, f))).collect();
    let mut used = [vec![false; d.ant.len()], vec![false; d.suc.len()]];
    subsumes_from(&lits, d, &mut used, &FoSubst::new())
}

pub fn subsumes(c: &Clause, d: &Clause) -> bool {
    subsumer(c, d).is_some()
}

/// Equal up to an injective renaming of variables.
pub fn is_variant(c: &Clause, d: &Clause) -> bool {
    c.ant.len() == d.ant.len() && c.suc.len() == d.suc.len() && subsumes(c, d) && subsumes(d, c)
}

/// Literals sorted and variables renamed by first occurrence; a
/// deterministic representative of the variant class for tie-breaking.
pub fn canonical_clause(c: &Clause) -> Clause {
    let abstract_key = |f: &Formula| {
        let mut g = f.clone();
        g = g.map_terms(&mut |t| blank(t));
        g.to_string()
    };
    fn blank(t: &Term) -> Term {
        if VarKey::of(t).is_some() {
            return Term::iota("_");
        }
        match t {
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(blank).collect()),
            _ => t.clone(),
        }
    }
    let mut ant = c.ant.clone();
    let mut suc = c.suc.clone();
    ant.sort_by_key(|f| (abstract_key(f), f.to_string()));
    suc.sort_by_key(|f| (abstract_key(f), f.to_string()));
    let mut names: BTreeMap<VarKey, Term> = BTreeMap::new();
    let mut order = Vec::new();
    fn collect(t: &Term, order: &mut Vec<VarKey>) {
        if let Some(k) = VarKey::of(t) {
            if !order.contains(&k) {
                order.push(k);
            }
            return;
        }
        if let Term::App(_, args) = t {
            args.iter().for_each(|a| collect(a, order));
        }
    }
    for f in ant.iter().chain(&suc) {
        f.visit_terms(&mut |t| collect(t, &mut order));
    }
    for (i, k) in order.into_iter().enumerate() {
        names.insert(k, Term::iota(&format!("v{i}")));
    }
    let s = FoSubst(names);
    s.sequent(&Sequent::new(ant, suc))
}

/// Set equality of clause sets modulo variable renaming.
pub fn clause_sets_equal(a: &[Clause], b: &[Clause]) -> bool {
    let a = dedup_variants(a);
    let b = dedup_variants(b);
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|c| match (0..b.len()).find(|&j| !used[j] && is_variant(c, &b[j])) {
        Some(j) => {
            used[j] = true;
            true
        }
        None => false,
    })
}

/// Drops clauses that are variants of an earlier one.
pub fn dedup_variants(cs: &[Clause]) -> Vec<Clause> {
    let mut out: Vec<Clause> = Vec::new();
    for c in cs {
        if !out.iter().any(|d| is_variant(c, d)) {
            out.push(c.clone());
        }
    }
    out
}

/// Exact-duplicate removal preserving first occurrence.
pub fn dedup_exact(cs: Vec<Clause>) -> Vec<Clause> {
    let mut seen = BTreeSet::new();
    cs.into_iter().filter(|c| seen.insert(c.multiset_key())).collect()
}

/// Renders a clause set, one clause per line.
pub fn render_clause_set(cs: &[Clause]) -> String {
    cs.iter().map(|c| format!("{c}\n")).collect()
}

// ---------------------------------------------------------------------------
// Clause schemata.

/// Clause-schema expressions: clauses, clause variables, merges, and
/// applications of defined clause symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClauseExpr {
    Clause(Clause),
    Var(Sym),
    Merge(Box<ClauseExpr>, Box<ClauseExpr>),
    Symbol(SymApp),
}

/// Application of a defined symbol: `f(a, t̄, C̄, T̄)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SymApp {
    pub name: Sym,
    pub arith: Term,
    pub terms: Vec<Term>,
    pub clauses: Vec<ClauseExpr>,
    pub sets: Vec<ClauseSetTerm>,
}

impl SymApp {
    pub fn new(name: Sym, arith: Term, terms: Vec<Term>) -> SymApp {
        SymApp { name, arith, terms, clauses: Vec::new(), sets: Vec::new() }
    }

    pub fn subst(&self, s: &SubstitutionFamily) -> SymApp {
        SymApp {
            name: self.name.clone(),
            arith: s.term(&self.arith),
            terms: self.terms.iter().map(|t| s.term(t)).collect(),
            clauses: self.clauses.iter().map(|c| c.subst(s)).collect(),
            sets: self.sets.iter().map(|c| c.subst(s)).collect(),
        }
    }

    pub fn normalize_args(&self, table: &SymbolTable) -> SymApp {
        SymApp {
            name: self.name.clone(),
            arith: normalize_term(&self.arith, table),
            terms: self.terms.iter().map(|t| normalize_term(t, table)).collect(),
            clauses: self.clauses.clone(),
            sets: self.sets.clone(),
        }
    }
}

impl fmt::Display for SymApp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}", self.name, self.arith)?;
        for t in &self.terms {
            write!(f, ", {t}")?;
        }
        for c in &self.clauses {
            write!(f, ", {c}")?;
        }
        for c in &self.sets {
            write!(f, ", {c}")?;
        }
        write!(f, ")")
    }
}

impl ClauseExpr {
    pub fn clause(c: Clause) -> ClauseExpr {
        ClauseExpr::Clause(c)
    }
    pub fn merge(a: ClauseExpr, b: ClauseExpr) -> ClauseExpr {
        ClauseExpr::Merge(Box::new(a), Box::new(b))
    }

    pub fn subst(&self, s: &SubstitutionFamily) -> ClauseExpr {
        match self {
            ClauseExpr::Clause(c) => ClauseExpr::Clause(s.sequent(c)),
            ClauseExpr::Var(x) => match s.clause_vars.get(x) {
                Some(c) => c.clone(),
                None => self.clone(),
            },
            ClauseExpr::Merge(a, b) => ClauseExpr::merge(a.subst(s), b.subst(s)),
            ClauseExpr::Symbol(app) => ClauseExpr::Symbol(app.subst(s)),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Sym>) {
        match self {
            ClauseExpr::Clause(_) => {}
            ClauseExpr::Var(x) => {
                out.insert(x.clone());
            }
            ClauseExpr::Merge(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            ClauseExpr::Symbol(app) => app.clauses.iter().for_each(|c| c.collect_vars(out)),
        }
    }

    /// Unfolds symbols and merges; fails on clause variables.
    pub fn evaluate(&self, defs: &ClauseDefs, table: &SymbolTable) -> Result<Clause, SchemaError> {
        match self {
            ClauseExpr::Clause(c) => Ok(normalize_sequent(c, table)),
            ClauseExpr::Var(x) => Err(SchemaError::Uncovered(x.clone())),
            ClauseExpr::Merge(a, b) => Ok(a.evaluate(defs, table)?.merge(&b.evaluate(defs, table)?)),
            ClauseExpr::Symbol(app) => {
                let body = unfold(defs, app, table)?;
                body.evaluate(defs, table)
            }
        }
    }
}

impl fmt::Display for ClauseExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClauseExpr::Clause(c) => write!(f, "({c})"),
            ClauseExpr::Var(x) => write!(f, "{x}"),
            ClauseExpr::Merge(a, b) if matches!(**b, ClauseExpr::Merge(..)) => write!(f, "{a} ++ ({b})"),
            ClauseExpr::Merge(a, b) => write!(f, "{a} ++ {b}"),
            ClauseExpr::Symbol(app) => write!(f, "{app}"),
        }
    }
}

/// A term parameter of a defined symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Param {
    Var(Var),
    V2(Sym),
}

impl Param {
    pub fn name(&self) -> &Sym {
        match self {
            Param::Var(v) => &v.name,
            Param::V2(x) => x,
        }
    }
}

/// A symbol with rules `f(0, x̄, X̄, ξ̄) → base` and `f(k+1, ...) → step`;
/// `k` is free in `step`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolDef<T> {
    pub name: Sym,
    pub params: Vec<Param>,
    pub clause_params: Vec<Sym>,
    pub set_params: Vec<Sym>,
    pub base: T,
    pub step: T,
}

pub type ClauseDefs = BTreeMap<Sym, SymbolDef<ClauseExpr>>;

/// Terms that can be substituted into and hold symbol applications.
pub trait SchemaTerm: Clone {
    fn subst(&self, s: &SubstitutionFamily) -> Self;
    /// Symbol applications directly inside, with the step flag unused.
    fn symbol_apps(&self, out: &mut Vec<SymApp>);
}

impl SchemaTerm for ClauseExpr {
    fn subst(&self, s: &SubstitutionFamily) -> Self {
        ClauseExpr::subst(self, s)
    }
    fn symbol_apps(&self, out: &mut Vec<SymApp>) {
        match self {
            ClauseExpr::Clause(_) | ClauseExpr::Var(_) => {}
            ClauseExpr::Merge(a, b) => {
                a.symbol_apps(out);
                b.symbol_apps(out);
            }
            ClauseExpr::Symbol(app) => out.push(app.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("unknown symbol `{0}`")]
    Unknown(Sym),
    #[error("`{name}` applied to {got} argument(s) of some kind, expected {expected}")]
    Arity { name: Sym, expected: usize, got: usize },
    #[error("argument `{arg}` of `{name}` does not evaluate to a numeral")]
    NotNumeral { name: Sym, arg: String },
    #[error("variable `{0}` has no value")]
    Uncovered(Sym),
    #[error("second-order parameter of `{0}` needs a second-order variable argument")]
    V2Argument(Sym),
    #[error("unfolding exceeded the depth limit at `{0}`")]
    Depth(Sym),
    #[error("{0}")]
    Invalid(String),
}

impl<T: SchemaTerm> SymbolDef<T> {
    /// The right-hand side for `app` with `app.arith` evaluating to `m`.
    pub fn instantiate(&self, app: &SymApp, m: u64) -> Result<T, SchemaError> {
        if app.terms.len() != self.params.len()
            || app.clauses.len() != self.clause_params.len()
            || app.sets.len() != self.set_params.len()
        {
            return Err(SchemaError::Arity {
                name: self.name.clone(),
                expected: self.params.len() + self.clause_params.len() + self.set_params.len(),
                got: app.terms.len() + app.clauses.len() + app.sets.len(),
            });
        }
        let mut s = SubstitutionFamily::default();
        for (p, t) in self.params.iter().zip(&app.terms) {
            match (p, t) {
                (Param::Var(v), _) => {
                    s.terms.vars.insert(v.name.clone(), t.clone());
                }
                (Param::V2(x), Term::V2(z)) => {
                    s.terms.v2.insert(x.clone(), V2Binding::Rename(z.clone()));
                }
                (Param::V2(_), _) => return Err(SchemaError::V2Argument(self.name.clone())),
            }
        }
        for (p, c) in self.clause_params.iter().zip(&app.clauses) {
            s.clause_vars.insert(p.clone(), c.clone());
        }
        for (p, c) in self.set_params.iter().zip(&app.sets) {
            s.set_vars.insert(p.clone(), c.clone());
        }
        if m == 0 {
            Ok(self.base.subst(&s))
        } else {
            s.terms.vars.insert(sym(PARAM_K), Term::numeral(m - 1));
            Ok(self.step.subst(&s))
        }
    }
}

/// Unfolds one application whose arithmetic argument is ground.
pub fn unfold<T: SchemaTerm>(
    defs: &BTreeMap<Sym, SymbolDef<T>>,
    app: &SymApp,
    table: &SymbolTable,
) -> Result<T, SchemaError> {
    let def = defs.get(&app.name).ok_or_else(|| SchemaError::Unknown(app.name.clone()))?;
    let a = normalize_term(&app.arith, table);
    let m = a.as_numeral().ok_or_else(|| SchemaError::NotNumeral { name: app.name.clone(), arg: a.to_string() })?;
    def.instantiate(&app.normalize_args(table), m)
}

/// The family (ϑ, λ, μ, θ) plus first-order instantiations, applied in the
/// order μ, λ, θ, ϑ.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstitutionFamily {
    /// First-order and arithmetic variables, and second-order renamings
    /// used when unfolding symbols (applied simultaneously).
    pub terms: TermSubst,
    /// ϑ: applied after θ.
    pub arith: ArithSubst,
    /// θ: second-order variables to abstractions.
    pub v2: BTreeMap<Sym, (Sym, Term)>,
    /// λ.
    pub clause_vars: BTreeMap<Sym, ClauseExpr>,
    /// μ.
    pub set_vars: BTreeMap<Sym, ClauseSetTerm>,
}

impl SubstitutionFamily {
    pub fn arith(gamma: u64) -> SubstitutionFamily {
        let mut s = SubstitutionFamily::default();
        s.arith.insert(sym(crate::term::PARAM_N), Term::numeral(gamma));
        s
    }

    pub fn term(&self, t: &Term) -> Term {
        let t = self.terms.term(t);
        let t = if self.v2.is_empty() { t } else { self.theta().term(&t) };
        if self.arith.is_empty() {
            t
        } else {
            TermSubst { vars: self.arith.clone(), v2: BTreeMap::new() }.term(&t)
        }
    }

    fn theta(&self) -> TermSubst {
        TermSubst {
            vars: BTreeMap::new(),
            v2: self.v2.iter().map(|(x, (b, t))| (x.clone(), V2Binding::Lambda(b.clone(), t.clone()))).collect(),
        }
    }

    pub fn formula(&self, f: &Formula) -> Formula {
        let f = self.terms.formula(f);
        let f = if self.v2.is_empty() { f } else { self.theta().formula(&f) };
        if self.arith.is_empty() {
            f
        } else {
            TermSubst { vars: self.arith.clone(), v2: BTreeMap::new() }.formula(&f)
        }
    }

    pub fn sequent(&self, s: &Sequent) -> Sequent {
        s.map_formulas(&mut |f| self.formula(f))
    }

    /// Applies the family and normalizes until nothing changes; unfolding
    /// defined symbols with second-order arguments can expose new `x(t)`.
    pub fn close_formula(&self, f: &Formula, table: &SymbolTable) -> Formula {
        let mut cur = normalize_formula(&self.formula(f), table);
        for _ in 0..8 {
            let next = normalize_formula(&self.formula(&cur), table);
            if next == cur {
                break;
            }
            cur = next;
        }
        cur
    }

    pub fn close_sequent(&self, s: &Sequent, table: &SymbolTable) -> Sequent {
        s.map_formulas(&mut |f| self.close_formula(f, table))
    }
}

/// Applies the family to a clause expression: μ and λ first (they are
/// syntactic replacements), then θ and ϑ on the result, then normalizes.
pub fn apply_substitution(e: &ClauseExpr, s: &SubstitutionFamily, table: &SymbolTable) -> ClauseExpr {
    let with_clauses = e.subst(&SubstitutionFamily {
        clause_vars: s.clause_vars.clone(),
        set_vars: s.set_vars.clone(),
        ..Default::default()
    });
    let with_terms = with_clauses.subst(&SubstitutionFamily {
        terms: s.terms.clone(),
        arith: s.arith.clone(),
        v2: s.v2.clone(),
        ..Default::default()
    });
    normalize_clause_expr(&with_terms, table)
}

/// Normalizes clause leaves and fuses merges of plain clauses.
pub fn normalize_clause_expr(e: &ClauseExpr, table: &SymbolTable) -> ClauseExpr {
    match e {
        ClauseExpr::Clause(c) => ClauseExpr::Clause(normalize_sequent(c, table)),
        ClauseExpr::Var(_) => e.clone(),
        ClauseExpr::Merge(a, b) => match (normalize_clause_expr(a, table), normalize_clause_expr(b, table)) {
            (ClauseExpr::Clause(x), ClauseExpr::Clause(y)) => ClauseExpr::Clause(x.merge(&y)),
            (x, y) => ClauseExpr::merge(x, y),
        },
        ClauseExpr::Symbol(app) => ClauseExpr::Symbol(SymApp {
            clauses: app.clauses.iter().map(|c| normalize_clause_expr(c, table)).collect(),
            ..app.normalize_args(table)
        }),
    }
}

/// `v_c(ϑ, λ, C) = ((Cλ)ϑ)↓` for a clause-schema application. The family
/// is re-applied to every unfolded right-hand side.
pub fn eval_clause_schema(
    e: &ClauseExpr,
    defs: &ClauseDefs,
    s: &SubstitutionFamily,
    table: &SymbolTable,
) -> Result<Clause, SchemaError> {
    let mut budget = 1_000_000usize;
    eval_expr(e, defs, s, table, &mut budget)
}

fn eval_expr(
    e: &ClauseExpr,
    defs: &ClauseDefs,
    s: &SubstitutionFamily,
    table: &SymbolTable,
    budget: &mut usize,
) -> Result<Clause, SchemaError> {
    match e {
        ClauseExpr::Clause(c) => Ok(s.close_sequent(c, table)),
        ClauseExpr::Var(x) => match s.clause_vars.get(x) {
            Some(c) => eval_expr(c, defs, s, table, budget),
            None => Err(SchemaError::Uncovered(x.clone())),
        },
        ClauseExpr::Merge(a, b) => {
            Ok(eval_expr(a, defs, s, table, budget)?.merge(&eval_expr(b, defs, s, table, budget)?))
        }
        ClauseExpr::Symbol(app) => {
            if *budget == 0 {
                return Err(SchemaError::Depth(app.name.clone()));
            }
            *budget -= 1;
            let body = unfold(defs, &app.subst(s), table)?;
            eval_expr(&body, defs, s, table, budget)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(t: Term) -> Formula {
        Formula::atom("P", vec![t])
    }

    #[test]
    fn tautologies_and_subsumption() {
        let x = Term::iota("x");
        let c = Term::constant("c");
        assert!(is_tautology(&Sequent::new(vec![p(x.clone())], vec![p(x.clone())])));
        let general = Sequent::new(vec![p(x)], vec![]);
        let special = Sequent::new(vec![p(c)], vec![]);
        assert!(subsumes(&general, &special));
        assert!(!subsumes(&special, &general));
    }

    #[test]
    fn variants_compare_equal() {
        let a = Sequent::new(
            vec![p(Term::idx("x", Term::numeral(1)))],
            vec![p(Term::app("f", vec![Term::idx("x", Term::numeral(1))]))],
        );
        let b = Sequent::new(vec![p(Term::iota("u"))], vec![p(Term::app("f", vec![Term::iota("u")]))]);
        assert!(is_variant(&a, &b));
        assert_eq!(canonical_clause(&a), canonical_clause(&b));
        assert!(clause_sets_equal(std::slice::from_ref(&a), &[b]));
    }

    #[test]
    fn multiset_subsumption_respects_multiplicity() {
        let x = Term::iota("x");
        let c = Term::constant("c");
        let two = Sequent::new(vec![p(x.clone()), p(x)], vec![]);
        let one = Sequent::new(vec![p(c)], vec![]);
        assert!(!subsumes(&two, &one));
    }
}
