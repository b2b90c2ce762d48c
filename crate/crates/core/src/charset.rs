//! Characteristic clause-set terms and their schematic rewrite system.

use crate::calculus::{
    analyze, identify, mark_ancestors, Anc, Configuration, Link, Marking, Node, Proof, ProofSchema, SchemaPair,
    SideLabels,
};
use crate::clause::{
    canonical_clause, dedup_exact, eval_clause_schema, is_tautology, subsumes, unfold, Clause, ClauseDefs, ClauseExpr,
    Param, SchemaError, SchemaTerm, SubstitutionFamily, SymApp, SymbolDef,
};
use crate::term::{sym, Occ, Sequent, Side, Sym, SymbolTable, Term, PARAM_K};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// Clause-set terms over `⊕` and `⊗`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClauseSetTerm {
    Leaf(ClauseExpr),
    Plus(Box<ClauseSetTerm>, Box<ClauseSetTerm>),
    Times(Box<ClauseSetTerm>, Box<ClauseSetTerm>),
    Symbol(SymApp),
    Var(Sym),
}

impl ClauseSetTerm {
    pub fn leaf(c: Clause) -> ClauseSetTerm {
        ClauseSetTerm::Leaf(ClauseExpr::Clause(c))
    }
    pub fn plus(a: ClauseSetTerm, b: ClauseSetTerm) -> ClauseSetTerm {
        ClauseSetTerm::Plus(Box::new(a), Box::new(b))
    }
    pub fn times(a: ClauseSetTerm, b: ClauseSetTerm) -> ClauseSetTerm {
        ClauseSetTerm::Times(Box::new(a), Box::new(b))
    }

    pub fn subst(&self, s: &SubstitutionFamily) -> ClauseSetTerm {
        match self {
            ClauseSetTerm::Leaf(c) => ClauseSetTerm::Leaf(c.subst(s)),
            ClauseSetTerm::Plus(a, b) => ClauseSetTerm::plus(a.subst(s), b.subst(s)),
            ClauseSetTerm::Times(a, b) => ClauseSetTerm::times(a.subst(s), b.subst(s)),
            ClauseSetTerm::Symbol(app) => ClauseSetTerm::Symbol(app.subst(s)),
            ClauseSetTerm::Var(x) => match s.set_vars.get(x) {
                Some(t) => t.clone(),
                None => self.clone(),
            },
        }
    }

    /// No clause-set symbols and no clause symbols.
    pub fn is_normal(&self, table: &SymbolTable) -> bool {
        match self {
            ClauseSetTerm::Leaf(ClauseExpr::Clause(c)) => {
                !c.ant.iter().chain(&c.suc).any(|f| table.formula_has_defined(f))
            }
            ClauseSetTerm::Leaf(_) | ClauseSetTerm::Symbol(_) | ClauseSetTerm::Var(_) => false,
            ClauseSetTerm::Plus(a, b) | ClauseSetTerm::Times(a, b) => a.is_normal(table) && b.is_normal(table),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            ClauseSetTerm::Plus(a, b) | ClauseSetTerm::Times(a, b) => 1 + a.size() + b.size(),
            _ => 1,
        }
    }

    /// Names of symbols applied anywhere in the term.
    pub fn symbols(&self, out: &mut BTreeSet<Sym>) {
        match self {
            ClauseSetTerm::Plus(a, b) | ClauseSetTerm::Times(a, b) => {
                a.symbols(out);
                b.symbols(out);
            }
            ClauseSetTerm::Symbol(app) => {
                out.insert(app.name.clone());
            }
            _ => {}
        }
    }
}

impl SchemaTerm for ClauseSetTerm {
    fn subst(&self, s: &SubstitutionFamily) -> Self {
        ClauseSetTerm::subst(self, s)
    }
    fn symbol_apps(&self, out: &mut Vec<SymApp>) {
        match self {
            ClauseSetTerm::Plus(a, b) | ClauseSetTerm::Times(a, b) => {
                a.symbol_apps(out);
                b.symbol_apps(out);
            }
            ClauseSetTerm::Symbol(app) => out.push(app.clone()),
            _ => {}
        }
    }
}

impl fmt::Display for ClauseSetTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &ClauseSetTerm, f: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
            match t {
                ClauseSetTerm::Leaf(ClauseExpr::Clause(c)) => write!(f, "[{c}]"),
                ClauseSetTerm::Leaf(e) => write!(f, "[{e}]"),
                ClauseSetTerm::Var(x) => write!(f, "{x}"),
                ClauseSetTerm::Symbol(app) => write!(f, "{app}"),
                ClauseSetTerm::Plus(a, b) | ClauseSetTerm::Times(a, b) => {
                    let op = if matches!(t, ClauseSetTerm::Plus(..)) { "+" } else { "*" };
                    if nested {
                        write!(f, "(")?;
                    }
                    go(a, f, true)?;
                    write!(f, " {op} ")?;
                    go(b, f, true)?;
                    if nested {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
            }
        }
        go(self, f, false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharError {
    #[error("{0}")]
    Ancestry(String),
    #[error("link to unknown proof symbol `{0}`")]
    UnknownTarget(Sym),
    #[error("link conclusion {conclusion} does not match {expected}")]
    LinkMismatch { conclusion: String, expected: String },
    #[error("end-sequent of `{symbol}` ({which}) does not match its declaration")]
    EndSequent { symbol: Sym, which: &'static str },
    #[error("configuration {config} does not fit `{symbol}`: {reason}")]
    Configuration { symbol: Sym, config: String, reason: String },
    #[error("`{from}` depends on `{to}` against the schema order")]
    Order { from: Sym, to: Sym },
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

/// Name of the symbol standing for `(ψ, Ω)` with the given prefix.
pub fn config_symbol(prefix: &str, psi: &str, config: &Configuration) -> Sym {
    sym(&format!("{prefix}^{psi}{}", config.key()))
}

/// A proof of a schema pair together with the occurrences of `Ω` in its
/// conclusion and the resulting ancestor marking.
#[derive(Clone, Debug)]
pub struct MarkedProof<'a> {
    pub proof: &'a Proof,
    pub omega: Vec<Occ>,
    pub marking: Marking,
}

/// Base and step proof of a pair marked for one configuration.
#[derive(Clone, Debug)]
pub struct ConfiguredPair<'a> {
    pub pair: &'a SchemaPair,
    pub config: Configuration,
    pub base: MarkedProof<'a>,
    pub step: MarkedProof<'a>,
}

fn flat(s: &Sequent, o: Occ) -> usize {
    match o.side {
        Side::Ant => o.index,
        Side::Suc => s.ant.len() + o.index,
    }
}

fn mark_for<'a>(
    pair: &'a SchemaPair,
    proof: &'a Proof,
    arith: Term,
    config: &Configuration,
    which: &'static str,
    table: &SymbolTable,
) -> Result<MarkedProof<'a>, CharError> {
    let declared = config.positions(&pair.end_sequent, table).map_err(|reason| CharError::Configuration {
        symbol: pair.symbol.clone(),
        config: config.key(),
        reason,
    })?;
    let expected = pair.instance(&arith, &pair.param_terms());
    let ident = identify(&expected, &proof.conclusion, table)
        .ok_or_else(|| CharError::EndSequent { symbol: pair.symbol.clone(), which })?;
    let omega: Vec<Occ> = declared.iter().map(|o| ident[flat(&pair.end_sequent, *o)]).collect();
    let marking = mark_ancestors(proof, &omega, table).map_err(CharError::Ancestry)?;
    Ok(MarkedProof { proof, omega, marking })
}

/// Configuration of the link target induced by the cut-like occurrences
/// of the link conclusion.
pub fn link_configuration(
    schema: &ProofSchema,
    link: &Link,
    conclusion: &Sequent,
    labels: &SideLabels,
    table: &SymbolTable,
) -> Result<Configuration, CharError> {
    let target = schema.pair(&link.target).ok_or_else(|| CharError::UnknownTarget(link.target.clone()))?;
    let expected = target.instance(&link.arg, &link.args);
    let ident = identify(&expected, conclusion, table).ok_or_else(|| CharError::LinkMismatch {
        conclusion: conclusion.to_string(),
        expected: expected.to_string(),
    })?;
    let declared: Vec<Occ> = target.end_sequent.occs().map(|(o, _)| o).collect();
    let occs: Vec<Occ> = declared
        .into_iter()
        .zip(ident)
        .filter(|(_, actual)| labels.get(*actual).is_cut_like())
        .map(|(d, _)| d)
        .collect();
    Ok(Configuration::from_positions(&target.end_sequent, &occs, table))
}

fn collect_links<'p>(p: &'p Proof, m: &Marking, out: &mut Vec<(&'p Link, &'p Sequent, SideLabels)>) {
    match &p.node {
        Node::Link(l) => out.push((l, &p.conclusion, m.labels.clone())),
        Node::Axiom => {}
        Node::Inference(inf) => {
            for (q, mq) in inf.premises.iter().zip(&m.children) {
                collect_links(q, mq, out);
            }
        }
    }
}

/// All `(ψ, Ω)` reachable from `(ψ₁, ∅)` through links, in discovery order.
pub fn configuration_closure<'a>(
    schema: &'a ProofSchema,
    table: &SymbolTable,
) -> Result<Vec<ConfiguredPair<'a>>, CharError> {
    let mut out: Vec<ConfiguredPair<'a>> = Vec::new();
    let mut seen: BTreeSet<(Sym, Configuration)> = BTreeSet::new();
    let mut queue = std::collections::VecDeque::new();
    if schema.pairs.is_empty() {
        return Ok(out);
    }
    queue.push_back((0usize, Configuration::empty()));
    seen.insert((schema.pairs[0].symbol.clone(), Configuration::empty()));
    while let Some((idx, config)) = queue.pop_front() {
        let pair = &schema.pairs[idx];
        let base = mark_for(pair, &pair.base, Term::zero(), &config, "base", table)?;
        let step = mark_for(pair, &pair.step, Term::succ(Term::k()), &config, "step", table)?;
        for (mp, in_step) in [(&base, false), (&step, true)] {
            let mut links = Vec::new();
            collect_links(mp.proof, &mp.marking, &mut links);
            for (link, concl, labels) in links {
                let c = link_configuration(schema, link, concl, &labels, table)?;
                let t = schema.index_of(&link.target).ok_or_else(|| CharError::UnknownTarget(link.target.clone()))?;
                if t < idx || (t == idx && !in_step) {
                    return Err(CharError::Order { from: pair.symbol.clone(), to: link.target.clone() });
                }
                if seen.insert((link.target.clone(), c.clone())) {
                    queue.push_back((t, c));
                }
            }
        }
        out.push(ConfiguredPair { pair, config, base, step });
    }
    Ok(out)
}

fn aux_cut_like(p: &Proof, m: &Marking, table: &SymbolTable) -> Result<bool, CharError> {
    let a = analyze(p, table).map_err(CharError::Ancestry)?;
    let labels: Vec<Anc> = a.aux.iter().map(|x| m.children[x.premise].labels.get(x.occ)).collect();
    Ok(labels.first().is_some_and(|l| l.is_cut_like()))
}

/// `Θ(π, Ω)` for a marked proof; links become `cl` symbols.
pub fn extract_theta(
    p: &Proof,
    marking: &Marking,
    schema: Option<&ProofSchema>,
    table: &SymbolTable,
) -> Result<ClauseSetTerm, CharError> {
    match &p.node {
        Node::Axiom => Ok(ClauseSetTerm::leaf(marking.labels.select(&p.conclusion, Anc::is_cut_like))),
        Node::Link(l) => {
            let schema = schema.ok_or_else(|| CharError::UnknownTarget(l.target.clone()))?;
            let c = link_configuration(schema, l, &p.conclusion, &marking.labels, table)?;
            Ok(ClauseSetTerm::Symbol(SymApp::new(config_symbol("cl", &l.target, &c), l.arg.clone(), l.args.clone())))
        }
        Node::Inference(inf) => {
            let subs = inf
                .premises
                .iter()
                .zip(&marking.children)
                .map(|(q, mq)| extract_theta(q, mq, schema, table))
                .collect::<Result<Vec<_>, _>>()?;
            let mut subs = subs.into_iter();
            match inf.premises.len() {
                1 => Ok(subs.next().expect("one premise")),
                2 => {
                    let a = subs.next().expect("two premises");
                    let b = subs.next().expect("two premises");
                    if aux_cut_like(p, marking, table)? {
                        Ok(ClauseSetTerm::plus(a, b))
                    } else {
                        Ok(ClauseSetTerm::times(a, b))
                    }
                }
                _ => Err(CharError::Ancestry(format!("{}: unexpected arity", inf.rule))),
            }
        }
    }
}

/// `Θ(π, Ω)` for a link-free proof and configuration positions.
pub fn characteristic_term(p: &Proof, omega: &[Occ], table: &SymbolTable) -> Result<ClauseSetTerm, CharError> {
    let m = mark_ancestors(p, omega, table).map_err(CharError::Ancestry)?;
    extract_theta(p, &m, None, table)
}

/// One `cl^{ψ,Ω}` symbol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigSymbol {
    pub name: Sym,
    pub proof: Sym,
    pub config: Configuration,
}

/// Rewrite rules for the clause-set symbols of a proof schema.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharSchema {
    pub top: Sym,
    pub symbols: Vec<ConfigSymbol>,
    pub defs: BTreeMap<Sym, SymbolDef<ClauseSetTerm>>,
    /// `(a, b)`: a right-hand side of `a` mentions `b`.
    pub deps: BTreeSet<(Sym, Sym)>,
}

impl CharSchema {
    pub fn symbol(&self, psi: &str, config: &Configuration) -> Option<&ConfigSymbol> {
        self.symbols.iter().find(|s| &*s.proof == psi && s.config == *config)
    }

    /// Base and step rules rendered one per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.symbols {
            let d = &self.defs[&s.name];
            let params: String = d.params.iter().map(|p| format!(", {}", p.name())).collect();
            out.push_str(&format!("{}(0{params}) => {}\n", s.name, d.base));
            out.push_str(&format!("{}(k+1{params}) => {}\n", s.name, d.step));
        }
        out
    }
}

pub(crate) fn pair_params(pair: &SchemaPair) -> Vec<Param> {
    pair.params.iter().cloned().map(Param::Var).collect()
}

/// Checks that every dependency respects the schema order.
pub(crate) fn check_dependencies<T: SchemaTerm>(
    defs: &BTreeMap<Sym, SymbolDef<T>>,
    owner: &BTreeMap<Sym, usize>,
) -> Result<BTreeSet<(Sym, Sym)>, CharError> {
    let mut deps = BTreeSet::new();
    for (name, d) in defs {
        for (rhs, is_step) in [(&d.base, false), (&d.step, true)] {
            let mut apps = Vec::new();
            rhs.symbol_apps(&mut apps);
            for app in apps {
                let from = owner[name];
                let to = *owner.get(&app.name).ok_or_else(|| CharError::UnknownTarget(app.name.clone()))?;
                if to < from || (to == from && !is_step) {
                    return Err(CharError::Order { from: name.clone(), to: app.name.clone() });
                }
                deps.insert((name.clone(), app.name.clone()));
            }
        }
    }
    Ok(deps)
}

/// Builds `cl^{ψ,Ω}(0, x̄) → Θ(π, Ω)` and `cl^{ψ,Ω}(k+1, x̄) → Θ(ν(k), Ω)`
/// for every reachable configuration.
pub fn build_char_schema(schema: &ProofSchema, table: &SymbolTable) -> Result<CharSchema, CharError> {
    let closure = configuration_closure(schema, table)?;
    let mut symbols = Vec::new();
    let mut defs = BTreeMap::new();
    let mut owner = BTreeMap::new();
    for cp in &closure {
        let name = config_symbol("cl", &cp.pair.symbol, &cp.config);
        let base = extract_theta(cp.base.proof, &cp.base.marking, Some(schema), table)?;
        let step = extract_theta(cp.step.proof, &cp.step.marking, Some(schema), table)?;
        owner.insert(name.clone(), schema.index_of(&cp.pair.symbol).expect("closure pairs exist"));
        defs.insert(
            name.clone(),
            SymbolDef {
                name: name.clone(),
                params: pair_params(cp.pair),
                clause_params: Vec::new(),
                set_params: Vec::new(),
                base,
                step,
            },
        );
        symbols.push(ConfigSymbol { name, proof: cp.pair.symbol.clone(), config: cp.config.clone() });
    }
    let deps = check_dependencies(&defs, &owner)?;
    let top = symbols.first().map(|s: &ConfigSymbol| s.name.clone()).unwrap_or_else(|| sym("cl"));
    Ok(CharSchema { top, symbols, defs, deps })
}

/// Definitions and substitutions for evaluating clause-set terms.
pub struct SetContext<'a> {
    pub table: &'a SymbolTable,
    pub clauses: &'a ClauseDefs,
    pub sets: &'a BTreeMap<Sym, SymbolDef<ClauseSetTerm>>,
    pub family: &'a SubstitutionFamily,
    pub max_unfold: usize,
}

fn union_into(out: &mut Vec<Clause>, seen: &mut BTreeSet<Sequent>, cs: Vec<Clause>) {
    for c in cs {
        if seen.insert(c.multiset_key()) {
            out.push(c);
        }
    }
}

fn eval_set(t: &ClauseSetTerm, ctx: &SetContext<'_>, budget: &mut usize) -> Result<Vec<Clause>, SchemaError> {
    match t {
        ClauseSetTerm::Leaf(c) => Ok(vec![eval_clause_schema(c, ctx.clauses, ctx.family, ctx.table)?]),
        ClauseSetTerm::Var(x) => Err(SchemaError::Uncovered(x.clone())),
        ClauseSetTerm::Plus(a, b) => {
            let mut out = Vec::new();
            let mut seen = BTreeSet::new();
            union_into(&mut out, &mut seen, eval_set(a, ctx, budget)?);
            union_into(&mut out, &mut seen, eval_set(b, ctx, budget)?);
            Ok(out)
        }
        ClauseSetTerm::Times(a, b) => {
            let xs = eval_set(a, ctx, budget)?;
            let ys = eval_set(b, ctx, budget)?;
            let mut out = Vec::new();
            let mut seen = BTreeSet::new();
            for x in &xs {
                union_into(&mut out, &mut seen, ys.iter().map(|y| x.merge(y)).collect());
            }
            Ok(out)
        }
        ClauseSetTerm::Symbol(app) => {
            if *budget == 0 {
                return Err(SchemaError::Depth(app.name.clone()));
            }
            *budget -= 1;
            let app = app.subst(ctx.family);
            let body = unfold(ctx.sets, &app, ctx.table)?;
            eval_set(&body.subst(ctx.family), ctx, budget)
        }
    }
}

/// `v*_cst(ϑ, λ, μ, t)`: unfolds set symbols and evaluates `⊕` as union and
/// `⊗` as pairwise merge; clauses come out normalized.
pub fn eval_clause_set_schema(t: &ClauseSetTerm, ctx: &SetContext<'_>) -> Result<Vec<Clause>, SchemaError> {
    let mut budget = ctx.max_unfold;
    let with_sets = t.subst(&SubstitutionFamily { set_vars: ctx.family.set_vars.clone(), ..Default::default() });
    eval_set(&with_sets.subst(ctx.family), ctx, &mut budget)
}

/// `|t|` for a term without symbols or variables.
pub fn evaluate_term(t: &ClauseSetTerm, table: &SymbolTable) -> Result<Vec<Clause>, SchemaError> {
    let empty_c = ClauseDefs::new();
    let empty_s = BTreeMap::new();
    let family = SubstitutionFamily::default();
    let ctx = SetContext { table, clauses: &empty_c, sets: &empty_s, family: &family, max_unfold: 0 };
    eval_clause_set_schema(t, &ctx)
}

/// The normal clause-set term `cl^{ψ,Ω}(γ, x̄)↓`.
pub fn term_at(
    cs: &CharSchema,
    name: &str,
    args: Vec<Term>,
    gamma: u64,
    table: &SymbolTable,
) -> Result<ClauseSetTerm, SchemaError> {
    fn go(
        t: &ClauseSetTerm,
        cs: &CharSchema,
        table: &SymbolTable,
        budget: &mut usize,
    ) -> Result<ClauseSetTerm, SchemaError> {
        match t {
            ClauseSetTerm::Plus(a, b) => Ok(ClauseSetTerm::plus(go(a, cs, table, budget)?, go(b, cs, table, budget)?)),
            ClauseSetTerm::Times(a, b) => {
                Ok(ClauseSetTerm::times(go(a, cs, table, budget)?, go(b, cs, table, budget)?))
            }
            ClauseSetTerm::Symbol(app) => {
                if *budget == 0 {
                    return Err(SchemaError::Depth(app.name.clone()));
                }
                *budget -= 1;
                go(&unfold(&cs.defs, app, table)?, cs, table, budget)
            }
            ClauseSetTerm::Leaf(ClauseExpr::Clause(c)) => {
                Ok(ClauseSetTerm::leaf(crate::term::normalize_sequent(c, table)))
            }
            other => Ok(other.clone()),
        }
    }
    let app = SymApp::new(sym(name), Term::numeral(gamma), args);
    let mut budget = 1_000_000;
    go(&ClauseSetTerm::Symbol(app), cs, table, &mut budget)
}

/// `CL(Ψ, Ω)↓γ` for the symbol of `(ψ, Ω)` with its parameters free.
pub fn clause_set_at(
    cs: &CharSchema,
    psi: &str,
    config: &Configuration,
    gamma: u64,
    table: &SymbolTable,
) -> Result<Vec<Clause>, SchemaError> {
    let s = cs.symbol(psi, config).ok_or_else(|| SchemaError::Unknown(config_symbol("cl", psi, config)))?;
    let d = &cs.defs[&s.name];
    let args = d
        .params
        .iter()
        .map(|p| match p {
            Param::Var(v) => Term::Var(v.clone()),
            Param::V2(x) => Term::V2(x.clone()),
        })
        .collect();
    let t = term_at(cs, &s.name, args, gamma, table)?;
    evaluate_term(&t, table)
}

/// `CL(Ψ)↓γ`.
pub fn characteristic_clause_set(
    cs: &CharSchema,
    schema: &ProofSchema,
    gamma: u64,
    table: &SymbolTable,
) -> Result<Vec<Clause>, SchemaError> {
    clause_set_at(cs, &schema.top().symbol, &Configuration::empty(), gamma, table)
}

/// Removes tautologies and subsumed clauses. Among variants the clause whose
/// canonical renaming is lexicographically least is kept.
pub fn reduce_clause_set(cs: &[Clause]) -> Vec<Clause> {
    let cs: Vec<Clause> = dedup_exact(cs.to_vec()).into_iter().filter(|c| !is_tautology(c)).collect();
    let keys: Vec<(String, String)> = cs.iter().map(|c| (canonical_clause(c).to_string(), c.to_string())).collect();
    let mut keep = Vec::new();
    for (i, c) in cs.iter().enumerate() {
        let dominated = cs.iter().enumerate().any(|(j, d)| {
            if i == j || !subsumes(d, c) {
                return false;
            }
            if !subsumes(c, d) {
                return true;
            }
            keys[j] < keys[i] || (keys[j] == keys[i] && j < i)
        });
        if !dominated {
            keep.push(c.clone());
        }
    }
    keep
}

/// Successor argument `k+1` used by step rules.
pub fn step_arg() -> Term {
    Term::succ(Term::var(PARAM_K, crate::term::Sort::Omega))
}
