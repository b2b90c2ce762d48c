//! Projection terms and the projection-set schema of a proof schema.

use crate::calculus::{
    analyze, check_proof, Anc, Aux, CheckOptions, Configuration, Marking, Node, Proof, ProofSchema, Rule,
};
use crate::charset::{
    check_dependencies, config_symbol, configuration_closure, link_configuration, pair_params, CharError, ConfigSymbol,
};
use crate::clause::{is_variant, unfold, Clause, SchemaError, SchemaTerm, SubstitutionFamily, SymApp, SymbolDef};
use crate::term::{normalize_formula, normalize_sequent, sym, Formula, Occ, Sequent, Side, Sym, SymbolTable, Term};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// A rule application inside a projection term. Auxiliary formulas are
/// recorded by premise, side and formula; evaluation picks the first
/// unused occurrence equal to the formula after normalization.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RuleApp {
    pub rule: Rule,
    pub aux: Vec<(usize, Side, Formula)>,
    pub main: Option<Formula>,
}

impl RuleApp {
    fn subst(&self, s: &SubstitutionFamily) -> RuleApp {
        RuleApp {
            rule: self.rule.clone(),
            aux: self.aux.iter().map(|(i, side, f)| (*i, *side, s.formula(f))).collect(),
            main: self.main.as_ref().map(|f| s.formula(f)),
        }
    }
}

impl fmt::Display for RuleApp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rule)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProjTerm {
    Leaf(Sequent),
    Rule(RuleApp, Box<ProjTerm>),
    Weaken(Sequent, Box<ProjTerm>),
    Plus(Box<ProjTerm>, Box<ProjTerm>),
    Times(RuleApp, Box<ProjTerm>, Box<ProjTerm>),
    Symbol(SymApp),
}

impl ProjTerm {
    pub fn plus(a: ProjTerm, b: ProjTerm) -> ProjTerm {
        ProjTerm::Plus(Box::new(a), Box::new(b))
    }

    pub fn is_normal(&self) -> bool {
        match self {
            ProjTerm::Leaf(_) => true,
            ProjTerm::Rule(_, t) | ProjTerm::Weaken(_, t) => t.is_normal(),
            ProjTerm::Plus(a, b) | ProjTerm::Times(_, a, b) => a.is_normal() && b.is_normal(),
            ProjTerm::Symbol(_) => false,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            ProjTerm::Leaf(_) | ProjTerm::Symbol(_) => 1,
            ProjTerm::Rule(_, t) | ProjTerm::Weaken(_, t) => 1 + t.size(),
            ProjTerm::Plus(a, b) | ProjTerm::Times(_, a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl SchemaTerm for ProjTerm {
    fn subst(&self, s: &SubstitutionFamily) -> Self {
        match self {
            ProjTerm::Leaf(q) => ProjTerm::Leaf(s.sequent(q)),
            ProjTerm::Rule(r, t) => ProjTerm::Rule(r.subst(s), Box::new(t.subst(s))),
            ProjTerm::Weaken(q, t) => ProjTerm::Weaken(s.sequent(q), Box::new(t.subst(s))),
            ProjTerm::Plus(a, b) => ProjTerm::plus(a.subst(s), b.subst(s)),
            ProjTerm::Times(r, a, b) => ProjTerm::Times(r.subst(s), Box::new(a.subst(s)), Box::new(b.subst(s))),
            ProjTerm::Symbol(app) => ProjTerm::Symbol(app.subst(s)),
        }
    }
    fn symbol_apps(&self, out: &mut Vec<SymApp>) {
        match self {
            ProjTerm::Leaf(_) => {}
            ProjTerm::Rule(_, t) | ProjTerm::Weaken(_, t) => t.symbol_apps(out),
            ProjTerm::Plus(a, b) | ProjTerm::Times(_, a, b) => {
                a.symbol_apps(out);
                b.symbol_apps(out);
            }
            ProjTerm::Symbol(app) => out.push(app.clone()),
        }
    }
}

impl fmt::Display for ProjTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjTerm::Leaf(s) => write!(f, "[{s}]"),
            ProjTerm::Rule(r, t) => write!(f, "{r}({t})"),
            ProjTerm::Weaken(s, t) => write!(f, "w{{{s}}}({t})"),
            ProjTerm::Plus(a, b) => write!(f, "({a} + {b})"),
            ProjTerm::Times(r, a, b) => write!(f, "{r}({a}, {b})"),
            ProjTerm::Symbol(app) => write!(f, "{app}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProjError {
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error("cannot apply {rule}: {reason}")]
    Apply { rule: String, reason: String },
    #[error("no projection ends in {0}")]
    NoMatch(String),
}

fn aux_of(p: &Proof, inf_aux: &[Aux]) -> Vec<(usize, Side, Formula)> {
    inf_aux
        .iter()
        .map(|a| (a.premise, a.occ.side, p.premises()[a.premise].conclusion.get(a.occ).expect("checked aux").clone()))
        .collect()
}

fn needs_main(rule: &Rule) -> bool {
    matches!(
        rule,
        Rule::AndL1
            | Rule::AndL2
            | Rule::AllL
            | Rule::ExL
            | Rule::WL
            | Rule::OrR1
            | Rule::OrR2
            | Rule::AllR
            | Rule::ExR
            | Rule::WR
    )
}

/// `Ξ(π, Ω)` for a marked proof; links become `pr` symbols.
pub fn extract_xi(
    p: &Proof,
    marking: &Marking,
    schema: Option<&ProofSchema>,
    table: &SymbolTable,
) -> Result<ProjTerm, CharError> {
    match &p.node {
        Node::Axiom => Ok(ProjTerm::Leaf(p.conclusion.clone())),
        Node::Link(l) => {
            let schema = schema.ok_or_else(|| CharError::UnknownTarget(l.target.clone()))?;
            let c = link_configuration(schema, l, &p.conclusion, &marking.labels, table)?;
            Ok(ProjTerm::Symbol(SymApp::new(config_symbol("pr", &l.target, &c), l.arg.clone(), l.args.clone())))
        }
        Node::Inference(inf) => {
            let a = analyze(p, table).map_err(CharError::Ancestry)?;
            let mut subs = inf
                .premises
                .iter()
                .zip(&marking.children)
                .map(|(q, mq)| extract_xi(q, mq, schema, table))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter();
            let aux = aux_of(p, &a.aux);
            match inf.premises.len() {
                1 => {
                    let sub = subs.next().expect("one premise");
                    let main_cut_like = a.mains.first().is_some_and(|o| marking.labels.get(*o).is_cut_like());
                    if inf.rule == Rule::E || main_cut_like {
                        return Ok(sub);
                    }
                    let main = if needs_main(&inf.rule) {
                        a.mains.first().and_then(|o| p.conclusion.get(*o)).cloned()
                    } else {
                        None
                    };
                    Ok(ProjTerm::Rule(RuleApp { rule: inf.rule.clone(), aux, main }, Box::new(sub)))
                }
                2 => {
                    let l = subs.next().expect("two premises");
                    let r = subs.next().expect("two premises");
                    let cut_like =
                        a.aux.first().is_some_and(|x| marking.children[x.premise].labels.get(x.occ).is_cut_like());
                    if cut_like {
                        let es = |i: usize| {
                            marking.children[i].labels.select(&inf.premises[i].conclusion, |l| l == Anc::EndSeq)
                        };
                        Ok(ProjTerm::plus(ProjTerm::Weaken(es(1), Box::new(l)), ProjTerm::Weaken(es(0), Box::new(r))))
                    } else {
                        Ok(ProjTerm::Times(
                            RuleApp { rule: inf.rule.clone(), aux, main: None },
                            Box::new(l),
                            Box::new(r),
                        ))
                    }
                }
                _ => Err(CharError::Ancestry(format!("{}: unexpected arity", inf.rule))),
            }
        }
    }
}

/// `Ξ(π, Ω)` for a link-free proof.
pub fn projection_term(p: &Proof, omega: &[Occ], table: &SymbolTable) -> Result<ProjTerm, CharError> {
    let m = crate::calculus::mark_ancestors(p, omega, table).map_err(CharError::Ancestry)?;
    extract_xi(p, &m, None, table)
}

/// Rewrite rules for the projection symbols of a proof schema.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjSchema {
    pub top: Sym,
    pub symbols: Vec<ConfigSymbol>,
    pub defs: BTreeMap<Sym, SymbolDef<ProjTerm>>,
    pub deps: BTreeSet<(Sym, Sym)>,
}

impl ProjSchema {
    pub fn symbol(&self, psi: &str, config: &Configuration) -> Option<&ConfigSymbol> {
        self.symbols.iter().find(|s| &*s.proof == psi && s.config == *config)
    }

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

/// `pr^{ψ,Ω}(0, x̄) → Ξ(π, Ω)` and `pr^{ψ,Ω}(k+1, x̄) → Ξ(ν(k), Ω)` for
/// every reachable configuration.
pub fn build_proj_schema(schema: &ProofSchema, table: &SymbolTable) -> Result<ProjSchema, CharError> {
    let closure = configuration_closure(schema, table)?;
    let mut symbols = Vec::new();
    let mut defs = BTreeMap::new();
    let mut owner = BTreeMap::new();
    for cp in &closure {
        let name = config_symbol("pr", &cp.pair.symbol, &cp.config);
        let base = extract_xi(cp.base.proof, &cp.base.marking, Some(schema), table)?;
        let step = extract_xi(cp.step.proof, &cp.step.marking, Some(schema), table)?;
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
    let top = symbols.first().map(|s: &ConfigSymbol| s.name.clone()).unwrap_or_else(|| sym("pr"));
    Ok(ProjSchema { top, symbols, defs, deps })
}

/// Structural key of a proof: rule tags and conclusions as multisets.
pub fn proof_key(p: &Proof) -> String {
    let mut out = String::new();
    fn go(p: &Proof, out: &mut String) {
        let tag = match &p.node {
            Node::Axiom => "ax".to_string(),
            Node::Link(l) => format!("link {}", l.target),
            Node::Inference(i) => i.rule.tag().to_string(),
        };
        out.push_str(&format!("{tag}[{}](", p.conclusion.multiset_key()));
        for q in p.premises() {
            go(q, out);
            out.push(',');
        }
        out.push(')');
    }
    go(p, &mut out);
    out
}

fn dedup_proofs(ps: Vec<Proof>) -> Vec<Proof> {
    let mut seen = BTreeSet::new();
    ps.into_iter().filter(|p| seen.insert(proof_key(p))).collect()
}

fn locate(s: &Sequent, side: Side, f: &Formula, used: &[Occ], table: &SymbolTable) -> Option<Occ> {
    let target = normalize_formula(f, table);
    s.side(side)
        .iter()
        .enumerate()
        .map(|(i, g)| (Occ { side, index: i }, g))
        .find(|(o, g)| !used.contains(o) && normalize_formula(g, table).alpha_eq(&target))
        .map(|(o, _)| o)
}

fn apply_rule(app: &RuleApp, premises: Vec<Proof>, table: &SymbolTable) -> Result<Proof, ProjError> {
    let mut used: Vec<Vec<Occ>> = vec![Vec::new(); premises.len()];
    let mut aux = Vec::new();
    for (i, side, f) in &app.aux {
        let q = premises
            .get(*i)
            .ok_or_else(|| ProjError::Apply { rule: app.rule.to_string(), reason: format!("missing premise {i}") })?;
        let o = locate(&q.conclusion, *side, f, &used[*i], table).ok_or_else(|| ProjError::Apply {
            rule: app.rule.to_string(),
            reason: format!("{f} not found in {}", q.conclusion),
        })?;
        used[*i].push(o);
        aux.push(Aux::new(*i, o));
    }
    let main = app.main.as_ref().map(|f| normalize_formula(f, table));
    Proof::infer(app.rule.clone(), premises, aux, main)
        .map_err(|reason| ProjError::Apply { rule: app.rule.to_string(), reason })
}

/// Definitions and substitutions for evaluating projection terms.
pub struct ProjContext<'a> {
    pub table: &'a SymbolTable,
    pub defs: &'a BTreeMap<Sym, SymbolDef<ProjTerm>>,
    pub family: &'a SubstitutionFamily,
    pub max_unfold: usize,
}

fn eval_proj(t: &ProjTerm, ctx: &ProjContext<'_>, budget: &mut usize) -> Result<Vec<Proof>, ProjError> {
    let table = ctx.table;
    match t {
        ProjTerm::Leaf(s) => Ok(vec![Proof::axiom(normalize_sequent(&ctx.family.sequent(s), table))]),
        ProjTerm::Weaken(s, t) => {
            let w = normalize_sequent(&ctx.family.sequent(s), table);
            Ok(eval_proj(t, ctx, budget)?.into_iter().map(|p| Proof::weaken_by(p, &w)).collect())
        }
        ProjTerm::Rule(app, t) => {
            let app = app.subst(ctx.family);
            let out = eval_proj(t, ctx, budget)?
                .into_iter()
                .map(|p| apply_rule(&app, vec![p], table))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(dedup_proofs(out))
        }
        ProjTerm::Plus(a, b) => {
            let mut out = eval_proj(a, ctx, budget)?;
            out.extend(eval_proj(b, ctx, budget)?);
            Ok(dedup_proofs(out))
        }
        ProjTerm::Times(app, a, b) => {
            let app = app.subst(ctx.family);
            let xs = eval_proj(a, ctx, budget)?;
            let ys = eval_proj(b, ctx, budget)?;
            let mut out = Vec::with_capacity(xs.len() * ys.len());
            for x in &xs {
                for y in &ys {
                    out.push(apply_rule(&app, vec![x.clone(), y.clone()], table)?);
                }
            }
            Ok(dedup_proofs(out))
        }
        ProjTerm::Symbol(app) => {
            if *budget == 0 {
                return Err(SchemaError::Depth(app.name.clone()).into());
            }
            *budget -= 1;
            let app = app.subst(ctx.family);
            let body = unfold(ctx.defs, &app, table)?;
            eval_proj(&body.subst(ctx.family), ctx, budget)
        }
    }
}

/// `|Ξ|`: the set of proofs denoted by a projection term. All formulas in
/// the result are normalized.
pub fn evaluate_projection(t: &ProjTerm, ctx: &ProjContext<'_>) -> Result<Vec<Proof>, ProjError> {
    let mut budget = ctx.max_unfold;
    eval_proj(&t.subst(ctx.family), ctx, &mut budget)
}

/// `PR(Ψ, Ω)↓γ` for the symbol of `(ψ, Ω)` with its parameters free.
pub fn projections_for(
    ps: &ProjSchema,
    psi: &str,
    config: &Configuration,
    gamma: u64,
    table: &SymbolTable,
) -> Result<Vec<Proof>, ProjError> {
    let s = ps.symbol(psi, config).ok_or_else(|| SchemaError::Unknown(config_symbol("pr", psi, config)))?;
    let d = &ps.defs[&s.name];
    let args = d
        .params
        .iter()
        .map(|p| match p {
            crate::clause::Param::Var(v) => Term::Var(v.clone()),
            crate::clause::Param::V2(x) => Term::V2(x.clone()),
        })
        .collect();
    let family = SubstitutionFamily::default();
    let ctx = ProjContext { table, defs: &ps.defs, family: &family, max_unfold: 1_000_000 };
    evaluate_projection(&ProjTerm::Symbol(SymApp::new(s.name.clone(), Term::numeral(gamma), args)), &ctx)
}

/// `PR(Ψ)↓γ`.
pub fn projections_at(
    ps: &ProjSchema,
    schema: &ProofSchema,
    gamma: u64,
    table: &SymbolTable,
) -> Result<Vec<Proof>, ProjError> {
    projections_for(ps, &schema.top().symbol, &Configuration::empty(), gamma, table)
}

/// The part of `s` left after removing the formulas of `base`, if `base`
/// is a sub-multiset.
pub fn sequent_difference(s: &Sequent, base: &Sequent) -> Option<Sequent> {
    let mut out = Sequent::empty();
    for side in [Side::Ant, Side::Suc] {
        let mut rest: Vec<Formula> = s.side(side).clone();
        for f in base.side(side) {
            let i = rest.iter().position(|g| g.alpha_eq(f))?;
            rest.remove(i);
        }
        *out.side_mut(side) = rest;
    }
    Some(out)
}

/// A member of `prs` ending in `S ∘ C`, matched modulo variable renaming of
/// the clause part.
pub fn projection_for_clause<'a>(
    prs: &'a [Proof],
    end: &Sequent,
    clause: &Clause,
    table: &SymbolTable,
) -> Result<&'a Proof, ProjError> {
    let end = normalize_sequent(end, table);
    let clause = normalize_sequent(clause, table);
    let want = end.merge(&clause);
    if let Some(p) = prs.iter().find(|p| p.conclusion.multiset_eq(&want)) {
        return Ok(p);
    }
    prs.iter()
        .find(|p| sequent_difference(&p.conclusion, &end).is_some_and(|c| c.is_atomic() && is_variant(&c, &clause)))
        .ok_or_else(|| ProjError::NoMatch(want.to_string()))
}

/// Checks a projection: cut-free and atomic axioms.
pub fn check_projection(p: &Proof, table: &SymbolTable) -> crate::calculus::CheckReport {
    let opts = CheckOptions { axioms: crate::calculus::AxiomPolicy::Atomic, ..CheckOptions::cut_free() };
    check_proof(p, table, None, opts)
}
