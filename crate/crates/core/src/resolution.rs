//! Resolution on clauses: resolvents, resolution terms and schemata,
//! refutation checking, the tree transformation, and a ground-instance
//! prover.

use crate::calculus::{Proof, Rule};
use crate::charset::ClauseSetTerm;
use crate::clause::{
    clause_vars, is_tautology, subsumer, unfold, Clause, ClauseDefs, ClauseExpr, Param, SchemaError, SchemaTerm,
    SubstitutionFamily, SymApp, SymbolDef,
};
use crate::term::{
    normalize_sequent, sym, unify_atoms, FoSubst, Formula, Occ, Sequent, Side, Sym, SymbolTable, Term, VarKey,
};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// `res(C, D, P)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolvent {
    pub clause: Clause,
    /// `P` is missing from the succedent of `C` or the antecedent of `D`.
    pub pseudo: bool,
}

/// `C₁, D₁∖P ⊢ C₂∖P, D₂`, removing every occurrence of `P`.
pub fn resolve(c: &Clause, d: &Clause, p: &Formula) -> Resolvent {
    let pseudo = !c.suc.contains(p) || !d.ant.contains(p);
    let mut ant = c.ant.clone();
    ant.extend(d.ant.iter().filter(|a| *a != p).cloned());
    let mut suc: Vec<Formula> = c.suc.iter().filter(|a| *a != p).cloned().collect();
    suc.extend(d.suc.iter().cloned());
    Resolvent { clause: Sequent::new(ant, suc), pseudo }
}

/// Resolution terms `C | r(s; t; P) | ρ(a, x̄, X̄)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ResTerm {
    Clause(ClauseExpr),
    Res(Box<ResTerm>, Box<ResTerm>, Formula),
    Symbol(SymApp),
}

impl ResTerm {
    pub fn res(a: ResTerm, b: ResTerm, p: Formula) -> ResTerm {
        ResTerm::Res(Box::new(a), Box::new(b), p)
    }
}

impl SchemaTerm for ResTerm {
    fn subst(&self, s: &SubstitutionFamily) -> Self {
        match self {
            ResTerm::Clause(c) => ResTerm::Clause(c.subst(s)),
            ResTerm::Res(a, b, p) => ResTerm::res(a.subst(s), b.subst(s), s.formula(p)),
            ResTerm::Symbol(app) => ResTerm::Symbol(app.subst(s)),
        }
    }
    fn symbol_apps(&self, out: &mut Vec<SymApp>) {
        match self {
            ResTerm::Clause(_) => {}
            ResTerm::Res(a, b, _) => {
                a.symbol_apps(out);
                b.symbol_apps(out);
            }
            ResTerm::Symbol(app) => out.push(app.clone()),
        }
    }
}

impl fmt::Display for ResTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResTerm::Clause(c) => write!(f, "{c}"),
            ResTerm::Res(a, b, p) => write!(f, "r({a}; {b}; {p})"),
            ResTerm::Symbol(app) => write!(f, "{app}"),
        }
    }
}

/// Resolution symbols `ρ₁, …, ρ_α` with their rules, plus the clause
/// schemata they use. The first symbol is the top one.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionSchema {
    pub order: Vec<Sym>,
    pub defs: BTreeMap<Sym, SymbolDef<ResTerm>>,
    pub clauses: ClauseDefs,
}

/// λ, θ, μ for a refutation schema.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub lambda: BTreeMap<Sym, ClauseExpr>,
    pub theta: BTreeMap<Sym, (Sym, Term)>,
    pub mu: BTreeMap<Sym, ClauseSetTerm>,
    pub gamma_max: Option<u64>,
}

impl Witness {
    /// The family for parameter value `gamma`.
    pub fn family(&self, gamma: u64) -> SubstitutionFamily {
        let mut f = SubstitutionFamily::arith(gamma);
        f.v2 = self.theta.clone();
        f.clause_vars = self.lambda.clone();
        f.set_vars = self.mu.clone();
        f
    }
}

/// A resolution deduction with the clause at every node.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Deduction {
    Leaf(Clause),
    Res { left: Box<Deduction>, right: Box<Deduction>, atom: Formula, clause: Clause, pseudo: bool },
}

impl Deduction {
    pub fn leaf(c: Clause) -> Deduction {
        Deduction::Leaf(c)
    }

    /// `r(left; right; atom)` with its computed clause.
    pub fn res(left: Deduction, right: Deduction, atom: Formula) -> Deduction {
        let r = resolve(left.clause(), right.clause(), &atom);
        Deduction::Res { left: Box::new(left), right: Box::new(right), atom, clause: r.clause, pseudo: r.pseudo }
    }

    /// `ES(d)`.
    pub fn clause(&self) -> &Clause {
        match self {
            Deduction::Leaf(c) => c,
            Deduction::Res { clause, .. } => clause,
        }
    }

    pub fn leaves(&self) -> Vec<&Clause> {
        let mut out = Vec::new();
        fn go<'a>(d: &'a Deduction, out: &mut Vec<&'a Clause>) {
            match d {
                Deduction::Leaf(c) => out.push(c),
                Deduction::Res { left, right, .. } => {
                    go(left, out);
                    go(right, out);
                }
            }
        }
        go(self, &mut out);
        out
    }

    /// Number of resolution steps.
    pub fn steps(&self) -> usize {
        match self {
            Deduction::Leaf(_) => 0,
            Deduction::Res { left, right, .. } => 1 + left.steps() + right.steps(),
        }
    }

    /// Number of symbols in the deduction term, counting clause literals.
    pub fn size(&self) -> usize {
        match self {
            Deduction::Leaf(c) => 1 + c.len(),
            Deduction::Res { left, right, .. } => 2 + left.size() + right.size(),
        }
    }

    pub fn pseudo_steps(&self) -> usize {
        match self {
            Deduction::Leaf(_) => 0,
            Deduction::Res { left, right, pseudo, .. } => {
                usize::from(*pseudo) + left.pseudo_steps() + right.pseudo_steps()
            }
        }
    }
}

impl fmt::Display for Deduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Deduction::Leaf(c) => write!(f, "({c})"),
            Deduction::Res { left, right, atom, .. } => write!(f, "r({left}; {right}; {atom})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResError {
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error("unknown resolution symbol `{0}`")]
    Unknown(Sym),
    #[error("`{from}` refers to `{to}` against the symbol order")]
    Order { from: Sym, to: Sym },
    #[error("at node {path:?}: {message}")]
    Node { path: Vec<usize>, message: String },
}

impl ResolutionSchema {
    pub fn top(&self) -> Option<&SymbolDef<ResTerm>> {
        self.order.first().and_then(|s| self.defs.get(s))
    }

    /// Base rules of `ρᵢ` use only `ρⱼ` with `j > i`; step rules may also
    /// use `ρᵢ` itself.
    pub fn check_order(&self) -> Result<(), ResError> {
        let index: BTreeMap<&Sym, usize> = self.order.iter().enumerate().map(|(i, s)| (s, i)).collect();
        for (i, name) in self.order.iter().enumerate() {
            let d = self.defs.get(name).ok_or_else(|| ResError::Unknown(name.clone()))?;
            for (rhs, step) in [(&d.base, false), (&d.step, true)] {
                let mut apps = Vec::new();
                rhs.symbol_apps(&mut apps);
                for app in apps {
                    let j = *index.get(&app.name).ok_or_else(|| ResError::Unknown(app.name.clone()))?;
                    if j < i || (j == i && !step) {
                        return Err(ResError::Order { from: name.clone(), to: app.name.clone() });
                    }
                }
            }
        }
        Ok(())
    }

    /// `ρ₁(γ, x̄, X̄)` with the declared parameters as arguments.
    pub fn top_application(&self, gamma: u64) -> Result<SymApp, ResError> {
        let d = self.top().ok_or_else(|| ResError::Unknown(sym("<empty>")))?;
        let terms = d
            .params
            .iter()
            .map(|p| match p {
                Param::Var(v) => Term::Var(v.clone()),
                Param::V2(x) => Term::V2(x.clone()),
            })
            .collect();
        let mut app = SymApp::new(d.name.clone(), Term::numeral(gamma), terms);
        app.clauses = d.clause_params.iter().map(|x| ClauseExpr::Var(x.clone())).collect();
        Ok(app)
    }
}

fn expand(t: &ResTerm, rs: &ResolutionSchema, table: &SymbolTable, budget: &mut usize) -> Result<ResTerm, ResError> {
    match t {
        ResTerm::Clause(_) => Ok(t.clone()),
        ResTerm::Res(a, b, p) => {
            Ok(ResTerm::res(expand(a, rs, table, budget)?, expand(b, rs, table, budget)?, p.clone()))
        }
        ResTerm::Symbol(app) => {
            if *budget == 0 {
                return Err(SchemaError::Depth(app.name.clone()).into());
            }
            *budget -= 1;
            let body = unfold(&rs.defs, app, table)?;
            expand(&body, rs, table, budget)
        }
    }
}

fn to_deduction(
    t: &ResTerm,
    rs: &ResolutionSchema,
    family: &SubstitutionFamily,
    table: &SymbolTable,
    path: &mut Vec<usize>,
) -> Result<Deduction, ResError> {
    match t {
        ResTerm::Clause(e) => crate::clause::eval_clause_schema(e, &rs.clauses, family, table)
            .map(Deduction::Leaf)
            .map_err(|e| ResError::Node { path: path.clone(), message: e.to_string() }),
        ResTerm::Res(a, b, p) => {
            path.push(0);
            let l = to_deduction(a, rs, family, table, path)?;
            path.pop();
            path.push(1);
            let r = to_deduction(b, rs, family, table, path)?;
            path.pop();
            let atom = family.close_formula(p, table);
            if !atom.is_atom() {
                return Err(ResError::Node { path: path.clone(), message: format!("pivot {atom} is not an atom") });
            }
            Ok(Deduction::res(l, r, atom))
        }
        ResTerm::Symbol(app) => Err(ResError::Node { path: path.clone(), message: format!("unexpanded symbol {app}") }),
    }
}

/// A resolution term, with its symbols unfolded, under `family`.
pub fn eval_res_term(
    t: &ResTerm,
    rs: &ResolutionSchema,
    family: &SubstitutionFamily,
    table: &SymbolTable,
) -> Result<Deduction, ResError> {
    let mut budget = 1_000_000;
    let t = expand(t, rs, table, &mut budget)?;
    to_deduction(&t, rs, family, table, &mut Vec::new())
}

/// `(ρ₁(γ, x̄, X̄)λθϑ)↓` as a resolution deduction with computed clauses.
pub fn eval_resolution_schema(
    rs: &ResolutionSchema,
    witness: &Witness,
    gamma: u64,
    table: &SymbolTable,
) -> Result<Deduction, ResError> {
    rs.check_order()?;
    let app = rs.top_application(gamma)?;
    let mut budget = 1_000_000;
    let t = expand(&ResTerm::Symbol(app), rs, table, &mut budget)?;
    to_deduction(&t, rs, &witness.family(gamma), table, &mut Vec::new())
}

/// How a leaf of a deduction relates to the clause set it refutes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafMatch {
    pub clause: usize,
    pub subst: FoSubst,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RefutationReport {
    pub diagnostics: Vec<String>,
    /// One entry per leaf, left to right.
    pub leaves: Vec<Option<LeafMatch>>,
    pub pseudo_steps: usize,
}

impl RefutationReport {
    pub fn is_ok(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

/// The first clause of `cs` (in order) with `Cσ = leaf` as multisets.
pub fn match_leaf(leaf: &Clause, cs: &[Clause]) -> Option<LeafMatch> {
    cs.iter().enumerate().find_map(|(i, c)| {
        (c.ant.len() == leaf.ant.len() && c.suc.len() == leaf.suc.len())
            .then(|| subsumer(c, leaf))
            .flatten()
            .map(|subst| LeafMatch { clause: i, subst })
    })
}

/// Checks that every node is the resolvent of its children, every leaf is
/// an instance of a member of `cs`, and the root is `⊢`.
pub fn check_refutation(d: &Deduction, cs: &[Clause]) -> RefutationReport {
    let mut rep = RefutationReport::default();
    fn go(d: &Deduction, cs: &[Clause], path: &mut Vec<usize>, rep: &mut RefutationReport) {
        match d {
            Deduction::Leaf(c) => {
                let m = match_leaf(c, cs);
                if m.is_none() {
                    rep.diagnostics.push(format!("leaf {path:?}: {c} is not an instance of the clause set"));
                }
                rep.leaves.push(m);
            }
            Deduction::Res { left, right, atom, clause, pseudo } => {
                path.push(0);
                go(left, cs, path, rep);
                path.pop();
                path.push(1);
                go(right, cs, path, rep);
                path.pop();
                if !atom.is_atom() {
                    rep.diagnostics.push(format!("node {path:?}: pivot {atom} is not an atom"));
                }
                let r = resolve(left.clause(), right.clause(), atom);
                if !r.clause.multiset_eq(clause) || r.pseudo != *pseudo {
                    rep.diagnostics.push(format!("node {path:?}: {clause} is not res(·, ·, {atom}) = {}", r.clause));
                }
                rep.pseudo_steps += usize::from(r.pseudo);
            }
        }
    }
    go(d, cs, &mut Vec::new(), &mut rep);
    if !d.clause().is_empty() {
        rep.diagnostics.push(format!("final clause is {}, not |-", d.clause()));
    }
    rep
}

/// `T(d)`: the resolution tree. Occurrences of the pivot are contracted to
/// one on each side (weakened in if absent), then cut.
pub fn to_tree(d: &Deduction) -> Proof {
    to_tree_with(d, &mut |c| Proof::axiom(c.clone()))
}

/// `T(d)` with leaves replaced by `leaf(clause)`; each replacement must
/// end in the leaf clause plus extra formulas, which are carried along as
/// context.
pub fn to_tree_with(d: &Deduction, leaf: &mut dyn FnMut(&Clause) -> Proof) -> Proof {
    match d {
        Deduction::Leaf(c) => leaf(c),
        Deduction::Res { left, right, atom, .. } => {
            let l = collapse(to_tree_with(left, leaf), atom, Side::Suc);
            let r = collapse(to_tree_with(right, leaf), atom, Side::Ant);
            let lo = last_occ(&l.conclusion, atom, Side::Suc).expect("pivot present after collapse");
            let ro = last_occ(&r.conclusion, atom, Side::Ant).expect("pivot present after collapse");
            Proof::binary(Rule::Cut, l, r, lo, ro).expect("cut on a shared atom")
        }
    }
}

fn last_occ(s: &Sequent, a: &Formula, side: Side) -> Option<Occ> {
    s.side(side).iter().rposition(|f| f == a).map(|index| Occ { side, index })
}

/// Contracts all occurrences of `a` on `side` to one, or weakens it in.
fn collapse(mut p: Proof, a: &Formula, side: Side) -> Proof {
    let (contract, weaken) = match side {
        Side::Ant => (Rule::CL, Rule::WL),
        Side::Suc => (Rule::CR, Rule::WR),
    };
    loop {
        let occs: Vec<Occ> = p
            .conclusion
            .side(side)
            .iter()
            .enumerate()
            .filter(|(_, f)| *f == a)
            .map(|(index, _)| Occ { side, index })
            .collect();
        match occs.len() {
            0 => return Proof::unary(weaken, p, vec![], Some(a.clone())).expect("weakening applies"),
            1 => return p,
            _ => p = Proof::unary(contract.clone(), p, vec![occs[0], occs[1]], None).expect("contraction applies"),
        }
    }
}

// ---------------------------------------------------------------------------
// Ground-instance prover.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProverLimits {
    pub max_generated: usize,
}

impl Default for ProverLimits {
    fn default() -> Self {
        ProverLimits { max_generated: 1000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProverOutcome {
    Refuted { deduction: Deduction, generated: usize },
    Saturated { generated: usize },
    ResourceOut { generated: usize },
}

#[derive(Clone, Debug)]
enum Origin {
    Input,
    /// Resolvent of renamed `a` and `b` under `mgu` on the pivot.
    Res {
        a: usize,
        ra: FoSubst,
        b: usize,
        rb: FoSubst,
        mgu: FoSubst,
        pivot: Formula,
    },
    Factor {
        a: usize,
        mgu: FoSubst,
    },
}

#[derive(Clone, Debug)]
struct Entry {
    clause: Clause,
    origin: Origin,
}

fn renaming(c: &Clause, tag: &str) -> FoSubst {
    FoSubst(clause_vars(c).into_iter().enumerate().map(|(i, k)| (k, Term::iota(&format!("_{tag}{i}")))).collect())
}

fn clause_weight(c: &Clause) -> usize {
    c.size()
}

/// Given-clause saturation with binary resolution (removing every
/// occurrence of the instantiated pivot), factoring, tautology deletion
/// and forward subsumption. Refutations are returned as deductions over
/// instances of the input clauses.
pub fn ground_refute(cs: &[Clause], limits: &ProverLimits, table: &SymbolTable) -> ProverOutcome {
    let mut entries: Vec<Entry> = Vec::new();
    let mut passive: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut active: Vec<usize> = Vec::new();
    let mut generated = 0usize;

    let add = |clause: Clause,
               origin: Origin,
               entries: &mut Vec<Entry>,
               passive: &mut BTreeSet<(usize, usize)>,
               active: &[usize]|
     -> Option<usize> {
        let clause = normalize_sequent(&clause, table);
        if is_tautology(&clause) {
            return None;
        }
        let redundant = active
            .iter()
            .chain(passive.iter().map(|(_, i)| i))
            .any(|&i| subsumer(&entries[i].clause, &clause).is_some());
        if redundant {
            return None;
        }
        let id = entries.len();
        passive.insert((clause_weight(&clause), id));
        entries.push(Entry { clause, origin });
        Some(id)
    };

    for c in cs {
        if c.is_empty() {
            return ProverOutcome::Refuted { deduction: Deduction::Leaf(c.clone()), generated };
        }
        add(c.clone(), Origin::Input, &mut entries, &mut passive, &active);
    }

    while let Some(&(w, given)) = passive.iter().next() {
        passive.remove(&(w, given));
        if active.iter().any(|&i| subsumer(&entries[i].clause, &entries[given].clause).is_some()) {
            continue;
        }
        active.push(given);
        let g = entries[given].clause.clone();
        let mut new: Vec<(Clause, Origin)> = Vec::new();
        // Factors of the given clause.
        for side in [Side::Ant, Side::Suc] {
            let lits = g.side(side);
            for i in 0..lits.len() {
                for j in i + 1..lits.len() {
                    if lits[i] == lits[j] {
                        continue;
                    }
                    if let Ok(Some(mgu)) = unify_atoms(&lits[i], &lits[j], table) {
                        new.push((
                            dedup_side(&mgu.sequent(&g), side, &mgu.formula(&lits[i])),
                            Origin::Factor { a: given, mgu },
                        ));
                    }
                }
            }
        }
        // Resolvents with every active clause, in both directions.
        for &other in &active {
            let o = entries[other].clause.clone();
            for (a, ca, b, cb) in [(given, &g, other, &o), (other, &o, given, &g)] {
                let ra = renaming(ca, "a");
                let rb = renaming(cb, "b");
                let ca2 = ra.sequent(ca);
                let cb2 = rb.sequent(cb);
                for p in &ca2.suc {
                    for q in &cb2.ant {
                        if let Ok(Some(mgu)) = unify_atoms(p, q, table) {
                            let pivot = mgu.formula(p);
                            let r = resolve(&mgu.sequent(&ca2), &mgu.sequent(&cb2), &pivot);
                            new.push((r.clause, Origin::Res { a, ra: ra.clone(), b, rb: rb.clone(), mgu, pivot }));
                        }
                    }
                }
            }
        }
        for (clause, origin) in new {
            generated += 1;
            let empty = clause.is_empty();
            let id = add(clause, origin, &mut entries, &mut passive, &active);
            if empty {
                if let Some(id) = id {
                    let deduction = rebuild(&entries, id, &[], table);
                    return ProverOutcome::Refuted { deduction, generated };
                }
            }
            if generated >= limits.max_generated {
                return ProverOutcome::ResourceOut { generated };
            }
        }
    }
    ProverOutcome::Saturated { generated }
}

fn dedup_side(c: &Clause, side: Side, lit: &Formula) -> Clause {
    let mut out = c.clone();
    let v = out.side_mut(side);
    if let Some(first) = v.iter().position(|f| f == lit) {
        let mut i = first + 1;
        let mut removed = false;
        while i < v.len() {
            if !removed && v[i] == *lit {
                v.remove(i);
                removed = true;
            } else {
                i += 1;
            }
        }
    }
    out
}

fn apply_chain(c: &Clause, chain: &[FoSubst], table: &SymbolTable) -> Clause {
    let mut c = c.clone();
    for s in chain {
        c = s.sequent(&c);
    }
    normalize_sequent(&c, table)
}

fn rebuild(entries: &[Entry], id: usize, chain: &[FoSubst], table: &SymbolTable) -> Deduction {
    match &entries[id].origin {
        Origin::Input => Deduction::Leaf(apply_chain(&entries[id].clause, chain, table)),
        Origin::Factor { a, mgu } => {
            let mut c = vec![mgu.clone()];
            c.extend_from_slice(chain);
            rebuild(entries, *a, &c, table)
        }
        Origin::Res { a, ra, b, rb, mgu, pivot } => {
            let mut ca = vec![ra.clone(), mgu.clone()];
            ca.extend_from_slice(chain);
            let mut cb = vec![rb.clone(), mgu.clone()];
            cb.extend_from_slice(chain);
            let l = rebuild(entries, *a, &ca, table);
            let r = rebuild(entries, *b, &cb, table);
            let mut p = pivot.clone();
            for s in chain {
                p = s.formula(&p);
            }
            Deduction::res(l, r, p)
        }
    }
}

/// Variables of the clauses of a deduction.
pub fn deduction_vars(d: &Deduction) -> BTreeSet<VarKey> {
    d.leaves().into_iter().flat_map(clause_vars).collect()
}
