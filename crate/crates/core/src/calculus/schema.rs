use super::{analyze, check_proof, CheckOptions, CheckReport, Diagnostic, Link, Node, Proof, Rule};
use crate::term::{
    normalize_formula, normalize_sequent, normalize_term, Formula, Occ, Sequent, Side, Sort, Sym, SymbolTable, Term,
    TermSubst, Var, PARAM_K, PARAM_N,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// One pair `(π, ν(k))` of a proof schema with its end-sequent `S(n, x̄)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaPair {
    pub symbol: Sym,
    pub params: Vec<Var>,
    pub end_sequent: Sequent,
    pub base: Proof,
    pub step: Proof,
}

impl SchemaPair {
    /// `S(arg, args)`.
    pub fn instance(&self, arg: &Term, args: &[Term]) -> Sequent {
        let mut s = TermSubst::single(PARAM_N, arg.clone());
        for (v, a) in self.params.iter().zip(args) {
            s.vars.insert(v.name.clone(), a.clone());
        }
        s.sequent(&self.end_sequent)
    }

    pub fn param_terms(&self) -> Vec<Term> {
        self.params.iter().cloned().map(Term::Var).collect()
    }
}

/// Ordered list of schema pairs; the first is the top symbol.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofSchema {
    pub pairs: Vec<SchemaPair>,
}

impl ProofSchema {
    pub fn pair(&self, name: &str) -> Option<&SchemaPair> {
        self.pairs.iter().find(|p| &*p.symbol == name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.pairs.iter().position(|p| &*p.symbol == name)
    }

    pub fn top(&self) -> &SchemaPair {
        &self.pairs[0]
    }

    /// `S₁(γ, x̄)` normalized.
    pub fn end_sequent_at(&self, gamma: u64, table: &SymbolTable) -> Sequent {
        let top = self.top();
        normalize_sequent(&top.instance(&Term::numeral(gamma), &top.param_terms()), table)
    }
}

/// A set of end-sequent occurrences of a schema pair, keyed by side and
/// normalized formula of the declared end-sequent `S(n, x̄)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Configuration(pub Vec<(Side, Formula)>);

impl Configuration {
    pub fn empty() -> Configuration {
        Configuration(Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn from_positions(declared: &Sequent, occs: &[Occ], table: &SymbolTable) -> Configuration {
        let mut v: Vec<(Side, Formula)> =
            occs.iter().filter_map(|o| declared.get(*o).map(|f| (o.side, normalize_formula(f, table)))).collect();
        v.sort();
        Configuration(v)
    }

    /// Positions in the declared end-sequent, first free match per entry.
    pub fn positions(&self, declared: &Sequent, table: &SymbolTable) -> Result<Vec<Occ>, String> {
        let mut used: BTreeSet<Occ> = BTreeSet::new();
        let mut out = Vec::new();
        for (side, f) in &self.0 {
            let hit = declared
                .side(*side)
                .iter()
                .enumerate()
                .map(|(i, g)| (Occ { side: *side, index: i }, g))
                .find(|(o, g)| !used.contains(o) && normalize_formula(g, table).alpha_eq(f));
            match hit {
                Some((o, _)) => {
                    used.insert(o);
                    out.push(o);
                }
                None => return Err(format!("configuration formula {f} not in {declared}")),
            }
        }
        out.sort();
        Ok(out)
    }

    /// Short stable key, used in symbol names.
    pub fn key(&self) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(s, f)| match s {
                Side::Ant => format!("{f} |-"),
                Side::Suc => format!("|- {f}"),
            })
            .collect();
        format!("{{{}}}", parts.join("; "))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Maps each occurrence of `expected` (antecedent first) to an occurrence
/// of `actual` holding the same formula modulo normalization.
pub fn identify(expected: &Sequent, actual: &Sequent, table: &SymbolTable) -> Option<Vec<Occ>> {
    if expected.ant.len() != actual.ant.len() || expected.suc.len() != actual.suc.len() {
        return None;
    }
    let e = normalize_sequent(expected, table);
    let a = normalize_sequent(actual, table);
    let mut out = Vec::with_capacity(e.len());
    for side in [Side::Ant, Side::Suc] {
        let es = e.side(side);
        let as_ = a.side(side);
        if es.iter().zip(as_).all(|(x, y)| x.alpha_eq(y)) {
            out.extend((0..es.len()).map(|i| Occ { side, index: i }));
            continue;
        }
        let mut used = vec![false; as_.len()];
        for f in es {
            let j = (0..as_.len()).find(|&j| !used[j] && as_[j].alpha_eq(f))?;
            used[j] = true;
            out.push(Occ { side, index: j });
        }
    }
    Some(out)
}

fn omega_vars(t: &Term) -> BTreeSet<Sym> {
    t.vars().into_iter().filter(|v| v.sort == Sort::Omega).map(|v| v.name).collect()
}

/// Well-formedness: proofs check, end-sequents match, links respect the
/// schema order.
pub fn check_schema(schema: &ProofSchema, table: &SymbolTable) -> CheckReport {
    let mut report = CheckReport::default();
    if schema.pairs.is_empty() {
        report.diagnostics.push(Diagnostic { path: vec![], message: "no schema declared".into() });
        return report;
    }
    let k = Term::omega(PARAM_K);
    for (beta, pair) in schema.pairs.iter().enumerate() {
        for (which, proof, arg) in [("base", &pair.base, Term::zero()), ("step", &pair.step, Term::succ(k.clone()))] {
            let mut sub = check_proof(proof, table, Some(schema), CheckOptions::schematic());
            let label = format!("{} {which}", pair.symbol);
            for d in &mut sub.diagnostics {
                d.message = format!("{label}: {}", d.message);
            }
            report.inferences += sub.inferences;
            report.cuts += sub.cuts;
            report.diagnostics.append(&mut sub.diagnostics);
            let mut diag =
                |m: String| report.diagnostics.push(Diagnostic { path: vec![], message: format!("{label}: {m}") });
            let expected = pair.instance(&arg, &pair.param_terms());
            if identify(&expected, &proof.conclusion, table).is_none() {
                diag(format!("end-sequent {} does not match {}", proof.conclusion, expected));
            }
            for l in proof.links() {
                let Some(target) = schema.index_of(&l.target) else {
                    diag(format!("link to undeclared proof symbol {}", l.target));
                    continue;
                };
                let vars = omega_vars(&l.arg);
                if which == "base" {
                    if target <= beta {
                        diag(format!("base proof links to {}, which is not later in the schema", l.target));
                    }
                    if !vars.is_empty() {
                        diag(format!("base proof link argument {} is not ground", l.arg));
                    }
                } else if target < beta {
                    diag(format!("step proof links to earlier symbol {}", l.target));
                } else if target == beta {
                    if normalize_term(&l.arg, table) != k {
                        diag(format!("self link must have argument k, found {}", l.arg));
                    }
                } else if vars.iter().any(|v| &**v != PARAM_K) {
                    diag(format!("link argument {} mentions variables other than k", l.arg));
                }
            }
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unknown proof symbol `{0}`")]
    UnknownSymbol(Sym),
    #[error("link argument `{0}` does not evaluate to a numeral")]
    NotNumeral(String),
    #[error("proof of {symbol}({arg}) ends in {found}, expected {expected}")]
    EndSequent { symbol: Sym, arg: u64, found: String, expected: String },
    #[error("evaluation does not terminate (depth limit reached at {0})")]
    Depth(Sym),
}

fn normalize_proof(p: &Proof, table: &SymbolTable) -> Proof {
    let q = p.map(&mut |f| normalize_formula(f, table), &mut |t| normalize_term(t, table));
    drop_trivial_e(q)
}

fn drop_trivial_e(p: Proof) -> Proof {
    match p.node {
        Node::Inference(inf) => {
            let mut inf = *inf;
            inf.premises = inf.premises.into_iter().map(drop_trivial_e).collect();
            if inf.rule == Rule::E && inf.premises[0].conclusion == p.conclusion {
                return inf.premises.pop().expect("E is unary");
            }
            Proof { conclusion: p.conclusion, node: Node::Inference(Box::new(inf)) }
        }
        node => Proof { conclusion: p.conclusion, node },
    }
}

fn eval_symbol(
    schema: &ProofSchema,
    table: &SymbolTable,
    symbol: &Sym,
    m: u64,
    args: &[Term],
    depth: usize,
) -> Result<Proof, EvalError> {
    if depth > 10_000 {
        return Err(EvalError::Depth(symbol.clone()));
    }
    let pair = schema.pair(symbol).ok_or_else(|| EvalError::UnknownSymbol(symbol.clone()))?;
    let mut s = TermSubst::new();
    for (v, a) in pair.params.iter().zip(args) {
        s.vars.insert(v.name.clone(), a.clone());
    }
    let raw = if m == 0 {
        pair.base.subst(&s)
    } else {
        s.vars.insert(crate::term::sym(PARAM_K), Term::numeral(m - 1));
        pair.step.subst(&s)
    };
    let normal = normalize_proof(&raw, table);
    normal.replace_links(&mut |l: &Link, concl: &Sequent| {
        let arg = normalize_term(&l.arg, table);
        let Some(num) = arg.as_numeral() else {
            return Err(EvalError::NotNumeral(arg.to_string()));
        };
        let args: Vec<Term> = l.args.iter().map(|a| normalize_term(a, table)).collect();
        let sub = eval_symbol(schema, table, &l.target, num, &args, depth + 1)?;
        if !sub.conclusion.multiset_eq(concl) {
            return Err(EvalError::EndSequent {
                symbol: l.target.clone(),
                arg: num,
                found: sub.conclusion.to_string(),
                expected: concl.to_string(),
            });
        }
        Ok(sub.with_conclusion(concl.clone()))
    })
}

/// `Ψ↓γ`: unfolds all links from the top symbol at `gamma` and normalizes.
/// The root is stated in the declared order of `S₁(γ)`.
pub fn evaluate_schema(schema: &ProofSchema, table: &SymbolTable, gamma: u64) -> Result<Proof, EvalError> {
    let top = schema.pairs.first().ok_or_else(|| EvalError::UnknownSymbol(crate::term::sym("<empty>")))?;
    let p = eval_symbol(schema, table, &top.symbol, gamma, &top.param_terms(), 0)?;
    let expected = schema.end_sequent_at(gamma, table);
    if !p.conclusion.multiset_eq(&expected) {
        return Err(EvalError::EndSequent {
            symbol: top.symbol.clone(),
            arg: gamma,
            found: p.conclusion.to_string(),
            expected: expected.to_string(),
        });
    }
    Ok(p.with_conclusion(expected))
}

fn eigenvariables(p: &Proof, table: &SymbolTable) -> Vec<Term> {
    let mut out = Vec::new();
    p.visit(&mut |q| {
        if q.rule().is_some_and(Rule::is_eigen) {
            if let Ok(a) = analyze(q, table) {
                out.extend(a.eigen);
            }
        }
    });
    out
}

/// All eigenvariables pairwise distinct.
pub fn is_regular(p: &Proof, table: &SymbolTable) -> bool {
    let vs = eigenvariables(p, table);
    let set: BTreeSet<&Term> = vs.iter().collect();
    set.len() == vs.len()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegularizeError {
    #[error("eigenvariable `{0}` clashes with a declared symbol")]
    Clash(Sym),
}

/// Replaces eigenvariables by indexed variables: `x ↦ x(0)` in base
/// proofs and for global eigenvariables, `x ↦ x(k+1)` for local ones in
/// step proofs. A variable is global when it occurs free in the
/// end-sequent of a link leaf.
pub fn regularize(schema: &ProofSchema, table: &SymbolTable) -> Result<(ProofSchema, SymbolTable), RegularizeError> {
    let mut table = table.clone();
    let mut pairs = Vec::with_capacity(schema.pairs.len());
    for pair in &schema.pairs {
        let mut new_pair = pair.clone();
        for (is_step, proof) in [(false, &pair.base), (true, &pair.step)] {
            let mut linked: BTreeSet<Var> = BTreeSet::new();
            proof.visit(&mut |q| {
                if let Node::Link(_) = q.node {
                    linked.extend(q.conclusion.free_vars());
                }
            });
            let mut s = TermSubst::new();
            for e in eigenvariables(proof, &table) {
                let Term::Var(v) = e else { continue };
                if s.vars.contains_key(&v.name) {
                    continue;
                }
                if !table.is_v2(&v.name) && !table.declare_v2(&v.name) {
                    return Err(RegularizeError::Clash(v.name.clone()));
                }
                let index =
                    if is_step && !linked.contains(&v) { Term::succ(Term::omega(PARAM_K)) } else { Term::zero() };
                s.vars.insert(v.name.clone(), Term::Idx(v.name.clone(), Box::new(index)));
            }
            let out = proof.subst(&s);
            if is_step {
                new_pair.step = out;
            } else {
                new_pair.base = out;
            }
        }
        pairs.push(new_pair);
    }
    Ok((ProofSchema { pairs }, table))
}
