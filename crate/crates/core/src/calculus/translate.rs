use super::{Aux, IndData, Inference, Node, Proof, ProofSchema, Rule, SchemaPair};
use crate::term::{
    normalize_formula, normalize_term, sym, Formula, Occ, Sequent, Side, Sort, Sym, SymbolTable, Term, TermSubst, Var,
    PARAM_K, PARAM_N,
};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("the schema has no pairs")]
    EmptySchema,
    #[error("`{0}` has an empty end-sequent")]
    EmptySequent(Sym),
    #[error("unknown proof symbol `{0}`")]
    UnknownSymbol(Sym),
    #[error("proof links through `{0}` are cyclic")]
    Cycle(Sym),
    #[error("self link of `{symbol}` has argument {arg}, expected k")]
    SelfLink { symbol: Sym, arg: String },
    #[error("{found} does not match {expected}")]
    Mismatch { found: String, expected: String },
    #[error("`{0}` occurs free in an end-sequent")]
    Reserved(&'static str),
    #[error("induction at {path:?} is not k-simple: {reason}")]
    NotKSimple { path: Vec<usize>, reason: String },
    #[error("{0}")]
    Build(String),
}

type Result<T> = std::result::Result<T, TranslateError>;

fn build<T>(r: std::result::Result<T, String>) -> Result<T> {
    r.map_err(TranslateError::Build)
}

fn same_nf(a: &Formula, b: &Formula, table: &SymbolTable) -> bool {
    a == b || normalize_formula(a, table).alpha_eq(&normalize_formula(b, table))
}

/// Brings the conclusion of `p` to `target`: E steps where formulas differ
/// syntactically, then a reordering.
fn conform(mut p: Proof, target: &Sequent, table: &SymbolTable) -> Result<Proof> {
    if p.conclusion == *target {
        return Ok(p);
    }
    let mismatch =
        |p: &Proof| TranslateError::Mismatch { found: p.conclusion.to_string(), expected: target.to_string() };
    if p.conclusion.ant.len() != target.ant.len() || p.conclusion.suc.len() != target.suc.len() {
        return Err(mismatch(&p));
    }
    for side in [Side::Ant, Side::Suc] {
        let have = p.conclusion.side(side).clone();
        let mut used = vec![false; have.len()];
        for f in target.side(side) {
            let j = (0..have.len())
                .find(|&j| !used[j] && have[j] == *f)
                .or_else(|| (0..have.len()).find(|&j| !used[j] && same_nf(&have[j], f, table)))
                .ok_or_else(|| mismatch(&p))?;
            used[j] = true;
            if have[j] != *f {
                p = build(Proof::unary(Rule::E, p, vec![Occ { side, index: j }], Some(f.clone())))?;
            }
        }
    }
    Ok(p.with_conclusion(target.clone()))
}

fn conj(fs: &[Formula]) -> Option<Formula> {
    fs.iter().rev().cloned().reduce(|acc, f| Formula::and(f, acc))
}

fn disj(fs: &[Formula]) -> Option<Formula> {
    fs.iter().rev().cloned().reduce(|acc, f| Formula::or(f, acc))
}

/// `⋀Γ ⊃ ⋁Δ`, `⋁Δ` or `¬⋀Γ`.
fn sequent_body(s: &Sequent) -> Option<Formula> {
    match (conj(&s.ant), disj(&s.suc)) {
        (Some(a), Some(b)) => Some(Formula::imp(a, b)),
        (None, Some(b)) => Some(b),
        (Some(a), None) => Some(Formula::not(a)),
        (None, None) => None,
    }
}

/// `Γ ⊢ ⋀Γ`.
fn conj_intro(fs: &[Formula]) -> Result<Proof> {
    let (last, init) = fs.split_last().expect("non-empty");
    let mut p = Proof::expanded_identity(last);
    for f in init.iter().rev() {
        p = build(Proof::binary(Rule::AndR, Proof::expanded_identity(f), p, Occ::suc(0), Occ::suc(0)))?;
    }
    Ok(p)
}

/// `⋁Δ ⊢ Δ`.
fn disj_elim(fs: &[Formula]) -> Result<Proof> {
    let (last, init) = fs.split_last().expect("non-empty");
    let mut p = Proof::expanded_identity(last);
    for f in init.iter().rev() {
        p = build(Proof::binary(Rule::OrL, Proof::expanded_identity(f), p, Occ::ant(0), Occ::ant(0)))?;
    }
    Ok(p)
}

/// `F, Γ ⊢ Δ` where `F = ∀x̄.body` and `Γ ⊢ Δ` is the body's sequent at `args`.
fn unpack(f: &Formula, args: &[Term], inst: &Sequent) -> Result<Proof> {
    let mut p = match (inst.ant.is_empty(), inst.suc.is_empty()) {
        (false, false) => {
            build(Proof::binary(Rule::ImpL, conj_intro(&inst.ant)?, disj_elim(&inst.suc)?, Occ::suc(0), Occ::ant(0)))?
        }
        (true, false) => disj_elim(&inst.suc)?,
        (false, true) => build(Proof::unary(Rule::NotL, conj_intro(&inst.ant)?, vec![Occ::suc(0)], None))?,
        (true, true) => return Err(TranslateError::Mismatch { found: inst.to_string(), expected: f.to_string() }),
    };
    let mut chain = vec![f.clone()];
    for a in args {
        let Formula::Forall(v, body) = chain.last().expect("non-empty") else {
            return Err(TranslateError::Mismatch { found: f.to_string(), expected: "a universal formula".into() });
        };
        let next = TermSubst::single(&v.name, a.clone()).formula(body);
        chain.push(next);
    }
    chain.pop();
    for main in chain.into_iter().rev() {
        p = build(Proof::unary(Rule::AllL, p, vec![Occ::ant(0)], Some(main)))?;
    }
    Ok(p)
}

/// From `Γ, E ⊢ Δ` with `|Γ| = n_ant` to `E ⊢ ∀x̄(⋀Γ ⊃ ⋁Δ)`.
fn pack(mut p: Proof, n_ant: usize, quant: &[Var]) -> Result<Proof> {
    let extra: Vec<Formula> = p.conclusion.ant[n_ant..].to_vec();
    let mut gamma: Vec<Formula> = p.conclusion.ant[..n_ant].to_vec();
    let mut delta: Vec<Formula> = p.conclusion.suc.clone();
    while gamma.len() > 1 {
        let i = gamma.len() - 2;
        let ab = Formula::and(gamma[i].clone(), gamma[i + 1].clone());
        p = build(Proof::unary(Rule::AndL1, p, vec![Occ::ant(i)], Some(ab.clone())))?;
        p = build(Proof::unary(Rule::AndL2, p, vec![Occ::ant(i + 1)], Some(ab.clone())))?;
        p = build(Proof::unary(Rule::CL, p, vec![Occ::ant(0), Occ::ant(1)], None))?;
        gamma.truncate(i);
        gamma.push(ab);
        let ant = gamma.iter().chain(&extra).cloned().collect();
        p = p.with_conclusion(Sequent::new(ant, delta.clone()));
    }
    while delta.len() > 1 {
        let i = delta.len() - 2;
        let ab = Formula::or(delta[i].clone(), delta[i + 1].clone());
        p = build(Proof::unary(Rule::OrR1, p, vec![Occ::suc(i)], Some(ab.clone())))?;
        p = build(Proof::unary(Rule::OrR2, p, vec![Occ::suc(i)], Some(ab.clone())))?;
        p = build(Proof::unary(Rule::CR, p, vec![Occ::suc(i), Occ::suc(i + 1)], None))?;
        delta.truncate(i);
        delta.push(ab);
    }
    p = match (gamma.len(), delta.len()) {
        (1, 1) => build(Proof::unary(Rule::ImpR, p, vec![Occ::ant(0), Occ::suc(0)], None))?,
        (0, 1) => p,
        (1, 0) => build(Proof::unary(Rule::NotR, p, vec![Occ::ant(0)], None))?,
        _ => {
            return Err(TranslateError::Mismatch {
                found: p.conclusion.to_string(),
                expected: "a packable sequent".into(),
            })
        }
    };
    for v in quant.iter().rev() {
        let main = Formula::forall(v.clone(), p.conclusion.suc[0].clone());
        p = build(Proof::unary(Rule::AllR, p, vec![Occ::suc(0)], Some(main)))?;
    }
    Ok(p)
}

fn k_var() -> Var {
    Var::omega(PARAM_K)
}

/// The invariant `∀x̄ S(n, x̄)` of a pair: parameters first, then any other
/// free variable of the end-sequent.
struct Shape {
    quant: Vec<Var>,
    formula: Formula,
}

impl Shape {
    fn at(&self, t: &Term) -> Formula {
        TermSubst::single(PARAM_N, t.clone()).formula(&self.formula)
    }
}

struct Extra {
    target: usize,
    arg: Term,
}

struct ToLki<'a> {
    schema: &'a ProofSchema,
    table: &'a SymbolTable,
    shapes: Vec<Shape>,
    base: Vec<Option<Proof>>,
    step: Vec<Option<Proof>>,
    busy: Vec<bool>,
}

impl<'a> ToLki<'a> {
    fn new(schema: &'a ProofSchema, table: &'a SymbolTable) -> Result<Self> {
        if schema.pairs.is_empty() {
            return Err(TranslateError::EmptySchema);
        }
        let mut shapes = Vec::new();
        for pair in &schema.pairs {
            let free = pair.end_sequent.free_vars();
            if free.iter().any(|v| &*v.name == PARAM_K) {
                return Err(TranslateError::Reserved(PARAM_K));
            }
            let mut quant = pair.params.clone();
            quant.extend(free.into_iter().filter(|v| &*v.name != PARAM_N && !pair.params.contains(v)));
            let body =
                sequent_body(&pair.end_sequent).ok_or_else(|| TranslateError::EmptySequent(pair.symbol.clone()))?;
            let formula = quant.iter().rev().fold(body, |acc, v| Formula::forall(v.clone(), acc));
            shapes.push(Shape { quant, formula });
        }
        let n = schema.pairs.len();
        Ok(ToLki { schema, table, shapes, base: vec![None; n], step: vec![None; n], busy: vec![false; n] })
    }

    fn index(&self, name: &Sym) -> Result<usize> {
        self.schema.index_of(name).ok_or_else(|| TranslateError::UnknownSymbol(name.clone()))
    }

    /// Arguments for the quantifier prefix of pair `m` given link arguments.
    fn quant_args(&self, m: usize, args: &[Term]) -> Vec<Term> {
        let pair = &self.schema.pairs[m];
        let mut out: Vec<Term> = args.iter().take(pair.params.len()).cloned().collect();
        out.extend(self.shapes[m].quant[out.len()..].iter().cloned().map(Term::Var));
        out
    }

    /// Replaces every link by the canonical proof of `F, S ⊢`, appending `F`
    /// to the antecedent of every sequent below it.
    fn lift(&self, j: usize, p: &Proof, extras: &mut Vec<Extra>) -> Result<Proof> {
        match &p.node {
            Node::Axiom => Ok(p.clone()),
            Node::Link(l) => {
                let m = self.index(&l.target)?;
                let arg = if m == j {
                    if normalize_term(&l.arg, self.table) != Term::k() {
                        return Err(TranslateError::SelfLink { symbol: l.target.clone(), arg: l.arg.to_string() });
                    }
                    Term::k()
                } else {
                    l.arg.clone()
                };
                let f = self.shapes[m].at(&arg);
                let inst = self.schema.pairs[m].instance(&arg, &l.args);
                let u = unpack(&f, &self.quant_args(m, &l.args), &inst)?;
                let mut target = p.conclusion.clone();
                target.ant.push(f);
                let u = conform(u, &target, self.table)?;
                extras.push(Extra { target: m, arg });
                Ok(u)
            }
            Node::Inference(inf) => {
                let mut premises = Vec::new();
                let before = extras.len();
                for q in &inf.premises {
                    premises.push(self.lift(j, q, extras)?);
                }
                let mut conclusion = p.conclusion.clone();
                conclusion.ant.extend(extras[before..].iter().map(|e| self.shapes[e.target].at(&e.arg)));
                Ok(Proof {
                    conclusion,
                    node: Node::Inference(Box::new(Inference {
                        rule: inf.rule.clone(),
                        aux: inf.aux.clone(),
                        premises,
                    })),
                })
            }
        }
    }

    /// `⊢ F_j(0)` from the base, or `F_j(k) ⊢ F_j(k+1)` from the step.
    fn translate_pair(&mut self, j: usize, step: bool) -> Result<Proof> {
        let pair = &self.schema.pairs[j];
        let (proof, at) = if step { (&pair.step, Term::succ(Term::k())) } else { (&pair.base, Term::zero()) };
        let mut extras = Vec::new();
        let mut p = self.lift(j, proof, &mut extras)?;
        let n_stated = proof.conclusion.ant.len();
        let own = self.shapes[j].at(&Term::k());
        let mut kept = 0;
        for e in extras {
            if e.target == j {
                kept += 1;
                continue;
            }
            let lam = self.lambda(e.target, &e.arg)?;
            p = build(Proof::binary(Rule::Cut, lam, p, Occ::suc(0), Occ::ant(n_stated + kept)))?;
        }
        let stated = &self.schema.pairs[j].step.conclusion;
        let stated = if step { stated } else { &self.schema.pairs[j].base.conclusion };
        let layout = |copies: usize| {
            let mut s = stated.clone();
            s.ant.extend(std::iter::repeat_n(own.clone(), copies));
            s
        };
        if step {
            if kept == 0 {
                p = Proof::weaken_l(p, own.clone()).with_conclusion(layout(1));
            }
            while kept > 1 {
                let i = n_stated;
                p = build(Proof::unary(Rule::CL, p, vec![Occ::ant(i), Occ::ant(i + 1)], None))?;
                kept -= 1;
                p = p.with_conclusion(layout(kept));
            }
        }
        let pair = &self.schema.pairs[j];
        let mut target = pair.instance(&at, &pair.param_terms());
        let n_ant = target.ant.len();
        if step {
            target.ant.push(own);
        }
        let p = conform(p, &target, self.table)?;
        pack(p, n_ant, &self.shapes[j].quant)
    }

    fn pair_proof(&mut self, j: usize, step: bool) -> Result<Proof> {
        let cached = if step { &self.step[j] } else { &self.base[j] };
        if let Some(p) = cached {
            return Ok(p.clone());
        }
        if self.busy[j] {
            return Err(TranslateError::Cycle(self.schema.pairs[j].symbol.clone()));
        }
        self.busy[j] = true;
        let r = self.translate_pair(j, step);
        self.busy[j] = false;
        let p = r?;
        if step {
            self.step[j] = Some(p.clone());
        } else {
            self.base[j] = Some(p.clone());
        }
        Ok(p)
    }

    /// `⊢ F_j(t)`: the base cut against induction over the step.
    fn lambda(&mut self, j: usize, t: &Term) -> Result<Proof> {
        let base = self.pair_proof(j, false)?;
        let step = self.pair_proof(j, true)?;
        let d = IndData { var: k_var(), formula: self.shapes[j].at(&Term::k()), term: t.clone() };
        let ind = build(Proof::unary(Rule::Ind(d), step, vec![Occ::ant(0), Occ::suc(0)], None))?;
        build(Proof::binary(Rule::Cut, base, ind, Occ::suc(0), Occ::ant(0)))
    }
}

/// A `k`-simple induction proof of `S₁(k)`: every pair becomes an
/// induction over `∀x̄ S(k, x̄)` whose step discharges links by cuts.
pub fn schema_to_lki(schema: &ProofSchema, table: &SymbolTable) -> Result<Proof> {
    let mut t = ToLki::new(schema, table)?;
    let lam = t.lambda(0, &Term::k())?;
    let top = schema.top();
    let inst = top.instance(&Term::k(), &top.param_terms());
    let u = unpack(&t.shapes[0].at(&Term::k()), &t.quant_args(0, &top.param_terms()), &inst)?;
    let p = build(Proof::binary(Rule::Cut, lam, u, Occ::suc(0), Occ::ant(0)))?;
    Ok(p.with_conclusion(inst))
}

fn check_k_simple(rule: &Rule, path: &[usize]) -> Result<()> {
    if let Some(d) = rule.ind_data() {
        let bad = |reason: String| TranslateError::NotKSimple { path: path.to_vec(), reason };
        if &*d.var.name != PARAM_K || d.var.sort != Sort::Omega {
            return Err(bad(format!("induction variable is {}", d.var.name)));
        }
        if let Some(v) = d.term.vars().into_iter().find(|v| v != &k_var()) {
            return Err(bad(format!("target {} mentions {}", d.term, v.name)));
        }
    }
    Ok(())
}

fn without(s: &Sequent, o: Occ) -> Sequent {
    let mut s = s.clone();
    s.side_mut(o.side).remove(o.index);
    s
}

fn aux_at(inf: &Inference, premise: usize, side: Side) -> Occ {
    inf.aux.iter().find(|a| a.premise == premise && a.occ.side == side).expect("checked shape").occ
}

/// Weakens in `s` and returns the shift of antecedent positions.
fn weaken_around(p: Proof, s: &Sequent) -> (Proof, usize) {
    (Proof::weaken_by(p, s), s.ant.len())
}

/// `ind` as `ind'`: cut-into-induction pairs fuse, other inductions get an
/// identity base.
fn to_prime(p: &Proof, table: &SymbolTable, path: &mut Vec<usize>) -> Result<Proof> {
    let Node::Inference(inf) = &p.node else {
        return Ok(p.clone());
    };
    check_k_simple(&inf.rule, path)?;
    let mut premises = Vec::new();
    for (i, q) in inf.premises.iter().enumerate() {
        path.push(i);
        premises.push(to_prime(q, table, path)?);
        path.pop();
    }
    let kv = k_var();
    if inf.rule == Rule::Cut {
        if let (Some(Rule::Ind(d)), Node::Inference(ind)) = (inf.premises[1].rule(), &inf.premises[1].node) {
            let o1 = aux_at(inf, 1, Side::Ant);
            let cut_on_base =
                inf.premises[1].conclusion.get(o1).is_some_and(|f| same_nf(f, &d.at(Term::zero()), table));
            let o0 = aux_at(inf, 0, Side::Suc);
            let ctx0 = without(&premises[0].conclusion, o0);
            if cut_on_base && !ctx0.free_vars().contains(&kv) {
                let sigma = to_prime(&ind.premises[0], table, &mut path.clone())?;
                let a = aux_at(ind, 0, Side::Ant);
                let b = aux_at(ind, 0, Side::Suc);
                let ctx1 = without(&without(&sigma.conclusion, b), a);
                let (left, _) = weaken_around(premises[0].clone(), &ctx1);
                let (right, shift) = weaken_around(sigma, &ctx0);
                let aux = vec![Aux::new(0, o0), Aux::new(1, Occ::ant(a.index + shift)), Aux::new(1, b)];
                let q = build(Proof::infer(Rule::IndPrime(d.clone()), vec![left, right], aux, None))?;
                return Ok(q.with_conclusion(p.conclusion.clone()));
            }
        }
    }
    if let Rule::Ind(d) = &inf.rule {
        let sigma = premises.pop().expect("unary");
        let a = aux_at(inf, 0, Side::Ant);
        let b = aux_at(inf, 0, Side::Suc);
        let ctx = without(&without(&sigma.conclusion, b), a);
        let left = Proof::weaken_by(Proof::expanded_identity(&d.at(Term::zero())), &ctx);
        let right = Proof::weaken_l(sigma, d.at(Term::zero()));
        let aux = vec![Aux::new(0, Occ::suc(0)), Aux::new(1, Occ::ant(a.index + 1)), Aux::new(1, b)];
        let q = build(Proof::infer(Rule::IndPrime(d.clone()), vec![left, right], aux, None))?;
        return Ok(q.with_conclusion(p.conclusion.clone()));
    }
    Ok(Proof {
        conclusion: p.conclusion.clone(),
        node: Node::Inference(Box::new(Inference { rule: inf.rule.clone(), aux: inf.aux.clone(), premises })),
    })
}

fn params_of(s: &Sequent) -> Vec<Var> {
    s.free_vars().into_iter().filter(|v| &*v.name != PARAM_N).collect()
}

struct FromLki<'a> {
    table: &'a SymbolTable,
    pairs: Vec<Option<SchemaPair>>,
}

impl FromLki<'_> {
    fn reserve(&mut self) -> (usize, Sym) {
        let i = self.pairs.len();
        self.pairs.push(None);
        (i, sym(&format!("psi{i}")))
    }

    /// `T`: inductions replaced by links to their pairs.
    fn links(&mut self, p: &Proof) -> Result<Proof> {
        match &p.node {
            Node::Inference(inf) if matches!(inf.rule, Rule::IndPrime(_)) => {
                let d = inf.rule.ind_data().expect("induction").clone();
                let i = self.induction_pair(p, None)?;
                let pair = self.pairs[i].as_ref().expect("built");
                Ok(Proof::link(pair.symbol.clone(), d.term, pair.param_terms(), p.conclusion.clone()))
            }
            Node::Inference(inf) => {
                let premises = inf.premises.iter().map(|q| self.links(q)).collect::<Result<Vec<_>>>()?;
                Ok(Proof {
                    conclusion: p.conclusion.clone(),
                    node: Node::Inference(Box::new(Inference {
                        rule: inf.rule.clone(),
                        aux: inf.aux.clone(),
                        premises,
                    })),
                })
            }
            _ => Ok(p.clone()),
        }
    }

    /// The pair `(T(λ₁), ψ(k) cut T(λ₂))` of an `ind'` inference.
    fn induction_pair(&mut self, p: &Proof, slot: Option<(usize, Sym)>) -> Result<usize> {
        let (i, name) = slot.unwrap_or_else(|| self.reserve());
        let inf = p.inference().expect("induction");
        let d = inf.rule.ind_data().expect("induction").clone();
        let (l0, r_a, r_b) = (aux_at(inf, 0, Side::Suc), aux_at(inf, 1, Side::Ant), aux_at(inf, 1, Side::Suc));
        let ctx = without(&inf.premises[0].conclusion, l0);
        let with_last = |f: Formula| {
            let mut s = ctx.clone();
            s.suc.push(f);
            s
        };
        let end = with_last(d.at(Term::n()));
        let params = params_of(&end);
        let args: Vec<Term> = params.iter().cloned().map(Term::Var).collect();

        let base = self.links(&inf.premises[0])?;
        let base =
            conform(base, &with_last(d.at(Term::zero())), self.table)?.subst(&TermSubst::single(PARAM_K, Term::zero()));

        let (ak, ak1) = (d.at(Term::k()), d.at(Term::succ(Term::k())));
        let mut right = self.links(&inf.premises[1])?;
        if right.conclusion.get(r_a) != Some(&ak) {
            right = build(Proof::unary(Rule::E, right, vec![r_a], Some(ak.clone())))?;
        }
        if right.conclusion.get(r_b) != Some(&ak1) {
            right = build(Proof::unary(Rule::E, right, vec![r_b], Some(ak1.clone())))?;
        }
        let link = Proof::link(name.clone(), Term::k(), args, with_last(ak));
        let cut = build(Proof::binary(Rule::Cut, link, right, Occ::suc(ctx.suc.len()), r_a))?;
        let target = with_last(ak1);
        let step = conform(build(cut.contract_towards(&target))?, &target, self.table)?;
        self.pairs[i] = Some(SchemaPair { symbol: name, params, end_sequent: end, base, step });
        Ok(i)
    }
}

/// One pair per induction inference of a `k`-simple proof of `S(k)`,
/// outermost first. Unless the root is itself an induction up to `k`, the
/// first pair proves `S(n)` from links to the others.
pub fn lki_to_schema(p: &Proof, table: &SymbolTable) -> Result<ProofSchema> {
    let p = to_prime(p, table, &mut Vec::new())?;
    if p.conclusion.free_vars().iter().any(|v| &*v.name == PARAM_N) {
        return Err(TranslateError::Reserved(PARAM_N));
    }
    let mut b = FromLki { table, pairs: Vec::new() };
    if matches!(p.rule(), Some(Rule::IndPrime(d)) if d.term == Term::k()) {
        let slot = b.reserve();
        b.induction_pair(&p, Some(slot))?;
    } else {
        let (_, name) = b.reserve();
        let body = b.links(&p)?;
        let end = TermSubst::single(PARAM_K, Term::n()).sequent(&p.conclusion);
        let base = body.subst(&TermSubst::single(PARAM_K, Term::zero()));
        let step = body.subst(&TermSubst::single(PARAM_K, Term::succ(Term::k())));
        b.pairs[0] = Some(SchemaPair { symbol: name, params: params_of(&end), end_sequent: end, base, step });
    }
    Ok(ProofSchema { pairs: b.pairs.into_iter().map(|x| x.expect("every reserved pair is built")).collect() })
}
