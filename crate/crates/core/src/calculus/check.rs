use super::{Aux, Inference, Node, Proof, ProofSchema, Rule};
use crate::term::{
    normalize_formula, normalize_sequent, Formula, Occ, Sequent, Side, Sort, Sym, SymbolTable, Term, TermSubst, Var,
    PARAM_K, PARAM_N,
};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Which initial sequents are accepted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxiomPolicy {
    /// `A ⊢ A` with `A` atomic.
    AtomicIdentity,
    /// `A ⊢ A` for any formula.
    Identity,
    /// Any sequent of atoms; used for proofs from clauses.
    Atomic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutGrade {
    Any,
    AtomicOnly,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    pub links: bool,
    pub induction: bool,
    pub cuts: CutGrade,
    pub axioms: AxiomPolicy,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { links: false, induction: false, cuts: CutGrade::Any, axioms: AxiomPolicy::AtomicIdentity }
    }
}

impl CheckOptions {
    pub fn schematic() -> Self {
        CheckOptions { links: true, ..Default::default() }
    }
    pub fn cut_free() -> Self {
        CheckOptions { cuts: CutGrade::None, ..Default::default() }
    }
    pub fn atomic_cuts() -> Self {
        CheckOptions { cuts: CutGrade::AtomicOnly, ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    /// Premise indices from the root.
    pub path: Vec<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "at root: {}", self.message)
        } else {
            let p: Vec<String> = self.path.iter().map(usize::to_string).collect();
            write!(f, "at node {}: {}", p.join("."), self.message)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub diagnostics: Vec<Diagnostic>,
    pub inferences: usize,
    pub cuts: usize,
}

impl CheckReport {
    pub fn is_ok(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok ({} inferences, {} cuts)", self.inferences, self.cuts);
        }
        for d in &self.diagnostics {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Where each premise occurrence goes in the conclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OccMap {
    pub ant: Vec<Option<Occ>>,
    pub suc: Vec<Option<Occ>>,
}

impl OccMap {
    fn for_sequent(s: &Sequent) -> OccMap {
        OccMap { ant: vec![None; s.ant.len()], suc: vec![None; s.suc.len()] }
    }
    pub fn get(&self, o: Occ) -> Option<Occ> {
        match o.side {
            Side::Ant => self.ant.get(o.index).copied().flatten(),
            Side::Suc => self.suc.get(o.index).copied().flatten(),
        }
    }
    fn set(&mut self, o: Occ, to: Option<Occ>) {
        match o.side {
            Side::Ant => self.ant[o.index] = to,
            Side::Suc => self.suc[o.index] = to,
        }
    }
}

/// Result of checking one inference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeAnalysis {
    pub maps: Vec<OccMap>,
    /// Main occurrences in the conclusion: antecedent ones first.
    pub mains: Vec<Occ>,
    /// Auxiliary occurrences in rule order.
    pub aux: Vec<Aux>,
    pub eigen: Option<Term>,
}

fn same(a: &Formula, b: &Formula) -> bool {
    a.alpha_eq(b)
}

fn same_mod(a: &Formula, b: &Formula, table: &SymbolTable) -> bool {
    same(a, b) || normalize_formula(a, table).alpha_eq(&normalize_formula(b, table))
}

/// Orders `aux` to match the rule's expected shape.
fn order_aux(rule: &Rule, aux: &[Aux], premises: &[&Sequent]) -> Result<Vec<Aux>, String> {
    for a in aux {
        let p = premises.get(a.premise).ok_or_else(|| format!("auxiliary refers to missing premise {}", a.premise))?;
        if p.get(a.occ).is_none() {
            return Err(format!("auxiliary position {} out of range in premise {}", a.occ, a.premise));
        }
    }
    for (i, a) in aux.iter().enumerate() {
        if aux[..i].contains(a) {
            return Err(format!("auxiliary position {} used twice", a.occ));
        }
    }
    if *rule == Rule::E {
        return match aux {
            [a] if a.premise == 0 => Ok(vec![*a]),
            _ => Err("E needs exactly one auxiliary formula".into()),
        };
    }
    let shape = rule.aux_shape();
    if shape.len() != aux.len() {
        return Err(format!("{rule} needs {} auxiliary formula(s), got {}", shape.len(), aux.len()));
    }
    let mut used = vec![false; aux.len()];
    let mut out = Vec::with_capacity(aux.len());
    for (p, side) in shape {
        let j = (0..aux.len())
            .find(|&j| !used[j] && aux[j].premise == p && aux[j].occ.side == side)
            .ok_or_else(|| format!("{rule} needs an auxiliary formula on the {side:?} side of premise {p}"))?;
        used[j] = true;
        out.push(aux[j]);
    }
    Ok(out)
}

type Ctx<'a> = Vec<(usize, Occ, &'a Formula)>;

fn contexts<'a>(rule: &Rule, premises: &[&'a Sequent], aux: &[Aux]) -> (Ctx<'a>, Ctx<'a>) {
    let mut ant = Vec::new();
    let mut suc = Vec::new();
    let upto = if matches!(rule, Rule::IndPrime(_)) { 1 } else { premises.len() };
    for (pi, p) in premises.iter().enumerate().take(upto) {
        for (o, f) in p.occs() {
            if aux.iter().any(|a| a.premise == pi && a.occ == o) {
                continue;
            }
            match o.side {
                Side::Ant => ant.push((pi, o, f)),
                Side::Suc => suc.push((pi, o, f)),
            }
        }
    }
    (ant, suc)
}

fn need<'a>(main: Option<&'a Formula>, rule: &Rule) -> Result<&'a Formula, String> {
    main.ok_or_else(|| format!("{rule} needs its main formula"))
}

/// Canonical conclusion of an inference.
pub fn conclude(rule: &Rule, premises: &[&Sequent], aux: &[Aux], main: Option<&Formula>) -> Result<Sequent, String> {
    if premises.len() != rule.arity() {
        return Err(format!("{rule} takes {} premise(s), got {}", rule.arity(), premises.len()));
    }
    let aux = order_aux(rule, aux, premises)?;
    let f = |i: usize| premises[aux[i].premise].get(aux[i].occ).expect("checked").clone();
    let (ant_ctx, suc_ctx) = contexts(rule, premises, &aux);
    let mut ant: Vec<Formula> = ant_ctx.iter().map(|(_, _, f)| (*f).clone()).collect();
    let mut suc: Vec<Formula> = suc_ctx.iter().map(|(_, _, f)| (*f).clone()).collect();
    let (mains_ant, mains_suc): (Vec<Formula>, Vec<Formula>) = match rule {
        Rule::NotL => (vec![Formula::not(f(0))], vec![]),
        Rule::NotR => (vec![], vec![Formula::not(f(0))]),
        Rule::AndR => (vec![], vec![Formula::and(f(0), f(1))]),
        Rule::OrL => (vec![Formula::or(f(0), f(1))], vec![]),
        Rule::ImpL => (vec![Formula::imp(f(0), f(1))], vec![]),
        Rule::ImpR => (vec![], vec![Formula::imp(f(0), f(1))]),
        Rule::CL => (vec![f(0)], vec![]),
        Rule::CR => (vec![], vec![f(0)]),
        Rule::Cut => (vec![], vec![]),
        Rule::AndL1 | Rule::AndL2 | Rule::AllL | Rule::ExL | Rule::WL => (vec![need(main, rule)?.clone()], vec![]),
        Rule::OrR1 | Rule::OrR2 | Rule::AllR | Rule::ExR | Rule::WR => (vec![], vec![need(main, rule)?.clone()]),
        Rule::E => {
            let m = need(main, rule)?.clone();
            let o = aux[0].occ;
            let mut s = premises[0].clone();
            s.side_mut(o.side)[o.index] = m;
            return Ok(s);
        }
        Rule::Ind(d) => (vec![d.at(Term::zero())], vec![d.at(d.term.clone())]),
        Rule::IndPrime(d) => (vec![], vec![d.at(d.term.clone())]),
    };
    let mut a = mains_ant;
    a.append(&mut ant);
    suc.extend(mains_suc);
    Ok(Sequent::new(a, suc))
}

/// Assigns context occurrences and main formulas to conclusion positions.
fn assign(
    concl: &Sequent,
    rule: &Rule,
    ant_ctx: &Ctx<'_>,
    suc_ctx: &Ctx<'_>,
    aux: &[Aux],
) -> Result<(Vec<Occ>, Vec<Occ>, Vec<Occ>), String> {
    let (ma, ms) = match rule {
        Rule::E => match aux[0].occ.side {
            Side::Ant => (1, 0),
            Side::Suc => (0, 1),
        },
        r => r.main_counts(),
    };
    if concl.ant.len() != ant_ctx.len() + ma || concl.suc.len() != suc_ctx.len() + ms {
        return Err(format!(
            "conclusion has {}+{} formulas, the rule yields {}+{}",
            concl.ant.len(),
            concl.suc.len(),
            ant_ctx.len() + ma,
            suc_ctx.len() + ms
        ));
    }
    let side_assign = |side: Side, ctx: &Ctx<'_>, m: usize| -> Result<(Vec<Occ>, Vec<Occ>), String> {
        let c = concl.side(side);
        // Canonical layout first.
        let positions: Vec<usize> = if *rule == Rule::E && aux[0].occ.side == side {
            let e = aux[0].occ.index;
            (0..c.len()).filter(|&i| i != e).collect()
        } else if side == Side::Ant {
            (m..c.len()).collect()
        } else {
            (0..ctx.len()).collect()
        };
        if ctx.iter().zip(&positions).all(|((_, _, f), &i)| same(f, &c[i])) {
            let mains: Vec<usize> = (0..c.len()).filter(|i| !positions.contains(i)).collect();
            let mk = |i: usize| Occ { side, index: i };
            return Ok((positions.into_iter().map(mk).collect(), mains.into_iter().map(mk).collect()));
        }
        let mut used = vec![false; c.len()];
        let mut ctx_occ = Vec::with_capacity(ctx.len());
        for (_, _, f) in ctx {
            let j = (0..c.len())
                .find(|&j| !used[j] && same(f, &c[j]))
                .ok_or_else(|| format!("context formula {f} is missing from the conclusion"))?;
            used[j] = true;
            ctx_occ.push(Occ { side, index: j });
        }
        let mains = (0..c.len()).filter(|&j| !used[j]).map(|j| Occ { side, index: j }).collect();
        Ok((ctx_occ, mains))
    };
    let (ca, mut ma_occ) = side_assign(Side::Ant, ant_ctx, ma)?;
    let (cs, ms_occ) = side_assign(Side::Suc, suc_ctx, ms)?;
    ma_occ.extend(ms_occ);
    Ok((ca, cs, ma_occ))
}

/// Finds `t` with `body{x←t} ≡ target`. `Some(None)`: `x` does not occur.
pub fn instance_term(body: &Formula, x: &Var, target: &Formula) -> Option<Option<Term>> {
    fn term(p: &Term, t: &Term, x: &Var, env: &[(Sym, Sym)], out: &mut Option<Term>) -> bool {
        match (p, t) {
            (Term::Var(v), _) => {
                if let Some((_, tb)) = env.iter().rev().find(|(pb, _)| *pb == v.name) {
                    return matches!(t, Term::Var(w) if w.name == *tb);
                }
                if v == x {
                    return match out {
                        Some(prev) => prev == t,
                        None => {
                            *out = Some(t.clone());
                            true
                        }
                    };
                }
                match t {
                    Term::Var(w) => w == v && !env.iter().any(|(_, tb)| *tb == w.name),
                    _ => false,
                }
            }
            (Term::Idx(a, i), Term::Idx(b, j)) => a == b && term(i, j, x, env, out),
            (Term::V2(a), Term::V2(b)) => a == b,
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(a, b)| term(a, b, x, env, out))
            }
            _ => false,
        }
    }
    fn formula(p: &Formula, t: &Formula, x: &Var, env: &mut Vec<(Sym, Sym)>, out: &mut Option<Term>) -> bool {
        match (p, t) {
            (Formula::Atom(a, xs), Formula::Atom(b, ys)) => {
                a == b && xs.len() == ys.len() && xs.iter().zip(ys).all(|(u, v)| term(u, v, x, env, out))
            }
            (Formula::Top, Formula::Top) | (Formula::Bottom, Formula::Bottom) => true,
            (Formula::Not(a), Formula::Not(b)) => formula(a, b, x, env, out),
            (Formula::And(a, b), Formula::And(c, d))
            | (Formula::Or(a, b), Formula::Or(c, d))
            | (Formula::Imp(a, b), Formula::Imp(c, d)) => formula(a, c, x, env, out) && formula(b, d, x, env, out),
            (Formula::Forall(v, a), Formula::Forall(w, b)) | (Formula::Exists(v, a), Formula::Exists(w, b)) => {
                if v.sort != w.sort {
                    return false;
                }
                env.push((v.name.clone(), w.name.clone()));
                let r = formula(a, b, x, env, out);
                env.pop();
                r
            }
            _ => false,
        }
    }
    let mut out = None;
    formula(body, target, x, &mut Vec::new(), &mut out).then_some(out)
}

fn instance_mod(body: &Formula, x: &Var, target: &Formula, table: &SymbolTable) -> Option<Option<Term>> {
    instance_term(body, x, target).or_else(|| {
        let nb = normalize_formula(body, table);
        let nt = normalize_formula(target, table);
        instance_term(&nb, x, &nt).filter(|t| match t {
            Some(t) => normalize_formula(&TermSubst::single(&x.name, t.clone()).formula(body), table).alpha_eq(&nt),
            None => true,
        })
    })
}

/// An eigenvariable: a first-order variable of the bound variable's sort
/// other than the parameters, or an indexed variable.
fn is_variable(t: &Term, bound: &Var) -> bool {
    match t {
        Term::Var(v) if v.sort == Sort::Iota => bound.sort == Sort::Iota,
        Term::Var(v) => bound.sort == Sort::Omega && &*v.name != PARAM_N && &*v.name != PARAM_K,
        Term::Idx(..) => bound.sort == Sort::Iota,
        _ => false,
    }
}

fn occurs_free(t: &Term, s: &Sequent) -> bool {
    match t {
        Term::Var(v) => s.free_vars().contains(v),
        _ => s.contains_term(t),
    }
}

/// Checks the semantics of the rule; returns the eigenvariable if any.
fn verify(rule: &Rule, aux: &[&Formula], mains: &[&Formula], table: &SymbolTable) -> Result<Option<Term>, String> {
    let bad = |what: &str| Err(format!("{rule}: {what}"));
    match rule {
        Rule::NotL | Rule::NotR => match mains[0] {
            Formula::Not(a) if same(a, aux[0]) => Ok(None),
            _ => bad("main formula is not the negation of the auxiliary formula"),
        },
        Rule::AndL1 | Rule::AndL2 => match mains[0] {
            Formula::And(a, b) if same(if *rule == Rule::AndL1 { a } else { b }, aux[0]) => Ok(None),
            _ => bad("auxiliary formula is not the matching conjunct"),
        },
        Rule::OrR1 | Rule::OrR2 => match mains[0] {
            Formula::Or(a, b) if same(if *rule == Rule::OrR1 { a } else { b }, aux[0]) => Ok(None),
            _ => bad("auxiliary formula is not the matching disjunct"),
        },
        Rule::AndR => match mains[0] {
            Formula::And(a, b) if same(a, aux[0]) && same(b, aux[1]) => Ok(None),
            _ => bad("main formula is not the conjunction of the auxiliary formulas"),
        },
        Rule::OrL => match mains[0] {
            Formula::Or(a, b) if same(a, aux[0]) && same(b, aux[1]) => Ok(None),
            _ => bad("main formula is not the disjunction of the auxiliary formulas"),
        },
        Rule::ImpL | Rule::ImpR => match mains[0] {
            Formula::Imp(a, b) if same(a, aux[0]) && same(b, aux[1]) => Ok(None),
            _ => bad("main formula is not the implication of the auxiliary formulas"),
        },
        Rule::AllL | Rule::ExR => match (rule, mains[0]) {
            (Rule::AllL, Formula::Forall(x, body)) | (Rule::ExR, Formula::Exists(x, body)) => {
                match instance_mod(body, x, aux[0], table) {
                    Some(_) => Ok(None),
                    None => bad("auxiliary formula is not an instance of the quantified formula"),
                }
            }
            _ => bad("main formula has the wrong quantifier"),
        },
        Rule::AllR | Rule::ExL => match (rule, mains[0]) {
            (Rule::AllR, Formula::Forall(x, body)) | (Rule::ExL, Formula::Exists(x, body)) => {
                match instance_mod(body, x, aux[0], table) {
                    Some(Some(t)) if is_variable(&t, x) => Ok(Some(t)),
                    Some(Some(t)) => bad(&format!("eigenvariable position holds the non-variable {t}")),
                    Some(None) => Ok(None),
                    None => bad("auxiliary formula is not an instance of the quantified formula"),
                }
            }
            _ => bad("main formula has the wrong quantifier"),
        },
        Rule::WL | Rule::WR => Ok(None),
        Rule::CL | Rule::CR => {
            if same(aux[0], aux[1]) && same(aux[0], mains[0]) {
                Ok(None)
            } else {
                bad("contracted formulas differ")
            }
        }
        Rule::Cut => {
            if same_mod(aux[0], aux[1], table) {
                Ok(None)
            } else {
                bad(&format!("cut formulas {} and {} differ", aux[0], aux[1]))
            }
        }
        Rule::E => {
            if same_mod(aux[0], mains[0], table) {
                Ok(None)
            } else {
                bad(&format!("{} and {} have different normal forms", aux[0], mains[0]))
            }
        }
        Rule::Ind(d) => {
            let i = Term::Var(d.var.clone());
            let ok = same_mod(aux[0], &d.at(i.clone()), table)
                && same_mod(aux[1], &d.at(Term::succ(i)), table)
                && same_mod(mains[0], &d.at(Term::zero()), table)
                && same_mod(mains[1], &d.at(d.term.clone()), table);
            if ok {
                Ok(None)
            } else {
                bad("formulas do not match the induction formula")
            }
        }
        Rule::IndPrime(d) => {
            let i = Term::Var(d.var.clone());
            let ok = same_mod(aux[0], &d.at(Term::zero()), table)
                && same_mod(aux[1], &d.at(i.clone()), table)
                && same_mod(aux[2], &d.at(Term::succ(i)), table)
                && same_mod(mains[0], &d.at(d.term.clone()), table);
            if ok {
                Ok(None)
            } else {
                bad("formulas do not match the induction formula")
            }
        }
    }
}

/// Checks one inference node and computes its ancestor maps.
pub fn analyze(p: &Proof, table: &SymbolTable) -> Result<NodeAnalysis, String> {
    let Node::Inference(inf) = &p.node else {
        return Err("not an inference".into());
    };
    let Inference { rule, aux, premises } = &**inf;
    if premises.len() != rule.arity() {
        return Err(format!("{rule} takes {} premise(s), got {}", rule.arity(), premises.len()));
    }
    let seqs: Vec<&Sequent> = premises.iter().map(|q| &q.conclusion).collect();
    let aux = order_aux(rule, aux, &seqs)?;
    let (ant_ctx, suc_ctx) = contexts(rule, &seqs, &aux);
    let (ca, cs, mains) = assign(&p.conclusion, rule, &ant_ctx, &suc_ctx, &aux)?;
    let aux_f: Vec<&Formula> = aux.iter().map(|a| seqs[a.premise].get(a.occ).expect("checked")).collect();
    let main_f: Vec<&Formula> = mains.iter().map(|o| p.conclusion.get(*o).expect("assigned")).collect();
    let eigen = verify(rule, &aux_f, &main_f, table)?;
    if let Some(e) = &eigen {
        if occurs_free(e, &p.conclusion) {
            return Err(format!("{rule}: eigenvariable {e} occurs in the conclusion"));
        }
    }
    if let Some(d) = rule.ind_data() {
        // The variable may occur in `A(t)` (through `t`), nowhere else.
        let i = Term::Var(d.var.clone());
        let target = if matches!(rule, Rule::Ind(_)) { mains[1] } else { mains[0] };
        let mut rest = p.conclusion.clone();
        rest.side_mut(target.side).remove(target.index);
        if occurs_free(&i, &rest) {
            return Err(format!("{rule}: induction variable {} occurs in the context or in A(0)", d.var.name));
        }
    }
    let mut maps: Vec<OccMap> = seqs.iter().map(|s| OccMap::for_sequent(s)).collect();
    for ((pi, o, _), to) in ant_ctx.iter().zip(&ca).chain(suc_ctx.iter().zip(&cs)) {
        maps[*pi].set(*o, Some(*to));
    }
    match rule {
        Rule::Cut => {}
        Rule::Ind(_) => {
            maps[0].set(aux[0].occ, Some(mains[0]));
            maps[0].set(aux[1].occ, Some(mains[1]));
        }
        Rule::IndPrime(_) => {
            maps[0].set(aux[0].occ, Some(mains[0]));
            maps[1].set(aux[2].occ, Some(mains[0]));
            // Shared context: premise 1 maps onto premise 0's targets.
            for side in [Side::Ant, Side::Suc] {
                let targets: Vec<(&Formula, Occ)> = if side == Side::Ant {
                    ant_ctx.iter().zip(&ca).map(|((_, _, f), o)| (*f, *o)).collect()
                } else {
                    suc_ctx.iter().zip(&cs).map(|((_, _, f), o)| (*f, *o)).collect()
                };
                let mut used = vec![false; targets.len()];
                for (i, f) in seqs[1].side(side).iter().enumerate() {
                    let o = Occ { side, index: i };
                    if aux.iter().any(|a| a.premise == 1 && a.occ == o) {
                        continue;
                    }
                    let j = (0..targets.len())
                        .find(|&j| !used[j] && same(targets[j].0, f))
                        .ok_or_else(|| format!("{rule}: contexts of the premises differ at {f}"))?;
                    used[j] = true;
                    maps[1].set(o, Some(targets[j].1));
                }
                if used.iter().any(|u| !u) {
                    return Err(format!("{rule}: contexts of the premises differ"));
                }
            }
        }
        _ => {
            for a in &aux {
                maps[a.premise].set(a.occ, Some(mains[0]));
            }
        }
    }
    Ok(NodeAnalysis { maps, mains, aux, eigen })
}

fn check_axiom(s: &Sequent, policy: AxiomPolicy) -> Result<(), String> {
    let identity = s.ant.len() == 1 && s.suc.len() == 1 && same(&s.ant[0], &s.suc[0]);
    match policy {
        AxiomPolicy::AtomicIdentity if identity && s.ant[0].is_atom() => Ok(()),
        AxiomPolicy::Identity if identity => Ok(()),
        AxiomPolicy::Atomic if s.is_atomic() => Ok(()),
        _ => Err(format!("{s} is not an admissible initial sequent")),
    }
}

fn check_link(p: &Proof, link: &super::Link, schema: &ProofSchema, table: &SymbolTable) -> Result<(), String> {
    let pair = schema.pair(&link.target).ok_or_else(|| format!("link to undeclared proof symbol {}", link.target))?;
    if pair.params.len() != link.args.len() {
        return Err(format!(
            "link to {} has {} term argument(s), expected {}",
            link.target,
            link.args.len(),
            pair.params.len()
        ));
    }
    match table.sort_of(&link.arg) {
        Ok(Sort::Omega) => {}
        _ => return Err(format!("link argument {} is not of sort omega", link.arg)),
    }
    let expected = pair.instance(&link.arg, &link.args);
    let a = normalize_sequent(&expected, table);
    let b = normalize_sequent(&p.conclusion, table);
    if a.multiset_eq(&b) {
        Ok(())
    } else {
        Err(format!("link leaf {} does not match {}", p.conclusion, expected))
    }
}

/// Checks every node of `p`. Link leaves are checked against `schema`.
pub fn check_proof(p: &Proof, table: &SymbolTable, schema: Option<&ProofSchema>, opts: CheckOptions) -> CheckReport {
    let mut report = CheckReport::default();
    let mut path = Vec::new();
    walk(p, table, schema, opts, &mut path, &mut report);
    report
}

fn walk(
    p: &Proof,
    table: &SymbolTable,
    schema: Option<&ProofSchema>,
    opts: CheckOptions,
    path: &mut Vec<usize>,
    report: &mut CheckReport,
) {
    let mut diag =
        |m: String, path: &Vec<usize>| report.diagnostics.push(Diagnostic { path: path.clone(), message: m });
    for f in p.conclusion.ant.iter().chain(&p.conclusion.suc) {
        if let Err(e) = table.check_formula(f) {
            diag(format!("ill-formed formula {f}: {e}"), path);
            return;
        }
    }
    match &p.node {
        Node::Axiom => {
            if let Err(m) = check_axiom(&p.conclusion, opts.axioms) {
                diag(m, path);
            }
        }
        Node::Link(l) => {
            if !opts.links {
                diag(format!("proof link to {} not allowed here", l.target), path);
            } else if let Some(s) = schema {
                if let Err(m) = check_link(p, l, s, table) {
                    diag(m, path);
                }
            } else {
                diag("proof link without a schema to resolve it".into(), path);
            }
        }
        Node::Inference(inf) => {
            report.inferences += 1;
            match &inf.rule {
                Rule::Ind(_) | Rule::IndPrime(_) if !opts.induction => {
                    diag(format!("{} not allowed here", inf.rule), path)
                }
                _ => {}
            }
            if inf.rule == Rule::Cut {
                report.cuts += 1;
            }
            match analyze(p, table) {
                Ok(a) => {
                    if inf.rule == Rule::Cut {
                        let cf = inf.premises[a.aux[0].premise].conclusion.get(a.aux[0].occ);
                        match opts.cuts {
                            CutGrade::None => diag("cut not allowed here".into(), path),
                            CutGrade::AtomicOnly if !cf.is_some_and(Formula::is_atom) => diag(
                                format!("non-atomic cut on {}", cf.map(|f| f.to_string()).unwrap_or_default()),
                                path,
                            ),
                            _ => {}
                        }
                    }
                }
                Err(m) => diag(m, path),
            }
            for (i, q) in inf.premises.iter().enumerate() {
                path.push(i);
                walk(q, table, schema, opts, path, report);
                path.pop();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{ArgSort, Formula};

    fn table() -> SymbolTable {
        let mut t = SymbolTable::new();
        t.declare_predicate("P", vec![ArgSort::Iota]);
        t.declare_function("c", vec![], Sort::Iota);
        t
    }

    fn p(t: Term) -> Formula {
        Formula::atom("P", vec![t])
    }

    #[test]
    fn identity_axiom_passes() {
        let pr = Proof::identity(p(Term::iota("x")));
        assert!(check_proof(&pr, &table(), None, CheckOptions::default()).is_ok());
    }

    #[test]
    fn eigenvariable_violation_is_reported() {
        let x = Term::iota("x");
        let ax = Proof::identity(p(x.clone()));
        let all = Formula::forall(Var::iota("y"), p(Term::iota("y")));
        let bad = Proof::unary(Rule::AllR, ax, vec![Occ::suc(0)], Some(all.clone())).unwrap();
        let r = check_proof(&bad, &table(), None, CheckOptions::default());
        assert!(!r.is_ok());
        assert!(r.diagnostics[0].message.contains("eigenvariable"), "{r}");

        let ax = Proof::identity(p(x));
        let l = Proof::unary(Rule::AllL, ax, vec![Occ::ant(0)], Some(all.clone())).unwrap();
        let good = Proof::unary(Rule::AllR, l, vec![Occ::suc(0)], Some(all)).unwrap();
        let r = check_proof(&good, &table(), None, CheckOptions::default());
        assert!(r.is_ok(), "{r}");
    }

    #[test]
    fn permuted_conclusion_is_accepted() {
        let a = p(Term::iota("a"));
        let b = p(Term::iota("b"));
        let ax = Proof::identity(a.clone());
        let w = Proof::weaken_l(ax, b.clone());
        let flipped = w.with_conclusion(Sequent::new(vec![a.clone(), b], vec![a]));
        assert!(check_proof(&flipped, &table(), None, CheckOptions::default()).is_ok());
    }

    #[test]
    fn cut_grade_is_enforced() {
        let a = p(Term::constant("c"));
        let cut =
            Proof::binary(Rule::Cut, Proof::identity(a.clone()), Proof::identity(a), Occ::suc(0), Occ::ant(0)).unwrap();
        assert!(check_proof(&cut, &table(), None, CheckOptions::atomic_cuts()).is_ok());
        assert!(!check_proof(&cut, &table(), None, CheckOptions::cut_free()).is_ok());
    }

    #[test]
    fn instance_terms() {
        let x = Var::iota("x");
        let body = p(Term::Var(x.clone()));
        assert_eq!(instance_term(&body, &x, &p(Term::constant("c"))), Some(Some(Term::constant("c"))));
        assert_eq!(instance_term(&p(Term::constant("c")), &x, &p(Term::constant("c"))), Some(None));
    }
}
