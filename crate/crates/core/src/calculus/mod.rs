//! Sequent calculus proofs with proof links, checking, ancestry, proof
//! schemata and their evaluation, regularization, and the translations
//! between proof schemata and induction proofs.

mod ancestry;
mod check;
mod schema;
mod translate;

pub use ancestry::{mark_ancestors, Anc, Marking, SideLabels};
pub use check::{
    analyze, check_proof, conclude, instance_term, AxiomPolicy, CheckOptions, CheckReport, CutGrade, Diagnostic,
    NodeAnalysis, OccMap,
};
pub use schema::{
    check_schema, evaluate_schema, identify, is_regular, regularize, Configuration, EvalError, ProofSchema,
    RegularizeError, SchemaPair,
};
pub use translate::{lki_to_schema, schema_to_lki, TranslateError};

use crate::term::{Formula, Occ, Sequent, Side, Sym, Term, TermSubst, Var};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    NotL,
    NotR,
    AndL1,
    AndL2,
    AndR,
    OrL,
    OrR1,
    OrR2,
    ImpL,
    ImpR,
    AllL,
    AllR,
    ExL,
    ExR,
    WL,
    WR,
    CL,
    CR,
    Cut,
    /// Replacement of a formula by one with the same normal form.
    E,
    /// `A(i),Γ ⊢ Δ,A(i+1)` gives `A(0),Γ ⊢ Δ,A(t)`.
    Ind(IndData),
    /// `Γ ⊢ Δ,A(0)` and `A(i),Γ ⊢ Δ,A(i+1)` give `Γ ⊢ Δ,A(t)`.
    IndPrime(IndData),
}

/// Induction formula `A(var)` and target term `t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndData {
    pub var: Var,
    pub formula: Formula,
    pub term: Term,
}

impl IndData {
    pub fn at(&self, t: Term) -> Formula {
        TermSubst::single(&self.var.name, t).formula(&self.formula)
    }
}

impl Rule {
    pub fn tag(&self) -> &'static str {
        match self {
            Rule::NotL => "not:l",
            Rule::NotR => "not:r",
            Rule::AndL1 => "and:l1",
            Rule::AndL2 => "and:l2",
            Rule::AndR => "and:r",
            Rule::OrL => "or:l",
            Rule::OrR1 => "or:r1",
            Rule::OrR2 => "or:r2",
            Rule::ImpL => "imp:l",
            Rule::ImpR => "imp:r",
            Rule::AllL => "all:l",
            Rule::AllR => "all:r",
            Rule::ExL => "ex:l",
            Rule::ExR => "ex:r",
            Rule::WL => "w:l",
            Rule::WR => "w:r",
            Rule::CL => "c:l",
            Rule::CR => "c:r",
            Rule::Cut => "cut",
            Rule::E => "E",
            Rule::Ind(_) => "ind",
            Rule::IndPrime(_) => "ind'",
        }
    }

    /// Rules with data are returned with placeholder data.
    pub fn from_tag(tag: &str) -> Option<Rule> {
        Some(match tag {
            "not:l" => Rule::NotL,
            "not:r" => Rule::NotR,
            "and:l1" => Rule::AndL1,
            "and:l2" => Rule::AndL2,
            "and:r" => Rule::AndR,
            "or:l" => Rule::OrL,
            "or:r1" => Rule::OrR1,
            "or:r2" => Rule::OrR2,
            "imp:l" => Rule::ImpL,
            "imp:r" => Rule::ImpR,
            "all:l" => Rule::AllL,
            "all:r" => Rule::AllR,
            "ex:l" => Rule::ExL,
            "ex:r" => Rule::ExR,
            "w:l" => Rule::WL,
            "w:r" => Rule::WR,
            "c:l" => Rule::CL,
            "c:r" => Rule::CR,
            "cut" => Rule::Cut,
            "E" => Rule::E,
            _ => return None,
        })
    }

    pub fn arity(&self) -> usize {
        match self {
            Rule::AndR | Rule::OrL | Rule::ImpL | Rule::Cut | Rule::IndPrime(_) => 2,
            _ => 1,
        }
    }

    /// Aux sides expected in each premise, in order.
    pub fn aux_shape(&self) -> Vec<(usize, Side)> {
        use Side::*;
        match self {
            Rule::NotL => vec![(0, Suc)],
            Rule::NotR => vec![(0, Ant)],
            Rule::AndL1 | Rule::AndL2 => vec![(0, Ant)],
            Rule::AndR => vec![(0, Suc), (1, Suc)],
            Rule::OrL => vec![(0, Ant), (1, Ant)],
            Rule::OrR1 | Rule::OrR2 => vec![(0, Suc)],
            Rule::ImpL => vec![(0, Suc), (1, Ant)],
            Rule::ImpR => vec![(0, Ant), (0, Suc)],
            Rule::AllL | Rule::ExL => vec![(0, Ant)],
            Rule::AllR | Rule::ExR => vec![(0, Suc)],
            Rule::WL | Rule::WR => vec![],
            Rule::CL => vec![(0, Ant), (0, Ant)],
            Rule::CR => vec![(0, Suc), (0, Suc)],
            Rule::Cut => vec![(0, Suc), (1, Ant)],
            Rule::E => vec![],
            Rule::Ind(_) => vec![(0, Ant), (0, Suc)],
            Rule::IndPrime(_) => vec![(0, Suc), (1, Ant), (1, Suc)],
        }
    }

    /// Number of main formulas in antecedent and succedent.
    pub fn main_counts(&self) -> (usize, usize) {
        match self {
            Rule::NotL | Rule::AndL1 | Rule::AndL2 | Rule::OrL | Rule::ImpL | Rule::AllL | Rule::ExL => (1, 0),
            Rule::WL | Rule::CL => (1, 0),
            Rule::NotR | Rule::AndR | Rule::OrR1 | Rule::OrR2 | Rule::ImpR | Rule::AllR | Rule::ExR => (0, 1),
            Rule::WR | Rule::CR => (0, 1),
            Rule::Cut | Rule::E => (0, 0),
            Rule::Ind(_) => (1, 1),
            Rule::IndPrime(_) => (0, 1),
        }
    }

    pub fn is_structural(&self) -> bool {
        matches!(self, Rule::WL | Rule::WR | Rule::CL | Rule::CR)
    }

    pub fn is_eigen(&self) -> bool {
        matches!(self, Rule::AllR | Rule::ExL)
    }

    pub fn ind_data(&self) -> Option<&IndData> {
        match self {
            Rule::Ind(d) | Rule::IndPrime(d) => Some(d),
            _ => None,
        }
    }

    fn map_data(&self, f: &mut dyn FnMut(&Formula) -> Formula, g: &mut dyn FnMut(&Term) -> Term) -> Rule {
        match self {
            Rule::Ind(d) => Rule::Ind(IndData { var: d.var.clone(), formula: f(&d.formula), term: g(&d.term) }),
            Rule::IndPrime(d) => {
                Rule::IndPrime(IndData { var: d.var.clone(), formula: f(&d.formula), term: g(&d.term) })
            }
            r => r.clone(),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// An auxiliary formula: position in the conclusion of premise `premise`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Aux {
    pub premise: usize,
    pub occ: Occ,
}

impl Aux {
    pub fn new(premise: usize, occ: Occ) -> Aux {
        Aux { premise, occ }
    }
}

/// A proof-link leaf `(target, arg, args)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Link {
    pub target: Sym,
    pub arg: Term,
    pub args: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Inference {
    pub rule: Rule,
    pub aux: Vec<Aux>,
    pub premises: Vec<Proof>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Node {
    Axiom,
    Link(Link),
    Inference(Box<Inference>),
}

/// A proof tree. Every node stores its conclusion.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Proof {
    pub conclusion: Sequent,
    pub node: Node,
}

pub type BuildError = String;

impl Proof {
    pub fn axiom(s: Sequent) -> Proof {
        Proof { conclusion: s, node: Node::Axiom }
    }

    pub fn identity(a: Formula) -> Proof {
        Proof::axiom(Sequent::new(vec![a.clone()], vec![a]))
    }

    /// `A ⊢ A` derived from atomic axioms.
    pub fn expanded_identity(a: &Formula) -> Proof {
        let un =
            |r: Rule, p: Proof, aux: Vec<Occ>, m: Option<Formula>| Proof::unary(r, p, aux, m).expect("identity step");
        let bin =
            |r: Rule, l: Proof, q: Proof, lo: Occ, ro: Occ| Proof::binary(r, l, q, lo, ro).expect("identity step");
        match a {
            Formula::Not(b) => {
                let p = un(Rule::NotL, Proof::expanded_identity(b), vec![Occ::suc(0)], None);
                un(Rule::NotR, p, vec![Occ::ant(1)], None)
            }
            Formula::And(b, c) => {
                let l = un(Rule::AndL1, Proof::expanded_identity(b), vec![Occ::ant(0)], Some(a.clone()));
                let r = un(Rule::AndL2, Proof::expanded_identity(c), vec![Occ::ant(0)], Some(a.clone()));
                un(Rule::CL, bin(Rule::AndR, l, r, Occ::suc(0), Occ::suc(0)), vec![Occ::ant(0), Occ::ant(1)], None)
            }
            Formula::Or(b, c) => {
                let l = un(Rule::OrR1, Proof::expanded_identity(b), vec![Occ::suc(0)], Some(a.clone()));
                let r = un(Rule::OrR2, Proof::expanded_identity(c), vec![Occ::suc(0)], Some(a.clone()));
                un(Rule::CR, bin(Rule::OrL, l, r, Occ::ant(0), Occ::ant(0)), vec![Occ::suc(0), Occ::suc(1)], None)
            }
            Formula::Imp(b, c) => {
                let p =
                    bin(Rule::ImpL, Proof::expanded_identity(b), Proof::expanded_identity(c), Occ::suc(0), Occ::ant(0));
                un(Rule::ImpR, p, vec![Occ::ant(1), Occ::suc(0)], None)
            }
            Formula::Forall(_, body) => {
                let p = un(Rule::AllL, Proof::expanded_identity(body), vec![Occ::ant(0)], Some(a.clone()));
                un(Rule::AllR, p, vec![Occ::suc(0)], Some(a.clone()))
            }
            Formula::Exists(_, body) => {
                let p = un(Rule::ExR, Proof::expanded_identity(body), vec![Occ::suc(0)], Some(a.clone()));
                un(Rule::ExL, p, vec![Occ::ant(0)], Some(a.clone()))
            }
            _ => Proof::identity(a.clone()),
        }
    }

    pub fn link(target: Sym, arg: Term, args: Vec<Term>, conclusion: Sequent) -> Proof {
        Proof { conclusion, node: Node::Link(Link { target, arg, args }) }
    }

    /// Builds an inference with its canonical conclusion. `main` supplies
    /// formulas not determined by the premises (quantified formula,
    /// weakened formula, other disjunct or conjunct, E replacement).
    pub fn infer(rule: Rule, premises: Vec<Proof>, aux: Vec<Aux>, main: Option<Formula>) -> Result<Proof, BuildError> {
        let seqs: Vec<&Sequent> = premises.iter().map(|p| &p.conclusion).collect();
        let conclusion = conclude(&rule, &seqs, &aux, main.as_ref())?;
        Ok(Proof { conclusion, node: Node::Inference(Box::new(Inference { rule, aux, premises })) })
    }

    pub fn unary(rule: Rule, p: Proof, aux: Vec<Occ>, main: Option<Formula>) -> Result<Proof, BuildError> {
        let aux = aux.into_iter().map(|o| Aux::new(0, o)).collect();
        Proof::infer(rule, vec![p], aux, main)
    }

    pub fn binary(rule: Rule, l: Proof, r: Proof, lo: Occ, ro: Occ) -> Result<Proof, BuildError> {
        Proof::infer(rule, vec![l, r], vec![Aux::new(0, lo), Aux::new(1, ro)], None)
    }

    pub fn weaken_l(p: Proof, a: Formula) -> Proof {
        Proof::unary(Rule::WL, p, vec![], Some(a)).expect("weakening always applies")
    }

    pub fn weaken_r(p: Proof, a: Formula) -> Proof {
        Proof::unary(Rule::WR, p, vec![], Some(a)).expect("weakening always applies")
    }

    /// Weakens in `s`: antecedent left to right, then succedent.
    pub fn weaken_by(mut p: Proof, s: &Sequent) -> Proof {
        for a in &s.ant {
            p = Proof::weaken_l(p, a.clone());
        }
        for a in &s.suc {
            p = Proof::weaken_r(p, a.clone());
        }
        p
    }

    pub fn inference(&self) -> Option<&Inference> {
        match &self.node {
            Node::Inference(i) => Some(i),
            _ => None,
        }
    }

    pub fn premises(&self) -> &[Proof] {
        match &self.node {
            Node::Inference(i) => &i.premises,
            _ => &[],
        }
    }

    pub fn rule(&self) -> Option<&Rule> {
        self.inference().map(|i| &i.rule)
    }

    /// Subproof at a path of premise indices.
    pub fn at(&self, path: &[usize]) -> Option<&Proof> {
        let mut p = self;
        for &i in path {
            p = p.premises().get(i)?;
        }
        Some(p)
    }

    /// Number of inference nodes.
    pub fn inferences(&self) -> usize {
        match &self.node {
            Node::Inference(i) => 1 + i.premises.iter().map(Proof::inferences).sum::<usize>(),
            _ => 0,
        }
    }

    /// Number of nodes, leaves included.
    pub fn size(&self) -> usize {
        1 + self.premises().iter().map(Proof::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.premises().iter().map(Proof::depth).max().unwrap_or(0)
    }

    pub fn visit(&self, f: &mut dyn FnMut(&Proof)) {
        f(self);
        for p in self.premises() {
            p.visit(f);
        }
    }

    pub fn count_rule(&self, pred: &dyn Fn(&Rule) -> bool) -> usize {
        let mut n = 0;
        self.visit(&mut |p| {
            if p.rule().is_some_and(pred) {
                n += 1;
            }
        });
        n
    }

    pub fn links(&self) -> Vec<&Link> {
        let mut out = Vec::new();
        fn go<'a>(p: &'a Proof, out: &mut Vec<&'a Link>) {
            if let Node::Link(l) = &p.node {
                out.push(l);
            }
            for q in p.premises() {
                go(q, out);
            }
        }
        go(self, &mut out);
        out
    }

    pub fn leaves(&self) -> Vec<&Proof> {
        let mut out = Vec::new();
        fn go<'a>(p: &'a Proof, out: &mut Vec<&'a Proof>) {
            match &p.node {
                Node::Inference(i) => i.premises.iter().for_each(|q| go(q, out)),
                _ => out.push(p),
            }
        }
        go(self, &mut out);
        out
    }

    /// Cut formulas, left auxiliary side.
    pub fn cut_formulas(&self) -> Vec<Formula> {
        let mut out = Vec::new();
        self.visit(&mut |p| {
            if let Some(i) = p.inference() {
                if i.rule == Rule::Cut {
                    if let Some(a) = i.aux.iter().find(|a| a.premise == 0) {
                        if let Some(f) = i.premises[0].conclusion.get(a.occ) {
                            out.push(f.clone());
                        }
                    }
                }
            }
        });
        out
    }

    /// Applies `f` to every formula and `g` to every term stored in the
    /// tree: sequents, link arguments, induction data.
    pub fn map(&self, f: &mut dyn FnMut(&Formula) -> Formula, g: &mut dyn FnMut(&Term) -> Term) -> Proof {
        let conclusion = self.conclusion.map_formulas(f);
        let node = match &self.node {
            Node::Axiom => Node::Axiom,
            Node::Link(l) => Node::Link(Link {
                target: l.target.clone(),
                arg: g(&l.arg),
                args: l.args.iter().map(&mut *g).collect(),
            }),
            Node::Inference(i) => Node::Inference(Box::new(Inference {
                rule: i.rule.map_data(f, g),
                aux: i.aux.clone(),
                premises: i.premises.iter().map(|p| p.map(f, g)).collect(),
            })),
        };
        Proof { conclusion, node }
    }

    pub fn subst(&self, s: &TermSubst) -> Proof {
        self.map(&mut |a| s.formula(a), &mut |t| s.term(t))
    }

    /// Appends contractions, antecedent first, until no formula occurs more
    /// often than in `end`. Formulas absent from `end` are left alone.
    pub fn contract_towards(mut self, end: &Sequent) -> Result<Proof, BuildError> {
        for (side, rule) in [(Side::Ant, Rule::CL), (Side::Suc, Rule::CR)] {
            loop {
                let have = self.conclusion.side(side).clone();
                let want = end.side(side);
                let extra = have.iter().enumerate().find_map(|(i, f)| {
                    let need = want.iter().filter(|g| *g == f).count();
                    let got = have.iter().filter(|g| *g == f).count();
                    (got > need && need > 0).then_some(i)
                });
                let Some(i) = extra else { break };
                let j = (i + 1..have.len()).find(|&j| have[j] == have[i]).expect("duplicate exists");
                self = Proof::unary(rule.clone(), self, vec![Occ { side, index: i }, Occ { side, index: j }], None)?;
            }
        }
        Ok(self)
    }

    /// Replaces the stored conclusion (same multiset, other order).
    pub fn with_conclusion(mut self, s: Sequent) -> Proof {
        self.conclusion = s;
        self
    }

    /// Replaces every link leaf through `f`.
    pub fn replace_links<E>(&self, f: &mut dyn FnMut(&Link, &Sequent) -> Result<Proof, E>) -> Result<Proof, E> {
        match &self.node {
            Node::Link(l) => f(l, &self.conclusion),
            Node::Axiom => Ok(self.clone()),
            Node::Inference(i) => {
                let premises = i.premises.iter().map(|p| p.replace_links(f)).collect::<Result<Vec<_>, E>>()?;
                Ok(Proof {
                    conclusion: self.conclusion.clone(),
                    node: Node::Inference(Box::new(Inference { rule: i.rule.clone(), aux: i.aux.clone(), premises })),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Term;

    fn p(t: &str) -> Formula {
        Formula::atom("P", vec![Term::iota(t)])
    }

    #[test]
    fn canonical_layouts() {
        let ax = Proof::identity(p("x"));
        let r = Proof::unary(Rule::ImpR, ax, vec![Occ::ant(0), Occ::suc(0)], None).unwrap();
        assert_eq!(r.conclusion, Sequent::new(vec![], vec![Formula::imp(p("x"), p("x"))]));
        let w = Proof::weaken_l(r, p("y"));
        assert_eq!(w.conclusion.ant, vec![p("y")]);
        let cut = Proof::binary(
            Rule::Cut,
            Proof::axiom(Sequent::new(vec![], vec![p("a")])),
            Proof::axiom(Sequent::new(vec![p("a")], vec![p("b")])),
            Occ::suc(0),
            Occ::ant(0),
        )
        .unwrap();
        assert_eq!(cut.conclusion, Sequent::new(vec![], vec![p("b")]));
        assert_eq!(cut.inferences(), 1);
        assert_eq!(cut.size(), 3);
    }
}
