use super::{analyze, Node, Proof, Rule};
use crate::term::{Occ, Sequent, Side, SymbolTable};
use std::fmt;

/// What an occurrence is an ancestor of.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Anc {
    /// An end-sequent occurrence outside the configuration.
    EndSeq,
    /// An occurrence of the configuration.
    Omega,
    /// A cut formula.
    Cut,
}

impl Anc {
    /// Ω- or cut-ancestor.
    pub fn is_cut_like(self) -> bool {
        matches!(self, Anc::Omega | Anc::Cut)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideLabels {
    pub ant: Vec<Anc>,
    pub suc: Vec<Anc>,
}

impl SideLabels {
    pub fn get(&self, o: Occ) -> Anc {
        match o.side {
            Side::Ant => self.ant[o.index],
            Side::Suc => self.suc[o.index],
        }
    }

    /// The part of `s` whose labels satisfy `pred`.
    pub fn select(&self, s: &Sequent, pred: impl Fn(Anc) -> bool) -> Sequent {
        Sequent::new(
            s.ant.iter().zip(&self.ant).filter(|(_, l)| pred(**l)).map(|(f, _)| f.clone()).collect(),
            s.suc.iter().zip(&self.suc).filter(|(_, l)| pred(**l)).map(|(f, _)| f.clone()).collect(),
        )
    }

    /// Positions whose labels satisfy `pred`.
    pub fn positions(&self, pred: impl Fn(Anc) -> bool) -> Vec<Occ> {
        let a = self.ant.iter().enumerate().filter(|(_, l)| pred(**l)).map(|(i, _)| Occ::ant(i));
        let s = self.suc.iter().enumerate().filter(|(_, l)| pred(**l)).map(|(i, _)| Occ::suc(i));
        a.chain(s).collect()
    }
}

/// Labels for every occurrence of every node, shaped like the proof.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Marking {
    pub labels: SideLabels,
    pub children: Vec<Marking>,
}

impl Marking {
    pub fn at(&self, path: &[usize]) -> Option<&Marking> {
        let mut m = self;
        for &i in path {
            m = m.children.get(i)?;
        }
        Some(m)
    }
}

impl fmt::Display for Anc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Anc::EndSeq => "end",
            Anc::Omega => "omega",
            Anc::Cut => "cut",
        })
    }
}

/// Labels every occurrence of `p` as an ancestor of the configuration
/// `omega` (positions in the end-sequent), of a cut, or of the rest of the
/// end-sequent.
pub fn mark_ancestors(p: &Proof, omega: &[Occ], table: &SymbolTable) -> Result<Marking, String> {
    for o in omega {
        if p.conclusion.get(*o).is_none() {
            return Err(format!("configuration refers to unknown occurrence {o}"));
        }
    }
    let label = |o: Occ| if omega.contains(&o) { Anc::Omega } else { Anc::EndSeq };
    let root = SideLabels {
        ant: (0..p.conclusion.ant.len()).map(|i| label(Occ::ant(i))).collect(),
        suc: (0..p.conclusion.suc.len()).map(|i| label(Occ::suc(i))).collect(),
    };
    mark_from(p, root, table)
}

fn mark_from(p: &Proof, labels: SideLabels, table: &SymbolTable) -> Result<Marking, String> {
    let Node::Inference(inf) = &p.node else {
        return Ok(Marking { labels, children: Vec::new() });
    };
    let a = analyze(p, table)?;
    let binary_logical = inf.premises.len() == 2 && !matches!(inf.rule, Rule::Cut | Rule::IndPrime(_));
    let mut children = Vec::with_capacity(inf.premises.len());
    let mut aux_labels = Vec::new();
    for (i, q) in inf.premises.iter().enumerate() {
        let map = &a.maps[i];
        let lab =
            |m: &Vec<Option<Occ>>| -> Vec<Anc> { m.iter().map(|t| t.map_or(Anc::Cut, |o| labels.get(o))).collect() };
        let child = SideLabels { ant: lab(&map.ant), suc: lab(&map.suc) };
        for x in a.aux.iter().filter(|x| x.premise == i) {
            aux_labels.push(child.get(x.occ));
        }
        children.push(mark_from(q, child, table)?);
    }
    if binary_logical && aux_labels.len() == 2 && aux_labels[0].is_cut_like() != aux_labels[1].is_cut_like() {
        return Err(format!("{}: auxiliary formulas have mixed ancestry", inf.rule));
    }
    Ok(Marking { labels, children })
}
