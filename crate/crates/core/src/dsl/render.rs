use super::SchemaDocument;
use crate::calculus::{conclude, AxiomPolicy, Node, Proof, Rule};
use crate::clause::{Clause, Param, SymbolDef};
use crate::resolution::Witness;
use crate::term::{ArgSort, Formula, Sequent, Side, Sort, SymbolKind, SymbolTable, Var};
use serde::Serialize;
use std::fmt::{Display, Write};

/// Version tag of interchange documents.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    format_version: u32,
    kind: &'a str,
    value: &'a T,
}

/// A versioned JSON document wrapping `value`. Struct fields keep their
/// declaration order and maps are sorted, so the output is deterministic.
pub fn interchange<T: Serialize>(kind: &str, value: &T) -> String {
    serde_json::to_string_pretty(&Envelope { format_version: FORMAT_VERSION, kind, value })
        .expect("interchange values serialize")
}

fn arg_sort(s: ArgSort) -> &'static str {
    match s {
        ArgSort::Omega => "omega",
        ArgSort::Iota => "iota",
        ArgSort::V2 => "v2",
    }
}

fn join<T: Display>(xs: impl IntoIterator<Item = T>, sep: &str) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

/// Symbol declarations and rewrite rules.
pub fn render_declarations(table: &SymbolTable, vars: &[Var]) -> String {
    let mut out = String::new();
    for x in table.v2_vars() {
        let _ = writeln!(out, "v2 {x}");
    }
    for v in vars {
        let _ = writeln!(out, "var {} : {}", v.name, v.sort);
    }
    for d in table.symbols().filter(|d| &*d.name != "0" && &*d.name != "s") {
        let args = join(d.args.iter().map(|s| arg_sort(*s)), ", ");
        let _ = match d.kind {
            SymbolKind::Function(r) if d.args.is_empty() => writeln!(out, "fun {} : {r}", d.name),
            SymbolKind::Function(r) => writeln!(out, "fun {} : {args} -> {r}", d.name),
            SymbolKind::Predicate if d.args.is_empty() => writeln!(out, "pred {}", d.name),
            SymbolKind::Predicate => writeln!(out, "pred {} : {args}", d.name),
        };
    }
    for d in table.symbols() {
        for r in d.definition.iter().flat_map(|def| &def.rules) {
            let _ = writeln!(out, "{}({}) => {};", d.name, join(&r.lhs, ", "), r.rhs);
        }
    }
    out
}

fn main_side(rule: &Rule, aux_side: Side) -> Side {
    match rule.main_counts() {
        (1, 0) => Side::Ant,
        (0, 1) => Side::Suc,
        _ => aux_side,
    }
}

/// The formula a unary rule introduces: what remains of the conclusion
/// side after removing the premise context.
fn main_formula(p: &Proof) -> Option<Formula> {
    let inf = p.inference()?;
    let prem = &inf.premises[0].conclusion;
    let aux_side = inf.aux.first().map_or(Side::Ant, |a| a.occ.side);
    let side = main_side(&inf.rule, aux_side);
    let mut rest: Vec<&Formula> = p.conclusion.side(side).iter().collect();
    for (i, f) in prem.side(side).iter().enumerate() {
        if inf.aux.iter().any(|a| a.occ.side == side && a.occ.index == i) {
            continue;
        }
        if let Some(j) = rest.iter().position(|g| *g == f) {
            rest.remove(j);
        }
    }
    match rest.as_slice() {
        [m] => Some((*m).clone()),
        _ => match side {
            Side::Ant => p.conclusion.ant.first().cloned(),
            Side::Suc => p.conclusion.suc.last().cloned(),
        },
    }
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
            | Rule::E
    )
}

fn proof_lines(p: &Proof, indent: &str, out: &mut String, next: &mut usize) -> String {
    let premises: Vec<String> = p.premises().iter().map(|q| proof_lines(q, indent, out, next)).collect();
    *next += 1;
    let label = format!("l{next}");
    let _ = match &p.node {
        Node::Axiom => writeln!(out, "{indent}{label}: axiom {}", p.conclusion),
        Node::Link(l) => {
            let args: String = l.args.iter().map(|a| format!(", {a}")).collect();
            writeln!(out, "{indent}{label}: link {}({}{args}) : {}", l.target, l.arg, p.conclusion)
        }
        Node::Inference(inf) => {
            let mut s = format!("{indent}{label}: rule {} {}", inf.rule.tag(), premises.join(" "));
            // Aux positions in the order the rule expects them.
            let mut aux = inf.aux.clone();
            if inf.rule != Rule::E {
                let mut ordered = Vec::new();
                for (pi, side) in inf.rule.aux_shape() {
                    if let Some(j) = aux.iter().position(|a| a.premise == pi && a.occ.side == side) {
                        ordered.push(aux.remove(j));
                    }
                }
                ordered.append(&mut aux);
                aux = ordered;
            }
            if inf.rule == Rule::E {
                if let Some(a) = aux.first() {
                    let c = if a.occ.side == Side::Ant { 'a' } else { 's' };
                    let _ = write!(s, " aux={c}{}", a.occ.index);
                }
            } else if !aux.is_empty() {
                let _ = write!(s, " aux={}", join(aux.iter().map(|a| a.occ.index), ","));
            }
            let main = needs_main(&inf.rule).then(|| main_formula(p)).flatten();
            if let Some(m) = &main {
                let _ = write!(s, " main={m}");
            }
            if let Some(d) = inf.rule.ind_data() {
                let _ = write!(s, " ind={}. {} at {}", d.var.name, d.formula, d.term);
            }
            let seqs: Vec<&Sequent> = inf.premises.iter().map(|q| &q.conclusion).collect();
            if conclude(&inf.rule, &seqs, &aux, main.as_ref()).ok().as_ref() != Some(&p.conclusion) {
                let _ = write!(s, " : {}", p.conclusion);
            }
            writeln!(out, "{s}")
        }
    };
    label
}

/// The lines of a proof block, one node per line, root last.
pub fn render_proof_lines(p: &Proof, indent: &str) -> String {
    let mut out = String::new();
    proof_lines(p, indent, &mut out, &mut 0);
    out
}

/// `proof name : S { ... }`.
pub fn render_proof(name: &str, p: &Proof) -> String {
    format!("proof {name} : {} {{\n{}}}\n", p.conclusion, render_proof_lines(p, "  "))
}

/// `clauses name { ... }`, one clause per line.
pub fn render_clause_list(name: &str, cs: &[Clause]) -> String {
    let body: String = cs.iter().map(|c| format!("  {c}\n")).collect();
    format!("clauses {name} {{\n{body}}}\n")
}

fn var_param(v: &Var) -> String {
    match v.sort {
        Sort::Iota => v.name.to_string(),
        Sort::Omega => format!("{}: omega", v.name),
    }
}

fn render_symdef<T: Display>(kw: &str, d: &SymbolDef<T>) -> String {
    let mut ps = vec!["n".to_string()];
    ps.extend(d.params.iter().map(|p| match p {
        Param::Var(v) => var_param(v),
        Param::V2(x) => format!("{x}: v2"),
    }));
    ps.extend(d.clause_params.iter().map(|x| format!("{x}: clause")));
    ps.extend(d.set_params.iter().map(|x| format!("{x}: set")));
    format!("{kw} {}({}) {{\n  base => {}\n  step => {}\n}}\n", d.name, ps.join(", "), d.base, d.step)
}

fn render_witness(w: &Witness) -> String {
    let mut out = String::from("witness {\n");
    for (x, c) in &w.lambda {
        let _ = writeln!(out, "  lambda {x} <- {c}");
    }
    for (x, (b, t)) in &w.theta {
        let _ = writeln!(out, "  theta {x} <- \\{b}. {t}");
    }
    for (x, c) in &w.mu {
        let _ = writeln!(out, "  mu {x} <- {c}");
    }
    if let Some(g) = w.gamma_max {
        let _ = writeln!(out, "  gamma_max {g}");
    }
    out.push_str("}\n");
    out
}

/// The whole document in the schema language; parsing the result gives
/// back an equal document.
pub fn render_document(doc: &SchemaDocument) -> String {
    let mut out = render_declarations(&doc.table, &doc.vars);
    let d = &doc.directives;
    if let Some((a, b)) = d.gamma_range {
        let _ = writeln!(out, "gamma {a}..{b}");
    }
    if let Some(g) = d.gamma_max {
        let _ = writeln!(out, "gamma_max {g}");
    }
    if let Some(a) = d.axioms {
        let a = match a {
            AxiomPolicy::Atomic => "atomic",
            AxiomPolicy::Identity => "identity",
            AxiomPolicy::AtomicIdentity => "atomic_identity",
        };
        let _ = writeln!(out, "axioms {a}");
    }
    for pair in &doc.schema.pairs {
        let ps: String = pair.params.iter().map(|v| format!(", {}", var_param(v))).collect();
        let _ = write!(
            out,
            "\npair {}(n{ps}) : {} {{\n  base {{\n{}  }}\n  step {{\n{}  }}\n}}\n",
            pair.symbol,
            pair.end_sequent,
            render_proof_lines(&pair.base, "    "),
            render_proof_lines(&pair.step, "    "),
        );
    }
    for (name, p) in &doc.proofs {
        out.push('\n');
        out.push_str(&render_proof(name, p));
    }
    for d in doc.clauses.values() {
        out.push('\n');
        out.push_str(&render_symdef("clause", d));
    }
    for name in &doc.clause_set_order {
        out.push('\n');
        out.push_str(&render_symdef("clset", &doc.clause_sets[name]));
    }
    if let Some(rs) = &doc.resolution {
        for name in &rs.order {
            out.push('\n');
            out.push_str(&render_symdef("resschema", &rs.defs[name]));
        }
    }
    if let Some(w) = &doc.witness {
        out.push('\n');
        out.push_str(&render_witness(w));
    }
    for (name, cs) in &doc.clause_lists {
        out.push('\n');
        out.push_str(&render_clause_list(name, cs));
    }
    for (name, t) in &doc.deductions {
        let _ = writeln!(out, "\ndeduction {name} = {t}");
    }
    out
}
