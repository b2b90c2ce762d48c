use super::lexer::{lex, Tok, TokKind};
use super::{Diagnostic, SchemaDocument};
use crate::calculus::{Aux, AxiomPolicy, IndData, Proof, Rule, SchemaPair};
use crate::charset::ClauseSetTerm;
use crate::clause::{ClauseExpr, Param, SymApp, SymbolDef};
use crate::resolution::{ResTerm, ResolutionSchema};
use crate::term::{
    sym, ArgSort, Formula, Occ, RuleSide, Sequent, Side, Sort, Sym, SymbolKind, TableError, Term, Var, PARAM_K, PARAM_N,
};
use std::collections::{BTreeMap, BTreeSet};

type PResult<T> = Result<T, ()>;
type Pos = (usize, usize);

const KEYWORDS: &[&str] = &[
    "fun",
    "function",
    "pred",
    "predicate",
    "v2",
    "var",
    "define",
    "pair",
    "proof",
    "clause",
    "clset",
    "resschema",
    "witness",
    "clauses",
    "deduction",
    "gamma",
    "gamma_max",
    "axioms",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SigKind {
    Pair,
    Clause,
    Clset,
    Res,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PSort {
    Omega,
    Iota,
    V2,
    Clause,
    Set,
}

#[derive(Clone, Debug)]
struct Sig {
    kind: SigKind,
    params: Vec<(String, PSort, Pos)>,
}

#[derive(Clone, Copy, Debug)]
enum Bind {
    Var(Sort),
    Clause,
    Set,
}

#[derive(Clone, Copy, Debug)]
enum AuxItem {
    Index(usize),
    Sided(Side, usize),
}

#[derive(Clone, Debug)]
enum LineKind {
    Axiom(Sequent),
    Link { target: Sym, arg: Term, args: Vec<Term> },
    Rule { rule: Rule, premises: Vec<(String, Pos)>, aux: Vec<AuxItem>, main: Option<Formula> },
}

#[derive(Clone, Debug)]
struct Line {
    label: String,
    pos: Pos,
    kind: LineKind,
    assert: Option<Sequent>,
}

struct PendingPair {
    symbol: Sym,
    params: Vec<Var>,
    end: Sequent,
    base: Option<Vec<Line>>,
    step: Option<Vec<Line>>,
    pos: Pos,
}

struct PendingProof {
    name: Sym,
    end: Option<Sequent>,
    lines: Option<Vec<Line>>,
    pos: Pos,
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    limit: Option<Tok>,
    diags: Vec<Diagnostic>,
    doc: SchemaDocument,
    sigs: BTreeMap<String, Sig>,
    defined: BTreeMap<String, Pos>,
    decl_pos: BTreeMap<String, Pos>,
    scope: Vec<(String, Bind)>,
    auto_v2: bool,
    var_decls: BTreeMap<String, Sort>,
    pair_headers: BTreeMap<Sym, (Vec<Var>, Sequent)>,
    pairs: Vec<PendingPair>,
    proofs: Vec<PendingProof>,
}

/// Parses a schema document. Errors carry line and column; parsing
/// resumes at the next statement so one run reports several errors.
pub fn parse_schema_file(text: &str) -> Result<SchemaDocument, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let toks = lex(text, &mut diags);
    let mut p = Parser {
        toks,
        pos: 0,
        limit: None,
        diags,
        doc: SchemaDocument::default(),
        sigs: BTreeMap::new(),
        defined: BTreeMap::new(),
        decl_pos: BTreeMap::new(),
        scope: Vec::new(),
        auto_v2: false,
        var_decls: BTreeMap::new(),
        pair_headers: BTreeMap::new(),
        pairs: Vec::new(),
        proofs: Vec::new(),
    };
    p.prescan();
    p.file();
    p.finish();
    if p.diags.is_empty() {
        Ok(p.doc)
    } else {
        p.diags.sort();
        p.diags.dedup();
        Err(p.diags)
    }
}

fn describe(t: &TokKind) -> String {
    match t {
        TokKind::Ident(s) => format!("`{s}`"),
        TokKind::Num(n) => format!("`{n}`"),
        TokKind::Punct(p) => format!("`{p}`"),
        TokKind::Eof => "end of input".into(),
    }
}

fn sort_name(s: &str) -> Option<PSort> {
    Some(match s {
        "omega" => PSort::Omega,
        "iota" => PSort::Iota,
        "v2" => PSort::V2,
        "clause" => PSort::Clause,
        "set" => PSort::Set,
        _ => return None,
    })
}

fn table_error_symbol(e: &TableError) -> Option<&Sym> {
    match e {
        TableError::Duplicate(s)
        | TableError::Unknown(s)
        | TableError::MissingBase(s)
        | TableError::MissingStep(s)
        | TableError::ExtraRule(s, _)
        | TableError::RecursionSort(s) => Some(s),
        TableError::Arity { name, .. }
        | TableError::Shape { name, .. }
        | TableError::VariableCondition { name, .. }
        | TableError::NotPrimitive { name, .. } => Some(name),
        TableError::Sort { .. } | TableError::Cycle(_) => None,
    }
}

impl Parser {
    // -- token access -----------------------------------------------------

    fn tok(&self) -> &Tok {
        let t = &self.toks[self.pos];
        match &self.limit {
            Some(l) if t.line != l.line => l,
            _ => t,
        }
    }

    fn kind(&self) -> &TokKind {
        &self.tok().kind
    }

    fn ahead(&self, n: usize) -> &TokKind {
        let i = (self.pos + n).min(self.toks.len() - 1);
        let t = &self.toks[i];
        match &self.limit {
            Some(l) if t.line != l.line => &TokKind::Eof,
            _ => &t.kind,
        }
    }

    fn here(&self) -> Pos {
        let t = self.tok();
        (t.line, t.col)
    }

    fn at_end(&self) -> bool {
        matches!(self.kind(), TokKind::Eof)
    }

    fn bump(&mut self) {
        if !self.at_end() {
            self.pos += 1;
        }
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.kind(), TokKind::Punct(q) if *q == p)
    }

    fn is_ident(&self, s: &str) -> bool {
        matches!(self.kind(), TokKind::Ident(q) if q == s)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        let hit = self.is_punct(p);
        if hit {
            self.bump();
        }
        hit
    }

    fn error_at(&mut self, pos: Pos, msg: impl Into<String>) {
        self.diags.push(Diagnostic::new(pos.0, pos.1, msg));
    }

    fn fail<T>(&mut self, msg: impl Into<String>) -> PResult<T> {
        let pos = self.here();
        self.error_at(pos, msg);
        Err(())
    }

    fn expected<T>(&mut self, what: &str) -> PResult<T> {
        let found =
            if self.limit.is_some() && self.at_end() { "end of line".to_string() } else { describe(self.kind()) };
        self.fail(format!("expected {what}, found {found}"))
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.expected(&format!("`{p}`"))
        }
    }

    fn expect_keyword(&mut self, k: &str) -> PResult<()> {
        if self.is_ident(k) {
            self.bump();
            Ok(())
        } else {
            self.expected(&format!("`{k}`"))
        }
    }

    fn ident(&mut self) -> PResult<(String, Pos)> {
        let pos = self.here();
        match self.kind().clone() {
            TokKind::Ident(s) => {
                self.bump();
                Ok((s, pos))
            }
            _ => self.expected("an identifier"),
        }
    }

    fn number(&mut self) -> PResult<u64> {
        match *self.kind() {
            TokKind::Num(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.expected("a number"),
        }
    }

    fn set_limit(&mut self, line: usize) {
        let col = self.toks.iter().filter(|t| t.line == line).map(|t| t.col + 1).max().unwrap_or(1);
        self.limit = Some(Tok { kind: TokKind::Eof, line, col });
    }

    /// Runs `f`; on failure rewinds and drops its diagnostics.
    fn attempt<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> Option<T> {
        let (pos, nd) = (self.pos, self.diags.len());
        match f(self) {
            Ok(v) => Some(v),
            Err(()) => {
                self.pos = pos;
                self.diags.truncate(nd);
                None
            }
        }
    }

    fn first_on_line(&self, i: usize) -> bool {
        i == 0 || self.toks[i - 1].line != self.toks[i].line
    }

    fn statement_start(&self, i: usize) -> bool {
        if !self.first_on_line(i) {
            return false;
        }
        match &self.toks[i].kind {
            TokKind::Ident(s) => {
                KEYWORDS.contains(&s.as_str())
                    || (self.doc.table.get(s).is_some()
                        && matches!(self.toks.get(i + 1).map(|t| &t.kind), Some(TokKind::Punct("("))))
            }
            _ => false,
        }
    }

    fn sync(&mut self, start: usize) {
        self.limit = None;
        if self.pos == start {
            self.pos += 1;
        }
        while self.pos < self.toks.len() - 1 && !self.statement_start(self.pos) {
            self.pos += 1;
        }
    }

    fn define(&mut self, name: &str, pos: Pos) -> PResult<()> {
        if let Some(&(l, c)) = self.defined.get(name) {
            self.error_at(pos, format!("duplicate definition of `{name}` (first defined at {l}:{c})"));
            return Err(());
        }
        self.defined.insert(name.to_string(), pos);
        Ok(())
    }

    fn lookup(&self, name: &str) -> Option<Bind> {
        self.scope.iter().rev().find(|(n, _)| n == name).map(|(_, b)| *b)
    }

    fn is_v2(&self, name: &str) -> bool {
        self.doc.table.is_v2(name)
    }

    fn ensure_v2(&mut self, name: &str, pos: Pos) -> PResult<()> {
        if self.is_v2(name) {
            return Ok(());
        }
        if !self.doc.table.declare_v2(name) {
            self.error_at(pos, format!("`{name}` is already declared and cannot be a second-order variable"));
            return Err(());
        }
        self.decl_pos.entry(name.to_string()).or_insert(pos);
        Ok(())
    }

    // -- driver -----------------------------------------------------------

    /// Collects the headers of schema symbols so they can be used before
    /// their definition.
    fn prescan(&mut self) {
        for i in 0..self.toks.len().saturating_sub(2) {
            let kind = match &self.toks[i].kind {
                TokKind::Ident(s) if self.first_on_line(i) => match s.as_str() {
                    "pair" => SigKind::Pair,
                    "clause" => SigKind::Clause,
                    "clset" => SigKind::Clset,
                    "resschema" => SigKind::Res,
                    _ => continue,
                },
                _ => continue,
            };
            let TokKind::Ident(name) = self.toks[i + 1].kind.clone() else { continue };
            self.pos = i + 2;
            let nd = self.diags.len();
            if let Ok(params) = self.param_list() {
                self.sigs.entry(name).or_insert(Sig { kind, params });
            }
            self.diags.truncate(nd);
        }
        self.pos = 0;
    }

    fn file(&mut self) {
        while !self.at_end() {
            let start = self.pos;
            if self.statement().is_err() {
                self.sync(start);
            } else {
                self.eat_punct(";");
            }
        }
    }

    fn statement(&mut self) -> PResult<()> {
        let TokKind::Ident(kw) = self.kind().clone() else {
            return self.expected("a declaration");
        };
        match kw.as_str() {
            "fun" | "function" => self.decl_function(),
            "pred" | "predicate" => self.decl_predicate(),
            "v2" => self.decl_v2(),
            "var" => self.decl_var(),
            "define" => {
                self.bump();
                self.rule_def()
            }
            "pair" => self.pair(),
            "proof" => self.named_proof(),
            "clause" => self.symdef(SigKind::Clause),
            "clset" => self.symdef(SigKind::Clset),
            "resschema" => self.symdef(SigKind::Res),
            "witness" => self.witness(),
            "clauses" => self.clause_list(),
            "deduction" => self.deduction(),
            "gamma" => {
                self.bump();
                let a = self.number()?;
                self.expect_punct("..")?;
                let b = self.number()?;
                if b < a {
                    return self.fail(format!("empty range {a}..{b}"));
                }
                self.doc.directives.gamma_range = Some((a, b));
                Ok(())
            }
            "gamma_max" => {
                self.bump();
                self.doc.directives.gamma_max = Some(self.number()?);
                Ok(())
            }
            "axioms" => {
                self.bump();
                let (v, pos) = self.ident()?;
                let policy = match v.as_str() {
                    "atomic" => AxiomPolicy::Atomic,
                    "identity" => AxiomPolicy::Identity,
                    "atomic_identity" => AxiomPolicy::AtomicIdentity,
                    _ => {
                        self.error_at(pos, format!("unknown axiom policy `{v}`"));
                        return Err(());
                    }
                };
                self.doc.directives.axioms = Some(policy);
                Ok(())
            }
            _ if self.doc.table.get(&kw).is_some() => self.rule_def(),
            _ => self.expected("a declaration"),
        }
    }

    // -- declarations -----------------------------------------------------

    fn sort_list(&mut self) -> PResult<Vec<(PSort, Pos)>> {
        let mut out = Vec::new();
        loop {
            let (s, pos) = self.ident()?;
            match sort_name(&s) {
                Some(ps @ (PSort::Omega | PSort::Iota | PSort::V2)) => out.push((ps, pos)),
                _ => {
                    self.error_at(pos, format!("unknown sort `{s}`"));
                    return Err(());
                }
            }
            if !self.eat_punct(",") {
                return Ok(out);
            }
        }
    }

    fn arg_sort(p: PSort) -> ArgSort {
        match p {
            PSort::Omega => ArgSort::Omega,
            PSort::V2 => ArgSort::V2,
            _ => ArgSort::Iota,
        }
    }

    fn first_order(&mut self, p: PSort, pos: Pos) -> PResult<Sort> {
        match p {
            PSort::Omega => Ok(Sort::Omega),
            PSort::Iota => Ok(Sort::Iota),
            _ => {
                self.error_at(pos, "expected sort omega or iota");
                Err(())
            }
        }
    }

    fn decl_function(&mut self) -> PResult<()> {
        self.bump();
        let (name, pos) = self.ident()?;
        self.expect_punct(":")?;
        let mut sorts = self.sort_list()?;
        let (result, rpos) = if self.eat_punct("->") {
            let r = self.sort_list()?;
            if r.len() != 1 {
                return self.fail("expected a single result sort");
            }
            r[0]
        } else {
            if sorts.len() != 1 {
                return self.fail("expected `->` and a result sort");
            }
            sorts.pop().expect("one sort")
        };
        let result = self.first_order(result, rpos)?;
        let args = sorts.into_iter().map(|(s, _)| Self::arg_sort(s)).collect();
        if !self.doc.table.declare_function(&name, args, result) {
            self.error_at(pos, format!("duplicate symbol `{name}`"));
            return Err(());
        }
        self.decl_pos.insert(name, pos);
        Ok(())
    }

    fn decl_predicate(&mut self) -> PResult<()> {
        self.bump();
        let (name, pos) = self.ident()?;
        let args = if self.eat_punct(":") {
            self.sort_list()?.into_iter().map(|(s, _)| Self::arg_sort(s)).collect()
        } else {
            Vec::new()
        };
        if !self.doc.table.declare_predicate(&name, args) {
            self.error_at(pos, format!("duplicate symbol `{name}`"));
            return Err(());
        }
        self.decl_pos.insert(name, pos);
        Ok(())
    }

    fn decl_v2(&mut self) -> PResult<()> {
        self.bump();
        loop {
            let (name, pos) = self.ident()?;
            if !self.doc.table.declare_v2(&name) {
                self.error_at(pos, format!("duplicate symbol `{name}`"));
                return Err(());
            }
            self.decl_pos.insert(name, pos);
            if !self.eat_punct(",") {
                return Ok(());
            }
        }
    }

    fn decl_var(&mut self) -> PResult<()> {
        self.bump();
        let mut names = Vec::new();
        loop {
            let (name, pos) = self.ident()?;
            if name == PARAM_N || name == PARAM_K {
                self.error_at(pos, format!("`{name}` is a reserved parameter"));
                return Err(());
            }
            names.push((name, pos));
            if !self.eat_punct(",") {
                break;
            }
        }
        let sort = if self.eat_punct(":") {
            let (s, pos) = self.ident()?;
            match sort_name(&s) {
                Some(p) => self.first_order(p, pos)?,
                None => {
                    self.error_at(pos, format!("unknown sort `{s}`"));
                    return Err(());
                }
            }
        } else {
            Sort::Iota
        };
        for (name, _) in names {
            self.doc.vars.push(Var::new(&name, sort));
            self.var_decls.insert(name, sort);
        }
        Ok(())
    }

    /// `f(l1, ..., lm) => rhs`.
    fn rule_def(&mut self) -> PResult<()> {
        let (name, pos) = self.ident()?;
        let Some(decl) = self.doc.table.get(&name).cloned() else {
            self.error_at(pos, format!("symbol `{name}` is not declared"));
            return Err(());
        };
        self.expect_punct("(")?;
        self.auto_v2 = true;
        let mut lhs = Vec::new();
        let mut res = Ok(());
        for (i, s) in decl.args.iter().enumerate() {
            if i > 0 {
                if let Err(e) = self.expect_punct(",") {
                    res = Err(e);
                    break;
                }
            }
            match self.term(*s) {
                Ok(t) => lhs.push(t),
                Err(e) => {
                    res = Err(e);
                    break;
                }
            }
        }
        self.auto_v2 = false;
        res?;
        self.expect_punct(")")?;
        if !self.eat_punct("=>") {
            self.expect_punct("=")?;
        }
        let mut vars = BTreeSet::new();
        for t in &lhs {
            t.collect_vars(&mut vars);
        }
        let depth = self.scope.len();
        self.scope.extend(vars.iter().map(|v| (v.name.to_string(), Bind::Var(v.sort))));
        let rhs = match decl.kind {
            SymbolKind::Function(s) => self.term(ArgSort::of(s)).map(RuleSide::Term),
            SymbolKind::Predicate => self.formula().map(RuleSide::Formula),
        };
        self.scope.truncate(depth);
        let rhs = rhs?;
        if let Err(e) = self.doc.table.add_rule(&name, lhs, rhs) {
            self.error_at(pos, e.to_string());
            return Err(());
        }
        self.decl_pos.entry(name).or_insert(pos);
        Ok(())
    }

    // -- terms and formulas ----------------------------------------------

    pub(crate) fn term(&mut self, want: ArgSort) -> PResult<Term> {
        let start = self.here();
        let mut t = self.term_atom(want)?;
        if want == ArgSort::Omega {
            while self.is_punct("+") && matches!(self.ahead(1), TokKind::Num(_)) {
                self.bump();
                let m = self.number()?;
                t = Term::plus(t, m);
            }
        }
        if want != ArgSort::V2 {
            match self.doc.table.sort_of(&t) {
                Ok(s) if ArgSort::of(s) == want => {}
                Ok(s) => self.error_at(start, format!("expected a term of sort {want}, found `{t}` of sort {s}")),
                Err(e) => self.error_at(start, e.to_string()),
            }
        }
        Ok(t)
    }

    fn term_atom(&mut self, want: ArgSort) -> PResult<Term> {
        let pos = self.here();
        match self.kind().clone() {
            TokKind::Num(m) => {
                self.bump();
                Ok(Term::numeral(m))
            }
            TokKind::Ident(name) => {
                self.bump();
                if self.is_punct("(") {
                    if self.is_v2(&name) && self.lookup(&name).is_none() {
                        self.bump();
                        let i = self.term(ArgSort::Omega)?;
                        self.expect_punct(")")?;
                        return Ok(Term::Idx(sym(&name), Box::new(i)));
                    }
                    let decl = match self.doc.table.get(&name) {
                        Some(d) if matches!(d.kind, SymbolKind::Function(_)) => d.clone(),
                        Some(_) => {
                            self.error_at(pos, format!("predicate `{name}` used as a function"));
                            return Err(());
                        }
                        None => {
                            self.error_at(pos, format!("unknown function `{name}`"));
                            return Err(());
                        }
                    };
                    self.bump();
                    let mut args = Vec::new();
                    for (i, s) in decl.args.iter().enumerate() {
                        if i > 0 {
                            self.expect_punct(",")?;
                        }
                        args.push(self.term(*s)?);
                    }
                    self.expect_punct(")")?;
                    return Ok(Term::App(sym(&name), args));
                }
                if want == ArgSort::V2 {
                    if self.is_v2(&name) {
                        return Ok(Term::V2(sym(&name)));
                    }
                    if self.auto_v2 && self.doc.table.get(&name).is_none() {
                        self.ensure_v2(&name, pos)?;
                        return Ok(Term::V2(sym(&name)));
                    }
                    self.error_at(pos, format!("expected a second-order variable, found `{name}`"));
                    return Err(());
                }
                match self.lookup(&name) {
                    Some(Bind::Var(s)) => return Ok(Term::var(&name, s)),
                    Some(_) => {
                        self.error_at(pos, format!("`{name}` is not a term"));
                        return Err(());
                    }
                    None => {}
                }
                if let Some(d) = self.doc.table.get(&name) {
                    if matches!(d.kind, SymbolKind::Function(_)) && d.args.is_empty() {
                        return Ok(Term::App(sym(&name), Vec::new()));
                    }
                    self.error_at(pos, format!("`{name}` needs arguments"));
                    return Err(());
                }
                if let Some(s) = self.var_decls.get(&name) {
                    return Ok(Term::var(&name, *s));
                }
                if name == PARAM_N || name == PARAM_K {
                    return Ok(Term::omega(&name));
                }
                let sort = if want == ArgSort::Omega { Sort::Omega } else { Sort::Iota };
                Ok(Term::var(&name, sort))
            }
            _ => self.expected("a term"),
        }
    }

    fn starts_formula(&self) -> bool {
        matches!(self.kind(), TokKind::Ident(_) | TokKind::Punct("~") | TokKind::Punct("("))
    }

    pub(crate) fn formula(&mut self) -> PResult<Formula> {
        let a = self.disjunction()?;
        if self.eat_punct("->") {
            let b = self.formula()?;
            return Ok(Formula::imp(a, b));
        }
        Ok(a)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut a = self.conjunction()?;
        while self.eat_punct("\\/") {
            let b = self.conjunction()?;
            a = Formula::or(a, b);
        }
        Ok(a)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut a = self.unary()?;
        while self.eat_punct("/\\") {
            let b = self.unary()?;
            a = Formula::and(a, b);
        }
        Ok(a)
    }

    fn unary(&mut self) -> PResult<Formula> {
        if self.eat_punct("~") {
            return Ok(Formula::not(self.unary()?));
        }
        if self.eat_punct("(") {
            let a = self.formula()?;
            self.expect_punct(")")?;
            return Ok(a);
        }
        let pos = self.here();
        let TokKind::Ident(name) = self.kind().clone() else {
            return self.expected("a formula");
        };
        let quant = (name == "all" || name == "ex") && matches!(self.ahead(1), TokKind::Ident(_));
        if quant && self.doc.table.get(&name).is_none() {
            self.bump();
            let (v, vpos) = self.ident()?;
            let sort = if self.eat_punct(":") {
                let (s, spos) = self.ident()?;
                match sort_name(&s) {
                    Some(p) => self.first_order(p, spos)?,
                    None => {
                        self.error_at(spos, format!("unknown sort `{s}`"));
                        return Err(());
                    }
                }
            } else {
                Sort::Iota
            };
            if v == PARAM_N || v == PARAM_K {
                self.error_at(vpos, format!("`{v}` is a reserved parameter"));
                return Err(());
            }
            self.expect_punct(".")?;
            self.scope.push((v.clone(), Bind::Var(sort)));
            let body = self.formula();
            self.scope.pop();
            let var = Var::new(&v, sort);
            return Ok(if name == "all" { Formula::forall(var, body?) } else { Formula::exists(var, body?) });
        }
        self.bump();
        match self.doc.table.get(&name) {
            Some(d) if d.kind == SymbolKind::Predicate => {
                let d = d.clone();
                let mut args = Vec::new();
                if !d.args.is_empty() {
                    self.expect_punct("(")?;
                    for (i, s) in d.args.iter().enumerate() {
                        if i > 0 {
                            self.expect_punct(",")?;
                        }
                        args.push(self.term(*s)?);
                    }
                    self.expect_punct(")")?;
                }
                Ok(Formula::Atom(sym(&name), args))
            }
            Some(_) => {
                self.error_at(pos, format!("function `{name}` used as a predicate"));
                Err(())
            }
            None if name == "true" => Ok(Formula::Top),
            None if name == "false" => Ok(Formula::Bottom),
            None => {
                self.error_at(pos, format!("unknown predicate `{name}`"));
                Err(())
            }
        }
    }

    fn formula_list(&mut self) -> PResult<Vec<Formula>> {
        let mut out = Vec::new();
        if !self.starts_formula() {
            return Ok(out);
        }
        loop {
            out.push(self.formula()?);
            if !self.eat_punct(",") {
                return Ok(out);
            }
        }
    }

    pub(crate) fn sequent(&mut self) -> PResult<Sequent> {
        let ant = self.formula_list()?;
        self.expect_punct("|-")?;
        let suc = self.formula_list()?;
        Ok(Sequent::new(ant, suc))
    }

    // -- schema headers ---------------------------------------------------

    /// `(n, p [: sort], ...)`.
    fn param_list(&mut self) -> PResult<Vec<(String, PSort, Pos)>> {
        self.expect_punct("(")?;
        let (first, pos) = self.ident()?;
        if first != PARAM_N {
            self.error_at(pos, format!("the first parameter must be `{PARAM_N}`"));
            return Err(());
        }
        let mut out: Vec<(String, PSort, Pos)> = Vec::new();
        while self.eat_punct(",") {
            let (name, pos) = self.ident()?;
            if name == PARAM_N || name == PARAM_K {
                self.error_at(pos, format!("`{name}` is a reserved parameter"));
                return Err(());
            }
            let sort = if self.eat_punct(":") {
                let (s, spos) = self.ident()?;
                match sort_name(&s) {
                    Some(p) => p,
                    None => {
                        self.error_at(spos, format!("unknown sort `{s}`"));
                        return Err(());
                    }
                }
            } else {
                PSort::Iota
            };
            if out.iter().any(|(n, _, _)| *n == name) {
                self.error_at(pos, format!("duplicate parameter `{name}`"));
                return Err(());
            }
            out.push((name, sort, pos));
        }
        self.expect_punct(")")?;
        let rank = |s: PSort| match s {
            PSort::Omega | PSort::Iota | PSort::V2 => 0,
            PSort::Clause => 1,
            PSort::Set => 2,
        };
        if out.windows(2).any(|w| rank(w[0].1) > rank(w[1].1)) {
            self.error_at(pos, "term parameters come first, then clause, then set parameters");
            return Err(());
        }
        Ok(out)
    }

    fn sig(&self, name: &str, kind: SigKind) -> Option<Sig> {
        self.sigs.get(name).filter(|s| s.kind == kind).cloned()
    }

    fn sym_app(&mut self, name: &str, sig: &Sig) -> PResult<SymApp> {
        self.expect_punct("(")?;
        let arith = self.term(ArgSort::Omega)?;
        let mut app = SymApp::new(sym(name), arith, Vec::new());
        for (_, s, _) in &sig.params {
            self.expect_punct(",")?;
            match s {
                PSort::Clause => app.clauses.push(self.clause_expr()?),
                PSort::Set => app.sets.push(self.clset_sum()?),
                s => app.terms.push(self.term(Self::arg_sort(*s))?),
            }
        }
        if self.is_punct(",") {
            return self.fail(format!("too many arguments for `{name}`"));
        }
        self.expect_punct(")")?;
        Ok(app)
    }

    // -- proofs -----------------------------------------------------------

    fn pair(&mut self) -> PResult<()> {
        self.bump();
        let (name, pos) = self.ident()?;
        let params = self.param_list()?;
        self.define(&name, pos)?;
        let mut vars = Vec::new();
        for (p, s, ppos) in &params {
            let s = self.first_order(*s, *ppos)?;
            vars.push(Var::new(p, s));
        }
        let depth = self.scope.len();
        self.scope.push((PARAM_N.to_string(), Bind::Var(Sort::Omega)));
        self.scope.extend(vars.iter().map(|v| (v.name.to_string(), Bind::Var(v.sort))));
        let r = self.pair_body();
        self.scope.truncate(depth);
        let (end, base, step) = r?;
        self.pair_headers.insert(sym(&name), (vars.clone(), end.clone()));
        self.pairs.push(PendingPair { symbol: sym(&name), params: vars, end, base, step, pos });
        Ok(())
    }

    fn pair_body(&mut self) -> PResult<(Sequent, Option<Vec<Line>>, Option<Vec<Line>>)> {
        self.expect_punct(":")?;
        let end = self.sequent()?;
        self.expect_punct("{")?;
        self.expect_keyword("base")?;
        let base = self.lines()?;
        self.expect_keyword("step")?;
        let step = self.lines()?;
        self.expect_punct("}")?;
        Ok((end, base, step))
    }

    fn named_proof(&mut self) -> PResult<()> {
        self.bump();
        let (name, pos) = self.ident()?;
        self.define(&name, pos)?;
        let end = if self.eat_punct(":") { Some(self.sequent()?) } else { None };
        let lines = self.lines()?;
        self.proofs.push(PendingProof { name: sym(&name), end, lines, pos });
        Ok(())
    }

    /// `{ line* }`; a bad line is reported and skipped, and the block
    /// comes back as `None`.
    fn lines(&mut self) -> PResult<Option<Vec<Line>>> {
        self.expect_punct("{")?;
        let mut out = Vec::new();
        let mut ok = true;
        loop {
            if self.eat_punct("}") {
                break;
            }
            if self.at_end() {
                return self.fail("unclosed proof block");
            }
            match self.proof_line() {
                Ok(l) => out.push(l),
                Err(()) => ok = false,
            }
        }
        Ok(ok.then_some(out))
    }

    fn proof_line(&mut self) -> PResult<Line> {
        let line = self.tok().line;
        self.set_limit(line);
        let mut r = self.proof_line_inner();
        if r.is_ok() && !self.at_end() {
            r = self.expected("end of line");
        }
        self.limit = None;
        if r.is_err() {
            while self.pos < self.toks.len() - 1 && self.toks[self.pos].line == line {
                self.pos += 1;
            }
        }
        r
    }

    fn is_option(&self, name: &str) -> bool {
        self.is_ident(name) && matches!(self.ahead(1), TokKind::Punct("="))
    }

    fn proof_line_inner(&mut self) -> PResult<Line> {
        let (label, pos) = self.ident()?;
        self.expect_punct(":")?;
        if self.is_ident("axiom") {
            self.bump();
            let s = self.sequent()?;
            return Ok(Line { label, pos, kind: LineKind::Axiom(s), assert: None });
        }
        if self.is_ident("link") {
            self.bump();
            let (target, tpos) = self.ident()?;
            let Some(sig) = self.sig(&target, SigKind::Pair) else {
                self.error_at(tpos, format!("unknown proof symbol `{target}`"));
                return Err(());
            };
            self.expect_punct("(")?;
            let arg = self.term(ArgSort::Omega)?;
            let mut args = Vec::new();
            for (_, s, _) in &sig.params {
                self.expect_punct(",")?;
                args.push(self.term(Self::arg_sort(*s))?);
            }
            self.expect_punct(")")?;
            let assert = if self.eat_punct(":") { Some(self.sequent()?) } else { None };
            return Ok(Line { label, pos, kind: LineKind::Link { target: sym(&target), arg, args }, assert });
        }
        if self.is_ident("rule") {
            self.bump();
        }
        let (mut tag, tpos) = self.ident()?;
        if self.is_punct(":") && matches!(self.ahead(1), TokKind::Ident(_)) {
            self.bump();
            let (t2, _) = self.ident()?;
            tag = format!("{tag}:{t2}");
        }
        let mut premises = Vec::new();
        while matches!(self.kind(), TokKind::Ident(_)) && !["aux", "main", "ind"].iter().any(|o| self.is_option(o)) {
            premises.push(self.ident()?);
        }
        let mut aux = Vec::new();
        let mut main = None;
        let mut ind = None;
        loop {
            if self.is_option("aux") {
                self.bump();
                self.bump();
                loop {
                    aux.push(self.aux_item()?);
                    if !self.eat_punct(",") {
                        break;
                    }
                }
            } else if self.is_option("main") {
                self.bump();
                self.bump();
                main = Some(self.formula()?);
            } else if self.is_option("ind") {
                self.bump();
                self.bump();
                let (v, _) = self.ident()?;
                self.expect_punct(".")?;
                self.scope.push((v.clone(), Bind::Var(Sort::Omega)));
                let f = self.formula();
                self.scope.pop();
                let f = f?;
                self.expect_keyword("at")?;
                let t = self.term(ArgSort::Omega)?;
                ind = Some(IndData { var: Var::omega(&v), formula: f, term: t });
            } else {
                break;
            }
        }
        let rule = match tag.as_str() {
            "ind" | "ind'" => {
                let Some(d) = ind else {
                    self.error_at(tpos, format!("`{tag}` needs `ind=v. F at t`"));
                    return Err(());
                };
                if tag == "ind" {
                    Rule::Ind(d)
                } else {
                    Rule::IndPrime(d)
                }
            }
            _ => match Rule::from_tag(&tag) {
                Some(r) => r,
                None => {
                    self.error_at(tpos, format!("unknown rule `{tag}`"));
                    return Err(());
                }
            },
        };
        let assert = if self.eat_punct(":") { Some(self.sequent()?) } else { None };
        Ok(Line { label, pos, kind: LineKind::Rule { rule, premises, aux, main }, assert })
    }

    fn aux_item(&mut self) -> PResult<AuxItem> {
        match self.kind().clone() {
            TokKind::Num(n) => {
                self.bump();
                Ok(AuxItem::Index(n as usize))
            }
            TokKind::Ident(s) => {
                let side = match s.chars().next() {
                    Some('a') => Some(Side::Ant),
                    Some('s') => Some(Side::Suc),
                    _ => None,
                };
                match (side, s[1..].parse::<usize>()) {
                    (Some(side), Ok(i)) => {
                        self.bump();
                        Ok(AuxItem::Sided(side, i))
                    }
                    _ => self.expected("an aux position like `0`, `a0` or `s0`"),
                }
            }
            _ => self.expected("an aux position"),
        }
    }

    // -- clause schemata --------------------------------------------------

    fn clause_expr(&mut self) -> PResult<ClauseExpr> {
        let mut e = self.clause_atom()?;
        while self.eat_punct("++") {
            let b = self.clause_atom()?;
            e = ClauseExpr::merge(e, b);
        }
        Ok(e)
    }

    fn clause_atom(&mut self) -> PResult<ClauseExpr> {
        if self.is_punct("(") {
            if let Some(s) = self.attempt(|p| {
                p.bump();
                let s = p.sequent()?;
                p.expect_punct(")")?;
                Ok(s)
            }) {
                return Ok(ClauseExpr::Clause(s));
            }
            self.bump();
            let e = self.clause_expr()?;
            self.expect_punct(")")?;
            return Ok(e);
        }
        let (name, pos) = self.ident()?;
        if let Some(sig) = self.sig(&name, SigKind::Clause) {
            return Ok(ClauseExpr::Symbol(self.sym_app(&name, &sig)?));
        }
        if let Some(Bind::Clause) = self.lookup(&name) {
            return Ok(ClauseExpr::Var(sym(&name)));
        }
        self.error_at(pos, format!("unknown clause symbol or variable `{name}`"));
        Err(())
    }

    fn clset_sum(&mut self) -> PResult<ClauseSetTerm> {
        let mut a = self.clset_product()?;
        while self.is_punct("+") && !matches!(self.ahead(1), TokKind::Num(_)) {
            self.bump();
            let b = self.clset_product()?;
            a = ClauseSetTerm::plus(a, b);
        }
        Ok(a)
    }

    fn clset_product(&mut self) -> PResult<ClauseSetTerm> {
        let mut a = self.clset_atom()?;
        while self.eat_punct("*") {
            let b = self.clset_atom()?;
            a = ClauseSetTerm::times(a, b);
        }
        Ok(a)
    }

    fn clset_atom(&mut self) -> PResult<ClauseSetTerm> {
        if self.eat_punct("[") {
            if let Some(e) = self.attempt(|p| {
                let e = p.clause_expr()?;
                p.expect_punct("]")?;
                Ok(e)
            }) {
                return Ok(ClauseSetTerm::Leaf(e));
            }
            let s = self.sequent()?;
            self.expect_punct("]")?;
            return Ok(ClauseSetTerm::Leaf(ClauseExpr::Clause(s)));
        }
        if self.eat_punct("(") {
            let t = self.clset_sum()?;
            self.expect_punct(")")?;
            return Ok(t);
        }
        let (name, pos) = self.ident()?;
        if let Some(sig) = self.sig(&name, SigKind::Clset) {
            return Ok(ClauseSetTerm::Symbol(self.sym_app(&name, &sig)?));
        }
        if let Some(Bind::Set) = self.lookup(&name) {
            return Ok(ClauseSetTerm::Var(sym(&name)));
        }
        self.error_at(pos, format!("unknown clause-set symbol or variable `{name}`"));
        Err(())
    }

    fn resterm(&mut self) -> PResult<ResTerm> {
        if self.is_ident("r") && matches!(self.ahead(1), TokKind::Punct("(")) {
            self.bump();
            self.bump();
            let a = self.resterm()?;
            self.expect_punct(";")?;
            let b = self.resterm()?;
            self.expect_punct(";")?;
            let f = self.formula()?;
            self.expect_punct(")")?;
            return Ok(ResTerm::res(a, b, f));
        }
        if let TokKind::Ident(name) = self.kind().clone() {
            if let Some(sig) = self.sig(&name, SigKind::Res) {
                self.bump();
                return Ok(ResTerm::Symbol(self.sym_app(&name, &sig)?));
            }
        }
        Ok(ResTerm::Clause(self.clause_expr()?))
    }

    /// `clause|clset|resschema name(n, ...) { base => t step => t }`.
    fn symdef(&mut self, kind: SigKind) -> PResult<()> {
        self.bump();
        let (name, pos) = self.ident()?;
        let params = self.param_list()?;
        self.define(&name, pos)?;
        let mut def_params = Vec::new();
        let mut clause_params = Vec::new();
        let mut set_params = Vec::new();
        let depth = self.scope.len();
        self.scope.push((PARAM_N.to_string(), Bind::Var(Sort::Omega)));
        for (p, s, ppos) in &params {
            match s {
                PSort::Omega | PSort::Iota => {
                    let sort = if *s == PSort::Omega { Sort::Omega } else { Sort::Iota };
                    def_params.push(Param::Var(Var::new(p, sort)));
                    self.scope.push((p.clone(), Bind::Var(sort)));
                }
                PSort::V2 => {
                    if self.ensure_v2(p, *ppos).is_err() {
                        self.scope.truncate(depth);
                        return Err(());
                    }
                    def_params.push(Param::V2(sym(p)));
                }
                PSort::Clause => {
                    clause_params.push(sym(p));
                    self.scope.push((p.clone(), Bind::Clause));
                }
                PSort::Set => {
                    if kind != SigKind::Clset {
                        self.error_at(*ppos, "only clause-set symbols take set parameters");
                        self.scope.truncate(depth);
                        return Err(());
                    }
                    set_params.push(sym(p));
                    self.scope.push((p.clone(), Bind::Set));
                }
            }
        }
        let r = self.symdef_body(kind);
        self.scope.truncate(depth);
        let (base, step) = r?;
        let (params, name) = (def_params, sym(&name));
        macro_rules! def {
            ($b:expr, $s:expr) => {
                SymbolDef { name: name.clone(), params, clause_params, set_params, base: $b, step: $s }
            };
        }
        match (base, step) {
            (Body::Clause(b), Body::Clause(s)) => {
                self.doc.clauses.insert(name.clone(), def!(b, s));
            }
            (Body::Clset(b), Body::Clset(s)) => {
                self.doc.clause_sets.insert(name.clone(), def!(b, s));
                self.doc.clause_set_order.push(name.clone());
            }
            (Body::Res(b), Body::Res(s)) => {
                let rs = self.doc.resolution.get_or_insert_with(ResolutionSchema::default);
                rs.order.push(name.clone());
                rs.defs.insert(name.clone(), def!(b, s));
            }
            _ => unreachable!("bodies share the symbol kind"),
        }
        Ok(())
    }

    fn body(&mut self, kind: SigKind) -> PResult<Body> {
        Ok(match kind {
            SigKind::Clause => Body::Clause(self.clause_expr()?),
            SigKind::Clset => Body::Clset(self.clset_sum()?),
            _ => Body::Res(self.resterm()?),
        })
    }

    fn symdef_body(&mut self, kind: SigKind) -> PResult<(Body, Body)> {
        self.expect_punct("{")?;
        self.expect_keyword("base")?;
        self.expect_punct("=>")?;
        let base = self.body(kind)?;
        self.eat_punct(";");
        self.expect_keyword("step")?;
        self.expect_punct("=>")?;
        let step = self.body(kind)?;
        self.eat_punct(";");
        self.expect_punct("}")?;
        Ok((base, step))
    }

    fn witness(&mut self) -> PResult<()> {
        let pos = self.here();
        self.bump();
        if self.doc.witness.is_some() {
            self.error_at(pos, "duplicate witness section");
            return Err(());
        }
        self.expect_punct("{")?;
        let mut w = crate::resolution::Witness::default();
        // `mu` terms may mention `n` and the clause variables bound by `lambda`.
        let depth = self.scope.len();
        self.scope.push((PARAM_N.to_string(), Bind::Var(Sort::Omega)));
        let r = self.witness_entries(&mut w);
        self.scope.truncate(depth);
        r?;
        self.doc.witness = Some(w);
        Ok(())
    }

    fn witness_entries(&mut self, w: &mut crate::resolution::Witness) -> PResult<()> {
        loop {
            if self.eat_punct("}") {
                break;
            }
            let (kw, kpos) = self.ident()?;
            match kw.as_str() {
                "lambda" => {
                    let (x, _) = self.ident()?;
                    self.expect_punct("<-")?;
                    w.lambda.insert(sym(&x), self.clause_expr()?);
                    self.scope.push((x, Bind::Clause));
                }
                "theta" => {
                    let (x, xpos) = self.ident()?;
                    self.ensure_v2(&x, xpos)?;
                    self.expect_punct("<-")?;
                    self.expect_punct("\\")?;
                    let (b, _) = self.ident()?;
                    self.expect_punct(".")?;
                    self.scope.push((b.clone(), Bind::Var(Sort::Omega)));
                    let t = self.term(ArgSort::Iota);
                    self.scope.pop();
                    w.theta.insert(sym(&x), (sym(&b), t?));
                }
                "mu" => {
                    let (x, _) = self.ident()?;
                    self.expect_punct("<-")?;
                    w.mu.insert(sym(&x), self.clset_sum()?);
                }
                "gamma_max" => w.gamma_max = Some(self.number()?),
                _ => {
                    self.error_at(kpos, format!("expected `lambda`, `theta`, `mu` or `gamma_max`, found `{kw}`"));
                    return Err(());
                }
            }
            self.eat_punct(";");
        }
        Ok(())
    }

    /// `clauses name { S ; S \n S }`: one clause per line or per `;`.
    fn clause_list(&mut self) -> PResult<()> {
        self.bump();
        let (name, pos) = self.ident()?;
        self.define(&name, pos)?;
        self.expect_punct("{")?;
        let mut cs = Vec::new();
        loop {
            if self.eat_punct("}") {
                break;
            }
            if self.at_end() {
                return self.fail("unclosed clause list");
            }
            let line = self.tok().line;
            self.set_limit(line);
            let s = self.sequent();
            self.limit = None;
            cs.push(s?);
            if !self.eat_punct(";") && !self.is_punct("}") && self.tok().line == line {
                return self.expected("`;` or a new line");
            }
        }
        self.doc.clause_lists.push((sym(&name), cs));
        Ok(())
    }

    fn deduction(&mut self) -> PResult<()> {
        self.bump();
        let (name, pos) = self.ident()?;
        self.define(&name, pos)?;
        self.expect_punct("=")?;
        let t = self.resterm()?;
        self.doc.deductions.push((sym(&name), t));
        Ok(())
    }

    // -- building ---------------------------------------------------------

    fn resolve_aux(rule: &Rule, items: &[AuxItem]) -> Result<Vec<Aux>, String> {
        if *rule == Rule::E {
            return match items {
                [AuxItem::Sided(side, i)] => Ok(vec![Aux::new(0, Occ { side: *side, index: *i })]),
                _ => Err("E takes one aux position written `a<i>` or `s<i>`".into()),
            };
        }
        let shape = rule.aux_shape();
        if items.len() != shape.len() {
            return Err(format!("{rule} takes {} aux position(s), got {}", shape.len(), items.len()));
        }
        shape
            .iter()
            .zip(items)
            .map(|(&(premise, side), it)| match *it {
                AuxItem::Index(index) => Ok(Aux::new(premise, Occ { side, index })),
                AuxItem::Sided(s, index) if s == side => Ok(Aux::new(premise, Occ { side, index })),
                AuxItem::Sided(..) => Err(format!("{rule}: aux position on the wrong side")),
            })
            .collect()
    }

    fn build_proof(&mut self, lines: &[Line], pos: Pos) -> Option<Proof> {
        if lines.is_empty() {
            self.error_at(pos, "empty proof");
            return None;
        }
        let mut done: BTreeMap<&str, Proof> = BTreeMap::new();
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut failed: BTreeSet<&str> = BTreeSet::new();
        for line in lines {
            if !seen.insert(&line.label) {
                self.error_at(line.pos, format!("duplicate label `{}`", line.label));
                failed.insert(&line.label);
                continue;
            }
            let built: Result<Proof, String> = match &line.kind {
                LineKind::Axiom(s) => Ok(Proof::axiom(s.clone())),
                LineKind::Link { target, arg, args } => match self.pair_headers.get(target) {
                    Some((params, end)) => {
                        let pair = SchemaPair {
                            symbol: target.clone(),
                            params: params.clone(),
                            end_sequent: end.clone(),
                            base: Proof::axiom(Sequent::empty()),
                            step: Proof::axiom(Sequent::empty()),
                        };
                        Ok(Proof::link(target.clone(), arg.clone(), args.clone(), pair.instance(arg, args)))
                    }
                    None => Err(format!("proof symbol `{target}` has no valid declaration")),
                },
                LineKind::Rule { rule, premises, aux, main } => {
                    let mut ps = Vec::new();
                    let mut bad = false;
                    for (l, lpos) in premises {
                        if let Some(p) = done.remove(l.as_str()) {
                            ps.push(p);
                        } else if !failed.contains(l.as_str()) {
                            let why =
                                if seen.contains(l.as_str()) { "is already used" } else { "is not defined above" };
                            self.error_at(*lpos, format!("premise `{l}` {why}"));
                            bad = true;
                        } else {
                            bad = true;
                        }
                    }
                    if bad {
                        failed.insert(&line.label);
                        continue;
                    }
                    Self::resolve_aux(rule, aux).and_then(|aux| Proof::infer(rule.clone(), ps, aux, main.clone()))
                }
            };
            match built {
                Ok(p) => {
                    let p = match &line.assert {
                        None => p,
                        Some(a) if matches!(line.kind, LineKind::Link { .. }) || p.conclusion.multiset_eq(a) => {
                            p.with_conclusion(a.clone())
                        }
                        Some(a) => {
                            self.error_at(line.pos, format!("conclusion is `{}`, not `{a}`", p.conclusion));
                            failed.insert(&line.label);
                            continue;
                        }
                    };
                    done.insert(&line.label, p);
                }
                Err(m) => {
                    self.error_at(line.pos, m);
                    failed.insert(&line.label);
                }
            }
        }
        let root = lines.last().expect("non-empty").label.as_str();
        let unused: Vec<&&str> = done.keys().filter(|l| **l != root).collect();
        if let Some(l) = unused.first() {
            let p = lines.iter().find(|x| x.label == **l).map_or(pos, |x| x.pos);
            self.error_at(p, format!("node `{l}` is not used by the root `{root}`"));
            return None;
        }
        done.remove(root)
    }

    fn finish(&mut self) {
        let pairs = std::mem::take(&mut self.pairs);
        for pp in &pairs {
            let base = pp.base.as_ref().and_then(|l| self.build_proof(l, pp.pos));
            let step = pp.step.as_ref().and_then(|l| self.build_proof(l, pp.pos));
            if let (Some(base), Some(step)) = (base, step) {
                self.doc.schema.pairs.push(SchemaPair {
                    symbol: pp.symbol.clone(),
                    params: pp.params.clone(),
                    end_sequent: pp.end.clone(),
                    base,
                    step,
                });
            }
        }
        let proofs = std::mem::take(&mut self.proofs);
        for pp in &proofs {
            let Some(p) = pp.lines.as_ref().and_then(|l| self.build_proof(l, pp.pos)) else { continue };
            let p = match &pp.end {
                Some(e) if p.conclusion.multiset_eq(e) => p.with_conclusion(e.clone()),
                Some(e) => {
                    self.error_at(pp.pos, format!("proof ends in `{}`, not `{e}`", p.conclusion));
                    continue;
                }
                None => p,
            };
            self.doc.proofs.push((pp.name.clone(), p));
        }
        if let Some(rs) = &mut self.doc.resolution {
            rs.clauses = self.doc.clauses.clone();
        }
        for e in self.doc.table.validate().errors {
            if matches!(e, TableError::Duplicate(_)) {
                continue;
            }
            let pos = table_error_symbol(&e).and_then(|s| self.decl_pos.get(&**s)).copied().unwrap_or((1, 1));
            self.error_at(pos, e.to_string());
        }
        let d = &self.doc;
        let empty = pairs.is_empty()
            && proofs.is_empty()
            && d.clause_lists.is_empty()
            && d.deductions.is_empty()
            && d.clauses.is_empty()
            && d.clause_sets.is_empty()
            && d.resolution.is_none();
        if empty && self.diags.is_empty() {
            self.error_at((1, 1), "no schema declared");
        }
    }
}

enum Body {
    Clause(ClauseExpr),
    Clset(ClauseSetTerm),
    Res(ResTerm),
}
