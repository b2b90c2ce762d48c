use super::{sym, Formula, Sort, Sym, Term};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// Sort of an argument position: a first-order sort or a second-order
/// variable of type `omega -> iota`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArgSort {
    Omega,
    Iota,
    V2,
}

impl ArgSort {
    pub fn of(sort: Sort) -> ArgSort {
        match sort {
            Sort::Omega => ArgSort::Omega,
            Sort::Iota => ArgSort::Iota,
        }
    }
}

impl fmt::Display for ArgSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArgSort::Omega => write!(f, "omega"),
            ArgSort::Iota => write!(f, "iota"),
            ArgSort::V2 => write!(f, "omega -> iota"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolKind {
    Function(Sort),
    Predicate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RuleSide {
    Term(Term),
    Formula(Formula),
}

impl fmt::Display for RuleSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleSide::Term(t) => write!(f, "{t}"),
            RuleSide::Formula(a) => write!(f, "{a}"),
        }
    }
}

/// A rewrite rule `f(l1, ..., lm) => rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRule {
    pub lhs: Vec<Term>,
    pub rhs: RuleSide,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Definition {
    pub rules: Vec<RawRule>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolDecl {
    pub name: Sym,
    pub args: Vec<ArgSort>,
    pub kind: SymbolKind,
    /// Present for defined symbols.
    pub definition: Option<Definition>,
}

impl SymbolDecl {
    pub fn is_defined(&self) -> bool {
        self.definition.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("duplicate symbol `{0}`")]
    Duplicate(Sym),
    #[error("symbol `{0}` is not declared")]
    Unknown(Sym),
    #[error("`{name}` expects {expected} argument(s), got {got}")]
    Arity { name: Sym, expected: usize, got: usize },
    #[error("sort mismatch in `{context}`: expected {expected}, found {found}")]
    Sort { context: String, expected: String, found: String },
    #[error("defined symbol `{0}` is missing its base rule")]
    MissingBase(Sym),
    #[error("defined symbol `{0}` is missing its step rule")]
    MissingStep(Sym),
    #[error("defined symbol `{0}` has more than one {1} rule")]
    ExtraRule(Sym, &'static str),
    #[error("rule for `{name}` has malformed left-hand side: {reason}")]
    Shape { name: Sym, reason: String },
    #[error("rule for `{name}` violates the variable condition: `{var}` is not bound by the left-hand side")]
    VariableCondition { name: Sym, var: Sym },
    #[error("rule for `{name}` is not primitive recursive: {reason}")]
    NotPrimitive { name: Sym, reason: String },
    #[error("defined symbols form a dependency cycle: {0}")]
    Cycle(String),
    #[error("first argument of defined symbol `{0}` must have sort omega")]
    RecursionSort(Sym),
}

/// Outcome of [`SymbolTable::validate`]; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub errors: Vec<TableError>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.errors {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolTable {
    symbols: BTreeMap<Sym, SymbolDecl>,
    /// Second-order variables with their declared type `omega -> iota`.
    v2: BTreeSet<Sym>,
    #[serde(skip)]
    duplicates: Vec<Sym>,
}

impl Default for SymbolTable {
    fn default() -> Self {
        SymbolTable::new()
    }
}

impl SymbolTable {
    /// A table holding `0 : omega` and `s : omega -> omega`.
    pub fn new() -> SymbolTable {
        let mut t = SymbolTable { symbols: BTreeMap::new(), v2: BTreeSet::new(), duplicates: Vec::new() };
        t.declare_function("0", vec![], Sort::Omega);
        t.declare_function("s", vec![ArgSort::Omega], Sort::Omega);
        t
    }

    fn insert(&mut self, decl: SymbolDecl) -> Result<(), TableError> {
        if self.symbols.contains_key(&decl.name) || self.v2.contains(&decl.name) {
            self.duplicates.push(decl.name.clone());
            return Err(TableError::Duplicate(decl.name));
        }
        self.symbols.insert(decl.name.clone(), decl);
        Ok(())
    }

    pub fn declare_function(&mut self, name: &str, args: Vec<ArgSort>, result: Sort) -> bool {
        self.insert(SymbolDecl { name: sym(name), args, kind: SymbolKind::Function(result), definition: None }).is_ok()
    }

    pub fn declare_predicate(&mut self, name: &str, args: Vec<ArgSort>) -> bool {
        self.insert(SymbolDecl { name: sym(name), args, kind: SymbolKind::Predicate, definition: None }).is_ok()
    }

    pub fn declare_v2(&mut self, name: &str) -> bool {
        let s = sym(name);
        if self.symbols.contains_key(&s) || !self.v2.insert(s.clone()) {
            self.duplicates.push(s);
            return false;
        }
        true
    }

    /// Adds a rewrite rule; the symbol becomes defined.
    pub fn add_rule(&mut self, name: &str, lhs: Vec<Term>, rhs: RuleSide) -> Result<(), TableError> {
        let decl = self.symbols.get_mut(name).ok_or_else(|| TableError::Unknown(sym(name)))?;
        decl.definition.get_or_insert_with(Definition::default).rules.push(RawRule { lhs, rhs });
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&SymbolDecl> {
        self.symbols.get(name)
    }

    pub fn is_defined(&self, name: &str) -> bool {
        self.get(name).is_some_and(SymbolDecl::is_defined)
    }

    pub fn is_v2(&self, name: &str) -> bool {
        self.v2.contains(name)
    }

    pub fn v2_vars(&self) -> &BTreeSet<Sym> {
        &self.v2
    }

    pub fn symbols(&self) -> impl Iterator<Item = &SymbolDecl> {
        self.symbols.values()
    }

    /// Base and step rule of a defined symbol, if well-shaped.
    pub fn rules_of(&self, name: &str) -> Option<(&RawRule, &RawRule)> {
        let def = self.get(name)?.definition.as_ref()?;
        let base = def.rules.iter().find(|r| r.lhs.first().is_some_and(Term::is_zero))?;
        let step = def.rules.iter().find(|r| r.lhs.first().and_then(Term::pred).is_some())?;
        Some((base, step))
    }

    /// Whether the term contains an application of a defined symbol.
    pub fn has_defined(&self, t: &Term) -> bool {
        let mut syms = BTreeSet::new();
        t.collect_symbols(&mut syms);
        syms.iter().any(|s| self.is_defined(s))
    }

    pub fn formula_has_defined(&self, f: &Formula) -> bool {
        f.symbols().iter().any(|s| self.is_defined(s))
    }

    /// Sort of a well-formed term.
    pub fn sort_of(&self, t: &Term) -> Result<Sort, TableError> {
        match t {
            Term::Var(v) => Ok(v.sort),
            Term::Idx(x, i) => {
                if !self.is_v2(x) {
                    return Err(TableError::Unknown(x.clone()));
                }
                self.expect_sort(i, ArgSort::Omega, &format!("{t}"))?;
                Ok(Sort::Iota)
            }
            Term::V2(x) => Err(TableError::Sort {
                context: format!("{x}"),
                expected: "a first-order term".into(),
                found: "a second-order variable".into(),
            }),
            Term::App(f, args) => {
                let decl = self.get(f).ok_or_else(|| TableError::Unknown(f.clone()))?;
                let SymbolKind::Function(result) = decl.kind else {
                    return Err(TableError::Sort {
                        context: format!("{t}"),
                        expected: "a function symbol".into(),
                        found: "a predicate".into(),
                    });
                };
                self.check_args(f, &decl.args, args)?;
                Ok(result)
            }
        }
    }

    fn check_args(&self, name: &Sym, sorts: &[ArgSort], args: &[Term]) -> Result<(), TableError> {
        if sorts.len() != args.len() {
            return Err(TableError::Arity { name: name.clone(), expected: sorts.len(), got: args.len() });
        }
        for (s, a) in sorts.iter().zip(args) {
            self.expect_sort(a, *s, name)?;
        }
        Ok(())
    }

    fn expect_sort(&self, t: &Term, expected: ArgSort, context: &str) -> Result<(), TableError> {
        let found = match t {
            Term::V2(x) => {
                if !self.is_v2(x) {
                    return Err(TableError::Unknown(x.clone()));
                }
                ArgSort::V2
            }
            _ => ArgSort::of(self.sort_of(t)?),
        };
        if found != expected {
            return Err(TableError::Sort {
                context: context.to_string(),
                expected: expected.to_string(),
                found: found.to_string(),
            });
        }
        Ok(())
    }

    /// Checks atoms against their predicate declarations.
    pub fn check_formula(&self, f: &Formula) -> Result<(), TableError> {
        let mut err = None;
        f.visit_atoms(&mut |p, args| {
            if err.is_some() {
                return;
            }
            let r = match self.get(p) {
                Some(d) if d.kind == SymbolKind::Predicate => self.check_args(p, &d.args, args),
                Some(_) => Err(TableError::Sort {
                    context: p.to_string(),
                    expected: "a predicate".into(),
                    found: "a function symbol".into(),
                }),
                None => Err(TableError::Unknown(p.clone())),
            };
            err = r.err();
        });
        err.map_or(Ok(()), Err)
    }

    /// Checks all table invariants and lists every violation.
    pub fn validate(&self) -> ValidationReport {
        let mut errors: Vec<TableError> = self.duplicates.iter().cloned().map(TableError::Duplicate).collect();
        let mut deps: BTreeMap<Sym, BTreeSet<Sym>> = BTreeMap::new();
        for decl in self.symbols.values() {
            let Some(def) = &decl.definition else { continue };
            let name = &decl.name;
            if decl.args.first() != Some(&ArgSort::Omega) {
                errors.push(TableError::RecursionSort(name.clone()));
                continue;
            }
            let mut bases = 0;
            let mut steps = 0;
            for rule in &def.rules {
                match self.validate_rule(decl, rule, &mut deps) {
                    Ok(true) => steps += 1,
                    Ok(false) => bases += 1,
                    Err(e) => errors.extend(e),
                }
            }
            if bases == 0 && !def.rules.iter().any(|r| r.lhs.first().is_some_and(Term::is_zero)) {
                errors.push(TableError::MissingBase(name.clone()));
            }
            if steps == 0 && !def.rules.iter().any(|r| r.lhs.first().and_then(Term::pred).is_some()) {
                errors.push(TableError::MissingStep(name.clone()));
            }
            if bases > 1 {
                errors.push(TableError::ExtraRule(name.clone(), "base"));
            }
            if steps > 1 {
                errors.push(TableError::ExtraRule(name.clone(), "step"));
            }
        }
        if let Some(cycle) = find_cycle(&deps) {
            errors.push(TableError::Cycle(cycle));
        }
        ValidationReport { errors }
    }

    /// Returns whether the rule is a step rule.
    fn validate_rule(
        &self,
        decl: &SymbolDecl,
        rule: &RawRule,
        deps: &mut BTreeMap<Sym, BTreeSet<Sym>>,
    ) -> Result<bool, Vec<TableError>> {
        let name = &decl.name;
        let shape = |reason: &str| vec![TableError::Shape { name: name.clone(), reason: reason.into() }];
        if rule.lhs.len() != decl.args.len() {
            return Err(vec![TableError::Arity { name: name.clone(), expected: decl.args.len(), got: rule.lhs.len() }]);
        }
        let mut bound: BTreeSet<Sym> = BTreeSet::new();
        let (is_step, rec_var) = match &rule.lhs[0] {
            t if t.is_zero() => (false, None),
            t => match t.pred() {
                Some(Term::Var(y)) if y.sort == Sort::Omega => {
                    bound.insert(y.name.clone());
                    (true, Some(y.clone()))
                }
                _ => return Err(shape("first argument must be 0 or s(y)")),
            },
        };
        for (arg, sort) in rule.lhs.iter().zip(&decl.args).skip(1) {
            let name_of = match (arg, sort) {
                (Term::Var(v), ArgSort::Omega) if v.sort == Sort::Omega => &v.name,
                (Term::Var(v), ArgSort::Iota) if v.sort == Sort::Iota => &v.name,
                (Term::V2(x), ArgSort::V2) => x,
                _ => return Err(shape("parameters must be distinct variables of the declared sort")),
            };
            if !bound.insert(name_of.clone()) {
                return Err(shape("parameters must be distinct variables of the declared sort"));
            }
        }
        let mut errs = Vec::new();
        // Variable condition and sort of the right-hand side.
        let mut used_vars = BTreeSet::new();
        let mut used_v2 = BTreeSet::new();
        let mut syms = BTreeSet::new();
        match &rule.rhs {
            RuleSide::Term(t) => {
                match (self.sort_of(t), decl.kind) {
                    (Ok(s), SymbolKind::Function(r)) if s == r => {}
                    (Ok(s), _) => errs.push(TableError::Sort {
                        context: format!("rule for {name}"),
                        expected: match decl.kind {
                            SymbolKind::Function(r) => r.to_string(),
                            SymbolKind::Predicate => "formula".into(),
                        },
                        found: s.to_string(),
                    }),
                    (Err(e), _) => errs.push(e),
                }
                t.collect_vars(&mut used_vars);
                t.collect_v2(&mut used_v2);
                t.collect_symbols(&mut syms);
            }
            RuleSide::Formula(f) => {
                if decl.kind != SymbolKind::Predicate {
                    errs.push(TableError::Sort {
                        context: format!("rule for {name}"),
                        expected: "term".into(),
                        found: "formula".into(),
                    });
                }
                if let Err(e) = self.check_formula(f) {
                    errs.push(e);
                }
                used_vars = f.free_vars();
                used_v2 = f.v2_names();
                syms = f.symbols();
            }
        }
        for v in used_vars.iter().map(|v| &v.name).chain(used_v2.iter()) {
            if !bound.contains(v) {
                errs.push(TableError::VariableCondition { name: name.clone(), var: v.clone() });
            }
        }
        // Primitive recursion: recursive calls only in step rules, on y.
        let mut bad_rec = None;
        let mut check_calls = |args: &[Term]| {
            let ok = match &rec_var {
                Some(y) => args.first() == Some(&Term::Var(y.clone())),
                None => false,
            };
            if !ok && bad_rec.is_none() {
                bad_rec = Some(if is_step {
                    "recursive call must take the predecessor as first argument"
                } else {
                    "base rule refers to the symbol being defined"
                });
            }
        };
        match &rule.rhs {
            RuleSide::Term(t) => visit_apps(t, name, &mut check_calls),
            RuleSide::Formula(f) => {
                f.visit_terms(&mut |t| visit_apps(t, name, &mut check_calls));
                f.visit_atoms(&mut |p, args| {
                    if p == name {
                        check_calls(args)
                    }
                });
            }
        }
        if let Some(reason) = bad_rec {
            errs.push(TableError::NotPrimitive { name: name.clone(), reason: reason.into() });
        }
        let entry = deps.entry(name.clone()).or_default();
        for s in syms {
            if s != *name && self.is_defined(&s) {
                entry.insert(s);
            }
        }
        if errs.is_empty() {
            Ok(is_step)
        } else {
            Err(errs)
        }
    }

    /// The dependency order `g ≺ f` (transitive), as pairs `(g, f)`.
    pub fn order(&self) -> BTreeSet<(Sym, Sym)> {
        let mut deps: BTreeMap<Sym, BTreeSet<Sym>> = BTreeMap::new();
        for decl in self.symbols.values() {
            let Some(def) = &decl.definition else { continue };
            let e = deps.entry(decl.name.clone()).or_default();
            for r in &def.rules {
                let syms = match &r.rhs {
                    RuleSide::Term(t) => {
                        let mut s = BTreeSet::new();
                        t.collect_symbols(&mut s);
                        s
                    }
                    RuleSide::Formula(f) => f.symbols(),
                };
                e.extend(syms.into_iter().filter(|s| *s != decl.name && self.is_defined(s)));
            }
        }
        let mut out = BTreeSet::new();
        for f in deps.keys() {
            let mut stack: Vec<Sym> = deps[f].iter().cloned().collect();
            let mut seen = BTreeSet::new();
            while let Some(g) = stack.pop() {
                if seen.insert(g.clone()) {
                    out.insert((g.clone(), f.clone()));
                    if let Some(next) = deps.get(&g) {
                        stack.extend(next.iter().cloned());
                    }
                }
            }
        }
        out
    }
}

fn visit_apps(t: &Term, name: &Sym, f: &mut dyn FnMut(&[Term])) {
    match t {
        Term::App(g, args) => {
            if g == name {
                f(args);
            }
            args.iter().for_each(|a| visit_apps(a, name, f));
        }
        Term::Idx(_, i) => visit_apps(i, name, f),
        Term::Var(_) | Term::V2(_) => {}
    }
}

fn find_cycle(deps: &BTreeMap<Sym, BTreeSet<Sym>>) -> Option<String> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    fn dfs(
        v: &Sym,
        deps: &BTreeMap<Sym, BTreeSet<Sym>>,
        marks: &mut BTreeMap<Sym, Mark>,
        path: &mut Vec<Sym>,
    ) -> Option<String> {
        match marks.get(v) {
            Some(Mark::Done) => return None,
            Some(Mark::Active) => {
                let start = path.iter().position(|p| p == v).unwrap_or(0);
                let mut names: Vec<&str> = path[start..].iter().map(|s| &**s).collect();
                names.push(v);
                return Some(names.join(" -> "));
            }
            None => {}
        }
        marks.insert(v.clone(), Mark::Active);
        path.push(v.clone());
        if let Some(next) = deps.get(v) {
            for w in next {
                if let Some(c) = dfs(w, deps, marks, path) {
                    return Some(c);
                }
            }
        }
        path.pop();
        marks.insert(v.clone(), Mark::Done);
        None
    }
    let mut marks = BTreeMap::new();
    for v in deps.keys() {
        if let Some(c) = dfs(v, deps, &mut marks, &mut Vec::new()) {
            return Some(c);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plus_table() -> SymbolTable {
        let mut t = SymbolTable::new();
        t.declare_function("plus", vec![ArgSort::Omega, ArgSort::Omega], Sort::Omega);
        let x = Term::omega("x");
        let y = Term::omega("y");
        t.add_rule("plus", vec![Term::zero(), x.clone()], RuleSide::Term(x.clone())).unwrap();
        t.add_rule(
            "plus",
            vec![Term::succ(y.clone()), x.clone()],
            RuleSide::Term(Term::succ(Term::app("plus", vec![y, x]))),
        )
        .unwrap();
        t
    }

    #[test]
    fn addition_is_valid() {
        assert!(plus_table().validate().is_valid());
    }

    #[test]
    fn missing_step_rule_is_reported() {
        let mut t = SymbolTable::new();
        t.declare_function("f", vec![ArgSort::Omega], Sort::Omega);
        t.add_rule("f", vec![Term::zero()], RuleSide::Term(Term::zero())).unwrap();
        let r = t.validate();
        assert_eq!(r.errors, vec![TableError::MissingStep(sym("f"))]);
    }

    #[test]
    fn mutual_recursion_is_a_cycle() {
        let mut t = SymbolTable::new();
        t.declare_function("f", vec![ArgSort::Omega], Sort::Omega);
        t.declare_function("g", vec![ArgSort::Omega], Sort::Omega);
        let y = Term::omega("y");
        for (a, b) in [("f", "g"), ("g", "f")] {
            t.add_rule(a, vec![Term::zero()], RuleSide::Term(Term::zero())).unwrap();
            t.add_rule(a, vec![Term::succ(y.clone())], RuleSide::Term(Term::app(b, vec![y.clone()]))).unwrap();
        }
        let r = t.validate();
        assert!(r.errors.iter().any(|e| matches!(e, TableError::Cycle(_))), "{r}");
    }

    #[test]
    fn variable_condition_and_duplicates() {
        let mut t = plus_table();
        assert!(!t.declare_function("plus", vec![], Sort::Omega));
        t.declare_function("h", vec![ArgSort::Omega], Sort::Omega);
        t.add_rule("h", vec![Term::zero()], RuleSide::Term(Term::omega("z"))).unwrap();
        t.add_rule("h", vec![Term::succ(Term::omega("y"))], RuleSide::Term(Term::zero())).unwrap();
        let r = t.validate();
        assert!(r.errors.contains(&TableError::Duplicate(sym("plus"))));
        assert!(r.errors.contains(&TableError::VariableCondition { name: sym("h"), var: sym("z") }));
    }

    #[test]
    fn non_primitive_recursion_is_rejected() {
        let mut t = SymbolTable::new();
        t.declare_function("f", vec![ArgSort::Omega], Sort::Omega);
        let y = Term::omega("y");
        t.add_rule("f", vec![Term::zero()], RuleSide::Term(Term::zero())).unwrap();
        t.add_rule("f", vec![Term::succ(y.clone())], RuleSide::Term(Term::app("f", vec![Term::succ(y)]))).unwrap();
        assert!(t.validate().errors.iter().any(|e| matches!(e, TableError::NotPrimitive { .. })));
    }
}
