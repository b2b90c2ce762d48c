//! The schema description language: parsing with positioned diagnostics,
//! rendering back to text, and a versioned JSON interchange format.

mod lexer;
mod parser;
mod render;

pub use lexer::{lex, Tok, TokKind};
pub use parser::parse_schema_file;
pub use render::{
    interchange, render_clause_list, render_declarations, render_document, render_proof, render_proof_lines,
    FORMAT_VERSION,
};

use crate::calculus::{AxiomPolicy, Proof, ProofSchema};
use crate::charset::ClauseSetTerm;
use crate::clause::{Clause, ClauseDefs, SymbolDef};
use crate::resolution::{ResTerm, ResolutionSchema, Witness};
use crate::term::{Sym, SymbolTable, Var};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// A positioned message.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Diagnostic {
        Diagnostic { line, col, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

/// Range and bound directives.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Directives {
    pub gamma_range: Option<(u64, u64)>,
    pub gamma_max: Option<u64>,
    pub axioms: Option<AxiomPolicy>,
}

/// Everything one schema file declares.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaDocument {
    pub table: SymbolTable,
    /// Declared first-order variables.
    pub vars: Vec<Var>,
    pub schema: ProofSchema,
    /// Stand-alone named proofs, in declaration order.
    pub proofs: Vec<(Sym, Proof)>,
    pub clauses: ClauseDefs,
    pub clause_sets: BTreeMap<Sym, SymbolDef<ClauseSetTerm>>,
    /// Clause-set symbols in declaration order.
    pub clause_set_order: Vec<Sym>,
    pub resolution: Option<ResolutionSchema>,
    pub witness: Option<Witness>,
    /// Named literal clause sets.
    pub clause_lists: Vec<(Sym, Vec<Clause>)>,
    /// Named resolution terms over literal clauses.
    pub deductions: Vec<(Sym, ResTerm)>,
    pub directives: Directives,
}

impl SchemaDocument {
    pub fn proof(&self, name: &str) -> Option<&Proof> {
        self.proofs.iter().find(|(n, _)| &**n == name).map(|(_, p)| p)
    }

    pub fn clause_list(&self, name: &str) -> Option<&[Clause]> {
        self.clause_lists.iter().find(|(n, _)| &**n == name).map(|(_, c)| c.as_slice())
    }

    pub fn deduction(&self, name: &str) -> Option<&ResTerm> {
        self.deductions.iter().find(|(n, _)| &**n == name).map(|(_, d)| d)
    }

    pub fn axiom_policy(&self) -> AxiomPolicy {
        self.directives.axioms.unwrap_or(AxiomPolicy::AtomicIdentity)
    }

    /// The refutation schema and witness, when both are present.
    pub fn refutation(&self) -> Option<(ResolutionSchema, Witness)> {
        Some((self.resolution.clone()?, self.witness.clone().unwrap_or_default()))
    }
}
