//! Atomic-cut normal forms: resolution skeletons with projections plugged
//! in, and the CERES pipeline over a range of parameter values.

use crate::calculus::{
    check_proof, evaluate_schema, regularize, AxiomPolicy, CheckOptions, CheckReport, CutGrade, Proof, ProofSchema,
    Rule,
};
use crate::charset::{build_char_schema, characteristic_clause_set, reduce_clause_set, CharSchema};
use crate::clause::Clause;
use crate::projection::{build_proj_schema, projection_for_clause, projections_at, ProjSchema};
use crate::resolution::{
    check_refutation, eval_resolution_schema, ground_refute, match_leaf, to_tree, to_tree_with, Deduction,
    ProverLimits, ProverOutcome, ResolutionSchema, Witness,
};
use crate::term::{normalize_sequent, FoSubst, Sequent, SymbolTable};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AcnfError {
    #[error("leaf {0} is not an instance of a characteristic clause")]
    LeafClause(String),
    #[error("no projection for clause {0}")]
    MissingProjection(String),
    #[error("end-sequent {found} differs from {expected}")]
    EndSequent { found: String, expected: String },
    #[error("{phase}: {message}")]
    Phase { phase: &'static str, message: String },
}

fn phase(phase: &'static str) -> impl Fn(String) -> AcnfError {
    move |message| AcnfError::Phase { phase, message }
}

/// `TR(d)`: contractions collapsing the pivot on each side, then an
/// atomic cut, at every resolution node.
pub fn transform_tr(d: &Deduction) -> Proof {
    to_tree(d)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcnfStats {
    pub skeleton_inferences: usize,
    pub refutation_steps: usize,
    pub projections_plugged: usize,
    pub max_projection_inferences: usize,
    pub total_inferences: usize,
    pub atomic_cuts: usize,
    pub clauses: usize,
    pub reduced_clauses: usize,
    pub projections: usize,
}

#[derive(Clone, Debug)]
pub struct AcnfResult {
    pub gamma: u64,
    pub proof: Proof,
    pub stats: AcnfStats,
    pub report: CheckReport,
}

fn apply_fo(p: &Proof, s: &FoSubst) -> Proof {
    p.map(&mut |f| s.formula(f), &mut |t| s.term(t))
}

/// Appends contractions until the conclusion is `end` as a multiset:
/// antecedent first, then succedent.
pub fn contract_to(p: Proof, end: &Sequent) -> Result<Proof, AcnfError> {
    let p = p.contract_towards(end).map_err(phase("contraction"))?;
    if !p.conclusion.multiset_eq(end) {
        return Err(AcnfError::EndSequent { found: p.conclusion.to_string(), expected: end.to_string() });
    }
    Ok(p)
}

/// Replaces each leaf of `TR(d)` by the projection of its characteristic
/// clause under the leaf's matching substitution, then contracts the
/// accumulated end-sequent copies.
pub fn assemble_acnf(
    d: &Deduction,
    cl: &[Clause],
    projections: &[Proof],
    end: &Sequent,
    gamma: u64,
    table: &SymbolTable,
    axioms: AxiomPolicy,
) -> Result<AcnfResult, AcnfError> {
    let end = normalize_sequent(end, table);
    let mut chosen: BTreeMap<usize, &Proof> = BTreeMap::new();
    let mut error = None;
    let mut plugged = 0usize;
    let mut max_proj = 0usize;
    let skeleton = to_tree(d);
    let p = to_tree_with(d, &mut |leaf| {
        let Some(m) = match_leaf(leaf, cl) else {
            error.get_or_insert(AcnfError::LeafClause(leaf.to_string()));
            return Proof::axiom(leaf.clone());
        };
        let proj = match chosen.get(&m.clause) {
            Some(p) => *p,
            None => match projection_for_clause(projections, &end, &cl[m.clause], table) {
                Ok(p) => {
                    chosen.insert(m.clause, p);
                    p
                }
                Err(_) => {
                    error.get_or_insert(AcnfError::MissingProjection(cl[m.clause].to_string()));
                    return Proof::axiom(leaf.clone());
                }
            },
        };
        plugged += 1;
        max_proj = max_proj.max(proj.inferences());
        apply_fo(proj, &m.subst)
    });
    if let Some(e) = error {
        return Err(e);
    }
    let proof = contract_to(p, &end)?;
    let proof = proof.with_conclusion(end.clone());
    let opts = CheckOptions { cuts: CutGrade::AtomicOnly, axioms, ..Default::default() };
    let report = check_proof(&proof, table, None, opts);
    let stats = AcnfStats {
        skeleton_inferences: skeleton.inferences(),
        refutation_steps: d.steps(),
        projections_plugged: plugged,
        max_projection_inferences: max_proj,
        total_inferences: proof.inferences(),
        atomic_cuts: proof.count_rule(&|r| *r == Rule::Cut),
        ..Default::default()
    };
    Ok(AcnfResult { gamma, proof, stats, report })
}

/// Inputs fixed across parameter values.
pub struct Pipeline {
    pub schema: ProofSchema,
    pub table: SymbolTable,
    pub char_schema: CharSchema,
    pub proj_schema: ProjSchema,
    pub refutation: Option<(ResolutionSchema, Witness)>,
    pub axioms: AxiomPolicy,
    pub limits: ProverLimits,
    pub cut_free: bool,
}

impl Pipeline {
    /// Phase 1: regularize and build the clause-set and projection schemata.
    pub fn new(
        schema: &ProofSchema,
        table: &SymbolTable,
        refutation: Option<(ResolutionSchema, Witness)>,
        axioms: AxiomPolicy,
    ) -> Result<Pipeline, AcnfError> {
        let (schema, table) =
            regularize(schema, table).map_err(|e| AcnfError::Phase { phase: "regularize", message: e.to_string() })?;
        let cut_free = schema
            .pairs
            .iter()
            .all(|p| p.base.count_rule(&|r| *r == Rule::Cut) + p.step.count_rule(&|r| *r == Rule::Cut) == 0);
        let char_schema = build_char_schema(&schema, &table)
            .map_err(|e| AcnfError::Phase { phase: "characteristic schema", message: e.to_string() })?;
        let proj_schema = build_proj_schema(&schema, &table)
            .map_err(|e| AcnfError::Phase { phase: "projection schema", message: e.to_string() })?;
        if let Some((rs, _)) = &refutation {
            rs.check_order().map_err(|e| AcnfError::Phase { phase: "refutation schema", message: e.to_string() })?;
        }
        Ok(Pipeline {
            schema,
            table,
            char_schema,
            proj_schema,
            refutation,
            axioms,
            limits: ProverLimits::default(),
            cut_free,
        })
    }

    /// The refutation used at `gamma`: the schema instance when one is
    /// given, otherwise a prover refutation of the reduced clause set.
    pub fn refutation_at(&self, gamma: u64, cl: &[Clause]) -> Result<Deduction, AcnfError> {
        match &self.refutation {
            Some((rs, w)) => {
                let d = eval_resolution_schema(rs, w, gamma, &self.table)
                    .map_err(|e| AcnfError::Phase { phase: "refutation", message: e.to_string() })?;
                let rep = check_refutation(&d, cl);
                if !rep.is_ok() {
                    return Err(AcnfError::Phase { phase: "refutation", message: rep.diagnostics.join("; ") });
                }
                Ok(d)
            }
            None => match ground_refute(&reduce_clause_set(cl), &self.limits, &self.table) {
                ProverOutcome::Refuted { deduction, .. } => Ok(deduction),
                ProverOutcome::Saturated { generated } => Err(AcnfError::Phase {
                    phase: "refutation",
                    message: format!("clause set saturated after {generated} clauses"),
                }),
                ProverOutcome::ResourceOut { generated } => {
                    Err(AcnfError::Phase { phase: "refutation", message: format!("gave up after {generated} clauses") })
                }
            },
        }
    }

    /// Phase 2 at one parameter value.
    pub fn run(&self, gamma: u64) -> Result<AcnfResult, AcnfError> {
        let end = self.schema.end_sequent_at(gamma, &self.table);
        if self.cut_free {
            let p = evaluate_schema(&self.schema, &self.table, gamma)
                .map_err(|e| AcnfError::Phase { phase: "evaluation", message: e.to_string() })?;
            let opts = CheckOptions { cuts: CutGrade::AtomicOnly, axioms: self.axioms, ..Default::default() };
            let report = check_proof(&p, &self.table, None, opts);
            let stats = AcnfStats { total_inferences: p.inferences(), ..Default::default() };
            return Ok(AcnfResult { gamma, proof: p, stats, report });
        }
        let cl = characteristic_clause_set(&self.char_schema, &self.schema, gamma, &self.table)
            .map_err(|e| AcnfError::Phase { phase: "clause set", message: e.to_string() })?;
        let prs = projections_at(&self.proj_schema, &self.schema, gamma, &self.table)
            .map_err(|e| AcnfError::Phase { phase: "projections", message: e.to_string() })?;
        let d = self.refutation_at(gamma, &cl)?;
        let mut r = assemble_acnf(&d, &cl, &prs, &end, gamma, &self.table, self.axioms)?;
        r.stats.clauses = cl.len();
        r.stats.reduced_clauses = reduce_clause_set(&cl).len();
        r.stats.projections = prs.len();
        Ok(r)
    }
}

/// Per-parameter outcome of the pipeline.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GammaReport {
    pub gamma: u64,
    pub verified: bool,
    pub stats: Option<AcnfStats>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineReport {
    pub gammas: Vec<GammaReport>,
    /// Smallest `C` with `total ≤ C·skeleton·max projection` over the run.
    pub size_constant: Option<f64>,
}

/// `total / (skeleton · max projection)`, both factors at least one.
pub fn size_ratio(s: &AcnfStats) -> f64 {
    let skel = s.skeleton_inferences.max(1) as f64;
    let proj = s.max_projection_inferences.max(1) as f64;
    s.total_inferences as f64 / (skel * proj)
}

/// Runs phase 2 for each parameter value; a failure at one value does
/// not stop the others.
pub fn ceres_pipeline(
    pipeline: &Pipeline,
    gammas: impl IntoIterator<Item = u64>,
) -> (Vec<Result<AcnfResult, AcnfError>>, PipelineReport) {
    let gammas: Vec<u64> = gammas.into_iter().collect();
    let results: Vec<Result<AcnfResult, AcnfError>> = gammas.iter().map(|&g| pipeline.run(g)).collect();
    let mut reports = Vec::new();
    let mut c: Option<f64> = None;
    for (r, &g) in results.iter().zip(&gammas) {
        match r {
            Ok(a) => {
                let ratio = size_ratio(&a.stats);
                c = Some(c.map_or(ratio, |x| x.max(ratio)));
                reports.push(GammaReport {
                    gamma: a.gamma,
                    verified: a.report.is_ok(),
                    stats: Some(a.stats.clone()),
                    error: None,
                });
            }
            Err(e) => reports.push(GammaReport { gamma: g, verified: false, stats: None, error: Some(e.to_string()) }),
        }
    }
    (results, PipelineReport { gammas: reports, size_constant: c })
}
