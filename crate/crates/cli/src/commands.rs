use crate::{Cli, Command, Direction, Format};
use ceres_core::acnf::{assemble_acnf, ceres_pipeline, size_ratio, Pipeline};
use ceres_core::calculus::{
    check_proof, check_schema, evaluate_schema, lki_to_schema, regularize, schema_to_lki, AxiomPolicy, CheckOptions,
    CutGrade, Proof, ProofSchema,
};
use ceres_core::charset::{
    build_char_schema, characteristic_clause_set, characteristic_term, evaluate_term, reduce_clause_set,
};
use ceres_core::clause::{Clause, SubstitutionFamily};
use ceres_core::dsl::{
    interchange, parse_schema_file, render_clause_list, render_declarations, render_document, render_proof, Directives,
    SchemaDocument,
};
use ceres_core::projection::{
    build_proj_schema, check_projection, evaluate_projection, projection_term, projections_at, ProjContext,
};
use ceres_core::resolution::{
    check_refutation, eval_res_term, eval_resolution_schema, ground_refute, Deduction, ProverLimits, ProverOutcome,
    ResolutionSchema,
};
use ceres_core::term::{Sequent, SymbolTable};
use serde_json::json;
use std::fmt::Write;
use std::path::Path;

const DEFAULT_GAMMA_MAX: u64 = 8;

type Result<T> = std::result::Result<T, String>;

fn load(path: &Path) -> Result<SchemaDocument> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_schema_file(&text)
        .map_err(|ds| ds.iter().map(|d| format!("{}:{d}", path.display())).collect::<Vec<_>>().join("\n"))
}

fn gamma_max(cli: &Cli, doc: &SchemaDocument) -> u64 {
    cli.gamma_max.or(doc.directives.gamma_max).unwrap_or(DEFAULT_GAMMA_MAX)
}

fn within(cli: &Cli, doc: &SchemaDocument, gamma: u64) -> Result<()> {
    let max = gamma_max(cli, doc);
    if gamma > max {
        return Err(format!("gamma {gamma} is above the bound {max}; raise it with --gamma-max"));
    }
    Ok(())
}

fn need_schema(doc: &SchemaDocument) -> Result<()> {
    if doc.schema.pairs.is_empty() {
        return Err("the file declares no proof schema; pass --proof for a named proof".into());
    }
    Ok(())
}

fn named_proof<'a>(doc: &'a SchemaDocument, name: &str) -> Result<&'a Proof> {
    doc.proof(name).ok_or_else(|| format!("no proof named `{name}`"))
}

/// Parses `a..b` (inclusive) or a single value.
fn parse_range(s: &str) -> Result<(u64, u64)> {
    let num = |x: &str| x.trim().parse::<u64>().map_err(|_| format!("bad parameter value `{x}` in range `{s}`"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => (num(s)?, num(s)?),
    };
    if a > b {
        return Err(format!("empty range `{s}`"));
    }
    Ok((a, b))
}

fn emit(cli: &Cli, kind: &str, value: &impl serde::Serialize, text: impl FnOnce() -> String) {
    match cli.format {
        Format::Text => print!("{}", text()),
        Format::Interchange => println!("{}", interchange(kind, value)),
    }
}

pub fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Check { file } => check(cli, &load(file)?),
        Command::Eval { file, gamma } => eval(cli, &load(file)?, *gamma),
        Command::Clset { file, gamma, reduce, proof } => clset(cli, &load(file)?, *gamma, *reduce, proof.as_deref()),
        Command::Proj { file, gamma, proof } => proj(cli, &load(file)?, *gamma, proof.as_deref()),
        Command::Refute { file, gamma, auto, proof } => refute(cli, &load(file)?, *gamma, *auto, proof.as_deref()),
        Command::Acnf { file, gamma_range, auto } => acnf(cli, &load(file)?, gamma_range.as_deref(), *auto),
        Command::Translate { direction, file, proof } => translate(cli, &load(file)?, *direction, proof.as_deref()),
        Command::Report { file } => report(cli, &load(file)?),
    }
}

fn check(cli: &Cli, doc: &SchemaDocument) -> Result<bool> {
    let mut ok = true;
    let mut out = String::new();
    let mut items = Vec::new();
    let mut record = |name: String, report: &ceres_core::calculus::CheckReport| {
        ok &= report.is_ok();
        if report.is_ok() {
            let _ = writeln!(out, "{name}: ok ({} inferences, {} cuts)", report.inferences, report.cuts);
        } else {
            let _ = writeln!(out, "{name}: FAILED\n{report}");
        }
        items.push(json!({ "item": name, "ok": report.is_ok(), "diagnostics": report.to_string() }));
    };
    let validation = doc.table.validate();
    if !validation.is_valid() {
        return Err(validation.to_string());
    }
    let opts = CheckOptions { axioms: doc.axiom_policy(), ..Default::default() };
    if !doc.schema.pairs.is_empty() {
        record("schema".into(), &check_schema(&doc.schema, &doc.table));
        for g in 0..=gamma_max(cli, doc) {
            match evaluate_schema(&doc.schema, &doc.table, g) {
                Ok(p) => record(format!("instance {g}"), &check_proof(&p, &doc.table, None, opts)),
                Err(e) => return Err(format!("instance {g}: {e}")),
            }
        }
    }
    for (name, p) in &doc.proofs {
        let schema = (!doc.schema.pairs.is_empty()).then_some(&doc.schema);
        let opts = CheckOptions { induction: true, ..opts };
        record(format!("proof {name}"), &check_proof(p, &doc.table, schema, opts));
    }
    emit(cli, "check", &items, || out);
    Ok(ok)
}

fn eval(cli: &Cli, doc: &SchemaDocument, gamma: u64) -> Result<bool> {
    need_schema(doc)?;
    within(cli, doc, gamma)?;
    let p = evaluate_schema(&doc.schema, &doc.table, gamma).map_err(|e| e.to_string())?;
    let report = check_proof(&p, &doc.table, None, CheckOptions { axioms: doc.axiom_policy(), ..Default::default() });
    let name = format!("{}_{gamma}", doc.schema.top().symbol);
    emit(cli, "proof", &p, || format!("{}\n{}", render_declarations(&doc.table, &doc.vars), render_proof(&name, &p)));
    if !report.is_ok() {
        eprintln!("{report}");
    }
    Ok(report.is_ok())
}

/// The clause set, projections and end-sequent at `gamma`, or of a named proof.
struct Instance {
    table: SymbolTable,
    end: Sequent,
    clauses: Vec<Clause>,
    projections: Vec<Proof>,
}

fn instance(doc: &SchemaDocument, gamma: u64, proof: Option<&str>) -> Result<Instance> {
    if let Some(name) = proof {
        let p = named_proof(doc, name)?;
        let t = &doc.table;
        let clauses =
            evaluate_term(&characteristic_term(p, &[], t).map_err(|e| e.to_string())?, t).map_err(|e| e.to_string())?;
        let family = SubstitutionFamily::default();
        let defs = Default::default();
        let ctx = ProjContext { table: t, defs: &defs, family: &family, max_unfold: 1_000_000 };
        let projections = evaluate_projection(&projection_term(p, &[], t).map_err(|e| e.to_string())?, &ctx)
            .map_err(|e| e.to_string())?;
        return Ok(Instance { table: t.clone(), end: p.conclusion.clone(), clauses, projections });
    }
    need_schema(doc)?;
    let (s, t) = regularize(&doc.schema, &doc.table).map_err(|e| e.to_string())?;
    let cs = build_char_schema(&s, &t).map_err(|e| e.to_string())?;
    let ps = build_proj_schema(&s, &t).map_err(|e| e.to_string())?;
    let clauses = characteristic_clause_set(&cs, &s, gamma, &t).map_err(|e| e.to_string())?;
    let projections = projections_at(&ps, &s, gamma, &t).map_err(|e| e.to_string())?;
    Ok(Instance { end: s.end_sequent_at(gamma, &t), table: t, clauses, projections })
}

fn clset(cli: &Cli, doc: &SchemaDocument, gamma: u64, reduce: bool, proof: Option<&str>) -> Result<bool> {
    within(cli, doc, gamma)?;
    let inst = instance(doc, gamma, proof)?;
    let cs = if reduce { reduce_clause_set(&inst.clauses) } else { inst.clauses };
    let name = format!("cl_{gamma}");
    emit(cli, "clause_set", &cs, || render_clause_list(&name, &cs));
    Ok(true)
}

fn proj(cli: &Cli, doc: &SchemaDocument, gamma: u64, proof: Option<&str>) -> Result<bool> {
    within(cli, doc, gamma)?;
    let inst = instance(doc, gamma, proof)?;
    let mut ok = true;
    let mut out = render_declarations(&inst.table, &doc.vars);
    for (i, p) in inst.projections.iter().enumerate() {
        let report = check_projection(p, &inst.table);
        ok &= report.is_ok();
        out.push('\n');
        if !report.is_ok() {
            let _ = writeln!(out, "# not a cut-free proof:\n# {}", report.to_string().replace('\n', "\n# "));
        }
        out.push_str(&render_proof(&format!("pr{}", i + 1), p));
    }
    emit(cli, "projections", &inst.projections, || out);
    Ok(ok)
}

fn outcome(o: ProverOutcome) -> Result<Deduction> {
    match o {
        ProverOutcome::Refuted { deduction, .. } => Ok(deduction),
        ProverOutcome::Saturated { generated } => Err(format!("satisfiable: saturated after {generated} clauses")),
        ProverOutcome::ResourceOut { generated } => Err(format!("no refutation within {generated} clauses")),
    }
}

fn refutation(doc: &SchemaDocument, inst: &Instance, gamma: u64, auto: bool, proof: Option<&str>) -> Result<Deduction> {
    if auto {
        return outcome(ground_refute(&reduce_clause_set(&inst.clauses), &ProverLimits::default(), &inst.table));
    }
    match (proof, doc.refutation()) {
        (Some(_), _) => match doc.deductions.first() {
            Some((_, t)) => eval_res_term(t, &ResolutionSchema::default(), &SubstitutionFamily::default(), &inst.table)
                .map_err(|e| e.to_string()),
            None => Err("the file has no deduction; pass --auto".into()),
        },
        (None, Some((rs, w))) => eval_resolution_schema(&rs, &w, gamma, &inst.table).map_err(|e| e.to_string()),
        (None, None) => Err("the file has no refutation schema; pass --auto".into()),
    }
}

fn refute(cli: &Cli, doc: &SchemaDocument, gamma: u64, auto: bool, proof: Option<&str>) -> Result<bool> {
    within(cli, doc, gamma)?;
    let inst = instance(doc, gamma, proof)?;
    let d = refutation(doc, &inst, gamma, auto, proof)?;
    let report = check_refutation(&d, &inst.clauses);
    let mut out = format!("{d}\n");
    let _ = writeln!(out, "# {} resolution steps, derives {}", d.steps(), d.clause());
    for m in &report.diagnostics {
        let _ = writeln!(out, "# {m}");
    }
    emit(cli, "deduction", &d, || out);
    Ok(report.is_ok() && d.clause().is_empty())
}

fn acnf(cli: &Cli, doc: &SchemaDocument, range: Option<&str>, auto: bool) -> Result<bool> {
    if doc.schema.pairs.is_empty() {
        return acnf_of_proof(cli, doc, auto);
    }
    let (a, b) = match range {
        Some(r) => parse_range(r)?,
        None => doc.directives.gamma_range.unwrap_or((0, gamma_max(cli, doc))),
    };
    within(cli, doc, b)?;
    let refutation = if auto { None } else { doc.refutation() };
    let pl = Pipeline::new(&doc.schema, &doc.table, refutation, doc.axiom_policy()).map_err(|e| e.to_string())?;
    let (results, report) = ceres_pipeline(&pl, a..=b);
    let mut out = render_declarations(&pl.table, &doc.vars);
    let mut proofs = Vec::new();
    for (r, g) in results.iter().zip(&report.gammas) {
        out.push('\n');
        match r {
            Ok(r) => {
                let status = if r.report.is_ok() { "verified" } else { "NOT verified" };
                let _ = writeln!(
                    out,
                    "# gamma {}: {status}, {} inferences, {} atomic cuts",
                    r.gamma, r.stats.total_inferences, r.stats.atomic_cuts
                );
                if !r.report.is_ok() {
                    let _ = writeln!(out, "# {}", r.report.to_string().replace('\n', "\n# "));
                }
                out.push_str(&render_proof(&format!("acnf_{}", r.gamma), &r.proof));
                proofs.push(json!({ "gamma": r.gamma, "verified": r.report.is_ok(), "proof": r.proof }));
            }
            Err(e) => {
                let _ = writeln!(out, "# gamma {}: FAILED: {e}", g.gamma);
                proofs.push(json!({ "gamma": g.gamma, "verified": false, "error": e.to_string() }));
            }
        }
    }
    emit(cli, "acnf", &proofs, || out);
    Ok(report.gammas.iter().all(|g| g.verified))
}

fn acnf_of_proof(cli: &Cli, doc: &SchemaDocument, auto: bool) -> Result<bool> {
    let (name, _) = doc.proofs.first().ok_or("the file declares no schema and no proof")?;
    let inst = instance(doc, 0, Some(name))?;
    let d = refutation(doc, &inst, 0, auto, Some(name))?;
    let r = assemble_acnf(&d, &inst.clauses, &inst.projections, &inst.end, 0, &inst.table, doc.axiom_policy())
        .map_err(|e| e.to_string())?;
    let ok = r.report.is_ok();
    emit(cli, "acnf", &r.proof, || {
        let mut out = render_declarations(&inst.table, &doc.vars);
        let status = if ok { "verified" } else { "NOT verified" };
        let _ =
            writeln!(out, "\n# {status}, {} inferences, {} atomic cuts", r.stats.total_inferences, r.stats.atomic_cuts);
        out.push_str(&render_proof(&format!("acnf_{name}"), &r.proof));
        out
    });
    Ok(ok)
}

fn translate(cli: &Cli, doc: &SchemaDocument, direction: Direction, proof: Option<&str>) -> Result<bool> {
    match direction {
        Direction::ToLki => {
            need_schema(doc)?;
            let (s, t) = regularize(&doc.schema, &doc.table).map_err(|e| e.to_string())?;
            let p = schema_to_lki(&s, &t).map_err(|e| e.to_string())?;
            let report =
                check_proof(&p, &t, None, CheckOptions { induction: true, cuts: CutGrade::Any, ..Default::default() });
            let name = format!("{}_lki", s.top().symbol);
            emit(cli, "lki", &p, || format!("{}\n{}", render_declarations(&t, &doc.vars), render_proof(&name, &p)));
            if !report.is_ok() {
                eprintln!("{report}");
            }
            Ok(report.is_ok())
        }
        Direction::FromLki => {
            let p = match proof {
                Some(n) => named_proof(doc, n)?,
                None => &doc.proofs.first().ok_or("the file declares no proof")?.1,
            };
            let schema: ProofSchema = lki_to_schema(p, &doc.table).map_err(|e| e.to_string())?;
            let report = check_schema(&schema, &doc.table);
            // Links become identities on the invariant, which need not be atomic.
            let directives = Directives { axioms: Some(AxiomPolicy::Identity), ..Default::default() };
            let out = SchemaDocument {
                table: doc.table.clone(),
                vars: doc.vars.clone(),
                schema,
                directives,
                ..Default::default()
            };
            emit(cli, "schema", &out.schema, || render_document(&out));
            if !report.is_ok() {
                eprintln!("{report}");
            }
            Ok(report.is_ok())
        }
    }
}

fn report(cli: &Cli, doc: &SchemaDocument) -> Result<bool> {
    need_schema(doc)?;
    let pl = Pipeline::new(&doc.schema, &doc.table, doc.refutation(), doc.axiom_policy()).map_err(|e| e.to_string())?;
    let (_, report) = ceres_pipeline(&pl, 0..=gamma_max(cli, doc));
    emit(cli, "report", &report, || {
        let mut out = String::from(
            "gamma  verified  clauses  reduced  projections  steps  skeleton  max_proj  total  cuts  ratio\n",
        );
        for g in &report.gammas {
            match &g.stats {
                Some(s) => {
                    let _ = writeln!(
                        out,
                        "{:>5}  {:>8}  {:>7}  {:>7}  {:>11}  {:>5}  {:>8}  {:>8}  {:>5}  {:>4}  {:>5.3}",
                        g.gamma,
                        if g.verified { "yes" } else { "no" },
                        s.clauses,
                        s.reduced_clauses,
                        s.projections,
                        s.refutation_steps,
                        s.skeleton_inferences,
                        s.max_projection_inferences,
                        s.total_inferences,
                        s.atomic_cuts,
                        size_ratio(s)
                    );
                }
                None => {
                    let _ = writeln!(out, "{:>5}  failed: {}", g.gamma, g.error.as_deref().unwrap_or("unknown error"));
                }
            }
        }
        if let Some(c) = report.size_constant {
            let _ = writeln!(out, "size constant C = {c:.3}");
        }
        out
    });
    Ok(report.gammas.iter().all(|g| g.verified))
}
