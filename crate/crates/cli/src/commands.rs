//! Subcommand implementations. Each returns the result payload, a text
//! rendering and the exit status of a completed run.

use std::fmt::Write as _;
use std::path::Path;

use commutant_core::closed_forms::{m_tensor_m, psd_region, NamedOperator, OperatorLibrary};
use commutant_core::commutant::{
    algebra_report, check_invariance, commutant_basis_with, commutant_of_generators, probe_generators, recognize_basis,
    span_residual, structured_word_generators, verify_block_structure, CommutantBasis, CommutantConfig, RecognitionReport,
};
use commutant_core::matrix::RankPolicy;
use commutant_core::symmetry::{Group, SymmetryWord};
use commutant_core::twirl::{convergence_report, exact_project, mc_twirl_against};
use commutant_core::{CMatrix, Error};
use serde_json::{json, Value};

use crate::args::{CommonArgs, RunConfig};
use crate::output::{write_csv, CliError};

pub struct Outcome {
    pub config: RunConfig,
    pub result: Value,
    pub text: String,
    pub exit: i32,
}

/// Coefficients below this are omitted from the recognised span.
const COEFF_EPS: f64 = 1e-9;

fn stage<T>(name: &'static str, r: Result<T, Error>) -> Result<T, CliError> {
    r.map_err(|err| CliError::Core { stage: name, err })
}

fn solver_config(c: &CommonArgs) -> CommutantConfig {
    CommutantConfig {
        n_samples: c.samples,
        verify_tol: c.tol("verify"),
        policy: RankPolicy { rel_tol: c.tol("rank"), min_gap: c.tol("gap") },
        ..CommutantConfig::default()
    }
}

fn solve(c: &CommonArgs, word: &SymmetryWord) -> Result<CommutantBasis, CliError> {
    stage("solve", commutant_basis_with(word, &solver_config(c), c.seed))
}

fn is_orthogonal(word: &SymmetryWord) -> bool {
    word.vars().values().any(|v| v.group == Group::Orthogonal)
}

/// `{I, F, Ω}` for two-factor orthogonal words, otherwise the word's permutation library.
fn library_for(word: &SymmetryWord) -> Result<(OperatorLibrary, Vec<String>), CliError> {
    match word.uniform_dim() {
        Some(n) if is_orthogonal(word) && word.factors().len() == 2 => {
            Ok((stage("library", OperatorLibrary::two_factor(n))?, Vec::new()))
        }
        _ => stage("library", OperatorLibrary::for_word(word)),
    }
}

fn recognised_span(rep: &RecognitionReport) -> Vec<String> {
    rep.library
        .iter()
        .filter(|name| rep.elements.iter().any(|e| e.coefficient(name).is_some_and(|c| c.norm() > COEFF_EPS)))
        .cloned()
        .collect()
}

struct Analysis {
    basis: CommutantBasis,
    recognition: RecognitionReport,
    span: Vec<String>,
    dropped: Vec<String>,
    orthogonal: Option<Value>,
}

fn analyse(c: &CommonArgs, word: &SymmetryWord) -> Result<Analysis, CliError> {
    let basis = solve(c, word)?;
    let (lib, dropped) = library_for(word)?;
    let recognition = stage("recognize", recognize_basis(&basis, &lib))?;
    let span = recognised_span(&recognition);
    let orthogonal = if is_orthogonal(word) { Some(orthogonal_section(word, &basis)?) } else { None };
    Ok(Analysis { basis, recognition, span, dropped, orthogonal })
}

/// Dimension report for orthogonal words; flags anything beyond `{I, M⊗M}`.
fn orthogonal_section(word: &SymmetryWord, basis: &CommutantBasis) -> Result<Value, CliError> {
    let dim = basis.dim();
    let exceeds = dim > 2;
    let mut v = json!({
        "dim": dim,
        "dim_exceeds_two": exceeds,
        "message": if exceeds {
            format!("computed commutant has dim {dim} > 2: xI + yM⊗M is not the general invariant form for this word")
        } else {
            format!("computed commutant has dim {dim}")
        },
    });
    if basis.total_dim == 4 {
        v["m_tensor_m_residual"] = json!(stage("recognize", span_residual(&m_tensor_m(), &basis.basis))?);
    }
    if let Ok(gens) = probe_generators(word) {
        let probe = stage("probe", commutant_of_generators(&gens, &RankPolicy::default()))?;
        v["probe_dim"] = json!(probe.dim());
        v["probe_generators"] = json!(gens.len());
    }
    Ok(v)
}

fn text_header(a: &Analysis) -> String {
    let b = &a.basis;
    let mut t = String::new();
    let _ = writeln!(t, "word        {}", b.word);
    let _ = writeln!(t, "total dim   {}", b.total_dim);
    let _ = writeln!(t, "commutant   dim {}", b.dim());
    let _ = writeln!(t, "gap         {:.3e}", b.gap);
    let _ = writeln!(t, "residual    {:.3e}", b.residual);
    let _ = writeln!(t, "samples     {} (unknowns {})", b.samples_used, b.unknowns);
    let _ = writeln!(t, "recognition {:?} against {{{}}}", a.recognition.verdict, a.recognition.library.join(", "));
    let _ = writeln!(t, "span        {{{}}}", a.span.join(", "));
    if let Some(o) = &a.orthogonal {
        let _ = writeln!(t, "orthogonal  {}", o["message"].as_str().unwrap_or_default());
        if let Some(r) = o.get("m_tensor_m_residual").and_then(Value::as_f64) {
            let _ = writeln!(t, "M⊗M         span residual {r:.2e}");
        }
        if let Some(p) = o.get("probe_dim") {
            let _ = writeln!(t, "probe set   dim {p}");
        }
    }
    t
}

pub fn commutant(c: &CommonArgs) -> Result<Outcome, CliError> {
    let word = stage("parse", c.word())?;
    let a = analyse(c, &word)?;
    let algebra = stage("algebra", algebra_report(&a.basis))?;
    let mut text = text_header(&a);
    for (i, e) in a.recognition.elements.iter().enumerate() {
        let terms: Vec<String> = e
            .terms
            .iter()
            .filter(|(_, z)| z[0].hypot(z[1]) > COEFF_EPS)
            .map(|(n, z)| format!("({:.6}{:+.6}i)·{n}", z[0], z[1]))
            .collect();
        let _ = writeln!(text, "B{i} = {}   [fit residual {:.2e}]", terms.join(" + "), e.residual);
    }
    let result = json!({
        "commutant": a.basis,
        "recognition": a.recognition,
        "recognized_span": a.span,
        "library_dropped": a.dropped,
        "algebra": algebra,
        "orthogonal": a.orthogonal,
    });
    Ok(Outcome { config: c.config("commutant", Some(&word)), result, text, exit: 0 })
}

pub fn report(c: &CommonArgs) -> Result<Outcome, CliError> {
    let word = stage("parse", c.word())?;
    let a = analyse(c, &word)?;
    let algebra = stage("algebra", algebra_report(&a.basis))?;
    let mut text = text_header(&a);
    let blocks = match verify_block_structure(&a.basis) {
        Ok(r) => {
            let _ = writeln!(text, "blocks      pass");
            json!({ "status": "pass", "report": r })
        }
        Err(Error::UnsupportedWord(_)) => {
            let _ = writeln!(text, "blocks      not applicable");
            json!({ "status": "not_applicable" })
        }
        Err(Error::StructureViolation { offenders }) => {
            let _ = writeln!(text, "blocks      FAIL ({} offending blocks)", offenders.len());
            json!({ "status": "fail", "offenders": offenders })
        }
        Err(e) => return Err(CliError::Core { stage: "blocks", err: e }),
    };
    let _ = writeln!(
        text,
        "algebra     identity {:.1e}, adjoint {:.1e}, product {:.1e}",
        algebra.identity_residual, algebra.adjoint_residual, algebra.product_residual
    );
    let failed = blocks["status"] == "fail";
    let result = json!({
        "dim": a.basis.dim(),
        "gap": a.basis.gap,
        "residual": a.basis.residual,
        "samples_used": a.basis.samples_used,
        "recognition": a.recognition,
        "recognized_span": a.span,
        "orthogonal": a.orthogonal,
        "blocks": blocks,
        "algebra": algebra,
    });
    Ok(Outcome { config: c.config("report", Some(&word)), result, text, exit: if failed { 1 } else { 0 } })
}

fn read_matrix(path: &Path) -> Result<CMatrix, CliError> {
    let raw = std::fs::read_to_string(path).map_err(|err| CliError::Io { stage: "read matrix", path: path.into(), err })?;
    serde_json::from_str(&raw).map_err(|e| CliError::Core {
        stage: "read matrix",
        err: Error::Parse { position: e.column(), message: format!("{}: {e}", path.display()) },
    })
}

pub fn verify(c: &CommonArgs, matrix: &Path, trials: usize) -> Result<Outcome, CliError> {
    let word = stage("parse", c.word())?;
    let w = read_matrix(matrix)?;
    let residual = stage("verify", check_invariance(&w, &word, trials, c.seed))?;
    let structured = stage("verify", structured_word_generators(&word))?.len();
    let tol = c.tol("verify");
    let passed = residual < tol;
    let mut cfg = c.config("verify", Some(&word));
    cfg.extra.insert("matrix".into(), json!(matrix.display().to_string()));
    cfg.extra.insert("trials".into(), json!(trials));
    let text = format!(
        "word      {word}\nresidual  {residual:.3e} (max over {trials} Haar + {structured} structured generators)\nverdict   {}\n",
        if passed { "PASS" } else { "FAIL" }
    );
    let result = json!({ "residual": residual, "tolerance": tol, "trials": trials, "structured_generators": structured, "passed": passed });
    Ok(Outcome { config: cfg, result, text, exit: if passed { 0 } else { 1 } })
}

pub fn twirl(c: &CommonArgs, matrix: &Path, n: usize, schedule: &[usize], csv: Option<&Path>) -> Result<Outcome, CliError> {
    let word = stage("parse", c.word())?;
    let w = read_matrix(matrix)?;
    let basis = solve(c, &word)?;
    let r = stage("twirl", mc_twirl_against(&w, &word, n, c.seed, Some(&basis)))?;
    let exact = stage("twirl", exact_project(&w, &basis))?;
    let mut text = format!(
        "word        {word}\nsamples     {n} (product depth {})\ntrace in    {:.12}{:+.12}i\ntrace out   {:.12}{:+.12}i\nmc error    {:.3e}\n",
        r.depth,
        r.trace_in[0],
        r.trace_in[1],
        r.trace_out[0],
        r.trace_out[1],
        r.mc_error.unwrap_or(f64::NAN)
    );
    let mut result = json!({ "twirl": r, "exact_projection": exact, "commutant_dim": basis.dim() });

    let mut cfg = c.config("twirl", Some(&word));
    cfg.extra.insert("matrix".into(), json!(matrix.display().to_string()));
    cfg.extra.insert("n".into(), json!(n));
    if !schedule.is_empty() {
        let conv = stage("convergence", convergence_report(&w, &word, &basis, schedule, c.seed))?;
        for p in &conv.points {
            let _ = writeln!(text, "N={:<8} error {:.4e}", p.n, p.error);
        }
        let _ = writeln!(text, "slope       {}", conv.slope.map_or("undefined".to_string(), |s| format!("{s:.4}")));
        if let Some(path) = csv {
            write_csv(path, &["N", "error"], conv.points.iter().map(|p| vec![p.n.to_string(), format!("{:e}", p.error)]))?;
            cfg.extra.insert("csv".into(), json!(path.display().to_string()));
        }
        result["convergence"] = json!(conv);
        cfg.extra.insert("schedule".into(), json!(schedule));
    }
    Ok(Outcome { config: cfg, result, text, exit: 0 })
}

pub fn region(c: &CommonArgs, direction: &str, csv: Option<&Path>, steps: usize, range: f64) -> Result<Outcome, CliError> {
    let op = stage("parse", NamedOperator::parse(direction))?;
    let n = stage("parse", c.single_dim())?;
    if steps < 2 || !(range.is_finite() && range > 0.0) {
        return Err(CliError::Core { stage: "parse", err: Error::BadParams("--grid must be >= 2 and --range positive".into()) });
    }
    let region = stage("region", psd_region(&op, n))?;
    let b: CMatrix = stage("region", op.build(n))?;
    let tol = c.tol("region");
    let grid = stage("region", region.grid(&b, -range, range, steps, tol))?;
    let disagreements = grid.iter().filter(|g| g.inside != (g.min_eigenvalue >= -tol)).count();

    let mut cfg = c.config("region", None);
    cfg.extra.insert("direction".into(), json!(op.to_string()));
    cfg.extra.insert("grid".into(), json!(steps));
    cfg.extra.insert("range".into(), json!(range));
    if let Some(path) = csv {
        write_csv(
            path,
            &["x", "y", "min_eigenvalue", "inside"],
            grid.iter().map(|g| vec![g.x.to_string(), g.y.to_string(), format!("{:e}", g.min_eigenvalue), g.inside.to_string()]),
        )?;
        cfg.extra.insert("csv".into(), json!(path.display().to_string()));
    }
    let mut text = format!("direction   {} (dim {})\nregion      {}\n", region.direction, region.dim, region.description);
    for h in &region.inequalities {
        let _ = writeln!(text, "  {h}");
    }
    let _ = writeln!(text, "note        {}", region.note);
    let _ = writeln!(text, "grid        {} points, {} disagreements with direct eigenvalues", grid.len(), disagreements);
    let result = json!({
        "region": region,
        "inequalities_text": region.inequalities.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
        "grid_points": grid.len(),
        "grid_disagreements": disagreements,
    });
    Ok(Outcome { config: cfg, result, text, exit: if disagreements == 0 { 0 } else { 1 } })
}
