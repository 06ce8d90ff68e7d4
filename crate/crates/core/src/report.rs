//! Suite runners and the versioned report document they feed.
//!
//! Each runner returns a [`SuiteOutput`]. Table and JSON renderings are built
//! from the same check list.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{
    classify_metrics, make_abnormal_phermion, make_boson, make_fermion, make_phermion, obstruction_demo,
    verify_species, MetricOperator, RelationResidual, Species,
};
use crate::error::{Error, Result};
use crate::liealg::lie_document;
use crate::matops::{c64, ComplexMatrix, Inertia, Tolerance};
use crate::multiphermion::{build_multi, expected_physical_dimension, TupleCheck};
use crate::oscillator::{
    build_boson_abnormal_phermion, build_boson_fermion, build_boson_phermion, CompositeSystem, OscillatorKind,
};
use crate::properties::{pseudo_adjoint_suites, reassembly_suite, sylvester_suite, PropertySuite};
use crate::pseudosusy::{pair_spectrum, sign_theorem_check, PairingReport, UnpairedKind};
use crate::random;

pub const SCHEMA: &str = "phermion-lab/1";
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Relative tolerance of the randomized suites, as a fraction of the run tolerance.
pub const PROPERTY_TOLERANCE_FACTOR: f64 = 0.1;

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Check {
    pub suite: String,
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn verdict(suite: &str, name: impl Into<String>, pass: bool, detail: Option<String>) -> Self {
        Check {
            suite: suite.to_string(),
            name: name.into(),
            residual: None,
            tolerance: None,
            pass,
            detail,
        }
    }

    pub fn residual(suite: &str, name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check {
            suite: suite.to_string(),
            name: name.into(),
            residual: Some(residual),
            tolerance: Some(tolerance),
            pass: residual <= tolerance,
            detail: None,
        }
    }

    fn relation(suite: &str, r: &RelationResidual) -> Self {
        Check {
            pass: r.pass,
            ..Check::residual(suite, r.relation_name.clone(), r.residual_norm, r.tolerance)
        }
    }

    fn property(suite: &str, p: &PropertySuite) -> Self {
        Check {
            pass: p.pass,
            detail: Some(format!("{} samples, {} failures", p.samples, p.failures)),
            ..Check::residual(suite, p.name.clone(), p.max_residual, p.tolerance)
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Table {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(title: &str, headers: &[&str]) -> Self {
        Table {
            title: title.to_string(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let cols = self.headers.len();
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let mut s = String::new();
            for (k, cell) in cells.iter().enumerate().take(cols) {
                let pad = widths[k] - cell.chars().count();
                s.push_str(cell);
                if k + 1 < cols {
                    s.push_str(&" ".repeat(pad + 2));
                }
            }
            s.trim_end().to_string()
        };
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.title);
        let _ = writeln!(out, "{}", line(&self.headers));
        let _ = writeln!(out, "{}", widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
        for row in &self.rows {
            let _ = writeln!(out, "{}", line(row));
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutput {
    pub suite: String,
    pub summary: String,
    pub checks: Vec<Check>,
    pub payload: Value,
    #[serde(skip)]
    pub tables: Vec<Table>,
}

impl SuiteOutput {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteReport {
    pub schema: &'static str,
    pub artifact_version: &'static str,
    pub command: String,
    pub config: Value,
    pub summary: Vec<String>,
    pub checks: Vec<Check>,
    pub payload: Value,
    pub pass: bool,
    pub wall_time_ms: u64,
}

impl SuiteReport {
    pub fn new(command: &str, config: Value, outputs: Vec<SuiteOutput>, wall_time_ms: u64) -> Self {
        let checks: Vec<Check> = outputs.iter().flat_map(|o| o.checks.iter().cloned()).collect();
        let payload = if outputs.len() == 1 {
            outputs[0].payload.clone()
        } else {
            Value::Array(
                outputs
                    .iter()
                    .map(|o| json!({ "suite": o.suite, "payload": o.payload }))
                    .collect(),
            )
        };
        SuiteReport {
            schema: SCHEMA,
            artifact_version: ARTIFACT_VERSION,
            command: command.to_string(),
            config,
            summary: outputs.iter().map(|o| o.summary.clone()).collect(),
            pass: checks.iter().all(|c| c.pass),
            checks,
            payload,
            wall_time_ms,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Text rendering: per-suite tables followed by the check list.
pub fn render_table(report: &SuiteReport, outputs: &[SuiteOutput]) -> String {
    let mut out = String::new();
    for o in outputs {
        let _ = writeln!(out, "== {} ==", o.suite);
        for t in &o.tables {
            out.push_str(&t.render());
            out.push('\n');
        }
        let _ = writeln!(out, "{}", o.summary);
        out.push('\n');
    }
    let mut checks = Table::new("checks", &["suite", "check", "residual", "tolerance", "result"]);
    for c in &report.checks {
        checks.push(vec![
            c.suite.clone(),
            c.name.clone(),
            c.residual.map(|r| format!("{r:.3e}")).unwrap_or_else(|| "-".into()),
            c.tolerance.map(|r| format!("{r:.1e}")).unwrap_or_else(|| "-".into()),
            if c.pass { "pass".into() } else { "FAIL".into() },
        ]);
    }
    out.push_str(&checks.render());
    let failed = report.failures().count();
    let _ = writeln!(
        out,
        "\n{}: {}/{} checks passed",
        if report.pass { "PASS" } else { "FAIL" },
        report.checks.len() - failed,
        report.checks.len()
    );
    for c in report.failures() {
        let _ = writeln!(out, "  failed: [{}] {}{}", c.suite, c.name, c.detail.as_ref().map(|d| format!(" ({d})")).unwrap_or_default());
    }
    out
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn fmt_inertia(i: Inertia) -> String {
    format!("({}, {}, {})", i.n_plus, i.n_minus, i.n_zero)
}

const OBSTRUCTION_EXPLANATION: &str = "a two-level operator with c² = 0 and {c, c♯} = 1 only admits metrics \
proportional to a definite one, so an indefinite η cannot carry a phermion; \
with η = σ3 the relations close as {c, c♯} = −1 (use --species abnormal-phermion)";

/// Relations of one ladder species. The metric is only used for phermions.
pub fn run_verify_algebra(species: Species, eta: Option<&MetricOperator>, truncation: usize, tol: Tolerance) -> Result<SuiteOutput> {
    let suite = format!("verify-algebra[{species}]");
    let rep = match species {
        Species::Boson => make_boson(truncation)?,
        Species::Fermion => make_fermion(),
        Species::AbnormalPhermion => make_abnormal_phermion(),
        Species::Phermion => {
            let eta = eta.cloned().unwrap_or_else(|| MetricOperator::identity(2));
            match make_phermion(&eta) {
                Ok(rep) => rep,
                Err(Error::AlgebraObstruction(msg)) => {
                    let check = Check::verdict(
                        &suite,
                        "phermion relations realizable with the given metric",
                        false,
                        Some(msg.clone()),
                    );
                    return Ok(SuiteOutput {
                        summary: format!("obstruction: {OBSTRUCTION_EXPLANATION}"),
                        suite,
                        checks: vec![check],
                        payload: json!({
                            "species": species,
                            "eta": eta.matrix().to_pairs(),
                            "etaInertia": eta.inertia(),
                            "obstruction": msg,
                        }),
                        tables: Vec::new(),
                    });
                }
                Err(e) => return Err(e),
            }
        }
    };
    let report = verify_species(&rep, tol)?;
    let mut table = Table::new("relations", &["relation", "residual", "result"]);
    for r in &report.relations {
        table.push(vec![
            r.relation_name.clone(),
            format!("{:.3e}", r.residual_norm),
            if r.pass { "pass" } else { "FAIL" }.into(),
        ]);
    }
    let checks: Vec<Check> = report.relations.iter().map(|r| Check::relation(&suite, r)).collect();
    let passed = checks.iter().filter(|c| c.pass).count();
    let anticomm = if species.is_two_level() {
        format!(", {{c, c♯}} = {}", if rep.epsilon == 1 { "+1" } else { "−1" })
    } else {
        String::new()
    };
    let mut payload = json!({
        "representation": rep.to_document(),
        "etaInertia": rep.eta.inertia(),
        "relations": report.relations,
    });
    if let Some(d) = report.truncation_defect {
        payload["truncationDefect"] = json!(d);
    }
    if rep.metric_negated {
        payload["metricNegated"] = json!(true);
    }
    Ok(SuiteOutput {
        summary: format!("{species}: {passed}/{} relations pass{anticomm}", checks.len()),
        suite,
        checks,
        payload,
        tables: vec![table],
    })
}

fn build_oscillator(kind: OscillatorKind, energy: f64, truncation: usize, eta: Option<&MetricOperator>) -> Result<CompositeSystem> {
    match kind {
        OscillatorKind::BosonFermion => build_boson_fermion(energy, truncation),
        OscillatorKind::BosonPhermion => {
            let eta = eta.cloned().unwrap_or_else(|| MetricOperator::identity(2));
            build_boson_phermion(energy, truncation, &eta)
        }
        OscillatorKind::BosonAbnormalPhermion => build_boson_abnormal_phermion(energy, truncation),
    }
}

fn fmt_sign(s: f64) -> &'static str {
    if s > 0.0 {
        "+"
    } else if s < 0.0 {
        "−"
    } else {
        "0"
    }
}

fn spectrum_table(report: &PairingReport) -> Table {
    let mut t = Table::new("spectrum", &["E", "mult", "grades", "η-norm signs", "role"]);
    for level in &report.spectrum {
        let [re, im] = level.value;
        let near = |x: f64| (x - re).abs() <= 1e-8 * re.abs().max(1.0);
        let mut signs = Vec::new();
        let mut roles = Vec::new();
        for p in report.pairs.iter().filter(|p| near(p.eigenvalue) && im == 0.0) {
            signs.push(format!("{}/{}", fmt_sign(p.sign_plus.into()), fmt_sign(p.sign_minus.into())));
            if !roles.contains(&"pair") {
                roles.push("pair");
            }
        }
        for u in report.unpaired.iter().filter(|u| near(u.eigenvalue[0]) && (u.eigenvalue[1] - im).abs() <= 1e-8) {
            signs.push(fmt_sign(u.eta_norm).to_string());
            let role = match u.kind {
                UnpairedKind::Zero => "zero mode",
                UnpairedKind::Edge => "edge",
                UnpairedKind::Unmatched => "unmatched",
            };
            if !roles.contains(&role) {
                roles.push(role);
            }
        }
        let value = if im == 0.0 { format!("{re:.6}") } else { format!("{re:.6}{im:+.6}i") };
        let grades: Vec<String> = level.grades.iter().map(|g| if *g > 0 { "+".into() } else { "−".into() }).collect();
        t.push(vec![
            value,
            level.multiplicity.to_string(),
            grades.join(","),
            signs.join(" "),
            if roles.is_empty() { "complex".into() } else { roles.join(", ") },
        ]);
    }
    t
}

/// Pseudo-supersymmetric oscillator with its spectral pairing.
pub fn run_oscillator(
    kind: OscillatorKind,
    energy: f64,
    truncation: usize,
    eta: Option<&MetricOperator>,
    tol: Tolerance,
) -> Result<SuiteOutput> {
    let suite = format!("oscillator[{kind}]");
    let system = build_oscillator(kind, energy, truncation, eta)?;
    let sys = system.pseudo_susy();
    let mut checks: Vec<Check> = system.checks(tol).iter().map(|r| Check::relation(&suite, r)).collect();
    let pairing = pair_spectrum(&sys)?;
    let theorem = sign_theorem_check(&sys, &pairing, tol)?;
    checks.push(Check::verdict(
        &suite,
        "every nonzero level paired by Q",
        pairing.pass(),
        (!pairing.failures.is_empty()).then(|| format!("{} unpaired levels", pairing.failures.len())),
    ));
    checks.push(Check::verdict(&suite, "sign(target η-norm) = sign(E)·sign(source η-norm)", theorem.sign_rule_holds, None));
    checks.push(Check::residual(&suite, "⟨⟨Qψ, Qψ⟩⟩ = 2E⟨⟨ψ, ψ⟩⟩", theorem.max_spect_residual, tol.abs));
    checks.push(Check::verdict(
        &suite,
        "negative eigenvalue implies indefinite η",
        theorem.implication_holds,
        Some(format!("η inertia {}", fmt_inertia(theorem.eta_inertia))),
    ));
    checks.push(Check::verdict(&suite, "distinct eigenvalues η-orthogonal", theorem.orthogonality_holds, None));
    checks.push(Check::verdict(&suite, "opposite grades η-orthogonal", theorem.cross_grade_holds, None));
    if let Some(c) = &theorem.corollary {
        checks.push(Check::verdict(&suite, "η = τ: all nonzero real eigenvalues negative", c.pass, None));
    }
    let zero = pairing.unpaired_of(UnpairedKind::Zero).count();
    let edge = pairing.unpaired_of(UnpairedKind::Edge).count();
    let summary = format!(
        "{kind}, E = {energy}, truncation {truncation}: {} pairs, {zero} zero mode(s), {edge} edge state(s), η inertia {}",
        pairing.pairs.len(),
        fmt_inertia(theorem.eta_inertia)
    );
    let payload = json!({
        "system": system.to_document(tol)?,
        "pairing": pairing,
        "theorem": theorem,
    });
    Ok(SuiteOutput {
        summary,
        suite,
        checks,
        tables: vec![spectrum_table(&pairing)],
        payload,
    })
}

fn fmt_phase([re, im]: [f64; 2]) -> String {
    match (re.round() as i8, im.round() as i8) {
        (1, 0) => "+1".into(),
        (-1, 0) => "−1".into(),
        (0, 1) => "+i".into(),
        (0, -1) => "−i".into(),
        _ => format!("{re:+.3}{im:+.3}i"),
    }
}

fn aggregate_tuples(suite: &str, label: &str, tuples: &[TupleCheck]) -> Check {
    let worst = tuples.iter().map(|t| t.residual).fold(0.0, f64::max);
    let tol = tuples.iter().map(|t| t.tolerance).fold(f64::INFINITY, f64::min);
    let failures = tuples.iter().filter(|t| !t.pass).count();
    Check {
        pass: failures == 0,
        detail: Some(format!("{} tuples, {failures} failures", tuples.len())),
        ..Check::residual(suite, label, worst, if tol.is_finite() { tol } else { 0.0 })
    }
}

/// `ℓ` abnormal phermions on a Jordan-Wigner chain.
pub fn run_multi(ell: usize, tol: Tolerance) -> Result<SuiteOutput> {
    let suite = format!("multi[ell={ell}]");
    let sys = build_multi(ell)?;
    let mut checks = vec![Check::verdict(
        &suite,
        format!("dim = 2^{ell}"),
        sys.dim() == 1 << ell,
        Some(format!("dim {}", sys.dim())),
    )];
    for r in sys.verify_relative_fermi(tol) {
        checks.push(Check::relation(&suite, &r));
    }
    let states = sys.occupation_basis()?;
    let inner = sys.verify_inner_product(&states);
    checks.push(Check::verdict(&suite, "occupation-basis η-Gram matrix = diag((−1)^n), exact", inner.pass(), None));
    let physical = sys.physical_subspace()?;
    checks.push(Check::verdict(
        &suite,
        format!("physical dim = 2^{}", ell - 1),
        physical.dim() == expected_physical_dimension(ell),
        Some(format!("physical dim {}", physical.dim())),
    ));
    let phys = sys.verify_phys_commutators(tol);
    checks.push(aggregate_tuples(&suite, "[α_ij, α_kl] = 0 and [α⁺_ij, α⁺_kl] = 0", &phys.phys1));
    checks.push(aggregate_tuples(&suite, "[α_ij, α⁺_kl] six-term formula, i < j, k < l", &phys.phys2));
    checks.push(aggregate_tuples(&suite, "[β_ij, N] = 0", &phys.shift_number));
    checks.push(aggregate_tuples(&suite, "α♯ = α⁺ and parity structure", &phys.structure));
    let sweep = &phys.unordered_sweep;
    let mut table = Table::new("occupation basis", &["occupations", "η-norm", "phase"]);
    if ell <= 5 {
        for s in &states {
            let occ: String = s.occupations.iter().map(|o| o.to_string()).collect();
            table.push(vec![occ, format!("{:+}", s.eta_norm), fmt_phase(s.phase)]);
        }
    }
    let summary = format!(
        "ell = {ell}: dim {}, physical {}, unordered six-term sweep: {} tuples, printed constant fails at {}, corrected at {}",
        sys.dim(),
        physical.dim(),
        sweep.tuples,
        sweep.printed_failures.len(),
        sweep.corrected_failures.len()
    );
    let payload = to_value(&sys.to_document(tol)?)?;
    Ok(SuiteOutput {
        summary,
        suite,
        checks,
        payload,
        tables: if ell <= 5 { vec![table] } else { Vec::new() },
    })
}

/// `J₁, J₂, J₃` brackets for `ε = ±1`.
pub fn run_lie(epsilon: i8, tol: Tolerance) -> Result<SuiteOutput> {
    let suite = format!("lie[epsilon={epsilon:+}]");
    let doc = lie_document(epsilon, tol)?;
    let mut table = Table::new("brackets", &["[J_i, J_j]", "expected", "residual", "result"]);
    let mut checks = Vec::new();
    for b in &doc.brackets {
        let coef = match b.coefficient[1] as i8 {
            1 => "i".to_string(),
            -1 => "−i".to_string(),
            _ => format!("{}i", b.coefficient[1]),
        };
        let lhs = format!("[J{}, J{}]", b.ij[0], b.ij[1]);
        let rhs = format!("{coef} J{}", b.expected_k);
        table.push(vec![lhs.clone(), rhs.clone(), format!("{:.3e}", b.residual), if b.pass { "pass" } else { "FAIL" }.into()]);
        checks.push(Check {
            pass: b.pass,
            ..Check::residual(&suite, format!("{lhs} = {rhs}"), b.residual, b.tolerance)
        });
    }
    for h in &doc.hermiticity {
        checks.push(Check {
            pass: h.sharp_hermitian,
            detail: Some(format!("J{} ordinary Hermitian: {}", h.k, h.dagger_hermitian)),
            ..Check::residual(&suite, format!("J{}♯ = J{}", h.k, h.k), h.sharp_residual, tol.abs)
        });
    }
    checks.push(Check::relation(&suite, &doc.ladder_commutator.identity));
    checks.push(Check::verdict(
        &suite,
        "Killing form signature matches ε",
        doc.killing.compact == (epsilon == 1),
        Some(format!("inertia {}", fmt_inertia(doc.killing.inertia))),
    ));
    let passed = doc.brackets.iter().filter(|b| b.pass).count();
    let summary = format!(
        "{}: {passed}/3 brackets pass, Casimir J1² + J2² + δ3 J3² = {:+.4}·1, δ = ({}, {}, {})",
        doc.algebra, doc.casimir.value, doc.delta_vector[0], doc.delta_vector[1], doc.delta_vector[2]
    );
    let payload = to_value(&doc)?;
    Ok(SuiteOutput {
        summary,
        suite,
        checks,
        payload,
        tables: vec![table],
    })
}

/// Metric classification of the basic two-level representations and the
/// obstruction formula on random `(u, v)`.
pub fn run_metric_classification(seed: u64, samples: usize, tol: Tolerance) -> Result<SuiteOutput> {
    let generator_tol = tol.abs * PROPERTY_TOLERANCE_FACTOR;
    let suite = "metric-classification".to_string();
    let mut checks = Vec::new();
    let mut payload = json!({});
    for (label, rep, expected) in [
        ("phermion", make_fermion(), ComplexMatrix::identity(2)),
        ("abnormal-phermion", make_abnormal_phermion(), crate::algebra::sigma3()),
    ] {
        let cls = classify_metrics(&rep.c, &rep.c_star)?;
        let (residual, inertia) = match cls.basis.as_slice() {
            [only] => {
                // align the normalized solution with the expected generator
                let m = &only.matrix;
                let s = (expected.dagger() * m).trace() / (expected.dagger() * &expected).trace();
                ((m - expected.scale(s)).norm(), Some(only.inertia))
            }
            _ => (f64::INFINITY, None),
        };
        let mut c = Check::residual(&suite, format!("{label}: metric space is one-dimensional with the expected generator"), residual, generator_tol);
        c.detail = Some(format!(
            "dimension {}, inertia {}",
            cls.dimension(),
            inertia.map(fmt_inertia).unwrap_or_else(|| "-".into())
        ));
        checks.push(c);
        payload[label] = json!({
            "dimension": cls.dimension(),
            "onlyDefinite": cls.only_definite(),
            "basis": cls.basis.iter().map(|b| json!({ "matrix": b.matrix.to_pairs(), "inertia": b.inertia })).collect::<Vec<_>>(),
        });
    }
    let mut rng = random::rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let mut draw = || loop {
            let z = random::complex(&mut rng) * 2.0;
            if z.norm() > 1e-3 {
                break z;
            }
        };
        let (u, v) = (draw(), draw());
        let demo = obstruction_demo(u, v)?;
        worst = worst.max(demo.residual());
    }
    let mut c = Check::residual(&suite, "{σ, σ♯} = −(|u| − |v|)²·1 for the indefinite-metric ansatz", worst, tol.abs);
    c.detail = Some(format!("{samples} random (u, v)"));
    checks.push(c);
    let demo = obstruction_demo(c64(1.0, 0.0), c64(4.0, 0.0))?;
    payload["example"] = json!({ "u": 1.0, "v": 4.0, "anticommutator": demo.anticommutator.to_pairs() });
    let summary = format!("classification of two-level metrics, obstruction formula on {samples} samples");
    Ok(SuiteOutput {
        suite,
        summary,
        checks,
        payload,
        tables: Vec::new(),
    })
}

/// Seeded property suites.
pub fn run_properties(seed: u64, tol: Tolerance) -> Result<SuiteOutput> {
    let suite = "properties".to_string();
    let rel = tol.abs * PROPERTY_TOLERANCE_FACTOR;
    let [inv, anti] = pseudo_adjoint_suites(seed, 500, rel)?;
    let syl = sylvester_suite(seed.wrapping_add(1), 100)?;
    let re = reassembly_suite(seed.wrapping_add(2), 30, rel)?;
    let suites = [inv, anti, syl, re];
    let checks = suites.iter().map(|p| Check::property(&suite, p)).collect();
    Ok(SuiteOutput {
        summary: format!("seed {seed:#x}: {} property suites", suites.len()),
        suite,
        checks,
        payload: to_value(&suites)?,
        tables: Vec::new(),
    })
}

#[derive(Clone, Debug)]
pub struct AllOptions {
    pub tolerance: Tolerance,
    pub truncation: usize,
    pub seed: u64,
}

/// Every suite with default parameters.
pub fn run_all(opts: &AllOptions) -> Result<Vec<SuiteOutput>> {
    let tol = opts.tolerance;
    let mut out = Vec::new();
    let diag41 = MetricOperator::from_diagonal(&[4.0, 1.0])?;
    for species in [Species::Boson, Species::Fermion, Species::AbnormalPhermion] {
        out.push(run_verify_algebra(species, None, opts.truncation, tol)?);
    }
    out.push(run_verify_algebra(Species::Phermion, Some(&diag41), opts.truncation, tol)?);
    // an indefinite metric must be rejected for an ordinary phermion
    let mut rejected = run_verify_algebra(Species::Phermion, Some(&MetricOperator::sigma3()), opts.truncation, tol)?;
    rejected.suite = "verify-algebra[phermion, sigma3]".into();
    let obstructed = rejected.checks.len() == 1 && !rejected.checks[0].pass;
    rejected.checks = vec![Check::verdict(&rejected.suite, "indefinite metric rejected for phermion", obstructed, None)];
    out.push(rejected);
    out.push(run_metric_classification(opts.seed, 100, tol)?);
    out.push(run_oscillator(OscillatorKind::BosonFermion, 1.0, opts.truncation, None, tol)?);
    out.push(run_oscillator(OscillatorKind::BosonPhermion, 1.0, opts.truncation, Some(&diag41), tol)?);
    out.push(run_oscillator(OscillatorKind::BosonAbnormalPhermion, -1.0, opts.truncation, None, tol)?);
    for ell in 2..=5 {
        out.push(run_multi(ell, tol)?);
    }
    for eps in [1, -1] {
        out.push(run_lie(eps, tol)?);
    }
    out.push(run_properties(opts.seed, tol)?);
    Ok(out)
}
