//! Command implementations: each returns a `Report` or a classified error.

use crate::workspace::{restriction_map, Restriction, Workspace};
use num::BigRational;
use skewform::casestudies;
use skewform::forms::{
    closure_classify, commutator_with_connection, exterior_derivative, hodge_star, potential,
    Chart, ClosureVerdict, DForm, PotentialError,
};
use skewform::geometry::{curvature, levi_civita, metric_closure_report, Connection};
use skewform::numerics::{fd_check, GridSampler};
use skewform::relations::{
    build_relation, classify_relation, classify_structure, degenerate_loci, degree_descent,
    find_integrating_factor, frobenius_test, restrict_relation, DescentOutcome,
    EvolutionaryRelation, FrobeniusVerdict, RelationStatus,
};
use skewform::report::Report;
use skewform::{Bindings, Domain, ZeroConfig, ZeroVerdict};

#[derive(Debug)]
pub enum CliError {
    /// malformed input or unknown entity → exit 2
    Input(String),
    /// an internal verification gate failed → exit 3
    Internal(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Internal(m) => write!(f, "internal verification failure: {m}"),
        }
    }
}

pub struct Context {
    pub workspace: Workspace,
    pub domain: Domain,
    pub cfg: ZeroConfig,
    pub verify_numeric: bool,
}

impl Context {
    pub fn form(&self, name: &str) -> Result<&DForm, CliError> {
        self.workspace
            .forms
            .get(name)
            .ok_or_else(|| CliError::Input(format!("unknown form '{name}'")))
    }

    pub fn relation_forms(&self, name: &str) -> Result<(DForm, DForm), CliError> {
        let (psi, omega) = self
            .workspace
            .relations
            .get(name)
            .ok_or_else(|| CliError::Input(format!("unknown relation '{name}'")))?;
        Ok((
            self.workspace.forms[psi].clone(),
            self.workspace.forms[omega].clone(),
        ))
    }

    pub fn build(&self, name: &str) -> Result<EvolutionaryRelation, CliError> {
        let (psi, omega) = self.relation_forms(name)?;
        build_relation(psi, omega, None, &self.domain, &self.cfg)
            .map_err(|e| CliError::Input(e.to_string()))
    }
}

fn verdict_name(v: &ZeroVerdict) -> &'static str {
    match v {
        ZeroVerdict::ProvedZero => "proved_zero",
        ZeroVerdict::NumericallyZero => "numerically_zero",
        ZeroVerdict::Nonzero(_) => "nonzero",
    }
}

fn basis_label(chart: &Chart, key: &[usize]) -> String {
    if key.is_empty() {
        "1".to_string()
    } else {
        key.iter()
            .map(|&i| format!("d{}", chart.name(i)))
            .collect::<Vec<_>>()
            .join("^")
    }
}

/// Attaches a finite-difference cross-check of d(w) to the report.
fn attach_fd(report: &mut Report, label: &str, w: &DForm, ctx: &Context) {
    let chart = w.chart().clone();
    let mut lo = Vec::new();
    for name in chart.names() {
        let (a, _) = ctx
            .domain
            .box_for_f64(name)
            .unwrap_or((1.0, 2.0));
        lo.push(a);
    }
    let step = vec![1e-3; chart.dim()];
    let grid = match GridSampler::with_step(chart.clone(), lo, 5, step) {
        Ok(g) => g,
        Err(e) => {
            report.warning(format!("fd check skipped: {e}"));
            return;
        }
    };
    // bind non-coordinate symbols at their box midpoint
    let mut extra = Bindings::new();
    let mut syms = std::collections::BTreeSet::new();
    for a in w.coeffs().values() {
        syms.extend(a.free_symbols());
    }
    for s in syms {
        if chart.index_of(&s).is_some() {
            continue;
        }
        let (a, b) = ctx.domain.box_for_f64(&s).unwrap_or((1.0, 2.0));
        extra.set_float(s, (a + b) / 2.0);
    }
    match fd_check(w, &grid, &extra) {
        Ok(r) => {
            report.numeric_check(format!("fd({label})"), r.max_rel_err, r.max_rel_err <= 1e-5);
        }
        Err(e) => {
            report.warning(format!("fd check skipped: {e}"));
        }
    }
}

fn parse_base(chart: &Chart, base: &Option<String>) -> Result<Vec<BigRational>, CliError> {
    match base {
        None => Ok(vec![BigRational::from_integer(1.into()); chart.dim()]),
        Some(s) => {
            let parts: Vec<&str> = s.split(',').collect();
            if parts.len() != chart.dim() {
                return Err(CliError::Input(format!(
                    "base point has {} entries, chart has {}",
                    parts.len(),
                    chart.dim()
                )));
            }
            parts
                .iter()
                .map(|p| {
                    crate::workspace::parse_rational(p)
                        .ok_or_else(|| CliError::Input(format!("bad base coordinate '{p}'")))
                })
                .collect()
        }
    }
}

pub fn form_d(ctx: &Context, name: &str) -> Result<Report, CliError> {
    let w = ctx.form(name)?;
    let dw = exterior_derivative(w);
    let mut report = Report::new("form d");
    report.input("form", name);
    report.expression("input", w.to_string());
    report.expression("d", dw.to_string());
    if ctx.verify_numeric {
        attach_fd(&mut report, name, w, ctx);
    }
    Ok(report)
}

pub fn form_closed(ctx: &Context, name: &str, base: &Option<String>) -> Result<Report, CliError> {
    let w = ctx.form(name)?;
    let base = parse_base(w.chart(), base)?;
    let mut report = Report::new("form closed");
    report.input("form", name);
    match closure_classify(w, &base, &ctx.domain, &ctx.cfg) {
        ClosureVerdict::ClosedExact { potential, note } => {
            report.verdict("closure", "closed_exact", note);
            report.expression("potential", potential.to_string());
        }
        ClosureVerdict::ClosedPotentialNotFound { obstruction } => {
            report.verdict("closure", "closed_potential_not_found", obstruction);
        }
        ClosureVerdict::Unclosed { differential } => {
            report.verdict("closure", "unclosed", "");
            report.expression("differential", differential.to_string());
        }
    }
    if ctx.verify_numeric {
        attach_fd(&mut report, name, w, ctx);
    }
    Ok(report)
}

pub fn form_potential(
    ctx: &Context,
    name: &str,
    base: &Option<String>,
) -> Result<Report, CliError> {
    let w = ctx.form(name)?;
    let base = parse_base(w.chart(), base)?;
    let mut report = Report::new("form potential");
    report.input("form", name);
    match potential(w, &base) {
        Ok(chi) => {
            report.verdict("potential", "found", "d(potential) - form is canonically zero");
            report.expression("potential", chi.to_string());
        }
        Err(PotentialError::VerificationFailed) => {
            return Err(CliError::Internal(
                "potential candidate failed the d(chi) = w verification".into(),
            ));
        }
        Err(e) => {
            report.verdict("potential", "not_found", e.to_string());
        }
    }
    Ok(report)
}

pub fn form_commutator(
    ctx: &Context,
    name: &str,
    connection: &Option<String>,
) -> Result<Report, CliError> {
    let w = ctx.form(name)?;
    let conn: Connection = match connection {
        None => Connection::zero(w.chart().clone()),
        Some(g) => ctx
            .workspace
            .connections
            .get(g)
            .ok_or_else(|| CliError::Input(format!("unknown connection '{g}'")))?
            .clone(),
    };
    let k = commutator_with_connection(w, &conn).map_err(|e| CliError::Input(e.to_string()))?;
    let mut report = Report::new("form commutator");
    report.input("form", name);
    if let Some(g) = connection {
        report.input("connection", g.clone());
    }
    let chart = w.chart();
    for (key, (flat, conn_part)) in k.parts() {
        let label = basis_label(chart, key);
        report.expression(format!("K[{label}].flat"), flat.to_string());
        report.expression(format!("K[{label}].connection"), conn_part.to_string());
        report.expression(format!("K[{label}].total"), k.total(key).to_string());
    }
    report.verdict(
        "commutator",
        if k.is_zero() { "zero" } else { "nonzero" },
        "",
    );
    if ctx.verify_numeric {
        attach_fd(&mut report, name, w, ctx);
    }
    Ok(report)
}

fn report_relation(
    report: &mut Report,
    r: &EvolutionaryRelation,
) {
    let cls = classify_relation(r);
    report.verdict(
        "relation",
        match cls.status {
            RelationStatus::Identical => "identical",
            RelationStatus::Nonidentical => "nonidentical",
        },
        "",
    );
    let chart = r.chart();
    for (key, comp) in &cls.components {
        let label = basis_label(chart, key);
        report.verdict(
            format!("component[{label}]"),
            verdict_name(&comp.verdict),
            String::new(),
        );
        report.expression(format!("K[{label}]"), comp.total.to_string());
    }
    for a in &cls.attributions {
        let label = basis_label(chart, &a.component);
        report.verdict(
            format!("attribution[{label}] d/d{}", a.direction),
            "contributes",
            a.contribution.to_string(),
        );
    }
}

pub fn relation_classify(ctx: &Context, name: &str) -> Result<Report, CliError> {
    let r = ctx.build(name)?;
    let mut report = Report::new("relation classify");
    report.input("relation", name);
    report.expression("psi", r.psi().to_string());
    report.expression("omega", r.omega().to_string());
    report_relation(&mut report, &r);
    if ctx.verify_numeric {
        attach_fd(&mut report, "omega", r.omega(), ctx);
    }
    Ok(report)
}

pub fn relation_frobenius(ctx: &Context, name: &str) -> Result<Report, CliError> {
    let (_, omega) = ctx.relation_forms(name)?;
    let mut report = Report::new("relation frobenius");
    report.input("relation", name);
    match frobenius_test(&omega, &ctx.domain, &ctx.cfg)
        .map_err(|e| CliError::Input(e.to_string()))?
    {
        FrobeniusVerdict::Integrable => {
            report.verdict("frobenius", "integrable", "omega ^ d(omega) vanishes");
        }
        FrobeniusVerdict::Nonintegrable(witness) => {
            report.verdict("frobenius", "nonintegrable", "");
            report.expression("witness", witness.to_string());
        }
    }
    Ok(report)
}

pub fn relation_factor(ctx: &Context, name: &str) -> Result<Report, CliError> {
    let (_, omega) = ctx.relation_forms(name)?;
    let mut report = Report::new("relation factor");
    report.input("relation", name);
    match find_integrating_factor(&omega, &ctx.domain, &ctx.cfg)
        .map_err(|e| CliError::Input(e.to_string()))?
    {
        Some(mu) => {
            report.verdict("integrating_factor", "found", "d(mu*omega) vanishes");
            report.expression("integrating_factor", mu.to_string());
        }
        None => {
            report.verdict(
                "integrating_factor",
                "not_found",
                "no monomial factor with exponents in [-3, 3]",
            );
        }
    }
    Ok(report)
}

pub fn relation_loci(ctx: &Context, name: &str) -> Result<Report, CliError> {
    let r = ctx.build(name)?;
    let mut report = Report::new("relation loci");
    report.input("relation", name);
    if r.is_identical() {
        report.verdict("relation", "identical", "no degenerate locus needed");
        return Ok(report);
    }
    let ps = degenerate_loci(&r, &ctx.domain, &ctx.cfg)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let chart = r.chart();
    for (i, c) in ps.constraints.iter().enumerate() {
        let label = basis_label(chart, &c.provenance);
        report.verdict(
            format!("constraint[{i}]"),
            "vanishing",
            format!("from component {label}"),
        );
        report.expression(format!("constraint[{i}]"), format!("{} = 0", c.equation));
        if let Some(phi) = &c.parametrization {
            let exprs: Vec<String> = phi.exprs().iter().map(|e| e.to_string()).collect();
            report.expression(
                format!("parametrization[{i}]"),
                format!(
                    "({}) -> ({})",
                    phi.source().names().join(", "),
                    exprs.join(", ")
                ),
            );
        }
    }
    for (key, changes) in &ps.sign_changes {
        let label = basis_label(chart, key);
        report.verdict(
            format!("sign_changes[{label}]"),
            if *changes > 0 { "observed" } else { "none" },
            format!("{changes} grid cells"),
        );
    }
    Ok(report)
}

pub fn relation_restrict(
    ctx: &Context,
    name: &str,
    on: &Option<String>,
    along: &Option<String>,
) -> Result<Report, CliError> {
    let r = ctx.build(name)?;
    let chart = r.chart().clone();
    let restriction: Restriction = match (on, along) {
        (Some(clause), None) => crate::workspace::parse_on_clause(&chart, clause, 0)
            .map_err(|e| CliError::Input(e.msg))?,
        (None, Some(clause)) => crate::workspace::parse_along_clause(clause, 0)
            .map_err(|e| CliError::Input(e.msg))?,
        _ => {
            return Err(CliError::Input(
                "restrict needs exactly one of --on or --along".into(),
            ))
        }
    };
    let phi = restriction_map(&chart, &restriction).map_err(CliError::Input)?;
    let restricted = restrict_relation(&r, &phi, &ctx.domain, &ctx.cfg)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let mut report = Report::new("relation restrict");
    report.input("relation", name);
    match &restriction {
        Restriction::On { coord, value } => {
            report.input("locus", format!("{coord} = {value}"));
        }
        Restriction::Along { params, exprs } => {
            let e: Vec<String> = exprs.iter().map(|x| x.to_string()).collect();
            report.input(
                "map",
                format!("({}) -> ({})", params.join(", "), e.join(", ")),
            );
        }
    }
    report.expression("restricted_omega", restricted.omega().to_string());
    report_relation(&mut report, &restricted);
    Ok(report)
}

pub fn relation_descend(
    ctx: &Context,
    name: &str,
    base: &Option<String>,
) -> Result<Report, CliError> {
    let r = ctx.build(name)?;
    let base = parse_base(r.chart(), base)?;
    let mut report = Report::new("relation descend");
    report.input("relation", name);
    match degree_descent(&r, &base, &ctx.domain, &ctx.cfg) {
        Ok(DescentOutcome::Terminal { potential }) => {
            report.verdict("descent", "terminal", "potential reached degree 0");
            report.expression("potential", potential.to_string());
        }
        Ok(DescentOutcome::Next(next)) => {
            report.verdict(
                "descent",
                "next",
                format!("new relation of degree {}", next.omega().degree()),
            );
            report.expression("next_omega", next.omega().to_string());
            report_relation(&mut report, &next);
        }
        Err(e) => {
            report.verdict("descent", "blocked", e.to_string());
        }
    }
    Ok(report)
}

pub fn geometry_report(ctx: &Context, name: &str) -> Result<Report, CliError> {
    let mut report = Report::new("geometry report");
    report.input("object", name);
    let conn: Connection = if let Some(g) = ctx.workspace.connections.get(name) {
        g.clone()
    } else if let Some(m) = ctx.workspace.metrics.get(name) {
        let lc = levi_civita(m).map_err(|e| CliError::Input(e.to_string()))?;
        report.verdict("levi_civita", "derived", "torsion-free metric connection");
        lc
    } else {
        return Err(CliError::Input(format!(
            "unknown connection or metric '{name}'"
        )));
    };
    let chart = conn.chart().clone();
    let mcr = metric_closure_report(&conn, &ctx.domain, &ctx.cfg);
    report.verdict("degree0", &format!("{:?}", mcr.degree0_connection).to_lowercase(), "");
    report.verdict("degree1_torsion", &format!("{:?}", mcr.degree1_torsion).to_lowercase(), "");
    report.verdict("degree2", &format!("{:?}", mcr.degree2).to_lowercase(), "");
    report.verdict("degree3_curvature", &format!("{:?}", mcr.degree3_curvature).to_lowercase(), "");
    report.verdict("classification", &mcr.classification, "");
    let riemann = curvature(&conn);
    let n = chart.dim();
    for rho in 0..n {
        for sigma in 0..n {
            for mu in 0..n {
                for nu in 0..n {
                    let e = riemann.get(rho, sigma, mu, nu);
                    if !e.is_zero() {
                        report.expression(
                            format!(
                                "R[{}][{}][{}][{}]",
                                chart.name(rho),
                                chart.name(sigma),
                                chart.name(mu),
                                chart.name(nu)
                            ),
                            e.to_string(),
                        );
                    }
                }
            }
        }
    }
    for ((rho, mu, nu), e) in conn.components() {
        report.expression(
            format!(
                "G[{}][{}][{}]",
                chart.name(*rho),
                chart.name(*mu),
                chart.name(*nu)
            ),
            e.to_string(),
        );
    }
    Ok(report)
}

/// Compact object for the `classify` subcommand, matching the documented
/// example byte for byte.
#[derive(serde::Serialize)]
pub struct ClassifyOutput {
    pub interaction: String,
    pub pseudostructure_dim: i64,
    pub metric_dim: u32,
}

pub fn classify(p: u32, k: u32, n: u32) -> Result<ClassifyOutput, CliError> {
    let c = classify_structure(p, k, n).map_err(|e| CliError::Input(e.to_string()))?;
    Ok(ClassifyOutput {
        interaction: c.interaction,
        pseudostructure_dim: c.pseudostructure_dim,
        metric_dim: c.metric_dim,
    })
}

pub fn run_case(ctx: &Context, which: &str, spec_src: &str) -> Result<Report, CliError> {
    let input = |e: crate::casespec::SpecError| CliError::Input(e.0);
    let engine = |e: casestudies::CaseError| CliError::Internal(e.to_string());
    let report = match which {
        "thermo" => {
            let spec = crate::casespec::parse_thermo(spec_src).map_err(input)?;
            casestudies::thermo_ideal_gas(&spec).map_err(engine)?.report
        }
        "gas" => {
            let spec = crate::casespec::parse_gas(spec_src).map_err(input)?;
            casestudies::gasdyn_relation(&spec).map_err(engine)?.report
        }
        "em" => {
            let spec = crate::casespec::parse_em(spec_src).map_err(input)?;
            casestudies::em_poynting(&spec).map_err(engine)?.report
        }
        "maxwell" => {
            let spec = crate::casespec::parse_maxwell(spec_src).map_err(input)?;
            casestudies::maxwell_check(&spec).map_err(engine)?.report
        }
        "hamiltonian" => {
            let spec = crate::casespec::parse_hamiltonian(spec_src).map_err(input)?;
            casestudies::hamiltonian_check(&spec).map_err(engine)?.report
        }
        other => return Err(CliError::Input(format!("unknown case study '{other}'"))),
    };
    let _ = ctx;
    Ok(report)
}

/// Euclidean Hodge dual of a named form; kept for report completeness.
pub fn form_dual(ctx: &Context, name: &str) -> Result<Report, CliError> {
    let w = ctx.form(name)?;
    let metric = skewform::geometry::Metric::identity(w.chart().clone());
    let dual = hodge_star(w, &metric, &ctx.domain, &ctx.cfg)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let mut report = Report::new("form dual");
    report.input("form", name);
    report.expression("dual", dual.to_string());
    report.warning("duality uses the Euclidean metric star as an interpretation".to_string());
    Ok(report)
}

/// Renders a report as deterministic plain text.
pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(&format!("command: {}\n", report.command));
    for (k, v) in &report.inputs {
        out.push_str(&format!("input {k} = {v}\n"));
    }
    for v in &report.verdicts {
        if v.detail.is_empty() {
            out.push_str(&format!("verdict {}: {}\n", v.name, v.verdict));
        } else {
            out.push_str(&format!("verdict {}: {} ({})\n", v.name, v.verdict, v.detail));
        }
    }
    for (k, v) in &report.expressions {
        out.push_str(&format!("expression {k} = {v}\n"));
    }
    for c in &report.numeric_checks {
        out.push_str(&format!(
            "numeric {}: max_rel_err={:e} {}\n",
            c.name,
            c.max_rel_err,
            if c.passed { "passed" } else { "FAILED" }
        ));
    }
    for w in &report.warnings {
        out.push_str(&format!("warning: {w}\n"));
    }
    out
}
