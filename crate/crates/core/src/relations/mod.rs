//! Evolutionary relations dψ = ω: classification into identical and
//! nonidentical relations, Pfaffian integrability, integrating-factor
//! search, degenerate-transformation loci, restriction onto pseudostructures,
//! degree descent, and the (p, k, n) structure table.

use crate::expr::{
    equals_zero, eval_f64, simplify, Bindings, Domain, Expr, OpaqueEval, ZeroConfig, ZeroVerdict,
};
use crate::forms::{
    commutator_with_connection, exterior_derivative, potential, pullback, wedge, Chart,
    Commutator, DForm, ParamMap, PotentialError,
};
use crate::geometry::Connection;
use num::{BigRational, Signed, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RelationError {
    #[error("degree mismatch: deg(omega) must be deg(psi) + 1, got psi={psi}, omega={omega}")]
    DegreeMismatch { psi: usize, omega: usize },
    #[error("left and right sides live on different charts")]
    ChartMismatch,
    #[error("connection lives on a different chart")]
    ConnectionChartMismatch,
    #[error("relation is already identical everywhere; no degenerate loci to find")]
    AlreadyIdentical,
    #[error("relation is nonidentical; degree descent needs an identical relation")]
    NotIdentical,
    #[error("omega must be a 1-form for this operation, got degree {0}")]
    NotOneForm(usize),
    #[error("zero test failed: {0}")]
    ZeroTest(String),
}

/// Identical vs. nonidentical status of an evolutionary relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationStatus {
    Identical,
    Nonidentical,
}

/// The pair (ψ, ω) of a relation dψ = ω, with its commutator and status.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionaryRelation {
    psi: DForm,
    omega: DForm,
    connection: Option<Connection>,
    commutator: Commutator,
    status: RelationStatus,
    /// Per-component zero verdicts of the commutator totals.
    verdicts: BTreeMap<Vec<usize>, ZeroVerdict>,
}

impl EvolutionaryRelation {
    pub fn psi(&self) -> &DForm {
        &self.psi
    }

    pub fn omega(&self) -> &DForm {
        &self.omega
    }

    pub fn chart(&self) -> &Chart {
        self.omega.chart()
    }

    pub fn connection(&self) -> Option<&Connection> {
        self.connection.as_ref()
    }

    pub fn commutator(&self) -> &Commutator {
        &self.commutator
    }

    pub fn status(&self) -> RelationStatus {
        self.status
    }

    pub fn is_identical(&self) -> bool {
        self.status == RelationStatus::Identical
    }

    pub fn verdicts(&self) -> &BTreeMap<Vec<usize>, ZeroVerdict> {
        &self.verdicts
    }
}

/// Builds and classifies a relation dψ = ω. The status is identical exactly
/// when every commutator total is (at least numerically) zero on the domain.
pub fn build_relation(
    psi: DForm,
    omega: DForm,
    connection: Option<Connection>,
    domain: &Domain,
    cfg: &ZeroConfig,
) -> Result<EvolutionaryRelation, RelationError> {
    if omega.degree() != psi.degree() + 1 {
        return Err(RelationError::DegreeMismatch {
            psi: psi.degree(),
            omega: omega.degree(),
        });
    }
    if psi.chart() != omega.chart() {
        return Err(RelationError::ChartMismatch);
    }
    if let Some(g) = &connection {
        if g.chart() != omega.chart() {
            return Err(RelationError::ConnectionChartMismatch);
        }
    }
    let g = connection
        .clone()
        .unwrap_or_else(|| Connection::zero(omega.chart().clone()));
    let commutator =
        commutator_with_connection(&omega, &g).expect("degree >= 1 enforced above");
    let mut verdicts = BTreeMap::new();
    let mut identical = true;
    for key in commutator.parts().keys() {
        let total = commutator.total(key);
        let v = equals_zero(&total, domain, cfg)
            .map_err(|e| RelationError::ZeroTest(e.to_string()))?;
        if !v.is_zero() {
            identical = false;
        }
        verdicts.insert(key.clone(), v);
    }
    Ok(EvolutionaryRelation {
        psi,
        omega,
        connection,
        commutator,
        status: if identical {
            RelationStatus::Identical
        } else {
            RelationStatus::Nonidentical
        },
        verdicts,
    })
}

/// One attributed contribution to a nonzero commutator component: the
/// coefficient of ω at `source_key`, differentiated along `direction`.
#[derive(Debug, Clone, PartialEq)]
pub struct Attribution {
    pub component: Vec<usize>,
    pub source_key: Vec<usize>,
    pub direction: String,
    pub contribution: Expr,
}

/// Classification report: per-component verdicts with flat/connection split
/// and, for nonzero components, the contributing coefficient terms.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationReport {
    pub status: RelationStatus,
    pub components: BTreeMap<Vec<usize>, ComponentReport>,
    pub attributions: Vec<Attribution>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentReport {
    pub flat: Expr,
    pub connection: Expr,
    pub total: Expr,
    pub verdict: ZeroVerdict,
}

/// Expands a relation's commutator into a per-component report with term
/// attribution on the nonzero components.
pub fn classify_relation(r: &EvolutionaryRelation) -> RelationReport {
    let k = &r.commutator;
    let chart = r.chart().clone();
    let mut components = BTreeMap::new();
    let mut attributions = Vec::new();
    for (key, (flat, conn)) in k.parts() {
        let total = k.total(key);
        let verdict = r
            .verdicts
            .get(key)
            .cloned()
            .unwrap_or(ZeroVerdict::ProvedZero);
        if !verdict.is_zero() {
            // attribute: K_J = Σ_j (−1)^j ∂_{α_j} a_{J \ α_j} (+ connection)
            for (j, &alpha) in key.iter().enumerate() {
                let rest: Vec<usize> = key
                    .iter()
                    .enumerate()
                    .filter(|&(m, _)| m != j)
                    .map(|(_, &v)| v)
                    .collect();
                let mut term = crate::expr::diff(&r.omega.coeff(&rest), chart.name(alpha));
                if j % 2 == 1 {
                    term = Expr::neg(term);
                }
                let term = simplify(&term);
                if !term.is_zero() {
                    attributions.push(Attribution {
                        component: key.clone(),
                        source_key: rest,
                        direction: chart.name(alpha).to_string(),
                        contribution: term,
                    });
                }
            }
        }
        components.insert(
            key.clone(),
            ComponentReport {
                flat: flat.clone(),
                connection: conn.clone(),
                total,
                verdict,
            },
        );
    }
    RelationReport {
        status: r.status,
        components,
        attributions,
    }
}

/// Frobenius integrability verdict for a 1-form.
#[derive(Debug, Clone, PartialEq)]
pub enum FrobeniusVerdict {
    Integrable,
    /// Carries the nonzero 3-form ω ∧ dω as the witness.
    Nonintegrable(DForm),
}

/// Tests ω ∧ dω = 0; on charts of dimension ≤ 2 the 3-form vanishes
/// identically and the form is always integrable.
pub fn frobenius_test(
    omega: &DForm,
    domain: &Domain,
    cfg: &ZeroConfig,
) -> Result<FrobeniusVerdict, RelationError> {
    if omega.degree() != 1 {
        return Err(RelationError::NotOneForm(omega.degree()));
    }
    let three = wedge(omega, &exterior_derivative(omega)).expect("same chart");
    let mut witness = DForm::zero(omega.chart().clone(), 3);
    for (key, a) in three.coeffs() {
        let v = equals_zero(a, domain, cfg)
            .map_err(|e| RelationError::ZeroTest(e.to_string()))?;
        if !v.is_zero() {
            witness.add_term(key, a.clone()).expect("key from wedge");
        }
    }
    if witness.is_zero() {
        Ok(FrobeniusVerdict::Integrable)
    } else {
        Ok(FrobeniusVerdict::Nonintegrable(witness))
    }
}

/// Searches μ = Π x_i^{k_i} with |k_i| ≤ 3 such that d(μω) is zero on the
/// domain; every returned factor is verified, never guessed.
pub fn find_integrating_factor(
    omega: &DForm,
    domain: &Domain,
    cfg: &ZeroConfig,
) -> Result<Option<Expr>, RelationError> {
    if omega.degree() != 1 {
        return Err(RelationError::NotOneForm(omega.degree()));
    }
    let chart = omega.chart().clone();
    let n = chart.dim();
    // enumerate exponent vectors in order of increasing total weight so the
    // simplest factor wins deterministically
    let mut candidates: Vec<Vec<i64>> = Vec::new();
    let mut stack = vec![Vec::with_capacity(n)];
    while let Some(cur) = stack.pop() {
        if cur.len() == n {
            candidates.push(cur);
            continue;
        }
        for k in -3..=3i64 {
            let mut next = cur.clone();
            next.push(k);
            stack.push(next);
        }
    }
    candidates.sort_by_key(|ks| {
        (
            ks.iter().map(|k| k.unsigned_abs()).sum::<u64>(),
            ks.clone(),
        )
    });
    for ks in candidates {
        let mut mu = Expr::one();
        for (i, &k) in ks.iter().enumerate() {
            if k != 0 {
                mu = Expr::mul(mu, Expr::powi(chart.coord(i), k));
            }
        }
        let scaled = omega.scale(mu.clone());
        let d = exterior_derivative(&scaled);
        let mut ok = true;
        for (_, a) in d.coeffs() {
            let v = equals_zero(a, domain, cfg)
                .map_err(|e| RelationError::ZeroTest(e.to_string()))?;
            if !v.is_zero() {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(Some(simplify(&mu)));
        }
    }
    Ok(None)
}

/// A constraint h(x) = 0 carving a pseudostructure, with the commutator
/// component that produced it and a parametrization when one coordinate can
/// be solved for.
#[derive(Debug, Clone, PartialEq)]
pub struct LocusConstraint {
    pub equation: Expr,
    pub provenance: Vec<usize>,
    pub parametrization: Option<ParamMap>,
}

/// Degenerate-transformation locus: constraints plus grid sign-change
/// evidence per commutator component.
#[derive(Debug, Clone, PartialEq)]
pub struct Pseudostructure {
    pub constraints: Vec<LocusConstraint>,
    /// per component key: number of grid cells where the total changes sign
    pub sign_changes: BTreeMap<Vec<usize>, usize>,
}

/// True when `e` visibly cannot vanish on the reals (positive constant,
/// exponential, even power, or a sum of such with a positive constant).
fn provably_nonvanishing(e: &Expr) -> bool {
    fn nonneg(e: &Expr) -> bool {
        match e {
            Expr::Num(r) => !r.is_negative(),
            Expr::Pow(_, r) => {
                r.is_integer() && (r.numer() % num::BigInt::from(2)).is_zero()
            }
            Expr::Call(crate::expr::Builtin::Exp, _) => true,
            Expr::Prod(fs) => fs.iter().all(nonneg),
            _ => false,
        }
    }
    match e {
        Expr::Num(r) => !r.is_zero(),
        Expr::Call(crate::expr::Builtin::Exp, _) => true,
        Expr::Sum(ts) => {
            let mut has_positive_constant = false;
            for t in ts {
                match t {
                    Expr::Num(r) if r.is_positive() => has_positive_constant = true,
                    other if nonneg(other) => {}
                    _ => return false,
                }
            }
            has_positive_constant
        }
        _ => false,
    }
}

/// Splits a canonical expression into candidate vanishing factors.
fn vanishing_factors(e: &Expr) -> Vec<Expr> {
    let factors: Vec<Expr> = match e {
        Expr::Prod(fs) => fs.clone(),
        other => vec![other.clone()],
    };
    let mut out = Vec::new();
    for f in factors {
        let base = match f {
            Expr::Pow(b, r) if r.is_positive() => *b,
            Expr::Pow(_, _) => continue, // negative powers never vanish
            other => other,
        };
        if matches!(base, Expr::Num(_)) || provably_nonvanishing(&base) {
            continue;
        }
        let base = simplify(&base);
        if !out.contains(&base) {
            out.push(base);
        }
    }
    out
}

/// Builds an inclusion parametrization when the constraint is linear in one
/// coordinate: x_i = g(other coordinates).
fn solve_linear(chart: &Chart, eq: &Expr) -> Option<ParamMap> {
    for i in 0..chart.dim() {
        let name = chart.name(i);
        let d = crate::expr::diff(eq, name);
        if d.is_zero() || !d.free_symbols().is_empty() {
            continue; // not linear with constant coefficient in x_i
        }
        if let Expr::Num(c) = simplify(&d) {
            // eq = c*x_i + rest, solve x_i = -rest/c
            let mut zero_here = std::collections::HashMap::new();
            zero_here.insert(name.to_string(), Expr::zero());
            let rest = simplify(&eq.subst(&zero_here));
            let solved = simplify(&Expr::div(Expr::neg(rest), Expr::Num(c)));
            // parameter chart: remaining coordinates
            let params: Vec<String> = chart
                .names()
                .iter()
                .filter(|nm| *nm != name)
                .cloned()
                .collect();
            if params.is_empty() {
                return None;
            }
            let source = Chart::new(params).ok()?;
            let exprs: Vec<Expr> = chart
                .names()
                .iter()
                .map(|nm| {
                    if nm == name {
                        solved.clone()
                    } else {
                        Expr::sym(nm.clone())
                    }
                })
                .collect();
            // the solved expression must not mention x_i itself
            if solved.free_symbols().contains(name) {
                return None;
            }
            return ParamMap::new(source, chart.clone(), exprs).ok();
        }
    }
    None
}

/// Locates the degenerate-transformation locus of a nonidentical relation:
/// factored constraints from each nonzero commutator component plus grid
/// sign-change evidence over the domain box.
pub fn degenerate_loci(
    r: &EvolutionaryRelation,
    domain: &Domain,
    cfg: &ZeroConfig,
) -> Result<Pseudostructure, RelationError> {
    if r.is_identical() {
        return Err(RelationError::AlreadyIdentical);
    }
    let chart = r.chart().clone();
    let mut constraints: Vec<LocusConstraint> = Vec::new();
    let mut sign_changes = BTreeMap::new();
    for (key, verdict) in &r.verdicts {
        if verdict.is_zero() {
            continue;
        }
        let total = r.commutator.total(key);
        for eq in vanishing_factors(&total) {
            if constraints.iter().any(|c| c.equation == eq) {
                continue;
            }
            let parametrization = solve_linear(&chart, &eq);
            constraints.push(LocusConstraint {
                equation: eq,
                provenance: key.clone(),
                parametrization,
            });
        }
        sign_changes.insert(key.clone(), grid_sign_changes(&total, &chart, domain, cfg));
    }
    Ok(Pseudostructure {
        constraints,
        sign_changes,
    })
}

/// Counts sign changes of `e` between adjacent nodes of a coarse grid over
/// the domain box (numeric zero-locus evidence).
fn grid_sign_changes(e: &Expr, chart: &Chart, domain: &Domain, _cfg: &ZeroConfig) -> usize {
    const PTS: usize = 7;
    let free = e.free_symbols();
    let syms: Vec<String> = free.into_iter().collect();
    if syms.is_empty() {
        return 0;
    }
    let mut ranges = Vec::new();
    for s in &syms {
        let (lo, hi) = domain
            .box_for_f64(s)
            .or_else(|| {
                if chart.index_of(s).is_some() {
                    Some((1.0, 2.0))
                } else {
                    None
                }
            })
            .unwrap_or((1.0, 2.0));
        ranges.push((lo, hi));
    }
    let total: usize = PTS.pow(syms.len() as u32);
    let mut values = vec![f64::NAN; total];
    for (flat, value) in values.iter_mut().enumerate() {
        let mut idx = flat;
        let mut b = Bindings::new();
        for (s, (lo, hi)) in syms.iter().zip(&ranges) {
            let k = idx % PTS;
            idx /= PTS;
            b.set_float(s.clone(), lo + (hi - lo) * (k as f64) / ((PTS - 1) as f64));
        }
        if let Ok(v) = eval_f64(e, &b, OpaqueEval::Generic) {
            *value = v;
        }
    }
    let mut changes = 0;
    for flat in 0..total {
        let mut stride = 1;
        for _axis in 0..syms.len() {
            let k = (flat / stride) % PTS;
            if k + 1 < PTS {
                let a = values[flat];
                let b = values[flat + stride];
                if a.is_finite() && b.is_finite() && a * b <= 0.0 && (a != 0.0 || b != 0.0) {
                    changes += 1;
                }
            }
            stride *= PTS;
        }
    }
    changes
}

/// Pulls both sides of a relation back along φ and re-classifies on the
/// parameter chart. For a parametrization from `degenerate_loci` the result
/// classifies identical.
pub fn restrict_relation(
    r: &EvolutionaryRelation,
    phi: &ParamMap,
    domain: &Domain,
    cfg: &ZeroConfig,
) -> Result<EvolutionaryRelation, RelationError> {
    let psi = pullback(phi, &r.psi).map_err(|_| RelationError::ChartMismatch)?;
    let omega = pullback(phi, &r.omega).map_err(|_| RelationError::ChartMismatch)?;
    if omega.degree() > phi.source().dim() {
        // the restricted right side vanishes identically: the relation
        // holds trivially; represent it on the source chart
        let zero = DForm::zero(phi.source().clone(), omega.degree());
        return build_relation(psi, zero, None, domain, cfg);
    }
    build_relation(psi, omega, None, domain, cfg)
}

/// Outcome of one degree-descent step.
#[derive(Debug, Clone, PartialEq)]
pub enum DescentOutcome {
    /// A new relation of one degree lower, to be classified afresh.
    Next(EvolutionaryRelation),
    /// k = 0 reached: the recovered potential is a scalar.
    Terminal { potential: DForm },
}

#[derive(Debug, Error, PartialEq)]
pub enum DescentError {
    #[error("relation is nonidentical; descent needs an identical relation")]
    NotIdentical,
    #[error("potential not recoverable: {0}")]
    Potential(String),
}

/// One step of degree descent: integrate the identical relation's right side
/// and wrap the potential as the next right-hand side.
pub fn degree_descent(
    r: &EvolutionaryRelation,
    base: &[BigRational],
    domain: &Domain,
    cfg: &ZeroConfig,
) -> Result<DescentOutcome, DescentError> {
    if !r.is_identical() {
        return Err(DescentError::NotIdentical);
    }
    let chi = potential(&r.omega, base).map_err(|e: PotentialError| {
        DescentError::Potential(e.to_string())
    })?;
    if chi.degree() == 0 {
        return Ok(DescentOutcome::Terminal { potential: chi });
    }
    let psi = DForm::zero(r.chart().clone(), chi.degree() - 1);
    let next = build_relation(psi, chi, r.connection.clone(), domain, cfg)
        .map_err(|e| DescentError::Potential(e.to_string()))?;
    Ok(DescentOutcome::Next(next))
}

/// Interaction classification by the degree k of the realized closed form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureClass {
    pub p: u32,
    pub k: u32,
    pub n: u32,
    pub interaction: String,
    pub pseudostructure_dim: i64,
    pub metric_dim: u32,
}

#[derive(Debug, Error, PartialEq)]
pub enum StructureError {
    #[error("parameters out of range: need 0 <= k <= p <= 3")]
    OutOfRange,
}

/// Pure table lookup: k = 0 strong, 1 weak, 2 electromagnetic,
/// 3 gravitation; pseudostructure dimension n+1−k; metric dimension n+1.
pub fn classify_structure(p: u32, k: u32, n: u32) -> Result<StructureClass, StructureError> {
    if k > p || p > 3 {
        return Err(StructureError::OutOfRange);
    }
    let interaction = match k {
        0 => "strong",
        1 => "weak",
        2 => "electromagnetic",
        3 => "gravitation",
        _ => unreachable!(),
    };
    Ok(StructureClass {
        p,
        k,
        n,
        interaction: interaction.to_string(),
        pseudostructure_dim: i64::from(n) + 1 - i64::from(k),
        metric_dim: n + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn cfg() -> ZeroConfig {
        ZeroConfig::default()
    }

    fn xy() -> Chart {
        Chart::new(["x", "y"]).unwrap()
    }

    fn thermo_omega() -> DForm {
        let chart = Chart::new(["T", "V"]).unwrap();
        DForm::from_terms(
            chart,
            1,
            [
                (vec![0], Expr::sym("c_v")),
                (vec![1], parse_expr("R*T/V").unwrap()),
            ],
        )
        .unwrap()
    }

    #[test]
    fn exact_right_side_is_identical() {
        // omega = d(x^2*y)
        let f = DForm::scalar(xy(), parse_expr("x^2*y").unwrap());
        let omega = exterior_derivative(&f);
        let psi = DForm::scalar(xy(), Expr::sym("u"));
        let r = build_relation(psi, omega, None, &Domain::generic(), &cfg()).unwrap();
        assert!(r.is_identical());
    }

    #[test]
    fn thermo_relation_is_nonidentical_with_attribution() {
        let omega = thermo_omega();
        let psi = DForm::scalar(omega.chart().clone(), Expr::sym("E"));
        let r = build_relation(psi, omega, None, &Domain::generic(), &cfg()).unwrap();
        assert_eq!(r.status(), RelationStatus::Nonidentical);
        assert_eq!(
            r.commutator().total(&[0, 1]),
            simplify(&parse_expr("R/V").unwrap())
        );
        let report = classify_relation(&r);
        // the nonzero component is attributed to the dV coefficient,
        // differentiated along T
        assert!(report
            .attributions
            .iter()
            .any(|a| a.component == vec![0, 1] && a.source_key == vec![1] && a.direction == "T"));
    }

    #[test]
    fn contact_form_fails_frobenius() {
        let chart = Chart::new(["x", "y", "z"]).unwrap();
        // omega = dz - y dx
        let omega = DForm::from_terms(
            chart,
            1,
            [(vec![2], Expr::one()), (vec![0], parse_expr("-y").unwrap())],
        )
        .unwrap();
        match frobenius_test(&omega, &Domain::generic(), &cfg()).unwrap() {
            FrobeniusVerdict::Nonintegrable(w) => {
                assert_eq!(w.coeff(&[0, 1, 2]), Expr::one()); // dx^dy^dz
            }
            v => panic!("expected nonintegrable, got {v:?}"),
        }
    }

    #[test]
    fn closed_form_passes_frobenius() {
        let omega = DForm::from_terms(
            Chart::new(["x", "y", "z"]).unwrap(),
            1,
            [(vec![0], Expr::sym("y")), (vec![1], Expr::sym("x"))],
        )
        .unwrap();
        assert_eq!(
            frobenius_test(&omega, &Domain::generic(), &cfg()).unwrap(),
            FrobeniusVerdict::Integrable
        );
    }

    #[test]
    fn two_chart_forms_always_integrable() {
        assert_eq!(
            frobenius_test(&thermo_omega(), &Domain::generic(), &cfg()).unwrap(),
            FrobeniusVerdict::Integrable
        );
    }

    #[test]
    fn thermo_integrating_factor_is_one_over_t() {
        let mu = find_integrating_factor(&thermo_omega(), &Domain::generic(), &cfg())
            .unwrap()
            .expect("factor should be found");
        assert_eq!(mu, simplify(&parse_expr("1/T").unwrap()));
    }

    #[test]
    fn closed_form_needs_no_factor() {
        let omega = DForm::from_terms(
            xy(),
            1,
            [(vec![0], Expr::sym("y")), (vec![1], Expr::sym("x"))],
        )
        .unwrap();
        let mu = find_integrating_factor(&omega, &Domain::generic(), &cfg())
            .unwrap()
            .unwrap();
        assert!(mu.is_one());
    }

    #[test]
    fn loci_of_xy_dx() {
        // omega = x*y dx: K_xy = -x, pseudostructure {x = 0}
        let omega = DForm::basis(xy(), 0).scale(parse_expr("x*y").unwrap());
        let psi = DForm::scalar(xy(), Expr::sym("u"));
        let mut dom = Domain::generic();
        dom.set_box_i64("x", -1, 1);
        dom.set_box_i64("y", -1, 1);
        let r = build_relation(psi, omega, None, &dom, &cfg()).unwrap();
        assert!(!r.is_identical());
        let loci = degenerate_loci(&r, &dom, &cfg()).unwrap();
        assert_eq!(loci.constraints.len(), 1);
        assert_eq!(loci.constraints[0].equation, Expr::sym("x"));
        let phi = loci.constraints[0]
            .parametrization
            .clone()
            .expect("x = 0 is solvable");
        // restriction on the locus is identical
        let restricted = restrict_relation(&r, &phi, &Domain::generic(), &cfg()).unwrap();
        assert!(restricted.is_identical());
        // the grid saw the sign change of -x across x = 0
        assert!(loci.sign_changes[&vec![0, 1]] > 0);
    }

    #[test]
    fn positive_component_has_empty_locus() {
        // omega with K_xy = 1 + x^2: no real zeros
        // a_y with d(a_y)/dx = 1 + x^2: a_y = x + x^3/3
        let omega = DForm::from_terms(
            xy(),
            1,
            [(vec![1], parse_expr("x + x^3/3").unwrap())],
        )
        .unwrap();
        let psi = DForm::scalar(xy(), Expr::sym("u"));
        let mut dom = Domain::generic();
        dom.set_box_i64("x", -1, 1);
        dom.set_box_i64("y", -1, 1);
        let r = build_relation(psi, omega, None, &dom, &cfg()).unwrap();
        let loci = degenerate_loci(&r, &dom, &cfg()).unwrap();
        assert!(loci.constraints.is_empty(), "got {:?}", loci.constraints);
        assert_eq!(loci.sign_changes[&vec![0, 1]], 0);
    }

    #[test]
    fn loci_of_identical_relation_is_an_error() {
        let omega = DForm::from_terms(xy(), 1, [(vec![0], Expr::one())]).unwrap();
        let psi = DForm::scalar(xy(), Expr::sym("u"));
        let r = build_relation(psi, omega, None, &Domain::generic(), &cfg()).unwrap();
        assert_eq!(
            degenerate_loci(&r, &Domain::generic(), &cfg()),
            Err(RelationError::AlreadyIdentical)
        );
    }

    #[test]
    fn descent_terminates_at_scalar_potential() {
        let f = DForm::scalar(xy(), parse_expr("x^2*y").unwrap());
        let omega = exterior_derivative(&f);
        let psi = DForm::scalar(xy(), Expr::sym("u"));
        let r = build_relation(psi, omega, None, &Domain::generic(), &cfg()).unwrap();
        let base = vec![BigRational::zero(), BigRational::zero()];
        match degree_descent(&r, &base, &Domain::generic(), &cfg()).unwrap() {
            DescentOutcome::Terminal { potential } => {
                assert_eq!(potential, DForm::scalar(xy(), parse_expr("x^2*y").unwrap()));
            }
            other => panic!("expected terminal, got {other:?}"),
        }
    }

    #[test]
    fn descent_rejects_nonidentical() {
        let psi = DForm::scalar(thermo_omega().chart().clone(), Expr::sym("E"));
        let r = build_relation(psi, thermo_omega(), None, &Domain::generic(), &cfg()).unwrap();
        let base = vec![BigRational::zero(), BigRational::zero()];
        assert_eq!(
            degree_descent(&r, &base, &Domain::generic(), &cfg()),
            Err(DescentError::NotIdentical)
        );
    }

    #[test]
    fn structure_table_lookup() {
        let g = classify_structure(3, 3, 3).unwrap();
        assert_eq!(g.interaction, "gravitation");
        assert_eq!(g.pseudostructure_dim, 1);
        assert_eq!(g.metric_dim, 4);

        let em = classify_structure(2, 2, 2).unwrap();
        assert_eq!(em.interaction, "electromagnetic");
        assert_eq!(em.pseudostructure_dim, 1);

        let s = classify_structure(0, 0, 0).unwrap();
        assert_eq!(s.interaction, "strong");
        assert_eq!(s.pseudostructure_dim, 1);
        assert_eq!(s.metric_dim, 1);

        assert_eq!(classify_structure(1, 2, 3), Err(StructureError::OutOfRange));
        assert_eq!(classify_structure(4, 0, 3), Err(StructureError::OutOfRange));
    }

    #[test]
    fn all_ten_pairs_have_labels() {
        let mut count = 0;
        for p in 0..=3u32 {
            for k in 0..=p {
                let c = classify_structure(p, k, 3).unwrap();
                let expected = ["strong", "weak", "electromagnetic", "gravitation"][k as usize];
                assert_eq!(c.interaction, expected);
                assert_eq!(c.pseudostructure_dim, 4 - i64::from(k));
                count += 1;
            }
        }
        assert_eq!(count, 10);
    }
}
