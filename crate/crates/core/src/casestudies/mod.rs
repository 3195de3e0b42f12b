//! End-to-end case studies: ideal-gas thermodynamics, gas-dynamic
//! evolutionary relations with source attribution, the adapted-frame
//! electromagnetic relation, the Maxwell 2-form, and Hamiltonian systems.

use crate::expr::{
    diff, equals_zero, simplify, Domain, Expr, ZeroConfig, ZeroVerdict,
};
use crate::forms::{
    exterior_derivative, hodge_star, interior_product, potential, pullback, Chart, DForm,
    ParamMap, VectorField,
};
use crate::geometry::Metric;
use crate::relations::{
    build_relation, find_integrating_factor, EvolutionaryRelation,
    RelationStatus,
};
use crate::report::Report;
use num::{BigRational, One};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CaseError {
    #[error("malformed specification: {0}")]
    BadSpec(String),
    #[error("engine step failed: {0}")]
    Engine(String),
}

fn zero_on(e: &Expr, domain: &Domain, cfg: &ZeroConfig) -> bool {
    matches!(
        equals_zero(e, domain, cfg),
        Ok(ZeroVerdict::ProvedZero) | Ok(ZeroVerdict::NumericallyZero)
    )
}

// ---------------------------------------------------------------- thermo --

/// Ideal-gas inputs: internal energy E = c_v·T and pressure p = R·T/V.
#[derive(Debug, Clone)]
pub struct ThermoSpec {
    pub c_v: Expr,
    pub r: Expr,
}

impl Default for ThermoSpec {
    fn default() -> Self {
        ThermoSpec {
            c_v: Expr::sym("c_v"),
            r: Expr::sym("R"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ThermoOutcome {
    pub report: Report,
    pub omega: DForm,
    pub commutator_tv: Expr,
    pub integrating_factor: Option<Expr>,
    pub entropy: Option<DForm>,
}

/// Derives, with no case-specific shortcuts: the nonidentity of
/// dE + p dV, the integrating factor, the entropy potential anchored at
/// (T, V) = (1, 1), and the verified identical relation dS = μω.
pub fn thermo_ideal_gas(spec: &ThermoSpec) -> Result<ThermoOutcome, CaseError> {
    let chart = Chart::new(["T", "V"]).expect("static chart");
    let domain = Domain::generic();
    let cfg = ZeroConfig::default();
    let mut report = Report::new("case thermo");
    report.input("c_v", spec.c_v.to_string());
    report.input("R", spec.r.to_string());

    // omega = dE + p dV with E = c_v T, p = R T / V
    let energy = DForm::scalar(chart.clone(), Expr::mul(spec.c_v.clone(), Expr::sym("T")));
    let pressure = simplify(&Expr::div(
        Expr::mul(spec.r.clone(), Expr::sym("T")),
        Expr::sym("V"),
    ));
    let omega = exterior_derivative(&energy)
        .add(&DForm::basis(chart.clone(), 1).scale(pressure))
        .expect("same chart");
    report.expression("omega", omega.to_string());

    let psi = DForm::scalar(chart.clone(), Expr::sym("E"));
    let relation = build_relation(psi, omega.clone(), None, &domain, &cfg)
        .map_err(|e| CaseError::Engine(e.to_string()))?;
    let k_tv = relation.commutator().total(&[0, 1]);
    report.expression("K_TV", k_tv.to_string());
    report.verdict(
        "relation",
        match relation.status() {
            RelationStatus::Identical => "identical",
            RelationStatus::Nonidentical => "nonidentical",
        },
        format!("commutator K_TV = {k_tv}"),
    );

    let mu = find_integrating_factor(&omega, &domain, &cfg)
        .map_err(|e| CaseError::Engine(e.to_string()))?;
    let (mu, entropy) = match mu {
        None => {
            report.verdict("integrating_factor", "not_found", "");
            (None, None)
        }
        Some(mu) => {
            report.expression("integrating_factor", mu.to_string());
            report.verdict(
                "integrating_factor",
                "found",
                format!("d(mu*omega) vanishes for mu = {mu}"),
            );
            let scaled = omega.scale(mu.clone());
            let base = vec![BigRational::one(), BigRational::one()];
            match potential(&scaled, &base) {
                Ok(s) => {
                    report.expression("entropy", s.to_string());
                    // the identical relation dS = mu*omega, verified
                    let residual = exterior_derivative(&s).sub(&scaled).expect("chart");
                    let ok = residual.is_zero();
                    report.verdict(
                        "entropy_relation",
                        if ok { "identical" } else { "failed" },
                        "d(S) - mu*omega must be canonically zero".to_string(),
                    );
                    (Some(mu), Some(s))
                }
                Err(e) => {
                    report.verdict("entropy", "not_recovered", e.to_string());
                    (Some(mu), None)
                }
            }
        }
    };

    Ok(ThermoOutcome {
        report,
        omega,
        commutator_tv: k_tv,
        integrating_factor: mu,
        entropy,
    })
}

// ---------------------------------------------------------------- gasdyn --

/// Gas-dynamic inputs over a frame chart whose first coordinate runs along
/// the trajectory; the remaining coordinates are the normals.
#[derive(Debug, Clone)]
pub struct FlowSpec {
    /// frame coordinate names, trajectory direction first
    pub space: Vec<String>,
    /// velocity components over (space, time)
    pub velocity: Vec<Expr>,
    /// mass-force components
    pub force: Vec<Expr>,
    /// total enthalpy
    pub h0: Expr,
    /// temperature
    pub temperature: Expr,
    /// transport term A_1 along the trajectory (zero for the ideal gas)
    pub transport: Option<Expr>,
    /// name of the time symbol used for the unsteady term
    pub time: String,
}

#[derive(Debug, Clone)]
pub struct GasdynOutcome {
    pub report: Report,
    pub omega: DForm,
    pub relation: EvolutionaryRelation,
    /// source labels per nonzero commutator component
    pub attribution: BTreeMap<Vec<usize>, Vec<String>>,
}

/// 3-component cross product with symbolic entries.
fn cross(a: &[Expr; 3], b: &[Expr; 3]) -> [Expr; 3] {
    let term = |i: usize, j: usize| {
        Expr::sub(
            Expr::mul(a[i].clone(), b[j].clone()),
            Expr::mul(a[j].clone(), b[i].clone()),
        )
    };
    [term(1, 2), term(2, 0), term(0, 1)]
}

/// Builds the evolutionary relation for a gas-dynamic system: the right side
/// A_1 dξ¹ + A_ν dξ^ν with A_ν = (grad h0 + U×rot U − F + ∂U/∂t)_ν / T on
/// the normals, classifies it, and attributes every nonzero commutator
/// component to the source terms that feed it.
pub fn gasdyn_relation(spec: &FlowSpec) -> Result<GasdynOutcome, CaseError> {
    let n = spec.space.len();
    if !(2..=3).contains(&n) {
        return Err(CaseError::BadSpec(
            "frame chart must have 2 or 3 coordinates (trajectory + normals)".into(),
        ));
    }
    if spec.velocity.len() != n || spec.force.len() != n {
        return Err(CaseError::BadSpec(
            "velocity and force need one component per frame coordinate".into(),
        ));
    }
    let chart =
        Chart::new(spec.space.clone()).map_err(|e| CaseError::BadSpec(e.to_string()))?;
    let domain = Domain::generic();
    let cfg = ZeroConfig::default();
    let mut report = Report::new("case gas");

    // pad to 3 components for rot / cross product
    let pad = |v: &[Expr]| -> [Expr; 3] {
        let mut out = [Expr::zero(), Expr::zero(), Expr::zero()];
        for (i, e) in v.iter().enumerate() {
            out[i] = e.clone();
        }
        out
    };
    let u = pad(&spec.velocity);
    let coord_name = |i: usize| -> String {
        if i < n {
            spec.space[i].clone()
        } else {
            "__aux".to_string()
        }
    };
    let rot = [
        Expr::sub(diff(&u[2], &coord_name(1)), diff(&u[1], &coord_name(2))),
        Expr::sub(diff(&u[0], &coord_name(2)), diff(&u[2], &coord_name(0))),
        Expr::sub(diff(&u[1], &coord_name(0)), diff(&u[0], &coord_name(1))),
    ];
    let u_cross_rot = cross(&u, &rot);

    let inv_t = Expr::powi(spec.temperature.clone(), -1);
    let over_t = |e: Expr| simplify(&Expr::mul(e, inv_t.clone()));

    // named source parts, each a 1-form on the frame chart
    let mut parts: Vec<(String, DForm)> = Vec::new();
    let normal_form = |comps: Vec<Expr>| -> DForm {
        let mut w = DForm::zero(chart.clone(), 1);
        for (i, e) in comps.into_iter().enumerate() {
            if i == 0 {
                continue; // normals only; the trajectory slot is transport
            }
            w.add_term(&[i], e).expect("valid key");
        }
        w
    };
    let rot_form = normal_form((0..n).map(|i| over_t(u_cross_rot[i].clone())).collect());
    let force_form = normal_form(
        (0..n)
            .map(|i| over_t(Expr::neg(spec.force[i].clone())))
            .collect(),
    );
    let unsteady_form = normal_form(
        (0..n)
            .map(|i| over_t(diff(&u[i], &spec.time)))
            .collect(),
    );
    let grad_h0_form = normal_form(
        (0..n)
            .map(|i| over_t(diff(&spec.h0, &spec.space[i])))
            .collect(),
    );
    let mut transport_form = DForm::zero(chart.clone(), 1);
    if let Some(a1) = &spec.transport {
        transport_form
            .add_term(&[0], a1.clone())
            .expect("valid key");
    }
    parts.push(("rotationality".into(), rot_form));
    parts.push(("force".into(), force_form));
    parts.push(("unsteadiness".into(), unsteady_form));
    parts.push(("transport".into(), transport_form));

    let mut omega = grad_h0_form.clone();
    for (_, w) in &parts {
        omega = omega.add(w).expect("same chart");
    }
    report.expression("omega", omega.to_string());

    let psi = DForm::scalar(chart.clone(), Expr::sym("s"));
    let relation = build_relation(psi, omega.clone(), None, &domain, &cfg)
        .map_err(|e| CaseError::Engine(e.to_string()))?;
    report.verdict(
        "relation",
        match relation.status() {
            RelationStatus::Identical => "identical",
            RelationStatus::Nonidentical => "nonidentical",
        },
        String::new(),
    );

    // attribution: a source label applies to a component when the source's
    // own commutator contribution there is nonzero
    let mut attribution: BTreeMap<Vec<usize>, Vec<String>> = BTreeMap::new();
    for (key, verdict) in relation.verdicts() {
        if verdict.is_zero() {
            continue;
        }
        let mut labels = Vec::new();
        for (label, w) in &parts {
            let dw = exterior_derivative(w);
            if !zero_on(&dw.coeff(key), &domain, &cfg) {
                labels.push(label.clone());
            }
        }
        let total = relation.commutator().total(key);
        report.verdict(
            format!("commutator[{key:?}]"),
            "nonzero",
            format!("{total}; sources: {}", labels.join(" + ")),
        );
        if !zero_on(&exterior_derivative(&grad_h0_form).coeff(key), &domain, &cfg)
            && labels.is_empty()
        {
            report.warning(format!(
                "component {key:?} is fed only by the enthalpy gradient term"
            ));
        }
        attribution.insert(key.clone(), labels);
    }

    Ok(GasdynOutcome {
        report,
        omega,
        relation,
        attribution,
    })
}

// -------------------------------------------------------------------- em --

/// Adapted-frame electromagnetic inputs on the chart (l1, t): the Poynting
/// modulus S, the energy density I, and the source projections.
#[derive(Debug, Clone)]
pub struct EmSpec {
    pub s: Expr,
    pub i: Expr,
    pub q_e: Expr,
    pub q_i_prime: Expr,
}

impl EmSpec {
    /// Vacuum wave preset: S and I are opaque profiles of (l1 − c·t),
    /// sources zero.
    pub fn vacuum_wave() -> EmSpec {
        let phase = simplify(
            &crate::expr::parse_expr("l1 - c*t").expect("static expression"),
        );
        EmSpec {
            s: Expr::opaque("sigma", vec![phase.clone()]),
            i: Expr::opaque("iota", vec![phase]),
            q_e: Expr::zero(),
            q_i_prime: Expr::zero(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EmOutcome {
    pub report: Report,
    pub relation: EvolutionaryRelation,
    /// −(∂S/∂t)/(∂S/∂l1), simplified
    pub direction_ratio: Option<Expr>,
    /// Q^e dt + Q'^i dl1 when sources are present
    pub residual: Option<DForm>,
}

/// The adapted-frame relation dS = −dI + (Q^e dt + Q'^i dl1): with zero
/// sources and a wave preset it verifies the characteristic restriction
/// l1 = c·t + k and recovers the integrating direction c; with sources it
/// reports the discrete residual constraint.
pub fn em_poynting(spec: &EmSpec) -> Result<EmOutcome, CaseError> {
    let chart = Chart::new(["l1", "t"]).expect("static chart");
    let domain = Domain::generic();
    let cfg = ZeroConfig::default();
    let mut report = Report::new("case em");
    report.input("S", spec.s.to_string());
    report.input("I", spec.i.to_string());
    report.input("Q_e", spec.q_e.to_string());
    report.input("Q_i_prime", spec.q_i_prime.to_string());

    // omega = -dI + Q_e dt + Q'_i dl1
    let di = exterior_derivative(&DForm::scalar(chart.clone(), spec.i.clone()));
    let sources = DForm::from_terms(
        chart.clone(),
        1,
        [(vec![1], spec.q_e.clone()), (vec![0], spec.q_i_prime.clone())],
    )
    .expect("valid keys");
    let omega = di.scale(Expr::int(-1)).add(&sources).expect("chart");
    report.expression("omega", omega.to_string());

    let psi = DForm::scalar(chart.clone(), spec.s.clone());
    let relation = build_relation(psi, omega.clone(), None, &domain, &cfg)
        .map_err(|e| CaseError::Engine(e.to_string()))?;

    let sources_zero = spec.q_e.is_zero() && spec.q_i_prime.is_zero();
    let mut direction_ratio = None;
    let mut residual = None;
    if sources_zero {
        // integrating direction: -(dS/dt)/(dS/dl1)
        let ds_t = diff(&spec.s, "t");
        let ds_l1 = diff(&spec.s, "l1");
        if !ds_l1.is_zero() {
            let ratio = simplify(&Expr::neg(Expr::div(ds_t, ds_l1)));
            report.expression("integrating_direction", ratio.to_string());
            let is_c = simplify(&Expr::sub(ratio.clone(), Expr::sym("c"))).is_zero();
            report.verdict(
                "integrating_direction",
                if is_c { "equals_c" } else { "other" },
                format!("-(dS/dt)/(dS/dl1) = {ratio}"),
            );
            direction_ratio = Some(ratio);
        }
        // restriction to the characteristic family l1 = c*t + k
        let line = Chart::new(["t"]).expect("static chart");
        let phi = ParamMap::new(
            line,
            chart.clone(),
            vec![
                crate::expr::parse_expr("c*t + k").expect("static expression"),
                Expr::sym("t"),
            ],
        )
        .expect("dimensions match");
        let ds = exterior_derivative(&DForm::scalar(chart.clone(), spec.s.clone()));
        let ds_pulled = pullback(&phi, &ds).map_err(|e| CaseError::Engine(e.to_string()))?;
        report.verdict(
            "characteristic_restriction",
            if ds_pulled.is_zero() {
                "identical"
            } else {
                "nonidentical"
            },
            "dS pulled back along l1 = c*t + k".to_string(),
        );
    } else {
        let r = sources;
        report.expression("residual_constraint", r.to_string());
        report.verdict(
            "discrete_condition",
            "required",
            format!("closure is possible only where {r} = 0"),
        );
        residual = Some(r);
    }

    Ok(EmOutcome {
        report,
        relation,
        direction_ratio,
        residual,
    })
}

// --------------------------------------------------------------- maxwell --

/// Field strengths for the Maxwell 2-form on the chart (x0, x, y, z) with
/// x0 = c·t natural units.
#[derive(Debug, Clone)]
pub struct MaxwellSpec {
    pub e: [Expr; 3],
    pub h: [Expr; 3],
}

#[derive(Debug, Clone)]
pub struct MaxwellOutcome {
    pub report: Report,
    pub theta: DForm,
    pub d_theta_zero: bool,
    pub d_dual_zero: bool,
}

/// Assembles θ² = E_i dx^i ∧ dx0 + H-components on the spatial 2-planes and
/// reports the closure of θ² and of its Euclidean Hodge dual.
pub fn maxwell_check(spec: &MaxwellSpec) -> Result<MaxwellOutcome, CaseError> {
    let chart = Chart::new(["x0", "x", "y", "z"]).expect("static chart");
    let domain = Domain::generic();
    let cfg = ZeroConfig::default();
    let mut report = Report::new("case maxwell");

    let mut theta = DForm::zero(chart.clone(), 2);
    // E_x dx^dx0 + E_y dy^dx0 + E_z dz^dx0
    for (i, e) in spec.e.iter().enumerate() {
        theta
            .add_term(&[i + 1, 0], e.clone())
            .expect("valid key");
    }
    // H_x dy^dz + H_y dz^dx + H_z dx^dy
    let planes = [[2usize, 3], [3, 1], [1, 2]];
    for (h, plane) in spec.h.iter().zip(planes) {
        theta.add_term(&plane, h.clone()).expect("valid key");
    }
    report.expression("theta", theta.to_string());

    let check_closed = |w: &DForm| -> bool {
        exterior_derivative(w)
            .coeffs()
            .values()
            .all(|a| zero_on(a, &domain, &cfg))
    };
    let d_theta_zero = check_closed(&theta);
    report.verdict(
        "d_theta",
        if d_theta_zero { "closed" } else { "unclosed" },
        format!("d(theta) = {}", exterior_derivative(&theta)),
    );

    let metric = Metric::identity(chart);
    let dual = hodge_star(&theta, &metric, &domain, &cfg)
        .map_err(|e| CaseError::Engine(e.to_string()))?;
    let d_dual_zero = check_closed(&dual);
    report.expression("dual", dual.to_string());
    report.verdict(
        "d_dual",
        if d_dual_zero { "closed" } else { "unclosed" },
        "Euclidean-metric Hodge dual; the duality operator is an interpretation".to_string(),
    );

    Ok(MaxwellOutcome {
        report,
        theta,
        d_theta_zero,
        d_dual_zero,
    })
}

// ----------------------------------------------------------- hamiltonian --

/// Hamiltonian inputs: H over the chart (t, q_j…, p_j…).
#[derive(Debug, Clone)]
pub struct HamiltonianSpec {
    pub h: Expr,
    /// number of (q, p) pairs
    pub pairs: usize,
}

#[derive(Debug, Clone)]
pub struct HamiltonianOutcome {
    pub report: Report,
    pub theta: DForm,
    pub contraction_zero: bool,
}

fn hamiltonian_chart(pairs: usize) -> (Chart, Vec<String>, Vec<String>) {
    let (qs, ps): (Vec<String>, Vec<String>) = if pairs == 1 {
        (vec!["q".into()], vec!["p".into()])
    } else {
        (
            (1..=pairs).map(|j| format!("q{j}")).collect(),
            (1..=pairs).map(|j| format!("p{j}")).collect(),
        )
    };
    let mut names = vec!["t".to_string()];
    names.extend(qs.iter().cloned());
    names.extend(ps.iter().cloned());
    let chart = Chart::new(names).expect("unique names");
    (chart, qs, ps)
}

/// Builds θ = −H dt + Σ p_j dq_j and the Hamiltonian field
/// X = ∂t + Σ (∂H/∂p_j) ∂q_j − (∂H/∂q_j) ∂p_j, then verifies i_X(dθ) = 0.
pub fn hamiltonian_check(spec: &HamiltonianSpec) -> Result<HamiltonianOutcome, CaseError> {
    if spec.pairs == 0 {
        return Err(CaseError::BadSpec("need at least one (q, p) pair".into()));
    }
    let (chart, qs, ps) = hamiltonian_chart(spec.pairs);
    let mut report = Report::new("case hamiltonian");
    report.input("H", spec.h.to_string());

    let mut theta = DForm::zero(chart.clone(), 1);
    theta
        .add_term(&[0], Expr::neg(spec.h.clone()))
        .expect("valid key");
    for j in 0..spec.pairs {
        let p_idx = 1 + spec.pairs + j;
        let q_idx = 1 + j;
        theta
            .add_term(&[q_idx], Expr::sym(ps[j].clone()))
            .expect("valid key");
        let _ = p_idx;
    }
    report.expression("theta", theta.to_string());

    let mut comps = vec![Expr::zero(); chart.dim()];
    comps[0] = Expr::one(); // ∂t
    for j in 0..spec.pairs {
        comps[1 + j] = diff(&spec.h, &ps[j]); // ∂H/∂p_j on ∂q_j
        comps[1 + spec.pairs + j] = simplify(&Expr::neg(diff(&spec.h, &qs[j])));
    }
    let x = VectorField::new(chart.clone(), comps);

    let d_theta = exterior_derivative(&theta);
    let contraction =
        interior_product(&x, &d_theta).map_err(|e| CaseError::Engine(e.to_string()))?;
    let contraction_zero = contraction.is_zero();
    report.expression("i_X_dtheta", contraction.to_string());
    report.verdict(
        "hamiltonian_field",
        if contraction_zero { "annihilates" } else { "fails" },
        "i_X(d theta) must vanish canonically".to_string(),
    );

    Ok(HamiltonianOutcome {
        report,
        theta,
        contraction_zero,
    })
}
