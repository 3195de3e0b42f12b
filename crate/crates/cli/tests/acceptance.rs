//! Acceptance suite: one test (one pass/fail line) per acceptance criterion.

use num::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use skewform::casestudies::{
    em_poynting, gasdyn_relation, hamiltonian_check, thermo_ideal_gas, EmSpec, FlowSpec,
    HamiltonianSpec, ThermoSpec,
};
use skewform::forms::{
    closure_classify, commutator_with_connection, exterior_derivative, interior_product,
    potential, pullback, wedge, Chart, ClosureVerdict, DForm, ParamMap, VectorField,
};
use skewform::geometry::{curvature, levi_civita, Connection, Metric};
use skewform::numerics::{fd_check, fd_check_against, GridSampler};
use skewform::relations::{
    build_relation, classify_structure, degenerate_loci, frobenius_test, restrict_relation,
    FrobeniusVerdict,
};
use skewform::{equals_zero, parse_expr, simplify, Bindings, Domain, Expr, ZeroConfig};
use std::process::Command;
use std::time::Instant;

const SEED: u64 = 0xACCE_97;

fn chart_n(n: usize) -> Chart {
    let names = ["x", "y", "z", "w"];
    Chart::new(names[..n].iter().map(|s| s.to_string())).unwrap()
}

/// Random small polynomial in the chart coordinates.
fn rand_poly(rng: &mut StdRng, chart: &Chart) -> Expr {
    let terms = rng.gen_range(1..=3);
    let mut acc = Expr::zero();
    for _ in 0..terms {
        let mut t = Expr::int(rng.gen_range(-3..=3i64));
        for name in chart.names() {
            let e = rng.gen_range(0..=2i64);
            if e > 0 {
                t = Expr::mul(t, Expr::powi(Expr::sym(name.clone()), e));
            }
        }
        acc = Expr::add(acc, t);
    }
    simplify(&acc)
}

/// Random p-form with polynomial coefficients; at least one term.
fn rand_form(rng: &mut StdRng, chart: &Chart, p: usize) -> DForm {
    let n = chart.dim();
    let mut w = DForm::zero(chart.clone(), p);
    let mut keys: Vec<Vec<usize>> = Vec::new();
    let mut key: Vec<usize> = (0..p).collect();
    if p == 0 {
        keys.push(vec![]);
    } else if p <= n {
        loop {
            keys.push(key.clone());
            // advance increasing tuple
            let mut i = p;
            let mut advanced = false;
            while i > 0 {
                i -= 1;
                if key[i] < n - (p - i) {
                    key[i] += 1;
                    for j in (i + 1)..p {
                        key[j] = key[j - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
    for k in &keys {
        if rng.gen_bool(0.6) {
            w.add_term(k, rand_poly(rng, chart)).unwrap();
        }
    }
    if w.is_zero() {
        w.add_term(&keys[0], rand_poly(rng, chart)).unwrap();
    }
    w
}

#[test]
fn criterion_01_algebraic_identity_suite() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(SEED);
    for i in 0..100 {
        let n = 2 + (i % 3); // charts of dimension 2..4
        let chart = chart_n(n);
        let p = rng.gen_range(1..n);
        let q = rng.gen_range(1..=(n - p).max(1));
        let a = rand_form(&mut rng, &chart, p);
        let b = rand_form(&mut rng, &chart, q);

        // d(d(a)) = 0, exactly
        assert!(exterior_derivative(&exterior_derivative(&a)).is_zero());

        // wedge(a, b) = (-1)^{pq} wedge(b, a)
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap();
        let sign = if (p * q) % 2 == 0 { 1 } else { -1 };
        assert!(ab.sub(&ba.scale(Expr::int(sign))).unwrap().is_zero());

        // Leibniz: d(a^b) = d(a)^b + (-1)^p a^d(b)
        let lhs = exterior_derivative(&ab);
        let sgn = if p % 2 == 0 { 1 } else { -1 };
        let rhs = wedge(&exterior_derivative(&a), &b)
            .unwrap()
            .add(&wedge(&a, &exterior_derivative(&b)).unwrap().scale(Expr::int(sgn)))
            .unwrap();
        assert!(lhs.sub(&rhs).unwrap().is_zero());

        // interior product anti-derivation
        let x = VectorField::new(
            chart.clone(),
            (0..n).map(|_| rand_poly(&mut rng, &chart)).collect(),
        );
        // (skipped when either factor is a scalar: i_X then contributes
        // nothing and the degrees of the two summands differ formally)
        if p >= 1 && q >= 1 {
            let lhs = interior_product(&x, &ab).unwrap();
            let rhs = wedge(&interior_product(&x, &a).unwrap(), &b)
                .unwrap()
                .add(
                    &wedge(&a, &interior_product(&x, &b).unwrap())
                        .unwrap()
                        .scale(Expr::int(sgn)),
                )
                .unwrap();
            assert!(lhs.sub(&rhs).unwrap().is_zero());
        }

        // pullback-d naturality along a random polynomial map from (u, v)
        let source = Chart::new(["u", "v"]).unwrap();
        let phi = ParamMap::new(
            source.clone(),
            chart.clone(),
            (0..n).map(|_| rand_poly(&mut rng, &source)).collect(),
        )
        .unwrap();
        let lhs = pullback(&phi, &exterior_derivative(&a)).unwrap();
        let rhs = exterior_derivative(&pullback(&phi, &a).unwrap());
        assert!(lhs.sub(&rhs).unwrap().is_zero());
    }
    assert!(
        start.elapsed().as_secs() < 60,
        "identity suite exceeded 60 s: {:?}",
        start.elapsed()
    );
}

#[test]
fn criterion_02_commutator_decomposition() {
    let mut rng = StdRng::seed_from_u64(SEED ^ 2);
    for i in 0..20 {
        let n = 2 + (i % 2);
        let chart = chart_n(n);
        let w = rand_form(&mut rng, &chart, 1);

        // random (generally asymmetric) connection
        let mut conn = Connection::zero(chart.clone());
        for _ in 0..4 {
            let (r, m, v) = (
                rng.gen_range(0..n),
                rng.gen_range(0..n),
                rng.gen_range(0..n),
            );
            conn.set(r, m, v, rand_poly(&mut rng, &chart)).unwrap();
        }
        let k = commutator_with_connection(&w, &conn).unwrap();
        let dw = exterior_derivative(&w);
        for alpha in 0..n {
            for beta in (alpha + 1)..n {
                let key = vec![alpha, beta];
                // flat part is exactly the exterior-derivative coefficient
                assert_eq!(k.flat(&key), dw.coeff(&key));
                // connection part oracle: (G^s_ba - G^s_ab) a_s
                let mut expect = Expr::zero();
                for s in 0..n {
                    let g = Expr::sub(conn.get(s, beta, alpha), conn.get(s, alpha, beta));
                    expect = Expr::add(expect, Expr::mul(g, w.coeff(&[s])));
                }
                assert_eq!(k.connection(&key), simplify(&expect));
                // total = flat + connection, exactly
                assert_eq!(
                    k.total(&key),
                    simplify(&Expr::add(k.flat(&key), k.connection(&key)))
                );
            }
        }

        // symmetric connection: the connection part vanishes
        let mut sym = Connection::zero(chart.clone());
        for r in 0..n {
            for m in 0..n {
                for v in m..n {
                    let e = rand_poly(&mut rng, &chart);
                    sym.set(r, m, v, e.clone()).unwrap();
                    sym.set(r, v, m, e).unwrap();
                }
            }
        }
        let ks = commutator_with_connection(&w, &sym).unwrap();
        for (key, _) in ks.parts() {
            assert!(ks.connection(key).is_zero(), "symmetric connection term");
        }
    }
}

#[test]
fn criterion_03_thermodynamics_end_to_end() {
    let start = Instant::now();
    let out = thermo_ideal_gas(&ThermoSpec::default()).unwrap();
    assert_eq!(out.commutator_tv, simplify(&parse_expr("R/V").unwrap()));
    assert_eq!(
        out.integrating_factor,
        Some(simplify(&parse_expr("1/T").unwrap()))
    );
    let s = out.entropy.expect("entropy recovered");
    let expected = parse_expr("c_v*ln(T) + R*ln(V)").unwrap();
    assert_eq!(s.coeff(&[]), simplify(&expected));
    // d(S) - mu*omega is canonically zero
    let mu = out.integrating_factor.unwrap();
    let residual = exterior_derivative(&s)
        .sub(&out.omega.scale(mu))
        .unwrap();
    assert!(residual.is_zero());
    assert!(
        start.elapsed().as_secs_f64() < 5.0,
        "thermo pipeline exceeded 5 s: {:?}",
        start.elapsed()
    );
}

#[test]
fn criterion_04_frobenius_suite() {
    let domain = Domain::generic();
    let cfg = ZeroConfig::default();
    let chart = chart_n(3);

    // contact form dz - y dx: rejected with witness dx^dy^dz
    let mut contact = DForm::zero(chart.clone(), 1);
    contact.add_term(&[2], Expr::one()).unwrap();
    contact.add_term(&[0], Expr::neg(Expr::sym("y"))).unwrap();
    match frobenius_test(&contact, &domain, &cfg).unwrap() {
        FrobeniusVerdict::Nonintegrable(witness) => {
            assert!(!witness.coeff(&[0, 1, 2]).is_zero());
        }
        FrobeniusVerdict::Integrable => panic!("contact form accepted"),
    }

    let mut rng = StdRng::seed_from_u64(SEED ^ 4);

    // every closed 1-form accepted
    for _ in 0..10 {
        let f = rand_poly(&mut rng, &chart);
        let exact = exterior_derivative(&DForm::scalar(chart.clone(), f));
        assert!(matches!(
            frobenius_test(&exact, &domain, &cfg).unwrap(),
            FrobeniusVerdict::Integrable
        ));
    }

    // 2-chart forms always accepted
    let chart2 = chart_n(2);
    for _ in 0..5 {
        let w = rand_form(&mut rng, &chart2, 1);
        assert!(matches!(
            frobenius_test(&w, &domain, &cfg).unwrap(),
            FrobeniusVerdict::Integrable
        ));
    }

    // verdict invariant under positive scalar rescaling
    for _ in 0..20 {
        let w = rand_form(&mut rng, &chart, 1);
        let g = rand_poly(&mut rng, &chart);
        let pos = simplify(&Expr::add(Expr::one(), Expr::powi(g, 2)));
        let scaled = w.scale(pos);
        let v1 = matches!(
            frobenius_test(&w, &domain, &cfg).unwrap(),
            FrobeniusVerdict::Integrable
        );
        let v2 = matches!(
            frobenius_test(&scaled, &domain, &cfg).unwrap(),
            FrobeniusVerdict::Integrable
        );
        assert_eq!(v1, v2, "rescaling changed the Frobenius verdict");
    }
}

#[test]
fn criterion_05_poincare_soundness() {
    let mut rng = StdRng::seed_from_u64(SEED ^ 5);
    for i in 0..50 {
        let n = 2 + (i % 3);
        let chart = chart_n(n);
        let p = rng.gen_range(0..n); // degree of the generating form
        let b = rand_form(&mut rng, &chart, p);
        let w = exterior_derivative(&b);
        if w.is_zero() {
            continue;
        }
        let base = vec![BigRational::from_integer(1.into()); n];
        let chi = potential(&w, &base).expect("potential of an exact form");
        assert!(exterior_derivative(&chi).sub(&w).unwrap().is_zero());
    }

    // punctured-plane winding form
    let chart = chart_n(2);
    let den = parse_expr("x^2 + y^2").unwrap();
    let mut winding = DForm::zero(chart.clone(), 1);
    winding
        .add_term(&[0], Expr::div(Expr::neg(Expr::sym("y")), den.clone()))
        .unwrap();
    winding
        .add_term(&[1], Expr::div(Expr::sym("x"), den))
        .unwrap();
    let mut domain = Domain::generic();
    domain.set_box_i64("x", -1, 1);
    domain.set_box_i64("y", -1, 1);
    let mut origin = std::collections::BTreeMap::new();
    origin.insert("x".to_string(), BigRational::from_integer(0.into()));
    origin.insert("y".to_string(), BigRational::from_integer(0.into()));
    domain.exclude(origin);
    let base = vec![BigRational::from_integer(0.into()); 2];
    match closure_classify(&winding, &base, &domain, &ZeroConfig::default()) {
        ClosureVerdict::ClosedPotentialNotFound { obstruction } => {
            assert!(!obstruction.is_empty(), "obstruction note missing");
        }
        other => panic!("winding form misclassified: {other:?}"),
    }
}

#[test]
fn criterion_06_geometry_oracles() {
    let domain = Domain::generic();
    let cfg = ZeroConfig::default();
    let chart = Chart::new(["theta", "phi"]).unwrap();
    let g = Metric::diagonal(
        chart.clone(),
        vec![Expr::one(), parse_expr("sin(theta)^2").unwrap()],
    );
    let lc = levi_civita(&g).unwrap();
    assert_eq!(
        lc.get(0, 1, 1),
        simplify(&parse_expr("-sin(theta)*cos(theta)").unwrap())
    );
    assert_eq!(
        lc.get(1, 0, 1),
        simplify(&parse_expr("cos(theta)/sin(theta)").unwrap())
    );
    let r = curvature(&lc);
    let diff_to_oracle = simplify(&Expr::sub(
        r.get(0, 1, 0, 1),
        parse_expr("sin(theta)^2").unwrap(),
    ));
    assert!(equals_zero(&diff_to_oracle, &domain, &cfg).unwrap().is_zero());

    // flat metrics give zero curvature
    for diag in [
        vec![Expr::one(), Expr::one(), Expr::one()],
        vec![Expr::int(2), Expr::int(3), Expr::int(5)],
    ] {
        let flat = Metric::diagonal(chart_n(3), diag);
        let lc = levi_civita(&flat).unwrap();
        assert!(curvature(&lc).components().is_empty());
    }
}

#[test]
fn criterion_07_pseudostructure_restriction() {
    let domain = Domain::generic();
    let cfg = ZeroConfig::default();

    // omega = x*y dx: locus x = 0, restriction classifies identical
    let chart = chart_n(2);
    let mut w = DForm::zero(chart.clone(), 1);
    w.add_term(&[0], parse_expr("x*y").unwrap()).unwrap();
    let psi = DForm::scalar(chart.clone(), Expr::zero());
    let r = build_relation(psi, w, None, &domain, &cfg).unwrap();
    assert!(!r.is_identical());
    let ps = degenerate_loci(&r, &domain, &cfg).unwrap();
    let mut restricted_any = false;
    for c in &ps.constraints {
        if let Some(phi) = &c.parametrization {
            let restricted = restrict_relation(&r, phi, &domain, &cfg).unwrap();
            assert!(
                restricted.is_identical(),
                "restriction onto {} = 0 is not identical",
                c.equation
            );
            restricted_any = true;
        }
    }
    assert!(restricted_any, "no parametrized constraint emitted");

    // EM characteristic l1 = c*t + k
    let out = em_poynting(&EmSpec::vacuum_wave()).unwrap();
    assert!(out
        .report
        .verdicts
        .iter()
        .any(|v| v.name == "characteristic_restriction" && v.verdict == "identical"));
}

#[test]
fn criterion_08_em_direction_and_residual() {
    // vacuum: the integrating direction simplifies exactly to the symbol c
    let out = em_poynting(&EmSpec::vacuum_wave()).unwrap();
    assert_eq!(out.direction_ratio, Some(Expr::sym("c")));

    // sources: the residual constraint is exactly Q^e dt + Q'^i dl1
    let mut spec = EmSpec::vacuum_wave();
    spec.q_e = Expr::sym("Q_e");
    spec.q_i_prime = Expr::sym("Q_i_prime");
    let out = em_poynting(&spec).unwrap();
    let r = out.residual.expect("residual emitted");
    let chart = Chart::new(["l1", "t"]).unwrap();
    let expected = DForm::from_terms(
        chart,
        1,
        [
            (vec![1], Expr::sym("Q_e")),
            (vec![0], Expr::sym("Q_i_prime")),
        ],
    )
    .unwrap();
    assert_eq!(r, expected);
    assert_eq!(
        out.report.expressions["residual_constraint"],
        "(Q_i_prime)*dl1 + (Q_e)*dt"
    );
}

#[test]
fn criterion_09_structure_table() {
    let n = 3u32;
    let mut seen = 0;
    for p in 0..=3u32 {
        for k in 0..=p {
            let c = classify_structure(p, k, n).unwrap();
            let want = match k {
                0 => "strong",
                1 => "weak",
                2 => "electromagnetic",
                3 => "gravitation",
                _ => unreachable!(),
            };
            assert_eq!(c.interaction, want);
            assert_eq!(c.pseudostructure_dim, (n + 1 - k) as i64);
            assert_eq!(c.metric_dim, n + 1);
            seen += 1;
        }
    }
    assert_eq!(seen, 10);
    assert!(classify_structure(4, 0, 3).is_err());
    assert!(classify_structure(2, 3, 3).is_err());
}

#[test]
fn criterion_10_numeric_cross_validation() {
    let mut extra = Bindings::new();
    extra.set_float("c_v", 1.3);
    extra.set_float("R", 0.7);
    extra.set_float("T0", 1.1);
    extra.set_float("h0", 0.9);

    let grid_for = |w: &DForm, h: f64| {
        GridSampler::with_step(
            w.chart().clone(),
            vec![1.0; w.chart().dim()],
            5,
            vec![h; w.chart().dim()],
        )
        .unwrap()
    };

    // thermo form at h = 1e-3
    let thermo = thermo_ideal_gas(&ThermoSpec::default()).unwrap();
    let rep = fd_check(&thermo.omega, &grid_for(&thermo.omega, 1e-3), &extra).unwrap();
    assert!(rep.max_rel_err <= 1e-5, "thermo fd err {}", rep.max_rel_err);

    // gas-dynamic shear flow form
    let gas = gasdyn_relation(&FlowSpec {
        space: vec!["x".into(), "y".into()],
        velocity: vec![Expr::opaque("u", vec![Expr::sym("y")]), Expr::zero()],
        force: vec![Expr::zero(), Expr::zero()],
        h0: Expr::sym("h0"),
        temperature: Expr::sym("T0"),
        transport: None,
        time: "t".into(),
    })
    .unwrap();
    let rep = fd_check(&gas.omega, &grid_for(&gas.omega, 1e-3), &extra).unwrap();
    assert!(rep.max_rel_err <= 1e-5, "gasdyn fd err {}", rep.max_rel_err);

    // Hamiltonian form
    let ham = hamiltonian_check(&HamiltonianSpec {
        h: parse_expr("(p^2 + q^2)/2").unwrap(),
        pairs: 1,
    })
    .unwrap();
    let rep = fd_check(&ham.theta, &grid_for(&ham.theta, 1e-3), &extra).unwrap();
    assert!(rep.max_rel_err <= 1e-5, "hamiltonian fd err {}", rep.max_rel_err);

    // error order >= 2 under h halving, on a quartic Hamiltonian whose
    // truncation error dominates rounding
    let quartic = hamiltonian_check(&HamiltonianSpec {
        h: parse_expr("q^4/4 + p^2/2").unwrap(),
        pairs: 1,
    })
    .unwrap();
    let e1 = fd_check(&quartic.theta, &grid_for(&quartic.theta, 2e-2), &extra)
        .unwrap()
        .max_rel_err;
    let e2 = fd_check(&quartic.theta, &grid_for(&quartic.theta, 1e-2), &extra)
        .unwrap()
        .max_rel_err;
    assert!(e1 > 1e-8, "truncation error too small to measure: {e1}");
    assert!(e2 <= e1 / 3.0, "halving h gave {e1} -> {e2}, not order >= 2");

    // mutation test: a sign-flipped derivative must be flagged
    let wrong = exterior_derivative(&thermo.omega).scale(Expr::int(-1));
    let rep = fd_check_against(
        &thermo.omega,
        &wrong,
        &grid_for(&thermo.omega, 1e-3),
        &extra,
    )
    .unwrap();
    assert!(rep.max_rel_err >= 1e-2, "mutation not flagged: {}", rep.max_rel_err);
}

// ---------------------------------------------------------------- CLI -----

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_skewform"))
}

fn run_args(args: &[&str], envs: &[(&str, &str)]) -> std::process::Output {
    let mut cmd = bin();
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

#[test]
fn criterion_11_cli_determinism_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ws = dir.path().join("work.dsl");
    std::fs::write(
        &ws,
        "\
chart (T, V)
form psi : 0 = E
form omega : 1 = c_v*dT + (R*T/V)*dV
form exact : 1 = 2*T*V*dT + (T^2)*dV
relation r : d(psi) = omega
relation e : d(psi) = exact
chart (x, y)
form zero2 : 0 = 0
form locus : 1 = x*y*dx
relation l : d(zero2) = locus
chart (theta, phi)
metric g = diag(1, sin(theta)^2)
connection G {
  G[theta][phi][phi] = -sin(theta)*cos(theta)
  G[phi][theta][phi] = cos(theta)/sin(theta)
  G[phi][phi][theta] = cos(theta)/sin(theta)
}
",
    )
    .unwrap();
    let thermo_spec = dir.path().join("thermo.spec");
    std::fs::write(&thermo_spec, "c_v = c_v\nR = R\n").unwrap();
    let em_spec = dir.path().join("em.spec");
    std::fs::write(&em_spec, "preset vacuum\n").unwrap();
    let gas_spec = dir.path().join("gas.spec");
    std::fs::write(
        &gas_spec,
        "space (x, y)\nvelocity = (u(y), 0)\nforce = (0, 0)\nh0 = h0\ntemperature = T0\n",
    )
    .unwrap();
    let maxwell_spec = dir.path().join("maxwell.spec");
    std::fs::write(
        &maxwell_spec,
        "E = (0, f(x - x0), 0)\nH = (0, 0, f(x - x0))\n",
    )
    .unwrap();
    let ham_spec = dir.path().join("ham.spec");
    std::fs::write(&ham_spec, "H = (p^2 + q^2)/2\npairs = 1\n").unwrap();

    let f = ws.to_str().unwrap();
    let golden: Vec<Vec<&str>> = vec![
        vec!["classify", "--p", "3", "--k", "3", "--n", "3", "--json"],
        vec!["--json", "-f", f, "form", "d", "omega"],
        vec!["--json", "-f", f, "form", "closed", "exact"],
        vec!["--json", "-f", f, "form", "closed", "omega"],
        vec!["--json", "-f", f, "form", "potential", "exact"],
        vec!["--json", "-f", f, "form", "commutator", "omega"],
        vec!["--json", "-f", f, "form", "dual", "locus"],
        vec!["--json", "-f", f, "relation", "classify", "r"],
        vec!["--json", "-f", f, "relation", "frobenius", "r"],
        vec!["--json", "-f", f, "relation", "factor", "r"],
        vec!["--json", "-f", f, "relation", "loci", "l"],
        vec!["--json", "-f", f, "relation", "restrict", "l", "--on", "x = 0"],
        vec!["--json", "-f", f, "relation", "descend", "e"],
        vec!["--json", "-f", f, "geometry", "report", "g"],
        vec!["--json", "-f", f, "geometry", "report", "G"],
        vec!["--json", "-f", f, "--seed", "7", "relation", "classify", "r"],
        vec!["--json", "-f", f, "--verify-numeric", "form", "d", "omega"],
    ];
    let mut case_args: Vec<Vec<String>> = Vec::new();
    for (which, path) in [
        ("thermo", &thermo_spec),
        ("em", &em_spec),
        ("gas", &gas_spec),
        ("maxwell", &maxwell_spec),
        ("hamiltonian", &ham_spec),
    ] {
        case_args.push(vec![
            "--json".into(),
            "case".into(),
            which.into(),
            path.to_str().unwrap().into(),
        ]);
    }
    let mut all: Vec<Vec<String>> = golden
        .into_iter()
        .map(|v| v.into_iter().map(String::from).collect())
        .collect();
    all.extend(case_args);

    for args in &all {
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = run_args(&argv, &[]);
        let b = run_args(&argv, &[]);
        assert!(
            a.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&a.stderr)
        );
        assert_eq!(a.stdout, b.stdout, "nondeterministic JSON for {args:?}");
        // output is valid JSON with the documented top-level shape
        let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
        if args[0] != "classify" {
            for field in ["command", "inputs", "verdicts", "expressions", "numeric_checks", "warnings"] {
                assert!(v.get(field).is_some(), "report for {args:?} lacks '{field}'");
            }
        }
    }

    // exit-code contract
    let ok = run_args(&["classify", "--p", "1", "--k", "0", "--n", "3"], &[]);
    assert_eq!(ok.status.code(), Some(0));
    let missing = run_args(&["-f", f, "form", "closed", "missing_name"], &[]);
    assert_eq!(missing.status.code(), Some(2));
    let bad_file = run_args(&["-f", "/nonexistent.dsl", "form", "d", "w"], &[]);
    assert_eq!(bad_file.status.code(), Some(2));
    let capped = run_args(
        &["-f", f, "form", "d", "omega"],
        &[("FORMS_MAX_TERMS", "0")],
    );
    assert_eq!(
        capped.status.code(),
        Some(3),
        "term cap should surface as a verification failure: {}",
        String::from_utf8_lossy(&capped.stderr)
    );
}
