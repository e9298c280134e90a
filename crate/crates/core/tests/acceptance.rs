//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the terminal.

mod common;

use std::time::{Duration, Instant};

use rand::Rng;

use superkoszul::cli::{parse_scenario, run, CheckRecord, Report, RunOptions, Status};
use superkoszul::connections::{Connection, FormMatrix};
use superkoszul::forms::Form;
use superkoszul::koszul::KoszulData;
use superkoszul::ring::{IdealSpec, RingSpec, TruncatedSeries};
use superkoszul::superlinear::{
    contraction, gen_supertrace, inclusion_i, verify_trace_inclusion, Basis, BundleSpec,
    Multivector,
};
use superkoszul::twisted::{
    build_comparison, fundamental_class_local_twisted, verify_comparison, RealSection,
    TwistedPipeline,
};
use superkoszul::verdict::Verdict;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn s(text: &str, ring: RingSpec) -> TruncatedSeries {
    TruncatedSeries::parse(text, ring).unwrap()
}

fn f(text: &str, ring: RingSpec) -> Form {
    Form::parse(text, ring).unwrap()
}

fn pass(v: &Verdict) -> Result<(), String> {
    if v.passed {
        Ok(())
    } else {
        Err(v.to_string())
    }
}

/// Equal up to the lower of the two valid orders, and that order is at
/// least `min_order`.
fn same(what: &str, got: &Form, want: &Form, min_order: u32) -> Result<(), String> {
    let order = got
        .valid_order()
        .min(want.valid_order())
        .min(got.ring().truncation());
    ensure!(
        order >= min_order,
        "{what}: valid order {order} < {min_order}"
    );
    let (g, w) = (got.with_order(order), want.with_order(order));
    match g.first_difference(&w) {
        None => Ok(()),
        Some(d) => Err(format!("{what}: {got} vs {want}, first difference {d:?}")),
    }
}

fn within(what: &str, start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure!(t < limit, "{what} took {t:?}, limit {limit:?}");
    Ok(t)
}

fn example_a_connection(ring: RingSpec) -> Connection {
    let g = f("-w1*(1 + z1*w1)^-1*dz1", ring);
    Connection::new(
        BundleSpec::new(1).unwrap(),
        FormMatrix::new(ring, vec![vec![g]]).unwrap(),
    )
    .unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(1);
    for case in 0..200 {
        let ring = RingSpec::new(rng.gen_range(1..=2), rng.gen_range(2..=4)).unwrap();
        let bundle = BundleSpec::new(rng.gen_range(1..=4)).unwrap();
        let a = common::matrix(&mut rng, ring, bundle, 8, 2);
        let b = common::matrix(&mut rng, ring, bundle, 8, 2);
        let tr = a.supercommutator(&b).supertrace();
        ensure!(tr.is_zero(), "case {case}: tr_s([a,b]) = {tr}");
    }
    let ring = RingSpec::new(1, 4).unwrap();
    for r in 1..=4 {
        let bundle = BundleSpec::new(r).unwrap();
        pass(&verify_trace_inclusion(ring, bundle))?;
        for u in 0..bundle.dim() {
            let alpha = Multivector::basis_element(ring, bundle, Basis::Covector, u);
            let back = gen_supertrace(&inclusion_i(&alpha));
            ensure!(
                back.first_difference(&alpha).is_none(),
                "Tr(i(e^{u:b})) = {back}"
            );
        }
    }
    for case in 0..50 {
        let ring = RingSpec::new(rng.gen_range(1..=2), rng.gen_range(2..=4)).unwrap();
        let bundle = BundleSpec::new(rng.gen_range(1..=3)).unwrap();
        let delta = common::derivation(&mut rng, ring, bundle, case % 2, 2);
        let phi = common::matrix(&mut rng, ring, bundle, 8, 2);
        let lhs = inclusion_i(&gen_supertrace(&delta.supercommutator(&phi)));
        let rhs = delta.supercommutator(&inclusion_i(&gen_supertrace(&phi)));
        ensure!(lhs.first_difference(&rhs).is_none(), "trace commutation case {case}");
    }
    let t = within("supertrace algebra", start, Duration::from_secs(30))?;
    Ok(format!(
        "200 bracket pairs, inclusion r<=4, 50 derivation pairs in {t:.2?}"
    ))
}

fn criterion_2() -> Outcome {
    let mut rng = common::rng(2);
    let mut min_order = u32::MAX;
    for case in 0..100 {
        let ring = RingSpec::new(1 + case % 2, 8).unwrap();
        let a = common::form(&mut rng, ring, 4, 4);
        let pa = rng.gen_range(0..2);
        let ah = common::form_of_parity(&mut rng, ring, pa, 4, 4);
        let b = common::form(&mut rng, ring, 4, 4);
        for (name, x) in [
            ("d^2", a.d().d()),
            ("partial^2", a.partial().partial()),
            ("dbar^2", a.dbar().dbar()),
            (
                "partial dbar + dbar partial",
                &a.partial().dbar() + &a.dbar().partial(),
            ),
        ] {
            ensure!(x.is_zero(), "case {case}: {name} a = {x}");
            ensure!(
                x.valid_order() >= 6,
                "case {case}: {name} order {}",
                x.valid_order()
            );
            min_order = min_order.min(x.valid_order());
        }
        let sign = if pa == 0 { 1 } else { -1 };
        for (name, op) in [
            ("d", Form::d as fn(&Form) -> Form),
            ("partial", Form::partial),
            ("dbar", Form::dbar),
        ] {
            let lhs = op(&ah.wedge(&b));
            let rhs = &op(&ah).wedge(&b) + &ah.wedge(&op(&b)).scale_int(sign);
            same(&format!("case {case}: Leibniz for {name}"), &lhs, &rhs, 6)?;
        }
    }
    Ok(format!(
        "100 forms, squares vanish to order >= {min_order}, Leibniz exact"
    ))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let ring = RingSpec::new(1, 8).unwrap();
    let ideal = IdealSpec::new(&ring, vec![1]).unwrap();
    let k = KoszulData::new(example_a_connection(ring), &[s("z1", ring)], ideal.clone())
        .map_err(|e| e.to_string())?;
    pass(&k.verify_bracket_facts())?;
    pass(&k.verify_chain_map_psi())?;
    pass(&k.fundamental_class_local())?;
    let psi = k.psi();
    let det = f("(1 + z1*w1)^-2*dw1*dz1", ring);
    same("psi_0 = (1+zw)^-2 dw dz", &psi.eval(0, 0), &det, 6)?;
    same("det R", &k.curvature().det(), &det, 6)?;
    same(
        "psi_1(e1)",
        &psi.eval(1, 1),
        &f("(1 + 2*z1*w1)*(1 + z1*w1)^-1*dz1", ring),
        6,
    )?;
    let witnessed = f("z1*(1 + z1*w1)^-2*dw1*dz1", ring);
    same("dbar psi_1(e1)", &psi.eval(1, 1).dbar(), &witnessed, 6)?;
    let iota_e1 = k.iota_tau().apply(&Multivector::basis_element(
        ring,
        k.bundle(),
        Basis::Vector,
        1,
    ));
    same("psi_0(i_tau e1)", &psi.apply(&iota_e1), &witnessed, 6)?;
    let dz = f("dz1", ring);
    same(
        "psi_1(e1) mod (z)",
        &psi.eval(1, 1).reduce_mod_ideal(&ideal),
        &dz,
        7,
    )?;
    let t = within("example_a", start, Duration::from_secs(10))?;
    Ok(format!(
        "example_a suites pass, psi_0 to order {} in {t:.2?}",
        psi.eval(0, 0).valid_order()
    ))
}

fn criterion_4() -> Outcome {
    let ring = RingSpec::new(2, 6).unwrap();
    let bundle = BundleSpec::new(2).unwrap();
    let ideal = IdealSpec::new(&ring, vec![1, 2]).unwrap();
    let k = KoszulData::new(
        Connection::trivial(ring, bundle),
        &[s("z1", ring), s("z2", ring)],
        ideal.clone(),
    )
    .map_err(|e| e.to_string())?;
    let psi = k.psi();
    let it = k.iota_tau();
    for p in 1..=2u32 {
        for mask in bundle.masks_of_degree(p) {
            let e = Multivector::basis_element(ring, bundle, Basis::Vector, mask);
            let lhs = psi.eval(p, mask).dbar();
            let rhs = psi.apply(&it.apply(&e).exterior_degree_part(p - 1));
            ensure!(
                lhs.first_difference(&rhs).is_none(),
                "ladder p={p} e_{mask:b}: {lhs} vs {rhs}"
            );
        }
    }
    pass(&k.verify_chain_map_psi())?;
    pass(&k.fundamental_class_local())?;
    let top = psi.eval(2, 0b11).reduce_mod_ideal(&ideal);
    same("psi_2(e1^e2) mod (z1,z2)", &top, &f("dz1*dz2", ring), 6)?;
    Ok(format!(
        "ladder p=1,2 exact, psi_2(e1^e2) = {}",
        psi.eval(2, 0b11)
    ))
}

fn criterion_5() -> Outcome {
    let ring = RingSpec::new(1, 8).unwrap();
    let ideal = IdealSpec::new(&ring, vec![1]).unwrap();
    let sec =
        RealSection::new(&[s("z1*(1 + z1*w1)", ring)], ideal.clone()).map_err(|e| e.to_string())?;
    let p = TwistedPipeline::build(example_a_connection(ring), sec).map_err(|e| e.to_string())?;
    let bundle = p.bundle();
    // θ(e_1) = e_1 ⊗ z(1+zw)^{-1}dw, whose left-normal coefficient is negated.
    let theta = p.dbar().theta().get(0, 0).clone();
    same("theta(e1)", &theta, &f("-z1*(1 + z1*w1)^-1*dw1", ring), 6)?;
    let e1 = Multivector::basis_element(ring, bundle, Basis::Vector, 1);
    let image = p.dbar().operator().matrix.apply(&e1);
    let back = p.section().iota_tau().apply(&-&image).coefficient(0);
    ensure!(
        back.first_difference(&f("z1^2*dw1", ring)).is_none(),
        "back-substitution i_tau theta(e1) = {back}"
    );
    pass(&p.dbar().verify(p.section()))?;
    pass(&p.twist().verify_cocycles())?;
    ensure!(
        p.delta().square().is_zero(),
        "delta^2 = {}",
        p.delta().square()
    );
    pass(&p.verify_cochain_trace())?;
    pass(&p.verify_structure())?;
    let nabla_tau = p.connection().covariant_covector(p.section().tau());
    let i_nabla = contraction(&nabla_tau).map_err(|e| e.to_string())?;
    let diff = p.psi().bidegree_part(1, 0).first_difference(&i_nabla);
    ensure!(diff.is_none(), "psi_(1,0) vs i_nabla_tau: {diff:?}");
    same(
        "Tr(psi) on functions vs tr_s(psi)",
        &p.trace().coefficient(0),
        &p.supertrace_psi(),
        5,
    )?;
    let c = build_comparison(&p).map_err(|e| e.to_string())?;
    pass(&verify_comparison(&p, &c))?;
    pass(&fundamental_class_local_twisted(&p, &c))?;
    let eta =
        p.trace_eval(
            &c.total()
                .apply(&Multivector::basis_element(ring, bundle, Basis::Vector, 1)),
        );
    same(
        "eta(f1) mod (z)",
        &eta.reduce_mod_ideal(&ideal),
        &f("dz1", ring),
        5,
    )?;
    Ok(format!("theta = {theta}"))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let ring = RingSpec::new(2, 6).unwrap();
    let ideal = IdealSpec::new(&ring, vec![1, 2]).unwrap();
    let sec = RealSection::new(&[s("z1*(1 + z1*w1)", ring), s("z2", ring)], ideal.clone())
        .map_err(|e| e.to_string())?;
    let bundle = BundleSpec::new(2).unwrap();
    let p = TwistedPipeline::build(Connection::trivial(ring, bundle), sec)
        .map_err(|e| e.to_string())?;
    let cocycles = p.twist().verify_cocycles();
    pass(&cocycles)?;
    let order = cocycles.verified_order.unwrap_or(0);
    ensure!(order >= 4, "cocycles verified only to order {order}");
    let a2 = p.twist().operator(2).matrix;
    pass(&p.verify_cochain_trace())?;
    let c = build_comparison(&p).map_err(|e| e.to_string())?;
    same(
        "u_11",
        &c.u().get(0, 0).clone(),
        &f("(1 + z1*w1)^-1", ring),
        4,
    )?;
    same("u_22", &c.u().get(1, 1).clone(), &f("1", ring), 4)?;
    pass(&verify_comparison(&p, &c))?;
    pass(&fundamental_class_local_twisted(&p, &c))?;
    let eta = p.trace_eval(&c.total().apply(&Multivector::basis_element(
        ring,
        bundle,
        Basis::Vector,
        0b11,
    )));
    same(
        "eta_-2(f1^f2) mod I",
        &eta.reduce_mod_ideal(&ideal),
        &f("dz1*dz2", ring),
        3,
    )?;
    let t = within("example_c", start, Duration::from_secs(120))?;
    Ok(format!(
        "cocycles to order {order}, a_2 {}, in {t:.2?}",
        if a2.is_zero() { "= 0" } else { "nonzero" }
    ))
}

fn criterion_7() -> Outcome {
    let ring = RingSpec::new(1, 8).unwrap();
    let ideal = IdealSpec::new(&ring, vec![1]).unwrap();
    let tau = [s("z1", ring)];
    let k = KoszulData::new(example_a_connection(ring), &tau, ideal.clone())
        .map_err(|e| e.to_string())?;
    let sec = RealSection::new(&tau, ideal).map_err(|e| e.to_string())?;
    let p = TwistedPipeline::build(example_a_connection(ring), sec).map_err(|e| e.to_string())?;
    let v = p.compare_with_koszul(&k);
    pass(&v)?;
    Ok(format!(
        "Tr(psi) = Koszul psi on every e_S to order {}",
        v.verified_order.unwrap_or(0)
    ))
}

const BASE_D: &str = r#"{
  "name": "negative_control",
  "ring": { "num_vars": 2, "truncation": 5 },
  "bundle": { "rank": 2 },
  "connection": { "gamma": [["G11", "G12"], ["G21", "G22"]] },
  "section": { "tau": ["z1", "z2*(1 + z1)"] },
  "ideal": { "vars": [1, 2] },
  "checks": ["all"]
}"#;

fn criterion_8() -> Outcome {
    let mut rng = common::rng(8);
    let mut caught = 0;
    let monos = ["1", "z1", "w2", "z2*w1", "w1^2"];
    for trial in 0..5 {
        let (i, j) = (rng.gen_range(0..2), rng.gen_range(0..2));
        let a = rng.gen_range(1..=2usize);
        let b = 3 - a;
        let c = rng.gen_range(1..=4);
        let m = monos[rng.gen_range(0..monos.len())];
        let bump = format!("{c}*z{a}*(1 + {m})*dz{b}");
        let mut entries = [
            ["-w1*(1 + z1*w1)^-1*dz1".to_string(), "0".to_string()],
            ["0".to_string(), "-w2*(1 + z2*w2)^-1*dz2".to_string()],
        ];
        entries[i][j] = format!("{} + {bump}", entries[i][j]);
        let text = BASE_D
            .replace("G11", &entries[0][0])
            .replace("G12", &entries[0][1])
            .replace("G21", &entries[1][0])
            .replace("G22", &entries[1][1]);
        let scenario = parse_scenario(&text, None).map_err(|e| e.to_string())?;
        let report = run(&scenario, &RunOptions::default());
        let flat = report
            .checks
            .iter()
            .find(|r| r.name == "connection.flat")
            .unwrap();
        if report.status == Status::Fail && flat.status == Status::Fail && flat.witness.is_some() {
            caught += 1;
        } else {
            return Err(format!(
                "gamma corruption {trial} ({bump} at [{i}][{j}]) not detected"
            ));
        }
    }

    let ring = RingSpec::new(2, 6).unwrap();
    let bundle = BundleSpec::new(2).unwrap();
    let ideal = IdealSpec::new(&ring, vec![1, 2]).unwrap();
    let sec = RealSection::new(&[s("z1*(1 + z1*w1)", ring), s("z2", ring)], ideal)
        .map_err(|e| e.to_string())?;
    let p = TwistedPipeline::build(Connection::trivial(ring, bundle), sec)
        .map_err(|e| e.to_string())?;
    let shapes = [(0b01u32, 0b00u32), (0b10, 0b00), (0b11, 0b01), (0b11, 0b10)];
    for trial in 0..5 {
        let (target, source) = shapes[rng.gen_range(0..shapes.len())];
        let c = rng.gen_range(1..=4);
        let m = ["1", "z1", "w1", "z2*w2"][rng.gen_range(0..4)];
        let bump = f(&format!("{c}*{m}*dw1*dw2"), ring);
        let mut twist = p.twist().clone();
        twist.perturb(2, target, source, &bump);
        let corrupted = TwistedPipeline::assemble(
            p.connection().clone(),
            p.section().clone(),
            p.dbar().clone(),
            twist,
        );
        let records = corrupted
            .verdicts()
            .into_iter()
            .map(CheckRecord::from_verdict)
            .collect();
        let report = Report::new("corrupt_a2", ring, 2, records);
        let cocycle = report
            .checks
            .iter()
            .find(|r| r.name == "twisted.cocycle")
            .unwrap();
        if report.status == Status::Fail
            && cocycle.status == Status::Fail
            && cocycle.witness.is_some()
        {
            caught += 1;
        } else {
            return Err(format!(
                "a_2 corruption {trial} (E_{target:b}<-{source:b} by {bump}) not detected"
            ));
        }
    }
    Ok(format!(
        "{caught}/10 seeded corruptions detected with witnesses"
    ))
}

fn criterion_9() -> Outcome {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut names: Vec<_> = std::fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    names.sort();
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    for path in &names {
        let mut outputs = Vec::new();
        for k in 0..2 {
            let out = tmp.path().join(format!("r{k}.json"));
            std::process::Command::new(env!("CARGO_BIN_EXE_superkoszul"))
                .args(["verify", "--config"])
                .arg(path)
                .arg("--report")
                .arg(&out)
                .output()
                .map_err(|e| e.to_string())?;
            outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
        }
        ensure!(
            outputs[0] == outputs[1],
            "{} differs between runs",
            path.display()
        );
        ensure!(
            !outputs[0].is_empty(),
            "{} produced no report",
            path.display()
        );
    }
    Ok(format!("{} scenarios, reports byte-identical", names.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("supertrace algebra", criterion_1),
        ("Dolbeault model", criterion_2),
        ("holomorphic Koszul map, example_a", criterion_3),
        ("holomorphic Koszul map, rank 2", criterion_4),
        ("twisted pipeline, example_b", criterion_5),
        ("twisted pipeline, example_c", criterion_6),
        ("twisted vs holomorphic consistency", criterion_7),
        ("negative controls", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
