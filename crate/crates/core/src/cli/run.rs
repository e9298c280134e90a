//! Running the requested suites of a scenario.

use std::time::Instant;

use super::report::{CheckRecord, Report};
use super::scenario::{CheckKind, Scenario, SectionSpec};
use crate::connections::chern_character;
use crate::error::{Error, Result};
use crate::forms::Form;
use crate::koszul::KoszulData;
use crate::superlinear::{
    contraction, verify_bracket_traces, verify_trace_commutation, verify_trace_inclusion, Basis,
    EndMatrix, Multivector, Operator,
};
use crate::twisted::{
    build_comparison, fundamental_class_local_twisted, verify_comparison, RealSection,
    TwistedPipeline,
};
use crate::verdict::{Tally, Verdict};

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Record wall-clock time per check. Off by default so reports are
    /// reproducible byte for byte.
    pub timing: bool,
}

const FLAT: &str = "connection.flat";
const NEEDS_FLAT: &str = "requires a flat connection";

/// Check names each suite reports, in report order.
fn suite_names(s: &Scenario, suite: CheckKind) -> Vec<&'static str> {
    match suite {
        CheckKind::Koszul => vec![
            "koszul.bracket_facts",
            "koszul.chain_map",
            "koszul.differential",
            "koszul.fundamental_class",
        ],
        CheckKind::Twisted => {
            let mut v = vec![
                "twisted.augmentation",
                "twisted.cochain_trace",
                "twisted.cocycle",
                "twisted.comparison",
                "twisted.dbar_connection",
                "twisted.fundamental_class",
                "twisted.structure",
            ];
            if s.section.as_ref().is_some_and(SectionSpec::is_holomorphic) {
                v.push("twisted.koszul_consistency");
            }
            v
        }
        CheckKind::Supertrace => vec![
            "supertrace.brackets",
            "supertrace.commutation",
            "supertrace.inclusion",
        ],
        CheckKind::Chern => vec!["chern.forms"],
        CheckKind::All => Vec::new(),
    }
}

/// Lazily built data shared between suites.
struct Context<'a> {
    scenario: &'a Scenario,
    koszul: Option<Result<KoszulData>>,
    twisted: Option<Result<TwistedPipeline>>,
}

impl<'a> Context<'a> {
    fn new(scenario: &'a Scenario) -> Self {
        Context {
            scenario,
            koszul: None,
            twisted: None,
        }
    }

    fn section(&self) -> Result<&'a SectionSpec> {
        self.scenario
            .section
            .as_ref()
            .ok_or_else(|| Error::schema("section", "this check requires a section"))
    }

    fn koszul(&mut self) -> &Result<KoszulData> {
        if self.koszul.is_none() {
            let built = self.section().and_then(|sec| {
                KoszulData::new(
                    self.scenario.connection.clone(),
                    &sec.tau,
                    sec.ideal.clone(),
                )
            });
            self.koszul = Some(built);
        }
        self.koszul.as_ref().unwrap()
    }

    fn twisted(&mut self) -> &Result<TwistedPipeline> {
        if self.twisted.is_none() {
            let built = self.section().and_then(|sec| {
                let real = match &sec.certificate {
                    Some(u) => {
                        RealSection::with_certificate(&sec.tau, sec.ideal.clone(), u.clone())?
                    }
                    None => RealSection::new(&sec.tau, sec.ideal.clone())?,
                };
                TwistedPipeline::build(self.scenario.connection.clone(), real)
            });
            self.twisted = Some(built);
        }
        self.twisted.as_ref().unwrap()
    }
}

fn timed(opts: &RunOptions, f: impl FnOnce() -> Verdict) -> CheckRecord {
    let start = Instant::now();
    let v = f();
    let mut rec = CheckRecord::from_verdict(v);
    if opts.timing {
        rec.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    rec
}

fn errors(names: &[&str], e: &Error) -> Vec<CheckRecord> {
    names
        .iter()
        .map(|n| CheckRecord::error(*n, e.to_string()))
        .collect()
}

/// Run every requested suite. `connection.flat` always runs; when it fails
/// the other checks are reported as failing without being attempted.
pub fn run(s: &Scenario, opts: &RunOptions) -> Report {
    let mut records = vec![timed(opts, || s.connection.check_flat())];
    let flat = records[0].status == super::report::Status::Pass;
    let mut ctx = Context::new(s);
    for suite in s.suites() {
        let names = suite_names(s, suite);
        if !flat {
            records.extend(names.iter().map(|n| CheckRecord::blocked(*n, NEEDS_FLAT)));
            continue;
        }
        let out = match suite {
            CheckKind::Koszul => koszul_suite(&mut ctx, opts),
            CheckKind::Twisted => twisted_suite(&mut ctx, opts),
            CheckKind::Supertrace => supertrace_suite(&mut ctx, opts),
            CheckKind::Chern => chern_suite(&mut ctx, opts),
            CheckKind::All => Ok(Vec::new()),
        };
        records.extend(out.unwrap_or_else(|e| errors(&names, &e)));
    }
    debug_assert!(records.iter().any(|r| r.name == FLAT));
    Report::new(s.name.clone(), s.ring, s.bundle.rank(), records)
}

fn koszul_suite(ctx: &mut Context, opts: &RunOptions) -> Result<Vec<CheckRecord>> {
    let k = ctx.koszul().as_ref().map_err(Clone::clone)?;
    Ok(vec![
        timed(opts, || k.verify_koszul_differential()),
        timed(opts, || k.verify_bracket_facts()),
        timed(opts, || k.verify_chain_map_psi()),
        timed(opts, || k.fundamental_class_local()),
    ])
}

fn twisted_suite(ctx: &mut Context, opts: &RunOptions) -> Result<Vec<CheckRecord>> {
    let holomorphic = ctx.section()?.is_holomorphic();
    let koszul = if holomorphic {
        Some(ctx.koszul().clone())
    } else {
        None
    };
    let p = ctx.twisted().as_ref().map_err(Clone::clone)?;
    let mut out = vec![
        timed(opts, || p.dbar().verify(p.section())),
        timed(opts, || p.twist().verify_cocycles()),
        timed(opts, || p.verify_structure()),
        timed(opts, || p.verify_cochain_trace()),
        timed(opts, || p.verify_augmentation()),
    ];
    match build_comparison(p) {
        Ok(c) => {
            out.push(timed(opts, || verify_comparison(p, &c)));
            out.push(timed(opts, || fundamental_class_local_twisted(p, &c)));
        }
        Err(e) => out.extend(errors(
            &["twisted.comparison", "twisted.fundamental_class"],
            &e,
        )),
    }
    match koszul {
        Some(Ok(k)) => out.push(timed(opts, || p.compare_with_koszul(&k))),
        Some(Err(e)) => out.extend(errors(&["twisted.koszul_consistency"], &e)),
        None => {}
    }
    Ok(out)
}

fn supertrace_suite(ctx: &mut Context, opts: &RunOptions) -> Result<Vec<CheckRecord>> {
    let s = ctx.scenario;
    let nabla = s.connection.exterior_extension();
    let mut mats: Vec<(String, EndMatrix)> = vec![
        ("eps".into(), EndMatrix::grading(s.ring, s.bundle)),
        ("nabla".into(), nabla.matrix.clone()),
    ];
    let mut ops: Vec<(String, Operator)> = vec![("nabla".into(), nabla)];
    if let Some(sec) = &s.section {
        let tau = Multivector::from_functions(s.bundle, Basis::Covector, &sec.tau);
        let it = contraction(&tau)?;
        mats.push(("i_tau".into(), it.clone()));
        ops.push(("i_tau".into(), Operator::matrix_only(it)));
        if let Ok(p) = ctx.twisted() {
            mats.push(("R_A".into(), p.supercurvature().clone()));
            mats.push(("psi".into(), p.psi().clone()));
            for (k, a) in p.twist().components().iter().enumerate().skip(1) {
                mats.push((format!("a_{k}"), a.clone()));
            }
            ops.push(("delta".into(), p.delta().clone()));
        }
    }
    let mat_refs: Vec<(&str, &EndMatrix)> = mats.iter().map(|(n, m)| (n.as_str(), m)).collect();
    let op_refs: Vec<(&str, &Operator)> = ops.iter().map(|(n, o)| (n.as_str(), o)).collect();
    Ok(vec![
        timed(opts, || verify_bracket_traces(&mat_refs)),
        timed(opts, || verify_trace_commutation(&op_refs, &mat_refs)),
        timed(opts, || verify_trace_inclusion(s.ring, s.bundle)),
    ])
}

/// `det(R)` is a closed `(r, r)` form; with a section, the Chern character
/// of `A` is closed and, for holomorphic `τ`, the `(r, r)` part of
/// `tr_s(ψ)` equals `det(R)`.
fn chern_suite(ctx: &mut Context, opts: &RunOptions) -> Result<Vec<CheckRecord>> {
    let s = ctx.scenario;
    let det = s.connection.curvature_r()?.det();
    let r = s.bundle.rank() as u32;
    let pipeline = match &s.section {
        Some(sec) => Some((
            ctx.twisted().as_ref().map_err(Clone::clone)?,
            sec.is_holomorphic(),
        )),
        None => None,
    };
    let v = timed(opts, || {
        let mut tally = Tally::new("chern.forms");
        let zero = Form::zero(s.ring);
        tally.forms(|| "d(det R)".into(), &det.d(), &zero);
        tally.forms(
            || "det R vs its (r,r) part".into(),
            &det,
            &det.bidegree_part(r, r),
        );
        if let Some((p, holomorphic)) = pipeline {
            let ch = chern_character(p.supercurvature());
            tally.forms(|| "d(ch(A))".into(), &ch.d(), &zero);
            if holomorphic {
                let top = p.supertrace_psi().bidegree_part(r, r);
                tally.forms(|| "tr_s(psi)_(r,r) vs det R".into(), &top, &det);
            }
        }
        tally.finish()
    });
    Ok(vec![v])
}

/// The lines printed by `chern`: `det(R)` and, with a section, the `(r, r)`
/// part of `tr_s(ψ)`.
pub fn emit_chern(s: &Scenario) -> Result<String> {
    s.connection.require_flat()?;
    let r = s.bundle.rank() as u32;
    let mut out = format!("det(R) = {}\n", s.connection.curvature_r()?.det());
    if s.section.is_some() {
        let mut ctx = Context::new(s);
        let p = ctx.twisted().as_ref().map_err(Clone::clone)?;
        out.push_str(&format!(
            "tr_s(psi)_({r},{r}) = {}\n",
            p.supertrace_psi().bidegree_part(r, r)
        ));
    }
    Ok(out)
}
