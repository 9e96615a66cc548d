//! The property suite behind `alphastep verify` and the acceptance gate.
//!
//! Each check is a named function of a shared [`Context`] that lazily builds
//! the test polynomials, their profiles, the midpoint sweeps and the trace
//! audits, so checks that share data compute it once.

use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::sync::OnceLock;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alpha::{alpha0_constant, certify, induction_margin, verify_quadratic_contraction};
use crate::error::Result;
use crate::geometry::{
    arg_speed, critical_profile, ray_probe, s_r_constant, voronoi_multiplicity_probe,
    winding_quadrature, CriticalProfile,
};
use crate::harness::{
    audit_with, bad_angle_bound, bad_angle_measure, circle_geometry, cost_integral_with,
    costestimate_bound, quadrature_log_abs_f, random_roots, standard_suite, summarize_sweep,
    sweep_runs, AuditReport, SuiteEntry, SweepOptions, SweepReport, TraceGeometry, FINAL_GUIDE_RATIO,
    JUMP_RATIO_BOUND, SUITE_SEED,
};
use crate::pathlift::{run, RunConfig, Trace, INDUCTION_C, JUMP_COEFFICIENT};
use crate::poly::Polynomial;

/// Sample count of the main sweeps.
pub const SWEEP_M: usize = 64;
const CERTIFY_SAMPLES: usize = 500;
const VORONOI_SAMPLES: usize = 20;
const GEOMETRY_M: usize = 1024;
const COST_SAMPLES: usize = 16;
/// Degree cap for the Voronoi and cost-integral checks.
const SMALL_DEGREE: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    /// Acceptance criterion number, if the check is one.
    pub criterion: Option<u8>,
    pub passed: bool,
    /// Report-only checks never fail the suite.
    pub asserted: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || !c.asserted)
    }

    /// One line per check.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = match (c.asserted, c.passed) {
                (false, _) => "INFO",
                (true, true) => "PASS",
                (true, false) => "FAIL",
            };
            let label = match c.criterion {
                Some(n) => format!("{:>2} {}", n, c.id),
                None => format!("   {}", c.id),
            };
            out.push_str(&format!("{status}  {label:<22} {:>8.2}s  {}\n", c.seconds, c.detail));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Drop suite polynomials above this degree.
    pub d_max: Option<usize>,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            d_max: None,
            seed: SUITE_SEED,
        }
    }
}

pub struct SuiteCase {
    pub entry: SuiteEntry,
    pub profile: CriticalProfile,
    pub cfg: RunConfig,
}

pub struct CaseSweep {
    pub report: SweepReport,
    pub traces: Vec<Option<Trace>>,
    pub csv: String,
    pub jsonl: String,
}

pub struct CaseAudits {
    pub audits: Vec<AuditReport>,
    pub errors: Vec<String>,
}

/// Lazily computed suite data shared between checks.
pub struct Context {
    pub options: VerifyOptions,
    cases: OnceLock<std::result::Result<Vec<SuiteCase>, String>>,
    sweeps: OnceLock<(Vec<CaseSweep>, f64)>,
    audits: OnceLock<Vec<CaseAudits>>,
}

impl Context {
    pub fn new(options: VerifyOptions) -> Self {
        Self {
            options,
            cases: OnceLock::new(),
            sweeps: OnceLock::new(),
            audits: OnceLock::new(),
        }
    }

    pub fn cases(&self) -> std::result::Result<&[SuiteCase], String> {
        self.cases
            .get_or_init(|| {
                standard_suite(self.options.seed)
                    .into_iter()
                    .filter(|e| self.options.d_max.is_none_or(|m| e.poly.degree() <= m))
                    .map(|entry| {
                        let profile = critical_profile(&entry.poly)
                            .map_err(|e| format!("{}: {e}", entry.id))?;
                        let cfg = RunConfig::default().with_lambda(profile.lambda_f);
                        Ok(SuiteCase {
                            entry,
                            profile,
                            cfg,
                        })
                    })
                    .collect()
            })
            .as_ref()
            .map(|v| v.as_slice())
            .map_err(|e| e.clone())
    }

    /// Midpoint sweeps with `M = 64` and the wall time they took.
    pub fn sweeps(&self) -> std::result::Result<(&[CaseSweep], f64), String> {
        let cases = self.cases()?;
        let (sweeps, secs) = self.sweeps.get_or_init(|| {
            let start = Instant::now();
            let s = cases.iter().map(compute_sweep).collect();
            (s, start.elapsed().as_secs_f64())
        });
        Ok((sweeps.as_slice(), *secs))
    }

    /// Audits of every certified sweep trace.
    pub fn audits(&self) -> std::result::Result<&[CaseAudits], String> {
        let cases = self.cases()?;
        let (sweeps, _) = self.sweeps()?;
        Ok(self.audits.get_or_init(|| {
            cases
                .iter()
                .zip(sweeps)
                .map(|(case, sweep)| audit_case(case, sweep))
                .collect()
        }))
    }
}

fn compute_sweep(case: &SuiteCase) -> CaseSweep {
    let runs = sweep_runs(
        &case.entry.poly,
        &case.profile,
        SWEEP_M,
        &case.cfg,
        SweepOptions::default(),
    )
    .expect("suite configuration is valid");
    let report = summarize_sweep(&case.entry.id, &case.entry.poly, &case.profile, &case.cfg, &runs);
    let csv = report.to_csv();
    let jsonl = runs
        .iter()
        .filter_map(|r| r.trace.as_ref())
        .map(|t| t.to_jsonl())
        .collect();
    CaseSweep {
        report,
        traces: runs.into_iter().map(|r| r.trace).collect(),
        csv,
        jsonl,
    }
}

fn audit_case(case: &SuiteCase, sweep: &CaseSweep) -> CaseAudits {
    let p = &case.entry.poly;
    let results: Vec<Result<AuditReport>> = sweep
        .traces
        .par_iter()
        .filter_map(|t| t.as_ref().filter(|t| t.is_certified()))
        .map(|trace| {
            let geometry = TraceGeometry::new(p, trace, &case.profile)?;
            audit_with(p, trace, &case.profile, &geometry)
        })
        .collect();
    let mut audits = Vec::new();
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok(a) => audits.push(a),
            Err(e) => errors.push(format!("{}: {e}", case.entry.id)),
        }
    }
    CaseAudits { audits, errors }
}

type CheckFn = fn(&Context) -> (bool, String);

struct CheckDef {
    id: &'static str,
    criterion: Option<u8>,
    asserted: bool,
    run: CheckFn,
}

const CHECKS: &[CheckDef] = &[
    CheckDef { id: "constants", criterion: Some(1), asserted: true, run: check_constants },
    CheckDef { id: "certification", criterion: Some(2), asserted: true, run: check_certification },
    CheckDef { id: "average_cost", criterion: Some(3), asserted: true, run: check_average_cost },
    CheckDef { id: "step_invariants", criterion: Some(4), asserted: true, run: check_step_invariants },
    CheckDef { id: "final_guide", criterion: Some(5), asserted: true, run: check_final_guide },
    CheckDef { id: "jump_bound", criterion: Some(6), asserted: true, run: check_jump_bound },
    CheckDef { id: "log_integral", criterion: Some(7), asserted: true, run: check_log_integral },
    CheckDef { id: "arg_speed", criterion: Some(8), asserted: true, run: check_arg_speed },
    CheckDef { id: "voronoi", criterion: Some(9), asserted: true, run: check_voronoi },
    CheckDef { id: "averaged_geometry", criterion: Some(10), asserted: true, run: check_averaged_geometry },
    CheckDef { id: "cost_integrals", criterion: Some(11), asserted: true, run: check_cost_integrals },
    CheckDef { id: "determinism", criterion: Some(12), asserted: true, run: check_determinism },
    CheckDef { id: "lemma6.8", criterion: None, asserted: false, run: report_lemma68 },
    CheckDef { id: "bad_angle_measure", criterion: None, asserted: false, run: report_bad_angle_measure },
];

/// Names accepted by `--only`.
pub fn check_ids() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.id).collect()
}

/// Runs one check by id; `None` for an unknown id.
pub fn run_check(ctx: &Context, id: &str) -> Option<CheckResult> {
    let check = CHECKS.iter().find(|c| c.id == id)?;
    let start = Instant::now();
    let (passed, detail) = (check.run)(ctx);
    Some(CheckResult {
        id: check.id.to_string(),
        criterion: check.criterion,
        passed,
        asserted: check.asserted,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Runs the selected checks (all of them for an empty selection), in table
/// order.
pub fn run_checks(ctx: &Context, only: &[String]) -> VerifyReport {
    let checks = CHECKS
        .iter()
        .filter(|c| only.is_empty() || only.iter().any(|o| o == c.id))
        .filter_map(|c| run_check(ctx, c.id))
        .collect();
    VerifyReport { checks }
}

macro_rules! try_ctx {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(msg) => return (false, msg),
        }
    };
}

fn check_constants(_: &Context) -> (bool, String) {
    let start = Instant::now();
    let a0 = alpha0_constant();
    let elapsed = start.elapsed().as_secs_f64();
    let s1 = s_r_constant(1.0);
    let s2 = s_r_constant(TAU);
    let margin = induction_margin(JUMP_COEFFICIENT, INDUCTION_C);
    let ok = (a0 - 0.13071694).abs() <= 1e-7
        && elapsed < 1e-3
        && s1 > 1.0 / 28.0
        && s1 < 0.0370
        && (s2 - (3.0 - 8f64.sqrt())).abs() <= 1e-10
        && margin < 1.0;
    (
        ok,
        format!(
            "alpha0={a0:.10} ({:.0}us) s_r(1)={s1:.6} s_r(2pi)={s2:.12} margin={margin:.5}",
            elapsed * 1e6
        ),
    )
}

fn check_certification(ctx: &Context) -> (bool, String) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.options.seed ^ 0xC3_71F1);
    let (mut accepted, mut sampled, mut failures) = (0usize, 0usize, 0usize);
    while accepted < CERTIFY_SAMPLES && sampled < 100 * CERTIFY_SAMPLES {
        sampled += 1;
        let d = rng.random_range(1..=10);
        let roots = random_roots(&mut rng, d, 1e-3);
        let p = Polynomial::from_roots(&roots).expect("separated roots");
        // log-uniform offsets from a root straddle the certification boundary
        let zeta = roots[rng.random_range(0..d)];
        let z = zeta + Complex64::from_polar(10f64.powf(rng.random_range(-6.0..0.0)), rng.random_range(0.0..TAU));
        if let Ok(Some(_)) = certify(&p, z) {
            accepted += 1;
            if !verify_quadratic_contraction(&p, z, 6).is_ok_and(|r| r.holds) {
                failures += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (
        failures == 0 && accepted >= CERTIFY_SAMPLES && secs < 10.0,
        format!("{accepted} certified of {sampled} sampled, {failures} contraction failures, {secs:.2}s"),
    )
}

fn check_average_cost(ctx: &Context) -> (bool, String) {
    let (sweeps, secs) = try_ctx!(ctx.sweeps());
    let mut worst = (String::new(), 0.0f64);
    let mut violations = Vec::new();
    let mut failures = 0;
    for s in sweeps {
        let r = &s.report;
        failures += r.failures.len();
        let used = r.mean_cost / r.bound;
        if used > worst.1 {
            worst = (r.poly_id.clone(), used);
        }
        if !r.within_bound() {
            violations.push(r.poly_id.clone());
        }
    }
    (
        violations.is_empty() && secs < 300.0,
        format!(
            "{} polynomials, mean/bound max {:.4} ({}), {} excluded runs, violations {:?}, {secs:.2}s",
            sweeps.len(),
            worst.1,
            worst.0,
            failures,
            violations
        ),
    )
}

fn check_step_invariants(ctx: &Context) -> (bool, String) {
    let audits = try_ctx!(ctx.audits());
    let mut steps = 0;
    let mut bad = 0;
    let mut errors = Vec::new();
    for case in audits {
        errors.extend(case.errors.iter().cloned());
        for a in &case.audits {
            steps += a.steps.len();
            bad += a
                .steps
                .iter()
                .filter(|s| {
                    !s.delta_ok
                        || s.f_over_w_ok == Some(false)
                        || s.decay_ok == Some(false)
                        || s.u_ok == Some(false)
                })
                .count();
        }
    }
    (
        bad == 0 && errors.is_empty(),
        format!("{steps} audited steps, {bad} violating, audit errors {errors:?}"),
    )
}

fn check_final_guide(ctx: &Context) -> (bool, String) {
    let audits = try_ctx!(ctx.audits());
    let mut min = f64::INFINITY;
    let mut runs = 0;
    let mut missing = 0;
    for case in audits {
        for a in &case.audits {
            runs += 1;
            match a.wn_over_rho {
                Some(r) => min = min.min(r),
                None => missing += 1,
            }
        }
    }
    (
        min >= FINAL_GUIDE_RATIO && missing == 0,
        format!("{runs} runs, min |w_N|/rho = {min:.5} (need >= {FINAL_GUIDE_RATIO:.5}), {missing} unidentified roots"),
    )
}

fn check_jump_bound(ctx: &Context) -> (bool, String) {
    let audits = try_ctx!(ctx.audits());
    let mut min = f64::INFINITY;
    let (mut used, mut flagged) = (0, 0);
    for case in audits {
        for a in &case.audits {
            min = min.min(a.jump_ratio_min);
            for s in &a.steps {
                if s.jump_ratio.is_some() {
                    if s.r_flagged {
                        flagged += 1;
                    } else {
                        used += 1;
                    }
                }
            }
        }
    }
    (
        min >= JUMP_RATIO_BOUND - 1e-9,
        format!("min J/r = {min:.5} over {used} steps (need >= {JUMP_RATIO_BOUND:.5}), {flagged} flagged"),
    )
}

fn check_log_integral(ctx: &Context) -> (bool, String) {
    let cases = try_ctx!(ctx.cases());
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for case in cases {
        let d = case.entry.poly.degree();
        for r in [1.0 + 1.0 / d as f64, 1.5, 2.0] {
            let q = quadrature_log_abs_f(&case.entry.poly, r, 1024).unwrap_or(f64::NAN);
            let want = d as f64 * r.ln();
            let rel = ((q - want) / want).abs();
            worst = if rel.is_nan() { f64::INFINITY } else { worst.max(rel) };
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (worst <= 1e-6 && secs < 5.0, format!("max relative error {worst:.2e}, {secs:.3}s"))
}

fn check_arg_speed(ctx: &Context) -> (bool, String) {
    let cases = try_ctx!(ctx.cases());
    let mut bound_failures = 0;
    let mut worst_winding: f64 = 0.0;
    for case in cases {
        let p = &case.entry.poly;
        let d = p.degree() as f64;
        for r in [1.0 + 1.0 / d, 1.5] {
            let lo = TAU * d * r / (r + 1.0);
            let hi = TAU * d * r / (r - 1.0);
            for k in 0..1024 {
                let v = arg_speed(p, r, k as f64 / 1024.0).unwrap_or(f64::NAN);
                if !(v > lo - 1e-9 && v < hi + 1e-9) {
                    bound_failures += 1;
                }
            }
            let w = winding_quadrature(p, r, 1024).unwrap_or(f64::NAN);
            let rel = ((w - TAU * d) / (TAU * d)).abs();
            worst_winding = if rel.is_nan() { f64::INFINITY } else { worst_winding.max(rel) };
        }
    }
    (
        bound_failures == 0 && worst_winding <= 1e-6,
        format!("{bound_failures} bound violations, winding relative error {worst_winding:.2e}"),
    )
}

fn check_voronoi(ctx: &Context) -> (bool, String) {
    let cases = try_ctx!(ctx.cases());
    let start = Instant::now();
    let small: Vec<&SuiteCase> = cases
        .iter()
        .filter(|c| c.entry.poly.degree() <= SMALL_DEGREE)
        .collect();
    let results: Vec<(usize, usize, usize, Vec<String>)> = small
        .par_iter()
        .enumerate()
        .map(|(i, case)| {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.options.seed ^ (0x5EED + i as u64));
            let (mut ok, mut flagged, mut violated) = (0, 0, 0);
            let mut errors = Vec::new();
            for _ in 0..VORONOI_SAMPLES {
                let y = Complex64::from_polar(rng.random_range(0.05..2.0), rng.random_range(0.0..TAU));
                match voronoi_multiplicity_probe(&case.entry.poly, y, &case.profile) {
                    Ok(v) if v.flagged => flagged += 1,
                    Ok(v) if v.within_bound() => ok += 1,
                    Ok(_) => violated += 1,
                    Err(e) => errors.push(format!("{}: {e}", case.entry.id)),
                }
            }
            (ok, flagged, violated, errors)
        })
        .collect();
    let secs = start.elapsed().as_secs_f64();
    let ok: usize = results.iter().map(|r| r.0).sum();
    let flagged: usize = results.iter().map(|r| r.1).sum();
    let violated: usize = results.iter().map(|r| r.2).sum();
    let errors: Vec<String> = results.into_iter().flat_map(|r| r.3).collect();
    (
        violated == 0 && errors.is_empty() && secs < 120.0,
        format!(
            "{} polynomials, {ok} probes within m+1, {violated} violating, {flagged} flagged, errors {errors:?}, {secs:.2}s",
            small.len()
        ),
    )
}

fn check_averaged_geometry(ctx: &Context) -> (bool, String) {
    let cases = try_ctx!(ctx.cases());
    let mut failing = Vec::new();
    let mut worst_beta: f64 = 0.0;
    let mut worst_angle: f64 = 0.0;
    let mut partial = 0;
    for case in cases {
        match circle_geometry(&case.entry.poly, &case.profile, GEOMETRY_M, 1.0) {
            Ok(g) => {
                partial += g.partial_probes;
                worst_beta = worst_beta.max(g.beta_plus.mean / g.beta_plus_bound);
                worst_angle = worst_angle.max(g.angle_log_sum.mean / g.angle_log_bound);
                if !g.holds() {
                    failing.push(case.entry.id.clone());
                }
            }
            Err(e) => failing.push(format!("{}: {e}", case.entry.id)),
        }
    }
    (
        failing.is_empty(),
        format!(
            "max mean/bound: beta+ {worst_beta:.3}, angle sum {worst_angle:.3}; {partial} partial probes; failing {failing:?}"
        ),
    )
}

fn check_cost_integrals(ctx: &Context) -> (bool, String) {
    let cases = try_ctx!(ctx.cases());
    let small: Vec<&SuiteCase> = cases
        .iter()
        .filter(|c| c.entry.poly.degree() <= SMALL_DEGREE)
        .collect();
    let per_case: Vec<(usize, usize, usize, usize, Vec<String>)> = small
        .par_iter()
        .map(|case| {
            let p = &case.entry.poly;
            let (mut integral_ok, mut estimate_ok, mut finite, mut total) = (0, 0, 0, 0);
            let mut problems = Vec::new();
            for k in 0..COST_SAMPLES {
                let t = (k as f64 + 0.5) / COST_SAMPLES as f64;
                let probe = match ray_probe(p, t, case.cfg.circle_offset, &case.profile) {
                    Ok(pr) if !pr.partial => pr,
                    Ok(_) => continue,
                    Err(e) => {
                        problems.push(format!("{}: {e}", case.entry.id));
                        continue;
                    }
                };
                let trace = match run(p, probe.z0, &case.cfg) {
                    Ok(tr) if tr.is_certified() => tr,
                    _ => continue,
                };
                total += 1;
                let n = trace.step_count() as f64;
                let integral = TraceGeometry::new(p, &trace, &case.profile)
                    .and_then(|g| cost_integral_with(&trace, &case.profile, &g));
                match integral {
                    Ok(v) if n <= v + 1.0 => integral_ok += 1,
                    Ok(v) => problems.push(format!("{} t={t}: N={n} > {v:.2}+1", case.entry.id)),
                    Err(e) => problems.push(format!("{}: {e}", case.entry.id)),
                }
                match costestimate_bound(&trace, &probe) {
                    Ok(b) if b.is_finite() => {
                        finite += 1;
                        if n <= b + 1.0 {
                            estimate_ok += 1;
                        } else {
                            problems.push(format!("{} t={t}: N={n} > estimate {b:.2}+1", case.entry.id));
                        }
                    }
                    Ok(_) => {}
                    Err(e) => problems.push(format!("{}: {e}", case.entry.id)),
                }
            }
            (integral_ok, estimate_ok, finite, total, problems)
        })
        .collect();
    let integral_ok: usize = per_case.iter().map(|c| c.0).sum();
    let estimate_ok: usize = per_case.iter().map(|c| c.1).sum();
    let finite: usize = per_case.iter().map(|c| c.2).sum();
    let total: usize = per_case.iter().map(|c| c.3).sum();
    let problems: Vec<String> = per_case.into_iter().flat_map(|c| c.4).collect();
    (
        problems.is_empty() && integral_ok == total && estimate_ok == finite,
        format!(
            "integral bound {integral_ok}/{total}, estimate bound {estimate_ok}/{finite} finite, problems {problems:?}"
        ),
    )
}

fn check_determinism(ctx: &Context) -> (bool, String) {
    let cases = try_ctx!(ctx.cases());
    let (first, _) = try_ctx!(ctx.sweeps());
    let second: Vec<CaseSweep> = cases.iter().map(compute_sweep).collect();
    let mismatched: Vec<&str> = first
        .iter()
        .zip(&second)
        .filter(|(a, b)| a.csv != b.csv || a.jsonl != b.jsonl)
        .map(|(a, _)| a.report.poly_id.as_str())
        .collect();
    let bytes: usize = first.iter().map(|s| s.csv.len() + s.jsonl.len()).sum();
    (
        mismatched.is_empty(),
        format!("{bytes} bytes of CSV and JSONL compared, mismatches {mismatched:?}"),
    )
}

fn report_lemma68(ctx: &Context) -> (bool, String) {
    let audits = try_ctx!(ctx.audits());
    let (mut fwd, mut rev, mut rec, mut n) = (0.0, 0.0, 0.0, 0.0);
    for case in audits {
        for a in &case.audits {
            let k = a.steps.iter().filter(|s| s.big_r_n.is_some()).count() as f64;
            fwd += a.lemma68_forward_holds * k;
            rev += a.lemma68_reversed_holds * k;
            rec += a.lemma68_reciprocal_holds * k;
            n += k;
        }
    }
    let frac = |x: f64| if n > 0.0 { x / n } else { f64::NAN };
    (
        true,
        format!(
            "hold fractions over {n} steps: R/4<=|f|/a<=(3-2sqrt2)R {:.3}; reversed {:.3}; R/4<=|f|/a<=R/(3-2sqrt2) {:.3}",
            frac(fwd),
            frac(rev),
            frac(rec)
        ),
    )
}

fn report_bad_angle_measure(ctx: &Context) -> (bool, String) {
    let cases = try_ctx!(ctx.cases());
    let mut above = Vec::new();
    for case in cases {
        let d = case.entry.poly.degree();
        for a in [PI / 12.0, FRAC_PI_4] {
            let m = bad_angle_measure(&case.entry.poly, &case.profile, a, 4096);
            if !m.below(bad_angle_bound(a, d)) {
                above.push(format!(
                    "{} A={a:.4}: {:.4} > {:.4}",
                    case.entry.id,
                    m.mean,
                    bad_angle_bound(a, d)
                ));
            }
        }
    }
    (
        above.is_empty(),
        format!("{} measures above (2A/pi)(d-1)/d + 3 sigma: {above:?}", above.len()),
    )
}
