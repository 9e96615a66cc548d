//! Sweeps over starting angles, trace audits, cost bounds and circle
//! statistics.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alpha::{newton_step, ALPHA_THRESHOLD};
use crate::error::{Error, Result};
use crate::geometry::{
    branch_radius, ray_probe, regular_start, relative_angle, walk_ray, CriticalProfile, RayProbe,
    SegmentWalk,
};
use crate::pathlift::{run, Mode, Outcome, RunConfig, Trace, INDUCTION_C};
use crate::poly::{ComplexPoint, Polynomial};

/// Leading constant of the cost bounds.
pub const COST_CONSTANT: f64 = 67.0;
/// Additive constant of the average-cost bound `67·(13.1 + Λ_f)`.
pub const COST_OFFSET: f64 = 13.1;
/// `|f_n| ≤ 1.1376·|w_n|` while `α_n > 0.1307`.
pub const F_OVER_W_BOUND: f64 = 1.1376;
/// `|w_{n+1}| ≥ 0.41982·|w_n|` while `α_n > 0.1307`.
pub const GUIDE_DECAY_BOUND: f64 = 0.41982;
/// `u_n = α_n·|h_n| ≤ 0.08247`.
pub const U_BOUND: f64 = 0.08247;
/// `J_n ≥ r_n / 66`.
pub const JUMP_RATIO_BOUND: f64 = 1.0 / 66.0;
/// `|w_N| ≥ ρ_ζ / 87`.
pub const FINAL_GUIDE_RATIO: f64 = 1.0 / 87.0;
/// Slack on the per-step inequalities.
pub const STEP_SLACK: f64 = 1e-10;
const INTEGRAL_NODES: usize = 2048;

/// `67·(13.1 + Λ_f)`.
pub fn average_cost_bound(lambda_f: f64) -> f64 {
    COST_CONSTANT * (COST_OFFSET + lambda_f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Sampling {
    /// `t = (k + 1/2)/M`.
    Midpoint,
    /// `M` uniform angles from a seeded ChaCha stream.
    Random { seed: u64 },
}

impl Sampling {
    pub fn angles(self, m: usize) -> Vec<f64> {
        match self {
            Sampling::Midpoint => (0..m).map(|k| (k as f64 + 0.5) / m as f64).collect(),
            Sampling::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..m).map(|_| rng.random::<f64>()).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// Angle actually used, after any nudge off a singular start.
    pub t: f64,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub outcome: String,
    pub beta_plus: Option<usize>,
    #[serde(rename = "wN_ratio")]
    pub wn_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub poly_id: String,
    pub d: usize,
    pub r: f64,
    #[serde(rename = "M")]
    pub m: usize,
    /// `N_f` of every certified run, in angle order.
    pub costs: Vec<usize>,
    pub mean_cost: f64,
    pub bound: f64,
    pub failures: Vec<(f64, String)>,
    pub beta_plus_mean: Option<f64>,
    #[serde(rename = "wN_over_rho_min")]
    pub wn_over_rho_min: f64,
    pub runs: Vec<RunRecord>,
}

impl SweepReport {
    /// Mean cost within the bound, with every start certified. An empty or
    /// partially failed sweep has not shown the bound.
    pub fn within_bound(&self) -> bool {
        self.failures.is_empty() && !self.costs.is_empty() && self.mean_cost <= self.bound
    }

    /// CSV matrix with columns `t, N, outcome, beta_plus, wN_ratio`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv output: {e}"));
        for rec in &self.runs {
            w.serialize(rec).map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::InvalidArgument(format!("csv output: {e}")))
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv emits UTF-8")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SweepOptions {
    pub sampling: Option<Sampling>,
    /// Also run a ray probe per start to fill `beta_plus`.
    pub with_probes: bool,
}

/// Root the certified point belongs to, found by six Newton steps.
pub fn converged_root(p: &Polynomial, profile: &CriticalProfile, z: ComplexPoint) -> Option<usize> {
    let mut z = z;
    for _ in 0..6 {
        z = newton_step(p, z).ok()?;
    }
    profile.nearest_root(z)
}

/// `|w_N| / ρ_ζ` for a certified trace.
pub fn final_guide_ratio(p: &Polynomial, trace: &Trace, profile: &CriticalProfile) -> Option<f64> {
    let cert = trace.certificate.as_ref()?;
    let root = converged_root(p, profile, cert.point)?;
    let rho = *profile.rho.get(root)?;
    Some(trace.w_final.norm() / rho)
}

/// The run of one start in a sweep, with its trace kept for audits.
pub struct SweepRun {
    pub record: RunRecord,
    pub trace: Option<Trace>,
}

/// Runs the solver from `M` starts on `|z| = 1 + C/d`.
pub fn sweep_runs(
    p: &Polynomial,
    profile: &CriticalProfile,
    m: usize,
    cfg: &RunConfig,
    options: SweepOptions,
) -> Result<Vec<SweepRun>> {
    cfg.validate()?;
    profile.ensure_matches(p)?;
    let angles = options.sampling.unwrap_or(Sampling::Midpoint).angles(m);
    Ok(angles
        .into_par_iter()
        .map(|t| one_run(p, profile, t, cfg, options.with_probes))
        .collect())
}

fn one_run(
    p: &Polynomial,
    profile: &CriticalProfile,
    t: f64,
    cfg: &RunConfig,
    with_probe: bool,
) -> SweepRun {
    let (t, z0) = regular_start(p, profile, t, cfg.circle_offset);
    let beta_plus = if with_probe {
        ray_probe(p, t, cfg.circle_offset, profile)
            .ok()
            .filter(|pr| !pr.partial)
            .map(|pr| pr.beta_plus)
    } else {
        None
    };
    match run(p, z0, cfg) {
        Ok(trace) => {
            let certified = trace.outcome == Outcome::Certified;
            let record = RunRecord {
                t,
                n: certified.then(|| trace.step_count()),
                outcome: trace.outcome.as_str().to_string(),
                beta_plus,
                wn_ratio: final_guide_ratio(p, &trace, profile),
            };
            SweepRun {
                record,
                trace: Some(trace),
            }
        }
        Err(e) => SweepRun {
            record: RunRecord {
                t,
                n: None,
                outcome: match e {
                    Error::SingularStart { .. } => "singular_start".to_string(),
                    other => other.to_string(),
                },
                beta_plus,
                wn_ratio: None,
            },
            trace: None,
        },
    }
}

/// Aggregates per-start runs into a report.
pub fn summarize_sweep(
    poly_id: &str,
    p: &Polynomial,
    profile: &CriticalProfile,
    cfg: &RunConfig,
    runs: &[SweepRun],
) -> SweepReport {
    let d = p.degree();
    let costs: Vec<usize> = runs.iter().filter_map(|r| r.record.n).collect();
    let mean_cost = if costs.is_empty() {
        0.0
    } else {
        costs.iter().sum::<usize>() as f64 / costs.len() as f64
    };
    let failures = runs
        .iter()
        .filter(|r| r.record.n.is_none())
        .map(|r| (r.record.t, r.record.outcome.clone()))
        .collect();
    let betas: Vec<usize> = runs.iter().filter_map(|r| r.record.beta_plus).collect();
    let beta_plus_mean =
        (!betas.is_empty()).then(|| betas.iter().sum::<usize>() as f64 / betas.len() as f64);
    let wn_over_rho_min = runs
        .iter()
        .filter_map(|r| r.record.wn_ratio)
        .fold(f64::INFINITY, f64::min);
    SweepReport {
        poly_id: poly_id.to_string(),
        d,
        r: 1.0 + cfg.circle_offset / d as f64,
        m: runs.len(),
        costs,
        mean_cost,
        bound: average_cost_bound(profile.lambda_f),
        failures,
        beta_plus_mean,
        wn_over_rho_min,
        runs: runs.iter().map(|r| r.record.clone()).collect(),
    }
}

/// Average cost over `M` midpoint starts, compared with `67·(13.1 + Λ_f)`.
pub fn sweep_average_cost(
    poly_id: &str,
    p: &Polynomial,
    profile: &CriticalProfile,
    m: usize,
    cfg: &RunConfig,
    options: SweepOptions,
) -> Result<SweepReport> {
    if m < 16 {
        return Err(Error::InvalidArgument("sweeps need M ≥ 16".into()));
    }
    let runs = sweep_runs(p, profile, m, cfg, options)?;
    Ok(summarize_sweep(poly_id, p, profile, cfg, &runs))
}

/// Trapezoid rule for `∫₀¹ log|f(re^{2πit})| dt`.
pub fn quadrature_log_abs_f(p: &Polynomial, r: f64, nodes: usize) -> Result<f64> {
    if !(r > 0.0) || nodes == 0 {
        return Err(Error::InvalidArgument("need r > 0 and nodes > 0".into()));
    }
    let sum: f64 = (0..nodes)
        .map(|k| {
            p.eval(Complex64::from_polar(r, TAU * k as f64 / nodes as f64))
                .norm()
                .ln()
        })
        .sum();
    Ok(sum / nodes as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepAudit {
    pub n: usize,
    /// `δ_n ≤ 0.0158·|f_n|/α_n`.
    pub delta_ok: bool,
    /// `|f_n| ≤ 1.1376·|w_n|`; `None` once `α_n ≤ 0.1307`.
    pub f_over_w_ok: Option<bool>,
    /// `|w_{n+1}| ≥ 0.41982·|w_n|`.
    pub decay_ok: Option<bool>,
    /// `u_n ≤ 0.08247`.
    pub u_ok: Option<bool>,
    pub jump_ratio: Option<f64>,
    /// `r_n` sits on an unresolved cell boundary or a fallback radius.
    pub r_flagged: bool,
    pub r_n: f64,
    #[serde(rename = "R_n")]
    pub big_r_n: Option<f64>,
    pub f_over_alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub steps: Vec<StepAudit>,
    pub delta_all: bool,
    pub f_over_w_all: bool,
    pub decay_all: bool,
    pub u_all: bool,
    /// Minimum of `J_n / r_n` over un-flagged steps.
    pub jump_ratio_min: f64,
    /// Fractions of steps where `R/4 ≤ |f|/α ≤ (3 − 2√2)R` holds.
    pub lemma68_forward_holds: f64,
    /// `(3 − 2√2)R ≤ |f|/α ≤ R/4`.
    pub lemma68_reversed_holds: f64,
    /// `R/4 ≤ |f|/α ≤ R/(3 − 2√2)`, the form the jump bound relies on.
    pub lemma68_reciprocal_holds: f64,
    pub root_index: Option<usize>,
    #[serde(rename = "wN_over_rho")]
    pub wn_over_rho: Option<f64>,
}

impl AuditReport {
    /// All assertable per-step checks pass.
    pub fn step_invariants_hold(&self) -> bool {
        self.delta_all && self.f_over_w_all && self.decay_all && self.u_all
    }
}

/// Lifted-ray data shared by the audit and the cost bounds.
pub struct TraceGeometry {
    pub walk: Option<SegmentWalk>,
}

impl TraceGeometry {
    pub fn new(p: &Polynomial, trace: &Trace, profile: &CriticalProfile) -> Result<Self> {
        profile.ensure_matches(p)?;
        if trace.poly_fingerprint != p.fingerprint() {
            return Err(Error::ProfileMismatch);
        }
        let walk = if profile.critical_points.is_empty() {
            None
        } else {
            Some(walk_ray(p, profile, trace.z0())?)
        };
        Ok(Self { walk })
    }

    /// `r` at the guide point of modulus `rho`, and whether it is flagged.
    pub fn radius_at_modulus(&self, w0: f64, rho: f64, profile: &CriticalProfile) -> (f64, bool) {
        match &self.walk {
            None => (f64::INFINITY, false),
            Some(walk) => {
                let (r, unresolved) = walk.radius_at(1.0 - rho / w0, profile);
                (r, unresolved || walk.flagged)
            }
        }
    }
}

fn require_certified_classic(trace: &Trace) -> Result<()> {
    if trace.outcome != Outcome::Certified {
        return Err(Error::NotCertified(trace.outcome));
    }
    if trace.mode != Mode::Classic {
        return Err(Error::InvalidArgument(
            "audits apply to classic-mode traces".into(),
        ));
    }
    Ok(())
}

/// Evaluates the per-step inequalities along a certified classic trace.
pub fn audit_trace(p: &Polynomial, trace: &Trace, profile: &CriticalProfile) -> Result<AuditReport> {
    let geometry = TraceGeometry::new(p, trace, profile)?;
    audit_with(p, trace, profile, &geometry)
}

pub fn audit_with(
    p: &Polynomial,
    trace: &Trace,
    profile: &CriticalProfile,
    geometry: &TraceGeometry,
) -> Result<AuditReport> {
    require_certified_classic(trace)?;
    let w0 = trace.w0().norm();
    let lower68 = 3.0 - 8f64.sqrt();
    let mut steps = Vec::with_capacity(trace.steps.len());
    let (mut fwd, mut rev, mut rec, mut counted) = (0usize, 0usize, 0usize, 0usize);
    for (i, s) in trace.steps.iter().enumerate() {
        let f_abs = s.f_of_z.norm();
        let f_over_alpha = f_abs / s.alpha;
        let active = s.alpha > ALPHA_THRESHOLD;
        let delta_ok = s.delta <= INDUCTION_C * f_over_alpha + STEP_SLACK;
        let f_over_w_ok = active.then(|| f_abs <= F_OVER_W_BOUND * s.w.norm() + STEP_SLACK);
        let decay_ok = match (active, trace.steps.get(i + 1)) {
            (true, Some(next)) => {
                Some(next.w.norm() >= GUIDE_DECAY_BOUND * s.w.norm() - STEP_SLACK)
            }
            _ => None,
        };
        let u_ok = s.u.map(|u| u <= U_BOUND + STEP_SLACK);
        let (r_n, r_flagged) = geometry.radius_at_modulus(w0, s.w.norm(), profile);
        let jump_ratio = s.jump.map(|j| j / r_n);
        let big_r_n = if profile.critical_points.is_empty() || !active {
            None
        } else {
            let b = branch_radius(p, profile, s.f_of_z, s.z)?;
            Some(b.radius)
        };
        if let Some(big_r) = big_r_n {
            counted += 1;
            let q = f_over_alpha;
            fwd += (big_r / 4.0 <= q && q <= lower68 * big_r) as usize;
            rev += (lower68 * big_r <= q && q <= big_r / 4.0) as usize;
            rec += (big_r / 4.0 <= q && q <= big_r / lower68) as usize;
        }
        steps.push(StepAudit {
            n: s.n,
            delta_ok,
            f_over_w_ok,
            decay_ok,
            u_ok,
            jump_ratio,
            r_flagged,
            r_n,
            big_r_n,
            f_over_alpha,
        });
    }
    let fraction = |k: usize| if counted == 0 { 1.0 } else { k as f64 / counted as f64 };
    let root_index = trace
        .certificate
        .as_ref()
        .and_then(|c| converged_root(p, profile, c.point));
    let wn_over_rho = root_index
        .and_then(|i| profile.rho.get(i))
        .map(|rho| trace.w_final.norm() / rho);
    Ok(AuditReport {
        delta_all: steps.iter().all(|s| s.delta_ok),
        f_over_w_all: steps.iter().all(|s| s.f_over_w_ok != Some(false)),
        decay_all: steps.iter().all(|s| s.decay_ok != Some(false)),
        u_all: steps.iter().all(|s| s.u_ok != Some(false)),
        jump_ratio_min: steps
            .iter()
            .filter(|s| !s.r_flagged)
            .filter_map(|s| s.jump_ratio)
            .fold(f64::INFINITY, f64::min),
        lemma68_forward_holds: fraction(fwd),
        lemma68_reversed_holds: fraction(rev),
        lemma68_reciprocal_holds: fraction(rec),
        root_index,
        wn_over_rho,
        steps,
    })
}

/// `67·∫ dy/r_y` along the guide ray from `|w_N|` to `|w0|`.
pub fn cost_integral_bound(p: &Polynomial, trace: &Trace, profile: &CriticalProfile) -> Result<f64> {
    let geometry = TraceGeometry::new(p, trace, profile)?;
    cost_integral_with(trace, profile, &geometry)
}

pub fn cost_integral_with(
    trace: &Trace,
    profile: &CriticalProfile,
    geometry: &TraceGeometry,
) -> Result<f64> {
    require_certified_classic(trace)?;
    let w0 = trace.w0().norm();
    let wn = trace.w_final.norm();
    if geometry.walk.is_none() || !(wn < w0) {
        return Ok(0.0);
    }
    // midpoint rule in log|y|, where the integrand varies slowly
    let (a, b) = (wn.ln(), w0.ln());
    let h = (b - a) / INTEGRAL_NODES as f64;
    let sum: f64 = (0..INTEGRAL_NODES)
        .map(|k| {
            let rho = (a + (k as f64 + 0.5) * h).exp();
            rho / geometry.radius_at_modulus(w0, rho, profile).0
        })
        .sum();
    Ok(COST_CONSTANT * sum * h)
}

/// `67·[log(|w0|/|w_N|) + β⁺·log(9/4) + Σ log((4 + tan|θ|)/(sec|θ| − 1))]`.
pub fn costestimate_bound(trace: &Trace, probe: &RayProbe) -> Result<f64> {
    if trace.outcome != Outcome::Certified {
        return Err(Error::NotCertified(trace.outcome));
    }
    if (probe.z0 - trace.z0()).norm() > 1e-12 * probe.z0.norm() {
        return Err(Error::InvalidArgument(
            "probe and trace start at different points".into(),
        ));
    }
    let log_ratio = (trace.w0().norm() / trace.w_final.norm()).ln();
    Ok(COST_CONSTANT
        * (log_ratio + probe.beta_plus as f64 * (9.0f64 / 4.0).ln() + probe.angle_log_sum()))
}

/// Mean and standard error of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleMean {
    pub mean: f64,
    /// Standard error `σ/√n` of the mean.
    pub std_error: f64,
    pub n: usize,
}

impl SampleMean {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                std_error: f64::NAN,
                n,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            mean,
            std_error: (var / n as f64).sqrt(),
            n,
        }
    }

    /// `mean ≤ bound + 3σ`.
    pub fn below(&self, bound: f64) -> bool {
        self.mean <= bound + 3.0 * self.std_error
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleGeometry {
    pub r: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub beta_plus: SampleMean,
    pub angle_log_sum: SampleMean,
    /// `(1 + r)/r`.
    pub beta_plus_bound: f64,
    /// `3(r + 1)/r`.
    pub angle_log_bound: f64,
    pub partial_probes: usize,
}

impl CircleGeometry {
    pub fn holds(&self) -> bool {
        self.beta_plus.below(self.beta_plus_bound) && self.angle_log_sum.below(self.angle_log_bound)
    }
}

/// Sample means of `β⁺` and of the angle-log sum over `M` midpoint starts.
pub fn circle_geometry(
    p: &Polynomial,
    profile: &CriticalProfile,
    m: usize,
    circle_offset: f64,
) -> Result<CircleGeometry> {
    profile.ensure_matches(p)?;
    let probes: Vec<Result<RayProbe>> = Sampling::Midpoint
        .angles(m)
        .into_par_iter()
        .map(|t| ray_probe(p, t, circle_offset, profile))
        .collect();
    let mut betas = Vec::new();
    let mut sums = Vec::new();
    let mut partial = 0;
    for probe in probes {
        let probe = probe?;
        if probe.partial {
            partial += 1;
            continue;
        }
        betas.push(probe.beta_plus as f64);
        sums.push(probe.angle_log_sum());
    }
    let r = 1.0 + circle_offset / p.degree() as f64;
    Ok(CircleGeometry {
        r,
        m,
        beta_plus: SampleMean::of(&betas),
        angle_log_sum: SampleMean::of(&sums),
        beta_plus_bound: (1.0 + r) / r,
        angle_log_bound: 3.0 * (r + 1.0) / r,
        partial_probes: partial,
    })
}

/// Sampled measure of `{t : |Arg(v/f(z0))| < A for every critical value}`
/// on `|z| = 1 + 1/d`, with its binomial standard error.
pub fn bad_angle_measure(p: &Polynomial, profile: &CriticalProfile, a: f64, m: usize) -> SampleMean {
    let d = p.degree();
    let hits: Vec<f64> = Sampling::Midpoint
        .angles(m)
        .into_iter()
        .map(|t| {
            let w0 = p.eval(Complex64::from_polar(1.0 + 1.0 / d as f64, TAU * t));
            let inside = !profile.critical_points.is_empty()
                && profile
                    .critical_points
                    .iter()
                    .all(|c| relative_angle(c.v, w0).abs() < a);
            inside as u8 as f64
        })
        .collect();
    SampleMean::of(&hits)
}

/// `(2A/π)·(d − 1)/d`.
pub fn bad_angle_bound(a: f64, d: usize) -> f64 {
    a / FRAC_PI_2 * (d as f64 - 1.0) / d as f64
}

#[derive(Debug, Clone)]
pub struct SuiteEntry {
    pub id: String,
    pub poly: Polynomial,
}

/// Default seed of the random part of the built-in suite.
pub const SUITE_SEED: u64 = 20_011;
/// Minimum pairwise separation of random suite roots.
pub const SUITE_SEPARATION: f64 = 0.05;

/// `d` roots uniform in the open unit disk, pairwise at least `sep` apart.
pub fn random_roots<R: Rng>(rng: &mut R, d: usize, sep: f64) -> Vec<ComplexPoint> {
    let mut roots: Vec<ComplexPoint> = Vec::with_capacity(d);
    while roots.len() < d {
        let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if z.norm() < 1.0 && roots.iter().all(|r| (r - z).norm() >= sep) {
            roots.push(z);
        }
    }
    roots
}

/// The fixed test polynomials followed by 16 random ones with `d` cycling
/// through 4, 8, 16.
pub fn standard_suite(seed: u64) -> Vec<SuiteEntry> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let mut suite = vec![
        SuiteEntry {
            id: "z2-quarter".into(),
            poly: Polynomial::from_roots(&[c(0.5, 0.0), c(-0.5, 0.0)]).unwrap(),
        },
        SuiteEntry {
            id: "z3-0.81z".into(),
            poly: Polynomial::from_roots(&[c(0.0, 0.0), c(0.9, 0.0), c(-0.9, 0.0)]).unwrap(),
        },
        SuiteEntry {
            id: "unity8-0.9".into(),
            poly: Polynomial::from_roots(
                &(0..8)
                    .map(|k| Complex64::from_polar(0.9, TAU * k as f64 / 8.0))
                    .collect::<Vec<_>>(),
            )
            .unwrap(),
        },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..16 {
        let d = [4, 8, 16][i % 3];
        let roots = random_roots(&mut rng, d, SUITE_SEPARATION);
        suite.push(SuiteEntry {
            id: format!("random{i:02}-d{d}"),
            poly: Polynomial::from_roots(&roots).expect("separated roots"),
        });
    }
    suite
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::critical_profile;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn quarter() -> Polynomial {
        Polynomial::from_roots(&[c(0.5, 0.0), c(-0.5, 0.0)]).unwrap()
    }

    #[test]
    fn linear_sweep() {
        let p = Polynomial::from_roots(&[c(0.3, -0.4)]).unwrap();
        let prof = critical_profile(&p).unwrap();
        let rep = sweep_average_cost("lin", &p, &prof, 16, &RunConfig::default(), SweepOptions::default())
            .unwrap();
        assert_eq!(rep.mean_cost, 0.0);
        assert!((rep.bound - 877.7).abs() < 1e-9);
        assert!(rep.failures.is_empty());
    }

    #[test]
    fn quarter_sweep() {
        let p = quarter();
        let prof = critical_profile(&p).unwrap();
        let cfg = RunConfig::default().with_lambda(prof.lambda_f);
        let rep = sweep_average_cost("q", &p, &prof, 64, &cfg, SweepOptions::default()).unwrap();
        assert!((rep.bound - 67.0 * (13.1 + 16f64.ln())).abs() < 1e-9);
        assert!(rep.within_bound());
        assert!(rep.failures.is_empty(), "{:?}", rep.failures);
        assert!(rep.wn_over_rho_min >= FINAL_GUIDE_RATIO);
        let csv = rep.to_csv();
        assert!(csv.starts_with("t,N,outcome,beta_plus,wN_ratio\n"));
        assert_eq!(csv.lines().count(), 65);
    }

    #[test]
    fn log_quadrature() {
        let p = quarter();
        let q = quadrature_log_abs_f(&p, 1.5, 1024).unwrap();
        assert!((q - 2.0 * 1.5f64.ln()).abs() < 1e-10);
        let z = Polynomial::from_roots(&[c(0.0, 0.0)]).unwrap();
        assert!((quadrature_log_abs_f(&z, 2.0, 256).unwrap() - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn quarter_audit_and_bounds() {
        let p = quarter();
        let prof = critical_profile(&p).unwrap();
        let trace = run(&p, c(1.5, 0.0), &RunConfig::default()).unwrap();
        let audit = audit_trace(&p, &trace, &prof).unwrap();
        assert!(audit.step_invariants_hold());
        assert!(audit.jump_ratio_min >= JUMP_RATIO_BOUND - 1e-9);
        assert!(audit.wn_over_rho.unwrap() >= FINAL_GUIDE_RATIO);
        // for z² − 1/4, |f|/α = 4R exactly
        assert_eq!(audit.lemma68_reciprocal_holds, 1.0);
        assert_eq!(audit.lemma68_forward_holds, 0.0);

        let n = trace.step_count() as f64;
        let integral = cost_integral_bound(&p, &trace, &prof).unwrap();
        assert!(n <= integral + 1.0);

        let probe = ray_probe(&p, 0.0, 1.0, &prof).unwrap();
        assert_eq!(probe.beta_plus, 0);
        let bound = costestimate_bound(&trace, &probe).unwrap();
        let log_ratio = (trace.w0().norm() / trace.w_final.norm()).ln();
        assert!((bound - 67.0 * log_ratio).abs() < 1e-9);
        assert!(n <= bound + 1.0);
    }

    #[test]
    fn linear_audit_is_vacuous() {
        let p = Polynomial::from_roots(&[c(0.1, 0.0)]).unwrap();
        let prof = critical_profile(&p).unwrap();
        let trace = run(&p, c(2.0, 0.0), &RunConfig::default()).unwrap();
        let audit = audit_trace(&p, &trace, &prof).unwrap();
        assert!(audit.step_invariants_hold());
        assert_eq!(cost_integral_bound(&p, &trace, &prof).unwrap(), 0.0);
    }

    #[test]
    fn audit_rejects_other_polynomial() {
        let p = quarter();
        let other = Polynomial::from_roots(&[c(0.1, 0.0), c(0.2, 0.0)]).unwrap();
        let prof = critical_profile(&other).unwrap();
        let trace = run(&p, c(1.5, 0.0), &RunConfig::default()).unwrap();
        assert!(matches!(audit_trace(&p, &trace, &prof), Err(Error::ProfileMismatch)));
    }

    #[test]
    fn suite_shape() {
        let suite = standard_suite(SUITE_SEED);
        assert_eq!(suite.len(), 19);
        let degrees: Vec<usize> = suite.iter().map(|e| e.poly.degree()).collect();
        assert_eq!(&degrees[..5], &[2, 3, 8, 4, 8]);
        for e in &suite[3..] {
            let roots = e.poly.roots().unwrap();
            assert!(roots.iter().all(|r| r.norm() < 1.0));
        }
        let again = standard_suite(SUITE_SEED);
        assert_eq!(suite[7].poly.coeffs(), again[7].poly.coeffs());
    }

    #[test]
    fn random_sampling_is_seeded() {
        let a = Sampling::Random { seed: 3 }.angles(8);
        assert_eq!(a, Sampling::Random { seed: 3 }.angles(8));
        assert!(a.iter().all(|t| (0.0..1.0).contains(t)));
        assert_eq!(Sampling::Midpoint.angles(4), vec![0.125, 0.375, 0.625, 0.875]);
    }
}
