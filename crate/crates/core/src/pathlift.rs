//! The α-step path-lifting solver.
//!
//! Starting from `z0` on a circle slightly outside the unit disk, the solver
//! walks guide points `w_n` down the ray of `w0 = f(z0)` toward zero and
//! follows them with one Newton step on `f − w_{n+1}`, that is
//! `z_{n+1} = z_n − (f(z_n) − w_{n+1})/f'(z_n)`. It stops as soon as `α(z_n)` certifies an approximate
//! zero. Every iteration is recorded in a [`Trace`].

use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::alpha::{alpha_gamma_from_taylor, Certificate, ALPHA_THRESHOLD, CRITICAL_GUARD};
use crate::error::{Error, Result};
use crate::poly::{ensure_finite, ComplexPoint, Polynomial};

/// Jump coefficient `A` of the classic step.
pub const JUMP_COEFFICIENT: f64 = 1.0 / 15.0;
/// Constant `c` of the step-size induction `δ_n ≤ c·|f_n|/α_n`.
pub const INDUCTION_C: f64 = 0.0158;
/// Fallback iteration cap when no conditioning data is available.
pub const DEFAULT_MAX_STEPS: usize = 100_000;
/// Guide points that would cross zero are clamped to this fraction of `|w_n|`.
const CLAMP_FRACTION: f64 = 1e-3;
const HALVING_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Certified,
    MaxStepsExceeded,
    CriticalPointEncountered,
    HalvingUnderflow,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Certified => "certified",
            Outcome::MaxStepsExceeded => "max_steps_exceeded",
            Outcome::CriticalPointEncountered => "critical_point_encountered",
            Outcome::HalvingUnderflow => "halving_underflow",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Classic,
    Adaptive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Starting circle is `|z| = 1 + C/d`.
    pub circle_offset: f64,
    pub jump_coefficient: f64,
    pub threshold: f64,
    pub max_steps: usize,
    pub mode: Mode,
    pub adaptive_h0: f64,
    pub adaptive_accept_c: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            circle_offset: 1.0,
            jump_coefficient: JUMP_COEFFICIENT,
            threshold: ALPHA_THRESHOLD,
            max_steps: DEFAULT_MAX_STEPS,
            mode: Mode::Classic,
            adaptive_h0: JUMP_COEFFICIENT,
            adaptive_accept_c: INDUCTION_C,
        }
    }
}

impl RunConfig {
    /// Iteration cap at ten times the average-cost bound `67(13.1 + Λ_f)`.
    pub fn max_steps_for(lambda_f: f64) -> usize {
        (10.0 * 67.0 * (13.1 + lambda_f.abs())).ceil() as usize
    }

    pub fn with_lambda(mut self, lambda_f: f64) -> Self {
        self.max_steps = Self::max_steps_for(lambda_f);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.to_string()));
        if !(self.circle_offset > 0.0) {
            return bad("circle offset C must be positive");
        }
        if !(self.jump_coefficient > 0.0 && self.jump_coefficient <= JUMP_COEFFICIENT * (1.0 + 1e-12)) {
            return bad("jump coefficient must lie in (0, 1/15]");
        }
        if !(self.threshold > 0.0 && self.threshold <= ALPHA_THRESHOLD) {
            return bad("threshold must lie in (0, 0.1307]");
        }
        if !(self.adaptive_h0 > 0.0 && self.adaptive_h0 < 1.0) {
            return bad("adaptive h0 must lie in (0, 1)");
        }
        if !(self.adaptive_accept_c > 0.0) {
            return bad("adaptive acceptance constant must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub n: usize,
    #[serde(with = "crate::serde_pair")]
    pub z: ComplexPoint,
    #[serde(with = "crate::serde_pair")]
    pub w: ComplexPoint,
    #[serde(rename = "f", with = "crate::serde_pair")]
    pub f_of_z: ComplexPoint,
    pub alpha: f64,
    pub delta: f64,
    pub jump: Option<f64>,
    #[serde(with = "crate::serde_pair::option")]
    pub h: Option<ComplexPoint>,
    pub u: Option<f64>,
    #[serde(default)]
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
    pub start_angle_t: f64,
    pub radius: f64,
    pub outcome: Outcome,
    pub certificate: Option<Certificate>,
    #[serde(with = "crate::serde_pair")]
    pub w_final: ComplexPoint,
    #[serde(with = "crate::serde_pair")]
    pub z_final: ComplexPoint,
    /// Unit vector `w0/|w0|` of the guide ray.
    #[serde(with = "crate::serde_pair")]
    pub direction: ComplexPoint,
    pub mode: Mode,
    /// Evaluations of `f` spent on trial points (adaptive mode).
    pub f_evals: usize,
    pub halvings: usize,
    /// Number of guide points clamped because they would have crossed zero.
    pub clamps: usize,
    pub poly_fingerprint: u64,
}

#[derive(Serialize)]
struct StepRecord {
    n: usize,
    z: [f64; 2],
    w: [f64; 2],
    f: [f64; 2],
    alpha: f64,
    delta: f64,
    jump: Option<f64>,
    u: Option<f64>,
}

#[derive(Serialize)]
struct SummaryRecord {
    outcome: Outcome,
    #[serde(rename = "N")]
    n: usize,
    w_final: [f64; 2],
    certified_z: Option<[f64; 2]>,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl Trace {
    /// Number of Step-2 executions.
    pub fn step_count(&self) -> usize {
        self.steps.iter().filter(|s| s.jump.is_some()).count()
    }

    pub fn z0(&self) -> ComplexPoint {
        self.steps.first().map(|s| s.z).unwrap_or(self.z_final)
    }

    pub fn w0(&self) -> ComplexPoint {
        self.steps.first().map(|s| s.w).unwrap_or(self.w_final)
    }

    pub fn is_certified(&self) -> bool {
        self.outcome == Outcome::Certified
    }

    /// One JSON record per step, then a summary record.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for s in &self.steps {
            let rec = StepRecord {
                n: s.n,
                z: pair(s.z),
                w: pair(s.w),
                f: pair(s.f_of_z),
                alpha: s.alpha,
                delta: s.delta,
                jump: s.jump,
                u: s.u,
            };
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n")?;
        }
        let summary = SummaryRecord {
            outcome: self.outcome,
            n: self.step_count(),
            w_final: pair(self.w_final),
            certified_z: self.certificate.as_ref().map(|c| pair(c.point)),
        };
        serde_json::to_writer(&mut out, &summary)?;
        out.write_all(b"\n")
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }
}

/// `(1 + C/d)·e^{2πit}`.
pub fn choose_start(d: usize, t: f64, circle_offset: f64) -> ComplexPoint {
    Complex64::from_polar(1.0 + circle_offset / d as f64, TAU * t)
}

struct Start {
    w0: ComplexPoint,
    direction: ComplexPoint,
}

fn check_start(p: &Polynomial, z0: ComplexPoint) -> Result<Start> {
    ensure_finite(z0, "starting point")?;
    let (f0, df0) = p.eval_with_derivative(z0);
    if f0.norm() == 0.0 || !(df0.norm() > CRITICAL_GUARD) {
        return Err(Error::SingularStart { z0 });
    }
    Ok(Start {
        w0: f0,
        direction: f0 / f0.norm(),
    })
}

fn empty_trace(p: &Polynomial, z0: ComplexPoint, start: &Start, mode: Mode) -> Trace {
    let t = z0.arg() / TAU;
    Trace {
        steps: Vec::new(),
        start_angle_t: if t < 0.0 { t + 1.0 } else { t },
        radius: z0.norm(),
        outcome: Outcome::MaxStepsExceeded,
        certificate: None,
        w_final: start.w0,
        z_final: z0,
        direction: start.direction,
        mode,
        f_evals: 0,
        halvings: 0,
        clamps: 0,
        poly_fingerprint: p.fingerprint(),
    }
}

fn finish_certified(trace: &mut Trace, z: ComplexPoint, alpha: f64, threshold: f64) {
    trace.outcome = Outcome::Certified;
    trace.certificate = Some(Certificate {
        point: z,
        alpha_value: alpha,
        threshold,
        trace_id: None,
    });
}

/// Runs the solver in the mode selected by `cfg.mode`.
pub fn run(p: &Polynomial, z0: ComplexPoint, cfg: &RunConfig) -> Result<Trace> {
    match cfg.mode {
        Mode::Classic => run_classic(p, z0, cfg),
        Mode::Adaptive => run_adaptive(p, z0, cfg),
    }
}

/// The α-step algorithm with jumps `J_n = A·|f(z_n)|/α(z_n)`.
pub fn run_classic(p: &Polynomial, z0: ComplexPoint, cfg: &RunConfig) -> Result<Trace> {
    cfg.validate()?;
    let start = check_start(p, z0)?;
    let d = p.degree();
    let mut trace = empty_trace(p, z0, &start, Mode::Classic);

    let mut z = z0;
    let mut w = start.w0;
    let mut modulus = start.w0.norm();
    for n in 0.. {
        let taylor = p.taylor_coeffs(z, d);
        let (f, df) = (taylor[0], taylor[1]);
        let alpha = match alpha_gamma_from_taylor(&taylor) {
            Ok(a) => a.alpha,
            Err(_) => {
                trace.outcome = Outcome::CriticalPointEncountered;
                break;
            }
        };
        let delta = (f - w).norm();
        trace.w_final = w;
        trace.z_final = z;
        if alpha <= cfg.threshold {
            trace.steps.push(TraceStep {
                n,
                z,
                w,
                f_of_z: f,
                alpha,
                delta,
                jump: None,
                h: None,
                u: None,
                clamped: false,
            });
            finish_certified(&mut trace, z, alpha, cfg.threshold);
            break;
        }
        if n == cfg.max_steps {
            trace.outcome = Outcome::MaxStepsExceeded;
            break;
        }

        let step = cfg.jump_coefficient * f.norm() / alpha;
        let mut next_modulus = modulus - step;
        let mut jump = step;
        let clamped = !(next_modulus > 0.0);
        if clamped {
            next_modulus = CLAMP_FRACTION * modulus;
            jump = modulus - next_modulus;
            trace.clamps += 1;
        }
        // scale the cached unit vector so every guide point stays on the ray
        let w_next = start.direction * next_modulus;
        let z_next = z - (f - w_next) / df;
        // h_n = -(z_{n+1} - z_n) f'_n / f_n, so that w_{n+1} = (1 - h_n) f_n
        let h = (f - w_next) / f;
        trace.steps.push(TraceStep {
            n,
            z,
            w,
            f_of_z: f,
            alpha,
            delta,
            jump: Some(jump),
            h: Some(h),
            u: Some(alpha * h.norm()),
            clamped,
        });
        z = z_next;
        w = w_next;
        modulus = next_modulus;
        if !(z.re.is_finite() && z.im.is_finite()) {
            trace.outcome = Outcome::CriticalPointEncountered;
            trace.z_final = z;
            break;
        }
    }
    Ok(trace)
}

/// Variant without `α` in the step rule: the guide point is placed at
/// `(1 − h)|f(z_n)|` along the ray and `h` is halved until the new iterate
/// tracks it within `c·|w_{n+1}|`. `α` is still the stopping test.
pub fn run_adaptive(p: &Polynomial, z0: ComplexPoint, cfg: &RunConfig) -> Result<Trace> {
    cfg.validate()?;
    let start = check_start(p, z0)?;
    let d = p.degree();
    let mut trace = empty_trace(p, z0, &start, Mode::Adaptive);

    let mut z = z0;
    let mut w = start.w0;
    let mut h_start = cfg.adaptive_h0;
    'outer: for n in 0.. {
        let taylor = p.taylor_coeffs(z, d);
        let (f, df) = (taylor[0], taylor[1]);
        trace.f_evals += 1;
        let alpha = match alpha_gamma_from_taylor(&taylor) {
            Ok(a) => a.alpha,
            Err(_) => {
                trace.outcome = Outcome::CriticalPointEncountered;
                break;
            }
        };
        let delta = (f - w).norm();
        trace.w_final = w;
        trace.z_final = z;
        if alpha <= cfg.threshold {
            trace.steps.push(TraceStep {
                n,
                z,
                w,
                f_of_z: f,
                alpha,
                delta,
                jump: None,
                h: None,
                u: None,
                clamped: false,
            });
            finish_certified(&mut trace, z, alpha, cfg.threshold);
            break;
        }
        if n == cfg.max_steps {
            trace.outcome = Outcome::MaxStepsExceeded;
            break;
        }

        let mut h = h_start;
        let (w_next, z_next) = loop {
            let target = (1.0 - h) * f.norm();
            let w_next = start.direction * target;
            let z_next = z - (f - w_next) / df;
            let f_next = p.eval(z_next);
            trace.f_evals += 1;
            if (f_next - w_next).norm() <= cfg.adaptive_accept_c * target {
                break (w_next, z_next);
            }
            h *= 0.5;
            trace.halvings += 1;
            if h < HALVING_FLOOR {
                trace.outcome = Outcome::HalvingUnderflow;
                break 'outer;
            }
        };
        let h_complex = (f - w_next) / f;
        trace.steps.push(TraceStep {
            n,
            z,
            w,
            f_of_z: f,
            alpha,
            delta,
            jump: Some((w - w_next).norm()),
            h: Some(h_complex),
            u: Some(alpha * h_complex.norm()),
            clamped: false,
        });
        z = z_next;
        w = w_next;
        h_start = cfg.adaptive_h0.min(2.0 * h);
    }
    Ok(trace)
}

/// Number of steps `N_f(z0)` from the start at angle `t` on `|z| = 1 + C/d`.
pub fn pointwise_cost(p: &Polynomial, t: f64, cfg: &RunConfig) -> Result<usize> {
    let z0 = choose_start(p.degree(), t, cfg.circle_offset);
    let trace = run(p, z0, cfg)?;
    match trace.outcome {
        Outcome::Certified => Ok(trace.step_count()),
        other => Err(Error::NotCertified(other)),
    }
}
