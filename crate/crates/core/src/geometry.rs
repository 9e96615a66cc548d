//! Critical points, critical values and the branched cover of `f⁻¹`.
//!
//! Everything here is built on one primitive: continuing a branch of `f⁻¹`
//! along a straight segment of the target plane with α-certified steps. A
//! critical value `v` blocks a branch at `(y, z)` when the continuation along
//! `[y, v]` collapses into a critical point, and the nearest blocking value
//! gives both the radius of univalence and the Voronoi cell of the point.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::alpha::alpha_gamma_from_taylor;
use crate::error::{Error, Result};
use crate::pathlift::choose_start;
use crate::poly::{ComplexPoint, Polynomial};
use crate::roots;

/// Critical-point candidates this close are one multiple critical point.
pub const MULTIPLICITY_MERGE_TOL: f64 = 1e-7;
/// Relative size of Taylor coefficients that count as zero in the
/// multiplicity test; two simple roots closer than about 1e-7 merge.
const MULTIPLE_ROOT_NOISE: f64 = 1e-13;
/// Distinct critical points whose values agree this closely flag the profile.
pub const DEGENERATE_VALUE_TOL: f64 = 1e-10;
/// Oracle roots of `f'` for a multiple critical point scatter like
/// `ε^{1/m}`; neighbours up to this distance are tested for multiplicity.
const CLUSTER_SEARCH_RADIUS: f64 = 0.25;

/// Target-plane step as a fraction of `|f'|/γ`; this keeps `α ≤ 0.1` for the
/// predictor, so it is an approximate zero of `f − y_new` on the same branch.
const CONTINUATION_KAPPA: f64 = 0.1;
/// A continuation that cannot get closer than this fraction of its segment
/// length has collapsed into a critical point.
const COLLAPSE_FRACTION: f64 = 1e-8;
const MAX_CONTINUATION_STEPS: usize = 100_000;
const CORRECTOR_ITERATIONS: usize = 3;

/// Ray walks advance by this fraction of the local radius of univalence.
const WALK_STEP_FRACTION: f64 = 0.5;
const MAX_WALK_NODES: usize = 200_000;
/// Cell boundaries are bisected down to this fraction of the walked segment.
const BOUNDARY_RESOLUTION: f64 = 1e-9;
/// Rays passing closer than this (relative to `|w0|`) to a critical value are
/// treated as hitting it, and the start angle is nudged.
const RAY_AVOIDANCE: f64 = 1e-9;
pub const ANGLE_NUDGE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    #[serde(with = "crate::serde_pair")]
    pub c: ComplexPoint,
    pub m: usize,
    #[serde(with = "crate::serde_pair")]
    pub v: ComplexPoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalProfile {
    pub critical_points: Vec<CriticalPoint>,
    pub roots: Vec<ComplexPoint>,
    /// `ρ_ζ`, aligned with `roots`.
    pub rho: Vec<f64>,
    /// Roots whose `ρ_ζ` fell back to the smallest critical-value modulus.
    pub rho_fallback: Vec<bool>,
    pub k_f: f64,
    pub log_k_f: f64,
    pub lambda_f: f64,
    /// Two distinct critical points share a critical value within 1e-10.
    pub degenerate_near_multiple: bool,
    pub poly_fingerprint: u64,
}

#[derive(Serialize, Deserialize)]
struct ProfileJson {
    critical: Vec<CriticalPoint>,
    rho: BTreeMap<String, f64>,
    #[serde(rename = "K_f")]
    k_f: f64,
    #[serde(rename = "log_K_f")]
    log_k_f: f64,
    #[serde(rename = "Lambda_f")]
    lambda_f: f64,
    #[serde(with = "crate::serde_pair::vec")]
    roots: Vec<ComplexPoint>,
    rho_fallback: Vec<usize>,
    degenerate_near_multiple: bool,
}

impl CriticalProfile {
    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn critical_values(&self) -> Vec<ComplexPoint> {
        self.critical_points.iter().map(|c| c.v).collect()
    }

    pub fn multiplicity_sum(&self) -> usize {
        self.critical_points.iter().map(|c| c.m).sum()
    }

    /// Index of the root nearest `z`.
    pub fn nearest_root(&self, z: ComplexPoint) -> Option<usize> {
        (0..self.roots.len()).min_by(|&a, &b| {
            (self.roots[a] - z)
                .norm()
                .total_cmp(&(self.roots[b] - z).norm())
        })
    }

    pub fn ensure_matches(&self, p: &Polynomial) -> Result<()> {
        if self.poly_fingerprint == p.fingerprint() {
            Ok(())
        } else {
            Err(Error::ProfileMismatch)
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let json = ProfileJson {
            critical: self.critical_points.clone(),
            rho: self
                .rho
                .iter()
                .enumerate()
                .map(|(i, r)| (i.to_string(), *r))
                .collect(),
            k_f: self.k_f,
            log_k_f: self.log_k_f,
            lambda_f: self.lambda_f,
            roots: self.roots.clone(),
            rho_fallback: (0..self.rho.len()).filter(|&i| self.rho_fallback[i]).collect(),
            degenerate_near_multiple: self.degenerate_near_multiple,
        };
        serde_json::to_value(json).expect("profile fields are finite or serialize as null")
    }
}

/// How a segment lift ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentEnd {
    Reached(ComplexPoint),
    /// The lift ran into a critical point before the end of the segment.
    Collapsed { y: ComplexPoint, z: ComplexPoint },
}

fn newton_to_value(p: &Polynomial, mut z: ComplexPoint, y: ComplexPoint) -> ComplexPoint {
    for _ in 0..CORRECTOR_ITERATIONS {
        let (f, df) = p.eval_with_derivative(z);
        let step = (f - y) / df;
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        z -= step;
        if step.norm() <= 1e-15 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

/// Continues the branch of `f⁻¹` with `f(z0) = y0` along `[y0, y1]`.
pub fn lift_segment(
    p: &Polynomial,
    y0: ComplexPoint,
    z0: ComplexPoint,
    y1: ComplexPoint,
) -> Result<SegmentEnd> {
    let total = (y1 - y0).norm();
    if total == 0.0 {
        return Ok(SegmentEnd::Reached(z0));
    }
    let d = p.degree();
    let mut travelled = 0.0;
    let mut y = y0;
    let mut z = z0;
    for _ in 0..MAX_CONTINUATION_STEPS {
        let remaining = total - travelled;
        let taylor = p.taylor_coeffs(z, d);
        let reach = match alpha_gamma_from_taylor(&taylor) {
            Ok(a) if a.gamma > 0.0 => CONTINUATION_KAPPA * taylor[1].norm() / a.gamma,
            Ok(_) => f64::INFINITY,
            Err(_) => return Ok(SegmentEnd::Collapsed { y, z }),
        };
        if reach >= remaining {
            return Ok(SegmentEnd::Reached(newton_to_value(p, z, y1)));
        }
        if remaining <= COLLAPSE_FRACTION * total {
            return Ok(SegmentEnd::Collapsed { y, z });
        }
        travelled += reach;
        y = y0 + (y1 - y0) * (travelled / total);
        z = newton_to_value(p, z, y);
    }
    Err(Error::ContinuationStall {
        at: y,
        remaining: (total - travelled) / total,
    })
}

/// Radius of univalence of a branch of `f⁻¹` and the branch point that
/// realizes it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchRadius {
    pub radius: f64,
    /// Index into `profile.critical_points`; `None` for linear `f`.
    pub critical: Option<usize>,
    /// No critical value blocked; the radius is the distance to the nearest
    /// critical value, which can only underestimate.
    pub fallback: bool,
}

/// Radius of the largest disk about `y` on which the branch of `f⁻¹` taking
/// `y` to `z` is univalent.
pub fn branch_radius(
    p: &Polynomial,
    profile: &CriticalProfile,
    y: ComplexPoint,
    z: ComplexPoint,
) -> Result<BranchRadius> {
    let crit = &profile.critical_points;
    if crit.is_empty() {
        return Ok(BranchRadius {
            radius: f64::INFINITY,
            critical: None,
            fallback: false,
        });
    }
    let mut order: Vec<usize> = (0..crit.len()).collect();
    // stable sort: exact ties go to the lower index
    order.sort_by(|&a, &b| (crit[a].v - y).norm().total_cmp(&(crit[b].v - y).norm()));

    let mut tried: Vec<ComplexPoint> = Vec::new();
    for &k in &order {
        let v = crit[k].v;
        // several critical points over one value share a single test
        if tried.iter().any(|&u| (u - v).norm() <= DEGENERATE_VALUE_TOL) {
            continue;
        }
        tried.push(v);
        if let SegmentEnd::Collapsed { z: z_end, .. } = lift_segment(p, y, z, v)? {
            let tol = DEGENERATE_VALUE_TOL * v.norm().max(1.0);
            let hit = (0..crit.len())
                .filter(|&j| (crit[j].v - v).norm() <= tol)
                .min_by(|&a, &b| {
                    (crit[a].c - z_end)
                        .norm()
                        .total_cmp(&(crit[b].c - z_end).norm())
                })
                .unwrap_or(k);
            return Ok(BranchRadius {
                radius: (v - y).norm(),
                critical: Some(hit),
                fallback: false,
            });
        }
    }
    let k = order[0];
    Ok(BranchRadius {
        radius: (crit[k].v - y).norm(),
        critical: Some(k),
        fallback: true,
    })
}

/// Taylor coefficients of `q` about `c` (ascending).
fn taylor_of(coeffs: &[Complex64], c: Complex64) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    let mut a = coeffs.to_vec();
    for j in 0..d {
        for i in (j..d).rev() {
            let next = a[i + 1];
            a[i] += c * next;
        }
    }
    a
}

/// Tests whether `q` has a `k`-fold root at `c` to working precision: the
/// Taylor coefficients `a_0..a_{k−1}` at `c` must be at rounding level.
fn is_multiple_root(q: &[Complex64], c: Complex64, k: usize) -> bool {
    let a = taylor_of(q, c);
    let abs_q: Vec<Complex64> = q.iter().map(|x| Complex64::new(x.norm(), 0.0)).collect();
    let scale = taylor_of(&abs_q, Complex64::new(c.norm().max(1.0), 0.0));
    a[k].norm() > 0.0 && (0..k).all(|j| a[j].norm() <= MULTIPLE_ROOT_NOISE * scale[j].re)
}

/// Refines a `k`-fold root by Newton on `q^{(k−1)}`, where it is simple.
fn refine_multiple(q: &[Complex64], mut c: Complex64, k: usize) -> Complex64 {
    for _ in 0..8 {
        let a = taylor_of(q, c);
        // q^{(k-1)}(c)/(k-1)! = a[k-1], its derivative over (k-1)! is k·a[k]
        let step = a[k - 1] / (a[k] * k as f64);
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        c -= step;
        if step.norm() <= 1e-16 {
            break;
        }
    }
    c
}

/// Groups oracle roots of `f'/d` into critical points with multiplicity.
///
/// A `k`-fold root comes back from the oracle as `k` points scattered over
/// roughly `ε^{1/k}`, so candidate groups are the `k` nearest neighbours of a
/// point within a loose radius, largest `k` first, and a group is accepted
/// only if its refined centre passes the multiplicity test.
fn cluster_critical_points(q: &[Complex64], raw: &[Complex64]) -> Vec<(Complex64, usize)> {
    let n = raw.len();
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let mut near: Vec<usize> = (0..n)
            .filter(|&j| !assigned[j] && (raw[j] - raw[i]).norm() <= CLUSTER_SEARCH_RADIUS)
            .collect();
        near.sort_by(|&a, &b| {
            (raw[a] - raw[i])
                .norm()
                .total_cmp(&(raw[b] - raw[i]).norm())
                .then(a.cmp(&b))
        });
        let mut found = (raw[i], 1, vec![i]);
        for k in (2..=near.len()).rev() {
            let members = &near[..k];
            let centroid = members.iter().map(|&j| raw[j]).sum::<Complex64>() / k as f64;
            let centre = refine_multiple(q, centroid, k);
            if is_multiple_root(q, centre, k) {
                found = (centre, k, members.to_vec());
                break;
            }
        }
        for &j in &found.2 {
            assigned[j] = true;
        }
        out.push((found.0, found.1));
    }
    out.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    out
}

/// Critical points with multiplicities, critical values, `ρ_ζ` and `K_f`.
pub fn critical_profile(p: &Polynomial) -> Result<CriticalProfile> {
    let roots = p.roots_or_solve()?;
    let d = p.degree();
    let critical_points = match p.monic_derivative() {
        None => Vec::new(),
        Some(q) => {
            let raw = roots::solve(q.coeffs())?;
            cluster_critical_points(q.coeffs(), &raw)
                .into_iter()
                .map(|(c, m)| CriticalPoint { c, m, v: p.eval(c) })
                .collect()
        }
    };
    let mut degenerate = false;
    for (i, a) in critical_points.iter().enumerate() {
        for b in &critical_points[i + 1..] {
            if (a.v - b.v).norm() <= DEGENERATE_VALUE_TOL {
                degenerate = true;
            }
        }
    }

    let mut profile = CriticalProfile {
        critical_points,
        roots: roots.clone(),
        rho: Vec::new(),
        rho_fallback: Vec::new(),
        k_f: 1.0,
        log_k_f: 0.0,
        lambda_f: 0.0,
        degenerate_near_multiple: degenerate,
        poly_fingerprint: p.fingerprint(),
    };
    if d >= 2 {
        for &zeta in &roots {
            let b = branch_radius(p, &profile, Complex64::new(0.0, 0.0), zeta)?;
            profile.rho.push(b.radius);
            profile.rho_fallback.push(b.fallback);
        }
        profile.log_k_f = -profile.rho.iter().map(|r| r.ln()).sum::<f64>();
        profile.k_f = profile.log_k_f.exp();
        profile.lambda_f = 2.0 * profile.log_k_f.abs() / d as f64;
    }
    Ok(profile)
}

/// `ρ_ζ` for a root `ζ` of `p`.
pub fn rho_of_root(p: &Polynomial, profile: &CriticalProfile, zeta: ComplexPoint) -> Result<f64> {
    profile.ensure_matches(p)?;
    let residual = p.eval(zeta).norm();
    if !(residual < 1e-10) {
        return Err(Error::NotARoot(zeta, residual));
    }
    if p.degree() < 2 {
        return Err(Error::InvalidArgument("ρ needs degree at least 2".into()));
    }
    Ok(branch_radius(p, profile, Complex64::new(0.0, 0.0), zeta)?.radius)
}

/// Smallest positive `s` with `8πs = C(1 − s)²`, capped at 1/4 for `C > 2π`.
pub fn s_r_constant(c: f64) -> f64 {
    if c > TAU {
        return 0.25;
    }
    // s² − (2 + 8π/C)s + 1 = 0; the product of the roots is 1
    let b = 2.0 + 8.0 * PI / c;
    let large = 0.5 * (b + (b * b - 4.0).sqrt());
    1.0 / large
}

/// `d Arg f(re^{2πit}) / dt = 2π Re Σ z/(z − ζ_j)`.
pub fn arg_speed(p: &Polynomial, r: f64, t: f64) -> Result<f64> {
    let roots = p.roots().ok_or(Error::RootsUnknown)?;
    let z = Complex64::from_polar(r, TAU * t);
    Ok(TAU * roots.iter().map(|&zeta| (z / (z - zeta)).re).sum::<f64>())
}

/// Trapezoid quadrature of the argument speed over one turn; `2πd` exactly
/// when all roots lie inside the circle.
pub fn winding_quadrature(p: &Polynomial, r: f64, nodes: usize) -> Result<f64> {
    let mut sum = 0.0;
    for k in 0..nodes {
        sum += arg_speed(p, r, k as f64 / nodes as f64)?;
    }
    Ok(sum / nodes as f64)
}

/// One node of a walk along a target-plane segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkNode {
    /// Position along the segment in `[0, 1]`.
    pub s: f64,
    pub y: ComplexPoint,
    pub z: ComplexPoint,
    pub radius: f64,
    pub cell: Option<usize>,
}

/// The lift of a segment `[y_start, y_end]` sampled densely enough to see
/// every Voronoi cell it crosses.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentWalk {
    pub y_start: ComplexPoint,
    pub y_end: ComplexPoint,
    pub nodes: Vec<WalkNode>,
    /// Some node radius came from the fallback rather than a blocking test.
    pub flagged: bool,
}

impl SegmentWalk {
    /// Critical indices whose cells the walk visits, ascending.
    pub fn cells(&self) -> Vec<usize> {
        let mut cells: Vec<usize> = self.nodes.iter().filter_map(|n| n.cell).collect();
        cells.sort_unstable();
        cells.dedup();
        cells
    }

    /// Distance from `y(s)` to its nearest visible branch point, and whether
    /// `s` falls in an unresolved boundary interval.
    pub fn radius_at(&self, s: f64, profile: &CriticalProfile) -> (f64, bool) {
        let y = self.y_start + (self.y_end - self.y_start) * s;
        let i = self.nodes.partition_point(|n| n.s <= s);
        let left = self.nodes[i.saturating_sub(1)];
        let right = self.nodes[i.min(self.nodes.len() - 1)];
        let dist = |cell: Option<usize>| match cell {
            Some(c) => (profile.critical_points[c].v - y).norm(),
            None => f64::INFINITY,
        };
        if left.cell == right.cell {
            (dist(left.cell), false)
        } else {
            (dist(left.cell).min(dist(right.cell)), true)
        }
    }

    /// The lifted point over `y(s)`, continued from the nearest node.
    pub fn lift_at(&self, p: &Polynomial, s: f64) -> Result<ComplexPoint> {
        let i = self.nodes.partition_point(|n| n.s <= s).saturating_sub(1);
        let node = self.nodes[i];
        let y = self.y_start + (self.y_end - self.y_start) * s;
        match lift_segment(p, node.y, node.z, y)? {
            SegmentEnd::Reached(z) => Ok(z),
            SegmentEnd::Collapsed { y, .. } => Err(Error::ContinuationStall {
                at: y,
                remaining: 0.0,
            }),
        }
    }
}

fn walk_node(
    p: &Polynomial,
    profile: &CriticalProfile,
    s: f64,
    y: ComplexPoint,
    z: ComplexPoint,
    flagged: &mut bool,
) -> Result<WalkNode> {
    let b = branch_radius(p, profile, y, z)?;
    *flagged |= b.fallback;
    Ok(WalkNode {
        s,
        y,
        z,
        radius: b.radius,
        cell: b.critical,
    })
}

fn lift_between(p: &Polynomial, from: &WalkNode, y: ComplexPoint) -> Result<ComplexPoint> {
    match lift_segment(p, from.y, from.z, y)? {
        SegmentEnd::Reached(z) => Ok(z),
        SegmentEnd::Collapsed { y, .. } => Err(Error::ContinuationStall {
            at: y,
            remaining: 0.0,
        }),
    }
}

/// Walks the lift of `[y_start, y_end]` that starts at `z_start`.
pub fn walk_segment(
    p: &Polynomial,
    profile: &CriticalProfile,
    y_start: ComplexPoint,
    z_start: ComplexPoint,
    y_end: ComplexPoint,
) -> Result<SegmentWalk> {
    let length = (y_end - y_start).norm();
    let at = |s: f64| y_start + (y_end - y_start) * s;
    let mut flagged = false;
    let first = walk_node(p, profile, 0.0, y_start, z_start, &mut flagged)?;
    let mut nodes = vec![first];
    if length == 0.0 {
        return Ok(SegmentWalk {
            y_start,
            y_end,
            nodes,
            flagged,
        });
    }

    let mut current = first;
    while current.s < 1.0 {
        if nodes.len() > MAX_WALK_NODES || !(current.radius > 1e-14 * length) {
            return Err(Error::ContinuationStall {
                at: current.y,
                remaining: 1.0 - current.s,
            });
        }
        let s_next = (current.s + WALK_STEP_FRACTION * current.radius / length).min(1.0);
        let y_next = if s_next == 1.0 { y_end } else { at(s_next) };
        let z_next = lift_between(p, &current, y_next)?;
        let next = walk_node(p, profile, s_next, y_next, z_next, &mut flagged)?;
        if next.cell != current.cell {
            refine_boundary(p, profile, &current, &next, &at, &mut nodes, &mut flagged, 0)?;
        }
        nodes.push(next);
        current = next;
    }
    Ok(SegmentWalk {
        y_start,
        y_end,
        nodes,
        flagged,
    })
}

/// Bisects between two nodes in different cells, pushing interior nodes in
/// order so that every crossed cell shows up.
#[allow(clippy::too_many_arguments)]
fn refine_boundary(
    p: &Polynomial,
    profile: &CriticalProfile,
    a: &WalkNode,
    b: &WalkNode,
    at: &dyn Fn(f64) -> ComplexPoint,
    nodes: &mut Vec<WalkNode>,
    flagged: &mut bool,
    depth: usize,
) -> Result<()> {
    if b.s - a.s <= BOUNDARY_RESOLUTION || depth > 40 {
        return Ok(());
    }
    let s = 0.5 * (a.s + b.s);
    let y = at(s);
    let z = lift_between(p, a, y)?;
    let mid = walk_node(p, profile, s, y, z, flagged)?;
    if mid.cell != a.cell {
        refine_boundary(p, profile, a, &mid, at, nodes, flagged, depth + 1)?;
    }
    nodes.push(mid);
    if mid.cell != b.cell {
        refine_boundary(p, profile, &mid, b, at, nodes, flagged, depth + 1)?;
    }
    Ok(())
}

/// `Arg(v / w0)` in `(−π, π]`.
pub fn relative_angle(v: ComplexPoint, w0: ComplexPoint) -> f64 {
    let theta = (v / w0).arg();
    if theta <= -PI {
        PI
    } else {
        theta
    }
}

/// `log((4 + tan|θ|)/(sec|θ| − 1))`, the per-value term of the pointwise
/// cost estimate. Infinite at `θ = 0`.
pub fn angle_log_term(theta: f64) -> f64 {
    let a = theta.abs();
    ((4.0 + a.tan()) / (1.0 / a.cos() - 1.0)).ln()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayProbe {
    /// Start angle actually used (nudged if the ray hit a critical value).
    pub t: f64,
    #[serde(with = "crate::serde_pair")]
    pub z0: ComplexPoint,
    #[serde(with = "crate::serde_pair")]
    pub w0: ComplexPoint,
    /// `(critical index, θ)` for every critical point.
    pub theta_per_critical: Vec<(usize, f64)>,
    /// Critical points whose Voronoi cell the lifted ray enters.
    pub influenced: Vec<usize>,
    pub beta: usize,
    pub beta_plus: usize,
    /// The walk stalled; `influenced` holds what was seen before the stall.
    pub partial: bool,
    /// Some node radius came from the non-blocking fallback.
    pub flagged: bool,
}

impl RayProbe {
    pub fn theta_of(&self, c: usize) -> f64 {
        self.theta_per_critical
            .iter()
            .find(|(k, _)| *k == c)
            .map(|(_, t)| *t)
            .unwrap_or(f64::NAN)
    }

    /// `Σ_{c∈ℐ_t, |θ_c|<π/2} log((4 + tan|θ_c|)/(sec|θ_c| − 1))`.
    pub fn angle_log_sum(&self) -> f64 {
        self.influenced
            .iter()
            .map(|&c| self.theta_of(c))
            .filter(|t| t.abs() < FRAC_PI_2)
            .map(angle_log_term)
            .sum()
    }
}

fn ray_hits_critical_value(profile: &CriticalProfile, w0: ComplexPoint) -> bool {
    let scale = w0.norm();
    profile.critical_points.iter().any(|c| {
        // distance from v to the segment [0, w0]
        let s = ((c.v * w0.conj()).re / (scale * scale)).clamp(0.0, 1.0);
        (c.v - w0 * s).norm() <= RAY_AVOIDANCE * scale
    })
}

/// Start on the circle `|z| = 1 + C/d` at angle `t`, nudged until the ray
/// `[f(z0), 0]` misses every critical value and `z0` is not singular.
pub fn regular_start(
    p: &Polynomial,
    profile: &CriticalProfile,
    t: f64,
    circle_offset: f64,
) -> (f64, ComplexPoint) {
    let mut t = t;
    for _ in 0..64 {
        let z0 = choose_start(p.degree(), t, circle_offset);
        let (f, df) = p.eval_with_derivative(z0);
        if f.norm() > 0.0 && df.norm() > 0.0 && !ray_hits_critical_value(profile, f) {
            return (t, z0);
        }
        t += ANGLE_NUDGE;
    }
    (t, choose_start(p.degree(), t, circle_offset))
}

/// Walks the lifted ray `[w0, 0]` from the start at angle `t`.
pub fn walk_ray(
    p: &Polynomial,
    profile: &CriticalProfile,
    z0: ComplexPoint,
) -> Result<SegmentWalk> {
    walk_segment(p, profile, p.eval(z0), z0, Complex64::new(0.0, 0.0))
}

/// Influence set `ℐ_t`, angles, `β` and `β⁺` for the start at angle `t`.
pub fn ray_probe(
    p: &Polynomial,
    t: f64,
    circle_offset: f64,
    profile: &CriticalProfile,
) -> Result<RayProbe> {
    profile.ensure_matches(p)?;
    let (t, z0) = regular_start(p, profile, t, circle_offset);
    let w0 = p.eval(z0);
    let (influenced, partial, flagged) = match walk_ray(p, profile, z0) {
        Ok(walk) => (walk.cells(), false, walk.flagged),
        Err(Error::ContinuationStall { .. }) => (Vec::new(), true, true),
        Err(e) => return Err(e),
    };
    Ok(probe_from_cells(profile, t, z0, w0, influenced, partial, flagged))
}

fn probe_from_cells(
    profile: &CriticalProfile,
    t: f64,
    z0: ComplexPoint,
    w0: ComplexPoint,
    influenced: Vec<usize>,
    partial: bool,
    flagged: bool,
) -> RayProbe {
    let theta_per_critical: Vec<(usize, f64)> = profile
        .critical_points
        .iter()
        .enumerate()
        .map(|(k, c)| (k, relative_angle(c.v, w0)))
        .collect();
    let beta_plus = influenced
        .iter()
        .filter(|&&c| theta_per_critical[c].1.abs() < FRAC_PI_2)
        .count();
    RayProbe {
        t,
        z0,
        w0,
        theta_per_critical,
        beta: influenced.len(),
        beta_plus,
        influenced,
        partial,
        flagged,
    }
}

/// Per-critical-point counts of how many of the `d` lifts of `[y, 0]` enter
/// that point's Voronoi cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoronoiCounts {
    #[serde(with = "crate::serde_pair")]
    pub y: ComplexPoint,
    pub counts: Vec<usize>,
    pub multiplicities: Vec<usize>,
    /// Some lift stalled or relied on the fallback radius.
    pub flagged: bool,
}

impl VoronoiCounts {
    /// Every count is at most `m + 1`.
    pub fn within_bound(&self) -> bool {
        self.counts
            .iter()
            .zip(&self.multiplicities)
            .all(|(&n, &m)| n <= m + 1)
    }
}

pub fn voronoi_multiplicity_probe(
    p: &Polynomial,
    y: ComplexPoint,
    profile: &CriticalProfile,
) -> Result<VoronoiCounts> {
    profile.ensure_matches(p)?;
    if y.norm() == 0.0 || profile.critical_points.iter().any(|c| c.v == y) {
        return Err(Error::InvalidArgument(
            "y must be nonzero and not a critical value".into(),
        ));
    }
    let preimages = roots::solve(p.shifted(y).coeffs())?;
    let n = profile.critical_points.len();
    let mut counts = vec![0; n];
    let mut flagged = false;
    for &zi in &preimages {
        match walk_segment(p, profile, y, zi, Complex64::new(0.0, 0.0)) {
            Ok(walk) => {
                flagged |= walk.flagged;
                for c in walk.cells() {
                    counts[c] += 1;
                }
            }
            Err(Error::ContinuationStall { .. }) => flagged = true,
            Err(e) => return Err(e),
        }
    }
    Ok(VoronoiCounts {
        y,
        counts,
        multiplicities: profile.critical_points.iter().map(|c| c.m).collect(),
        flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn quarter() -> Polynomial {
        Polynomial::from_roots(&[c(0.5, 0.0), c(-0.5, 0.0)]).unwrap()
    }

    fn cubic() -> Polynomial {
        let s = 0.9;
        Polynomial::from_roots(&[c(0.0, 0.0), c(s, 0.0), c(-s, 0.0)]).unwrap()
    }

    #[test]
    fn quarter_profile() {
        let p = quarter();
        let prof = critical_profile(&p).unwrap();
        assert_eq!(prof.critical_points.len(), 1);
        let cp = prof.critical_points[0];
        assert!(cp.c.norm() < 1e-12);
        assert_eq!(cp.m, 1);
        assert!((cp.v - c(-0.25, 0.0)).norm() < 1e-12);
        for r in &prof.rho {
            assert!((r - 0.25).abs() < 1e-12);
        }
        assert!((prof.k_f - 16.0).abs() < 1e-9);
        assert!((prof.lambda_f - 16f64.ln()).abs() < 1e-10);
        assert!(!prof.degenerate_near_multiple);
    }

    #[test]
    fn cubic_profile() {
        let p = cubic();
        let prof = critical_profile(&p).unwrap();
        let s = 0.27f64.sqrt();
        assert_eq!(prof.critical_points.len(), 2);
        assert!((prof.critical_points[0].c - c(-s, 0.0)).norm() < 1e-12);
        assert!((prof.critical_points[1].c - c(s, 0.0)).norm() < 1e-12);
        let v = (s * s * s - 0.81 * s).abs();
        let i0 = prof.roots.iter().position(|z| z.norm() < 1e-12).unwrap();
        assert!((prof.rho[i0] - v).abs() < 1e-10);
        assert!((rho_of_root(&p, &prof, c(0.0, 0.0)).unwrap() - 0.2806).abs() < 1e-4);
        // the outer roots are blocked by the value on their own side
        for (i, r) in prof.roots.iter().enumerate() {
            if i != i0 {
                assert!((prof.rho[i] - v).abs() < 1e-10, "{r}");
            }
        }
    }

    #[test]
    fn designed_triple_critical_point() {
        let p = Polynomial::from_roots(&[c(0.5, 0.0), c(-0.5, 0.0), c(0.0, 0.5), c(0.0, -0.5)])
            .unwrap();
        let prof = critical_profile(&p).unwrap();
        assert_eq!(prof.critical_points.len(), 1);
        assert_eq!(prof.critical_points[0].m, 3);
        assert!(prof.critical_points[0].c.norm() < 1e-10);
        assert_eq!(prof.multiplicity_sum(), 3);
        for r in &prof.rho {
            assert!((r - 0.0625).abs() < 1e-10);
        }
    }

    #[test]
    fn high_multiplicity_critical_point() {
        let roots: Vec<_> = (0..8)
            .map(|k| Complex64::from_polar(0.9, TAU * k as f64 / 8.0))
            .collect();
        let p = Polynomial::from_roots(&roots).unwrap();
        let prof = critical_profile(&p).unwrap();
        assert_eq!(prof.critical_points.len(), 1);
        assert_eq!(prof.critical_points[0].m, 7);
        assert!(!prof.degenerate_near_multiple);
        let v = 0.9f64.powi(8);
        assert!(prof.rho.iter().all(|r| (r - v).abs() < 1e-10));
    }

    #[test]
    fn nearly_merged_simple_points() {
        // separation well under the merge tolerance collapses to m = 2
        let a = 1e-9;
        let q = [c(-a * a, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let raw = roots::solve(&q).unwrap();
        assert_eq!(cluster_critical_points(&q, &raw), vec![(c(0.0, 0.0), 2)]);
    }

    #[test]
    fn close_distinct_critical_points_stay_apart() {
        // f' ∝ (z − a)(z + a) with a = 1e-5
        let a = 1e-5;
        let q = [c(-a * a, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let raw = roots::solve(&q).unwrap();
        let out = cluster_critical_points(&q, &raw);
        assert_eq!(out.len(), 2);
        assert!(out.iter().all(|&(_, m)| m == 1));
    }

    #[test]
    fn linear_profile_is_empty() {
        let p = Polynomial::from_roots(&[c(0.2, 0.1)]).unwrap();
        let prof = critical_profile(&p).unwrap();
        assert!(prof.critical_points.is_empty());
        assert!(prof.rho.is_empty());
        assert_eq!(prof.k_f, 1.0);
        assert_eq!(prof.lambda_f, 0.0);
        let probe = ray_probe(&p, 0.3, 1.0, &prof).unwrap();
        assert_eq!((probe.beta, probe.beta_plus), (0, 0));
    }

    #[test]
    fn s_r_values() {
        let s1 = s_r_constant(1.0);
        assert!((s1 - 0.0369).abs() < 1e-4 && s1 > 1.0 / 28.0);
        assert!((s_r_constant(TAU) - (3.0 - 8f64.sqrt())).abs() < 1e-12);
        assert_eq!(s_r_constant(7.0), 0.25);
        for cc in [0.1, 1.0, 5.0] {
            let s = s_r_constant(cc);
            assert!((8.0 * PI * s / ((1.0 - s) * (1.0 - s)) - cc).abs() < 1e-10);
        }
    }

    #[test]
    fn argument_speed() {
        let p = quarter();
        assert!((arg_speed(&p, 1.5, 0.0).unwrap() - TAU * 2.25).abs() < 1e-12);
        let lin = Polynomial::from_roots(&[c(0.0, 0.0)]).unwrap();
        assert!((arg_speed(&lin, 3.0, 0.7).unwrap() - TAU).abs() < 1e-12);
        let coeffs_only = Polynomial::from_coeffs(p.coeffs().to_vec()).unwrap();
        assert_eq!(arg_speed(&coeffs_only, 1.5, 0.0), Err(Error::RootsUnknown));
        assert!((winding_quadrature(&p, 1.5, 1024).unwrap() - 2.0 * TAU).abs() < 1e-9);
    }

    #[test]
    fn quarter_ray_probes() {
        let p = quarter();
        let prof = critical_profile(&p).unwrap();
        let probe = ray_probe(&p, 0.0, 1.0, &prof).unwrap();
        assert_eq!(probe.beta, 1);
        assert!((probe.theta_of(0) - PI).abs() < 1e-12);
        assert_eq!(probe.beta_plus, 0);

        // w0 = -2.5 puts the critical value on the ray, so t is nudged
        let probe = ray_probe(&p, 0.25, 1.0, &prof).unwrap();
        assert!(probe.t > 0.25 && probe.t < 0.25 + 1e-6);
        assert!((probe.w0 - c(-2.5, 0.0)).norm() < 1e-6);
        assert!(probe.theta_of(0).abs() < 1e-6);
        assert_eq!((probe.beta, probe.beta_plus), (1, 1));
        assert!(!probe.partial);
    }

    #[test]
    fn branch_radius_matches_direct_geometry() {
        // for z² − 1/4 every branch is blocked only by −1/4
        let p = quarter();
        let prof = critical_profile(&p).unwrap();
        let y = c(0.3, 0.7);
        let z = (y + 0.25).sqrt();
        let b = branch_radius(&p, &prof, y, z).unwrap();
        assert!((b.radius - (y + 0.25).norm()).abs() < 1e-12);
        assert_eq!(b.critical, Some(0));
        assert!(!b.fallback);
    }

    #[test]
    fn voronoi_counts() {
        let p = quarter();
        let prof = critical_profile(&p).unwrap();
        let v = voronoi_multiplicity_probe(&p, c(1.0, 0.0), &prof).unwrap();
        assert_eq!(v.counts, vec![2]);
        assert!(v.within_bound());

        let p4 = Polynomial::from_roots(&[c(0.5, 0.0), c(-0.5, 0.0), c(0.0, 0.5), c(0.0, -0.5)])
            .unwrap();
        let prof4 = critical_profile(&p4).unwrap();
        let v4 = voronoi_multiplicity_probe(&p4, c(1.0, 0.0), &prof4).unwrap();
        assert!(v4.counts[0] <= 4);
        assert!(v4.within_bound());
    }

    #[test]
    fn profile_json_layout() {
        let p = quarter();
        let v = critical_profile(&p).unwrap().to_json_value();
        assert!(v["critical"][0]["c"].is_array());
        assert_eq!(v["critical"][0]["m"], 1);
        assert!((v["rho"]["0"].as_f64().unwrap() - 0.25).abs() < 1e-12);
        assert!((v["K_f"].as_f64().unwrap() - 16.0).abs() < 1e-9);
        assert!(v["Lambda_f"].is_number());
    }

    #[test]
    fn mismatched_profile_rejected() {
        let prof = critical_profile(&quarter()).unwrap();
        assert_eq!(
            ray_probe(&cubic(), 0.1, 1.0, &prof),
            Err(Error::ProfileMismatch)
        );
    }
}
