//! Smale's point estimates: `α(z)`, `γ(z)`, the Newton operator and the
//! approximate-zero certificate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{ensure_finite, ComplexPoint, Polynomial};

/// Working certification threshold used by the solver's stopping rule.
pub const ALPHA_THRESHOLD: f64 = 0.1307;

/// `|f'(z)|` at or below this is treated as a critical point.
pub const CRITICAL_GUARD: f64 = 1e-300;

/// Derivative magnitudes below this contribute nothing to `γ`.
const UNDERFLOW_GUARD: f64 = 1e-300;

/// Absolute floor below which Newton increments count as converged.
pub const CONTRACTION_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaData {
    pub alpha: f64,
    pub gamma: f64,
    /// `|f(z)/f'(z)|`, the length of the Newton step.
    pub beta_newton: f64,
    /// The derivative order attaining the max in `γ`; 0 for linear input.
    pub argmax_j: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(with = "crate::serde_pair")]
    pub point: ComplexPoint,
    pub alpha_value: f64,
    pub threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_id: Option<String>,
}

/// `α`, `γ` from Taylor coefficients `b_j = f^(j)(z)/j!`.
///
/// This path does not assume a monic polynomial, so it also serves scaled
/// polynomials `λ·f`.
pub fn alpha_gamma_from_taylor(taylor: &[ComplexPoint]) -> Result<AlphaData> {
    if taylor.len() < 2 {
        return Err(Error::EmptyInput);
    }
    let f = taylor[0];
    let df = taylor[1];
    let df_abs = df.norm();
    if !(df_abs > CRITICAL_GUARD) {
        return Err(Error::CriticalPointInput(df_abs));
    }
    let mut gamma = 0.0;
    let mut argmax_j = 0;
    for (j, b) in taylor.iter().enumerate().skip(2) {
        let magnitude = b.norm();
        if magnitude < UNDERFLOW_GUARD {
            continue;
        }
        // |b_j / f'|^(1/(j-1)) through logs so large j cannot overflow
        let term = ((magnitude.ln() - df_abs.ln()) / (j - 1) as f64).exp();
        if term > gamma {
            gamma = term;
            argmax_j = j;
        }
    }
    let beta_newton = f.norm() / df_abs;
    Ok(AlphaData {
        alpha: beta_newton * gamma,
        gamma,
        beta_newton,
        argmax_j,
    })
}

pub fn alpha_gamma(p: &Polynomial, z: ComplexPoint) -> Result<AlphaData> {
    ensure_finite(z, "evaluation point")?;
    alpha_gamma_from_taylor(&p.taylor_coeffs(z, p.degree()))
}

/// `φ_d(x) = Σ_{i=0}^d x^i` and its derivative.
fn phi_and_derivative(d: usize, x: f64) -> (f64, f64) {
    let mut phi = 0.0;
    let mut dphi = 0.0;
    for _ in 0..=d {
        dphi = dphi * x + phi;
        phi = phi * x + 1.0;
    }
    (phi, dphi)
}

/// Derivative-free bound `γ(z) < ‖f‖ φ_d'(|z|)² / (|f'(z)| φ_d(|z|))`.
pub fn gamma_upper_bound(p: &Polynomial, z: ComplexPoint) -> Result<f64> {
    ensure_finite(z, "evaluation point")?;
    let (_, df) = p.eval_with_derivative(z);
    let df_abs = df.norm();
    if !(df_abs > CRITICAL_GUARD) {
        return Err(Error::CriticalPointInput(df_abs));
    }
    let (phi, dphi) = phi_and_derivative(p.degree(), z.norm());
    Ok(p.sup_coeff_norm() * dphi * dphi / (df_abs * phi))
}

/// Certificate iff `α(z) ≤ 0.1307`; `Ok(None)` is a rejection.
pub fn certify(p: &Polynomial, z: ComplexPoint) -> Result<Option<Certificate>> {
    let data = alpha_gamma(p, z)?;
    Ok((data.alpha <= ALPHA_THRESHOLD).then_some(Certificate {
        point: z,
        alpha_value: data.alpha,
        threshold: ALPHA_THRESHOLD,
        trace_id: None,
    }))
}

pub fn newton_step(p: &Polynomial, z: ComplexPoint) -> Result<ComplexPoint> {
    ensure_finite(z, "evaluation point")?;
    let (f, df) = p.eval_with_derivative(z);
    if !(df.norm() > CRITICAL_GUARD) {
        return Err(Error::CriticalPointInput(df.norm()));
    }
    Ok(z - f / df)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub holds: bool,
    /// `|z_{n+1} − z_n| / ((1/2)^(2^n − 1) |z_1 − z_0|)` for `n = 1..steps-1`.
    pub ratios: Vec<f64>,
    pub increments: Vec<f64>,
}

/// Checks `|z_{n+1} − z_n| ≤ (1/2)^(2^n − 1) |z_1 − z_0|` along the Newton
/// orbit, treating increments below [`CONTRACTION_FLOOR`] as satisfied.
pub fn verify_quadratic_contraction(
    p: &Polynomial,
    z0: ComplexPoint,
    steps: usize,
) -> Result<ContractionReport> {
    if steps < 2 {
        return Err(Error::InvalidArgument("need at least two Newton steps".into()));
    }
    let mut z = z0;
    let mut increments = Vec::with_capacity(steps);
    for n in 0..steps {
        let next = newton_step(p, z).map_err(|e| match e {
            Error::CriticalPointInput(_) => Error::CriticalPointEncountered(n),
            other => other,
        })?;
        increments.push((next - z).norm());
        z = next;
    }
    let first = increments[0];
    let mut holds = true;
    let mut ratios = Vec::with_capacity(steps - 1);
    for (n, &inc) in increments.iter().enumerate().skip(1) {
        // 2^n - 1 grows fast; powi saturates to 0 which is what we want
        let exponent = (1u64 << n.min(62)) - 1;
        let allowed = 0.5f64.powf(exponent as f64) * first;
        let ratio = if allowed > 0.0 {
            inc / allowed
        } else if inc == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        ratios.push(ratio);
        if inc > allowed && inc > CONTRACTION_FLOOR {
            holds = false;
        }
    }
    Ok(ContractionReport {
        holds,
        ratios,
        increments,
    })
}

fn alpha0_equation(r: f64) -> f64 {
    let q = 2.0 * r * r - 4.0 * r + 1.0;
    q * q - 2.0 * r
}

/// The root of `(2r² − 4r + 1)² − 2r = 0` in `[0.13, 0.14]`, by bisection.
pub fn alpha0_constant() -> f64 {
    let (mut lo, mut hi) = (0.13, 0.14);
    // g(lo) > 0 > g(hi)
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if alpha0_equation(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `ψ(u) = 1 − 4u + 2u²`.
pub fn psi(u: f64) -> f64 {
    1.0 - 4.0 * u + 2.0 * u * u
}

/// Left side of the step-size induction condition
/// `(A+c)² / ψ(A+c)² · (1/c)`; it must stay below one.
pub fn induction_margin(jump_coefficient: f64, c: f64) -> f64 {
    let u = jump_coefficient + c;
    u * u / (psi(u) * psi(u)) / c
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn quarter() -> Polynomial {
        Polynomial::from_roots(&[c(0.5, 0.0), c(-0.5, 0.0)]).unwrap()
    }

    #[test]
    fn alpha_gamma_examples() {
        let lin = Polynomial::from_roots(&[c(0.3, 0.2)]).unwrap();
        let a = alpha_gamma(&lin, c(2.0, -1.0)).unwrap();
        assert_eq!((a.alpha, a.gamma, a.argmax_j), (0.0, 0.0, 0));

        // γ = |2 / (2·2)| = 0.5, β = 0.75/2, α = 0.1875
        let a = alpha_gamma(&quarter(), c(1.0, 0.0)).unwrap();
        assert!((a.gamma - 0.5).abs() < 1e-15);
        assert!((a.beta_newton - 0.375).abs() < 1e-15);
        assert!((a.alpha - 0.1875).abs() < 1e-15);
        assert_eq!(a.argmax_j, 2);

        let a = alpha_gamma(&quarter(), c(0.5, 0.0)).unwrap();
        assert_eq!(a.alpha, 0.0);

        assert!(matches!(
            alpha_gamma(&quarter(), c(0.0, 0.0)),
            Err(Error::CriticalPointInput(_))
        ));
    }

    #[test]
    fn gamma_bound_examples() {
        // ‖f‖ = 1, φ₂(1.5) = 4.75, φ₂'(1.5) = 4, |f'| = 3
        let b = gamma_upper_bound(&quarter(), c(1.5, 0.0)).unwrap();
        assert!((b - 16.0 / (3.0 * 4.75)).abs() < 1e-14);
        let g = alpha_gamma(&quarter(), c(1.5, 0.0)).unwrap().gamma;
        assert!((g - 1.0 / 3.0).abs() < 1e-15);
        assert!(g <= b);

        let lin = Polynomial::from_roots(&[c(0.4, 0.0)]).unwrap();
        let b = gamma_upper_bound(&lin, c(0.7, 0.0)).unwrap();
        assert!(b > 0.0);
    }

    #[test]
    fn certify_examples() {
        assert!(certify(&quarter(), c(0.5001, 0.0)).unwrap().is_some());
        assert!(certify(&quarter(), c(1.0, 0.0)).unwrap().is_none());
        let lin = Polynomial::from_roots(&[c(-0.1, 0.9)]).unwrap();
        let cert = certify(&lin, c(5.0, 5.0)).unwrap().unwrap();
        assert_eq!(cert.alpha_value, 0.0);
        assert_eq!(cert.threshold, ALPHA_THRESHOLD);
    }

    #[test]
    fn newton_examples() {
        assert!((newton_step(&quarter(), c(1.0, 0.0)).unwrap() - c(0.625, 0.0)).norm() < 1e-15);
        assert_eq!(newton_step(&quarter(), c(0.5, 0.0)).unwrap(), c(0.5, 0.0));
        let a = c(0.25, -0.5);
        let lin = Polynomial::from_roots(&[a]).unwrap();
        assert!((newton_step(&lin, c(3.0, 4.0)).unwrap() - a).norm() < 1e-15);
    }

    #[test]
    fn contraction_examples() {
        let r = verify_quadratic_contraction(&quarter(), c(0.52, 0.01), 5).unwrap();
        assert!(r.holds);
        assert_eq!(r.ratios.len(), 4);

        let lin = Polynomial::from_roots(&[c(0.1, 0.1)]).unwrap();
        let r = verify_quadratic_contraction(&lin, c(-3.0, 2.0), 4).unwrap();
        assert!(r.holds);
        assert!(r.increments[1..].iter().all(|&i| i < 1e-15));

        // rejected point: the chain is evaluated and reported either way
        let r = verify_quadratic_contraction(&quarter(), c(1.0, 0.0), 5).unwrap();
        assert_eq!(r.increments.len(), 5);

        assert!(matches!(
            verify_quadratic_contraction(&quarter(), c(0.0, 0.0), 3),
            Err(Error::CriticalPointEncountered(0))
        ));
        assert!(verify_quadratic_contraction(&quarter(), c(1.0, 0.0), 1).is_err());
    }

    #[test]
    fn alpha0_root() {
        let r = alpha0_constant();
        assert!((r - 0.13071694).abs() < 1e-7);
        assert!(alpha0_equation(r).abs() < 1e-12);
        assert!(r > ALPHA_THRESHOLD);
    }

    #[test]
    fn induction_margin_below_one() {
        let m = induction_margin(1.0 / 15.0, 0.0158);
        assert!((m - 0.9207).abs() < 1e-3, "{m}");
        assert!(m < 1.0);
        // and A + c stays below 1 - 1/sqrt(2)
        let (a, c) = (std::hint::black_box(1.0 / 15.0), std::hint::black_box(0.0158));
        assert!(a + c < 1.0 - std::f64::consts::FRAC_1_SQRT_2);
    }
}
