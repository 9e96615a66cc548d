//! Aberth–Ehrlich simultaneous root iteration, polished by Newton.
//!
//! This is the internal oracle for critical points and preimage solves. It
//! shares nothing with the path-lifting solver it is used to instrument.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 2000;

fn horner2(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut f = Complex64::new(0.0, 0.0);
    let mut df = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        df = df * z + f;
        f = f * z + c;
    }
    (f, df)
}

/// `Σ |a_i| |z|^i`, the natural scale of rounding errors in `p(z)`.
fn abs_eval(coeffs: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

/// All roots of the monic polynomial with ascending `coeffs`.
pub fn solve(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let d = coeffs.len().saturating_sub(1);
    if d == 0 {
        return Err(Error::EmptyInput);
    }
    let lead = coeffs[d];
    if d == 1 {
        return Ok(vec![-coeffs[0] / lead]);
    }

    // Start on a circle about the centroid of the roots, with a radius from
    // the Fujiwara-style bound of the shifted polynomial.
    let center = -coeffs[d - 1] / (lead * d as f64);
    let shifted = taylor_at(coeffs, center);
    let radius = (0..d)
        .map(|i| (shifted[i] / lead).norm().powf(1.0 / (d - i) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            let angle = std::f64::consts::TAU * k as f64 / d as f64 + 0.4;
            center + Complex64::from_polar(radius, angle)
        })
        .collect();

    let mut frozen = vec![false; d];
    let mut best_step = f64::INFINITY;
    let mut stagnant = 0;
    for _ in 0..MAX_ITERATIONS {
        let mut max_step: f64 = 0.0;
        for k in 0..d {
            if frozen[k] {
                continue;
            }
            let (f, df) = horner2(coeffs, z[k]);
            if f == Complex64::new(0.0, 0.0) {
                frozen[k] = true;
                continue;
            }
            let ratio = f / df;
            let repulsion: Complex64 = (0..d)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let mut step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !(step.re.is_finite() && step.im.is_finite()) {
                step = ratio;
            }
            z[k] -= step;
            let size = step.norm();
            if size <= 4.0 * f64::EPSILON * z[k].norm().max(1.0) {
                frozen[k] = true;
            }
            max_step = max_step.max(size);
        }
        if frozen.iter().all(|&f| f) {
            break;
        }
        // multiple roots only converge linearly and then jitter at roundoff
        if max_step < best_step * 0.999 {
            best_step = max_step;
            stagnant = 0;
        } else {
            stagnant += 1;
            if stagnant > 25 {
                break;
            }
        }
    }

    for root in z.iter_mut() {
        polish(coeffs, root);
    }

    for root in &z {
        let (f, _) = horner2(coeffs, *root);
        let scale = abs_eval(coeffs, *root).max(1.0);
        if !(root.re.is_finite() && root.im.is_finite()) || f.norm() > 1e-10 * scale {
            return Err(Error::OracleFailure(format!(
                "residual {:e} at {root} exceeds certification level",
                f.norm()
            )));
        }
    }
    Ok(z)
}

/// Newton refinement that only accepts steps which reduce the residual.
pub fn polish(coeffs: &[Complex64], root: &mut Complex64) {
    for _ in 0..4 {
        let (f, df) = horner2(coeffs, *root);
        if df == Complex64::new(0.0, 0.0) || f == Complex64::new(0.0, 0.0) {
            return;
        }
        let candidate = *root - f / df;
        let (fc, _) = horner2(coeffs, candidate);
        if fc.norm() < f.norm() {
            *root = candidate;
        } else {
            return;
        }
    }
}

/// Coefficients of `p(x + c)`.
fn taylor_at(coeffs: &[Complex64], c: Complex64) -> Vec<Complex64> {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Greedy matching: every expected root has a distinct found root nearby.
    pub(crate) fn max_matching_error(found: &[Complex64], expected: &[Complex64]) -> f64 {
        let mut used = vec![false; found.len()];
        let mut worst: f64 = 0.0;
        for e in expected {
            let (idx, dist) = found
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, f)| (i, (f - e).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            used[idx] = true;
            worst = worst.max(dist);
        }
        worst
    }

    #[test]
    fn recovers_simple_roots() {
        let roots = [c(0.5, 0.0), c(-0.5, 0.0), c(0.0, 0.7), c(0.2, -0.3)];
        let p = Polynomial::from_roots(&roots).unwrap();
        let found = solve(p.coeffs()).unwrap();
        assert!(max_matching_error(&found, &roots) < 1e-13);
    }

    #[test]
    fn handles_linear_and_multiple_roots() {
        assert_eq!(solve(&[c(-0.3, 0.1), c(1.0, 0.0)]).unwrap(), vec![c(0.3, -0.1)]);
        // z^3: a triple root converges only to about eps^(1/3)
        let found = solve(&[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        for z in found {
            assert!(z.norm() < 1e-4, "{z}");
        }
    }

    #[test]
    fn roots_of_unity_scaled() {
        let expected: Vec<_> = (0..12)
            .map(|k| Complex64::from_polar(0.9, std::f64::consts::TAU * k as f64 / 12.0))
            .collect();
        let p = Polynomial::from_roots(&expected).unwrap();
        let found = solve(p.coeffs()).unwrap();
        assert!(max_matching_error(&found, &expected) < 1e-12);
    }
}
