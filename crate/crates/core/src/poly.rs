//! Monic complex polynomials in dual root/coefficient form.
//!
//! Coefficients are stored in increasing-degree order and the leading
//! coefficient is always exactly one. Derivatives of every order come from
//! repeated synthetic division, which yields the whole Taylor expansion at a
//! point in one O(d·k) pass.

use std::hash::{DefaultHasher, Hash, Hasher};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots;

/// A point of the complex plane. Public operations reject NaN/Inf components.
pub type ComplexPoint = Complex64;

/// Roots closer than this are treated as a repeated root and rejected.
pub const DUPLICATE_ROOT_TOL: f64 = 1e-12;

pub(crate) fn ensure_finite(z: Complex64, what: &'static str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
    roots: Option<Vec<Complex64>>,
}

/// `f(z), f'(z), ..., f^(k)(z)` at a single point. Entries are true
/// derivatives (the `j!` factor is included).
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeStack {
    pub at: ComplexPoint,
    pub values: Vec<ComplexPoint>,
}

impl DerivativeStack {
    pub fn order(&self) -> usize {
        self.values.len() - 1
    }
}

impl Polynomial {
    /// Expands `∏ (z − ζ_j)`. The roots are kept as the source of truth.
    pub fn from_roots(roots: &[ComplexPoint]) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::EmptyInput);
        }
        for r in roots {
            ensure_finite(*r, "roots")?;
        }
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                if (roots[i] - roots[j]).norm() <= DUPLICATE_ROOT_TOL {
                    return Err(Error::DuplicateRoots {
                        first: i,
                        second: j,
                        tolerance: DUPLICATE_ROOT_TOL,
                    });
                }
            }
        }
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            // multiply by (z - r)
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= r * c;
            }
            coeffs = next;
        }
        Ok(Self {
            coeffs,
            roots: Some(roots.to_vec()),
        })
    }

    /// Builds from ascending coefficients; the last one must be exactly 1.
    pub fn from_coeffs(coeffs: Vec<ComplexPoint>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::EmptyInput);
        }
        for c in &coeffs {
            ensure_finite(*c, "coefficients")?;
        }
        let lead = *coeffs.last().unwrap();
        if lead != Complex64::new(1.0, 0.0) {
            return Err(Error::NotMonic(lead));
        }
        Ok(Self {
            coeffs,
            roots: None,
        })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[ComplexPoint] {
        &self.coeffs
    }

    pub fn roots(&self) -> Option<&[ComplexPoint]> {
        self.roots.as_deref()
    }

    /// Roots if known, otherwise computed with the Aberth–Ehrlich oracle.
    pub fn roots_or_solve(&self) -> Result<Vec<ComplexPoint>> {
        match &self.roots {
            Some(r) => Ok(r.clone()),
            None => roots::solve(&self.coeffs),
        }
    }

    /// Same polynomial with the oracle's roots attached (no-op if present).
    pub fn with_solved_roots(&self) -> Result<Self> {
        let roots = self.roots_or_solve()?;
        Ok(Self {
            coeffs: self.coeffs.clone(),
            roots: Some(roots),
        })
    }

    /// Membership in the class of monic polynomials with distinct roots in
    /// the open unit disk. Needs the roots.
    pub fn in_unit_disk_class(&self) -> Result<bool> {
        let roots = self.roots.as_ref().ok_or(Error::RootsUnknown)?;
        Ok(roots.iter().all(|r| r.norm() < 1.0))
    }

    pub fn eval(&self, z: ComplexPoint) -> ComplexPoint {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `(f(z), f'(z))` by a single doubled Horner pass.
    pub fn eval_with_derivative(&self, z: ComplexPoint) -> (ComplexPoint, ComplexPoint) {
        let mut f = Complex64::new(0.0, 0.0);
        let mut df = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            df = df * z + f;
            f = f * z + c;
        }
        (f, df)
    }

    /// Taylor coefficients `b_0..=b_k` of `f(z + h) = Σ b_j h^j`.
    pub fn taylor_coeffs(&self, z: ComplexPoint, k: usize) -> Vec<ComplexPoint> {
        let d = self.degree();
        let k = k.min(d);
        let mut a = self.coeffs.clone();
        for j in 0..=k {
            for i in (j..d).rev() {
                let next = a[i + 1];
                a[i] += z * next;
            }
        }
        a.truncate(k + 1);
        a
    }

    pub fn eval_all_derivs(&self, z: ComplexPoint, k: usize) -> Result<DerivativeStack> {
        ensure_finite(z, "evaluation point")?;
        if k > self.degree() {
            return Err(Error::OrderTooHigh {
                order: k,
                degree: self.degree(),
            });
        }
        let mut values = self.taylor_coeffs(z, k);
        let mut factorial = 1.0;
        for (j, v) in values.iter_mut().enumerate().skip(1) {
            factorial *= j as f64;
            *v *= factorial;
        }
        Ok(DerivativeStack { at: z, values })
    }

    /// `‖f‖ = max |a_i|`.
    pub fn sup_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `f'/d`, which is monic of degree `d − 1`. `None` for linear input.
    pub fn monic_derivative(&self) -> Option<Polynomial> {
        let d = self.degree();
        if d < 2 {
            return None;
        }
        let scale = d as f64;
        let mut coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, &c)| c * ((i + 1) as f64 / scale))
            .collect::<Vec<_>>();
        // exact monic despite the rounding in d/d
        *coeffs.last_mut().unwrap() = Complex64::new(1.0, 0.0);
        Some(Polynomial {
            coeffs,
            roots: None,
        })
    }

    /// `f − y`, used for preimage solves.
    pub fn shifted(&self, y: ComplexPoint) -> Polynomial {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] -= y;
        Polynomial {
            coeffs,
            roots: None,
        }
    }

    /// Stable identifier of the coefficient vector (bit-exact).
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        for c in &self.coeffs {
            c.re.to_bits().hash(&mut h);
            c.im.to_bits().hash(&mut h);
        }
        h.finish()
    }

    pub fn to_json(&self) -> PolynomialJson {
        match &self.roots {
            Some(r) => PolynomialJson {
                degree: self.degree(),
                roots: Some(r.iter().map(|z| [z.re, z.im]).collect()),
                coeffs: None,
            },
            None => PolynomialJson {
                degree: self.degree(),
                roots: None,
                coeffs: Some(self.coeffs.iter().map(|z| [z.re, z.im]).collect()),
            },
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: PolynomialJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        raw.try_into()
    }
}

/// Wire form: `{"degree": d, "roots": [[re,im],...]}` or
/// `{"degree": d, "coeffs": [[re,im],...]}` (ascending, monic).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialJson {
    pub degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<[f64; 2]>>,
}

impl TryFrom<PolynomialJson> for Polynomial {
    type Error = Error;

    fn try_from(raw: PolynomialJson) -> Result<Self> {
        let to_points = |v: Vec<[f64; 2]>| -> Vec<Complex64> {
            v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()
        };
        match (raw.roots, raw.coeffs) {
            (Some(r), None) => {
                if r.len() != raw.degree {
                    return Err(Error::DegreeMismatch {
                        declared: raw.degree,
                        found: r.len(),
                    });
                }
                Polynomial::from_roots(&to_points(r))
            }
            (None, Some(c)) => {
                if c.len() != raw.degree + 1 {
                    return Err(Error::DegreeMismatch {
                        declared: raw.degree,
                        found: c.len(),
                    });
                }
                Polynomial::from_coeffs(to_points(c))
            }
            (Some(_), Some(_)) => Err(Error::Parse(
                "give exactly one of \"roots\" or \"coeffs\"".into(),
            )),
            (None, None) => Err(Error::Parse("missing \"roots\" or \"coeffs\"".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn from_roots_expands_products() {
        let p = Polynomial::from_roots(&[c(0.5, 0.0), c(-0.5, 0.0)]).unwrap();
        let want = [c(-0.25, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        for (a, b) in p.coeffs().iter().zip(want) {
            assert!(close(*a, b, 1e-15));
        }

        let a = c(0.3, -0.7);
        let p = Polynomial::from_roots(&[a]).unwrap();
        assert_eq!(p.coeffs(), &[-a, c(1.0, 0.0)]);

        // (z - 0.9)(z + 0.9) z = z^3 - 0.81 z
        let p = Polynomial::from_roots(&[c(0.9, 0.0), c(-0.9, 0.0), c(0.0, 0.0)]).unwrap();
        let want = [c(0.0, 0.0), c(-0.81, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        for (a, b) in p.coeffs().iter().zip(want) {
            assert!(close(*a, b, 1e-15));
        }
    }

    #[test]
    fn from_roots_rejects_bad_input() {
        assert_eq!(Polynomial::from_roots(&[]), Err(Error::EmptyInput));
        let err = Polynomial::from_roots(&[c(0.1, 0.0), c(0.1 + 1e-13, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::DuplicateRoots { first: 0, second: 1, .. }));
        assert!(Polynomial::from_roots(&[c(0.1, 0.0), c(0.1 + 1e-9, 0.0)]).is_ok());
        assert!(matches!(
            Polynomial::from_roots(&[c(f64::NAN, 0.0)]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn from_coeffs_requires_monic() {
        assert!(matches!(
            Polynomial::from_coeffs(vec![c(1.0, 0.0), c(2.0, 0.0)]),
            Err(Error::NotMonic(_))
        ));
        assert!(Polynomial::from_coeffs(vec![c(1.0, 0.0)]).is_err());
        let p = Polynomial::from_coeffs(vec![c(-0.25, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(p.degree(), 2);
        assert!(p.roots().is_none());
        assert_eq!(p.in_unit_disk_class(), Err(Error::RootsUnknown));
    }

    #[test]
    fn derivative_stacks() {
        let p = Polynomial::from_roots(&[c(0.5, 0.0), c(-0.5, 0.0)]).unwrap();
        let s = p.eval_all_derivs(c(1.0, 0.0), 2).unwrap();
        assert!(close(s.values[0], c(0.75, 0.0), 1e-15));
        assert!(close(s.values[1], c(2.0, 0.0), 1e-15));
        assert!(close(s.values[2], c(2.0, 0.0), 1e-15));

        let s = p.eval_all_derivs(c(0.0, 0.0), 2).unwrap();
        assert!(close(s.values[0], c(-0.25, 0.0), 1e-15));
        assert!(close(s.values[1], c(0.0, 0.0), 1e-15));
        assert!(close(s.values[2], c(2.0, 0.0), 1e-15));

        let a = c(0.2, 0.4);
        let lin = Polynomial::from_roots(&[a]).unwrap();
        let s = lin.eval_all_derivs(a, 1).unwrap();
        assert_eq!(s.values, vec![c(0.0, 0.0), c(1.0, 0.0)]);

        assert!(matches!(
            p.eval_all_derivs(c(0.0, 0.0), 3),
            Err(Error::OrderTooHigh { order: 3, degree: 2 })
        ));
    }

    #[test]
    fn sup_norm() {
        let p = Polynomial::from_roots(&[c(0.5, 0.0), c(-0.5, 0.0)]).unwrap();
        assert_eq!(p.sup_coeff_norm(), 1.0);
        let p = Polynomial::from_roots(&[c(0.9, 0.0), c(-0.9, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((p.sup_coeff_norm() - 1.0).abs() < 1e-15);

        // Roots 0.9 e^{2πik/10} expand to z^10 - 0.9^10, checked against a
        // direct product expansion.
        let roots: Vec<_> = (0..10)
            .map(|k| Complex64::from_polar(0.9, std::f64::consts::TAU * k as f64 / 10.0))
            .collect();
        let p = Polynomial::from_roots(&roots).unwrap();
        let expected = 0.9f64.powi(10).max(1.0);
        assert!((p.sup_coeff_norm() - expected).abs() < 1e-12);
        assert!((p.coeffs()[0] + c(0.9f64.powi(10), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn json_round_trip_and_errors() {
        let p = Polynomial::from_json_str(r#"{"degree":2,"roots":[[0.5,0],[-0.5,0]]}"#).unwrap();
        assert_eq!(p.degree(), 2);
        let again = Polynomial::from_json_str(&serde_json::to_string(&p.to_json()).unwrap()).unwrap();
        assert_eq!(p, again);

        let q = Polynomial::from_json_str(r#"{"degree":2,"coeffs":[[-0.25,0],[0,0],[1,0]]}"#).unwrap();
        assert!(close(q.eval(c(0.5, 0.0)), c(0.0, 0.0), 1e-15));

        for bad in [
            r#"{"degree":2,"coeffs":[[-0.25,0],[0,0],[2,0]]}"#,
            r#"{"degree":3,"roots":[[0.5,0],[-0.5,0]]}"#,
            r#"{"degree":2}"#,
            r#"{"degree":1,"roots":[[0.5,0]],"coeffs":[[-0.5,0],[1,0]]}"#,
            r#"{"degree":2,"roots":[[0.5,0]"#,
        ] {
            assert!(Polynomial::from_json_str(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn monic_derivative_and_shift() {
        let p = Polynomial::from_roots(&[c(0.9, 0.0), c(-0.9, 0.0), c(0.0, 0.0)]).unwrap();
        let dp = p.monic_derivative().unwrap();
        // f' / 3 = z^2 - 0.27
        assert!(close(dp.coeffs()[0], c(-0.27, 0.0), 1e-15));
        assert_eq!(dp.coeffs()[2], c(1.0, 0.0));
        let g = p.shifted(c(0.1, 0.2));
        let z = c(0.3, -0.4);
        assert!(close(g.eval(z), p.eval(z) - c(0.1, 0.2), 1e-15));
        assert!(Polynomial::from_roots(&[c(0.1, 0.0)]).unwrap().monic_derivative().is_none());
    }
}
