//! Complex polynomials and their roots.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::eig::eigenvalues;
use crate::error::{Error, Result};

const POLISH_ITERATIONS: usize = 50;

/// Polynomial `Σ coeffs[m] z^m`, stored with a nonzero leading coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
}

impl ComplexPolynomial {
    /// Builds a polynomial from ascending coefficients, dropping zero leading terms.
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self> {
        while coeffs.last().is_some_and(|c| *c == Complex64::default()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("zero polynomial".into()));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.degree()]
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::default(), |acc, &c| acc * z + c)
    }

    /// Value and first derivative by a single Horner sweep.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::default();
        let mut dp = Complex64::default();
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `Σ |c_m| |z|^m`: the natural size of `p(z)` for backward-error checks.
    pub fn magnitude_at(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn companion(&self) -> DMatrix<Complex64> {
        let d = self.degree();
        let lead = self.leading();
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        for i in 1..d {
            m[(i, i - 1)] = Complex64::from(1.0);
        }
        for i in 0..d {
            m[(i, d - 1)] = -self.coeffs[i] / lead;
        }
        m
    }

    /// All `degree` roots with multiplicity.
    ///
    /// Companion-matrix eigenvalues are polished by simultaneous Aberth
    /// steps; every returned root satisfies
    /// `|p(r)| ≤ tol · Σ|c_m||r|^m`.
    pub fn roots(&self, tol: f64) -> Result<Vec<Complex64>> {
        if self.degree() < 1 {
            return Err(Error::InvalidInput(
                "root finding needs degree >= 1".into(),
            ));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
        }
        let mut roots = if self.degree() == 1 {
            vec![-self.coeffs[0] / self.coeffs[1]]
        } else {
            eigenvalues(&self.companion())?
        };
        self.aberth_polish(&mut roots);

        let residual = self.worst_relative_residual(&roots);
        if residual > tol {
            return Err(Error::RootsNoConvergence {
                iterations: POLISH_ITERATIONS,
                residual,
                best: roots,
            });
        }
        roots.sort_by(super::eig::eig_order);
        Ok(roots)
    }

    fn worst_relative_residual(&self, roots: &[Complex64]) -> f64 {
        roots
            .iter()
            .map(|&r| {
                let scale = self.magnitude_at(r);
                if scale == 0.0 {
                    0.0
                } else {
                    self.eval(r).norm() / scale
                }
            })
            .fold(0.0, f64::max)
    }

    fn aberth_polish(&self, roots: &mut [Complex64]) {
        let n = roots.len();
        for _ in 0..POLISH_ITERATIONS {
            let mut largest_step = 0.0f64;
            for k in 0..n {
                let z = roots[k];
                let (p, dp) = self.eval_with_derivative(z);
                if p == Complex64::default() {
                    continue;
                }
                let newton = p / dp;
                let repulsion: Complex64 = (0..n)
                    .filter(|&j| j != k)
                    .map(|j| {
                        let diff = z - roots[j];
                        if diff == Complex64::default() {
                            Complex64::default()
                        } else {
                            diff.inv()
                        }
                    })
                    .sum();
                let step = newton / (Complex64::from(1.0) - newton * repulsion);
                if !step.re.is_finite() || !step.im.is_finite() {
                    continue;
                }
                let candidate = z - step;
                // Accept only steps that do not increase the residual.
                if self.eval(candidate).norm() <= p.norm() {
                    roots[k] = candidate;
                    largest_step = largest_step.max(step.norm() / (1.0 + z.norm()));
                }
            }
            if largest_step < 4.0 * f64::EPSILON {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn contains(roots: &[Complex64], z: Complex64, tol: f64) -> bool {
        roots.iter().any(|r| (r - z).norm() < tol)
    }

    #[test]
    fn z_squared_plus_one() {
        let p = ComplexPolynomial::from_real(&[1.0, 0.0, 1.0]).unwrap();
        let roots = p.roots(1e-12).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(contains(&roots, c(0.0, 1.0), 1e-12));
        assert!(contains(&roots, c(0.0, -1.0), 1e-12));
    }

    #[test]
    fn linear() {
        let p = ComplexPolynomial::from_real(&[2.0, 1.0]).unwrap();
        let roots = p.roots(1e-12).unwrap();
        assert_eq!(roots, vec![c(-2.0, 0.0)]);
    }

    #[test]
    fn degree_four_sparse_residuals() {
        // z^4 + 2z^3 + 2
        let p = ComplexPolynomial::from_real(&[2.0, 0.0, 0.0, 2.0, 1.0]).unwrap();
        let roots = p.roots(1e-12).unwrap();
        assert_eq!(roots.len(), 4);
        for r in roots {
            assert!(p.eval(r).norm() <= 1e-10);
        }
    }

    #[test]
    fn trailing_zero_leading_coefficients_are_trimmed() {
        let p = ComplexPolynomial::from_real(&[1.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(p.degree(), 1);
        assert!(ComplexPolynomial::from_real(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn constant_polynomial_has_no_roots() {
        let p = ComplexPolynomial::from_real(&[3.0]).unwrap();
        assert!(matches!(p.roots(1e-12), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn repeated_root() {
        // (z - 1)^3
        let p = ComplexPolynomial::from_real(&[-1.0, 3.0, -3.0, 1.0]).unwrap();
        let roots = p.roots(1e-12).unwrap();
        assert_eq!(roots.len(), 3);
        for r in roots {
            assert!((r - c(1.0, 0.0)).norm() < 1e-4);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn vieta_sum_and_residuals(
            degree in 1usize..=12,
            raw in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 13)
        ) {
            let mut coeffs: Vec<Complex64> = raw[..=degree].iter().map(|&(a, b)| c(a, b)).collect();
            coeffs[degree] = coeffs[degree] + c(1.5, 0.0);
            let p = ComplexPolynomial::new(coeffs.clone()).unwrap();
            let roots = p.roots(1e-10).unwrap();
            prop_assert_eq!(roots.len(), degree);
            let sum: Complex64 = roots.iter().sum();
            let expected = -coeffs[degree - 1] / coeffs[degree];
            prop_assert!((sum - expected).norm() < 1e-8, "sum {} want {}", sum, expected);
            for r in &roots {
                prop_assert!(p.eval(*r).norm() <= 1e-10 * p.magnitude_at(*r));
            }
        }
    }
}
