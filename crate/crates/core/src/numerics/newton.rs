//! Damped Newton iteration for square holomorphic systems with
//! finite-difference Jacobians.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative finite-difference step: `h_j = FD_STEP · (1 + |x_j|)`.
pub const FD_STEP: f64 = 1e-7;

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iterations: 100,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NewtonSolution {
    pub x: Vec<Complex64>,
    pub residual: f64,
    pub iterations: usize,
}

fn inf_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Central-difference Jacobian `∂F_i/∂x_j` of a holomorphic map.
pub fn fd_jacobian<F>(f: &F, x: &[Complex64]) -> DMatrix<Complex64>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let n = x.len();
    let mut jac = DMatrix::<Complex64>::zeros(n, n);
    let mut probe = x.to_vec();
    for j in 0..n {
        let h = FD_STEP * (1.0 + x[j].norm());
        // Use the steps actually representable around x_j.
        let up = x[j] + h;
        let down = x[j] - h;
        let span = (up - down).re;
        probe[j] = up;
        let plus = f(&probe);
        probe[j] = down;
        let minus = f(&probe);
        probe[j] = x[j];
        for i in 0..n {
            jac[(i, j)] = (plus[i] - minus[i]) / span;
        }
    }
    jac
}

/// Solves `F(x) = 0` from `x0` until `‖F‖∞ ≤ tol`.
///
/// Steps are halved while they fail to reduce `‖F‖∞`.
pub fn newton_system<F>(f: F, x0: &[Complex64], options: NewtonOptions) -> Result<NewtonSolution>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    if fx.len() != x.len() {
        return Err(Error::InvalidInput(format!(
            "system maps {} unknowns to {} residuals",
            x.len(),
            fx.len()
        )));
    }
    let mut residual = inf_norm(&fx);
    for iteration in 0..=options.max_iterations {
        if !residual.is_finite() {
            return Err(Error::Newton {
                reason: "non-finite residual".into(),
                residual,
                best: x,
            });
        }
        if residual <= options.tol {
            return Ok(NewtonSolution {
                x,
                residual,
                iterations: iteration,
            });
        }
        if iteration == options.max_iterations {
            break;
        }
        let jac = fd_jacobian(&f, &x);
        let rhs = DVector::from_iterator(fx.len(), fx.iter().map(|z| -z));
        let step = match jac.lu().solve(&rhs) {
            Some(s) if s.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => s,
            _ => {
                return Err(Error::Newton {
                    reason: "singular jacobian".into(),
                    residual,
                    best: x,
                })
            }
        };

        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<Complex64> = x.iter().zip(step.iter()).map(|(a, s)| a + s * scale).collect();
            let ft = f(&trial);
            let rt = inf_norm(&ft);
            if rt.is_finite() && rt < residual {
                x = trial;
                fx = ft;
                residual = rt;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            return Err(Error::Newton {
                reason: "line search stalled".into(),
                residual,
                best: x,
            });
        }
    }
    Err(Error::Newton {
        reason: format!("no convergence in {} iterations", options.max_iterations),
        residual,
        best: x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn quadratic_converges_to_upper_root() {
        let sol = newton_system(|z| vec![z[0] * z[0] + 1.0 / 3.0], &[c(0.0, 0.5)], NewtonOptions::default())
            .unwrap();
        assert!((sol.x[0] - c(0.0, 1.0 / 3f64.sqrt())).norm() < 1e-12);
    }

    #[test]
    fn linear_in_one_step() {
        let options = NewtonOptions {
            tol: 1e-8,
            ..NewtonOptions::default()
        };
        let sol = newton_system(|z| vec![z[0] - 1.0], &[c(0.0, 0.0)], options).unwrap();
        assert_eq!(sol.iterations, 1);
        assert!((sol.x[0] - c(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn coupled_system() {
        // x + y = 3, x y = 2 -> {1, 2}
        let f = |z: &[Complex64]| vec![z[0] + z[1] - 3.0, z[0] * z[1] - 2.0];
        let sol = newton_system(f, &[c(0.5, 0.1), c(2.5, -0.1)], NewtonOptions::default()).unwrap();
        assert!((sol.x[0] - c(1.0, 0.0)).norm() < 1e-10);
        assert!((sol.x[1] - c(2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn singular_jacobian_reports_best_iterate() {
        let f = |z: &[Complex64]| vec![z[0] * z[0] + 1.0, z[0] * z[0] + 1.0];
        let err = newton_system(f, &[c(0.3, 0.2), c(0.0, 0.0)], NewtonOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Newton { ref best, .. } if best.len() == 2));
    }

    #[test]
    fn jacobian_matches_analytic() {
        let f = |z: &[Complex64]| vec![z[0] * z[1], z[0].exp()];
        let x = [c(0.3, -0.2), c(1.1, 0.4)];
        let j = fd_jacobian(&f, &x);
        assert!((j[(0, 0)] - x[1]).norm() < 1e-8);
        assert!((j[(0, 1)] - x[0]).norm() < 1e-8);
        assert!((j[(1, 0)] - x[0].exp()).norm() < 1e-8);
        assert!(j[(1, 1)].norm() < 1e-8);
    }
}
