//! Numerical kernels shared by the model modules.

pub mod bessel;
pub mod eig;
pub mod newton;
pub mod poly;
pub mod quad;

pub use bessel::{bessel_k0, bessel_k0_scaled};
pub use eig::{dense_eig, eigenvalues, singular_values, EigenSystem};
pub use newton::{newton_system, NewtonOptions, NewtonSolution};
pub use poly::ComplexPolynomial;
pub use quad::{adaptive_integrate, adaptive_integrate_panels, Quadrature};

/// Ordinary least squares `y ≈ Σ_j β_j X[i][j]`; returns coefficients and R².
pub fn least_squares(design: &[Vec<f64>], y: &[f64]) -> Option<(Vec<f64>, f64)> {
    let n = y.len();
    let p = design.first()?.len();
    if n < p || design.len() != n {
        return None;
    }
    let x = nalgebra::DMatrix::from_fn(n, p, |i, j| design[i][j]);
    let yv = nalgebra::DVector::from_column_slice(y);
    let beta = x.clone().svd(true, true).solve(&yv, 1e-14).ok()?;
    let fitted = &x * &beta;
    let mean = y.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res: f64 = y.iter().zip(fitted.iter()).map(|(a, b)| (a - b).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Some((beta.iter().copied().collect(), r2))
}

/// Straight-line fit `y = intercept + slope·x`; returns (slope, intercept, R²).
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let design: Vec<Vec<f64>> = x.iter().map(|&v| vec![1.0, v]).collect();
    let (beta, r2) = least_squares(&design, y)?;
    Some((beta[1], beta[0], r2))
}
