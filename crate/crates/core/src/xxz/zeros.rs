//! Partition-function zeros in the complex anisotropy plane.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{full_spectrum, PartitionValue, XxzParams};
use crate::error::{Error, Result};
use crate::numerics::ComplexPolynomial;

/// Largest chain used for grid searches.
pub const MAX_SEARCH_SITES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    Numeric,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Analytic => "analytic",
            Provenance::Numeric => "numeric",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroEntry {
    pub delta: Complex64,
    /// `|Z|` over the largest Boltzmann weight; numeric entries only.
    pub residual: Option<f64>,
    /// Polynomial root and branch index; analytic entries only.
    pub root: Option<Complex64>,
    pub n: Option<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroLocus {
    pub provenance: Provenance,
    pub zeros: Vec<ZeroEntry>,
    /// Candidates dropped during refinement.
    pub warnings: Vec<String>,
}

/// Exponents `M(L−M)`, `M = 0..=L`, collected into `Σ_M z^{M(L−M)}`.
pub fn theorem1_polynomial(sites: usize) -> Result<ComplexPolynomial> {
    if sites < 2 {
        return Err(Error::InvalidInput(format!("L must be at least 2, got {sites}")));
    }
    let degree = sites * sites / 4;
    let mut coeffs = vec![Complex64::default(); degree + 1];
    for m in 0..=sites {
        coeffs[m * (sites - m)] += 1.0;
    }
    ComplexPolynomial::new(coeffs)
}

/// Zeros implied by the lowest state of each magnon sector.
///
/// With `E_M = E₀ + Jδ M(L−M)/(L−1)`, `Z e^{βE₀} = Σ_M z^{M(L−M)}` for
/// `z = e^{−βJδ/(L−1)}`, so every root `z_j` gives the column
/// `Δ = 1 − (L−1)/(βJ) · ln|z_j| + i (L−1)/(βJ) · (arg z_j + 2πn)`.
pub fn theorem1_zeros(sites: usize, beta: f64, j: f64, n_window: RangeInclusive<i64>) -> Result<ZeroLocus> {
    if !(beta > 0.0) || !(j > 0.0) {
        return Err(Error::InvalidInput(format!("need beta > 0 and J > 0, got beta={beta}, J={j}")));
    }
    let roots = theorem1_polynomial(sites)?.roots(1e-12)?;
    let scale = (sites as f64 - 1.0) / (beta * j);
    let mut zeros = Vec::new();
    for n in n_window {
        for &z in &roots {
            zeros.push(ZeroEntry {
                delta: Complex64::new(
                    1.0 - scale * z.norm().ln(),
                    scale * (z.arg() + 2.0 * PI * n as f64),
                ),
                residual: None,
                root: Some(z),
                n: Some(n),
            });
        }
    }
    Ok(ZeroLocus {
        provenance: Provenance::Analytic,
        zeros,
        warnings: Vec::new(),
    })
}

/// Zeros per unit length of the imaginary axis, `βJN/(2π(L−1))`.
pub fn zero_density(sites: usize, beta: f64, j: f64) -> Result<f64> {
    let n = theorem1_polynomial(sites)?.degree() as f64;
    Ok(beta * j * n / (2.0 * PI * (sites as f64 - 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchWindow {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl SearchWindow {
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Result<Self> {
        if !(re.0 < re.1) || !(im.0 < im.1) || ![re.0, re.1, im.0, im.1].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput(format!("bad search window {re:?} x {im:?}")));
        }
        Ok(Self { re, im })
    }

    /// Smallest window holding every point, padded by `margin`.
    pub fn around(points: &[Complex64], margin: f64) -> Result<Self> {
        let fold = |f: fn(f64, f64) -> f64, init: f64, g: fn(&Complex64) -> f64| points.iter().map(g).fold(init, f);
        Self::new(
            (
                fold(f64::min, f64::INFINITY, |z| z.re) - margin,
                fold(f64::max, f64::NEG_INFINITY, |z| z.re) + margin,
            ),
            (
                fold(f64::min, f64::INFINITY, |z| z.im) - margin,
                fold(f64::max, f64::NEG_INFINITY, |z| z.im) + margin,
            ),
        )
    }

    fn contains(&self, z: Complex64, pad: f64) -> bool {
        z.re >= self.re.0 - pad && z.re <= self.re.1 + pad && z.im >= self.im.0 - pad && z.im <= self.im.1 + pad
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Grid points along the real and imaginary directions.
    pub grid: (usize, usize),
    /// Acceptance threshold on the normalized residual.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            grid: (41, 41),
            tol: 1e-8,
            max_iterations: 60,
        }
    }
}

fn partition_at(p: &XxzParams, delta: Complex64, beta: f64) -> Result<PartitionValue> {
    let spectrum = full_spectrum(&p.with_anisotropy(delta))?;
    Ok(PartitionValue::from_energies(
        spectrum.iter().flat_map(|s| s.eigenvalues.iter()),
        beta,
    ))
}

/// `Z(Δ) e^{−shift}` for a fixed real shift: analytic in Δ, unlike the
/// self-normalized sum.
fn scaled_partition(p: &XxzParams, delta: Complex64, beta: f64, shift: f64) -> Result<Complex64> {
    let pv = partition_at(p, delta, beta)?;
    Ok(pv.sum * (pv.shift - shift).exp())
}

fn secant(p: &XxzParams, beta: f64, start: Complex64, step: f64, options: &SearchOptions) -> Result<(Complex64, f64)> {
    let shift = partition_at(p, start, beta)?.shift;
    let f = |d: Complex64| scaled_partition(p, d, beta, shift);
    let mut x0 = start;
    let mut x1 = start + Complex64::new(0.1 * step, 0.1 * step);
    let mut f0 = f(x0)?;
    let mut f1 = f(x1)?;
    for _ in 0..options.max_iterations {
        let denom = f1 - f0;
        if denom.norm() == 0.0 {
            break;
        }
        let dx = f1 * (x1 - x0) / denom;
        if !dx.re.is_finite() || !dx.im.is_finite() {
            break;
        }
        x0 = x1;
        f0 = f1;
        x1 -= dx;
        f1 = f(x1)?;
        if dx.norm() <= 1e-15 * (1.0 + x1.norm()) {
            break;
        }
    }
    let residual = partition_at(p, x1, beta)?.residual();
    Ok((x1, residual))
}

/// Grid search for zeros of `Z(Δ)` inside `window`.
///
/// Plaquettes with nonzero phase winding seed a secant iteration; converged
/// points are kept when their normalized residual is below `options.tol`
/// and they stay within one grid step of the window.
pub fn locate_zeros_numeric(
    window: &SearchWindow,
    sites: usize,
    j: f64,
    beta: f64,
    options: &SearchOptions,
) -> Result<ZeroLocus> {
    if sites > MAX_SEARCH_SITES {
        return Err(Error::InvalidInput(format!(
            "grid search limited to L <= {MAX_SEARCH_SITES}, got {sites}"
        )));
    }
    if !(beta > 0.0) {
        return Err(Error::InvalidInput(format!("beta must be positive, got {beta}")));
    }
    let (nx, ny) = options.grid;
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidInput("grid needs at least 2 points per direction".into()));
    }
    let p = XxzParams::new(j, Complex64::from(1.0), sites)?;
    let dx = (window.re.1 - window.re.0) / (nx - 1) as f64;
    let dy = (window.im.1 - window.im.0) / (ny - 1) as f64;
    let point = |ix: usize, iy: usize| Complex64::new(window.re.0 + dx * ix as f64, window.im.0 + dy * iy as f64);

    let phases: Vec<f64> = (0..nx * ny)
        .into_par_iter()
        .map(|idx| {
            // Strip the nonvanishing factor e^{−βE₀(Δ)} so the phase varies on the zero spacing only.
            let d = point(idx % nx, idx / nx);
            partition_at(&p, d, beta).map(|z| z.phase() + beta * p.with_anisotropy(d).polarized_energy().im)
        })
        .collect::<Result<_>>()?;
    let phase = |ix: usize, iy: usize| phases[iy * nx + ix];
    let wrapped = |a: f64, b: f64| {
        let d = b - a;
        d - 2.0 * PI * (d / (2.0 * PI)).round()
    };

    let mut seeds = Vec::new();
    for iy in 0..ny - 1 {
        for ix in 0..nx - 1 {
            let corners = [phase(ix, iy), phase(ix + 1, iy), phase(ix + 1, iy + 1), phase(ix, iy + 1)];
            let total: f64 = (0..4).map(|k| wrapped(corners[k], corners[(k + 1) % 4])).sum();
            if (total / (2.0 * PI)).round() != 0.0 {
                seeds.push(point(ix, iy) + Complex64::new(0.5 * dx, 0.5 * dy));
            }
        }
    }

    let step = dx.min(dy);
    let refined: Vec<(Complex64, Result<(Complex64, f64)>)> = seeds
        .par_iter()
        .map(|&s| (s, secant(&p, beta, s, step, options)))
        .collect();

    let mut zeros: Vec<ZeroEntry> = Vec::new();
    let mut warnings = Vec::new();
    for (seed, outcome) in refined {
        match outcome {
            Ok((z, residual)) if residual <= options.tol && window.contains(z, step) => {
                if zeros.iter().all(|e| (e.delta - z).norm() > 1e-7 * (1.0 + z.norm())) {
                    zeros.push(ZeroEntry {
                        delta: z,
                        residual: Some(residual),
                        root: None,
                        n: None,
                    });
                }
            }
            Ok((z, residual)) => warnings.push(format!(
                "seed {seed}: refinement ended at {z} with residual {residual:.3e}"
            )),
            Err(e) => warnings.push(format!("seed {seed}: {e}")),
        }
    }
    zeros.sort_by(|a, b| a.delta.im.total_cmp(&b.delta.im).then(a.delta.re.total_cmp(&b.delta.re)));
    Ok(ZeroLocus {
        provenance: Provenance::Numeric,
        zeros,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroPair {
    pub analytic: ZeroEntry,
    /// Closest numeric zero, if the search found any.
    pub numeric: Option<ZeroEntry>,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Check {
    pub sites: usize,
    pub beta: f64,
    pub pairs: Vec<ZeroPair>,
    /// Largest pair distance, `ε(β)`.
    pub epsilon: f64,
    pub numeric: ZeroLocus,
}

/// Pairs each `n = 0` analytic zero with the nearest numeric zero of the
/// full partition function.
///
/// The search window is the bounding box of the analytic zeros padded by a
/// tenth of the column width `2π(L−1)/(βJ)`; the grid step is a third of the
/// smallest analytic spacing, capped at 1/40 of the column width.
pub fn verify_theorem1(sites: usize, beta: f64, j: f64, tol: f64) -> Result<Theorem1Check> {
    let analytic = theorem1_zeros(sites, beta, j, 0..=0)?;
    let points: Vec<Complex64> = analytic.zeros.iter().map(|z| z.delta).collect();
    let column = 2.0 * PI * (sites as f64 - 1.0) / (beta * j);
    let spacing = points
        .iter()
        .enumerate()
        .flat_map(|(a, &x)| points[a + 1..].iter().map(move |&y| (x - y).norm()))
        .fold(f64::INFINITY, f64::min);
    let step = (spacing / 3.0).min(column / 40.0);
    let window = SearchWindow::around(&points, 0.1 * column)?;
    let count = |lo: f64, hi: f64| ((hi - lo) / step).ceil() as usize + 1;
    let options = SearchOptions {
        grid: (count(window.re.0, window.re.1), count(window.im.0, window.im.1)),
        tol,
        ..SearchOptions::default()
    };
    let numeric = locate_zeros_numeric(&window, sites, j, beta, &options)?;
    let pairs: Vec<ZeroPair> = analytic
        .zeros
        .iter()
        .map(|a| {
            let best = numeric
                .zeros
                .iter()
                .min_by(|x, y| (x.delta - a.delta).norm().total_cmp(&(y.delta - a.delta).norm()))
                .copied();
            ZeroPair {
                analytic: *a,
                numeric: best,
                distance: best.map_or(f64::INFINITY, |b| (b.delta - a.delta).norm()),
            }
        })
        .collect();
    let epsilon = pairs.iter().map(|p| p.distance).fold(0.0, f64::max);
    Ok(Theorem1Check {
        sites,
        beta,
        pairs,
        epsilon,
        numeric,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn polynomial_examples() {
        let p2 = theorem1_polynomial(2).unwrap();
        assert_eq!(p2.coeffs(), &[c(2.0, 0.0), c(1.0, 0.0)]);
        let p3 = theorem1_polynomial(3).unwrap();
        assert_eq!(p3.coeffs(), &[c(2.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
        let roots = p3.roots(1e-12).unwrap();
        for want in [c(0.0, -1.0), c(0.0, 1.0)] {
            assert!(roots.iter().any(|r| (r - want).norm() < 1e-12));
        }
        let p4 = theorem1_polynomial(4).unwrap();
        assert_eq!(p4.coeffs(), &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn polynomial_structure() {
        for l in 2..=14 {
            let p = theorem1_polynomial(l).unwrap();
            let expected_degree = if l % 2 == 0 { l * l / 4 } else { (l * l - 1) / 4 };
            assert_eq!(p.degree(), expected_degree);
            assert_eq!(p.coeffs()[0], c(2.0, 0.0));
            assert_eq!(p.leading(), c(if l % 2 == 0 { 1.0 } else { 2.0 }, 0.0));
            let total: f64 = p.coeffs().iter().map(|z| z.re).sum();
            assert_eq!(total, (l + 1) as f64);
        }
    }

    #[test]
    fn two_site_analytic_zero() {
        let locus = theorem1_zeros(2, 100.0, 1.0, 0..=0).unwrap();
        assert_eq!(locus.zeros.len(), 1);
        let d = locus.zeros[0].delta;
        assert!((d - c(1.0 - 2f64.ln() / 100.0, PI / 100.0)).norm() < 1e-14);
        let doubled = theorem1_zeros(2, 200.0, 1.0, 0..=0).unwrap().zeros[0].delta;
        assert!(((doubled.re - 1.0) / (d.re - 1.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_density_examples() {
        let g = zero_density(6, 100.0, 1.0).unwrap();
        assert!((g - 100.0 * 9.0 / (2.0 * PI * 5.0)).abs() < 1e-12);
        assert_eq!(zero_density(6, 200.0, 1.0).unwrap(), 2.0 * g);

        let locus = theorem1_zeros(6, 100.0, 1.0, -1..=4).unwrap();
        let w = 3.0 * 2.0 * PI * 5.0 / 100.0;
        let count = locus.zeros.iter().filter(|z| z.delta.im >= 0.0 && z.delta.im < w).count();
        assert!(((count as f64 / w) / g - 1.0).abs() <= 0.1);
    }

    #[test]
    fn two_site_numeric_zero() {
        let window = SearchWindow::new((0.95, 1.1), (0.0, 0.1)).unwrap();
        let locus = locate_zeros_numeric(&window, 2, 1.0, 100.0, &SearchOptions::default()).unwrap();
        let analytic = theorem1_zeros(2, 100.0, 1.0, 0..=0).unwrap().zeros[0].delta;
        assert!(locus.zeros.iter().any(|z| (z.delta - analytic).norm() < 1e-4), "{locus:?}");
        assert!(locus.zeros.iter().all(|z| z.residual.unwrap() <= 1e-8));
    }

    #[test]
    fn empty_window() {
        let window = SearchWindow::new((1.5, 1.6), (0.0, 0.05)).unwrap();
        let locus = locate_zeros_numeric(&window, 4, 1.0, 100.0, &SearchOptions::default()).unwrap();
        assert!(locus.zeros.is_empty());
    }

    #[test]
    fn theorem1_small_chains() {
        for l in [2, 3] {
            let check = verify_theorem1(l, 50.0, 1.0, 1e-8).unwrap();
            assert!(check.epsilon < 1e-10, "L={l}: {}", check.epsilon);
        }
        let coarse = verify_theorem1(5, 50.0, 1.0, 1e-8).unwrap();
        let fine = verify_theorem1(5, 100.0, 1.0, 1e-8).unwrap();
        assert_eq!(fine.pairs.len(), 6);
        assert!(coarse.epsilon / fine.epsilon >= 1.8);
    }
}
