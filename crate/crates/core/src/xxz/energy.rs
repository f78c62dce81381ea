//! Low-lying magnon energies near `Δ = 1` and their ED counterparts.

use num_complex::Complex64;

use super::{full_spectrum, sector_eigenvalues, XxzParams};
use crate::error::{Error, Result};
use crate::numerics::linear_fit;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnonEnergy {
    /// `−JL(1+δ)/4 + Jδ M(L−M)/(L−1)`.
    pub e_m: Complex64,
    /// `−J Re δ/(L−1)`, the level spacing at `M = L/2` for `Re δ < 0`.
    pub gap_gapless: f64,
    /// `J Re δ` for `Re δ > 0`.
    pub gap_gapped: f64,
}

pub fn magnon_energy_and_gap(sites: usize, m: usize, j: f64, delta: Complex64) -> Result<MagnonEnergy> {
    if sites < 2 || m > sites {
        return Err(Error::InvalidInput(format!("no sector M={m} for L={sites}")));
    }
    let l = sites as f64;
    let e0 = -(delta + 1.0) * (j * l / 4.0);
    let weight = (m * (sites - m)) as f64 / (l - 1.0);
    Ok(MagnonEnergy {
        e_m: e0 + delta * (j * weight),
        gap_gapless: -j * delta.re / (l - 1.0),
        gap_gapped: j * delta.re,
    })
}

/// Lowest-real-part eigenvalue of sector `m` relative to `E₀(Δ)`.
fn sector_minimum_shift(p: &XxzParams, m: usize) -> Result<Complex64> {
    Ok(sector_eigenvalues(p, m)?[0] - p.polarized_energy())
}

/// Central difference of `E_min,M(δ) − E₀(δ)` at `δ = 0`.
pub fn ed_energy_slope(sites: usize, m: usize, j: f64, step: f64) -> Result<f64> {
    let p = XxzParams::new(j, Complex64::from(1.0), sites)?;
    let plus = sector_minimum_shift(&p.with_anisotropy(Complex64::from(1.0 + step)), m)?;
    let minus = sector_minimum_shift(&p.with_anisotropy(Complex64::from(1.0 - step)), m)?;
    Ok(((plus - minus) / (2.0 * step)).re)
}

/// Distance between the two lowest distinct real parts of the full spectrum.
pub fn ed_gap(p: &XxzParams) -> Result<f64> {
    let mut re: Vec<f64> = full_spectrum(p)?
        .into_iter()
        .flat_map(|s| s.eigenvalues.into_iter().map(|e| e.re))
        .collect();
    re.sort_by(f64::total_cmp);
    let tol = 1e-9 * (1.0 + re[0].abs());
    re.iter()
        .find(|&&e| e - re[0] > tol)
        .map(|e| e - re[0])
        .ok_or_else(|| Error::Domain("spectrum has a single distinct level".into()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SusceptibilityRow {
    pub delta: f64,
    pub h: f64,
    /// Continuous minimizer `L/2 + h(L−1)/(2Jδ)`.
    pub m_star: f64,
    /// `2 s_z/h` per site from the continuous minimizer.
    pub chi: f64,
    /// Same from the best integer `M`.
    pub chi_integer: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SusceptibilityResult {
    /// `h → 0` value per δ, `−(L−1)/(LJδ)`.
    pub chi_zero_field: Vec<(f64, f64)>,
    pub sigma: f64,
    pub rows: Vec<SusceptibilityRow>,
}

/// Magnetic response from minimizing `E_M − h(L/2 − M)` on the gapless side.
pub fn susceptibility_scaling(sites: usize, j: f64, deltas: &[f64], fields: &[f64]) -> Result<SusceptibilityResult> {
    if sites < 2 || !(j > 0.0) {
        return Err(Error::InvalidInput(format!("need L >= 2 and J > 0, got L={sites}, J={j}")));
    }
    if deltas.len() < 2 || deltas.iter().any(|&d| !(d < 0.0)) {
        return Err(Error::InvalidInput("need at least two detunings, all negative".into()));
    }
    if fields.iter().any(|&h| !(h > 0.0)) {
        return Err(Error::InvalidInput("fields must be positive".into()));
    }
    let l = sites as f64;
    let energy = |m: usize, delta: f64, h: f64| {
        j * delta * (m * (sites - m)) as f64 / (l - 1.0) - h * (l / 2.0 - m as f64)
    };
    let mut rows = Vec::new();
    for &delta in deltas {
        for &h in fields {
            let m_star = l / 2.0 + h * (l - 1.0) / (2.0 * j * delta);
            if !(m_star > 0.0 && m_star < l) {
                return Err(Error::Domain(format!(
                    "field h={h} pushes the minimizer to M*={m_star} outside (0, {sites}) at δ={delta}"
                )));
            }
            let m_int = (0..=sites)
                .min_by(|&a, &b| energy(a, delta, h).total_cmp(&energy(b, delta, h)))
                .expect("non-empty range");
            rows.push(SusceptibilityRow {
                delta,
                h,
                m_star,
                chi: 2.0 * (l / 2.0 - m_star) / (l * h),
                chi_integer: 2.0 * (l / 2.0 - m_int as f64) / (l * h),
            });
        }
    }
    let chi_zero_field: Vec<(f64, f64)> = deltas.iter().map(|&d| (d, -(l - 1.0) / (l * j * d))).collect();
    let x: Vec<f64> = chi_zero_field.iter().map(|(d, _)| d.abs().ln()).collect();
    let y: Vec<f64> = chi_zero_field.iter().map(|(_, c)| c.ln()).collect();
    let (slope, _, _) = linear_fit(&x, &y).ok_or_else(|| Error::Domain("degenerate δ grid".into()))?;
    Ok(SusceptibilityResult {
        chi_zero_field,
        sigma: -slope,
        rows,
    })
}
