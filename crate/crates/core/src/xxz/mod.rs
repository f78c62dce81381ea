//! Periodic spin-1/2 XXZ chain at complex anisotropy,
//!
//! ```text
//! H = −J Σ_{i=1}^{L} (S^x_i S^x_{i+1} + S^y_i S^y_{i+1} + Δ S^z_i S^z_{i+1}),
//! ```
//!
//! block-diagonalized by the number of down spins `M`.

pub mod energy;
pub mod sbae;
pub mod zeros;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{dense_eig, eig::eig_order, eigenvalues};

pub use energy::{
    ed_energy_slope, ed_gap, magnon_energy_and_gap, susceptibility_scaling, MagnonEnergy,
    SusceptibilityResult, SusceptibilityRow,
};
pub use sbae::{sbae_solve, sbae_solve_seeded, SbaeSolution};
pub use zeros::{
    locate_zeros_numeric, theorem1_polynomial, theorem1_zeros, zero_density, Provenance, SearchOptions,
    SearchWindow, Theorem1Check, ZeroEntry, ZeroLocus, ZeroPair,
    verify_theorem1,
};

/// Dense diagonalization limit on chain length.
pub const MAX_SITES: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XxzParams {
    pub j: f64,
    /// Anisotropy Δ.
    pub anisotropy: Complex64,
    pub sites: usize,
}

impl XxzParams {
    pub fn new(j: f64, anisotropy: Complex64, sites: usize) -> Result<Self> {
        if !(j > 0.0) || !j.is_finite() {
            return Err(Error::InvalidInput(format!("J must be positive, got {j}")));
        }
        if !anisotropy.re.is_finite() || !anisotropy.im.is_finite() {
            return Err(Error::InvalidInput("anisotropy must be finite".into()));
        }
        if !(2..=MAX_SITES).contains(&sites) {
            return Err(Error::InvalidInput(format!("L must be in 2..={MAX_SITES}, got {sites}")));
        }
        Ok(Self { j, anisotropy, sites })
    }

    /// `δ = Δ − 1`.
    pub fn detuning(&self) -> Complex64 {
        self.anisotropy - 1.0
    }

    /// Energy of the fully polarized states, `−JLΔ/4`.
    pub fn polarized_energy(&self) -> Complex64 {
        -self.anisotropy * (self.j * self.sites as f64 / 4.0)
    }

    pub fn with_anisotropy(&self, anisotropy: Complex64) -> Self {
        Self { anisotropy, ..*self }
    }
}

/// Basis states with `M` down spins; bit `i` set means site `i` is down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MagnonSector {
    pub sites: usize,
    pub m: usize,
    pub basis: Vec<u32>,
}

impl MagnonSector {
    pub fn new(sites: usize, m: usize) -> Result<Self> {
        if sites == 0 || sites > MAX_SITES || m > sites {
            return Err(Error::InvalidInput(format!("no sector M={m} for L={sites}")));
        }
        let basis = (0u32..1 << sites).filter(|b| b.count_ones() as usize == m).collect();
        Ok(Self { sites, m, basis })
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, state: u32) -> Option<usize> {
        self.basis.binary_search(&state).ok()
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Ising energy `Σ_bonds s^z_i s^z_{i+1}` of one basis state, bonds `i = 0..L`.
fn zz_sum(state: u32, sites: usize) -> f64 {
    (0..sites)
        .map(|i| {
            let a = (state >> i) & 1;
            let b = (state >> ((i + 1) % sites)) & 1;
            if a == b {
                0.25
            } else {
                -0.25
            }
        })
        .sum()
}

pub fn build_sector_hamiltonian(p: &XxzParams, sector: &MagnonSector) -> Result<DMatrix<Complex64>> {
    if sector.sites != p.sites {
        return Err(Error::InvalidInput(format!(
            "sector built for L={} used with L={}",
            sector.sites, p.sites
        )));
    }
    let l = p.sites;
    let dim = sector.dimension();
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for (col, &state) in sector.basis.iter().enumerate() {
        h[(col, col)] = -p.anisotropy * (p.j * zz_sum(state, l));
        for i in 0..l {
            let k = (i + 1) % l;
            if ((state >> i) ^ (state >> k)) & 1 == 1 {
                let flipped = state ^ (1 << i) ^ (1 << k);
                let row = sector.index_of(flipped).expect("flip conserves M");
                h[(row, col)] += Complex64::from(-0.5 * p.j);
            }
        }
    }
    Ok(h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectorSpectrum {
    pub m: usize,
    /// Sorted by real part, then imaginary part.
    pub eigenvalues: Vec<Complex64>,
}

fn sector_eigenvalues(p: &XxzParams, m: usize) -> Result<Vec<Complex64>> {
    let wrap = |e: Error| Error::Sector {
        sector: m,
        source: Box::new(e),
    };
    let sector = MagnonSector::new(p.sites, m)?;
    let h = build_sector_hamiltonian(p, &sector)?;
    eigenvalues(&h).map_err(wrap)
}

/// Every sector's eigenvalues, `M = 0..=L`.
pub fn full_spectrum(p: &XxzParams) -> Result<Vec<SectorSpectrum>> {
    (0..=p.sites)
        .into_par_iter()
        .map(|m| {
            Ok(SectorSpectrum {
                m,
                eigenvalues: sector_eigenvalues(p, m)?,
            })
        })
        .collect()
}

/// `Z = Σ_n e^{−βE_n}` stored as `e^{shift} · sum` with `max_n |term| = 1` inside `sum`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionValue {
    pub shift: f64,
    pub sum: Complex64,
}

impl PartitionValue {
    pub fn from_energies<'a>(energies: impl Iterator<Item = &'a Complex64> + Clone, beta: f64) -> Self {
        let shift = energies
            .clone()
            .map(|e| -beta * e.re)
            .fold(f64::NEG_INFINITY, f64::max);
        let sum = energies.map(|e| (-*e * beta - shift).exp()).sum();
        Self { shift, sum }
    }

    pub fn log_abs(&self) -> f64 {
        self.shift + self.sum.norm().ln()
    }

    pub fn phase(&self) -> f64 {
        self.sum.arg()
    }

    /// `|Z|` relative to the largest Boltzmann weight.
    pub fn residual(&self) -> f64 {
        self.sum.norm()
    }

    pub fn value(&self) -> Complex64 {
        self.sum * self.shift.exp()
    }
}

pub fn partition_function(p: &XxzParams, beta: f64) -> Result<PartitionValue> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidInput(format!("beta must be finite and non-negative, got {beta}")));
    }
    let spectrum = full_spectrum(p)?;
    Ok(PartitionValue::from_energies(
        spectrum.iter().flat_map(|s| s.eigenvalues.iter()),
        beta,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub m: usize,
    pub energy: Complex64,
    /// Normalized right eigenvector over the full `2^L` basis.
    pub state: Vec<Complex64>,
}

/// Right eigenvector with the smallest real energy; ties go to the smallest `M`.
pub fn ground_state(p: &XxzParams) -> Result<GroundState> {
    let spectrum = full_spectrum(p)?;
    let (m, _) = spectrum
        .iter()
        .map(|s| (s.m, s.eigenvalues[0]))
        .fold(None::<(usize, Complex64)>, |best, (m, e)| match best {
            Some((_, b)) if e.re >= b.re - 1e-10 * (1.0 + b.norm()) => best,
            _ => Some((m, e)),
        })
        .expect("at least one sector");
    let sector = MagnonSector::new(p.sites, m)?;
    let sys = dense_eig(&build_sector_hamiltonian(p, &sector)?).map_err(|e| Error::Sector {
        sector: m,
        source: Box::new(e),
    })?;
    let i = (0..sys.dim())
        .min_by(|&a, &b| eig_order(&sys.values[a], &sys.values[b]))
        .expect("non-empty sector");
    let v: DVector<Complex64> = sys.right.column(i).into_owned();
    let norm = v.norm();
    let mut state = vec![Complex64::default(); 1 << p.sites];
    for (amp, &b) in v.iter().zip(&sector.basis) {
        state[b as usize] = amp / norm;
    }
    Ok(GroundState {
        m,
        energy: sys.values[i],
        state,
    })
}
