//! Non-Hermitian SSH chain with a staggered imaginary potential `±iu`.
//!
//! Bloch Hamiltonian
//!
//! ```text
//! H_k = [[ iu,              v + w e^{-ik} ],
//!        [ v + w e^{ik},   -iu           ]]
//! ```
//!
//! with bands `±E_k`, `E_k = √(|v + w e^{ik}|² − u²)`.

pub mod corr;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub use corr::{
    corr_asymptotic, corr_momentum, corr_real, correlation_length, critical_distance, fit_exponents,
    Channel, CorrSeries, ExponentFit, Temperature, XiRow,
};

/// Chemical potential; the partition function is taken at half filling.
pub const CHEMICAL_POTENTIAL: f64 = 0.0;

/// Momenta closer than this to an exceptional point are rejected.
pub const EXCEPTIONAL_RADIUS: f64 = 1e-8;

/// `|w − v| = u` is treated as the phase boundary within this tolerance.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Above this `|Re βE|`, partition factors are evaluated in the log domain.
pub const LOG_DOMAIN_THRESHOLD: f64 = 300.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SshParams {
    /// Imaginary staggered potential.
    pub u: f64,
    /// Intracell hopping.
    pub v: f64,
    /// Intercell hopping.
    pub w: f64,
}

impl SshParams {
    pub fn new(u: f64, v: f64, w: f64) -> Result<Self> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if !ok(u) || !ok(v) || !ok(w) {
            return Err(Error::InvalidInput(format!(
                "SSH parameters must be finite and non-negative, got u={u}, v={v}, w={w}"
            )));
        }
        if v == 0.0 && w == 0.0 {
            return Err(Error::InvalidInput("at least one of v, w must be positive".into()));
        }
        Ok(Self { u, v, w })
    }

    /// Upper off-diagonal Bloch element `v_k = v + w e^{−ik}`.
    pub fn hopping(&self, k: f64) -> Complex64 {
        Complex64::from(self.v) + Complex64::from_polar(self.w, -k)
    }

    /// `|v_k|² = v² + w² + 2vw cos k`.
    pub fn hopping_sq(&self, k: f64) -> f64 {
        self.v * self.v + self.w * self.w + 2.0 * self.v * self.w * k.cos()
    }

    pub fn bloch_matrix(&self, k: f64) -> DMatrix<Complex64> {
        let vk = self.hopping(k);
        DMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(0.0, self.u), vk, vk.conj(), Complex64::new(0.0, -self.u)],
        )
    }

    /// Largest imaginary band energy, `√(u² − (v−w)²)`, when the chain is PT-broken.
    pub fn max_imaginary_energy(&self) -> Option<f64> {
        let d = self.v - self.w;
        let s = self.u * self.u - d * d;
        (s > 0.0).then(|| s.sqrt())
    }
}

/// Upper band energy on the principal branch: `Re E ≥ 0`, and `Im E ≥ 0`
/// where `Re E = 0`.
pub fn dispersion(p: &SshParams, k: f64) -> Complex64 {
    let e2 = p.hopping_sq(k) - p.u * p.u;
    if e2 >= 0.0 {
        Complex64::new(e2.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-e2).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseLabel {
    TrivialPTUnbroken,
    PTBrokenGapless,
    TopologicalPTUnbroken,
    Boundary,
}

impl PhaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            PhaseLabel::TrivialPTUnbroken => "trivial_pt_unbroken",
            PhaseLabel::PTBrokenGapless => "pt_broken_gapless",
            PhaseLabel::TopologicalPTUnbroken => "topological_pt_unbroken",
            PhaseLabel::Boundary => "boundary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDiagnosis {
    pub label: PhaseLabel,
    /// `2√((w−v)² − u²)` in the gapped phases, zero otherwise.
    pub gap: f64,
    /// `k_E ∈ (0, π]`; the exceptional points sit at `±k_E`.
    pub exceptional_momentum: Option<f64>,
    /// Set when the chain is PT-broken but `k_E` is undefined: either `vw = 0`
    /// or `u ≥ v + w`, in which case every momentum is PT-broken.
    pub exceptional_omitted: bool,
}

pub fn phase_diagnostics(p: &SshParams) -> PhaseDiagnosis {
    let d = p.w - p.v;
    let label = if (d.abs() - p.u).abs() <= BOUNDARY_TOL {
        PhaseLabel::Boundary
    } else if d < -p.u {
        PhaseLabel::TrivialPTUnbroken
    } else if d > p.u {
        PhaseLabel::TopologicalPTUnbroken
    } else {
        PhaseLabel::PTBrokenGapless
    };
    let gap = match label {
        PhaseLabel::TrivialPTUnbroken | PhaseLabel::TopologicalPTUnbroken => {
            2.0 * (d * d - p.u * p.u).sqrt()
        }
        _ => 0.0,
    };
    let mut exceptional_momentum = None;
    let mut exceptional_omitted = false;
    if label == PhaseLabel::PTBrokenGapless {
        let vw = p.v * p.w;
        let cos_ke = (p.u * p.u - p.v * p.v - p.w * p.w) / (2.0 * vw);
        if vw > 0.0 && cos_ke < 1.0 {
            exceptional_momentum = Some(cos_ke.max(-1.0).acos());
        } else {
            exceptional_omitted = true;
        }
    }
    PhaseDiagnosis {
        label,
        gap,
        exceptional_momentum,
        exceptional_omitted,
    }
}

/// Folds a momentum into `[−π, π)`.
pub fn wrap_momentum(k: f64) -> f64 {
    (k + PI).rem_euclid(2.0 * PI) - PI
}

/// Rejects momenta within [`EXCEPTIONAL_RADIUS`] of `±k_E` or where `E_k = 0`.
pub fn check_regular_momentum(p: &SshParams, k: f64) -> Result<()> {
    let diag = phase_diagnostics(p);
    if let Some(ke) = diag.exceptional_momentum {
        let kk = wrap_momentum(k).abs();
        if (kk - ke).abs() < EXCEPTIONAL_RADIUS {
            return Err(Error::ExceptionalPoint {
                k,
                radius: EXCEPTIONAL_RADIUS,
            });
        }
    }
    if dispersion(p, k).norm() == 0.0 {
        return Err(Error::ExceptionalPoint {
            k,
            radius: EXCEPTIONAL_RADIUS,
        });
    }
    Ok(())
}

/// Log of one momentum's partition factor `(1+e^{−βE_k})(1+e^{βE_k})`.
///
/// Returns `−∞` (real part) at exact zeros.
pub fn mode_partition_log(p: &SshParams, k: f64, beta: f64) -> Result<Complex64> {
    if !(beta > 0.0) {
        return Err(Error::InvalidInput(format!("beta must be positive, got {beta}")));
    }
    let mut a = dispersion(p, k) * beta;
    // Z_k is even in a, so fold onto Re a ≥ 0.
    if a.re < 0.0 {
        a = -a;
    }
    if a.re > LOG_DOMAIN_THRESHOLD {
        // Z = e^{a} (1 + e^{−a})²
        let tail = (Complex64::from(1.0) + (-a).exp()).ln();
        return Ok(a + tail * 2.0);
    }
    let z = (Complex64::from(1.0) + (-a).exp()) * (Complex64::from(1.0) + a.exp());
    Ok(z.ln())
}

/// `(1+e^{−βE_k})(1+e^{βE_k})`; overflows to infinity only when the true
/// value does.
pub fn mode_partition_factor(p: &SshParams, k: f64, beta: f64) -> Result<Complex64> {
    let a = dispersion(p, k) * beta;
    if !(beta > 0.0) {
        return Err(Error::InvalidInput(format!("beta must be positive, got {beta}")));
    }
    if a.re.abs() <= LOG_DOMAIN_THRESHOLD {
        return Ok((Complex64::from(1.0) + (-a).exp()) * (Complex64::from(1.0) + a.exp()));
    }
    Ok(mode_partition_log(p, k, beta)?.exp())
}

/// One momentum/Matsubara-index pair satisfying `E_k = i(2n+1)π/β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroEntry {
    pub k: f64,
    pub n: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SshZeroSet {
    pub beta: f64,
    pub entries: Vec<ZeroEntry>,
    pub chi: usize,
}

impl SshZeroSet {
    /// Zero-temperature density `β/(2π) · √(u² − (v−w)²)`.
    pub fn asymptotic_chi(p: &SshParams, beta: f64) -> f64 {
        p.max_imaginary_energy().unwrap_or(0.0) * beta / (2.0 * PI)
    }
}

/// Momentum in `[k_lo, π]` where `Im E_k` equals `target`, by bisection.
fn momentum_for_imaginary_energy(p: &SshParams, k_lo: f64, target: f64) -> f64 {
    // Im E_k = √(u² − |v_k|²) increases on [k_E, π].
    let g = |k: f64| p.u * p.u - p.hopping_sq(k) - target * target;
    let (mut lo, mut hi) = (k_lo, PI);
    if g(hi) <= 0.0 {
        return PI;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Enumerates the Yang-Lee zeros `Re E_k = 0, Im E_k = (2n+1)π/β` for `n ≥ 0`.
///
/// When `u > v + w` the whole zone is PT-broken and `Im E_k` never drops
/// below `√(u² − (v+w)²)`; Matsubara levels under that floor have no zero.
pub fn yang_lee_root_count(p: &SshParams, beta: f64) -> Result<SshZeroSet> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidInput(format!("beta must be positive and finite, got {beta}")));
    }
    let mut entries = Vec::new();
    if let Some(e_max) = p.max_imaginary_energy() {
        let diag = phase_diagnostics(p);
        let k_lo = diag.exceptional_momentum.unwrap_or(0.0);
        let e_min = dispersion(p, k_lo).im;
        let mut n = 0u64;
        loop {
            let target = (2 * n + 1) as f64 * PI / beta;
            if target > e_max {
                break;
            }
            if target < e_min {
                n += 1;
                continue;
            }
            let k = if p.v * p.w > 0.0 {
                momentum_for_imaginary_energy(p, k_lo, target)
            } else {
                PI
            };
            entries.push(ZeroEntry { k, n });
            n += 1;
        }
    }
    let chi = entries.len();
    Ok(SshZeroSet { beta, entries, chi })
}

/// Hopping pair with the requested `w − v`, both at least `base`.
pub fn params_for_detuning(u: f64, w_minus_v: f64, base: f64) -> Result<SshParams> {
    SshParams::new(u, base + (-w_minus_v).max(0.0), base + w_minus_v.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanCell {
    pub w_minus_v: f64,
    pub temperature: f64,
    pub has_zeros: bool,
    pub chi: usize,
}

/// Where a scan row switches between zero-free and zero-carrying cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub temperature: f64,
    /// Midpoint between the two cells that differ.
    pub w_minus_v: f64,
    /// `true` when zeros appear moving toward larger `w − v`.
    pub onset: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionScan {
    pub u: f64,
    pub w_minus_v: Vec<f64>,
    pub temperatures: Vec<f64>,
    /// Row-major: `cells[i_T][i_d]`.
    pub cells: Vec<Vec<ScanCell>>,
    pub boundary: Vec<BoundaryPoint>,
}

impl RegionScan {
    pub fn row(&self, temperature: f64) -> Option<&[ScanCell]> {
        self.temperatures
            .iter()
            .position(|&t| t == temperature)
            .map(|i| self.cells[i].as_slice())
    }
}

/// Scans the (w − v, T) plane for Yang-Lee zeros at fixed `u`.
///
/// Rows are evaluated in parallel and returned in input order.
pub fn zeros_region_scan(u: f64, w_minus_v: &[f64], temperatures: &[f64]) -> Result<RegionScan> {
    if temperatures.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
        return Err(Error::InvalidInput("temperatures must be positive and finite".into()));
    }
    if w_minus_v.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidInput("detuning grid must be finite".into()));
    }
    let cells: Vec<Vec<ScanCell>> = temperatures
        .par_iter()
        .map(|&t| {
            w_minus_v
                .iter()
                .map(|&d| {
                    let p = params_for_detuning(u, d, 1.0)?;
                    let set = yang_lee_root_count(&p, 1.0 / t)?;
                    Ok(ScanCell {
                        w_minus_v: d,
                        temperature: t,
                        has_zeros: set.chi > 0,
                        chi: set.chi,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut boundary = Vec::new();
    for row in &cells {
        for pair in row.windows(2) {
            if pair[0].has_zeros != pair[1].has_zeros {
                boundary.push(BoundaryPoint {
                    temperature: pair[0].temperature,
                    w_minus_v: 0.5 * (pair[0].w_minus_v + pair[1].w_minus_v),
                    onset: pair[1].has_zeros,
                });
            }
        }
    }
    Ok(RegionScan {
        u,
        w_minus_v: w_minus_v.to_vec(),
        temperatures: temperatures.to_vec(),
        cells,
        boundary,
    })
}
