//! Ground-state entanglement entropy from single-particle correlation
//! matrices (free fermions) and from Schmidt decompositions (spin chains).

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{dense_eig, eigenvalues, linear_fit, singular_values};
use crate::ssh::{dispersion, phase_diagnostics, SshParams, EXCEPTIONAL_RADIUS};

/// `|slope|` at or below this is classified as an area law.
pub const AREA_LAW_SLOPE: f64 = 0.05;

/// Which band is filled where `Re E_k = 0` and the two bands are `±i|E_k|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Filling {
    /// Fill `+i|E_k|`.
    ImPos,
    /// Fill `−i|E_k|`.
    ImNeg,
    /// Both bands filled everywhere; diagnostic only.
    Full,
}

impl Filling {
    pub fn as_str(&self) -> &'static str {
        match self {
            Filling::ImPos => "im_pos",
            Filling::ImNeg => "im_neg",
            Filling::Full => "full",
        }
    }
}

impl std::str::FromStr for Filling {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "im_pos" | "impos" | "ImPos" => Ok(Filling::ImPos),
            "im_neg" | "imneg" | "ImNeg" => Ok(Filling::ImNeg),
            "full" | "Full" => Ok(Filling::Full),
            _ => Err(Error::InvalidInput(format!("unknown filling {s:?}"))),
        }
    }
}

/// Expectation convention for correlations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// `⟨G_L| · |G_R⟩`
    LR,
    /// `⟨G_R| · |G_R⟩ / ⟨G_R|G_R⟩`
    RR,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    /// Row/column `2i + α` for cell `i`, sublattice `α ∈ {A, B}`.
    pub entries: DMatrix<Complex64>,
    pub convention: Convention,
    pub filling: Filling,
    /// Momentum grid offset actually used, `k_m = 2π(m + offset)/L`.
    pub grid_offset: f64,
}

impl CorrelationMatrix {
    pub fn new(entries: DMatrix<Complex64>, convention: Convention) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "correlation matrix must be square with even dimension, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("correlation matrix has non-finite entries".into()));
        }
        Ok(Self {
            entries,
            convention,
            filling: Filling::ImNeg,
            grid_offset: 0.5,
        })
    }

    pub fn cells(&self) -> usize {
        self.entries.nrows() / 2
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }
}

/// Projector onto the filled band(s) at momentum `k`, indexed `[α][β]`.
fn filled_projector(p: &SshParams, k: f64, filling: Filling, convention: Convention) -> Result<DMatrix<Complex64>> {
    let one = DMatrix::<Complex64>::identity(2, 2);
    if filling == Filling::Full {
        return Ok(one);
    }
    let e = dispersion(p, k);
    if e.norm() == 0.0 {
        return Err(Error::ExceptionalPoint {
            k,
            radius: EXCEPTIONAL_RADIUS,
        });
    }
    // Principal branch: −E has Re ≤ 0, and −i|E| on the Re E = 0 set.
    let target = if e.re == 0.0 && filling == Filling::ImPos { e } else { -e };
    let h = p.bloch_matrix(k);
    match convention {
        Convention::LR => Ok((h + one * target) / (target * 2.0)),
        Convention::RR => {
            let sys = dense_eig(&h)?;
            let i = (0..2)
                .min_by(|&a, &b| {
                    (sys.values[a] - target)
                        .norm()
                        .total_cmp(&(sys.values[b] - target).norm())
                })
                .expect("two eigenvalues");
            let r = sys.right.column(i).into_owned();
            let norm = r.norm_squared();
            Ok(&r * r.adjoint() / Complex64::from(norm))
        }
    }
}

fn grid_is_regular(p: &SshParams, cells: usize, offset: f64) -> bool {
    let ke = phase_diagnostics(p).exceptional_momentum;
    (0..cells).all(|m| {
        let k = 2.0 * PI * (m as f64 + offset) / cells as f64;
        let folded = crate::ssh::wrap_momentum(k).abs();
        let clear_of_ep = ke.map_or(true, |ke| (folded - ke).abs() >= EXCEPTIONAL_RADIUS);
        clear_of_ep && dispersion(p, k).norm() > 0.0
    })
}

/// Real-space correlation matrix of the first `la` cells of a ring of `cells` unit cells.
///
/// `C_{iα,jβ} = (1/L) Σ_m e^{ik_m(i−j)} P(k_m)_{αβ}` on the half-integer
/// grid `k_m = 2π(m+½)/L`, falling back to the integer grid if the former
/// touches an exceptional point. Entry `(a, b)` is `⟨c†_b c_a⟩`; the ring is
/// antiperiodic on the half-integer grid.
pub fn ssh_correlation_matrix(
    p: &SshParams,
    cells: usize,
    la: usize,
    filling: Filling,
    convention: Convention,
) -> Result<CorrelationMatrix> {
    if cells < 2 || cells % 2 != 0 {
        return Err(Error::InvalidInput(format!("number of cells must be even and ≥ 2, got {cells}")));
    }
    if la == 0 || la > cells / 2 {
        return Err(Error::InvalidInput(format!("subsystem must have 1..={} cells, got {la}", cells / 2)));
    }
    let offset = [0.5, 0.0]
        .into_iter()
        .find(|&o| grid_is_regular(p, cells, o))
        .ok_or_else(|| {
            Error::Domain(format!("every momentum grid of {cells} cells meets an exceptional point"))
        })?;

    let n = cells as f64;
    let projectors: Vec<(f64, DMatrix<Complex64>)> = (0..cells)
        .map(|m| {
            let k = 2.0 * PI * (m as f64 + offset) / n;
            filled_projector(p, k, filling, convention).map(|proj| (k, proj))
        })
        .collect::<Result<_>>()?;

    // Translation invariance: one block per separation d = i − j.
    let blocks: Vec<DMatrix<Complex64>> = (0..2 * la - 1)
        .map(|s| {
            let d = s as f64 - (la as f64 - 1.0);
            let mut acc = DMatrix::<Complex64>::zeros(2, 2);
            for (k, proj) in &projectors {
                acc += proj * Complex64::from_polar(1.0 / n, k * d);
            }
            acc
        })
        .collect();

    let mut entries = DMatrix::<Complex64>::zeros(2 * la, 2 * la);
    for i in 0..la {
        for j in 0..la {
            let block = &blocks[i + la - 1 - j];
            for a in 0..2 {
                for b in 0..2 {
                    entries[(2 * i + a, 2 * j + b)] = block[(a, b)];
                }
            }
        }
    }
    Ok(CorrelationMatrix {
        entries,
        convention,
        filling,
        grid_offset: offset,
    })
}

/// Binary entropy of the mode with `γ`-eigenvalue `x`, principal-branch logs.
pub fn h(x: Complex64) -> Complex64 {
    let one = Complex64::from(1.0);
    let term = |q: Complex64| {
        if (q * 2.0).norm() < 1e-14 {
            Complex64::default()
        } else {
            -q * q.ln()
        }
    };
    term((one + x) / 2.0) + term((one - x) / 2.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EEResult {
    pub s: Complex64,
    pub s_real: f64,
    /// Spectrum of `γ = I − 2C`.
    pub eigenvalues: Vec<Complex64>,
    pub subsystem_length: usize,
}

/// `S = Σ h(λ)` over the spectrum of `γ = I − 2C`.
pub fn ee_from_correlation(c: &CorrelationMatrix) -> Result<EEResult> {
    let dim = c.entries.nrows();
    let gamma = DMatrix::<Complex64>::identity(dim, dim) - &c.entries * Complex64::from(2.0);
    let eigenvalues = eigenvalues(&gamma)?;
    let s: Complex64 = eigenvalues.iter().map(|&l| h(l)).sum();
    Ok(EEResult {
        s,
        s_real: s.re,
        eigenvalues,
        subsystem_length: c.cells(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingLaw {
    SubareaLaw,
    AreaLaw,
    /// Negative slope beyond the area-law band; not expected physically.
    Indeterminate,
}

impl ScalingLaw {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScalingLaw::SubareaLaw => "subarea",
            ScalingLaw::AreaLaw => "area",
            ScalingLaw::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub classification: ScalingLaw,
    pub filling: Filling,
    pub points: Vec<(usize, EEResult)>,
}

pub fn classify_slope(slope: f64) -> ScalingLaw {
    if slope.abs() <= AREA_LAW_SLOPE {
        ScalingLaw::AreaLaw
    } else if slope > 0.0 {
        ScalingLaw::SubareaLaw
    } else {
        ScalingLaw::Indeterminate
    }
}

/// Fits `Re S = intercept + slope · ln L_A` over the given subsystem sizes.
pub fn ee_scaling_fit(p: &SshParams, cells: usize, subsystems: &[usize], filling: Filling) -> Result<ScalingFit> {
    let mut sizes = subsystems.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 5 || sizes[0] == 0 || sizes[sizes.len() - 1] < 4 * sizes[0] {
        return Err(Error::InvalidInput(
            "need at least 5 distinct subsystem sizes spanning a factor of 4".into(),
        ));
    }
    let points: Vec<(usize, EEResult)> = sizes
        .par_iter()
        .map(|&la| {
            let c = ssh_correlation_matrix(p, cells, la, filling, Convention::LR)?;
            Ok((la, ee_from_correlation(&c)?))
        })
        .collect::<Result<_>>()?;
    let x: Vec<f64> = points.iter().map(|(la, _)| (*la as f64).ln()).collect();
    let y: Vec<f64> = points.iter().map(|(_, r)| r.s_real).collect();
    let (slope, intercept, r2) =
        linear_fit(&x, &y).ok_or_else(|| Error::Domain("degenerate entanglement fit".into()))?;
    Ok(ScalingFit {
        slope,
        intercept,
        r2,
        classification: classify_slope(slope),
        filling,
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateEntropy {
    pub s: f64,
    /// Set when the input norm differed from 1 by more than 1e−10 and was rescaled.
    pub renormalized: bool,
}

/// Von Neumann entropy of sites `0..cut` for a pure state on `sites` spins.
///
/// Basis index bit `i` is the state of site `i`; the state is reshaped to a
/// `2^cut × 2^{sites−cut}` matrix whose singular values are the Schmidt
/// coefficients.
pub fn state_ee(state: &[Complex64], sites: usize, cut: usize) -> Result<StateEntropy> {
    if sites == 0 || sites > 30 || state.len() != 1usize << sites {
        return Err(Error::InvalidInput(format!(
            "state of length {} does not match {sites} sites",
            state.len()
        )));
    }
    if cut == 0 || cut >= sites {
        return Err(Error::InvalidInput(format!("cut must be in 1..{sites}, got {cut}")));
    }
    let norm = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::InvalidInput("state has zero or non-finite norm".into()));
    }
    let renormalized = (norm - 1.0).abs() > 1e-10;
    if renormalized {
        log::warn!("state_ee: input norm {norm} rescaled to 1");
    }
    let rows = 1usize << cut;
    let cols = 1usize << (sites - cut);
    let mut m = DMatrix::<Complex64>::zeros(rows, cols);
    for (idx, z) in state.iter().enumerate() {
        m[(idx & (rows - 1), idx >> cut)] = z / norm;
    }
    let s = singular_values(&m)?
        .into_iter()
        .map(|sv| sv * sv)
        .filter(|&w| w > 0.0)
        .map(|w| -w * w.ln())
        .sum::<f64>()
        + 0.0;
    Ok(StateEntropy { s, renormalized })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn h_values() {
        assert!(h(c(1.0, 0.0)).norm() < 1e-15);
        assert!(h(c(-1.0, 0.0)).norm() < 1e-15);
        assert!((h(c(0.0, 0.0)) - c(2f64.ln(), 0.0)).norm() < 1e-15);
        for x in [0.1, 0.5, 0.93] {
            assert!((h(c(x, 0.0)) - h(c(-x, 0.0))).norm() < 1e-15);
            assert!(h(c(x, 0.0)).re > 0.0);
        }
    }

    #[test]
    fn empty_correlations_have_no_entropy() {
        let cm = CorrelationMatrix::new(DMatrix::zeros(6, 6), Convention::LR).unwrap();
        let r = ee_from_correlation(&cm).unwrap();
        assert!(r.s.norm() < 1e-14);
    }

    #[test]
    fn full_filling_is_pure() {
        let p = SshParams::new(1.0, 1.0, 1.0).unwrap();
        let cm = ssh_correlation_matrix(&p, 40, 10, Filling::Full, Convention::LR).unwrap();
        let id = DMatrix::<Complex64>::identity(20, 20);
        assert!((&cm.entries - id).norm() < 1e-12);
        assert!(ee_from_correlation(&cm).unwrap().s.norm() < 1e-12);
    }

    #[test]
    fn half_filling_sum_rule() {
        let p = SshParams::new(1.0, 1.0, 1.0).unwrap();
        for filling in [Filling::ImPos, Filling::ImNeg] {
            let cm = ssh_correlation_matrix(&p, 200, 20, filling, Convention::LR).unwrap();
            assert!((cm.trace() - c(20.0, 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn hermitian_gamma_is_bounded() {
        let p = SshParams::new(0.0, 1.7, 1.0).unwrap();
        let cm = ssh_correlation_matrix(&p, 60, 12, Filling::ImNeg, Convention::LR).unwrap();
        assert!((&cm.entries - cm.entries.adjoint()).norm() < 1e-12);
        for l in ee_from_correlation(&cm).unwrap().eigenvalues {
            assert!(l.im.abs() < 1e-10 && l.re.abs() <= 1.0 + 1e-10);
        }
    }

    #[test]
    fn conventions_agree_in_hermitian_limit() {
        let p = SshParams::new(0.0, 0.8, 1.3).unwrap();
        let lr = ssh_correlation_matrix(&p, 30, 6, Filling::ImNeg, Convention::LR).unwrap();
        let rr = ssh_correlation_matrix(&p, 30, 6, Filling::ImNeg, Convention::RR).unwrap();
        assert!((&lr.entries - &rr.entries).norm() < 1e-12);
    }

    #[test]
    fn bad_sizes_are_rejected() {
        let p = SshParams::new(0.0, 1.0, 2.0).unwrap();
        assert!(ssh_correlation_matrix(&p, 31, 4, Filling::ImNeg, Convention::LR).is_err());
        assert!(ssh_correlation_matrix(&p, 30, 16, Filling::ImNeg, Convention::LR).is_err());
        assert!(ee_scaling_fit(&p, 100, &[2, 3, 4, 5, 6], Filling::ImNeg).is_err());
    }

    #[test]
    fn grid_falls_back_when_half_offset_hits_exceptional_point() {
        // k_E = π/2 exactly lands on k_m = 2π(m+½)/L for L = 2 (m = 0).
        let (v, w) = (1.0f64, 1.0f64);
        let u = (v * v + w * w).sqrt();
        let p = SshParams::new(u, v, w).unwrap();
        let cm = ssh_correlation_matrix(&p, 2, 1, Filling::ImNeg, Convention::LR).unwrap();
        assert_eq!(cm.grid_offset, 0.0);
    }

    #[test]
    fn singlet_and_product_states() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // Basis index bit i = site i; |↑↓⟩ − |↓↑⟩ with ↓ = 1.
        let singlet = vec![c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)];
        let r = state_ee(&singlet, 2, 1).unwrap();
        assert!((r.s - 2f64.ln()).abs() < 1e-12);
        assert!(!r.renormalized);

        let mut up = vec![c(0.0, 0.0); 16];
        up[0] = c(1.0, 0.0);
        assert!(state_ee(&up, 4, 2).unwrap().s.abs() < 1e-12);

        let scaled: Vec<Complex64> = singlet.iter().map(|z| z * 3.0).collect();
        let r = state_ee(&scaled, 2, 1).unwrap();
        assert!(r.renormalized);
        assert!((r.s - 2f64.ln()).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn cut_symmetry(raw in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64), cut in 1usize..6) {
            let state: Vec<Complex64> = raw.iter().map(|&(a, b)| c(a, b)).collect();
            // Entropy of A equals that of its complement; compare with the reversed site order.
            let reversed: Vec<Complex64> = (0..64usize)
                .map(|idx| state[(0..6).fold(0, |acc, i| acc | (((idx >> i) & 1) << (5 - i)))])
                .collect();
            let a = state_ee(&state, 6, cut).unwrap().s;
            let b = state_ee(&reversed, 6, 6 - cut).unwrap().s;
            prop_assert!((a - b).abs() < 1e-10);
        }

        #[test]
        fn product_states_are_unentangled(
            left in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8),
            right in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4),
        ) {
            let state: Vec<Complex64> = (0..32usize)
                .map(|idx| c(left[idx & 7].0, left[idx & 7].1) * c(right[idx >> 3].0, right[idx >> 3].1))
                .collect();
            prop_assume!(state.iter().any(|z| z.norm() > 1e-3));
            prop_assert!(state_ee(&state, 5, 3).unwrap().s.abs() < 1e-10);
        }
    }
}
