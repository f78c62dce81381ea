//! Two-point functions `C_{αβ}(x) = ⟨c†_{0α} c_{xβ}⟩` in the biorthogonal
//! ground state and their critical behavior.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::{check_regular_momentum, dispersion, SshParams};
use crate::error::{Error, Result};
use crate::numerics::quad::{adaptive_integrate_panels, oscillatory_panels};
use crate::numerics::{bessel_k0, least_squares, linear_fit};

/// Absolute tolerance of the momentum integral in [`corr_real`].
pub const CORR_QUAD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    AA,
    AB,
    BA,
    BB,
}

impl Channel {
    pub const ALL: [Channel; 4] = [Channel::AA, Channel::AB, Channel::BA, Channel::BB];

    fn indices(self) -> (usize, usize) {
        match self {
            Channel::AA => (0, 0),
            Channel::AB => (0, 1),
            Channel::BA => (1, 0),
            Channel::BB => (1, 1),
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Channel::AA => "AA",
            Channel::AB => "AB",
            Channel::BA => "BA",
            Channel::BB => "BB",
        };
        f.write_str(s)
    }
}

impl FromStr for Channel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "AA" => Ok(Channel::AA),
            "AB" => Ok(Channel::AB),
            "BA" => Ok(Channel::BA),
            "BB" => Ok(Channel::BB),
            _ => Err(Error::InvalidInput(format!("unknown channel {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Temperature {
    /// Lower band `−E_k` filled.
    Zero,
    Inverse(f64),
}

/// `tanh(z/2)` without overflow for large `|Re z|`.
fn tanh_half(z: Complex64) -> Complex64 {
    let (sign, z) = if z.re < 0.0 { (-1.0, -z) } else { (1.0, z) };
    let e = (-z).exp();
    (Complex64::from(1.0) - e) / (Complex64::from(1.0) + e) * sign
}

/// `⟨c†_{kα} c_{kβ}⟩` for the requested channel.
///
/// With `P_±` the biorthogonal band projectors,
/// `C(k) = 1/2 − tanh(βE/2) H_kᵀ / (2E)`; at zero temperature the
/// hyperbolic factor is replaced by 1, giving e.g. `C_AA = (1 − iu/E)/2`.
pub fn corr_momentum(p: &SshParams, k: f64, temperature: Temperature, channel: Channel) -> Result<Complex64> {
    check_regular_momentum(p, k)?;
    let e = dispersion(p, k);
    let weight = match temperature {
        Temperature::Zero => Complex64::from(1.0),
        Temperature::Inverse(beta) => {
            if !(beta > 0.0) {
                return Err(Error::InvalidInput(format!("beta must be positive, got {beta}")));
            }
            tanh_half(e * beta)
        }
    };
    if !weight.re.is_finite() || !weight.im.is_finite() {
        return Err(Error::Domain(format!("Fermi factor diverges at k={k}")));
    }
    let (a, b) = channel.indices();
    // C_{αβ} pairs with H_{βα}.
    let h = p.bloch_matrix(k)[(b, a)];
    let diag = if a == b { 0.5 } else { 0.0 };
    Ok(Complex64::from(diag) - weight * h / (e * 2.0))
}

/// Real-space ground-state correlation `∫ dk/2π C(k) e^{ikx}` by adaptive quadrature.
pub fn corr_real(p: &SshParams, x: i64, channel: Channel) -> Result<Complex64> {
    if (p.v - p.w).abs() <= p.u {
        return Err(Error::InvalidInput(format!(
            "real-space correlations need a gapped chain, |v−w| > u (u={}, v={}, w={})",
            p.u, p.v, p.w
        )));
    }
    let xf = x as f64;
    let failure = std::cell::Cell::new(None);
    let q = adaptive_integrate_panels(
        |k| match corr_momentum(p, k, Temperature::Zero, channel) {
            Ok(c) => c * Complex64::from_polar(1.0, k * xf),
            Err(e) => {
                failure.set(Some(e));
                Complex64::from(f64::NAN)
            }
        },
        -PI,
        PI,
        CORR_QUAD_TOL * 2.0 * PI,
        oscillatory_panels(2.0 * PI, xf).max(4),
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(q?.value / (2.0 * PI))
}

/// Distance `δ = |v−w| − u` to the nearest transition; errors unless positive.
pub fn critical_distance(p: &SshParams) -> Result<f64> {
    let delta = (p.v - p.w).abs() - p.u;
    if !(delta > 0.0) || p.u <= 0.0 || p.v * p.w <= 0.0 {
        return Err(Error::Domain(format!(
            "asymptotics need u > 0, vw > 0 and |v−w| > u (u={}, v={}, w={})",
            p.u, p.v, p.w
        )));
    }
    Ok(delta)
}

/// Decay length set by the branch point of `E_k` nearest the real axis,
/// `k = π + i/ξ` with `cosh(1/ξ) = 1 + ((v−w)² − u²)/(2vw)`.
///
/// Near the transition `ξ ≈ √(vw/(2uδ))`.
pub fn correlation_length(p: &SshParams) -> Result<f64> {
    critical_distance(p)?;
    let d = p.v - p.w;
    let arg = (d * d - p.u * p.u) / (2.0 * p.v * p.w);
    // arccosh(1 + a) = ln(1 + a + √(a(2 + a))), stable for small a
    Ok(1.0 / (arg + (arg * (2.0 + arg)).sqrt()).ln_1p())
}

/// Large-distance form of [`corr_real`] from the expansion around `k = π`.
///
/// ```text
/// C_AA ≈ −e^{iπx} iu/(2π√(vw)) K₀(x/ξ) = −C_BB
/// C_AB ≈ −e^{iπx} [v K₀(x/ξ) − w K₀((x+1)/ξ)] / (2π√(vw))
/// C_BA ≈ −e^{iπx} [v K₀(x/ξ) − w K₀((x−1)/ξ)] / (2π√(vw))
/// ```
///
/// The off-diagonal forms follow from the exact lattice identity
/// `iu C_AB(x) = v C_AA(x) + w C_AA(x+1)` (and `x−1` for BA), valid for `x ≠ 0, −1`.
pub fn corr_asymptotic(p: &SshParams, x: f64, channel: Channel) -> Result<Complex64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("asymptotic form needs x > 0, got {x}")));
    }
    let xi = correlation_length(p)?;
    let k0 = bessel_k0(x / xi)?;
    let scale = 2.0 * PI * (p.v * p.w).sqrt();
    let phase = Complex64::from_polar(1.0, PI * x);
    let amplitude = match channel {
        Channel::AA => Complex64::new(0.0, -p.u * k0),
        Channel::BB => Complex64::new(0.0, p.u * k0),
        Channel::AB | Channel::BA => {
            let shift = if channel == Channel::AB { 1.0 } else { -1.0 };
            let neighbour = bessel_k0((x + shift) / xi)?;
            Complex64::from(-(p.v * k0 - p.w * neighbour))
        }
    };
    Ok(phase * amplitude / scale)
}

/// Correlation samples at one parameter point, ready for [`fit_exponents`].
#[derive(Debug, Clone)]
pub struct CorrSeries {
    pub params: SshParams,
    pub delta: f64,
    pub xs: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl CorrSeries {
    /// Samples [`corr_real`] at every integer `x` in `[lo·ξ, hi·ξ]`.
    pub fn sample(p: &SshParams, channel: Channel, lo: f64, hi: f64) -> Result<Self> {
        let delta = critical_distance(p)?;
        let xi = correlation_length(p)?;
        let first = (lo * xi).ceil().max(1.0) as i64;
        let last = (hi * xi).floor() as i64;
        let mut xs = Vec::new();
        let mut values = Vec::new();
        for x in first..=last {
            xs.push(x as f64);
            values.push(corr_real(p, x, channel)?);
        }
        Ok(Self {
            params: *p,
            delta,
            xs,
            values,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiRow {
    pub delta: f64,
    pub xi_fit: f64,
    /// [`correlation_length`] at the same parameters.
    pub xi_exact: f64,
    /// Power `p` in `|C| ∝ e^{−x/ξ} x^{−p}`.
    pub power: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFit {
    pub nu: f64,
    pub eta: f64,
    /// Mean fitted decay power, sign included (−1/2 for `1/√x`).
    pub decay_power: f64,
    pub nu_r2: f64,
    pub xi_table: Vec<XiRow>,
    /// Set when any per-δ fit or the ν fit has R² below [`FIT_R2_MIN`].
    pub warning: bool,
}

pub const FIT_R2_MIN: f64 = 0.999;

/// Fits `ln|C| = a − x/ξ − p ln x + b/x` per series, then `ln(1/ξ)` against `ln δ`.
///
/// The `b/x` term absorbs the leading correction to the Bessel asymptote;
/// without it `p` is biased low by about 0.04 on windows starting at 3ξ.
pub fn fit_exponents(series: &[CorrSeries]) -> Result<ExponentFit> {
    if series.len() < 2 {
        return Err(Error::InvalidInput("need at least two δ values".into()));
    }
    let mut xi_table = Vec::with_capacity(series.len());
    for s in series {
        if s.xs.len() < 6 || s.xs.len() != s.values.len() {
            return Err(Error::InvalidInput(format!(
                "series at δ={} has {} points, need at least 6",
                s.delta,
                s.xs.len()
            )));
        }
        let design: Vec<Vec<f64>> = s.xs.iter().map(|&x| vec![1.0, -x, -x.ln(), 1.0 / x]).collect();
        let y: Vec<f64> = s.values.iter().map(|c| c.norm().ln()).collect();
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("vanishing correlation in series at δ={}", s.delta)));
        }
        let (beta, r2) = least_squares(&design, &y)
            .ok_or_else(|| Error::Domain(format!("singular fit at δ={}", s.delta)))?;
        xi_table.push(XiRow {
            delta: s.delta,
            xi_fit: 1.0 / beta[1],
            xi_exact: correlation_length(&s.params)?,
            power: beta[2],
            r2,
        });
    }
    let log_delta: Vec<f64> = xi_table.iter().map(|r| r.delta.ln()).collect();
    let log_inv_xi: Vec<f64> = xi_table.iter().map(|r| (1.0 / r.xi_fit).ln()).collect();
    let (nu, _, nu_r2) = linear_fit(&log_delta, &log_inv_xi)
        .ok_or_else(|| Error::Domain("degenerate δ grid".into()))?;
    let power = xi_table.iter().map(|r| r.power).sum::<f64>() / xi_table.len() as f64;
    let warning = nu_r2 < FIT_R2_MIN || xi_table.iter().any(|r| r.r2 < FIT_R2_MIN);
    Ok(ExponentFit {
        nu,
        eta: power + 1.0,
        decay_power: -power,
        nu_r2,
        xi_table,
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::dense_eig;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `C_{αβ}(k) = P_{βα}` with `P` the biorthogonal projector onto the
    /// eigenvalue `−E_k`, built from left and right eigenvectors.
    fn projector_oracle(p: &SshParams, k: f64, channel: Channel) -> Complex64 {
        let sys = dense_eig(&p.bloch_matrix(k)).unwrap();
        let target = -dispersion(p, k);
        let i = (0..2)
            .min_by(|&a, &b| (sys.values[a] - target).norm().total_cmp(&(sys.values[b] - target).norm()))
            .unwrap();
        let r = sys.right.column(i);
        let l = sys.left.column(i);
        let (a, b) = channel.indices();
        r[b] * l[a].conj()
    }

    #[test]
    fn hermitian_momentum_values() {
        let p = SshParams::new(0.0, 2.0, 1.0).unwrap();
        for k in [-2.5, 0.3, 1.0, 3.0] {
            let aa = corr_momentum(&p, k, Temperature::Zero, Channel::AA).unwrap();
            assert!((aa - c(0.5, 0.0)).norm() < 1e-15);
            let ab = corr_momentum(&p, k, Temperature::Zero, Channel::AB).unwrap();
            let vk = p.hopping(k);
            assert!((ab + vk.conj() / (2.0 * vk.norm())).norm() < 1e-15);
        }
    }

    #[test]
    fn off_diagonal_relation() {
        let p = SshParams::new(1e-6, 2.0, 1.0).unwrap();
        let vk = p.hopping(1.0);
        let ab = corr_momentum(&p, 1.0, Temperature::Zero, Channel::AB).unwrap();
        let ba = corr_momentum(&p, 1.0, Temperature::Zero, Channel::BA).unwrap();
        assert!((ab - ba * vk.conj() / vk).norm() < 1e-14);
    }

    #[test]
    fn exceptional_point_is_rejected() {
        let p = SshParams::new(1.0, 1.0, 1.0).unwrap();
        let ke = 2.0 * PI / 3.0;
        assert!(matches!(
            corr_momentum(&p, ke + 1e-10, Temperature::Zero, Channel::AA),
            Err(Error::ExceptionalPoint { .. })
        ));
        assert!(corr_momentum(&p, ke + 1e-3, Temperature::Zero, Channel::AA).is_ok());
    }

    #[test]
    fn low_temperature_matches_ground_state() {
        let p = SshParams::new(1.0, 2.5, 1.0).unwrap();
        for ch in Channel::ALL {
            let t0 = corr_momentum(&p, 0.7, Temperature::Zero, ch).unwrap();
            let cold = corr_momentum(&p, 0.7, Temperature::Inverse(1e4), ch).unwrap();
            assert!((t0 - cold).norm() < 1e-14);
        }
        // Infinite temperature: half occupation, no coherence.
        let hot = corr_momentum(&p, 0.7, Temperature::Inverse(1e-12), Channel::AB).unwrap();
        assert!(hot.norm() < 1e-11);
    }

    #[test]
    fn hermitian_real_space_is_local() {
        let p = SshParams::new(0.0, 2.0, 1.0).unwrap();
        for x in 1..6 {
            assert!(corr_real(&p, x, Channel::AA).unwrap().norm() <= 1e-9);
        }
        let c0 = corr_real(&p, 0, Channel::AA).unwrap();
        assert!((c0 - c(0.5, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn correlation_length_examples() {
        let p = SshParams::new(1.0, 2.0, 0.9).unwrap();
        let xi = correlation_length(&p).unwrap();
        let near = (p.v * p.w / (2.0 * p.u * 0.1)).sqrt();
        assert!((xi / near - 1.0).abs() < 0.05);
        // Exact branch point: E² vanishes at k = π + i/ξ.
        let k = Complex64::new(PI, 1.0 / xi);
        let e2 = p.v * p.v + p.w * p.w + (k.cos() * 2.0 * p.v * p.w) - p.u * p.u;
        assert!(e2.norm() < 1e-12);
        assert!(correlation_length(&SshParams::new(1.0, 1.5, 1.0).unwrap()).is_err());
    }

    #[test]
    fn asymptotic_bb_is_minus_aa() {
        let p = SshParams::new(1.0, 2.1, 1.0).unwrap();
        for x in [0.5, 3.0, 17.0] {
            let aa = corr_asymptotic(&p, x, Channel::AA).unwrap();
            let bb = corr_asymptotic(&p, x, Channel::BB).unwrap();
            assert!((aa + bb).norm() < 1e-15);
        }
    }

    #[test]
    fn quadrature_tracks_asymptote() {
        for delta in [0.02, 0.05, 0.1] {
            let p = SshParams::new(1.0, 2.0 + delta, 1.0).unwrap();
            let xi = correlation_length(&p).unwrap();
            let mut x = (3.0 * xi).ceil() as i64;
            while (x as f64) <= 6.0 * xi {
                for ch in Channel::ALL {
                    let ratio = corr_real(&p, x, ch).unwrap() / corr_asymptotic(&p, x as f64, ch).unwrap();
                    assert!((ratio - 1.0).norm() <= 0.02, "δ={delta} x={x} {ch}: {ratio}");
                }
                x += 3;
            }
        }
    }

    #[test]
    fn off_diagonal_lattice_identity() {
        let p = SshParams::new(0.7, 2.0, 0.9).unwrap();
        let iu = c(0.0, p.u);
        for x in [2, 5, 9] {
            let aa = |x| corr_real(&p, x, Channel::AA).unwrap();
            let ab = corr_real(&p, x, Channel::AB).unwrap();
            let ba = corr_real(&p, x, Channel::BA).unwrap();
            assert!((ab * iu - (aa(x) * p.v + aa(x + 1) * p.w)).norm() < 1e-8);
            assert!((ba * iu - (aa(x) * p.v + aa(x - 1) * p.w)).norm() < 1e-8);
        }
    }

    #[test]
    fn sign_alternates_near_transition() {
        let p = SshParams::new(1.0, 2.05, 1.0).unwrap();
        let xi = correlation_length(&p).unwrap();
        let x0 = (3.0 * xi).ceil() as i64;
        let a = corr_real(&p, x0, Channel::AA).unwrap();
        let b = corr_real(&p, x0 + 1, Channel::AA).unwrap();
        assert!(a.im * b.im < 0.0);
        assert!(b.norm() < a.norm());
    }

    #[test]
    fn exponent_fit_on_quadrature_data() {
        let series: Vec<CorrSeries> = [0.02, 0.05, 0.1]
            .iter()
            .map(|d| CorrSeries::sample(&SshParams::new(1.0, 2.0 + d, 1.0).unwrap(), Channel::AA, 3.0, 10.0).unwrap())
            .collect();
        let fit = fit_exponents(&series).unwrap();
        assert!((fit.decay_power + 0.5).abs() <= 0.05, "{fit:?}");
        assert!((fit.eta - 1.5).abs() <= 0.08);
        for row in &fit.xi_table {
            assert!((row.xi_fit / row.xi_exact - 1.0).abs() <= 0.05, "{row:?}");
        }
        // ξ ∝ δ^{−1/2} near the transition.
        assert!((fit.nu - 0.5).abs() < 0.05, "nu={}", fit.nu);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        #[test]
        fn matches_projector_oracle(u in 0.0f64..2.0, v in 0.1f64..2.0, w in 0.1f64..2.0, k in -PI..PI) {
            let p = SshParams::new(u, v, w).unwrap();
            let e = dispersion(&p, k);
            prop_assume!(e.norm() > 1e-3);
            for ch in Channel::ALL {
                let got = corr_momentum(&p, k, Temperature::Zero, ch).unwrap();
                let want = projector_oracle(&p, k, ch);
                prop_assert!((got - want).norm() <= 1e-9 * (1.0 + want.norm()), "{}: {} vs {}", ch, got, want);
            }
        }

        #[test]
        fn one_band_per_momentum(u in 0.0f64..2.0, v in 0.1f64..2.0, w in 0.1f64..2.0, k in -PI..PI, beta in 0.1f64..50.0) {
            let p = SshParams::new(u, v, w).unwrap();
            prop_assume!(dispersion(&p, k).norm() > 1e-3);
            prop_assume!(super::super::mode_partition_factor(&p, k, beta).unwrap().norm() > 1e-6);
            for t in [Temperature::Zero, Temperature::Inverse(beta)] {
                let aa = corr_momentum(&p, k, t, Channel::AA).unwrap();
                let bb = corr_momentum(&p, k, t, Channel::BB).unwrap();
                prop_assert!((aa + bb - 1.0).norm() < 1e-12);
            }
        }
    }
}
