//! Modified Bessel function of the second kind, order zero.

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

const SERIES_MAX: f64 = 2.0;
const ASYMPTOTIC_MIN: f64 = 25.0;

/// K₀(x) for x > 0.
///
/// Three regimes: the ascending series for x ≤ 2, the trapezoidal rule on
/// `∫₀^∞ e^{−x cosh t} dt` (geometrically convergent in the step) for
/// 2 < x < 25, and the Hankel asymptotic series beyond.
pub fn bessel_k0(x: f64) -> Result<f64> {
    Ok(bessel_k0_scaled(x)? * (-x).exp())
}

/// `e^x K₀(x)`, finite for all x > 0.
pub fn bessel_k0_scaled(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("K0 requires finite x > 0, got {x}")));
    }
    Ok(if x <= SERIES_MAX {
        k0_series(x) * x.exp()
    } else if x < ASYMPTOTIC_MIN {
        k0_trapezoid_scaled(x)
    } else {
        k0_asymptotic_scaled(x)
    })
}

fn k0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let log_term = (0.5 * x).ln() + EULER_GAMMA;
    let mut term = 1.0; // (x²/4)^k / (k!)²
    let mut harmonic = 0.0;
    let mut i0 = 1.0;
    let mut tail = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += term * harmonic;
        if term * harmonic < 1e-18 * tail.abs().max(1e-300) && term < 1e-18 * i0 {
            break;
        }
    }
    -log_term * i0 + tail
}

fn k0_trapezoid_scaled(x: f64) -> f64 {
    // Near t = 0 the integrand is a Gaussian of width 1/√x; the step keeps
    // the aliasing error exp(−2π²/(x h²)) below 1e−17.
    let step = (0.5 / x.sqrt()).min(0.25);
    let mut sum = 0.5;
    let mut t = step;
    loop {
        let exponent = x * (t.cosh() - 1.0);
        if exponent > 45.0 {
            break;
        }
        sum += (-exponent).exp();
        t += step;
    }
    sum * step
}

fn k0_asymptotic_scaled(x: f64) -> f64 {
    hankel_scaled(0.0, x)
}

/// Hankel series `√(π/2x) Σ_k a_k(μ)/x^k` with `μ = 4ν²`.
fn hankel_scaled(mu: f64, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (8.0 * k as f64 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    (std::f64::consts::PI / (2.0 * x)).sqrt() * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad::cosine_transform;

    #[test]
    fn value_at_one_matches_integral_representation() {
        // K₀(x) = ∫₀^∞ cos(x sinh t) dt = ∫₀^∞ cos(xs)/√(1+s²) ds
        let integral = cosine_transform(|s| 1.0 / (1.0 + s * s).sqrt(), 1.0, 50.0, 1e-12)
            .unwrap()
            .value;
        let k0 = bessel_k0(1.0).unwrap();
        assert!((k0 - 0.421_024_438_240_708_3).abs() < 1e-14);
        assert!((k0 - integral).abs() < 1e-8, "{k0} vs {integral}");
    }

    #[test]
    fn small_argument_logarithm() {
        let x = 1e-6;
        let lead = -(5e-7f64).ln() - 0.577_215_664_9;
        assert!((bessel_k0(x).unwrap() - lead).abs() <= 1e-6);
    }

    #[test]
    fn large_argument_asymptotic() {
        let x: f64 = 10.0;
        let leading = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
        let series = leading * (1.0 - 1.0 / 80.0 + 9.0 / (2.0 * 6400.0) - 225.0 / (6.0 * 512_000.0));
        assert!((bessel_k0(x).unwrap() - series).abs() < 1e-8);
    }

    #[test]
    fn regimes_agree_at_switchovers() {
        for x in [SERIES_MAX, ASYMPTOTIC_MIN] {
            let lo = match x {
                v if v == SERIES_MAX => k0_series(x) * x.exp(),
                _ => k0_trapezoid_scaled(x),
            };
            let hi = match x {
                v if v == SERIES_MAX => k0_trapezoid_scaled(x),
                _ => k0_asymptotic_scaled(x),
            };
            assert!((lo - hi).abs() <= 1e-12 * hi, "x={x}: {lo} vs {hi}");
        }
        // Overlapping interior region: series and trapezoid must agree closely.
        for x in [0.5, 1.0, 1.5, 3.0] {
            let s = k0_series(x) * x.exp();
            let t = k0_trapezoid_scaled(x);
            assert!((s - t).abs() <= 1e-11 * t, "x={x}");
        }
    }

    #[test]
    fn reference_values() {
        // Abramowitz & Stegun table 9.8 / high-precision references.
        let cases = [
            (0.1, 2.427_069_024_702_016_6),
            (2.0, 0.113_893_872_749_533_44),
            (5.0, 0.003_691_098_334_042_594_3),
            (20.0, 5.741_237_815_336_52e-10),
        ];
        for (x, want) in cases {
            let got = bessel_k0(x).unwrap();
            assert!((got - want).abs() <= 1e-10 * want, "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn relative_accuracy_across_range() {
        // Reference: trapezoid with a much finer step and a farther cutoff.
        let reference = |x: f64| {
            let step = 0.05 / x.sqrt().max(1.0);
            let mut sum = 0.5;
            let mut t = step;
            while x * (t.cosh() - 1.0) < 60.0 {
                sum += (-x * (t.cosh() - 1.0)).exp();
                t += step;
            }
            sum * step
        };
        for i in 0..=60 {
            let x = 1e-6 * (700.0f64 / 1e-6).powf(i as f64 / 60.0);
            let got = bessel_k0_scaled(x).unwrap();
            let want = reference(x);
            assert!((got - want).abs() <= 1e-10 * want, "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn far_tail_stays_finite() {
        let v = bessel_k0(700.0).unwrap();
        assert!(v > 0.0 && v.is_finite());
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_k0(0.0).is_err());
        assert!(bessel_k0(-1.0).is_err());
        assert!(bessel_k0(f64::NAN).is_err());
    }
}
